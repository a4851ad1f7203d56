//! Truncated ℕ-graded inner-product spaces carrying an sl₂ = {L₋₁, L₀, L₁}
//! action, and degree-indexed vectors living in them.

use std::fmt;

use serde::Serialize;

use crate::linalg::{self, Definiteness, Matrix};
use crate::scalar::Scalar;

/// Which structural invariant a candidate space failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InvariantKind {
    VacuumDimension { found: usize },
    Shape { what: String },
    GramSymmetry { level: usize },
    Positivity { level: usize, index: usize, pivot: String },
    Degenerate { level: usize, nullity: usize },
    Sl2Relation { level: usize },
    Adjointness { level: usize },
    VacuumInvariance,
}

impl fmt::Display for InvariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantKind::VacuumDimension { found } => write!(f, "dim V(0) = {found}, expected 1"),
            InvariantKind::Shape { what } => write!(f, "shape mismatch: {what}"),
            InvariantKind::GramSymmetry { level } => write!(f, "gram matrix not symmetric at level {level}"),
            InvariantKind::Positivity { level, index, pivot } => {
                write!(f, "gram not positive definite at level {level} (pivot {index} = {pivot})")
            }
            InvariantKind::Degenerate { level, nullity } => {
                write!(f, "gram degenerate at level {level} (nullity {nullity})")
            }
            InvariantKind::Sl2Relation { level } => write!(f, "[L1, L-1] != 2 L0 on V({level})"),
            InvariantKind::Adjointness { level } => write!(f, "<L-1 u, v> != <u, L1 v> between levels {level} and {}", level + 1),
            InvariantKind::VacuumInvariance => write!(f, "L-1 does not annihilate the vacuum"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("invariant violation: {0}")]
    InvariantViolation(InvariantKind),
    #[error("vector does not belong to this space (dims {expected:?} vs {found:?})")]
    MembershipMismatch { expected: Vec<usize>, found: Vec<usize> },
}

/// Positivity status of the gram form, one entry per level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Positivity {
    pub levels: Vec<Definiteness>,
}

impl Positivity {
    /// First level `≤ up_to` that is not positive definite.
    pub fn first_failure(&self, up_to: usize) -> Option<(usize, &Definiteness)> {
        self.levels
            .iter()
            .enumerate()
            .take(up_to + 1)
            .find(|(_, d)| !matches!(d, Definiteness::PositiveDefinite { .. }))
    }
}

/// Raw data for a graded space: labels, gram blocks and the two ladder
/// operators. `l_minus1[n]` maps V(n) → V(n+1) for `n < depth`;
/// `l_plus1[n]` maps V(n) → V(n−1) for `n ≥ 1` (entry 0 is unused).
#[derive(Clone, Debug)]
pub struct SpaceData {
    pub labels: Vec<Vec<String>>,
    pub gram: Vec<Matrix>,
    pub l_minus1: Vec<Matrix>,
    pub l_plus1: Vec<Matrix>,
}

#[derive(Clone, Debug)]
pub struct GradedSpace {
    depth: usize,
    dims: Vec<usize>,
    labels: Vec<Vec<String>>,
    gram: Vec<Matrix>,
    l_minus1: Vec<Matrix>,
    l_plus1: Vec<Matrix>,
    positivity: Positivity,
}

fn violation(kind: InvariantKind) -> SpaceError {
    SpaceError::InvariantViolation(kind)
}

fn shape(what: impl Into<String>) -> SpaceError {
    violation(InvariantKind::Shape { what: what.into() })
}

impl GradedSpace {
    /// Validates every structural invariant except positivity, which is
    /// recorded instead of enforced (see [`make_space`] for the strict form).
    pub fn build(data: SpaceData) -> Result<Self, SpaceError> {
        let SpaceData { labels, gram, l_minus1, l_plus1 } = data;
        if labels.is_empty() {
            return Err(shape("no degrees"));
        }
        let depth = labels.len() - 1;
        let dims: Vec<usize> = labels.iter().map(Vec::len).collect();
        if dims[0] != 1 {
            return Err(violation(InvariantKind::VacuumDimension { found: dims[0] }));
        }
        if gram.len() != depth + 1 || l_minus1.len() != depth + 1 || l_plus1.len() != depth + 1 {
            return Err(shape("per-degree matrix lists must have depth + 1 entries"));
        }
        for n in 0..=depth {
            if gram[n].shape() != (dims[n], dims[n]) {
                return Err(shape(format!("gram at level {n}")));
            }
            if n < depth && l_minus1[n].shape() != (dims[n + 1], dims[n]) {
                return Err(shape(format!("L-1 at level {n}")));
            }
            if n >= 1 && l_plus1[n].shape() != (dims[n - 1], dims[n]) {
                return Err(shape(format!("L1 at level {n}")));
            }
            if !gram[n].is_symmetric() {
                return Err(violation(InvariantKind::GramSymmetry { level: n }));
            }
        }
        if depth >= 1 && !l_minus1[0].is_zero() {
            return Err(violation(InvariantKind::VacuumInvariance));
        }
        for n in 0..depth {
            // [L1, L-1] = 2 L0 on V(n)
            let up_down = l_plus1[n + 1].mul(&l_minus1[n]);
            let down_up = if n >= 1 { l_minus1[n - 1].mul(&l_plus1[n]) } else { Matrix::zeros(1, 1) };
            let lhs = up_down.sub(&down_up);
            if lhs != Matrix::scalar_identity(dims[n], &Scalar::from(2 * n)) {
                return Err(violation(InvariantKind::Sl2Relation { level: n }));
            }
            // <L-1 u, v> = <u, L1 v>  for u in V(n), v in V(n+1)
            let left = l_minus1[n].transpose().mul(&gram[n + 1]);
            let right = gram[n].mul(&l_plus1[n + 1]);
            if left != right {
                return Err(violation(InvariantKind::Adjointness { level: n }));
            }
        }
        let positivity = Positivity { levels: gram.iter().map(linalg::definiteness).collect() };
        Ok(GradedSpace { depth, dims, labels, gram, l_minus1, l_plus1, positivity })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, n: usize) -> usize {
        self.dims.get(n).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn label(&self, n: usize, i: usize) -> &str {
        &self.labels[n][i]
    }

    pub fn labels(&self, n: usize) -> &[String] {
        &self.labels[n]
    }

    pub fn gram(&self, n: usize) -> &Matrix {
        &self.gram[n]
    }

    pub fn positivity(&self) -> &Positivity {
        &self.positivity
    }

    /// L₋₁ block V(n) → V(n+1), `None` at the top degree.
    pub fn l_minus1(&self, n: usize) -> Option<&Matrix> {
        (n < self.depth).then(|| &self.l_minus1[n])
    }

    /// L₁ block V(n) → V(n−1), `None` at degree 0.
    pub fn l_plus1(&self, n: usize) -> Option<&Matrix> {
        (n >= 1 && n <= self.depth).then(|| &self.l_plus1[n])
    }

    /// Copy with the gram block at `level` multiplied by `s`, bypassing
    /// validation. Meant for negative controls.
    pub fn with_gram_scaled(&self, level: usize, s: &Scalar) -> GradedSpace {
        let mut out = self.clone();
        out.gram[level] = out.gram[level].scale(s);
        out.positivity.levels[level] = linalg::definiteness(&out.gram[level]);
        out
    }

    pub fn vacuum(&self) -> Vector {
        Vector::basis(self, 0, 0)
    }

    /// Iterates `(degree, index)` over every basis vector of degree `≤ up_to`.
    pub fn basis_indices(&self, up_to: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..=up_to.min(self.depth)).flat_map(move |n| (0..self.dims[n]).map(move |i| (n, i)))
    }

    pub fn check_member(&self, v: &Vector) -> Result<(), SpaceError> {
        let found: Vec<usize> = v.comps.iter().map(Vec::len).collect();
        if found != self.dims {
            return Err(SpaceError::MembershipMismatch { expected: self.dims.clone(), found });
        }
        Ok(())
    }
}

/// Strict constructor: all invariants including positive definiteness of
/// every gram block. Labels default to `e{n}.{i}`.
pub fn make_space(
    dims: &[usize],
    gram: Vec<Matrix>,
    l_minus1: Vec<Matrix>,
    l_plus1: Vec<Matrix>,
) -> Result<GradedSpace, SpaceError> {
    let labels = dims
        .iter()
        .enumerate()
        .map(|(n, &d)| (0..d).map(|i| format!("e{n}.{i}")).collect())
        .collect();
    let space = GradedSpace::build(SpaceData { labels, gram, l_minus1, l_plus1 })?;
    require_positive(&space, space.depth())?;
    Ok(space)
}

/// Fails with the first non-positive level `≤ up_to`.
pub fn require_positive(space: &GradedSpace, up_to: usize) -> Result<(), SpaceError> {
    match space.positivity().first_failure(up_to) {
        None => Ok(()),
        Some((level, Definiteness::Semidefinite { nullity })) => {
            Err(violation(InvariantKind::Degenerate { level, nullity: *nullity }))
        }
        Some((level, Definiteness::Indefinite { index, pivot })) => Err(violation(InvariantKind::Positivity {
            level,
            index: *index,
            pivot: pivot.to_string(),
        })),
        Some((_, Definiteness::PositiveDefinite { .. })) => unreachable!(),
    }
}

/// A vector as degree-indexed exact coefficient lists. `truncated` is set
/// whenever some component was pushed outside the represented degrees or
/// depended on data that the truncation could not supply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vector {
    comps: Vec<Vec<Scalar>>,
    truncated: bool,
}

impl Vector {
    pub fn zero(space: &GradedSpace) -> Self {
        Self::zero_with_dims(space.dims())
    }

    pub fn zero_with_dims(dims: &[usize]) -> Self {
        Vector { comps: dims.iter().map(|&d| vec![Scalar::zero(); d]).collect(), truncated: false }
    }

    pub fn basis(space: &GradedSpace, degree: usize, index: usize) -> Self {
        let mut v = Self::zero(space);
        v.comps[degree][index] = Scalar::one();
        v
    }

    pub fn homogeneous(space: &GradedSpace, degree: usize, coeffs: Vec<Scalar>) -> Self {
        assert_eq!(coeffs.len(), space.dim(degree), "coefficient count mismatch");
        let mut v = Self::zero(space);
        v.comps[degree] = coeffs;
        v
    }

    pub fn component(&self, n: usize) -> &[Scalar] {
        &self.comps[n]
    }

    pub fn component_mut(&mut self, n: usize) -> &mut Vec<Scalar> {
        &mut self.comps[n]
    }

    pub fn depth(&self) -> usize {
        self.comps.len() - 1
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn mark_truncated(&mut self) {
        self.truncated = true;
    }

    pub fn with_truncated(mut self, t: bool) -> Self {
        self.truncated |= t;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| linalg::vec_is_zero(c))
    }

    /// Degrees carrying a non-zero component.
    pub fn support(&self) -> Vec<usize> {
        (0..self.comps.len()).filter(|&n| !linalg::vec_is_zero(&self.comps[n])).collect()
    }

    /// The single degree of a non-zero homogeneous vector.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        match self.support().as_slice() {
            [n] => Some(*n),
            _ => None,
        }
    }

    pub fn add_scaled(&mut self, s: &Scalar, other: &Vector) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            linalg::vec_axpy(a, s, b);
        }
        self.truncated |= other.truncated;
    }

    pub fn add(&self, other: &Vector) -> Vector {
        let mut out = self.clone();
        out.add_scaled(&Scalar::one(), other);
        out
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        let mut out = self.clone();
        out.add_scaled(&Scalar::int(-1), other);
        out
    }

    pub fn scale(&self, s: &Scalar) -> Vector {
        Vector {
            comps: self.comps.iter().map(|c| c.iter().map(|x| x * s).collect()).collect(),
            truncated: self.truncated,
        }
    }

    /// Exact equality of coefficients, ignoring the truncation flag.
    pub fn same_coefficients(&self, other: &Vector) -> bool {
        self.comps == other.comps
    }

    /// Human-readable expansion in the space's basis labels.
    pub fn describe(&self, space: &GradedSpace) -> String {
        let mut terms = Vec::new();
        for (n, comp) in self.comps.iter().enumerate() {
            for (i, c) in comp.iter().enumerate() {
                if !c.is_zero() {
                    terms.push(format!("({c}) {}", space.label(n, i)));
                }
            }
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }
}

/// Applies `L_k` for `k ∈ {−1, 0, 1}`. Components pushed above the depth
/// are dropped and the result is flagged truncated.
pub fn apply_sl2(space: &GradedSpace, k: i32, v: &Vector) -> Result<Vector, SpaceError> {
    space.check_member(v)?;
    let mut out = Vector::zero(space);
    out.truncated = v.truncated;
    for n in v.support() {
        let comp = v.component(n);
        match k {
            0 => linalg::vec_axpy(&mut out.comps[n], &Scalar::from(n), comp),
            -1 => match space.l_minus1(n) {
                Some(m) => linalg::vec_axpy(&mut out.comps[n + 1], &Scalar::one(), &m.mul_vec(comp)),
                None => out.truncated = true,
            },
            1 => {
                if let Some(m) = space.l_plus1(n) {
                    linalg::vec_axpy(&mut out.comps[n - 1], &Scalar::one(), &m.mul_vec(comp));
                }
            }
            _ => panic!("apply_sl2 only supports k in {{-1, 0, 1}}, got {k}"),
        }
    }
    Ok(out)
}

/// Degree-wise gram pairing.
pub fn inner(space: &GradedSpace, u: &Vector, v: &Vector) -> Result<Scalar, SpaceError> {
    space.check_member(u)?;
    space.check_member(v)?;
    Ok((0..=space.depth())
        .filter(|&n| !linalg::vec_is_zero(&u.comps[n]) && !linalg::vec_is_zero(&v.comps[n]))
        .map(|n| linalg::dot(&u.comps[n], &space.gram(n).mul_vec(&v.comps[n])))
        .sum())
}
