//! Built-in example algebras with exact structure constants: the rank-one
//! Heisenberg (free boson) vacuum module and the Virasoro vacuum module.
//!
//! Both are spanned by monomials `X₋λ₁ ⋯ X₋λᵣ Ω` with `λ₁ ≥ … ≥ λᵣ`, where
//! `X = α` (parts ≥ 1) or `X = L` (parts ≥ 2). Spaces are built to a
//! working depth `W = D + headroom` so that products and commutators can be
//! evaluated exactly on degrees `≤ D`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::fields::{default_headroom, FieldTable};
use crate::linalg::{self, Definiteness, Matrix};
use crate::scalar::Scalar;
use crate::space::{GradedSpace, SpaceData, SpaceError};
use crate::unitarity::ThetaMap;

pub type Partition = Vec<u32>;
type Combo = BTreeMap<Partition, Scalar>;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("gram form degenerate at level {level} (nullity {nullity})")]
    GramDegenerate { level: usize, nullity: usize },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// How to treat a singular gram form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullVectors {
    /// Fail with `GramDegenerate` if the form is singular at a level `≤ D`.
    #[default]
    Reject,
    /// Keep the universal module, radical included.
    Keep,
    /// Divide out the radical of the form level by level.
    Quotient,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelKind {
    Heisenberg,
    Virasoro { c: Scalar },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDescriptor {
    pub model: ModelKind,
    pub depth: usize,
    /// Extra degrees above `depth`; defaults to `2d + 3` for a generator of
    /// weight `d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub headroom: Option<usize>,
    #[serde(default)]
    pub null_vectors: NullVectors,
}

impl ModelDescriptor {
    pub fn heisenberg(depth: usize) -> Self {
        ModelDescriptor { model: ModelKind::Heisenberg, depth, headroom: None, null_vectors: NullVectors::Reject }
    }

    pub fn virasoro(c: Scalar, depth: usize) -> Self {
        ModelDescriptor { model: ModelKind::Virasoro { c }, depth, headroom: None, null_vectors: NullVectors::Reject }
    }

    pub fn with_headroom(mut self, headroom: usize) -> Self {
        self.headroom = Some(headroom);
        self
    }

    pub fn with_null_vectors(mut self, policy: NullVectors) -> Self {
        self.null_vectors = policy;
        self
    }

    pub fn generator_weight(&self) -> i64 {
        match self.model {
            ModelKind::Heisenberg => 1,
            ModelKind::Virasoro { .. } => 2,
        }
    }

    pub fn working_depth(&self) -> usize {
        let d = self.generator_weight();
        self.depth + self.headroom.unwrap_or_else(|| default_headroom(d, d, -1))
    }

    pub fn name(&self) -> String {
        match &self.model {
            ModelKind::Heisenberg => "heisenberg".into(),
            ModelKind::Virasoro { c } => format!("virasoro(c={c})"),
        }
    }

    /// Canonical Θ shipped with the model.
    pub fn theta_rule(&self) -> &'static str {
        match self.model {
            ModelKind::Heisenberg => "a(-l1)...a(-lk)|0> -> (-1)^k a(-l1)...a(-lk)|0>",
            ModelKind::Virasoro { .. } => "identity on the real monomial basis",
        }
    }

    pub fn build(&self) -> Result<Model, ModelError> {
        match &self.model {
            ModelKind::Heisenberg => build_model(self, &Heisenberg),
            ModelKind::Virasoro { c } => build_model(self, &Virasoro::new(c.clone())),
        }
    }
}

/// A built model: the space at working depth, its generating field and Θ.
#[derive(Clone, Debug)]
pub struct Model {
    pub descriptor: ModelDescriptor,
    pub space: GradedSpace,
    pub generator: FieldTable,
    pub theta: ThetaMap,
    /// Levels where the universal form was singular, with nullities.
    pub radical: Vec<(usize, usize)>,
}

impl Model {
    /// Degrees on which checks are exact.
    pub fn depth(&self) -> usize {
        self.descriptor.depth
    }

    pub fn working_depth(&self) -> usize {
        self.space.depth()
    }
}

pub fn heisenberg(depth: usize) -> Result<Model, ModelError> {
    ModelDescriptor::heisenberg(depth).build()
}

pub fn virasoro(c: Scalar, depth: usize, policy: NullVectors) -> Result<Model, ModelError> {
    ModelDescriptor::virasoro(c, depth).with_null_vectors(policy).build()
}

/// Partitions of `n` into parts `≥ min_part`, parts descending, listed with
/// the largest leading part first.
pub fn partitions(n: u32, min_part: u32) -> Vec<Partition> {
    fn go(n: u32, max: u32, min: u32, prefix: &mut Partition, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (min..=max.min(n)).rev() {
            prefix.push(part);
            go(n - part, part, min, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, min_part.max(1), &mut Vec::new(), &mut out);
    out
}

/// Mode algebra of a monomial model.
trait MonomialAlgebra {
    fn min_part(&self) -> u32;
    fn letter(&self) -> &'static str;
    fn generator_weight(&self) -> i64;
    /// Shifted generator mode `X_k` applied to a basis monomial.
    fn mode(&self, k: i64, lambda: &Partition) -> Combo;
    /// `L_k` for `k ∈ {−1, 0, 1}`.
    fn virasoro_sl2(&self, k: i64, lambda: &Partition) -> Combo;
    fn theta_sign(&self, lambda: &Partition) -> Scalar;
}

fn single(p: Partition, s: Scalar) -> Combo {
    let mut c = Combo::new();
    if !s.is_zero() {
        c.insert(p, s);
    }
    c
}

fn add_into(acc: &mut Combo, s: &Scalar, x: &Combo) {
    for (k, v) in x {
        let e = acc.entry(k.clone()).or_insert_with(Scalar::zero);
        *e += &(s * v);
        if e.is_zero() {
            acc.remove(k);
        }
    }
}

fn insert_part(lambda: &Partition, part: u32) -> Partition {
    let mut out = lambda.clone();
    let pos = out.iter().position(|&x| x < part).unwrap_or(out.len());
    out.insert(pos, part);
    out
}

struct Heisenberg;

impl MonomialAlgebra for Heisenberg {
    fn min_part(&self) -> u32 {
        1
    }

    fn letter(&self) -> &'static str {
        "a"
    }

    fn generator_weight(&self) -> i64 {
        1
    }

    fn mode(&self, k: i64, lambda: &Partition) -> Combo {
        match k.cmp(&0) {
            std::cmp::Ordering::Equal => Combo::new(),
            std::cmp::Ordering::Less => single(insert_part(lambda, (-k) as u32), Scalar::one()),
            std::cmp::Ordering::Greater => {
                let mult = lambda.iter().filter(|&&x| x as i64 == k).count();
                match lambda.iter().position(|&x| x as i64 == k) {
                    Some(pos) => {
                        let mut rest = lambda.clone();
                        rest.remove(pos);
                        single(rest, Scalar::int(k * mult as i64))
                    }
                    None => Combo::new(),
                }
            }
        }
    }

    // [L_k, α₋ₗ] = l α_{k−l}, and L_k Ω = 0 for k ≥ −1.
    fn virasoro_sl2(&self, k: i64, lambda: &Partition) -> Combo {
        let mut out = Combo::new();
        for (i, &part) in lambda.iter().enumerate() {
            let mut rest = lambda.clone();
            rest.remove(i);
            let new = part as i64 - k;
            if new <= 0 {
                continue;
            }
            add_into(&mut out, &Scalar::int(part as i64), &single(insert_part(&rest, new as u32), Scalar::one()));
        }
        out
    }

    fn theta_sign(&self, lambda: &Partition) -> Scalar {
        if lambda.len() % 2 == 0 {
            Scalar::one()
        } else {
            Scalar::int(-1)
        }
    }
}

struct Virasoro {
    c: Scalar,
    memo: std::cell::RefCell<HashMap<(i64, Partition), Combo>>,
}

impl Virasoro {
    fn new(c: Scalar) -> Self {
        Virasoro { c, memo: Default::default() }
    }

    /// `L_k L₋λ Ω` straightened into ordered monomials with parts ≥ 2.
    fn apply(&self, k: i64, lambda: &Partition) -> Combo {
        if let Some(hit) = self.memo.borrow().get(&(k, lambda.clone())) {
            return hit.clone();
        }
        let out = self.apply_uncached(k, lambda);
        self.memo.borrow_mut().insert((k, lambda.clone()), out.clone());
        out
    }

    fn apply_uncached(&self, k: i64, lambda: &Partition) -> Combo {
        let Some(&a) = lambda.first() else {
            return if k <= -2 { single(vec![(-k) as u32], Scalar::one()) } else { Combo::new() };
        };
        if k <= -2 && -k >= a as i64 {
            let mut out = vec![(-k) as u32];
            out.extend_from_slice(lambda);
            return single(out, Scalar::one());
        }
        // L_k L₋ₐ R = L₋ₐ (L_k R) + (k + a) L_{k−a} R + (c/12)(k³ − k) δ_{k,a} R
        let a = a as i64;
        let rest: Partition = lambda[1..].to_vec();
        let mut out = Combo::new();
        for (mono, coeff) in self.apply(k, &rest) {
            add_into(&mut out, &coeff, &self.apply(-a, &mono));
        }
        if k + a != 0 {
            add_into(&mut out, &Scalar::int(k + a), &self.apply(k - a, &rest));
        }
        if k == a {
            let central = &self.c * &Scalar::new(k * k * k - k, 12);
            add_into(&mut out, &central, &single(rest, Scalar::one()));
        }
        out
    }
}

impl MonomialAlgebra for Virasoro {
    fn min_part(&self) -> u32 {
        2
    }

    fn letter(&self) -> &'static str {
        "L"
    }

    fn generator_weight(&self) -> i64 {
        2
    }

    fn mode(&self, k: i64, lambda: &Partition) -> Combo {
        self.apply(k, lambda)
    }

    fn virasoro_sl2(&self, k: i64, lambda: &Partition) -> Combo {
        self.apply(k, lambda)
    }

    fn theta_sign(&self, _lambda: &Partition) -> Scalar {
        Scalar::one()
    }
}

fn label(letter: &str, lambda: &Partition) -> String {
    if lambda.is_empty() {
        return "|0>".into();
    }
    let mut s = String::new();
    for p in lambda {
        s.push_str(&format!("{letter}(-{p})"));
    }
    s.push_str("|0>");
    s
}

/// Universal-module data before any quotient.
struct Universal {
    basis: Vec<Vec<Partition>>,
    index: Vec<HashMap<Partition, usize>>,
}

impl Universal {
    fn new(depth: usize, min_part: u32) -> Self {
        let basis: Vec<Vec<Partition>> = (0..=depth as u32).map(|n| partitions(n, min_part)).collect();
        let index = basis.iter().map(|b| b.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect()).collect();
        Universal { basis, index }
    }

    fn dims(&self) -> Vec<usize> {
        self.basis.iter().map(Vec::len).collect()
    }

    fn column(&self, level: usize, combo: &Combo) -> Vec<Scalar> {
        let mut col = vec![Scalar::zero(); self.basis[level].len()];
        for (mono, s) in combo {
            let deg: u32 = mono.iter().sum();
            assert_eq!(deg as usize, level, "mode output lands on the wrong level");
            col[self.index[level][mono]] = s.clone();
        }
        col
    }

    /// Matrix of a degree-shifting operator from level `p` to level `t`.
    fn operator(&self, p: usize, t: usize, f: impl Fn(&Partition) -> Combo) -> Matrix {
        let cols = self.basis[p].iter().map(|mono| self.column(t, &f(mono))).collect();
        Matrix::from_columns(self.basis[t].len(), cols)
    }
}

fn gram_level<A: MonomialAlgebra>(alg: &A, uni: &Universal, n: usize) -> Matrix {
    let dim = uni.basis[n].len();
    let mut rows = vec![vec![Scalar::zero(); dim]; dim];
    for (i, left) in uni.basis[n].iter().enumerate() {
        for (j, right) in uni.basis[n].iter().enumerate().skip(i) {
            // ⟨X₋λ₁⋯X₋λᵣΩ, u⟩: apply X_λ₁ first, then X_λ₂, …
            let mut cur = single(right.clone(), Scalar::one());
            for &part in left {
                let mut next = Combo::new();
                for (mono, s) in &cur {
                    add_into(&mut next, s, &alg.mode(part as i64, mono));
                }
                cur = next;
            }
            let v = cur.get(&Vec::new()).cloned().unwrap_or_else(Scalar::zero);
            rows[i][j] = v.clone();
            rows[j][i] = v;
        }
    }
    Matrix::from_rows(&rows)
}

/// Per-level reduction onto a maximal nonsingular principal subset of the
/// gram matrix: `select` are the kept monomials, `project` maps universal
/// coordinates to quotient coordinates.
struct Reduction {
    select: Vec<usize>,
    project: Matrix,
}

impl Reduction {
    fn identity(dim: usize) -> Self {
        Reduction { select: (0..dim).collect(), project: Matrix::identity(dim) }
    }

    fn of_gram(g: &Matrix) -> Self {
        let rows = g.to_rows();
        let target = linalg::rank(&rows);
        let mut select: Vec<usize> = Vec::new();
        for i in 0..g.rows() {
            if select.len() == target {
                break;
            }
            let mut trial = select.clone();
            trial.push(i);
            if !linalg::determinant(&g.principal(&trial).to_rows()).is_zero() {
                select = trial;
            }
        }
        let sub = g.principal(&select).to_rows();
        let inv = Matrix::from_rows(&linalg::inverse(&sub).expect("nonsingular principal block"));
        let cross: Vec<Vec<Scalar>> = select.iter().map(|&i| rows[i].clone()).collect();
        let cross = if cross.is_empty() { Matrix::zeros(0, g.cols()) } else { Matrix::from_rows(&cross) };
        Reduction { select, project: inv.mul(&cross) }
    }

    fn embed(&self, dim: usize) -> Matrix {
        let cols = self
            .select
            .iter()
            .map(|&i| {
                let mut c = vec![Scalar::zero(); dim];
                c[i] = Scalar::one();
                c
            })
            .collect();
        Matrix::from_columns(dim, cols)
    }

    /// Universal operator from level p to level t, pushed to the quotient.
    fn reduce(red: &[Reduction], dims: &[usize], p: usize, t: usize, m: &Matrix) -> Matrix {
        red[t].project.mul(m).mul(&red[p].embed(dims[p]))
    }
}

fn build_model<A: MonomialAlgebra>(desc: &ModelDescriptor, alg: &A) -> Result<Model, ModelError> {
    let work = desc.working_depth();
    let uni = Universal::new(work, alg.min_part());
    let udims = uni.dims();
    let grams: Vec<Matrix> = (0..=work).map(|n| gram_level(alg, &uni, n)).collect();

    let mut radical = Vec::new();
    for (n, g) in grams.iter().enumerate() {
        if let Definiteness::Semidefinite { nullity } = linalg::definiteness(g) {
            radical.push((n, nullity));
        } else if let Definiteness::Indefinite { .. } = linalg::definiteness(g) {
            let nullity = g.rows() - linalg::rank(&g.to_rows());
            if nullity > 0 {
                radical.push((n, nullity));
            }
        }
    }
    if desc.null_vectors == NullVectors::Reject {
        if let Some(&(level, nullity)) = radical.iter().find(|(n, _)| *n <= desc.depth) {
            return Err(ModelError::GramDegenerate { level, nullity });
        }
    }
    let quotient = desc.null_vectors == NullVectors::Quotient;
    let red: Vec<Reduction> = grams
        .iter()
        .map(|g| if quotient { Reduction::of_gram(g) } else { Reduction::identity(g.rows()) })
        .collect();
    let dims: Vec<usize> = red.iter().map(|r| r.select.len()).collect();
    let reduce = |p: usize, t: usize, m: Matrix| {
        if quotient {
            Reduction::reduce(&red, &udims, p, t, &m)
        } else {
            m
        }
    };

    let labels: Vec<Vec<String>> =
        red.iter().enumerate().map(|(n, r)| r.select.iter().map(|&i| label(alg.letter(), &uni.basis[n][i])).collect()).collect();
    let gram: Vec<Matrix> = grams.iter().zip(&red).map(|(g, r)| g.principal(&r.select)).collect();
    let l_minus1: Vec<Matrix> = (0..=work)
        .map(|n| {
            if n < work {
                reduce(n, n + 1, uni.operator(n, n + 1, |m| alg.virasoro_sl2(-1, m)))
            } else {
                Matrix::zeros(0, dims[n])
            }
        })
        .collect();
    let l_plus1: Vec<Matrix> = (0..=work)
        .map(|n| {
            if n >= 1 {
                reduce(n, n - 1, uni.operator(n, n - 1, |m| alg.virasoro_sl2(1, m)))
            } else {
                Matrix::zeros(0, dims[0])
            }
        })
        .collect();
    let space = GradedSpace::build(SpaceData { labels, gram, l_minus1, l_plus1 })?;

    let d = alg.generator_weight();
    let generator = FieldTable::from_fn(d, &dims, |n, p, t| {
        // Shifted mode index k = n − d + 1 lowers degree by k.
        let k = n - d + 1;
        reduce(p, t, uni.operator(p, t, |m| alg.mode(k, m)))
    });
    let theta = ThetaMap::new(
        (0..=work)
            .map(|n| {
                let diag: Vec<Vec<Scalar>> = uni.basis[n]
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        let mut row = vec![Scalar::zero(); udims[n]];
                        row[i] = alg.theta_sign(m);
                        row
                    })
                    .collect();
                let m = if diag.is_empty() { Matrix::zeros(0, 0) } else { Matrix::from_rows(&diag) };
                reduce(n, n, m)
            })
            .collect(),
    );
    Ok(Model { descriptor: desc.clone(), space, generator, theta, radical })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Vector;

    fn brute_partition_count(n: u32, min: u32) -> usize {
        // Count multisets by direct recursion on the smallest allowed part.
        fn count(n: u32, min: u32) -> usize {
            if n == 0 {
                return 1;
            }
            (min..=n).map(|p| count(n - p, p)).sum()
        }
        count(n, min.max(1))
    }

    #[test]
    fn heisenberg_dims_match_partition_numbers() {
        let m = heisenberg(6).unwrap();
        assert_eq!(&m.space.dims()[..7], &[1, 1, 2, 3, 5, 7, 11]);
        for n in 0..=m.working_depth() as u32 {
            assert_eq!(m.space.dim(n as usize), brute_partition_count(n, 1));
        }
    }

    #[test]
    fn heisenberg_level_two_gram_is_diag_two_two() {
        let m = heisenberg(2).unwrap();
        assert_eq!(m.space.labels(2), &["a(-2)|0>", "a(-1)a(-1)|0>"]);
        assert_eq!(m.space.gram(2).to_rows(), vec![vec![Scalar::int(2), Scalar::zero()], vec![Scalar::zero(), Scalar::int(2)]]);
    }

    #[test]
    fn heisenberg_theta_is_valid() {
        let m = heisenberg(4).unwrap();
        m.theta.validate(&m.space).unwrap();
        let v = Vector::basis(&m.space, 1, 0);
        assert!(m.theta.apply(&v).same_coefficients(&v.scale(&Scalar::int(-1))));
    }

    #[test]
    fn virasoro_dims_and_level_two_norm() {
        let c = Scalar::new(1, 2);
        let m = virasoro(c.clone(), 5, NullVectors::Reject).unwrap();
        assert_eq!(&m.space.dims()[..6], &[1, 0, 1, 1, 2, 2]);
        assert_eq!(m.space.gram(2).get(0, 0), &c / &Scalar::int(2));
        m.theta.validate(&m.space).unwrap();
    }

    #[test]
    fn virasoro_half_degenerates_at_level_six() {
        let c = Scalar::new(1, 2);
        assert_eq!(virasoro(c.clone(), 6, NullVectors::Reject).unwrap_err(), ModelError::GramDegenerate { level: 6, nullity: 1 });
        let kept = virasoro(c.clone(), 6, NullVectors::Keep).unwrap();
        assert_eq!(&kept.space.dims()[..7], &[1, 0, 1, 1, 2, 2, 4]);
        let q = virasoro(c, 6, NullVectors::Quotient).unwrap();
        assert_eq!(&q.space.dims()[..7], &[1, 0, 1, 1, 2, 2, 3]);
        assert!(q.space.positivity().first_failure(q.working_depth()).is_none());
        q.theta.validate(&q.space).unwrap();
    }

    #[test]
    fn virasoro_level_four_determinant_in_c() {
        // Basis {L(-4), L(-2)L(-2)}: gram [[5c, 3c], [3c, c(8 + c)/2]], det = c²(5c + 22)/2.
        for (p, q) in [(1, 2), (1, 1), (7, 10), (-1, 1), (3, 1)] {
            let c = Scalar::new(p, q);
            let m = virasoro(c.clone(), 4, NullVectors::Keep).unwrap();
            let det = linalg::determinant(&m.space.gram(4).to_rows());
            let expect = &(&c * &c) * &(&(&Scalar::int(5) * &c) + &Scalar::int(22)) / Scalar::int(2);
            assert_eq!(det, expect, "c = {c}");
        }
    }

    #[test]
    fn negative_central_charge_fails_positivity_at_level_two() {
        let m = virasoro(Scalar::int(-1), 4, NullVectors::Reject).unwrap();
        let (level, d) = m.space.positivity().first_failure(4).unwrap();
        assert_eq!(level, 2);
        assert_eq!(d, &Definiteness::Indefinite { index: 0, pivot: Scalar::new(-1, 2) });
    }

    #[test]
    fn descriptor_roundtrips_through_json() {
        let d = ModelDescriptor::virasoro(Scalar::new(1, 2), 6).with_null_vectors(NullVectors::Quotient);
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<ModelDescriptor>(&s).unwrap(), d);
        assert!(serde_json::from_str::<ModelDescriptor>(r#"{"model":{"kind":"heisenberg"},"depth":2,"bogus":1}"#).is_err());
    }
}
