//! Θ involutions, conjugate states `ṽ = e^{L₁}(−1)^{L₀}Θv`, the invariant
//! form and Hermiticity of quasi-primary fields.

use serde::Serialize;

use crate::fields::FieldTable;
use crate::linalg::{Definiteness, Matrix};
use crate::reconstruct::{state_of_field, VAStructure};
use crate::report::{Check, SuiteReport, Witness};
use crate::scalar::Scalar;
use crate::space::{apply_sl2, inner, GradedSpace, Vector};

/// Per-degree matrices for Θ. Over rational scalars the antilinear map acts
/// linearly; `antilinear` tells the numeric layer to conjugate coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaMap {
    blocks: Vec<Matrix>,
    pub antilinear: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThetaDefect {
    Shape { level: usize },
    NotInvolution { level: usize },
    MovesVacuum,
    BreaksSl2 { k: i32, level: usize },
}

impl ThetaMap {
    pub fn new(blocks: Vec<Matrix>) -> Self {
        ThetaMap { blocks, antilinear: true }
    }

    pub fn identity(space: &GradedSpace) -> Self {
        Self::new(space.dims().iter().map(|&d| Matrix::identity(d)).collect())
    }

    pub fn block(&self, n: usize) -> &Matrix {
        &self.blocks[n]
    }

    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let mut out = v.clone();
        for n in v.support() {
            *out.component_mut(n) = self.blocks[n].mul_vec(v.component(n));
        }
        out
    }

    /// Θ² = Id, ΘΩ = Ω and Θ commuting with L₋₁, L₁ at every level.
    pub fn validate(&self, space: &GradedSpace) -> Result<(), ThetaDefect> {
        if self.blocks.len() != space.depth() + 1 {
            return Err(ThetaDefect::Shape { level: self.blocks.len().min(space.depth() + 1) });
        }
        for (n, b) in self.blocks.iter().enumerate() {
            if b.shape() != (space.dim(n), space.dim(n)) {
                return Err(ThetaDefect::Shape { level: n });
            }
            if b.mul(b) != Matrix::identity(space.dim(n)) {
                return Err(ThetaDefect::NotInvolution { level: n });
            }
        }
        if !self.blocks[0].get(0, 0).is_one() {
            return Err(ThetaDefect::MovesVacuum);
        }
        for n in 0..space.depth() {
            let lm = space.l_minus1(n).expect("below depth");
            if self.blocks[n + 1].mul(lm) != lm.mul(&self.blocks[n]) {
                return Err(ThetaDefect::BreaksSl2 { k: -1, level: n });
            }
            let lp = space.l_plus1(n + 1).expect("positive level");
            if self.blocks[n].mul(lp) != lp.mul(&self.blocks[n + 1]) {
                return Err(ThetaDefect::BreaksSl2 { k: 1, level: n + 1 });
            }
        }
        Ok(())
    }

    /// Θ restricted to a diagonal sign pattern, if it is one.
    pub fn diagonal_signs(&self, n: usize) -> Option<Vec<Scalar>> {
        let b = &self.blocks[n];
        let mut out = Vec::with_capacity(b.cols());
        for j in 0..b.cols() {
            for i in 0..b.rows() {
                if i != j && !b.get(i, j).is_zero() {
                    return None;
                }
            }
            out.push(b.get(j, j));
        }
        Some(out)
    }
}

/// `ṽ = e^{L₁}(−1)^{L₀}Θv`. The exponential terminates because `L₁`
/// lowers degree.
pub fn conjugate_state(space: &GradedSpace, theta: &ThetaMap, v: &Vector) -> Vector {
    let mut w = theta.apply(v);
    for n in w.support() {
        if n % 2 == 1 {
            *w.component_mut(n) = w.component(n).iter().map(|x| -x).collect();
        }
    }
    let mut out = w.clone();
    let mut term = w;
    let mut k = 1i64;
    loop {
        term = apply_sl2(space, 1, &term).expect("same space").scale(&Scalar::new(1, k));
        if term.is_zero() {
            break;
        }
        out = out.add(&term);
        k += 1;
    }
    out
}

fn pair(space: &GradedSpace, a: &Vector, b: &Vector) -> Scalar {
    inner(space, a, b).expect("same space")
}

/// `⟨v_n u, u′⟩ = ⟨u, ṽ_{−n} u′⟩` for basis `v`, `u`, `u′` of degree
/// `≤ depth`, with shifted modes taken per homogeneous component.
pub fn invariant_form_check(va: &VAStructure, theta: &ThetaMap) -> Check {
    let space = &va.space;
    let depth = va.depth;
    let mut check = Check::new("invariant_form", "⟨v_n u, u′⟩ = ⟨u, (e^{L₁}(−1)^{L₀}Θv)_{−n} u′⟩");
    for (d, i) in va.basis() {
        let v = Vector::basis(space, d, i);
        let vt = conjugate_state(space, theta, &v);
        let yv = va.y_basis(d, i);
        let yvt = match va.field_of(&vt) {
            Ok(f) => f,
            Err(_) => {
                check.skip();
                continue;
            }
        };
        for (p, a) in space.basis_indices(depth) {
            let u = Vector::basis(space, p, a);
            for q in 0..=depth {
                // v_n maps V(p) to V(p − n).
                let n = p as i64 - q as i64;
                let vu = yv.shifted_mode_apply(n, &u);
                for b in 0..space.dim(q) {
                    let u2 = Vector::basis(space, q, b);
                    let right = yvt.linear_shifted_mode_apply(-n, &u2);
                    if vu.is_truncated() || right.is_truncated() {
                        check.skip();
                        continue;
                    }
                    let lhs = pair(space, &vu, &u2);
                    let rhs = pair(space, &u, &right);
                    check.record(lhs == rhs, || {
                        Witness::new(
                            format!("v={} n={n} u={} u'={}", space.label(d, i), space.label(p, a), space.label(q, b)),
                            &rhs,
                            &lhs,
                        )
                    });
                }
            }
        }
    }
    check.finish()
}

/// `⟨φ_n u, u′⟩ = ⟨u, φ_{−n} u′⟩` with `φ_n = A₍ₙ₊d₋₁₎`.
pub fn hermitian_check(space: &GradedSpace, a: &FieldTable, d: i64, depth: usize) -> Check {
    let mut check = Check::new("hermitian", "⟨φ_n u, u′⟩ = ⟨u, φ_{−n} u′⟩");
    let depth = depth.min(space.depth());
    let phi = |n: i64, v: &Vector| a.mode_apply(n + d - 1, v);
    for (p, i) in space.basis_indices(depth) {
        let u = Vector::basis(space, p, i);
        for q in 0..=depth {
            let n = p as i64 - q as i64;
            let left = phi(n, &u);
            for b in 0..space.dim(q) {
                let u2 = Vector::basis(space, q, b);
                let right = phi(-n, &u2);
                if left.is_truncated() || right.is_truncated() {
                    check.skip();
                    continue;
                }
                let lhs = pair(space, &left, &u2);
                let rhs = pair(space, &u, &right);
                check.record(lhs == rhs, || {
                    Witness::new(format!("n={n} u={} u'={}", space.label(p, i), space.label(q, b)), &rhs, &lhs)
                });
            }
        }
    }
    check.finish()
}

/// Hypotheses for a unitary structure generated by Hermitian quasi-primary
/// fields, each recorded as its own check.
pub fn hermitian_generating_criterion(va: &VAStructure, theta: &ThetaMap, model_name: &str) -> SuiteReport {
    let space = &va.space;
    let depth = va.depth;
    let mut checks = Vec::new();

    let mut vac = Check::new("vacuum_unique", "dim V(0) = 1");
    vac.record(space.dim(0) == 1, || Witness::new("V(0)", 1, space.dim(0)));
    checks.push(vac.finish());

    let mut pos = Check::new("positivity", "⟨·,·⟩ positive definite on V(n)");
    for n in 0..=depth {
        match &space.positivity().levels[n] {
            Definiteness::PositiveDefinite { .. } => pos.pass(),
            Definiteness::Semidefinite { nullity } => {
                pos.fail(Witness::new(format!("level {n}"), "nullity 0", format!("nullity {nullity}")))
            }
            Definiteness::Indefinite { index, pivot } => {
                let label = space.label(n, *index);
                let norm = space.gram(n).get(*index, *index);
                pos.fail(Witness::new(
                    format!("level {n}, pivot {index} ({label}), <{label}, {label}> = {norm}"),
                    "pivot > 0",
                    pivot,
                ))
            }
        }
    }
    checks.push(pos.finish());

    let mut sl2 = Check::new("sl2_unitary", "⟨L₋₁u, v⟩ = ⟨u, L₁v⟩, ⟨L₀u, v⟩ = ⟨u, L₀v⟩");
    for (p, i) in space.basis_indices(depth.saturating_sub(1)) {
        let u = Vector::basis(space, p, i);
        let lu = apply_sl2(space, -1, &u).expect("same space");
        for b in 0..space.dim(p + 1) {
            let v = Vector::basis(space, p + 1, b);
            let lv = apply_sl2(space, 1, &v).expect("same space");
            let (x, y) = (pair(space, &lu, &v), pair(space, &u, &lv));
            sl2.record(x == y, || Witness::new(format!("u={} v={}", space.label(p, i), space.label(p + 1, b)), &y, &x));
        }
    }
    checks.push(sl2.finish());

    let mut th = Check::new("theta", "Θ² = 1, ΘΩ = Ω, [Θ, L_k] = 0");
    match theta.validate(space) {
        Ok(()) => th.pass(),
        Err(e) => th.fail(Witness::new("Θ", "valid involution", format!("{e:?}"))),
    }
    checks.push(th.finish());

    let mut qp = Check::new("quasi_primary", "L₁ v = 0 for generator states");
    let mut sign = Check::new("hermitian_sign", "Θv = (−1)^d v for generator states");
    let mut herm = Check::new("hermitian", "⟨φ_n u, u′⟩ = ⟨u, φ_{−n} u′⟩");
    for (gi, g) in va.generators.iter().enumerate() {
        let Ok(v) = state_of_field(g) else {
            qp.fail(Witness::new(format!("G{gi}"), "regular at origin", "singular"));
            continue;
        };
        let l1v = apply_sl2(space, 1, &v).expect("same space");
        qp.record(l1v.is_zero(), || Witness::new(format!("L1 G{gi}"), 0, l1v.describe(space)));
        let d = g.weight();
        let s = if d % 2 == 0 { Scalar::one() } else { Scalar::int(-1) };
        let tv = theta.apply(&v);
        let expect = v.scale(&s);
        sign.record(tv.same_coefficients(&expect), || Witness::new(format!("Θ G{gi}"), expect.describe(space), tv.describe(space)));
        let h = hermitian_check(space, g, d, depth);
        let shown = h.witnesses.len();
        herm.checked += h.checked - shown;
        herm.failures += h.failures - shown;
        herm.truncated += h.truncated;
        for w in h.witnesses {
            herm.fail(Witness::new(format!("G{gi} {}", w.location), w.expected, w.found));
        }
    }
    checks.push(qp.finish());
    checks.push(sign.finish());
    checks.push(herm.finish());
    SuiteReport::new("unitarity", model_name, depth, checks)
}
