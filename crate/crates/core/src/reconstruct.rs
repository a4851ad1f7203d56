//! Reconstruction of a vertex algebra from generating fields: closure under
//! derivatives and (n)-products, the state-field map and the axiom suite.

use serde::Serialize;

use crate::fields::{self, locality_order, FieldError, FieldTable, LocalityOrder, Window};
use crate::linalg::{self, Matrix, SpanTracker};
use crate::report::{Check, SuiteReport, Witness};
use crate::scalar::Scalar;
use crate::space::{apply_sl2, GradedSpace, Vector};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReconstructError {
    #[error("field is singular at the origin: mode ({0}) does not annihilate the vacuum")]
    SingularAtOrigin(i64),
    #[error("closure budget exhausted after {evaluated} candidates; span dims {span:?}")]
    BudgetExhausted { evaluated: usize, span: Vec<usize> },
    #[error("closure stabilized on a proper subspace: span dims {span:?}, space dims {dims:?}")]
    NotGenerating { span: Vec<usize>, dims: Vec<usize> },
    #[error("distinct closure fields share a state: {first} vs {second}")]
    InjectivityFailure { first: String, second: String },
    #[error("state of degree {0} lies above the checked depth")]
    OutOfRange(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `A₍₋₁₎Ω`, after checking `A₍ₙ₎Ω = 0` for `n ≥ 0` on every exact block.
pub fn state_of_field(a: &FieldTable) -> Result<Vector, ReconstructError> {
    let dims = a.dims();
    let mut omega = Vector::zero_with_dims(dims);
    omega.component_mut(0)[0] = Scalar::one();
    for n in 0..a.weight().max(0) {
        let out = a.mode_apply(n, &omega);
        if !out.is_truncated() && !out.is_zero() {
            return Err(ReconstructError::SingularAtOrigin(n));
        }
    }
    let v = a.mode_apply(-1, &omega);
    if v.is_truncated() {
        return Err(FieldError::HeadroomExceeded(format!("state of a weight-{} field", a.weight())).into());
    }
    Ok(v)
}

/// How a closure field was produced; indices refer to the closure list,
/// except `left` which indexes the generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Origin {
    Identity,
    Generator { index: usize },
    Derivative { of: usize },
    Product { left: usize, n: i64, right: usize },
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Origin::Identity => write!(f, "Id"),
            Origin::Generator { index } => write!(f, "G{index}"),
            Origin::Derivative { of } => write!(f, "d(F{of})"),
            Origin::Product { left, n, right } => write!(f, "G{left}_({n}) F{right}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClosureField {
    pub table: FieldTable,
    pub state: Vector,
    pub origin: Origin,
}

impl ClosureField {
    pub fn degree(&self) -> usize {
        self.table.weight() as usize
    }
}

#[derive(Clone, Debug)]
pub struct Closure {
    /// Fields with linearly independent states, in creation order.
    pub fields: Vec<ClosureField>,
    /// Candidates whose states were already spanned, kept on a small window
    /// to verify that equal states give equal fields.
    pub dependent: Vec<ClosureField>,
    pub span: Vec<usize>,
    pub evaluated: usize,
    pub depth: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_candidates: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_candidates: 10_000 }
    }
}

fn candidate_state(g: &FieldTable, f: &FieldTable, n: i64, depth: usize) -> Result<Vector, ReconstructError> {
    let w = Window { max_source: 0, max_target: depth };
    state_of_field(&fields::n_product_in(g, f, n, w)?)
}

/// Breadth-first closure of `{Id} ∪ generators` under `∂` and `G₍ₙ₎·` for
/// generators `G`, keeping fields whose states enlarge the span of degrees
/// `≤ depth`. Stops once that span is everything.
pub fn dong_closure(space: &GradedSpace, generators: &[FieldTable], depth: usize, budget: Budget) -> Result<Closure, ReconstructError> {
    let depth = depth.min(space.depth());
    let dims: Vec<usize> = space.dims()[..=depth].to_vec();
    let mut spans: Vec<SpanTracker> = (0..=depth).map(|_| SpanTracker::new()).collect();
    let mut kept: Vec<ClosureField> = Vec::new();
    let mut dependent: Vec<ClosureField> = Vec::new();
    let mut evaluated = 0;
    let full = |spans: &[SpanTracker]| spans.iter().zip(&dims).all(|(s, &d)| s.rank() == d);
    let span_dims = |spans: &[SpanTracker]| spans.iter().map(SpanTracker::rank).collect::<Vec<_>>();

    let mut offer = |table: FieldTable, state: Vector, origin: Origin, spans: &mut Vec<SpanTracker>, kept: &mut Vec<ClosureField>| {
        let d = table.weight();
        let cf = ClosureField { table, state, origin };
        if d < 0 || d as usize > depth {
            return;
        }
        if spans[d as usize].insert(cf.state.component(d as usize)) {
            kept.push(cf);
        } else {
            dependent.push(cf);
        }
    };

    let id = FieldTable::identity(space.dims());
    let id_state = state_of_field(&id)?;
    offer(id, id_state, Origin::Identity, &mut spans, &mut kept);
    for (i, g) in generators.iter().enumerate() {
        let s = state_of_field(g)?;
        offer(g.clone(), s, Origin::Generator { index: i }, &mut spans, &mut kept);
    }

    let mut next = 0;
    while next < kept.len() && !full(&spans) {
        let f = kept[next].table.clone();
        let df = f.weight();
        if (df as usize) < depth {
            evaluated += 1;
            let t = f.derivative();
            let s = state_of_field(&t)?;
            offer(t, s, Origin::Derivative { of: next }, &mut spans, &mut kept);
        }
        for (gi, g) in generators.iter().enumerate() {
            let top = g.weight() + df - 1;
            for n in (top - depth as i64)..=top {
                if full(&spans) {
                    break;
                }
                if evaluated >= budget.max_candidates {
                    return Err(ReconstructError::BudgetExhausted { evaluated, span: span_dims(&spans) });
                }
                evaluated += 1;
                let s = candidate_state(g, &f, n, depth)?;
                let d = (top - n) as usize;
                let origin = Origin::Product { left: gi, n, right: next };
                if spans[d].contains(s.component(d)) {
                    let w = Window::square(depth);
                    let t = fields::n_product_in(g, &f, n, w)?;
                    offer(t, s, origin, &mut spans, &mut kept);
                } else {
                    let t = fields::n_product(g, &f, n)?;
                    offer(t, s, origin, &mut spans, &mut kept);
                }
            }
        }
        next += 1;
    }
    let span = span_dims(&spans);
    if span != dims {
        return Err(ReconstructError::NotGenerating { span, dims });
    }
    Ok(Closure { fields: kept, dependent, span, evaluated, depth })
}

/// The reconstructed state-field correspondence on degrees `≤ depth`.
#[derive(Clone, Debug)]
pub struct VAStructure {
    pub space: GradedSpace,
    pub depth: usize,
    pub generators: Vec<FieldTable>,
    /// `y[d][i]` is `Y(e)` for the `i`-th basis vector of `V(d)`.
    y: Vec<Vec<FieldTable>>,
    pub closure_origins: Vec<Origin>,
    pub candidates_evaluated: usize,
}

fn zero_table(weight: i64, dims: &[usize]) -> FieldTable {
    FieldTable::from_fn(weight, dims, |_, p, t| Matrix::zeros(dims[t], dims[p]))
}

fn combine(terms: &[(&Scalar, &FieldTable)], weight: i64, dims: &[usize]) -> FieldTable {
    let mut acc: Option<FieldTable> = None;
    for (c, t) in terms {
        if c.is_zero() {
            continue;
        }
        acc = Some(match acc {
            None => t.scale(c),
            Some(a) => a.axpy(c, t).expect("closure fields share a space"),
        });
    }
    acc.unwrap_or_else(|| zero_table(weight, dims))
}

/// Builds `Y` from a generating family: closes it, inverts the state map
/// degree by degree, and checks that every dependent candidate agrees with
/// the field its state predicts.
pub fn build_y(space: &GradedSpace, generators: &[FieldTable], depth: usize) -> Result<VAStructure, ReconstructError> {
    build_y_with(space, generators, depth, Budget::default())
}

pub fn build_y_with(space: &GradedSpace, generators: &[FieldTable], depth: usize, budget: Budget) -> Result<VAStructure, ReconstructError> {
    let closure = dong_closure(space, generators, depth, budget)?;
    let depth = closure.depth;
    let dims = space.dims();
    // For each degree: kept fields, and the inverse of their state matrix.
    let mut y = Vec::with_capacity(depth + 1);
    let mut inverses = Vec::with_capacity(depth + 1);
    let mut by_degree: Vec<Vec<usize>> = vec![Vec::new(); depth + 1];
    for (i, f) in closure.fields.iter().enumerate() {
        by_degree[f.degree()].push(i);
    }
    for d in 0..=depth {
        let idx = &by_degree[d];
        let rows: Vec<Vec<Scalar>> =
            (0..dims[d]).map(|r| idx.iter().map(|&j| closure.fields[j].state.component(d)[r].clone()).collect()).collect();
        let inv = if dims[d] == 0 { Vec::new() } else { linalg::inverse(&rows).expect("closure states form a basis") };
        let tables = (0..dims[d])
            .map(|i| {
                let terms: Vec<(&Scalar, &FieldTable)> =
                    idx.iter().enumerate().map(|(jj, &j)| (&inv[jj][i], &closure.fields[j].table)).collect();
                combine(&terms, d as i64, dims)
            })
            .collect::<Vec<_>>();
        y.push(tables);
        inverses.push(inv);
    }
    let va = VAStructure {
        space: space.clone(),
        depth,
        generators: generators.to_vec(),
        y,
        closure_origins: closure.fields.iter().map(|f| f.origin.clone()).collect(),
        candidates_evaluated: closure.evaluated,
    };
    let window = Window::square(depth);
    for cand in &closure.dependent {
        let d = cand.degree();
        let predicted = va.y_homogeneous(d, cand.state.component(d));
        let (_, bad) = predicted.compare(&cand.table, window);
        if !bad.is_empty() {
            return Err(ReconstructError::InjectivityFailure {
                first: cand.origin.to_string(),
                second: format!("Y({}) disagrees at mode/source {:?}", cand.state.describe(space), bad[0]),
            });
        }
    }
    Ok(va)
}

impl VAStructure {
    pub fn dims(&self) -> &[usize] {
        &self.space.dims()[..=self.depth]
    }

    pub fn y_basis(&self, degree: usize, index: usize) -> &FieldTable {
        &self.y[degree][index]
    }

    /// Mutable access, for negative controls.
    pub fn y_basis_mut(&mut self, degree: usize, index: usize) -> &mut FieldTable {
        &mut self.y[degree][index]
    }

    pub fn y_homogeneous(&self, degree: usize, coeffs: &[Scalar]) -> FieldTable {
        let terms: Vec<(&Scalar, &FieldTable)> = coeffs.iter().zip(&self.y[degree]).collect();
        combine(&terms, degree as i64, self.space.dims())
    }

    /// `Y(v)` for a vector supported in degrees `≤ depth`.
    pub fn field_of(&self, v: &Vector) -> Result<fields::Field, ReconstructError> {
        let support = v.support();
        if let Some(&d) = support.iter().find(|&&d| d > self.depth) {
            return Err(ReconstructError::OutOfRange(d));
        }
        let mut parts: Vec<FieldTable> = support.iter().map(|&d| self.y_homogeneous(d, v.component(d))).collect();
        Ok(match parts.len() {
            0 => fields::Field::Homogeneous(zero_table(0, self.space.dims())),
            1 => fields::Field::Homogeneous(parts.pop().unwrap()),
            _ => fields::Field::Sum(parts),
        })
    }

    /// Homogeneous `Y(v)` of the given degree, or `None` if above depth.
    fn field_at(&self, degree: usize, v: &Vector) -> Option<FieldTable> {
        (degree <= self.depth).then(|| self.y_homogeneous(degree, v.component(degree)))
    }

    pub fn basis(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.space.basis_indices(self.depth)
    }
}

fn mode_range(source: usize, weight: i64, depth: usize) -> std::ops::RangeInclusive<i64> {
    // Unshifted modes whose target lies in [0, depth], widened by one.
    let top = source as i64 + weight - 1;
    (top - depth as i64 - 1)..=(top + 1)
}

fn loc(v: (usize, usize), n: i64, u: (usize, usize), space: &GradedSpace) -> String {
    format!("v={} mode ({n}) u={}", space.label(v.0, v.1), space.label(u.0, u.1))
}

/// Vacuum, grading, translation, VA4 and locality checks on every entry
/// the truncation determines exactly.
pub fn axiom_suite(va: &VAStructure, model_name: &str) -> SuiteReport {
    let space = &va.space;
    let depth = va.depth;
    let mut checks = Vec::new();

    let mut grading = Check::new("grading", "v_(m) V(p) ⊂ V(p + deg v − m − 1), dim V(n) < ∞");
    for (d, i) in va.basis() {
        let y = va.y_basis(d, i);
        grading.record(y.weight() == d as i64, || Witness::new(space.label(d, i), d, y.weight()));
    }
    grading.note(format!("dims {:?}", va.dims()));
    checks.push(grading.finish());

    let mut vacuum = Check::new("vacuum", "L_k Ω = 0 (k = −1, 0, 1), Y(Ω, z) = Id");
    let omega = space.vacuum();
    for k in [-1, 0, 1] {
        let r = apply_sl2(space, k, &omega).expect("same space");
        vacuum.record(r.is_zero(), || Witness::new(format!("L_{k} Ω"), 0, r.describe(space)));
    }
    let id = FieldTable::identity(space.dims());
    let (checked, bad) = va.y_basis(0, 0).compare(&id, Window::square(depth));
    vacuum.checked += checked;
    for key in bad {
        vacuum.fail(Witness::new(format!("Y(Ω) mode/source {key:?}"), "identity block", "different block"));
    }
    checks.push(vacuum.finish());

    let mut creation = Check::new("creation", "v_(n) Ω = 0 for n ≥ 0");
    for (d, i) in va.basis() {
        let y = va.y_basis(d, i);
        for n in 0..d as i64 {
            let r = y.mode_apply(n, &omega);
            if r.is_truncated() {
                creation.skip();
                continue;
            }
            creation.record(r.is_zero(), || Witness::new(format!("{}_({n}) Ω", space.label(d, i)), 0, r.describe(space)));
        }
    }
    checks.push(creation.finish());

    let mut translation = Check::new("translation", "Y(L₋₁v, z) = ∂_z Y(v, z)");
    for (d, i) in va.basis() {
        let v = Vector::basis(space, d, i);
        let lv = apply_sl2(space, -1, &v).expect("same space");
        let Some(ylv) = va.field_at(d + 1, &lv) else {
            translation.skip();
            continue;
        };
        let dy = va.y_basis(d, i).derivative();
        let (checked, bad) = ylv.compare(&dy, Window::square(depth));
        translation.checked += checked;
        for key in bad {
            translation.fail(Witness::new(format!("{} mode/source {key:?}", space.label(d, i)), "∂Y(v) block", "Y(L₋₁v) block"));
        }
    }
    checks.push(translation.finish());

    for k in [-1i32, 0, 1] {
        checks.push(va4_check(va, k));
    }
    checks.push(locality_check(va));
    SuiteReport::new("axioms", model_name, depth, checks)
}

/// `[L_k, v_(m)] = Σ_j C(k+1, j) (L_{j−1}v)_(m+k+1−j)` on basis `v`, `u`.
fn va4_check(va: &VAStructure, k: i32) -> Check {
    let space = &va.space;
    let depth = va.depth;
    let mut check = Check::new(
        format!("mobius_k{}", match k { -1 => "m1".to_string(), _ => k.to_string() }),
        format!("[L_{k}, Y(v,z)] = Σ_j C({}, j) z^({}−j) Y(L_(j−1)v, z)", k + 1, k + 1),
    );
    for (d, i) in va.basis() {
        let v = Vector::basis(space, d, i);
        let yv = va.y_basis(d, i);
        // Y(L_{j−1} v) for j = 0..=k+1
        let mut rhs_fields = Vec::new();
        let mut ok = true;
        for j in 0..=(k + 1) {
            let lv = apply_sl2(space, j - 1, &v).expect("same space");
            let deg = (d as i64 - (j as i64 - 1)) as usize;
            if deg > depth {
                ok = false;
                break;
            }
            let f = if lv.is_zero() { None } else { Some(va.y_homogeneous(deg, lv.component(deg))) };
            rhs_fields.push((j, f));
        }
        if !ok {
            check.skip();
            continue;
        }
        for (p, a) in space.basis_indices(depth) {
            let u = Vector::basis(space, p, a);
            let lu = apply_sl2(space, k, &u).expect("same space");
            for m in mode_range(p, d as i64, depth) {
                let vm_u = yv.mode_apply(m, &u);
                let lhs = apply_sl2(space, k, &vm_u).expect("same space").sub(&yv.mode_apply(m, &lu));
                let mut rhs = Vector::zero(space);
                for (j, f) in &rhs_fields {
                    if let Some(f) = f {
                        let c = Scalar::binomial((k + 1) as i64, *j as usize);
                        rhs.add_scaled(&c, &f.mode_apply(m + (k + 1 - j) as i64, &u));
                    }
                }
                if lhs.is_truncated() || rhs.is_truncated() {
                    check.skip();
                    continue;
                }
                if lhs.is_zero() && rhs.is_zero() && vm_u.is_zero() {
                    // Entirely outside the support; not an informative instance.
                    continue;
                }
                check.record(lhs.same_coefficients(&rhs), || {
                    Witness::new(loc((d, i), m, (p, a), space), rhs.describe(space), lhs.describe(space))
                });
            }
        }
    }
    check.finish()
}

fn locality_check(va: &VAStructure) -> Check {
    let space = &va.space;
    let mut check = Check::new("locality", "(z − w)^N [Y(v, z), Y(u, w)] = 0 for some N");
    let basis: Vec<(usize, usize)> = va.basis().filter(|&(d, _)| d > 0).collect();
    for (x, &(d1, i1)) in basis.iter().enumerate() {
        for &(d2, i2) in &basis[x..] {
            let a = va.y_basis(d1, i1);
            let b = va.y_basis(d2, i2);
            let n_max = d1 + d2 + 1;
            let r = locality_order(space, a, b, n_max, va.depth);
            match r.order {
                LocalityOrder::Local(_) if r.checked == 0 => check.skip(),
                LocalityOrder::Local(n) => {
                    check.pass();
                    if (d1, i1) == (d2, i2) && va.generators.iter().any(|g| g == a) {
                        check.note(format!("order of Y({}) with itself: {n}", space.label(d1, i1)));
                    }
                }
                LocalityOrder::NotLocalUpTo(n) => check.fail(Witness::new(
                    format!("Y({}), Y({})", space.label(d1, i1), space.label(d2, i2)),
                    format!("order ≤ {n}"),
                    "nonzero commutator coefficients",
                )),
            }
        }
    }
    check.finish()
}

/// The L₁ relation `[L₁, X₍ₖ₎] = (2d − k − 2) X₍ₖ₊₁₎ + Y(L₁x)₍ₖ₎` for a
/// homogeneous field `X` of weight `d` with state `x`, on basis `u ≤ depth`.
fn l1_relation(va: &VAStructure, x: &FieldTable, check: &mut Check, what: &str) -> Result<(), ReconstructError> {
    let space = &va.space;
    let depth = va.depth;
    let d = x.weight();
    let state = state_of_field(x)?;
    let l1x = apply_sl2(space, 1, &state).expect("same space");
    let y_l1x = if d >= 1 && (d as usize) <= depth + 1 { va.field_at((d - 1) as usize, &l1x) } else { None };
    for (p, a) in space.basis_indices(depth) {
        let u = Vector::basis(space, p, a);
        let l1u = apply_sl2(space, 1, &u).expect("same space");
        for k in mode_range(p, d, depth) {
            let lhs = apply_sl2(space, 1, &x.mode_apply(k, &u)).expect("same space").sub(&x.mode_apply(k, &l1u));
            let mut rhs = x.mode_apply(k + 1, &u).scale(&Scalar::int(2 * d - k - 2));
            if let Some(f) = &y_l1x {
                rhs = rhs.add(&f.mode_apply(k, &u));
            } else if !l1x.is_zero() {
                check.skip();
                continue;
            }
            if lhs.is_truncated() || rhs.is_truncated() {
                check.skip();
                continue;
            }
            check.record(lhs.same_coefficients(&rhs), || {
                Witness::new(format!("{what} mode ({k}) u={}", space.label(p, a)), rhs.describe(space), lhs.describe(space))
            });
        }
    }
    Ok(())
}

/// Checks the L₁ relation for `A`, `B` and then for `A₍ₙ₎B` with weight
/// `d_A + d_B − n − 1`.
pub fn l1_closure_check(va: &VAStructure, a: &FieldTable, b: &FieldTable, n: i64) -> Result<Check, ReconstructError> {
    let mut check = Check::new(
        format!("l1_closure(n={n})"),
        "[L₁, Y(v,z)] = (z²∂ + 2d z) Y(v,z) + Y(L₁v, z) is preserved by (n)-products",
    );
    l1_relation(va, a, &mut check, "A")?;
    l1_relation(va, b, &mut check, "B")?;
    let w = a.weight() + b.weight() - n - 1;
    if w < 0 {
        // The product has negative weight, hence vanishes on a graded space.
        let p = fields::n_product(a, b, n)?;
        check.record(p.is_zero(), || Witness::new("A_(n)B", 0, "nonzero block"));
        return Ok(check.finish());
    }
    if w as usize > va.depth {
        check.skip();
        return Ok(check.finish());
    }
    let p = fields::n_product_in(a, b, n, Window::square(va.depth))?;
    l1_relation(va, &p, &mut check, "A_(n)B")?;
    Ok(check.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{heisenberg, virasoro, NullVectors};

    #[test]
    fn states_of_simple_fields() {
        let h = heisenberg(3).unwrap();
        let id = FieldTable::identity(h.space.dims());
        assert!(state_of_field(&id).unwrap().same_coefficients(&h.space.vacuum()));
        let j = state_of_field(&h.generator).unwrap();
        assert!(j.same_coefficients(&Vector::basis(&h.space, 1, 0)));
    }

    #[test]
    fn singular_field_is_rejected() {
        let h = heisenberg(3).unwrap();
        let mut bad = h.generator.clone();
        // Inject J₍₀₎Ω ≠ 0: the (0, 0) block maps V(0) → V(0).
        bad.block_mut(0, 0).unwrap().set(0, 0, Scalar::one());
        assert_eq!(state_of_field(&bad).unwrap_err(), ReconstructError::SingularAtOrigin(0));
    }

    #[test]
    fn closure_of_identity_is_not_generating() {
        let h = heisenberg(2).unwrap();
        let err = dong_closure(&h.space, &[], 2, Budget::default()).unwrap_err();
        assert_eq!(err, ReconstructError::NotGenerating { span: vec![1, 0, 0], dims: vec![1, 1, 2] });
    }

    #[test]
    fn budget_is_enforced() {
        let h = heisenberg(4).unwrap();
        let err = dong_closure(&h.space, &[h.generator.clone()], 4, Budget { max_candidates: 2 }).unwrap_err();
        assert!(matches!(err, ReconstructError::BudgetExhausted { .. }));
    }

    #[test]
    fn heisenberg_round_trip_and_axioms() {
        let h = heisenberg(4).unwrap();
        let va = build_y(&h.space, &[h.generator.clone()], 4).unwrap();
        assert_eq!(va.dims(), &[1, 1, 2, 3, 5]);
        let (checked, bad) = va.y_basis(1, 0).compare(&h.generator, Window::square(h.working_depth()));
        assert!(checked > 0 && bad.is_empty());
        for (d, i) in va.basis() {
            let s = state_of_field(va.y_basis(d, i)).unwrap();
            assert!(s.same_coefficients(&Vector::basis(&h.space, d, i)));
        }
        let report = axiom_suite(&va, "heisenberg");
        assert!(report.passed(), "{report:#?}");
    }

    #[test]
    fn perturbed_field_breaks_mobius_covariance() {
        let h = heisenberg(4).unwrap();
        let mut va = build_y(&h.space, &[h.generator.clone()], 4).unwrap();
        // α₋₂Ω is the first basis vector of V(2); perturb its (−1) mode on V(1).
        let block = va.y_basis_mut(2, 0).block_mut(-1, 1).unwrap();
        let old = block.get(0, 0);
        block.set(0, 0, &old + &Scalar::one());
        let report = axiom_suite(&va, "heisenberg");
        let failing: Vec<&str> = report.checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
        assert!(failing.iter().any(|n| n.starts_with("mobius")), "{failing:?}");
        assert!(!report.check("mobius_k0").unwrap().witnesses.is_empty());
    }

    #[test]
    fn virasoro_round_trip() {
        let v = virasoro(Scalar::new(1, 2), 4, NullVectors::Reject).unwrap();
        let va = build_y(&v.space, &[v.generator.clone()], 4).unwrap();
        let (checked, bad) = va.y_basis(2, 0).compare(&v.generator, Window::square(v.working_depth()));
        assert!(checked > 0 && bad.is_empty());
        assert!(axiom_suite(&va, "virasoro").passed());
    }

    #[test]
    fn l1_closure_on_heisenberg_products() {
        let h = heisenberg(4).unwrap();
        let va = build_y(&h.space, &[h.generator.clone()], 4).unwrap();
        let j = &h.generator;
        for n in [-2, -1, 0, 1, 2] {
            let c = l1_closure_check(&va, j, j, n).unwrap();
            assert!(c.passed(), "{c:#?}");
        }
    }
}
