//! Formal distributions `A(z) = Σ A₍ₙ₎ z^{−n−1}` stored as truncated mode
//! tables, with derivatives, Borcherds (n)-products, the commutator formula,
//! locality orders and mode-level Möbius covariance checks.
//!
//! A homogeneous table of weight `d` stores the block `A₍ₙ₎ : V(p) → V(t)`
//! with `t = p + d − n − 1` under the key `(n, p)`. A stored block is exact.
//! A missing key with `t < 0` is an exact zero (the grading is bounded
//! below); a missing key with `0 ≤ t` is unknown, either because `t` lies
//! above the represented depth or because computing it would have required
//! data beyond the depth.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::linalg::{self, Matrix};
use crate::report::{Check, Witness};
use crate::scalar::Scalar;
use crate::space::{apply_sl2, GradedSpace, Vector};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("field is not homogeneous; shifted modes are undefined")]
    UndefinedWeight,
    #[error("truncation forbids an exact result: {0}")]
    HeadroomExceeded(String),
    #[error("fields live on different spaces")]
    SpaceMismatch,
}

/// Rectangle of (source degree, target degree) pairs to materialize.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub max_source: usize,
    pub max_target: usize,
}

impl Window {
    pub fn square(depth: usize) -> Self {
        Window { max_source: depth, max_target: depth }
    }
}

/// Default headroom for intermediate degrees in an n-product.
pub fn default_headroom(weight_a: i64, weight_b: i64, n: i64) -> usize {
    (weight_a + weight_b + n.abs() + 2).max(0) as usize
}

/// Result of looking up one mode block.
#[derive(Clone, Copy, Debug)]
pub enum Block<'a> {
    /// Target degree is negative: the mode annihilates the source degree.
    Zero,
    Known(&'a Matrix),
    /// Target degree lies above the represented depth.
    AboveDepth,
    /// Target degree is represented but the entry is not exact.
    Missing,
}

impl Block<'_> {
    fn is_exact_zero(&self) -> bool {
        match self {
            Block::Zero => true,
            Block::Known(m) => m.is_zero(),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldTable {
    weight: i64,
    dims: Vec<usize>,
    blocks: BTreeMap<(i64, usize), Matrix>,
}

impl FieldTable {
    pub fn empty(weight: i64, dims: &[usize]) -> Self {
        FieldTable { weight, dims: dims.to_vec(), blocks: BTreeMap::new() }
    }

    /// Builds a table from a block generator over every `(source, target)`
    /// pair in `[0, depth]²`. The closure receives `(n, source, target)`.
    pub fn from_fn(weight: i64, dims: &[usize], mut f: impl FnMut(i64, usize, usize) -> Matrix) -> Self {
        let mut table = Self::empty(weight, dims);
        let depth = dims.len() - 1;
        for p in 0..=depth {
            for t in 0..=depth {
                let n = p as i64 + weight - 1 - t as i64;
                table.insert(n, p, f(n, p, t));
            }
        }
        table
    }

    /// The identity field: `Id₍₋₁₎ = 1`, every other mode zero.
    pub fn identity(dims: &[usize]) -> Self {
        Self::from_fn(0, dims, |n, p, t| {
            if n == -1 {
                Matrix::identity(dims[p])
            } else {
                Matrix::zeros(dims[t], dims[p])
            }
        })
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn depth(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn target(&self, n: i64, source: usize) -> i64 {
        source as i64 + self.weight - n - 1
    }

    pub fn insert(&mut self, n: i64, source: usize, block: Matrix) {
        let t = self.target(n, source);
        assert!(t >= 0 && (t as usize) <= self.depth() && source <= self.depth(), "block outside the table");
        assert_eq!(block.shape(), (self.dims[t as usize], self.dims[source]), "block shape mismatch");
        self.blocks.insert((n, source), block);
    }

    pub fn block(&self, n: i64, source: usize) -> Block<'_> {
        let t = self.target(n, source);
        if t < 0 {
            return Block::Zero;
        }
        if t as usize > self.depth() || source > self.depth() {
            return Block::AboveDepth;
        }
        match self.blocks.get(&(n, source)) {
            Some(m) => Block::Known(m),
            None => Block::Missing,
        }
    }

    pub fn block_mut(&mut self, n: i64, source: usize) -> Option<&mut Matrix> {
        self.blocks.get_mut(&(n, source))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(i64, usize), &Matrix)> {
        self.blocks.iter()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Number of exact blocks inside `window`, and the number of
    /// representable blocks there.
    pub fn coverage(&self, window: Window) -> (usize, usize) {
        let mut known = 0;
        let mut total = 0;
        for p in 0..=window.max_source.min(self.depth()) {
            for t in 0..=window.max_target.min(self.depth()) {
                total += 1;
                let n = p as i64 + self.weight - 1 - t as i64;
                if self.blocks.contains_key(&(n, p)) {
                    known += 1;
                }
            }
        }
        (known, total)
    }

    /// `A₍ₙ₎ v`, flagged truncated when a needed block is unknown.
    pub fn mode_apply(&self, n: i64, v: &Vector) -> Vector {
        let mut out = Vector::zero_with_dims(&self.dims).with_truncated(v.is_truncated());
        for p in v.support() {
            match self.block(n, p) {
                Block::Zero => {}
                Block::Known(m) => {
                    let t = self.target(n, p) as usize;
                    linalg::vec_axpy(out.component_mut(t), &Scalar::one(), &m.mul_vec(v.component(p)));
                }
                Block::AboveDepth | Block::Missing => out.mark_truncated(),
            }
        }
        out
    }

    /// Shifted mode `A_n = A₍ₙ₊d₋₁₎`, which lowers degree by `n`.
    pub fn shifted_mode_apply(&self, n: i64, v: &Vector) -> Vector {
        self.mode_apply(n + self.weight - 1, v)
    }

    pub fn scale(&self, s: &Scalar) -> FieldTable {
        FieldTable {
            weight: self.weight,
            dims: self.dims.clone(),
            blocks: self.blocks.iter().map(|(k, m)| (*k, m.scale(s))).collect(),
        }
    }

    /// `self + s · other`; only blocks exact in both survive.
    pub fn axpy(&self, s: &Scalar, other: &FieldTable) -> Result<FieldTable, FieldError> {
        if self.dims != other.dims || self.weight != other.weight {
            return Err(FieldError::SpaceMismatch);
        }
        let blocks = self
            .blocks
            .iter()
            .filter_map(|(k, m)| other.blocks.get(k).map(|o| (*k, m.axpy(s, o))))
            .collect();
        Ok(FieldTable { weight: self.weight, dims: self.dims.clone(), blocks })
    }

    /// `(∂A)₍ₙ₎ = −n A₍ₙ₋₁₎`; weight grows by one.
    pub fn derivative(&self) -> FieldTable {
        let blocks = self
            .blocks
            .iter()
            .map(|((n, p), m)| ((n + 1, *p), m.scale(&Scalar::int(-(n + 1)))))
            .collect();
        FieldTable { weight: self.weight + 1, dims: self.dims.clone(), blocks }
    }

    /// Restricts to blocks inside `window`.
    pub fn restrict(&self, window: Window) -> FieldTable {
        let blocks = self
            .blocks
            .iter()
            .filter(|((n, p), _)| *p <= window.max_source && self.target(*n, *p) as usize <= window.max_target)
            .map(|(k, m)| (*k, m.clone()))
            .collect();
        FieldTable { weight: self.weight, dims: self.dims.clone(), blocks }
    }

    /// Compares two tables of equal weight on blocks exact in both and
    /// inside `window`. Returns `(checked, mismatching keys)`.
    pub fn compare(&self, other: &FieldTable, window: Window) -> (usize, Vec<(i64, usize)>) {
        let mut checked = 0;
        let mut bad = Vec::new();
        if self.weight != other.weight {
            // Different weights can only agree if both vanish.
            for (k, m) in &self.blocks {
                if !m.is_zero() {
                    bad.push(*k);
                }
            }
            for (k, m) in &other.blocks {
                if !m.is_zero() {
                    bad.push(*k);
                }
            }
            return (self.blocks.len() + other.blocks.len(), bad);
        }
        for (k, m) in &self.blocks {
            let (n, p) = *k;
            if p > window.max_source || self.target(n, p) as usize > window.max_target {
                continue;
            }
            if let Some(o) = other.blocks.get(k) {
                checked += 1;
                if m != o {
                    bad.push(*k);
                }
            }
        }
        (checked, bad)
    }

    /// True if every stored block is zero.
    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(Matrix::is_zero)
    }
}

/// A possibly non-homogeneous field: a finite sum of homogeneous tables.
#[derive(Clone, Debug)]
pub enum Field {
    Homogeneous(FieldTable),
    Sum(Vec<FieldTable>),
}

impl Field {
    pub fn weight(&self) -> Option<i64> {
        match self {
            Field::Homogeneous(t) => Some(t.weight()),
            Field::Sum(_) => None,
        }
    }

    pub fn components(&self) -> Vec<&FieldTable> {
        match self {
            Field::Homogeneous(t) => vec![t],
            Field::Sum(ts) => ts.iter().collect(),
        }
    }

    pub fn mode_apply(&self, n: i64, v: &Vector) -> Vector {
        let comps = self.components();
        let mut out = comps[0].mode_apply(n, v);
        for t in &comps[1..] {
            out = out.add(&t.mode_apply(n, v));
        }
        out
    }

    pub fn shifted_mode_apply(&self, n: i64, v: &Vector) -> Result<Vector, FieldError> {
        match self {
            Field::Homogeneous(t) => Ok(t.shifted_mode_apply(n, v)),
            Field::Sum(_) => Err(FieldError::UndefinedWeight),
        }
    }

    /// Linear extension of shifted modes over homogeneous components, each
    /// shifted by its own weight.
    pub fn linear_shifted_mode_apply(&self, n: i64, v: &Vector) -> Vector {
        let comps = self.components();
        let mut out = comps[0].shifted_mode_apply(n, v);
        for t in &comps[1..] {
            out = out.add(&t.shifted_mode_apply(n, v));
        }
        out
    }
}

/// Outcome of fetching a block while assembling a product term.
enum Fetch<'a> {
    Zero,
    Known(&'a Matrix),
    Unknown,
}

fn fetch<'a>(f: &'a FieldTable, n: i64, source: i64) -> Fetch<'a> {
    if source < 0 {
        return Fetch::Zero;
    }
    let b = f.block(n, source as usize);
    if b.is_exact_zero() {
        return Fetch::Zero;
    }
    match b {
        Block::Known(m) => Fetch::Known(m),
        _ => Fetch::Unknown,
    }
}

/// One block of `(A₍ₙ₎B)₍ₘ₎` at source degree `p`:
/// `Σ_{j≥0} (−1)ʲ C(n,j) (A₍ₙ₋ⱼ₎B₍ₘ₊ⱼ₎ − (−1)ⁿ B₍ₙ₊ₘ₋ⱼ₎A₍ⱼ₎)`.
/// Both sums terminate because the intermediate degree drops with `j`.
fn product_block(a: &FieldTable, b: &FieldTable, n: i64, m: i64, p: usize, t: usize) -> Option<Matrix> {
    let dims = a.dims();
    let mut acc = Matrix::zeros(dims[t], dims[p]);
    let sign_n = if n.rem_euclid(2) == 0 { Scalar::one() } else { Scalar::int(-1) };
    let mut j: i64 = 0;
    loop {
        let coeff = Scalar::binomial(n, j as usize);
        let coeff = if j % 2 == 0 { coeff } else { -coeff };
        let mid1 = p as i64 + b.weight() - (m + j) - 1;
        let mid2 = p as i64 + a.weight() - j - 1;
        if mid1 < 0 && mid2 < 0 {
            break;
        }
        if !coeff.is_zero() {
            if mid1 >= 0 {
                if let Fetch::Known(bm) = fetch(b, m + j, p as i64).into_needed()? {
                    if let Fetch::Known(am) = fetch(a, n - j, mid1).into_needed()? {
                        acc = acc.axpy(&coeff, &am.mul(bm));
                    }
                }
            }
            if mid2 >= 0 {
                if let Fetch::Known(am) = fetch(a, j, p as i64).into_needed()? {
                    if let Fetch::Known(bm) = fetch(b, n + m - j, mid2).into_needed()? {
                        let c = -(&coeff * &sign_n);
                        acc = acc.axpy(&c, &bm.mul(am));
                    }
                }
            }
        }
        j += 1;
    }
    Some(acc)
}

impl<'a> Fetch<'a> {
    /// `None` when the block is needed but unknown.
    fn into_needed(self) -> Option<Fetch<'a>> {
        match self {
            Fetch::Unknown => None,
            other => Some(other),
        }
    }
}

/// Borcherds (n)-product `A₍ₙ₎B`, computed blockwise inside `window`.
/// Blocks that would need data beyond the represented depth are omitted.
pub fn n_product_in(a: &FieldTable, b: &FieldTable, n: i64, window: Window) -> Result<FieldTable, FieldError> {
    if a.dims() != b.dims() {
        return Err(FieldError::SpaceMismatch);
    }
    let weight = a.weight() + b.weight() - n - 1;
    let mut out = FieldTable::empty(weight, a.dims());
    let depth = a.depth();
    for p in 0..=window.max_source.min(depth) {
        for t in 0..=window.max_target.min(depth) {
            let m = p as i64 + weight - 1 - t as i64;
            if let Some(block) = product_block(a, b, n, m, p, t) {
                out.insert(m, p, block);
            }
        }
    }
    Ok(out)
}

pub fn n_product(a: &FieldTable, b: &FieldTable, n: i64) -> Result<FieldTable, FieldError> {
    n_product_in(a, b, n, Window::square(a.depth()))
}

/// Like [`n_product_in`] but every block inside `window` must be exact.
pub fn n_product_exact(a: &FieldTable, b: &FieldTable, n: i64, window: Window) -> Result<FieldTable, FieldError> {
    let out = n_product_in(a, b, n, window)?;
    let (known, total) = out.coverage(window);
    if known != total {
        return Err(FieldError::HeadroomExceeded(format!(
            "(n = {n}) product of weights {} and {}: {} of {} blocks in window {}x{} need degrees above depth {}",
            a.weight(),
            b.weight(),
            total - known,
            total,
            window.max_source,
            window.max_target,
            a.depth()
        )));
    }
    Ok(out)
}

/// The right-hand side of the commutator formula
/// `[a_m, b_n] = Σ_{s=0}^{d_a+d_b−1} C(m+d_a−1, s) (a₍ₛ₎b)_{m+n}` in shifted
/// modes, with the products `a₍ₛ₎b` precomputed.
#[derive(Clone, Debug)]
pub struct BorcherdsCommutator {
    weight_a: i64,
    products: Vec<FieldTable>,
}

impl BorcherdsCommutator {
    pub fn new(a: &FieldTable, b: &FieldTable) -> Result<Self, FieldError> {
        let top = (a.weight() + b.weight()).max(0);
        let products = (0..top).map(|s| n_product(a, b, s)).collect::<Result<Vec<_>, _>>()?;
        Ok(BorcherdsCommutator { weight_a: a.weight(), products })
    }

    pub fn products(&self) -> &[FieldTable] {
        &self.products
    }

    pub fn weight_a(&self) -> i64 {
        self.weight_a
    }

    /// Applies `[a_m, b_n]` to `v`, flagging the result truncated when a
    /// needed product block is unknown.
    pub fn apply(&self, m: i64, n: i64, v: &Vector) -> Result<Vector, FieldError> {
        let mut out = Vector::zero_with_dims(&v_dims(v)).with_truncated(v.is_truncated());
        for (s, prod) in self.products.iter().enumerate() {
            let coeff = Scalar::binomial(m + self.weight_a - 1, s);
            if coeff.is_zero() {
                continue;
            }
            let unshifted = m + n + prod.weight() - 1;
            for p in v.support() {
                match prod.block(unshifted, p) {
                    Block::Zero => {}
                    Block::Known(mat) => {
                        let t = prod.target(unshifted, p) as usize;
                        linalg::vec_axpy(out.component_mut(t), &coeff, &mat.mul_vec(v.component(p)));
                    }
                    Block::AboveDepth | Block::Missing => out.mark_truncated(),
                }
            }
        }
        Ok(out)
    }
}

fn v_dims(v: &Vector) -> Vec<usize> {
    (0..=v.depth()).map(|n| v.component(n).len()).collect()
}

pub fn commutator_via_borcherds(a: &FieldTable, b: &FieldTable, m: i64, n: i64, v: &Vector) -> Result<Vector, FieldError> {
    BorcherdsCommutator::new(a, b)?.apply(m, n, v)
}

/// `a_m b_n v − b_n a_m v` by direct composition of shifted modes, or
/// `None` if truncation touches either ordering.
pub fn direct_commutator(a: &FieldTable, b: &FieldTable, m: i64, n: i64, v: &Vector) -> Option<Vector> {
    let ab = a.shifted_mode_apply(m, &b.shifted_mode_apply(n, v));
    let ba = b.shifted_mode_apply(n, &a.shifted_mode_apply(m, v));
    if ab.is_truncated() || ba.is_truncated() {
        return None;
    }
    Some(ab.sub(&ba))
}

/// Unshifted-mode commutator `[A₍ₓ₎, B₍ᵧ₎] v`, or `None` under truncation.
fn raw_commutator(a: &FieldTable, b: &FieldTable, x: i64, y: i64, v: &Vector) -> Option<Vector> {
    let ab = a.mode_apply(x, &b.mode_apply(y, v));
    let ba = b.mode_apply(y, &a.mode_apply(x, v));
    if ab.is_truncated() || ba.is_truncated() {
        return None;
    }
    Some(ab.sub(&ba))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "n", rename_all = "snake_case")]
pub enum LocalityOrder {
    Local(usize),
    NotLocalUpTo(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalityResult {
    pub order: LocalityOrder,
    pub checked_depth: usize,
    /// Number of coefficient identities evaluated at the reported order.
    pub checked: usize,
}

/// Smallest `N ≤ n_max` with `(z−w)^N [A(z), B(w)] = 0` on every basis
/// vector of degree `≤ checked_depth` and every target degree `≤
/// checked_depth`, over all coefficient identities the truncation can
/// evaluate exactly.
pub fn locality_order(space: &GradedSpace, a: &FieldTable, b: &FieldTable, n_max: usize, checked_depth: usize) -> LocalityResult {
    let depth = space.depth();
    let checked_depth = checked_depth.min(depth);
    let (da, db) = (a.weight(), b.weight());
    let mut cache: HashMap<(usize, usize, i64, i64), Option<Vector>> = HashMap::new();
    for big_n in 0..=n_max {
        let mut checked = 0;
        let mut ok = true;
        'outer: for (s, i) in space.basis_indices(checked_depth) {
            let v = Vector::basis(space, s, i);
            for t in 0..=checked_depth {
                // x + y = total for every term with this target degree.
                let total = s as i64 + da + db - 2 - t as i64;
                let y_lo = s as i64 + db - 1 - depth as i64;
                let y_hi = depth as i64 - s as i64 - da + total + 1;
                for q in y_lo..=(y_hi - big_n as i64) {
                    let mut sum = vec![Scalar::zero(); space.dim(t)];
                    let mut known = true;
                    for k in 0..=big_n {
                        let y = q + k as i64;
                        let x = total - y;
                        let c = cache
                            .entry((s, i, x, y))
                            .or_insert_with(|| raw_commutator(a, b, x, y, &v))
                            .clone();
                        match c {
                            Some(c) => {
                                let mut coeff = Scalar::binomial(big_n as i64, k);
                                if k % 2 == 1 {
                                    coeff = -coeff;
                                }
                                linalg::vec_axpy(&mut sum, &coeff, c.component(t));
                            }
                            None => {
                                known = false;
                                break;
                            }
                        }
                    }
                    if !known {
                        continue;
                    }
                    checked += 1;
                    if !linalg::vec_is_zero(&sum) {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if ok {
            return LocalityResult { order: LocalityOrder::Local(big_n), checked_depth, checked };
        }
    }
    LocalityResult { order: LocalityOrder::NotLocalUpTo(n_max), checked_depth, checked: 0 }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CovarianceViolation {
    pub k: i32,
    pub m: i64,
    pub degree: usize,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CovarianceReport {
    pub weight: i64,
    pub checked: usize,
    pub truncated: usize,
    pub violations: Vec<CovarianceViolation>,
}

impl CovarianceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `[L_k, φ_m] = (k(d−1) − m) φ_{m+k}` for `k ∈ {−1, 0, 1}` where
/// `φ_m = A₍ₘ₊d₋₁₎` uses the declared weight `d`, on basis vectors of degree
/// `≤ checked_depth`.
pub fn covariance_check(space: &GradedSpace, a: &FieldTable, d: i64, checked_depth: usize) -> CovarianceReport {
    let depth = space.depth() as i64;
    let mut report = CovarianceReport { weight: d, checked: 0, truncated: 0, violations: Vec::new() };
    let phi = |m: i64, v: &Vector| a.mode_apply(m + d - 1, v);
    for (p, i) in space.basis_indices(checked_depth) {
        let u = Vector::basis(space, p, i);
        // Unshifted modes with a represented target, plus one on each side.
        let n_lo = p as i64 + a.weight() - 1 - depth - 1;
        let n_hi = p as i64 + a.weight();
        for k in [-1i32, 0, 1] {
            for n in n_lo..=n_hi {
                let m = n - d + 1;
                let phi_u = phi(m, &u);
                let lhs = apply_sl2(space, k, &phi_u)
                    .expect("same space")
                    .sub(&phi(m, &apply_sl2(space, k, &u).expect("same space")));
                let coeff = Scalar::int(k as i64 * (d - 1) - m);
                let rhs = phi(m + k as i64, &u).scale(&coeff);
                if lhs.is_truncated() || rhs.is_truncated() {
                    report.truncated += 1;
                    continue;
                }
                report.checked += 1;
                if !lhs.same_coefficients(&rhs) {
                    report.violations.push(CovarianceViolation { k, m, degree: p, index: i });
                }
            }
        }
    }
    report
}

/// `[T_m, T_n] = (m − n)T_{m+n} + (c/12)(m³ − m)δ_{m+n,0}` on basis vectors
/// of degree `≤ depth`, for `|m|, |n| ≤ modes`.
pub fn virasoro_bracket_check(space: &GradedSpace, t: &FieldTable, c: &Scalar, depth: usize, modes: i64) -> Check {
    let mut check = Check::new("virasoro_bracket", "[T_m, T_n] = (m−n)T_{m+n} + c/12 (m³−m) δ_{m+n,0}");
    for (p, i) in space.basis_indices(depth) {
        let v = Vector::basis(space, p, i);
        for m in -modes..=modes {
            for n in -modes..=modes {
                let Some(lhs) = direct_commutator(t, t, m, n, &v) else {
                    check.skip();
                    continue;
                };
                let mut rhs = t.shifted_mode_apply(m + n, &v).scale(&Scalar::int(m - n));
                if m + n == 0 {
                    rhs = rhs.add(&v.scale(&(c * &Scalar::new(m * m * m - m, 12))));
                }
                if rhs.is_truncated() {
                    check.skip();
                    continue;
                }
                check.record(lhs.same_coefficients(&rhs), || {
                    Witness::new(
                        format!("m={m} n={n} v={}", space.label(p, i)),
                        rhs.describe(space),
                        lhs.describe(space),
                    )
                });
            }
        }
    }
    check.note(format!("c = {c}"));
    check.finish()
}

/// The commutator formula against directly composed modes for every
/// `|m|, |n| ≤ modes` and basis vector of degree `≤ depth` where both sides
/// are determined.
pub fn borcherds_oracle_check(space: &GradedSpace, a: &FieldTable, b: &FieldTable, depth: usize, modes: i64) -> Result<Check, FieldError> {
    let mut check = Check::new("borcherds_oracle", "[a_m, b_n] = Σ_s C(m+d_a−1, s) (a_(s)b)_{m+n}");
    let bc = BorcherdsCommutator::new(a, b)?;
    for (p, i) in space.basis_indices(depth) {
        let v = Vector::basis(space, p, i);
        for m in -modes..=modes {
            for n in -modes..=modes {
                let Some(direct) = direct_commutator(a, b, m, n, &v) else {
                    check.skip();
                    continue;
                };
                let via = bc.apply(m, n, &v)?;
                if via.is_truncated() {
                    check.skip();
                    continue;
                }
                check.record(via.same_coefficients(&direct), || {
                    Witness::new(
                        format!("m={m} n={n} v={}", space.label(p, i)),
                        direct.describe(space),
                        via.describe(space),
                    )
                });
            }
        }
    }
    Ok(check.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{heisenberg, virasoro, NullVectors};

    fn half() -> Scalar {
        Scalar::new(1, 2)
    }

    #[test]
    fn locality_orders_of_generators() {
        let h = heisenberg(4).unwrap();
        let r = locality_order(&h.space, &h.generator, &h.generator, 6, 4);
        assert_eq!(r.order, LocalityOrder::Local(2));
        assert!(r.checked > 0);
        let v = virasoro(half(), 4, NullVectors::Reject).unwrap();
        let r = locality_order(&v.space, &v.generator, &v.generator, 6, 4);
        assert_eq!(r.order, LocalityOrder::Local(4));
    }

    #[test]
    fn n_max_below_order_is_reported() {
        let h = heisenberg(3).unwrap();
        let r = locality_order(&h.space, &h.generator, &h.generator, 1, 3);
        assert_eq!(r.order, LocalityOrder::NotLocalUpTo(1));
    }

    #[test]
    fn heisenberg_products_of_j() {
        let h = heisenberg(4).unwrap();
        let j = &h.generator;
        // J₍₁₎J = Id, J₍₀₎J = 0
        let one = n_product(j, j, 1).unwrap();
        let id = FieldTable::identity(h.space.dims());
        let (checked, bad) = one.compare(&id, Window::square(4));
        assert!(checked > 0 && bad.is_empty());
        assert!(n_product(j, j, 0).unwrap().is_zero());
        // ∂J = J₍₋₂₎Id
        let d = j.derivative();
        let (checked, bad) = d.compare(&n_product(j, &id, -2).unwrap(), Window::square(4));
        assert!(checked > 0 && bad.is_empty());
    }

    #[test]
    fn exact_product_reports_headroom() {
        let h = heisenberg(2).unwrap().descriptor.with_headroom(0).build().unwrap();
        let j = &h.generator;
        assert!(matches!(n_product_exact(j, j, 1, Window::square(2)), Err(FieldError::HeadroomExceeded(_))));
    }

    #[test]
    fn borcherds_matches_direct_commutators() {
        for model in [heisenberg(3).unwrap(), virasoro(half(), 3, NullVectors::Reject).unwrap()] {
            let a = &model.generator;
            let bc = BorcherdsCommutator::new(a, a).unwrap();
            let mut compared = 0;
            for (p, i) in model.space.basis_indices(3) {
                let v = Vector::basis(&model.space, p, i);
                for m in -4..=4 {
                    for n in -4..=4 {
                        if let Some(direct) = direct_commutator(a, a, m, n, &v) {
                            let via = bc.apply(m, n, &v).unwrap();
                            if via.is_truncated() {
                                continue;
                            }
                            assert!(via.same_coefficients(&direct), "m={m} n={n} v=({p},{i})");
                            compared += 1;
                        }
                    }
                }
            }
            assert!(compared > 100);
        }
    }

    #[test]
    fn covariance_with_declared_weights() {
        let h = heisenberg(4).unwrap();
        let r = covariance_check(&h.space, &h.generator, 1, 4);
        assert!(r.passed() && r.checked > 0, "{r:?}");
        assert!(!covariance_check(&h.space, &h.generator, 2, 4).passed());
        let v = virasoro(half(), 4, NullVectors::Reject).unwrap();
        assert!(covariance_check(&v.space, &v.generator, 2, 4).passed());
    }

    #[test]
    fn sugawara_field_obeys_virasoro_bracket() {
        let h = heisenberg(4).unwrap();
        let j = &h.generator;
        let t = n_product(j, j, -1).unwrap().scale(&half());
        assert_eq!(t.weight(), 2);
        let c = virasoro_bracket_check(&h.space, &t, &Scalar::one(), 4, 3);
        assert!(c.passed() && c.checked > 50, "{c:?}");
        let wrong = virasoro_bracket_check(&h.space, &t, &Scalar::int(2), 4, 3);
        assert!(!wrong.passed() && wrong.witnesses[0].location.starts_with("m=-3 n=3"), "{:?}", wrong.witnesses);
    }

    #[test]
    fn derivative_shifts_weight_and_modes() {
        let h = heisenberg(3).unwrap();
        let d = h.generator.derivative();
        assert_eq!(d.weight(), 2);
        // (∂J)₍ₙ₎ = −n J₍ₙ₋₁₎ on the vacuum: (∂J)₍₋₁₎Ω = J₍₋₂₎Ω
        let omega = h.space.vacuum();
        assert!(d.mode_apply(-1, &omega).same_coefficients(&h.generator.mode_apply(-2, &omega)));
    }
}
