//! Floating-point lab for smeared fields `Y⁰(v, f) = Σ f̂(n) v_n` on the
//! circle: trigonometric polynomials, Sobolev norms, smooth bumps, growth
//! and order probes, commutator decay for disjoint supports, the β_d action
//! of Möbius transformations and infinitesimal covariance.
//!
//! Floating-point reductions run in a fixed order so that results are
//! reproducible bit for bit.

use std::f64::consts::PI;

pub use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::fields::{BorcherdsCommutator, FieldError, FieldTable, Window};
use crate::linalg::Matrix;
use crate::reconstruct::state_of_field;
use crate::scalar::Scalar;
use crate::space::{inner, GradedSpace, Vector};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SmearError {
    #[error("supports overlap at theta = {theta:.6}")]
    SupportOverlap { theta: f64 },
    #[error("X_gamma is not positive at theta = {theta:.6} (value {value:e})")]
    NonPositiveXGamma { theta: f64, value: f64 },
    #[error("invalid Moebius element: |a|^2 - |b|^2 = {0}")]
    NotInSu11(f64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

// ---------------------------------------------------------------------------
// Trigonometric polynomials

/// `f(e^{iθ}) = Σ_{|n| ≤ M} f̂(n) e^{inθ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    cutoff: usize,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn zero(cutoff: usize) -> Self {
        TrigPoly { cutoff, coeffs: vec![Complex64::default(); 2 * cutoff + 1] }
    }

    /// Coefficients listed for `n = −M, …, M`.
    pub fn new(cutoff: usize, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), 2 * cutoff + 1, "need 2M + 1 coefficients");
        assert!(coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite()), "coefficients must be finite");
        TrigPoly { cutoff, coeffs }
    }

    pub fn from_fn(cutoff: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let m = cutoff as i64;
        Self::new(cutoff, (-m..=m).map(f).collect())
    }

    /// `z^n` with the smallest cutoff containing it.
    pub fn monomial(n: i64) -> Self {
        let mut p = Self::zero(n.unsigned_abs() as usize);
        p.set(n, c(1.0));
        p
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.cutoff {
            Complex64::default()
        } else {
            self.coeffs[(n + self.cutoff as i64) as usize]
        }
    }

    pub fn set(&mut self, n: i64, v: Complex64) {
        assert!(n.unsigned_abs() as usize <= self.cutoff, "index above cutoff");
        self.coeffs[(n + self.cutoff as i64) as usize] = v;
    }

    /// `(n, f̂(n))` for `n = −M, …, M`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let m = self.cutoff as i64;
        (-m..=m).zip(self.coeffs.iter().copied())
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        self.iter().map(|(n, a)| a * Complex64::from_polar(1.0, n as f64 * theta)).sum()
    }

    /// Keeps `|n| ≤ m` (or pads with zeros).
    pub fn with_cutoff(&self, m: usize) -> Self {
        Self::from_fn(m, |n| self.coeff(n))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_fn(self.cutoff, |n| self.coeff(n) * s)
    }

    pub fn add(&self, other: &TrigPoly) -> Self {
        Self::from_fn(self.cutoff.max(other.cutoff), |n| self.coeff(n) + other.coeff(n))
    }

    /// The function `conj(f)`: `n ↦ conj(f̂(−n))`.
    pub fn conj(&self) -> Self {
        Self::from_fn(self.cutoff, |n| self.coeff(-n).conj())
    }

    /// `df/dθ`.
    pub fn derivative(&self) -> Self {
        Self::from_fn(self.cutoff, |n| I * n as f64 * self.coeff(n))
    }

    /// `e^{ikθ} f`.
    pub fn shift(&self, k: i64) -> Self {
        Self::from_fn(self.cutoff + k.unsigned_abs() as usize, |n| self.coeff(n - k))
    }

    /// Rotation `θ ↦ θ − θ₀`: `f̂(n) ↦ e^{−inθ₀} f̂(n)`.
    pub fn rotate(&self, theta0: f64) -> Self {
        Self::from_fn(self.cutoff, |n| self.coeff(n) * Complex64::from_polar(1.0, -(n as f64) * theta0))
    }

    pub fn max_abs_diff(&self, other: &TrigPoly) -> f64 {
        let m = self.cutoff.max(other.cutoff) as i64;
        (-m..=m).map(|n| (self.coeff(n) - other.coeff(n)).norm()).fold(0.0, f64::max)
    }
}

/// `‖f‖_N = (Σ |f̂(n)|² (1 + n²)^N)^{1/2}`.
pub fn sobolev_norm(f: &TrigPoly, order: f64) -> f64 {
    f.iter().map(|(n, a)| a.norm_sqr() * (1.0 + (n * n) as f64).powf(order)).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------------------
// Quadrature and bumps

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss-Kronrod 7/15 panel: `(kronrod estimate, |kronrod − gauss|)`.
fn gk15(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut k = Complex64::default();
    let mut g = Complex64::default();
    for i in 0..8 {
        let x = half * XGK[i];
        let fx = if i == 7 { f(mid) } else { f(mid - x) + f(mid + x) };
        k += fx * WGK[i];
        if i % 2 == 1 {
            g += fx * WG[i / 2];
        }
    }
    (k * half, ((k - g) * half).norm())
}

/// Adaptive Gauss-Kronrod quadrature to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Complex64 {
    fn go(f: &impl Fn(f64) -> Complex64, a: f64, b: f64, tol: f64, depth: u32) -> Complex64 {
        let (val, err) = gk15(f, a, b);
        if err <= tol || depth >= 40 {
            return val;
        }
        let m = 0.5 * (a + b);
        go(f, a, m, 0.5 * tol, depth + 1) + go(f, m, b, 0.5 * tol, depth + 1)
    }
    go(&f, a, b, tol, 0)
}

/// Relative tolerance for bump coefficients, measured against `∫|f|`.
pub const QUADRATURE_TOLERANCE: f64 = 1e-12;

fn wrap(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t <= -PI {
        t + 2.0 * PI
    } else {
        t
    }
}

fn profile(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

/// The smooth bump `exp(−1/(1 − t²))` on the arc `|θ − center| < half_width`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
}

impl Bump {
    pub fn new(center: f64, half_width: f64) -> Self {
        assert!(half_width > 0.0 && half_width < PI, "half width must lie in (0, pi)");
        Bump { center, half_width }
    }

    pub fn value(&self, theta: f64) -> f64 {
        profile(wrap(theta - self.center) / self.half_width)
    }

    pub fn contains(&self, theta: f64) -> bool {
        wrap(theta - self.center).abs() < self.half_width
    }

    /// `f̂(n) = (1/2π) ∫ f(θ) e^{−inθ} dθ` for `|n| ≤ cutoff`.
    pub fn fourier(&self, cutoff: usize) -> TrigPoly {
        let w = self.half_width;
        let l1 = integrate(|t| c(profile(t)), -1.0, 1.0, 1e-15).re;
        let tol = QUADRATURE_TOLERANCE * l1;
        TrigPoly::from_fn(cutoff, |n| {
            let n = n as f64;
            let phase = Complex64::from_polar(1.0, -n * self.center);
            let v = integrate(|t| Complex64::from_polar(profile(t), -n * w * t), -1.0, 1.0, tol);
            phase * v * (w / (2.0 * PI))
        })
    }
}

/// Fails if some point of a uniform grid lies in both supports.
pub fn check_disjoint(f: &Bump, g: &Bump, samples: usize) -> Result<(), SmearError> {
    for j in 0..samples {
        let theta = 2.0 * PI * j as f64 / samples as f64;
        if f.contains(theta) && g.contains(theta) {
            return Err(SmearError::SupportOverlap { theta });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Numeric images of the exact objects

#[derive(Clone, Debug, PartialEq)]
pub struct DMat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DMat {
    pub fn from_matrix(m: &Matrix) -> Self {
        let mut data = vec![0.0; m.rows() * m.cols()];
        for j in 0..m.cols() {
            for (i, v) in m.column(j) {
                data[*i * m.cols() + j] = v.to_f64();
            }
        }
        DMat { rows: m.rows(), cols: m.cols(), data }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, x)| x * *a).sum()
            })
            .collect()
    }
}

/// Degree-indexed complex vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CVec {
    comps: Vec<Vec<Complex64>>,
    truncated: bool,
}

impl CVec {
    pub fn zero(dims: &[usize]) -> Self {
        CVec { comps: dims.iter().map(|&d| vec![Complex64::default(); d]).collect(), truncated: false }
    }

    pub fn from_vector(v: &Vector) -> Self {
        let comps = (0..=v.depth()).map(|n| v.component(n).iter().map(|x| c(x.to_f64())).collect()).collect();
        CVec { comps, truncated: v.is_truncated() }
    }

    pub fn from_components(comps: Vec<Vec<Complex64>>) -> Self {
        CVec { comps, truncated: false }
    }

    pub fn component(&self, n: usize) -> &[Complex64] {
        &self.comps[n]
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.comps.len()).filter(|&n| self.comps[n].iter().any(|z| *z != Complex64::default())).collect()
    }

    pub fn axpy(&mut self, s: Complex64, other: &CVec) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += s * y;
            }
        }
        self.truncated |= other.truncated;
    }

    pub fn sub(&self, other: &CVec) -> CVec {
        let mut out = self.clone();
        out.axpy(c(-1.0), other);
        out
    }

    pub fn scale(&self, s: Complex64) -> CVec {
        let mut out = CVec::zero(&self.comps.iter().map(Vec::len).collect::<Vec<_>>());
        out.axpy(s, self);
        out.truncated = self.truncated;
        out
    }
}

/// Gram form and sl₂ ladders in floating point.
#[derive(Clone, Debug)]
pub struct NumSpace {
    dims: Vec<usize>,
    gram: Vec<DMat>,
    l_minus1: Vec<Option<DMat>>,
    l_plus1: Vec<Option<DMat>>,
}

impl NumSpace {
    pub fn new(space: &GradedSpace) -> Self {
        let depth = space.depth();
        NumSpace {
            dims: space.dims().to_vec(),
            gram: (0..=depth).map(|n| DMat::from_matrix(space.gram(n))).collect(),
            l_minus1: (0..=depth).map(|n| space.l_minus1(n).map(DMat::from_matrix)).collect(),
            l_plus1: (0..=depth).map(|n| space.l_plus1(n).map(DMat::from_matrix)).collect(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn depth(&self) -> usize {
        self.dims.len() - 1
    }

    /// `⟨u, v⟩`, antilinear in the first slot.
    pub fn inner(&self, u: &CVec, v: &CVec) -> Complex64 {
        let mut acc = Complex64::default();
        for n in 0..self.dims.len() {
            let gv = self.gram[n].mul_vec(&v.comps[n]);
            for (a, b) in u.comps[n].iter().zip(&gv) {
                acc += a.conj() * b;
            }
        }
        acc
    }

    pub fn norm(&self, u: &CVec) -> f64 {
        self.inner(u, u).re.max(0.0).sqrt()
    }

    /// `L_k u` for `k ∈ {−1, 0, 1}`; components pushed above the depth flag
    /// the result truncated.
    pub fn sl2(&self, k: i32, u: &CVec) -> CVec {
        let mut out = CVec::zero(&self.dims);
        out.truncated = u.truncated;
        for n in u.support() {
            match k {
                0 => out.comps[n] = u.comps[n].iter().map(|z| z * n as f64).collect(),
                -1 => match &self.l_minus1[n] {
                    Some(m) if n < self.depth() => out.comps[n + 1] = m.mul_vec(&u.comps[n]),
                    _ => out.truncated = true,
                },
                1 => {
                    if let Some(m) = &self.l_plus1[n] {
                        out.comps[n - 1] = m.mul_vec(&u.comps[n]);
                    }
                }
                _ => panic!("sl2 index must be -1, 0 or 1"),
            }
        }
        out
    }
}

/// Floating-point copy of a homogeneous field. Fields of a vertex algebra
/// are determined by their states, so a table whose state vanishes is
/// stored as `Zero`, and a weight-zero table with state `λΩ` as `λ·Id`;
/// in both cases the modes are known beyond the depth. The stored blocks
/// must agree with the replacement.
#[derive(Clone, Debug)]
pub enum NumField {
    Table { weight: i64, dims: Vec<usize>, blocks: std::collections::BTreeMap<(i64, usize), DMat> },
    ScalarIdentity { dims: Vec<usize>, value: f64 },
    Zero { weight: i64, dims: Vec<usize> },
}

enum NumBlock<'a> {
    Zero,
    Known(&'a DMat),
    Identity(f64),
    Unknown,
}

impl NumField {
    pub fn new(a: &FieldTable) -> Self {
        if let Ok(s) = state_of_field(a) {
            if s.is_zero() && a.blocks().all(|(_, m)| m.is_zero()) {
                return NumField::Zero { weight: a.weight(), dims: a.dims().to_vec() };
            }
        }
        if a.weight() == 0 {
            if let Ok(s) = state_of_field(a) {
                let lambda = s.component(0)[0].clone();
                let expect = FieldTable::identity(a.dims()).scale(&lambda);
                let (checked, bad) = a.compare(&expect, Window::square(a.depth()));
                if checked > 0 && bad.is_empty() {
                    return NumField::ScalarIdentity { dims: a.dims().to_vec(), value: lambda.to_f64() };
                }
            }
        }
        let blocks = a.blocks().map(|(k, m)| (*k, DMat::from_matrix(m))).collect();
        NumField::Table { weight: a.weight(), dims: a.dims().to_vec(), blocks }
    }

    pub fn weight(&self) -> i64 {
        match self {
            NumField::Table { weight, .. } => *weight,
            NumField::ScalarIdentity { .. } => 0,
            NumField::Zero { weight, .. } => *weight,
        }
    }

    pub fn dims(&self) -> &[usize] {
        match self {
            NumField::Table { dims, .. } | NumField::ScalarIdentity { dims, .. } | NumField::Zero { dims, .. } => dims,
        }
    }

    fn block(&self, shifted: i64, source: usize) -> NumBlock<'_> {
        match self {
            NumField::Zero { .. } => NumBlock::Zero,
            NumField::ScalarIdentity { value, .. } => {
                if shifted == 0 {
                    NumBlock::Identity(*value)
                } else {
                    NumBlock::Zero
                }
            }
            NumField::Table { weight, dims, blocks } => {
                let t = source as i64 - shifted;
                if t < 0 {
                    return NumBlock::Zero;
                }
                if t as usize >= dims.len() {
                    return NumBlock::Unknown;
                }
                match blocks.get(&(shifted + weight - 1, source)) {
                    Some(m) => NumBlock::Known(m),
                    None => NumBlock::Unknown,
                }
            }
        }
    }

    /// Shifted mode `A_n u`, which lowers degree by `n`.
    pub fn mode_apply(&self, n: i64, u: &CVec) -> CVec {
        let mut out = CVec::zero(self.dims());
        out.truncated = u.truncated;
        for p in u.support() {
            match self.block(n, p) {
                NumBlock::Zero => {}
                NumBlock::Identity(v) => {
                    for (x, y) in out.comps[p].iter_mut().zip(&u.comps[p]) {
                        *x += y * v;
                    }
                }
                NumBlock::Known(m) => {
                    let t = (p as i64 - n) as usize;
                    for (x, y) in out.comps[t].iter_mut().zip(m.mul_vec(&u.comps[p])) {
                        *x += y;
                    }
                }
                NumBlock::Unknown => out.truncated = true,
            }
        }
        out
    }
}

/// `Y⁰(A, f)u = Σ_n f̂(n) A_n u` over the nonzero coefficients of `f`.
pub fn smear_apply(a: &NumField, f: &TrigPoly, u: &CVec) -> CVec {
    let mut out = CVec::zero(a.dims());
    out.truncated = u.truncated;
    for (n, coeff) in f.iter() {
        if coeff == Complex64::default() {
            continue;
        }
        out.axpy(coeff, &a.mode_apply(n, u));
    }
    out
}

/// Smearing of a finite sum of homogeneous fields.
pub fn smear_apply_sum(parts: &[NumField], f: &TrigPoly, u: &CVec) -> CVec {
    let mut out = CVec::zero(parts[0].dims());
    out.truncated = u.truncated;
    for p in parts {
        let s = smear_apply(p, f, u);
        out.axpy(c(1.0), &s);
    }
    out
}

// ---------------------------------------------------------------------------
// Growth and order probes

/// Least-squares slope of `y` against `x`.
fn ls_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in pts {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    (den > 0.0).then(|| num / den)
}

const NEGLIGIBLE: f64 = 1e-300;

/// Polynomial degree of a sequence sampled at consecutive indices, read off
/// from exact finite differences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "degree", rename_all = "snake_case")]
pub enum TailDegree {
    Vanishes,
    Degree(usize),
    /// Too few points to confirm a degree twice.
    Undetermined,
}

impl TailDegree {
    fn combine(self, other: TailDegree) -> TailDegree {
        use TailDegree::*;
        match (self, other) {
            (Vanishes, x) | (x, Vanishes) => x,
            (Undetermined, _) | (_, Undetermined) => Undetermined,
            (Degree(a), Degree(b)) => Degree(a.max(b)),
        }
    }
}

/// Degree `k` once the `(k+1)`-th differences vanish on at least two
/// entries.
pub fn tail_degree(values: &[Scalar]) -> TailDegree {
    if values.iter().all(Scalar::is_zero) {
        return TailDegree::Vanishes;
    }
    let mut d = values.to_vec();
    for k in 0.. {
        if d.len() < 3 {
            break;
        }
        let next: Vec<Scalar> = d.windows(2).map(|w| &w[1] - &w[0]).collect();
        if next.iter().all(Scalar::is_zero) {
            return TailDegree::Degree(k);
        }
        d = next;
    }
    TailDegree::Undetermined
}

/// Tail degree over both ends `idx > bound` and `idx < −bound`, each read
/// as a run of consecutive indices ordered by `|idx|`.
fn two_sided_degree(values: &[(i64, Scalar)], bound: i64) -> TailDegree {
    let side = |sign: i64| {
        let mut run: Vec<&(i64, Scalar)> = values.iter().filter(|(i, _)| i * sign > bound).collect();
        run.sort_by_key(|(i, _)| i.abs());
        let mut seq = Vec::new();
        for (j, (i, v)) in run.iter().enumerate() {
            if j > 0 && i.abs() != run[j - 1].0.abs() + 1 {
                break;
            }
            seq.push(v.clone());
        }
        tail_degree(&seq)
    };
    side(1).combine(side(-1))
}

/// Matrix elements `e(m) = ⟨u′, A_m A_{m′} u⟩` with `m + m′ = deg u − deg u′`,
/// so that only the first index is free. Beyond `|m| > max(deg u, deg u′)`
/// the commutator formula makes `e(m)` a polynomial in `m`, whose degree is
/// found exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthProbe {
    /// `(m, |e(m)|)` over the untruncated part of the window.
    pub points: Vec<(i64, f64)>,
    pub truncated: usize,
    pub tail: TailDegree,
    /// Log-log slope of `|e(m)|` against `1 + |m|` over the outer half of
    /// the tail, for comparison.
    pub slope: Option<f64>,
    /// The exact tail degree, or the rounded slope when the window is too
    /// short; `None` when the tail vanishes.
    pub degree: Option<i64>,
    /// `(g, max_m |e(m)| / (1 + |m|)^g)` for `g = 0..=4`.
    pub max_ratio: Vec<(u32, f64)>,
}

fn outer_slope(pts: impl Iterator<Item = (f64, f64)>) -> Option<f64> {
    let mut fit: Vec<(f64, f64)> = pts.filter(|(_, y)| *y > NEGLIGIBLE).map(|(x, y)| (x.ln(), y.ln())).collect();
    // Lower-order terms bend the curve at small |m|.
    fit.sort_by(|a, b| a.0.total_cmp(&b.0));
    let fit = if fit.len() >= 4 { fit.split_off(fit.len() / 2) } else { fit };
    ls_slope(&fit)
}

pub fn mode_growth_probe(
    space: &GradedSpace,
    a: &FieldTable,
    u: &Vector,
    u_prime: &Vector,
    window: std::ops::RangeInclusive<i64>,
) -> Result<GrowthProbe, crate::space::SpaceError> {
    let p = u.homogeneous_degree().unwrap_or(0) as i64;
    let q = u_prime.homogeneous_degree().unwrap_or(0) as i64;
    let mut exact = Vec::new();
    let mut truncated = 0;
    for m in window {
        let w = a.shifted_mode_apply(p - q - m, u);
        let w = a.shifted_mode_apply(m, &w);
        if w.is_truncated() {
            truncated += 1;
            continue;
        }
        exact.push((m, inner(space, u_prime, &w)?));
    }
    let bound = p.max(q);
    let points: Vec<(i64, f64)> = exact.iter().map(|(m, e)| (*m, e.to_f64().abs())).collect();
    let tail = two_sided_degree(&exact, bound);
    let slope = outer_slope(points.iter().filter(|(m, _)| m.abs() > bound).map(|(m, e)| (1.0 + m.abs() as f64, *e)));
    let degree = match tail {
        TailDegree::Degree(k) => Some(k as i64),
        TailDegree::Vanishes => None,
        TailDegree::Undetermined => slope.map(|s| s.round() as i64),
    };
    let max_ratio = (0..=4u32)
        .map(|g| (g, points.iter().map(|(m, e)| e / (1.0 + m.abs() as f64).powi(g as i32)).fold(0.0, f64::max)))
        .collect();
    Ok(GrowthProbe { points, truncated, tail, slope, degree, max_ratio })
}

/// Empirical Sobolev order of `f ↦ Y⁰(A, f)u`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderEstimate {
    /// `(n, s_n)` with `s_n = ‖A_n u‖` over the untruncated window.
    pub norms: Vec<(i64, f64)>,
    pub truncated: usize,
    /// Polynomial degree `k` of `s_n²` in `n` beyond `|n| > deg u`.
    pub tail: TailDegree,
    /// Growth exponent `e` in `s_n ~ |n|^e`: `k/2` from the exact tail, or
    /// the log-log slope rounded to a half-integer when the window is too
    /// short to confirm `k`.
    pub exponent: Option<f64>,
    /// Least `N` with `Σ s_n² (1+n²)^{−N}` convergent, i.e. `N > e + 1/2`.
    pub order: usize,
    /// `(N, partial sum over the window)` for `N = 0..=order + 1`.
    pub partial_sums: Vec<(usize, f64)>,
}

pub fn order_estimate(
    space: &GradedSpace,
    a: &FieldTable,
    u: &Vector,
    window: std::ops::RangeInclusive<i64>,
) -> Result<OrderEstimate, crate::space::SpaceError> {
    let p = u.homogeneous_degree().unwrap_or(0) as i64;
    let mut squares = Vec::new();
    let mut truncated = 0;
    for n in window {
        let w = a.shifted_mode_apply(n, u);
        if w.is_truncated() {
            truncated += 1;
            continue;
        }
        squares.push((n, inner(space, &w, &w)?));
    }
    let norms: Vec<(i64, f64)> = squares.iter().map(|(n, s)| (*n, s.to_f64().max(0.0).sqrt())).collect();
    let tail = two_sided_degree(&squares, p);
    let exponent = match tail {
        TailDegree::Vanishes => None,
        TailDegree::Degree(k) => Some(k as f64 / 2.0),
        TailDegree::Undetermined => {
            outer_slope(norms.iter().filter(|(n, _)| n.abs() > p).map(|(n, s)| (n.abs() as f64, *s)))
                .map(|e| (2.0 * e).round() / 2.0)
        }
    };
    let order = match exponent {
        None => 0,
        Some(e) => (e + 0.5).floor().max(-1.0) as usize + 1,
    };
    let partial_sums = (0..=order + 1)
        .map(|k| (k, norms.iter().map(|(n, s)| s * s * (1.0 + (n * n) as f64).powi(-(k as i32))).sum()))
        .collect();
    Ok(OrderEstimate { norms, truncated, tail, exponent, order, partial_sums })
}

// ---------------------------------------------------------------------------
// Commutators of smeared fields

/// Numeric image of `[a_m, b_n] = Σ_s C(m+d_a−1, s)(a₍ₛ₎b)_{m+n}`.
#[derive(Clone, Debug)]
pub struct NumCommutator {
    weight_a: i64,
    products: Vec<NumField>,
}

impl NumCommutator {
    pub fn new(a: &FieldTable, b: &FieldTable) -> Result<Self, FieldError> {
        let bc = BorcherdsCommutator::new(a, b)?;
        Ok(NumCommutator { weight_a: bc.weight_a(), products: bc.products().iter().map(NumField::new).collect() })
    }
}

fn binomial_f64(x: i64, s: usize) -> f64 {
    (0..s).fold(1.0, |acc, i| acc * (x - i as i64) as f64 / (i + 1) as f64)
}

/// `[Y⁰(A, f), Y⁰(B, g)]u` through the commutator formula, grouping the
/// double sum by total index `k = m + n`.
pub fn smeared_commutator(comm: &NumCommutator, f: &TrigPoly, g: &TrigPoly, u: &CVec) -> CVec {
    let dims = match comm.products.first() {
        Some(p) => p.dims().to_vec(),
        None => u.comps.iter().map(Vec::len).collect(),
    };
    let mut out = CVec::zero(&dims);
    out.truncated = u.truncated;
    let (mf, mg) = (f.cutoff() as i64, g.cutoff() as i64);
    for (s, prod) in comm.products.iter().enumerate() {
        for k in -(mf + mg)..=(mf + mg) {
            let mut coeff = Complex64::default();
            for m in (k - mg).max(-mf)..=(k + mg).min(mf) {
                let fg = f.coeff(m) * g.coeff(k - m);
                if fg != Complex64::default() {
                    coeff += fg * binomial_f64(m + comm.weight_a - 1, s);
                }
            }
            if coeff != Complex64::default() {
                out.axpy(coeff, &prod.mode_apply(k, u));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayRow {
    pub cutoff: usize,
    pub residual: f64,
    pub truncated: bool,
}

/// `r_M = ‖[Y⁰(A, f_{≤M}), Y⁰(B, g_{≤M})]u‖` for each cutoff, with no
/// condition on the supports.
pub fn commutator_decay_table(
    space: &NumSpace,
    comm: &NumCommutator,
    f: &Bump,
    g: &Bump,
    u: &CVec,
    cutoffs: &[usize],
) -> Vec<DecayRow> {
    let top = cutoffs.iter().copied().max().unwrap_or(0);
    let (fh, gh) = (f.fourier(top), g.fourier(top));
    cutoffs
        .iter()
        .map(|&m| {
            let r = smeared_commutator(comm, &fh.with_cutoff(m), &gh.with_cutoff(m), u);
            DecayRow { cutoff: m, residual: space.norm(&r), truncated: r.is_truncated() }
        })
        .collect()
}

/// Grid used to certify that two supports are disjoint.
pub const OVERLAP_SAMPLES: usize = 4096;

pub fn disjoint_commutator_decay(
    space: &NumSpace,
    comm: &NumCommutator,
    f: &Bump,
    g: &Bump,
    u: &CVec,
    cutoffs: &[usize],
) -> Result<Vec<DecayRow>, SmearError> {
    check_disjoint(f, g, OVERLAP_SAMPLES)?;
    Ok(commutator_decay_table(space, comm, f, g, u, cutoffs))
}

// ---------------------------------------------------------------------------
// Möbius action on test functions

/// `z ↦ (az + b)/(b̄z + ā)` with `|a|² − |b|² = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Moebius {
    pub a: Complex64,
    pub b: Complex64,
}

impl Moebius {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self, SmearError> {
        let det = a.norm_sqr() - b.norm_sqr();
        if (det - 1.0).abs() > 1e-12 {
            return Err(SmearError::NotInSu11(det));
        }
        Ok(Moebius { a, b })
    }

    pub fn identity() -> Self {
        Moebius { a: c(1.0), b: Complex64::default() }
    }

    pub fn rotation(theta0: f64) -> Self {
        Moebius { a: Complex64::from_polar(1.0, theta0 / 2.0), b: Complex64::default() }
    }

    /// The boost fixing `±1`, `a = cosh(t/2)`, `b = sinh(t/2)`.
    pub fn boost(t: f64) -> Self {
        Moebius { a: c((t / 2.0).cosh()), b: c((t / 2.0).sinh()) }
    }

    pub fn compose(&self, other: &Moebius) -> Moebius {
        Moebius {
            a: self.a * other.a + self.b * other.b.conj(),
            b: self.a * other.b + self.b * other.a.conj(),
        }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.b.conj() * z + self.a.conj())
    }

    pub fn inverse(&self) -> Moebius {
        Moebius { a: self.a.conj(), b: -self.b }
    }

    /// `X_γ(e^{iθ}) = −i d/dθ log γ(e^{iθ}) = 1/|a e^{iθ} + b|²`.
    pub fn x(&self, theta: f64) -> f64 {
        1.0 / (self.a * Complex64::from_polar(1.0, theta) + self.b).norm_sqr()
    }
}

/// `(β_d(γ)f)(z) = X_γ(γ⁻¹z)^{d−1} f(γ⁻¹z)`, sampled on `4·out_cutoff`
/// points and transformed back with an FFT.
pub fn beta_action(gamma: &Moebius, d: i64, f: &TrigPoly, out_cutoff: usize) -> Result<TrigPoly, SmearError> {
    let n = 4 * out_cutoff.max(1);
    let inv = gamma.inverse();
    let mut buf = Vec::with_capacity(n);
    for j in 0..n {
        let theta = 2.0 * PI * j as f64 / n as f64;
        let w = inv.apply(Complex64::from_polar(1.0, theta)).arg();
        let x = gamma.x(w);
        if !(x > 0.0 && x.is_finite()) {
            return Err(SmearError::NonPositiveXGamma { theta: w, value: x });
        }
        buf.push(f.eval(w) * x.powi((d - 1) as i32));
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    Ok(TrigPoly::from_fn(out_cutoff, |k| buf[k.rem_euclid(n as i64) as usize] * scale))
}

// ---------------------------------------------------------------------------
// Infinitesimal covariance

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovarianceResidual {
    pub residual: f64,
    /// `‖L_k Y⁰u‖ + ‖Y⁰ L_k u‖ + ‖rhs‖`, floored at 1.
    pub scale: f64,
    pub truncated: bool,
}

impl CovarianceResidual {
    pub fn within(&self, tol: f64) -> bool {
        self.residual <= tol * self.scale
    }
}

/// `‖[L_k, Y⁰(A,f)]u − Y⁰(A, (d−1)g′f − g f′)u‖` with `g = −ie^{ikθ}`.
pub fn infinitesimal_covariance_check(space: &NumSpace, a: &NumField, d: i64, k: i32, f: &TrigPoly, u: &CVec) -> CovarianceResidual {
    let kk = k as i64;
    // (d−1)g′f − g f′ has coefficients ((d−1)k − (n−k)) f̂(n−k).
    let h = TrigPoly::from_fn(f.cutoff() + 1, |n| f.coeff(n - kk) * ((d - 1) * kk - (n - kk)) as f64);
    let ayu = smear_apply(a, f, u);
    let left = space.sl2(k, &ayu);
    let right = smear_apply(a, f, &space.sl2(k, u));
    let rhs = smear_apply(a, &h, u);
    let diff = left.sub(&right).sub(&rhs);
    CovarianceResidual {
        residual: space.norm(&diff),
        scale: (space.norm(&left) + space.norm(&right) + space.norm(&rhs)).max(1.0),
        truncated: diff.is_truncated(),
    }
}

// ---------------------------------------------------------------------------
// Summability diagnostic

/// `P_N(n) P_N(m) / Σ_{k ≤ 2N+2} Σ_{ℓ ≤ k} m^{2(k−ℓ)} n^{2ℓ}` with
/// `P_N(x) = Σ_{j ≤ N} x^{2j}`.
pub fn summability_summand(order: u32, n: i64, m: i64) -> f64 {
    let (n2, m2) = ((n * n) as f64, (m * m) as f64);
    let p = |x2: f64| (0..=order).map(|j| x2.powi(j as i32)).sum::<f64>();
    let mut q = 0.0;
    for k in 0..=(2 * order + 2) as i32 {
        for l in 0..=k {
            q += m2.powi(k - l) * n2.powi(l);
        }
    }
    p(n2) * p(m2) / q
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummabilityDiagnostic {
    pub order: u32,
    pub cutoff: usize,
    /// Partial sums over `|m|, |n| ≤ M` for `M = 1..=2·cutoff`.
    pub partial_sums: Vec<(usize, f64)>,
    pub monotone: bool,
    pub origin_value: f64,
    /// Largest `summand · n²m²` over `nm ≠ 0`, `|m|, |n| ≤ 2·cutoff`.
    pub max_bound_ratio: f64,
    /// `S(2·cutoff) − S(cutoff)`.
    pub tail: f64,
    /// `4 / cutoff`.
    pub tail_bound: f64,
}

impl SummabilityDiagnostic {
    pub fn passed(&self) -> bool {
        self.monotone && self.origin_value == 1.0 && self.max_bound_ratio <= 1.0 && self.tail < self.tail_bound
    }
}

pub fn sobolev_summability_diagnostic(order: u32, cutoff: usize) -> SummabilityDiagnostic {
    assert!(cutoff >= 1, "cutoff must be positive");
    let top = 2 * cutoff as i64;
    // Shells |m|,|n| with max(|m|,|n|) = M, summed in a fixed order.
    let mut shell = vec![0.0; top as usize + 1];
    let mut max_bound_ratio: f64 = 0.0;
    for n in -top..=top {
        for m in -top..=top {
            let s = summability_summand(order, n, m);
            shell[n.abs().max(m.abs()) as usize] += s;
            if n != 0 && m != 0 {
                max_bound_ratio = max_bound_ratio.max(s * (n * n) as f64 * (m * m) as f64);
            }
        }
    }
    let mut acc = shell[0];
    let mut partial_sums = Vec::with_capacity(top as usize);
    let mut monotone = true;
    for (mm, s) in shell.iter().enumerate().skip(1) {
        let next = acc + s;
        monotone &= next >= acc;
        acc = next;
        partial_sums.push((mm, acc));
    }
    let at = |mm: usize| partial_sums[mm - 1].1;
    SummabilityDiagnostic {
        order,
        cutoff,
        tail: at(2 * cutoff) - at(cutoff),
        tail_bound: 4.0 / cutoff as f64,
        partial_sums,
        monotone,
        origin_value: summability_summand(order, 0, 0),
        max_bound_ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{heisenberg, virasoro, NullVectors};
    use crate::unitarity::conjugate_state;

    fn fft_coeffs(f: impl Fn(f64) -> f64, samples: usize, cutoff: usize) -> TrigPoly {
        let mut buf: Vec<Complex64> = (0..samples).map(|j| c(f(2.0 * PI * j as f64 / samples as f64))).collect();
        FftPlanner::new().plan_fft_forward(samples).process(&mut buf);
        TrigPoly::from_fn(cutoff, |n| buf[n.rem_euclid(samples as i64) as usize] / samples as f64)
    }

    #[test]
    fn sobolev_examples() {
        assert_eq!(sobolev_norm(&TrigPoly::monomial(0), 3.0), 1.0);
        assert!((sobolev_norm(&TrigPoly::monomial(1), 1.0) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn quadrature_reference_integrals() {
        let e = integrate(|x| c(x.exp()), -1.0, 1.0, 1e-14).re;
        assert!((e - (1f64.exp() - (-1f64).exp())).abs() < 1e-13);
        let s = integrate(|x| c((20.0 * x).cos()), -1.0, 1.0, 1e-14).re;
        assert!((s - 20f64.sin() / 10.0).abs() < 1e-13);
    }

    #[test]
    fn bump_coefficients_match_fft() {
        let b = Bump::new(0.7, 1.1);
        let q = b.fourier(40);
        let oracle = fft_coeffs(|t| b.value(t), 1 << 14, 40);
        assert!(q.max_abs_diff(&oracle) < 1e-13, "{}", q.max_abs_diff(&oracle));
        for j in 0..50 {
            let t = j as f64 * 0.13;
            let err = (b.fourier(256).eval(t).re - b.value(t)).abs();
            assert!(err < 1e-8, "theta {t}: {err:e}");
        }
    }

    #[test]
    fn smear_examples() {
        let h = heisenberg(4).unwrap();
        let j = NumField::new(&h.generator);
        let ns = NumSpace::new(&h.space);
        let omega = CVec::from_vector(&h.space.vacuum());
        let v = smear_apply(&j, &TrigPoly::monomial(-1), &omega);
        assert!((ns.norm(&v) - 1.0).abs() < 1e-15);
        assert_eq!(ns.norm(&smear_apply(&j, &TrigPoly::zero(5), &omega)), 0.0);
        let u = Vector::basis(&h.space, 2, 1);
        for n in -3..=3 {
            let exact = CVec::from_vector(&h.generator.shifted_mode_apply(n, &u));
            let got = smear_apply(&j, &TrigPoly::monomial(n), &CVec::from_vector(&u));
            assert_eq!(got, exact);
        }
    }

    #[test]
    fn order_estimates() {
        let h = heisenberg(6).unwrap();
        let w = h.working_depth() as i64;
        for (deg, idx) in h.space.basis_indices(4) {
            let u = Vector::basis(&h.space, deg, idx);
            let est = order_estimate(&h.space, &h.generator, &u, -w..=w).unwrap();
            assert_eq!((est.exponent, est.order), (Some(0.5), 2), "u = {}", h.space.label(deg, idx));
        }
        let id = FieldTable::identity(h.space.dims());
        let est = order_estimate(&h.space, &id, &h.space.vacuum(), -w..=w).unwrap();
        assert_eq!(est.order, 0);
        let v = virasoro(Scalar::new(1, 2), 6, NullVectors::Quotient).unwrap();
        let w = v.working_depth() as i64;
        for (deg, idx) in v.space.basis_indices(3) {
            let u = Vector::basis(&v.space, deg, idx);
            let est = order_estimate(&v.space, &v.generator, &u, -w..=w).unwrap();
            assert_eq!((est.tail, est.order), (TailDegree::Degree(3), 3), "u = {}", v.space.label(deg, idx));
        }
    }

    #[test]
    fn tail_degrees() {
        let seq = |f: fn(i64) -> i64| (2..9).map(|n| Scalar::int(f(n))).collect::<Vec<_>>();
        assert_eq!(tail_degree(&seq(|_| 0)), TailDegree::Vanishes);
        assert_eq!(tail_degree(&seq(|_| 5)), TailDegree::Degree(0));
        assert_eq!(tail_degree(&seq(|n| n * n * n - n)), TailDegree::Degree(3));
        assert_eq!(tail_degree(&[Scalar::int(1), Scalar::int(4)]), TailDegree::Undetermined);
        assert_eq!(tail_degree(&seq(|n| 1 << n)), TailDegree::Undetermined);
    }

    #[test]
    fn growth_probes() {
        let h = heisenberg(8).unwrap();
        let w = h.working_depth() as i64;
        let mut degrees = Vec::new();
        for (p, i) in h.space.basis_indices(4) {
            for (q, k) in h.space.basis_indices(4) {
                let u = Vector::basis(&h.space, p, i);
                let u2 = Vector::basis(&h.space, q, k);
                let g = mode_growth_probe(&h.space, &h.generator, &u, &u2, -w..=w).unwrap();
                if p == q && i == k {
                    assert!(g.degree.is_some());
                }
                degrees.extend(g.degree);
            }
        }
        assert!(degrees.iter().all(|&d| d == 1), "{degrees:?}");
        let v = virasoro(Scalar::new(1, 2), 6, NullVectors::Keep).unwrap();
        let w = v.working_depth() as i64;
        let om = v.space.vacuum();
        let g = mode_growth_probe(&v.space, &v.generator, &om, &om, -w..=w).unwrap();
        assert_eq!(g.degree, Some(3));
    }

    fn decay_setup() -> (NumSpace, NumCommutator, CVec, crate::models::Model) {
        let h = heisenberg(8).unwrap();
        let comm = NumCommutator::new(&h.generator, &h.generator).unwrap();
        (NumSpace::new(&h.space), comm, CVec::from_vector(&h.space.vacuum()), h)
    }

    #[test]
    fn disjoint_supports_decay() {
        let (ns, comm, omega, _) = decay_setup();
        let f = Bump::new(0.0, 1.0);
        let g = Bump::new(2.6, 1.0);
        let cutoffs = [4, 8, 16, 32, 64];
        let t = disjoint_commutator_decay(&ns, &comm, &f, &g, &omega, &cutoffs).unwrap();
        assert!(t.iter().all(|r| !r.truncated));
        assert!(t[4].residual < 1e-2 * t[2].residual, "{t:?}");
        let control = commutator_decay_table(&ns, &comm, &f, &Bump::new(0.5, 1.0), &omega, &cutoffs);
        assert!(control[4].residual > 10.0 * t[4].residual, "{control:?}");
        assert!(matches!(
            disjoint_commutator_decay(&ns, &comm, &f, &Bump::new(1.5, 1.0), &omega, &cutoffs),
            Err(SmearError::SupportOverlap { .. })
        ));
    }

    #[test]
    fn identity_commutes_exactly() {
        let (ns, _, omega, h) = decay_setup();
        let id = FieldTable::identity(h.space.dims());
        let comm = NumCommutator::new(&id, &h.generator).unwrap();
        let t = commutator_decay_table(&ns, &comm, &Bump::new(0.0, 1.0), &Bump::new(0.3, 1.0), &omega, &[8, 32]);
        assert!(t.iter().all(|r| r.residual == 0.0 && !r.truncated));
    }

    #[test]
    fn beta_examples() {
        let f = Bump::new(0.4, 1.2).fourier(24);
        let id = beta_action(&Moebius::identity(), 2, &f, 24).unwrap();
        assert!(id.max_abs_diff(&f) < 1e-12);
        let r = beta_action(&Moebius::rotation(0.9), 3, &f, 24).unwrap();
        assert!(r.max_abs_diff(&f.rotate(0.9)) < 1e-12);
        let p = TrigPoly::from_fn(3, |n| Complex64::new(1.0 / (1 + n * n) as f64, 0.1 * n as f64));
        let (g1, g2) = (Moebius::boost(0.3), Moebius::new(Complex64::new(0.0, 1.25), c(0.75)).unwrap());
        let lhs = beta_action(&g1.compose(&g2), 2, &p, 96).unwrap();
        let rhs = beta_action(&g1, 2, &beta_action(&g2, 2, &p, 96).unwrap(), 96).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-9, "{}", lhs.max_abs_diff(&rhs));
        assert!(Moebius::new(c(1.0), c(1.0)).is_err());
    }

    #[test]
    fn covariance_residuals() {
        let h = heisenberg(4).unwrap();
        let ns = NumSpace::new(&h.space);
        let j = NumField::new(&h.generator);
        let mut worst_bad: f64 = 0.0;
        for (p, i) in h.space.basis_indices(4) {
            let u = CVec::from_vector(&Vector::basis(&h.space, p, i));
            for k in -1..=1 {
                for n in -6..=6 {
                    let f = TrigPoly::monomial(n);
                    let r = infinitesimal_covariance_check(&ns, &j, 1, k, &f, &u);
                    assert!(r.truncated || r.within(1e-10), "k={k} n={n} {r:?}");
                    let bad = infinitesimal_covariance_check(&ns, &j, 2, k, &f, &u);
                    if !bad.truncated {
                        worst_bad = worst_bad.max(bad.residual);
                    }
                }
            }
        }
        assert!(worst_bad > 1.0);
    }

    #[test]
    fn summability() {
        for n in [0, 1] {
            let d = sobolev_summability_diagnostic(n, 100);
            assert!(d.passed(), "{:?}", (d.tail, d.max_bound_ratio));
        }
    }

    #[test]
    fn adjoint_identity() {
        let h = heisenberg(4).unwrap();
        let ns = NumSpace::new(&h.space);
        let conj = conjugate_state(&h.space, &h.theta, &Vector::basis(&h.space, 1, 0));
        assert_eq!(conj.homogeneous_degree(), Some(1));
        let jt = NumField::new(&h.generator.scale(&conj.component(1)[0]));
        let j = NumField::new(&h.generator);
        let f = TrigPoly::from_fn(3, |n| Complex64::new(n as f64, 1.0 - 0.5 * n as f64));
        for (p, i) in h.space.basis_indices(3) {
            for (q, k) in h.space.basis_indices(3) {
                let u = CVec::from_vector(&Vector::basis(&h.space, p, i));
                let u2 = CVec::from_vector(&Vector::basis(&h.space, q, k));
                let l = ns.inner(&smear_apply(&j, &f, &u), &u2);
                let r = ns.inner(&u, &smear_apply(&jt, &f.conj(), &u2));
                assert!((l - r).norm() < 1e-10 * (1.0 + l.norm()));
            }
        }
    }
}
