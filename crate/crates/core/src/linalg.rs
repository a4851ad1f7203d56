//! Sparse exact matrices and the small amount of exact linear algebra the
//! engine needs: fraction-free rank, rational solves, inverses, null spaces
//! and a symmetric positivity test.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

/// Column-compressed sparse matrix over [`Scalar`]. Each column keeps its
/// non-zero entries sorted by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, Scalar)>>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        let data = (0..n).map(|i| vec![(i, Scalar::one())]).collect();
        Matrix { rows: n, cols: n, data }
    }

    pub fn scalar_identity(n: usize, s: &Scalar) -> Self {
        Self::identity(n).scale(s)
    }

    /// Builds a matrix from dense rows.
    pub fn from_rows(rows: &[Vec<Scalar>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = Matrix::zeros(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    m.data[j].push((i, v.clone()));
                }
            }
        }
        m
    }

    /// Builds a matrix from dense columns.
    pub fn from_columns(rows: usize, columns: Vec<Vec<Scalar>>) -> Self {
        let cols = columns.len();
        let data = columns
            .into_iter()
            .map(|c| {
                assert_eq!(c.len(), rows, "column length mismatch");
                sparsify(c)
            })
            .collect();
        Matrix { rows, cols, data }
    }

    /// Overwrites one entry.
    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        let col = &mut self.data[j];
        match col.binary_search_by_key(&i, |(r, _)| *r) {
            Ok(k) if v.is_zero() => {
                col.remove(k);
            }
            Ok(k) => col[k].1 = v,
            Err(_) if v.is_zero() => {}
            Err(k) => col.insert(k, (i, v)),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        match self.data[j].binary_search_by_key(&i, |(r, _)| *r) {
            Ok(k) => self.data[j][k].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn column(&self, j: usize) -> &[(usize, Scalar)] {
        &self.data[j]
    }

    pub fn dense_column(&self, j: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.rows];
        for (i, v) in &self.data[j] {
            out[*i] = v.clone();
        }
        out
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![Scalar::zero(); self.cols]; self.rows];
        for (j, col) in self.data.iter().enumerate() {
            for (i, v) in col {
                out[*i][j] = v.clone();
            }
        }
        out
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "matrix-vector shape mismatch");
        let mut out = vec![Scalar::zero(); self.rows];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (i, a) in &self.data[j] {
                out[*i] += &(a * x);
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut data = Vec::with_capacity(other.cols);
        let mut acc = vec![Scalar::zero(); self.rows];
        let mut touched = vec![false; self.rows];
        for col in &other.data {
            let mut rows_hit = Vec::new();
            for (k, b) in col {
                for (i, a) in &self.data[*k] {
                    if !touched[*i] {
                        touched[*i] = true;
                        rows_hit.push(*i);
                    }
                    acc[*i] += &(a * b);
                }
            }
            rows_hit.sort_unstable();
            let mut out = Vec::with_capacity(rows_hit.len());
            for i in rows_hit {
                touched[i] = false;
                let v = std::mem::take(&mut acc[i]);
                if !v.is_zero() {
                    out.push((i, v));
                }
            }
            data.push(out);
        }
        Matrix { rows: self.rows, cols: other.cols, data }
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = vec![Vec::new(); self.rows];
        for (j, col) in self.data.iter().enumerate() {
            for (i, v) in col {
                data[*i].push((j, v.clone()));
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        if s.is_zero() {
            return Matrix::zeros(self.rows, self.cols);
        }
        let data = self
            .data
            .iter()
            .map(|c| c.iter().map(|(i, v)| (*i, v * s)).collect())
            .collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: &Scalar, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "matrix sum shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| merge_columns(a, b, s))
            .collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.axpy(&Scalar::one(), other)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.axpy(&Scalar::int(-1), other)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && *self == self.transpose()
    }

    /// Principal submatrix on the given index set.
    pub fn principal(&self, idx: &[usize]) -> Matrix {
        let rows: Vec<Vec<Scalar>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| self.get(i, j)).collect())
            .collect();
        Matrix::from_rows(&rows)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.cols]; self.rows];
        for (j, col) in self.data.iter().enumerate() {
            for (i, v) in col {
                out[*i][j] = v.to_f64();
            }
        }
        out
    }
}

fn sparsify(c: Vec<Scalar>) -> Vec<(usize, Scalar)> {
    c.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect()
}

fn merge_columns(a: &[(usize, Scalar)], b: &[(usize, Scalar)], s: &Scalar) -> Vec<(usize, Scalar)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut p, mut q) = (0, 0);
    while p < a.len() || q < b.len() {
        let next_a = a.get(p).map(|x| x.0);
        let next_b = b.get(q).map(|x| x.0);
        match (next_a, next_b) {
            (Some(i), Some(j)) if i == j => {
                let v = &a[p].1 + &(s * &b[q].1);
                if !v.is_zero() {
                    out.push((i, v));
                }
                p += 1;
                q += 1;
            }
            (Some(i), Some(j)) if i < j => {
                out.push(a[p].clone());
                p += 1;
            }
            (Some(i), None) => {
                out.push((i, a[p].1.clone()));
                p += 1;
            }
            (_, Some(j)) => {
                let v = s * &b[q].1;
                if !v.is_zero() {
                    out.push((j, v));
                }
                q += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Dense vector helpers.
pub fn vec_is_zero(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

pub fn vec_axpy(acc: &mut [Scalar], s: &Scalar, x: &[Scalar]) {
    if s.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(x) {
        if !b.is_zero() {
            *a += &(s * b);
        }
    }
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

/// Clears denominators of a rational row, returning a primitive integer row.
fn integer_row(row: &[Scalar]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .filter(|v| !v.is_zero())
        .fold(BigInt::one(), |acc, v| acc.lcm(&v.denom()));
    let ints: Vec<BigInt> = row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect();
    primitive(ints)
}

fn primitive(mut row: Vec<BigInt>) -> Vec<BigInt> {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in &mut row {
            *x = &*x / &g;
        }
    }
    row
}

/// Rank of a set of rational rows by fraction-free (Bareiss) elimination.
pub fn rank(rows: &[Vec<Scalar>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| integer_row(r)).collect();
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut r = 0;
    let mut prev = BigInt::one();
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
        if r == nrows {
            break;
        }
    }
    r
}

/// Incremental row span used to detect when a new vector enlarges a span.
/// Rows are kept fraction-free in echelon form.
#[derive(Clone, Debug, Default)]
pub struct SpanTracker {
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl SpanTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the span; returns the integer remainder.
    fn reduce(&self, v: &[Scalar]) -> Vec<BigInt> {
        let mut x = integer_row(v);
        for (pivot, row) in &self.rows {
            if x[*pivot].is_zero() {
                continue;
            }
            let a = row[*pivot].clone();
            let b = x[*pivot].clone();
            x = x.iter().zip(row).map(|(xi, ri)| &a * xi - &b * ri).collect();
            x = primitive(x);
        }
        x
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v`; returns `true` if the span grew.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let x = self.reduce(v);
        match x.iter().position(|e| !e.is_zero()) {
            Some(p) => {
                let x = if x[p].is_negative() { x.into_iter().map(|e| -e).collect() } else { x };
                self.rows.push((p, x));
                true
            }
            None => false,
        }
    }
}

/// Solves `a x = b` for square non-singular `a` by Gauss-Jordan elimination.
pub fn solve(a: &[Vec<Scalar>], b: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = a.len();
    let mut m: Vec<Vec<Scalar>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[c].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &(&f * y);
                    }
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

/// Inverse of a square matrix given by dense rows.
pub fn inverse(a: &[Vec<Scalar>]) -> Option<Vec<Vec<Scalar>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<Scalar> = (0..n).map(|i| if i == j { Scalar::one() } else { Scalar::zero() }).collect();
        cols.push(solve(a, &e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

/// Basis of the right null space `{x : a x = 0}` of a matrix with `ncols`
/// columns given by dense rows.
pub fn null_space(a: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let mut m: Vec<Vec<Scalar>> = a.to_vec();
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..nrows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pr = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pr) {
                    if !y.is_zero() {
                        *x -= &(&f * y);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Scalar::zero(); ncols];
            x[f] = Scalar::one();
            for (row, &pc) in pivots.iter().enumerate() {
                x[pc] = -&m[row][f];
            }
            x
        })
        .collect()
}

/// Outcome of an exact symmetric positivity test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Definiteness {
    PositiveDefinite { pivots: Vec<Scalar> },
    /// Positive semidefinite with a non-trivial radical of the given dimension.
    Semidefinite { nullity: usize },
    /// A negative direction exists; `pivot` is the offending Schur pivot at
    /// elimination step `index` (for a zero pivot with non-zero off-diagonal
    /// coupling, `pivot` is zero).
    Indefinite { index: usize, pivot: Scalar },
}

/// Exact LDLᵀ-style symmetric elimination.
pub fn definiteness(g: &Matrix) -> Definiteness {
    let n = g.rows();
    let mut s = g.to_rows();
    let mut pivots = Vec::with_capacity(n);
    let mut nullity = 0;
    for k in 0..n {
        let p = s[k][k].clone();
        if p.is_negative() {
            return Definiteness::Indefinite { index: k, pivot: p };
        }
        if p.is_zero() {
            if (k + 1..n).any(|j| !s[k][j].is_zero()) {
                return Definiteness::Indefinite { index: k, pivot: p };
            }
            nullity += 1;
            continue;
        }
        for i in k + 1..n {
            if s[i][k].is_zero() {
                continue;
            }
            let f = &s[i][k] / &p;
            for j in k + 1..n {
                if !s[k][j].is_zero() {
                    let d = &f * &s[k][j];
                    s[i][j] -= &d;
                }
            }
        }
        pivots.push(p);
    }
    if nullity > 0 {
        Definiteness::Semidefinite { nullity }
    } else {
        Definiteness::PositiveDefinite { pivots }
    }
}

/// Determinant via fraction-free elimination.
pub fn determinant(a: &[Vec<Scalar>]) -> Scalar {
    let n = a.len();
    if n == 0 {
        return Scalar::one();
    }
    let lcms: Vec<BigInt> = a
        .iter()
        .map(|row| row.iter().fold(BigInt::one(), |acc, v| acc.lcm(&v.denom())))
        .collect();
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .zip(&lcms)
        .map(|(row, l)| row.iter().map(|v| v.numer() * (l / v.denom())).collect())
        .collect();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return Scalar::zero();
        };
        if p != k {
            m.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let scale = lcms.iter().fold(BigInt::one(), |acc, l| acc * l);
    let det = Scalar::from(m[n - 1][n - 1].clone()) / Scalar::from(scale);
    if sign < 0 {
        -det
    } else {
        det
    }
}
