//! Small dense complex linear algebra.
//!
//! Everything here operates on matrices of dimension at most a few dozen
//! (4×4 operators, 8×8 interface systems, 32-column least-squares problems),
//! so the algorithms are the textbook ones: partial-pivot elimination for
//! solves, full-pivot elimination for null spaces, Householder QR with
//! column pivoting for real least squares.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use thiserror::Error;

pub use num_complex::Complex64 as Complex;

/// Relative pivot threshold below which `solve_linear` declares a system singular.
pub const SINGULAR_PIVOT_RTOL: f64 = 1e-14;

/// Shorthand constructor.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("dimension mismatch: {op} of {lhs:?} and {rhs:?}")]
    DimensionMismatch {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("numerically singular system: pivot {pivot:.3e} at column {column} (threshold {threshold:.3e})")]
    Singular {
        column: usize,
        pivot: f64,
        threshold: f64,
    },
    #[error("least squares needs rows >= cols, got {rows}x{cols}")]
    Underdetermined { rows: usize, cols: usize },
    #[error("non-finite entry encountered")]
    NonFinite,
}

/// Dense complex vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector(pub Vec<Complex>);

impl ComplexVector {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![Complex::new(0.0, 0.0); dim])
    }

    pub fn from_slice(entries: &[Complex]) -> Self {
        Self(entries.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.0
    }

    /// Hermitian inner product `⟨self, other⟩ = Σ conj(self_i) other_i`.
    pub fn dot(&self, other: &Self) -> Complex {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self(self.0.iter().map(|z| z * s).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Max-abs difference between two vectors of equal length.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex;
    fn index(&self, i: usize) -> &Complex {
        &self.0[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex {
        &mut self.0[i]
    }
}

impl Sub for &ComplexVector {
    type Output = ComplexVector;
    fn sub(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        ComplexVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| {
            if r == c {
                Complex::new(1.0, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.data[r * cols + c] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from equally sized rows.
    pub fn from_rows<R: AsRef<[Complex]>>(rows: &[R]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        assert!(
            rows.iter().all(|r| r.as_ref().len() == n_cols),
            "ragged rows"
        );
        Self::from_fn(n_rows, n_cols, |r, c| rows[r].as_ref()[c])
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[ComplexVector]) -> Self {
        let rows = columns.first().map(|v| v.dim()).unwrap_or(0);
        assert!(columns.iter().all(|v| v.dim() == rows), "ragged columns");
        Self::from_fn(rows, columns.len(), |r, c| columns[c][r])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex] {
        &self.data
    }

    pub fn column(&self, c: usize) -> ComplexVector {
        ComplexVector((0..self.rows).map(|r| self[(r, c)]).collect())
    }

    pub fn set_column(&mut self, c: usize, v: &ComplexVector) {
        assert_eq!(v.dim(), self.rows);
        for r in 0..self.rows {
            self[(r, c)] = v[r];
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> Result<ComplexVector, NumericsError> {
        if self.cols != v.dim() {
            return Err(NumericsError::DimensionMismatch {
                op: "matrix-vector product",
                lhs: (self.rows, self.cols),
                rhs: (v.dim(), 1),
            });
        }
        Ok(ComplexVector(
            (0..self.rows)
                .map(|r| (0..self.cols).map(|c| self[(r, c)] * v[c]).sum())
                .collect(),
        ))
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Determinant by partial-pivot LU.
    pub fn determinant(&self) -> Result<Complex, NumericsError> {
        if !self.is_square() {
            return Err(NumericsError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Complex::new(1.0, 0.0);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
                .unwrap();
            if a[(p, k)].norm() == 0.0 {
                return Ok(Complex::new(0.0, 0.0));
            }
            if p != k {
                a.swap_rows(p, k);
                det = -det;
            }
            let pivot = a[(k, k)];
            det *= pivot;
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                for j in k..n {
                    let t = a[(k, j)];
                    a[(i, j)] -= f * t;
                }
            }
        }
        Ok(det)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;
    fn index(&self, (r, c): (usize, usize)) -> &Complex {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Matrix product with dimension checking.
pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
    if a.cols != b.rows {
        return Err(NumericsError::DimensionMismatch {
            op: "matrix product",
            lhs: (a.rows, a.cols),
            rhs: (b.rows, b.cols),
        });
    }
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    for r in 0..a.rows {
        for k in 0..a.cols {
            let x = a[(r, k)];
            if x == Complex::new(0.0, 0.0) {
                continue;
            }
            for c in 0..b.cols {
                out.data[r * b.cols + c] += x * b[(k, c)];
            }
        }
    }
    Ok(out)
}

/// Conjugate transpose.
pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    /// Panics on dimension mismatch; use [`mat_mul`] for a checked product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        mat_mul(self, rhs).expect("matrix product dimension mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// Solves `M x = b` by Gaussian elimination with partial pivoting.
///
/// A pivot of modulus below `1e-14·‖M‖∞` is reported as singular.
pub fn solve_linear(m: &ComplexMatrix, b: &ComplexVector) -> Result<ComplexVector, NumericsError> {
    if !m.is_square() {
        return Err(NumericsError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if m.rows != b.dim() {
        return Err(NumericsError::DimensionMismatch {
            op: "linear solve",
            lhs: (m.rows, m.cols),
            rhs: (b.dim(), 1),
        });
    }
    if !m.is_finite() || !b.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    let n = m.rows;
    let threshold = SINGULAR_PIVOT_RTOL * m.norm_inf();
    let mut a = m.clone();
    let mut x = b.clone();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
            .unwrap();
        let pivot_abs = a[(p, k)].norm();
        if pivot_abs <= threshold || pivot_abs == 0.0 {
            return Err(NumericsError::Singular {
                column: k,
                pivot: pivot_abs,
                threshold,
            });
        }
        a.swap_rows(p, k);
        x.0.swap(p, k);
        let pivot = a[(k, k)];
        for i in k + 1..n {
            let f = a[(i, k)] / pivot;
            if f == Complex::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                let t = a[(k, j)];
                a[(i, j)] -= f * t;
            }
            a[(i, k)] = Complex::new(0.0, 0.0);
            let t = x[k];
            x[i] -= f * t;
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in k + 1..n {
            s -= a[(k, j)] * x[j];
        }
        x[k] = s / a[(k, k)];
    }
    Ok(x)
}

/// Orthonormal basis of the numerical null space of a square matrix.
///
/// Row reduction with full pivoting; a remaining pivot of modulus at most
/// `tol·max|M_ij|` ends the elimination and the trailing columns become free
/// variables. The resulting vectors are orthonormalised (two passes of
/// modified Gram–Schmidt).
pub fn null_space(m: &ComplexMatrix, tol: f64) -> Vec<ComplexVector> {
    assert!(m.is_square(), "null_space expects a square matrix");
    let n = m.rows;
    let scale = m.max_abs();
    if scale == 0.0 {
        return (0..n)
            .map(|i| {
                let mut v = ComplexVector::zeros(n);
                v[i] = Complex::new(1.0, 0.0);
                v
            })
            .collect();
    }
    let mut a = m.clone();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    for k in 0..n {
        let mut best = (k, k, 0.0);
        for i in k..n {
            for j in k..n {
                let v = a[(i, j)].norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= tol * scale {
            break;
        }
        a.swap_rows(k, best.0);
        if best.1 != k {
            for r in 0..n {
                a.data.swap(r * n + k, r * n + best.1);
            }
            col_perm.swap(k, best.1);
        }
        let pivot = a[(k, k)];
        for j in k..n {
            a[(k, j)] /= pivot;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = a[(i, k)];
            if f == Complex::new(0.0, 0.0) {
                continue;
            }
            for j in k..n {
                let t = a[(k, j)];
                a[(i, j)] -= f * t;
            }
        }
        rank += 1;
    }
    // Reduced form: [I R; 0 0] in permuted columns. Free variables are columns rank..n.
    let mut basis = Vec::with_capacity(n - rank);
    for free in rank..n {
        let mut y = ComplexVector::zeros(n);
        y[free] = Complex::new(1.0, 0.0);
        for piv in 0..rank {
            y[piv] = -a[(piv, free)];
        }
        let mut x = ComplexVector::zeros(n);
        for (k, &orig) in col_perm.iter().enumerate() {
            x[orig] = y[k];
        }
        basis.push(x);
    }
    orthonormalize(basis)
}

fn orthonormalize(mut vs: Vec<ComplexVector>) -> Vec<ComplexVector> {
    for i in 0..vs.len() {
        for _pass in 0..2 {
            for j in 0..i {
                let proj = vs[j].dot(&vs[i]);
                let (head, tail) = vs.split_at_mut(i);
                for (t, h) in tail[0].0.iter_mut().zip(&head[j].0) {
                    *t -= proj * h;
                }
            }
        }
        let norm = vs[i].norm2();
        vs[i] = vs[i].scale(Complex::new(1.0 / norm, 0.0));
    }
    vs
}

/// Dense row-major real matrix (used by the least-squares solver).
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.data[r * cols + c] = f(r, c);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)] * x[c]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Result of [`least_squares`].
#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub solution: Vec<f64>,
    /// `‖Mx − b‖₂` at the returned solution.
    pub residual: f64,
    pub rank: usize,
    /// Set when the numerical rank is below the column count; the solution is
    /// then the minimum-norm minimiser.
    pub rank_deficient: bool,
}

/// Relative tolerance on |R_kk| / |R_00| for the QR rank decision.
pub const LSQ_RANK_RTOL: f64 = 1e-11;

/// Householder QR factorisation `A P = Q R` (thin Q).
struct Qr {
    q: RealMatrix,
    r: RealMatrix,
    perm: Vec<usize>,
}

fn householder_qr(a: &RealMatrix, pivot: bool) -> Qr {
    let (m, n) = (a.rows, a.cols);
    let k_max = m.min(n);
    let mut r = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(k_max);
    for k in 0..k_max {
        if pivot {
            let norms: Vec<f64> = (k..n)
                .map(|j| (k..m).map(|i| r[(i, j)] * r[(i, j)]).sum::<f64>())
                .collect();
            let (off, _) = norms
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap();
            let j = k + off;
            if j != k {
                for i in 0..m {
                    r.data.swap(i * n + k, i * n + j);
                }
                perm.swap(k, j);
            }
        }
        let alpha_norm = (k..m).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
        let mut v: Vec<f64> = vec![0.0; m];
        if alpha_norm == 0.0 {
            reflectors.push(v);
            continue;
        }
        let alpha = if r[(k, k)] >= 0.0 {
            -alpha_norm
        } else {
            alpha_norm
        };
        for i in k..m {
            v[i] = r[(i, k)];
        }
        v[k] -= alpha;
        let vnorm2: f64 = v[k..].iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for j in k..n {
                let s: f64 = (k..m).map(|i| v[i] * r[(i, j)]).sum::<f64>() * 2.0 / vnorm2;
                for i in k..m {
                    r[(i, j)] -= s * v[i];
                }
            }
            for x in v.iter_mut() {
                *x /= vnorm2.sqrt();
            }
        }
        reflectors.push(v);
    }
    // Thin Q = H_0 H_1 ... H_{k-1} applied to the first k unit columns.
    let mut q = RealMatrix::from_fn(m, k_max, |i, j| if i == j { 1.0 } else { 0.0 });
    for (k, v) in reflectors.iter().enumerate().rev() {
        for j in 0..k_max {
            let s: f64 = (k..m).map(|i| v[i] * q[(i, j)]).sum::<f64>() * 2.0;
            for i in k..m {
                q[(i, j)] -= s * v[i];
            }
        }
    }
    let r_thin = RealMatrix::from_fn(k_max, n, |i, j| if j >= i { r[(i, j)] } else { 0.0 });
    Qr { q, r: r_thin, perm }
}

fn back_substitute_upper(r: &RealMatrix, rank: usize, rhs: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; rank];
    for k in (0..rank).rev() {
        let mut s = rhs[k];
        for j in k + 1..rank {
            s -= r[(k, j)] * x[j];
        }
        x[k] = s / r[(k, k)];
    }
    x
}

/// Real linear least squares `min ‖Mx − b‖₂`.
///
/// Householder QR with column pivoting; when the numerical rank `r` is below
/// the column count the minimum-norm solution is obtained from a second QR of
/// the leading `r` rows of `R` (complete orthogonal decomposition).
pub fn least_squares(m: &RealMatrix, b: &[f64]) -> Result<LeastSquares, NumericsError> {
    if m.rows < m.cols {
        return Err(NumericsError::Underdetermined {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if b.len() != m.rows {
        return Err(NumericsError::DimensionMismatch {
            op: "least squares",
            lhs: (m.rows, m.cols),
            rhs: (b.len(), 1),
        });
    }
    if m.data.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(NumericsError::NonFinite);
    }
    let n = m.cols;
    let qr = householder_qr(m, true);
    let r00 = qr.r[(0, 0)].abs();
    let rank = if r00 == 0.0 {
        0
    } else {
        (0..n)
            .take_while(|&k| qr.r[(k, k)].abs() > LSQ_RANK_RTOL * r00)
            .count()
    };
    let qtb: Vec<f64> = (0..n)
        .map(|j| (0..m.rows).map(|i| qr.q[(i, j)] * b[i]).sum())
        .collect();

    let z: Vec<f64> = if rank == n {
        back_substitute_upper(&qr.r, n, &qtb)
    } else if rank == 0 {
        vec![0.0; n]
    } else {
        // S = R[0..rank, :] (rank × n); minimum-norm z solves S z = c.
        // Sᵀ = Q₂ R₂ ⇒ z = Q₂ R₂⁻ᵀ c.
        let st = RealMatrix::from_fn(n, rank, |i, j| qr.r[(j, i)]);
        let qr2 = householder_qr(&st, false);
        let c = &qtb[..rank];
        // Solve R₂ᵀ w = c (lower triangular).
        let mut w = vec![0.0; rank];
        for k in 0..rank {
            let mut s = c[k];
            for j in 0..k {
                s -= qr2.r[(j, k)] * w[j];
            }
            w[k] = s / qr2.r[(k, k)];
        }
        (0..n)
            .map(|i| (0..rank).map(|j| qr2.q[(i, j)] * w[j]).sum())
            .collect()
    };
    let mut solution = vec![0.0; n];
    for (k, &orig) in qr.perm.iter().enumerate() {
        solution[orig] = z[k];
    }
    let fitted = m.mul_vec(&solution);
    let residual = fitted
        .iter()
        .zip(b)
        .map(|(f, bb)| (f - bb).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(LeastSquares {
        solution,
        residual,
        rank,
        rank_deficient: rank < n,
    })
}
