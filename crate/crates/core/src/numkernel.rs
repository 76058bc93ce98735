//! Dense complex linear algebra used by every other module.
//!
//! Matrices are small (at most a few hundred rows at desk scale), so
//! everything is dense and double precision. Eigen and singular value
//! decompositions are delegated to `faer`; this module owns the
//! tolerance policy and the contract checks around them.

use std::ops::{Index, IndexMut};

use faer::Mat;
use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = Complex64::new(0.0, 0.0);
pub const ONE: C64 = Complex64::new(1.0, 0.0);
pub const I: C64 = Complex64::new(0.0, 1.0);

/// Relative Hermitian defect admitted by [`hermitian_eigen`].
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (relative defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("non-finite entry in matrix or vector")]
    NonFinite,
    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: String, actual: String },
    #[error("system is singular to tolerance (sigma_min/sigma_max = {ratio:.3e})")]
    SingularSystem { ratio: f64 },
    #[error("matrix is not positive definite (lambda_min = {lambda_min:.3e})")]
    NotPositiveDefinite { lambda_min: f64 },
    #[error("decomposition did not converge")]
    NoConvergence,
}

/// Dense complex matrix stored in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries; rejects NaN/Inf.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, NumError> {
        if data.len() != rows * cols {
            return Err(NumError::ShapeMismatch {
                expected: format!("{} entries", rows * cols),
                actual: format!("{} entries", data.len()),
            });
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(NumError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self, NumError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(NumError::ShapeMismatch {
                    expected: format!("rows of length {c}"),
                    actual: format!("row of length {}", row.len()),
                });
            }
            data.extend(row.iter().map(|&x| C64::new(x, 0.0)));
        }
        Self::from_row_major(r, c, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, &z) in col.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        m
    }

    /// Horizontal concatenation; all blocks must share the row count.
    pub fn hstack(rows: usize, blocks: &[CMatrix]) -> Self {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            for i in 0..rows {
                for j in 0..b.cols {
                    m[(i, offset + j)] = b[(i, j)];
                }
            }
            offset += b.cols;
        }
        m
    }

    /// Block-diagonal matrix.
    pub fn block_diag(blocks: &[CMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(ro + i, co + j)] = b[(i, j)];
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        m
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self, range: std::ops::Range<usize>) -> CMatrix {
        CMatrix::from_fn(self.rows, range.len(), |i, j| self[(i, range.start + j)])
    }

    pub fn rows_range(&self, range: std::ops::Range<usize>) -> CMatrix {
        CMatrix::from_fn(range.len(), self.cols, |i, j| self[(range.start + i, j)])
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[l * other.cols..(l + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        singular_values(self).first().copied().unwrap_or(0.0)
    }

    /// `‖M − M*‖_F / ‖M‖_F` (zero for the zero matrix).
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        self.sub(&self.adjoint()).frobenius_norm() / norm
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> CMatrix {
        self.add(&self.adjoint()).scale(C64::new(0.5, 0.0))
    }

    fn to_faer(&self) -> Mat<C64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    fn from_faer(m: faer::MatRef<'_, C64>) -> CMatrix {
        CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `Σ conj(a_i) b_i`.
pub fn vec_dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Relative rank/positivity threshold.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum TolPolicy {
    /// `τ = 1e-10 · max(rows, cols)`.
    #[default]
    Default,
    Relative(f64),
}

impl TolPolicy {
    pub fn tau(self, rows: usize, cols: usize) -> f64 {
        match self {
            TolPolicy::Default => 1e-10 * rows.max(cols).max(1) as f64,
            TolPolicy::Relative(t) => t,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unitary; column `j` belongs to `values[j]`.
    pub vectors: CMatrix,
}

/// Eigendecomposition `M = U diag(λ) U*` of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen, NumError> {
    if !m.is_square() {
        return Err(NumError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if !m.is_finite() {
        return Err(NumError::NonFinite);
    }
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(NumError::NotHermitian { defect });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(HermitianEigen {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let eig = m
        .hermitian_part()
        .to_faer()
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| NumError::NoConvergence)?;
    let raw: Vec<f64> = (0..n).map(|j| eig.S()[j].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));
    let values = order.iter().map(|&j| raw[j]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.U()[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

struct Svd {
    sigma: Vec<f64>,
    u: CMatrix,
    v: CMatrix,
}

/// Full SVD `M = U Σ V*`.
fn svd(m: &CMatrix) -> Result<Svd, NumError> {
    let f = m.to_faer().svd().map_err(|_| NumError::NoConvergence)?;
    Ok(Svd {
        sigma: (0..m.rows.min(m.cols)).map(|i| f.S()[i].re).collect(),
        u: CMatrix::from_faer(f.U()),
        v: CMatrix::from_faer(f.V()),
    })
}

/// Singular values, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.rows == 0 || m.cols == 0 {
        return vec![];
    }
    let mut s = svd(m)
        .map(|x| x.sigma)
        .unwrap_or_else(|_| vec![f64::NAN; m.rows.min(m.cols)]);
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Rank with singular values above `τ · σ_max`.
pub fn numerical_rank(m: &CMatrix, tol: TolPolicy) -> usize {
    let s = singular_values(m);
    let Some(&smax) = s.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    let thresh = tol.tau(m.rows, m.cols) * smax;
    s.iter().filter(|&&x| x > thresh).count()
}

/// Orthonormal basis (as columns) of the numerical kernel of `m`.
///
/// Kernel vectors are the right singular vectors with `σ ≤ τ·‖M‖₂`. Wide
/// matrices are padded with zero rows so the full right basis is available.
pub fn nullspace(m: &CMatrix, tol: TolPolicy) -> Result<CMatrix, NumError> {
    if !m.is_finite() {
        return Err(NumError::NonFinite);
    }
    let (rows, cols) = (m.rows, m.cols);
    if cols == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    if rows == 0 {
        return Ok(CMatrix::identity(cols));
    }
    let padded = if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.data[..rows * cols].copy_from_slice(&m.data);
        p
    } else {
        m.clone()
    };
    let Svd { sigma, v, .. } = svd(&padded)?;
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    let thresh = tol.tau(rows, cols) * smax;
    let kernel: Vec<Vec<C64>> = sigma
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax == 0.0 || s <= thresh)
        .map(|(i, _)| v.column(i))
        .collect();
    Ok(CMatrix::from_columns(cols, &kernel))
}

/// Solves `M x = b` for square, numerically invertible `M`.
pub fn solve(m: &CMatrix, b: &[C64]) -> Result<Vec<C64>, NumError> {
    let rhs = CMatrix::from_columns(b.len(), &[b.to_vec()]);
    Ok(solve_many(m, &rhs)?.column(0))
}

/// Solves `M X = B` column by column via the SVD of `M`.
pub fn solve_many(m: &CMatrix, b: &CMatrix) -> Result<CMatrix, NumError> {
    solve_many_with(m, b, TolPolicy::Default)
}

/// [`solve_many`] with an explicit singularity threshold.
pub fn solve_many_with(m: &CMatrix, b: &CMatrix, tol: TolPolicy) -> Result<CMatrix, NumError> {
    if !m.is_square() {
        return Err(NumError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if b.rows != m.rows {
        return Err(NumError::ShapeMismatch {
            expected: format!("{} rows", m.rows),
            actual: format!("{} rows", b.rows),
        });
    }
    if !m.is_finite() || !b.is_finite() {
        return Err(NumError::NonFinite);
    }
    let n = m.rows;
    if n == 0 {
        return Ok(CMatrix::zeros(0, b.cols));
    }
    let Svd { sigma, u, v } = svd(m)?;
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    let smin = sigma.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = if smax == 0.0 { 0.0 } else { smin / smax };
    if ratio <= tol.tau(n, n) {
        return Err(NumError::SingularSystem { ratio });
    }
    let mut y = u.adjoint().matmul(b);
    for (i, s) in sigma.iter().enumerate() {
        for j in 0..y.cols {
            y[(i, j)] /= s;
        }
    }
    Ok(v.matmul(&y))
}

/// Inverse square root factor `W` with `W* B W = I` for Hermitian positive definite `B`.
pub fn inverse_sqrt_factor(b: &CMatrix) -> Result<CMatrix, NumError> {
    let eig = hermitian_eigen(b)?;
    let scale = eig.values.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
    let lambda_min = eig.values.first().copied().unwrap_or(1.0);
    if (lambda_min <= TolPolicy::Default.tau(b.rows, b.cols) * scale || lambda_min <= 0.0) && b.rows > 0 {
        return Err(NumError::NotPositiveDefinite { lambda_min });
    }
    let n = b.rows;
    Ok(CMatrix::from_fn(n, n, |i, j| {
        eig.vectors[(i, j)] / eig.values[j].sqrt()
    }))
}

/// Extreme values `(min, max)` of the Rayleigh quotient `x*Ax / x*Bx`
/// for Hermitian `A` and Hermitian positive definite `B`.
pub fn generalized_eigen_range(a: &CMatrix, b: &CMatrix) -> Result<(f64, f64), NumError> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(NumError::ShapeMismatch {
            expected: format!("{}x{}", b.rows, b.cols),
            actual: format!("{}x{}", a.rows, a.cols),
        });
    }
    let w = inverse_sqrt_factor(b)?;
    let c = w.adjoint().matmul(a).matmul(&w).hermitian_part();
    let eig = hermitian_eigen(&c)?;
    match (eig.values.first(), eig.values.last()) {
        (Some(&lo), Some(&hi)) => Ok((lo, hi)),
        _ => Ok((0.0, 0.0)),
    }
}

/// Unitary factor `Q` of a QR factorization of a square matrix.
pub fn qr_unitary(m: &CMatrix) -> Result<CMatrix, NumError> {
    if !m.is_square() {
        return Err(NumError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if !m.is_finite() {
        return Err(NumError::NonFinite);
    }
    Ok(CMatrix::from_faer(m.to_faer().qr().compute_Q().as_ref()))
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(m: &CMatrix) -> C64 {
    assert!(m.is_square(), "det of non-square matrix");
    let n = m.rows;
    let mut a = m.clone();
    let mut d = ONE;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[(x, col)].norm().total_cmp(&a[(y, col)].norm()))
            .expect("non-empty range");
        if a[(pivot, col)] == ZERO {
            return ZERO;
        }
        if pivot != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(pivot, j)];
                a[(pivot, j)] = tmp;
            }
            d = -d;
        }
        let p = a[(col, col)];
        d *= p;
        for row in col + 1..n {
            let f = a[(row, col)] / p;
            if f == ZERO {
                continue;
            }
            for j in col..n {
                let v = a[(col, j)];
                a[(row, j)] -= f * v;
            }
        }
    }
    d
}
