//! Dense complex linear algebra for small composite Hilbert spaces.
//!
//! Subsystem indices are zero-based and count from the leftmost tensor
//! factor: in `a ⊗ b ⊗ c`, subsystem 0 is `a`. Every partial trace and
//! partial transpose in the crate follows this convention.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Largest tolerated `max |A - A†|` for a matrix treated as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-9;

/// A dense complex matrix stored row-major.
///
/// States and channel outputs are square; the explicit cloning isometry is
/// the one rectangular matrix in the crate.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

pub const fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            inner: DMatrix::from_fn(rows, cols, |i, j| f(i, j)),
        }
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self::from_fn(n, m, |i, j| rows[i][j])
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { c64(diag[i], 0.0) } else { C64::default() })
    }

    /// Column vector with the given entries.
    pub fn column(entries: &[C64]) -> Self {
        Self::from_fn(entries.len(), 1, |i, _| entries[i])
    }

    /// Rank-one projector `|v⟩⟨v|` (the vector is not normalized).
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            inner: self.inner.transpose(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            inner: &self.inner * s,
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c64(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.inner.shape(), other.inner.shape(), "shape mismatch");
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A - A†|`; infinite for non-square matrices.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.dim();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        Self {
            inner: (&self.inner + &adj.inner) * c64(0.5, 0.0),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &C64> {
        self.inner.iter()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.inner[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.inner[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner * &rhs.inner,
        }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Kronecker product of a sequence of factors, left to right.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| tensor(&acc, f))
}

fn check_dims(rho: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != rho.dim() {
        return Err(Error::Dimension(format!(
            "subsystem dims {dims:?} do not multiply to matrix dim {}",
            rho.dim()
        )));
    }
    Ok(())
}

/// Row-major multi-index strides for the given subsystem dims.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Flat offsets of every multi-index over the listed subsystems, with the
/// other subsystems' digits fixed at zero. Ordered lexicographically.
fn offsets(dims: &[usize], strides: &[usize], subsystems: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &s in subsystems {
        out = out
            .iter()
            .flat_map(|&base| (0..dims[s]).map(move |d| base + d * strides[s]))
            .collect();
    }
    out
}

/// Reduced matrix on the subsystems in `keep`, which stay in their original
/// left-to-right order regardless of how `keep` is listed.
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    check_dims(rho, dims)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Dimension(format!(
            "keep set {keep:?} is not a nonempty subset of 0..{}",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let st = strides(dims);
    let kept_off = offsets(dims, &st, &kept);
    let traced_off = offsets(dims, &st, &traced);
    let n = kept_off.len();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        traced_off
            .iter()
            .map(|&t| rho[(kept_off[i] + t, kept_off[j] + t)])
            .sum()
    }))
}

/// Transposes the indices of one subsystem:
/// `ρ^{T_s}_{(..m_s..),(..n_s..)} = ρ_{(..n_s..),(..m_s..)}`.
pub fn partial_transpose(
    rho: &ComplexMatrix,
    dims: &[usize],
    subsystem: usize,
) -> Result<ComplexMatrix> {
    check_dims(rho, dims)?;
    if subsystem >= dims.len() {
        return Err(Error::Dimension(format!(
            "subsystem {subsystem} out of range for dims {dims:?}"
        )));
    }
    let stride = strides(dims)[subsystem];
    let d = dims[subsystem];
    let digit = |idx: usize| (idx / stride) % d;
    let n = rho.dim();
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        let (dr, dc) = (digit(r), digit(c));
        let r2 = r - dr * stride + dc * stride;
        let c2 = c - dc * stride + dr * stride;
        rho[(r2, c2)]
    }))
}

fn require_hermitian(a: &ComplexMatrix) -> Result<()> {
    let dev = a.hermiticity_deviation();
    if dev > HERMITICITY_TOL {
        return Err(Error::Hermiticity { deviation: dev });
    }
    Ok(())
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn herm_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    require_hermitian(a)?;
    let eig = a.hermitian_part().inner.symmetric_eigenvalues();
    let mut vals: Vec<f64> = eig.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Eigenvalues (ascending) and the matching orthonormal eigenvectors as the
/// columns of the returned matrix.
pub fn herm_eigen(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    require_hermitian(a)?;
    let eig = a.hermitian_part().inner.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = a.dim();
    let vecs = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((vals, vecs))
}

/// Squared Hilbert–Schmidt norm `Tr[A†A]`, which is `Tr[A²]` for Hermitian `A`.
pub fn hs_norm_sq(a: &ComplexMatrix) -> f64 {
    a.iter().map(C64::norm_sqr).sum()
}

pub fn determinant(a: &ComplexMatrix) -> C64 {
    assert!(a.is_square(), "determinant of a non-square matrix");
    a.inner.clone().determinant()
}

/// Determinant of the leading `k × k` principal block.
pub fn leading_minor(a: &ComplexMatrix, k: usize) -> C64 {
    assert!(k <= a.rows() && k <= a.cols());
    determinant(&ComplexMatrix::from_fn(k, k, |i, j| a[(i, j)]))
}

/// Pauli matrices and the two-dimensional identity.
pub mod pauli {
    use super::{c64, ComplexMatrix};

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn x() -> ComplexMatrix {
        let o = c64(0.0, 0.0);
        let l = c64(1.0, 0.0);
        ComplexMatrix::from_rows(&[vec![o, l], vec![l, o]])
    }

    pub fn y() -> ComplexMatrix {
        let o = c64(0.0, 0.0);
        ComplexMatrix::from_rows(&[vec![o, c64(0.0, -1.0)], vec![c64(0.0, 1.0), o]])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    /// `σ_u` for `u ∈ {0, 1, 2}` = x, y, z.
    pub fn sigma(u: usize) -> ComplexMatrix {
        match u {
            0 => x(),
            1 => y(),
            2 => z(),
            _ => panic!("Pauli index {u} out of range"),
        }
    }
}
