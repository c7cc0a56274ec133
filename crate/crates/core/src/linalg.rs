//! Small dense complex matrices.
//!
//! Everything here is plain value arithmetic on row-major `Complex64`
//! storage. Sizes in this crate stay small (superoperators over a handful of
//! wires), so there is no attempt at blocking or sparsity.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul};

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Absolute entrywise tolerance used for every approximate comparison.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT_EPS: f64 = 1e-9;

    /// Returns `None` for negative or NaN input.
    pub fn new(eps: f64) -> Option<Self> {
        (eps >= 0.0).then_some(Self(eps))
    }

    pub fn eps(self) -> f64 {
        self.0
    }

    /// Reads `ANCILLARY_TOL` if set and parseable, otherwise the default.
    pub fn from_env() -> Self {
        std::env::var("ANCILLARY_TOL")
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .and_then(Self::new)
            .unwrap_or_default()
    }

    pub fn close(self, a: C64, b: C64) -> bool {
        (a - b).norm() <= self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self(Self::DEFAULT_EPS)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {op} of {lhs:?} and {rhs:?}")]
    DimensionMismatch {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },
    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    Empty { rows: usize, cols: usize },
    #[error("expected {expected} entries, got {got}")]
    BadLength { expected: usize, got: usize },
}

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
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

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::Empty { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(LinalgError::BadLength {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row slices. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::from_vec(r, c, data).expect("non-empty rows")
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Column vector `v` as an `n x 1` matrix.
    pub fn column(v: &[C64]) -> Self {
        Self::from_vec(v.len(), 1, v.to_vec()).expect("non-empty column")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "matmul",
                lhs: self.dims(),
                rhs: other.dims(),
            });
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = CMatrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Result<C64, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                op: "trace",
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix, LinalgError> {
        if self.dims() != other.dims() {
            return Err(LinalgError::DimensionMismatch {
                op: "add",
                lhs: self.dims(),
                rhs: other.dims(),
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> Result<f64, LinalgError> {
        if self.dims() != other.dims() {
            return Err(LinalgError::DimensionMismatch {
                op: "compare",
                lhs: self.dims(),
                rhs: other.dims(),
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Entrywise max-norm comparison. Mismatched dimensions compare unequal.
    pub fn approx_eq(&self, other: &CMatrix, tol: Tolerance) -> bool {
        self.max_abs_diff(other).is_ok_and(|d| d <= tol.eps())
    }

    pub fn is_hermitian(&self, tol: Tolerance) -> bool {
        self.is_square() && self.approx_eq(&self.adjoint(), tol)
    }

    /// True when `self + eps*I` admits a Cholesky factorisation, i.e. every
    /// eigenvalue is at least `-eps`. Assumes (and checks) Hermiticity.
    pub fn is_psd(&self, tol: Tolerance) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        let n = self.rows;
        let eps = tol.eps();
        let mut l = vec![ZERO; n * n];
        for j in 0..n {
            let mut d = self[(j, j)].re + eps;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if d < 0.0 {
                return false;
            }
            let d = d.sqrt();
            l[j * n + j] = C64::new(d, 0.0);
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = if d > 0.0 {
                    s / d
                } else if s.norm() <= eps {
                    ZERO
                } else {
                    return false;
                };
            }
        }
        true
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    /// Panics on dimension mismatch; use [`CMatrix::matmul`] for a checked product.
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matmul dimension mismatch")
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix::add(self, rhs).expect("add dimension mismatch")
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let v = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Standard single- and multi-qubit gate matrices.
pub mod gates {
    use super::{CMatrix, C64};

    pub fn x() -> CMatrix {
        CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    pub fn h() -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        CMatrix::from_real_rows(&[&[s, s], &[s, -s]])
    }

    /// Control on the first qubit, target on the second.
    pub fn cnot() -> CMatrix {
        permutation(4, |i| if i & 0b10 != 0 { i ^ 0b01 } else { i })
    }

    /// Controls on the first two qubits, target on the third.
    pub fn toffoli() -> CMatrix {
        permutation(8, |i| if i & 0b110 == 0b110 { i ^ 0b001 } else { i })
    }

    /// `|0><0|` or `|1><1|`.
    pub fn projector(b: bool) -> CMatrix {
        let mut m = CMatrix::zeros(2, 2);
        let k = usize::from(b);
        m[(k, k)] = C64::new(1.0, 0.0);
        m
    }

    /// Ket `|b>` as a 2x1 column.
    pub fn ket(b: bool) -> CMatrix {
        let mut m = CMatrix::zeros(2, 1);
        m[(usize::from(b), 0)] = C64::new(1.0, 0.0);
        m
    }

    /// Matrix sending basis vector `i` to `p(i)`.
    pub fn permutation(dim: usize, p: impl Fn(usize) -> usize) -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            m[(p(i), i)] = C64::new(1.0, 0.0);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::gates::*;
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn identity_products() {
        let i2 = CMatrix::identity(2);
        assert_eq!(&i2 * &i2, i2);
        assert_eq!(&x() * &x(), i2);
    }

    #[test]
    fn conjugating_projector_by_not() {
        // X |0><0| X^dag = |1><1|
        let out = &(&x() * &projector(false)) * &x().adjoint();
        assert_eq!(out, CMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]));
    }

    #[test]
    fn matmul_dimension_mismatch() {
        let a = CMatrix::zeros(2, 3);
        let b = CMatrix::zeros(2, 3);
        assert!(matches!(
            a.matmul(&b),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kron_cases() {
        assert_eq!(CMatrix::identity(2).kron(&CMatrix::identity(2)), CMatrix::identity(4));
        let p = projector(false).kron(&projector(true));
        let want = CMatrix::diag(&[ZERO, ONE, ZERO, ZERO]);
        assert_eq!(p, want);
        let unit = CMatrix::identity(1);
        assert_eq!(h().kron(&unit), h());
        assert_eq!(unit.kron(&h()), h());
    }

    #[test]
    fn trace_and_adjoint() {
        assert_eq!(CMatrix::identity(4).trace().unwrap(), C64::new(4.0, 0.0));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = CMatrix::column(&[C64::new(s, 0.0), C64::new(s, 0.0)]);
        let rho = &plus * &plus.adjoint();
        assert!(tol().close(rho.trace().unwrap(), ONE));
        assert!(CMatrix::zeros(2, 3).trace().is_err());
        let a = CMatrix::from_vec(
            2,
            2,
            vec![C64::new(1.0, 2.0), C64::new(-3.0, 0.5), C64::new(0.0, 1.0), C64::new(4.0, -4.0)],
        )
        .unwrap();
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn psd_checks() {
        assert!(projector(true).is_psd(tol()));
        assert!(CMatrix::identity(4).scale(C64::new(0.25, 0.0)).is_psd(tol()));
        assert!(!z().is_psd(tol()));
        // Hermitian, rank one, with complex off-diagonals.
        let v = CMatrix::column(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        assert!((&v * &v.adjoint()).is_psd(tol()));
    }

    #[test]
    fn tolerance_rejects_negative() {
        assert!(Tolerance::new(-1.0).is_none());
        assert!(Tolerance::new(f64::NAN).is_none());
        assert_eq!(Tolerance::default().eps(), 1e-9);
    }

    #[test]
    fn from_vec_validates() {
        assert!(matches!(CMatrix::from_vec(0, 2, vec![]), Err(LinalgError::Empty { .. })));
        assert!(matches!(
            CMatrix::from_vec(2, 2, vec![ONE]),
            Err(LinalgError::BadLength { .. })
        ));
    }
}
