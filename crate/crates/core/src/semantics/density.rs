use std::fmt;

use crate::linalg::{CMatrix, Tolerance, C64, ONE, ZERO};

/// Largest wire count representable with 64-bit basis indices.
pub const MAX_WIRES: usize = 63;

/// Magnitude below which an accumulated entry is dropped.
const PRUNE: f64 = 1e-15;

/// A `2^n x 2^n` matrix over `n` wires, stored as its nonzero entries.
///
/// Basis index bit `n - 1 - w` holds wire `w`, so wire 0 is the leftmost
/// tensor factor. Denotations are linear and are applied to arbitrary
/// matrices (matrix units in particular), not only to states; the
/// Hermitian/PSD checks are diagnostics.
///
/// Entries are kept sorted by `(row, col)`, without duplicates or zeros.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix {
    n_wires: usize,
    entries: Vec<(u64, u64, C64)>,
}

impl DensityMatrix {
    pub fn zero(n_wires: usize) -> Self {
        assert!(n_wires <= MAX_WIRES, "at most {MAX_WIRES} wires");
        DensityMatrix {
            n_wires,
            entries: Vec::new(),
        }
    }

    /// `|i><j|`.
    pub fn matrix_unit(n_wires: usize, row: u64, col: u64) -> Self {
        let mut m = Self::zero(n_wires);
        assert!(row < m.dim() && col < m.dim(), "matrix unit index out of range");
        m.entries.push((row, col, ONE));
        m
    }

    /// `|b><b|` for the basis state spelled by `bits`, first bit on wire 0.
    pub fn basis(bits: &[bool]) -> Self {
        let k = basis_index(bits);
        Self::matrix_unit(bits.len(), k, k)
    }

    pub fn from_dense(n_wires: usize, m: &CMatrix) -> Option<Self> {
        let mut out = Self::zero(n_wires);
        let d = out.dim() as usize;
        if m.dims() != (d, d) {
            return None;
        }
        for i in 0..d {
            for j in 0..d {
                let v = m[(i, j)];
                if v != ZERO {
                    out.entries.push((i as u64, j as u64, v));
                }
            }
        }
        Some(out)
    }

    /// Builds from raw entries; duplicates are summed.
    pub fn from_entries(n_wires: usize, entries: Vec<(u64, u64, C64)>) -> Self {
        let mut m = Self::zero(n_wires);
        assert!(
            entries.iter().all(|&(r, c, _)| r < m.dim() && c < m.dim()),
            "entry out of range"
        );
        m.entries = entries;
        m.normalize();
        m
    }

    pub fn to_dense(&self) -> CMatrix {
        let d = self.dim() as usize;
        let mut m = CMatrix::zeros(d, d);
        for &(r, c, v) in &self.entries {
            m[(r as usize, c as usize)] += v;
        }
        m
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn dim(&self) -> u64 {
        1u64 << self.n_wires
    }

    pub fn entries(&self) -> &[(u64, u64, C64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: u64, col: u64) -> C64 {
        self.entries
            .binary_search_by_key(&(row, col), |&(r, c, _)| (r, c))
            .map_or(ZERO, |i| self.entries[i].2)
    }

    pub fn trace(&self) -> C64 {
        self.entries.iter().filter(|e| e.0 == e.1).map(|e| e.2).sum()
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        let n = self.n_wires + other.n_wires;
        let shift = other.n_wires;
        let mut entries = Vec::with_capacity(self.entries.len() * other.entries.len());
        for &(r1, c1, v1) in &self.entries {
            for &(r2, c2, v2) in &other.entries {
                entries.push(((r1 << shift) | r2, (c1 << shift) | c2, v1 * v2));
            }
        }
        DensityMatrix::from_entries(n, entries)
    }

    pub fn scale(&self, s: C64) -> DensityMatrix {
        let entries = self.entries.iter().map(|&(r, c, v)| (r, c, v * s)).collect();
        DensityMatrix::from_entries(self.n_wires, entries)
    }

    /// Sum of two matrices over the same wires.
    pub fn add(&self, other: &DensityMatrix) -> Option<DensityMatrix> {
        (self.n_wires == other.n_wires).then(|| {
            let mut entries = self.entries.clone();
            entries.extend_from_slice(&other.entries);
            DensityMatrix::from_entries(self.n_wires, entries)
        })
    }

    /// Largest entrywise modulus of `self - other`, or `None` when the wire
    /// counts differ.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Option<f64> {
        if self.n_wires != other.n_wires {
            return None;
        }
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        let mut worst: f64 = 0.0;
        while i < a.len() || j < b.len() {
            let ka = a.get(i).map(|e| (e.0, e.1));
            let kb = b.get(j).map(|e| (e.0, e.1));
            let d = match (ka, kb) {
                (Some(x), Some(y)) if x == y => {
                    i += 1;
                    j += 1;
                    (a[i - 1].2 - b[j - 1].2).norm()
                }
                (Some(x), Some(y)) if x < y => {
                    i += 1;
                    a[i - 1].2.norm()
                }
                (Some(_), None) => {
                    i += 1;
                    a[i - 1].2.norm()
                }
                _ => {
                    j += 1;
                    b[j - 1].2.norm()
                }
            };
            worst = worst.max(d);
        }
        Some(worst)
    }

    pub fn approx_eq(&self, other: &DensityMatrix, tol: Tolerance) -> bool {
        self.max_abs_diff(other).is_some_and(|d| d <= tol.eps())
    }

    /// The bits of `|b><b|` if this is (within `tol`) exactly that.
    pub fn as_basis_state(&self, tol: Tolerance) -> Option<Vec<bool>> {
        let &(r, c, v) = self
            .entries
            .iter()
            .find(|e| e.2.norm() > tol.eps())?;
        if r != c || !tol.close(v, ONE) {
            return None;
        }
        let candidate = DensityMatrix::matrix_unit(self.n_wires, r, r);
        self.approx_eq(&candidate, tol)
            .then(|| index_bits(r, self.n_wires))
    }

    pub fn is_hermitian(&self, tol: Tolerance) -> bool {
        self.entries
            .iter()
            .all(|&(r, c, v)| tol.close(v, self.get(c, r).conj()))
    }

    /// Dense eigenvalue lower-bound check; intended for small diagnostics.
    pub fn is_psd(&self, tol: Tolerance) -> bool {
        self.to_dense().is_psd(tol)
    }

    /// Hermitian, PSD and unit trace.
    pub fn is_mixed_state(&self, tol: Tolerance) -> bool {
        tol.close(self.trace(), ONE) && self.is_psd(tol)
    }

    pub(crate) fn from_parts(n_wires: usize, entries: Vec<(u64, u64, C64)>) -> Self {
        DensityMatrix { n_wires, entries }
    }

    pub(crate) fn into_parts(self) -> (usize, Vec<(u64, u64, C64)>) {
        (self.n_wires, self.entries)
    }

    /// Sorts, merges duplicates and prunes vanishing entries.
    pub(crate) fn normalize(&mut self) {
        normalize_entries(&mut self.entries);
    }
}

pub(crate) fn normalize_entries(entries: &mut Vec<(u64, u64, C64)>) {
    if entries.len() <= 1 {
        entries.retain(|e| e.2.norm() > PRUNE);
        return;
    }
    entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
    let mut out: Vec<(u64, u64, C64)> = Vec::with_capacity(entries.len());
    for &(r, c, v) in entries.iter() {
        match out.last_mut() {
            Some(last) if last.0 == r && last.1 == c => last.2 += v,
            _ => out.push((r, c, v)),
        }
    }
    out.retain(|e| e.2.norm() > PRUNE);
    *entries = out;
}

/// Basis index of a bit string, first bit most significant.
pub fn basis_index(bits: &[bool]) -> u64 {
    assert!(bits.len() <= MAX_WIRES, "at most {MAX_WIRES} wires");
    bits.iter().fold(0, |acc, &b| (acc << 1) | u64::from(b))
}

pub fn index_bits(k: u64, n: usize) -> Vec<bool> {
    (0..n).map(|w| (k >> (n - 1 - w)) & 1 == 1).collect()
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityMatrix({} wires) {{", self.n_wires)?;
        for &(r, c, v) in &self.entries {
            write!(f, " ({r},{c}): {:+.6}{:+.6}i", v.re, v.im)?;
        }
        write!(f, " }}")
    }
}
