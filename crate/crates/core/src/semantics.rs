//! Safe and unsafe denotations of circuits as linear maps on density
//! matrices.
//!
//! Both semantics agree on every gate except `assert`: the safe semantics
//! measures and discards (`<0|ρ|0> + <1|ρ|1>`), the unsafe semantics keeps
//! only the asserted branch (`<b|ρ|b>`). Gates act on their wires directly
//! through index arithmetic, so no identity padding is ever materialised.

use std::fmt;

use thiserror::Error;

use crate::bexp::{UnboundVariable, Valuation, VarContext};
use crate::circuit::{Circuit, Gate, UnitaryKind};
use crate::linalg::{CMatrix, Tolerance, C64};

mod density;

pub use density::{basis_index, index_bits, DensityMatrix, MAX_WIRES};

use density::normalize_entries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SemanticsMode {
    Safe,
    Unsafe,
}

impl SemanticsMode {
    pub const BOTH: [SemanticsMode; 2] = [SemanticsMode::Safe, SemanticsMode::Unsafe];
}

impl fmt::Display for SemanticsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SemanticsMode::Safe => "safe",
            SemanticsMode::Unsafe => "unsafe",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("input has {got} wires but the circuit expects {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("circuit reaches {0} wires, more than the supported {MAX_WIRES}")]
    TooWide(usize),
    #[error("gate {index} ({gate}) is not classical")]
    NonClassical { index: usize, gate: String },
    #[error("superoperator over {0} wires is too large to materialise (limit {MAX_SUPEROPERATOR_WIRES})")]
    SuperoperatorTooLarge(usize),
}

/// Denotation of `c` applied to `rho`.
pub fn denote(c: &Circuit, rho: &DensityMatrix, mode: SemanticsMode) -> Result<DensityMatrix, SemanticsError> {
    if rho.n_wires() != c.in_width() {
        return Err(SemanticsError::WidthMismatch {
            expected: c.in_width(),
            got: rho.n_wires(),
        });
    }
    let peak = c.peak_width();
    if peak > MAX_WIRES {
        return Err(SemanticsError::TooWide(peak));
    }
    let (mut n, mut entries) = rho.clone().into_parts();
    for g in c.gates() {
        apply_gate(g, &mut n, &mut entries, mode);
    }
    normalize_entries(&mut entries);
    Ok(DensityMatrix::from_parts(n, entries))
}

#[inline]
fn bit(idx: u64, n: usize, w: usize) -> bool {
    (idx >> (n - 1 - w)) & 1 == 1
}

/// Index on `n + 1` wires with `b` inserted so it lands on wire `i`.
#[inline]
fn insert_bit(idx: u64, n: usize, i: usize, b: bool) -> u64 {
    let low = n - i;
    let mask = (1u64 << low) - 1;
    ((idx & !mask) << 1) | (u64::from(b) << low) | (idx & mask)
}

/// Index on `n - 1` wires with wire `w` removed.
#[inline]
fn remove_bit(idx: u64, n: usize, w: usize) -> u64 {
    let low = n - 1 - w;
    let mask = (1u64 << low) - 1;
    ((idx >> (low + 1)) << low) | (idx & mask)
}

fn apply_gate(g: &Gate, n: &mut usize, es: &mut Vec<(u64, u64, C64)>, mode: SemanticsMode) {
    let width = *n;
    let m = |w: usize| 1u64 << (width - 1 - w);
    match g {
        Gate::Unitary { kind, wires } => match kind {
            UnitaryKind::X | UnitaryKind::Cnot | UnitaryKind::Toffoli => {
                let (controls, target) = wires.split_at(wires.len() - 1);
                let cmask = controls.iter().fold(0, |acc, &w| acc | m(w));
                let tmask = m(target[0]);
                let p = |k: u64| if k & cmask == cmask { k ^ tmask } else { k };
                for e in es.iter_mut() {
                    e.0 = p(e.0);
                    e.1 = p(e.1);
                }
            }
            UnitaryKind::Z => {
                let w = wires[0];
                for e in es.iter_mut() {
                    if bit(e.0, width, w) != bit(e.1, width, w) {
                        e.2 = -e.2;
                    }
                }
            }
            UnitaryKind::H => {
                let w = wires[0];
                let mask = m(w);
                let s = std::f64::consts::FRAC_1_SQRT_2;
                // <a|H|x> = s, negated when a = x = 1.
                let h = |a: bool, x: bool| if a && x { -s } else { s };
                let mut out = Vec::with_capacity(es.len() * 4);
                for &(r, c, v) in es.iter() {
                    let (rb, cb) = (r & mask != 0, c & mask != 0);
                    for a in [false, true] {
                        for b in [false, true] {
                            let r2 = if a { r | mask } else { r & !mask };
                            let c2 = if b { c | mask } else { c & !mask };
                            out.push((r2, c2, v * (h(a, rb) * h(b, cb))));
                        }
                    }
                }
                normalize_entries(&mut out);
                *es = out;
            }
        },
        Gate::Init { value, wire } => {
            for e in es.iter_mut() {
                e.0 = insert_bit(e.0, width, *wire, *value);
                e.1 = insert_bit(e.1, width, *wire, *value);
            }
            *n += 1;
        }
        Gate::Meas { wire } => {
            es.retain(|e| bit(e.0, width, *wire) == bit(e.1, width, *wire));
        }
        Gate::Discard { wire } => trace_out(*wire, n, es),
        Gate::Assert { value, wire } => match mode {
            SemanticsMode::Safe => trace_out(*wire, n, es),
            SemanticsMode::Unsafe => {
                es.retain(|e| bit(e.0, width, *wire) == *value && bit(e.1, width, *wire) == *value);
                for e in es.iter_mut() {
                    e.0 = remove_bit(e.0, width, *wire);
                    e.1 = remove_bit(e.1, width, *wire);
                }
                *n -= 1;
            }
        },
    }
}

/// `<0|ρ|0> + <1|ρ|1>` on `wire`.
fn trace_out(wire: usize, n: &mut usize, es: &mut Vec<(u64, u64, C64)>) {
    let width = *n;
    es.retain(|e| bit(e.0, width, wire) == bit(e.1, width, wire));
    for e in es.iter_mut() {
        e.0 = remove_bit(e.0, width, wire);
        e.1 = remove_bit(e.1, width, wire);
    }
    normalize_entries(es);
    *n -= 1;
}

/// Superoperators are materialised only up to this many wires per side.
pub const MAX_SUPEROPERATOR_WIRES: usize = 5;

/// A circuit's denotation as a `4^out x 4^in` matrix acting on row-major
/// vectorised matrices: entry `(i, j)` of a `d x d` matrix sits at `i*d + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    in_wires: usize,
    out_wires: usize,
    mat: CMatrix,
}

impl Superoperator {
    pub fn identity(n: usize) -> Self {
        Superoperator {
            in_wires: n,
            out_wires: n,
            mat: CMatrix::identity(1 << (2 * n)),
        }
    }

    pub fn in_wires(&self) -> usize {
        self.in_wires
    }

    pub fn out_wires(&self) -> usize {
        self.out_wires
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn approx_eq(&self, other: &Superoperator, tol: Tolerance) -> bool {
        self.in_wires == other.in_wires && self.out_wires == other.out_wires && self.mat.approx_eq(&other.mat, tol)
    }

    /// Applies the matrix to `vec(rho)` and reshapes the result.
    pub fn apply(&self, rho: &DensityMatrix) -> Option<DensityMatrix> {
        if rho.n_wires() != self.in_wires {
            return None;
        }
        let d_in = 1u64 << self.in_wires;
        let d_out = 1usize << self.out_wires;
        let mut out = vec![C64::new(0.0, 0.0); d_out * d_out];
        for &(r, c, v) in rho.entries() {
            let col = (r * d_in + c) as usize;
            for (row, o) in out.iter_mut().enumerate() {
                *o += self.mat[(row, col)] * v;
            }
        }
        let entries = out
            .into_iter()
            .enumerate()
            .map(|(k, v)| ((k / d_out) as u64, (k % d_out) as u64, v))
            .collect();
        Some(DensityMatrix::from_entries(self.out_wires, entries))
    }

    /// Tensor product of two superoperators on disjoint wire blocks.
    pub fn tensor(&self, other: &Superoperator) -> Superoperator {
        // vec(A ⊗ B) is a permutation of vec(A) ⊗ vec(B); build it directly.
        let (ai, ao, bi, bo) = (self.in_wires, self.out_wires, other.in_wires, other.out_wires);
        let in_wires = ai + bi;
        let out_wires = ao + bo;
        let mut mat = CMatrix::zeros(1 << (2 * out_wires), 1 << (2 * in_wires));
        let split = |k: usize, wa: usize, wb: usize| {
            // Row-major vec index over (wa + wb) wires into (a-index, b-index).
            let d = 1usize << (wa + wb);
            let (r, c) = (k / d, k % d);
            let db = 1usize << wb;
            let da = 1usize << wa;
            let a = (r / db) * da + (c / db);
            let b = (r % db) * db + (c % db);
            (a, b)
        };
        for row in 0..mat.rows() {
            let (ra, rb) = split(row, ao, bo);
            for col in 0..mat.cols() {
                let (ca, cb) = split(col, ai, bi);
                mat[(row, col)] = self.mat[(ra, ca)] * other.mat[(rb, cb)];
            }
        }
        Superoperator {
            in_wires,
            out_wires,
            mat,
        }
    }
}

/// Column `r*d + c` is `vec(denote(c, |r><c|))`.
pub fn superoperator_of(c: &Circuit, mode: SemanticsMode) -> Result<Superoperator, SemanticsError> {
    let (n_in, n_out) = (c.in_width(), c.out_width());
    let too_big = n_in.max(n_out);
    if too_big > MAX_SUPEROPERATOR_WIRES {
        return Err(SemanticsError::SuperoperatorTooLarge(too_big));
    }
    let d_in = 1u64 << n_in;
    let d_out = 1u64 << n_out;
    let mut mat = CMatrix::zeros((d_out * d_out) as usize, (d_in * d_in) as usize);
    for r in 0..d_in {
        for col in 0..d_in {
            let out = denote(c, &DensityMatrix::matrix_unit(n_in, r, col), mode)?;
            let j = (r * d_in + col) as usize;
            for &(r2, c2, v) in out.entries() {
                mat[((r2 * d_out + c2) as usize, j)] = v;
            }
        }
    }
    Ok(Superoperator {
        in_wires: n_in,
        out_wires: n_out,
        mat,
    })
}

/// Runs a classical circuit on a bit vector. The flag is `false` when some
/// assertion saw the wrong value; simulation continues past it as the safe
/// semantics would, dropping the wire.
pub fn denote_basis(c: &Circuit, bits: &[bool]) -> Result<(Vec<bool>, bool), SemanticsError> {
    if bits.len() != c.in_width() {
        return Err(SemanticsError::WidthMismatch {
            expected: c.in_width(),
            got: bits.len(),
        });
    }
    let mut state = bits.to_vec();
    let mut valid = true;
    for (index, g) in c.gates().iter().enumerate() {
        match g {
            Gate::Unitary { kind, wires } if kind.is_classical() => {
                let (controls, target) = wires.split_at(wires.len() - 1);
                if controls.iter().all(|&w| state[w]) {
                    state[target[0]] ^= true;
                }
            }
            Gate::Init { value, wire } => state.insert(*wire, *value),
            Gate::Assert { value, wire } => {
                if state.remove(*wire) != *value {
                    valid = false;
                }
            }
            _ => {
                return Err(SemanticsError::NonClassical {
                    index,
                    gate: g.to_string(),
                })
            }
        }
    }
    Ok((state, valid))
}

/// `|b><b|`.
pub fn bool_to_matrix(b: bool) -> DensityMatrix {
    DensityMatrix::basis(&[b])
}

/// Tensor product of `|b><b|` over the list, first element on wire 0.
pub fn bools_to_matrix(bs: &[bool]) -> DensityMatrix {
    DensityMatrix::basis(bs)
}

/// Basis state holding `f`'s value of each context variable, in context order.
pub fn basis_state(ctx: &VarContext, f: &Valuation) -> Result<DensityMatrix, UnboundVariable> {
    Ok(DensityMatrix::basis(&ctx.bits(f)?))
}

/// Same as [`basis_state`]; the name used for whole-register contexts.
pub fn ctx_to_matrix(ctx: &VarContext, f: &Valuation) -> Result<DensityMatrix, UnboundVariable> {
    basis_state(ctx, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Layout;
    use crate::linalg::{gates, ONE, ZERO};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn plus() -> DensityMatrix {
        let h = C64::new(0.5, 0.0);
        DensityMatrix::from_entries(1, vec![(0, 0, h), (0, 1, h), (1, 0, h), (1, 1, h)])
    }

    #[test]
    fn x_flips_zero() {
        let out = denote(&Circuit::x_at(1, 0).unwrap(), &bool_to_matrix(false), SemanticsMode::Safe).unwrap();
        assert_eq!(out, bool_to_matrix(true));
    }

    #[test]
    fn measuring_plus_gives_uniform_mixture() {
        let out = denote(&Circuit::meas_at(1, 0).unwrap(), &plus(), SemanticsMode::Safe).unwrap();
        let half = C64::new(0.5, 0.0);
        assert!(out.to_dense().approx_eq(&CMatrix::diag(&[half, half]), tol()));
    }

    #[test]
    fn assert_semantics_differ_on_wrong_value() {
        let c = Circuit::assert_at(false, 1, 0).unwrap();
        let one = bool_to_matrix(true);
        let unsafe_out = denote(&c, &one, SemanticsMode::Unsafe).unwrap();
        assert_eq!(unsafe_out.n_wires(), 0);
        assert_eq!(unsafe_out.trace(), ZERO);
        let safe_out = denote(&c, &one, SemanticsMode::Safe).unwrap();
        assert_eq!(safe_out.to_dense(), CMatrix::identity(1));
    }

    #[test]
    fn init_inserts_at_position() {
        let c = Circuit::init_at(true, 2, 1).unwrap();
        for a in [false, true] {
            for b in [false, true] {
                let out = denote(&c, &bools_to_matrix(&[a, b]), SemanticsMode::Safe).unwrap();
                assert_eq!(out, bools_to_matrix(&[a, true, b]));
            }
        }
        let zero_wire = Circuit::init_at(false, 0, 0)
            .unwrap()
            .in_seq(&Circuit::assert_at(false, 1, 0).unwrap())
            .unwrap();
        for mode in SemanticsMode::BOTH {
            assert_eq!(superoperator_of(&zero_wire, mode).unwrap(), Superoperator::identity(0));
        }
    }

    #[test]
    fn h_squared_is_identity_and_h_makes_plus() {
        let h = Circuit::h_at(1, 0).unwrap();
        let out = denote(&h, &bool_to_matrix(false), SemanticsMode::Safe).unwrap();
        assert!(out.approx_eq(&plus(), tol()));
        let hh = h.in_seq(&h).unwrap();
        let s = superoperator_of(&hh, SemanticsMode::Safe).unwrap();
        assert!(s.approx_eq(&Superoperator::identity(1), tol()));
    }

    #[test]
    fn z_matches_dense_conjugation() {
        let rho = plus();
        let out = denote(&Circuit::z_at(1, 0).unwrap(), &rho, SemanticsMode::Safe).unwrap();
        let z = gates::z();
        let want = &(&z * &rho.to_dense()) * &z.adjoint();
        assert!(out.to_dense().approx_eq(&want, tol()));
    }

    #[test]
    fn superoperator_of_x_is_a_permutation() {
        let s = superoperator_of(&Circuit::x_at(1, 0).unwrap(), SemanticsMode::Safe).unwrap();
        // vec index r*2+c; X|r><c|X = |1-r><1-c|, so k -> 3 - k.
        let want = gates::permutation(4, |k| 3 - k);
        assert_eq!(s.matrix(), &want);
        assert_eq!(
            superoperator_of(&Circuit::id_qubits(1), SemanticsMode::Safe).unwrap(),
            Superoperator::identity(1)
        );
    }

    #[test]
    fn superoperator_apply_matches_denote() {
        let c = Circuit::h_at(2, 0)
            .unwrap()
            .in_seq(&Circuit::cnot_at(2, 0, 1).unwrap())
            .unwrap();
        let s = superoperator_of(&c, SemanticsMode::Safe).unwrap();
        let rho = bools_to_matrix(&[false, true]);
        let direct = denote(&c, &rho, SemanticsMode::Safe).unwrap();
        assert!(s.apply(&rho).unwrap().approx_eq(&direct, tol()));
    }

    #[test]
    fn width_mismatch_is_an_error() {
        let err = denote(&Circuit::x_at(2, 0).unwrap(), &bool_to_matrix(false), SemanticsMode::Safe);
        assert_eq!(err, Err(SemanticsError::WidthMismatch { expected: 2, got: 1 }));
    }

    #[test]
    fn basis_path() {
        let x = Circuit::x_at(1, 0).unwrap();
        assert_eq!(denote_basis(&x, &[false]).unwrap(), (vec![true], true));
        let bad = Circuit::init_at(true, 0, 0)
            .unwrap()
            .in_seq(&Circuit::assert_at(false, 1, 0).unwrap())
            .unwrap();
        assert_eq!(denote_basis(&bad, &[]).unwrap(), (vec![], false));
        assert!(matches!(
            denote_basis(&Circuit::h_at(1, 0).unwrap(), &[false]),
            Err(SemanticsError::NonClassical { .. })
        ));
    }

    #[test]
    fn matrix_helpers() {
        assert_eq!(bool_to_matrix(false).to_dense(), CMatrix::diag(&[ONE, ZERO]));
        assert_eq!(bools_to_matrix(&[true, false]).to_dense(), CMatrix::diag(&[ZERO, ZERO, ONE, ZERO]));
        let empty = VarContext::default();
        assert_eq!(ctx_to_matrix(&empty, &Valuation::new()).unwrap().to_dense(), CMatrix::identity(1));
    }

    #[test]
    fn discard_of_measured_qubit() {
        let c = Circuit::from_gates(Layout::qubits(2), vec![Gate::Meas { wire: 1 }, Gate::Discard { wire: 1 }]).unwrap();
        let out = denote(&c, &bools_to_matrix(&[true, true]), SemanticsMode::Safe).unwrap();
        assert_eq!(out, bool_to_matrix(true));
    }

    #[test]
    fn tensor_of_superoperators() {
        let x = superoperator_of(&Circuit::x_at(1, 0).unwrap(), SemanticsMode::Safe).unwrap();
        let h = superoperator_of(&Circuit::h_at(1, 0).unwrap(), SemanticsMode::Safe).unwrap();
        let par = Circuit::x_at(1, 0).unwrap().in_par(&Circuit::h_at(1, 0).unwrap());
        let s = superoperator_of(&par, SemanticsMode::Safe).unwrap();
        assert!(s.approx_eq(&x.tensor(&h), tol()));
    }
}
