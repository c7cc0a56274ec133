//! Semantic judgments on circuits: ancilla validity, equivalence,
//! self-inverse and reversibility.
//!
//! Everything is decided on the basis of matrix units `|i><j|` of the input
//! space. Both semantics are linear, so agreement on every matrix unit is
//! agreement on every input.

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, Layout};
use crate::linalg::{Tolerance, C64, ONE, ZERO};
use crate::semantics::{denote, DensityMatrix, SemanticsError, SemanticsMode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidityError {
    #[error("circuit types differ: {0:?} -> {1:?} vs {2:?} -> {3:?}")]
    TypeMismatch(Layout, Layout, Layout, Layout),
    #[error("circuit is not square: {0:?} -> {1:?}")]
    NotSquare(Layout, Layout),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Outcome of [`is_valid`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    /// Largest `|tr S_unsafe(|i><j|) - δ_ij|` over all matrix units.
    pub worst_trace_defect: f64,
    /// The matrix unit `(i, j)` achieving the worst defect, when invalid.
    pub witness: Option<(u64, u64)>,
}

fn matrix_units(n: usize) -> impl Iterator<Item = DensityMatrix> {
    let d = 1u64 << n;
    (0..d).flat_map(move |i| (0..d).map(move |j| DensityMatrix::matrix_unit(n, i, j)))
}

/// Every assertion holds on every input: the unsafe denotation preserves the
/// trace of every input matrix, i.e. `tr S_unsafe(|i><j|) = δ_ij`.
pub fn is_valid(c: &Circuit, tol: Tolerance) -> Result<ValidityReport, SemanticsError> {
    let n = c.in_width();
    let d = 1u64 << n;
    let mut worst = 0.0f64;
    let mut witness = None;
    for i in 0..d {
        for j in 0..d {
            let out = denote(c, &DensityMatrix::matrix_unit(n, i, j), SemanticsMode::Unsafe)?;
            let expected: C64 = if i == j { ONE } else { ZERO };
            let defect = (out.trace() - expected).norm();
            if defect > worst {
                worst = defect;
                witness = Some((i, j));
            }
        }
    }
    let valid = worst <= tol.eps();
    Ok(ValidityReport {
        valid,
        worst_trace_defect: worst,
        witness: if valid { None } else { witness },
    })
}

/// Safe and unsafe denotations coincide.
pub fn semantics_agree(c: &Circuit, tol: Tolerance) -> Result<bool, SemanticsError> {
    for unit in matrix_units(c.in_width()) {
        let s = denote(c, &unit, SemanticsMode::Safe)?;
        let u = denote(c, &unit, SemanticsMode::Unsafe)?;
        if !s.approx_eq(&u, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `c1 ≡ c2`: both the safe and the unsafe denotations agree.
pub fn circuits_equivalent(c1: &Circuit, c2: &Circuit, tol: Tolerance) -> Result<bool, ValidityError> {
    if c1.input() != c2.input() || c1.output() != c2.output() {
        return Err(ValidityError::TypeMismatch(
            c1.input().clone(),
            c1.output().clone(),
            c2.input().clone(),
            c2.output().clone(),
        ));
    }
    for unit in matrix_units(c1.in_width()) {
        for mode in SemanticsMode::BOTH {
            if !denote(c1, &unit, mode)?.approx_eq(&denote(c2, &unit, mode)?, tol) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `c ≡ id_circ`.
pub fn is_identity(c: &Circuit, tol: Tolerance) -> Result<bool, ValidityError> {
    if c.input() != c.output() {
        return Err(ValidityError::NotSquare(c.input().clone(), c.output().clone()));
    }
    circuits_equivalent(c, &Circuit::id_circ(c.input().clone()), tol)
}

/// `c ;; c ≡ id_circ`.
pub fn is_self_inverse(c: &Circuit, tol: Tolerance) -> Result<bool, ValidityError> {
    if c.input() != c.output() {
        return Err(ValidityError::NotSquare(c.input().clone(), c.output().clone()));
    }
    let cc = c.in_seq(c).expect("square circuits compose");
    is_identity(&cc, tol)
}

/// Checks that `c_inv` is a two-sided inverse of `c` and that `c` is valid.
/// Returns `false` if any part fails, including ill-typed pairs.
pub fn check_reversible_implies_valid(c: &Circuit, c_inv: &Circuit, tol: Tolerance) -> Result<bool, SemanticsError> {
    let (Ok(left), Ok(right)) = (c.in_seq(c_inv), c_inv.in_seq(c)) else {
        return Ok(false);
    };
    let inverse_ok = |x: &Circuit| match is_identity(x, tol) {
        Ok(b) => Ok(b),
        Err(ValidityError::Semantics(e)) => Err(e),
        Err(_) => Ok(false),
    };
    if !inverse_ok(&left)? || !inverse_ok(&right)? {
        return Ok(false);
    }
    Ok(is_valid(c, tol)?.valid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn seq(cs: &[Circuit]) -> Circuit {
        cs.iter().skip(1).fold(cs[0].clone(), |acc, c| acc.in_seq(c).unwrap())
    }

    fn init_assert(a: bool, b: bool) -> Circuit {
        seq(&[Circuit::init_at(a, 0, 0).unwrap(), Circuit::assert_at(b, 1, 0).unwrap()])
    }

    #[test]
    fn matched_init_assert_is_valid() {
        let r = is_valid(&init_assert(false, false), tol()).unwrap();
        assert!(r.valid);
        assert_eq!(r.witness, None);
        assert!(semantics_agree(&init_assert(true, true), tol()).unwrap());
    }

    #[test]
    fn mismatched_init_assert_is_invalid() {
        let r = is_valid(&init_assert(true, false), tol()).unwrap();
        assert!(!r.valid);
        assert!((r.worst_trace_defect - 1.0).abs() < 1e-12);
        assert_eq!(r.witness, Some((0, 0)));
        assert!(!semantics_agree(&init_assert(true, false), tol()).unwrap());
    }

    #[test]
    fn assert_free_circuits_agree() {
        let c = seq(&[Circuit::h_at(2, 0).unwrap(), Circuit::cnot_at(2, 0, 1).unwrap()]);
        assert!(semantics_agree(&c, tol()).unwrap());
        assert!(is_valid(&c, tol()).unwrap().valid);
    }

    #[test]
    fn equivalence() {
        let x = Circuit::x_at(1, 0).unwrap();
        assert!(circuits_equivalent(&x, &x, tol()).unwrap());
        let xx = seq(&[x.clone(), x.clone()]);
        assert!(circuits_equivalent(&xx, &Circuit::id_qubits(1), tol()).unwrap());
        assert!(!circuits_equivalent(&x, &Circuit::id_qubits(1), tol()).unwrap());
        assert!(circuits_equivalent(&init_assert(true, true), &Circuit::id_qubits(0), tol()).unwrap());
        assert!(matches!(
            circuits_equivalent(&x, &Circuit::id_qubits(2), tol()),
            Err(ValidityError::TypeMismatch(..))
        ));
    }

    #[test]
    fn self_inverse() {
        assert!(is_self_inverse(&Circuit::x_at(1, 0).unwrap(), tol()).unwrap());
        assert!(is_self_inverse(&Circuit::h_at(1, 0).unwrap(), tol()).unwrap());
        let not_square = Circuit::init_at(false, 0, 0).unwrap();
        assert!(is_self_inverse(&not_square, tol()).is_err());
    }

    #[test]
    fn reversible_implies_valid() {
        let x = Circuit::x_at(1, 0).unwrap();
        assert!(check_reversible_implies_valid(&x, &x, tol()).unwrap());
        let bad = init_assert(true, false);
        assert!(!check_reversible_implies_valid(&bad, &Circuit::id_qubits(0), tol()).unwrap());
        assert!(!check_reversible_implies_valid(&x, &Circuit::id_qubits(2), tol()).unwrap());
    }
}
