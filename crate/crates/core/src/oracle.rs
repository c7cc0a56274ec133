//! Compiler from boolean expressions to oracle circuits.
//!
//! `compile(b, Γ)` maps `|z⟩ ⊗ |Γ(f)⟩` to `|z ⊕ b(f)⟩ ⊗ |Γ(f)⟩` on `1 + |Γ|`
//! qubits. Wire 0 is the target and variable `v` sits on wire
//! `1 + index(v, Γ)`. Subexpressions are computed onto ancillae inserted
//! directly below the current target, so a subcircuit targeting wire `o`
//! sees the variables at `o + 1 + index`.

use thiserror::Error;

use crate::bexp::{Bexp, UnboundVariable, Valuation, VarContext};
use crate::circuit::{Circuit, CircuitError, Gate, Layout};
use crate::linalg::Tolerance;
use crate::semantics::{basis_state, bool_to_matrix, denote, SemanticsError, SemanticsMode};
use crate::symmetry::SymmetryDerivation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Unbound(#[from] UnboundVariable),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// The oracle circuit for `b` together with a source-symmetry derivation
/// whose target set is `{0}`.
pub fn compile(b: &Bexp, ctx: &VarContext) -> Result<(Circuit, SymmetryDerivation), OracleError> {
    let circuit = compile_circuit(b, ctx)?;
    let derivation = SymmetryDerivation::witness(circuit.clone(), symmetric_oracle(b, ctx)?);
    Ok((circuit, derivation))
}

/// Just the circuit part of [`compile`].
pub fn compile_circuit(b: &Bexp, ctx: &VarContext) -> Result<Circuit, OracleError> {
    let mut gates = Vec::new();
    emit(b, ctx, 0, &mut gates)?;
    Ok(Circuit::new(
        Layout::qubits(1 + ctx.len()),
        Layout::qubits(1 + ctx.len()),
        gates,
    )?)
}

fn emit(b: &Bexp, ctx: &VarContext, o: usize, out: &mut Vec<Gate>) -> Result<(), OracleError> {
    match b {
        Bexp::True => out.push(Gate::x(o)),
        Bexp::False => {}
        Bexp::Var(v) => {
            let idx = ctx.index(v).ok_or_else(|| UnboundVariable(v.clone()))?;
            out.push(Gate::cnot(o + 1 + idx, o));
        }
        Bexp::Not(inner) => {
            out.push(Gate::Init { value: true, wire: o + 1 });
            emit(inner, ctx, o + 1, out)?;
            out.push(Gate::cnot(o + 1, o));
            emit(inner, ctx, o + 1, out)?;
            out.push(Gate::Assert { value: true, wire: o + 1 });
        }
        Bexp::And(l, r) => {
            out.push(Gate::Init { value: false, wire: o + 1 });
            emit(l, ctx, o + 1, out)?;
            out.push(Gate::Init { value: false, wire: o + 2 });
            emit(r, ctx, o + 2, out)?;
            out.push(Gate::toffoli(o + 1, o + 2, o));
            emit(r, ctx, o + 2, out)?;
            out.push(Gate::Assert { value: false, wire: o + 2 });
            emit(l, ctx, o + 1, out)?;
            out.push(Gate::Assert { value: false, wire: o + 1 });
        }
        Bexp::Xor(l, r) => {
            out.push(Gate::Init { value: false, wire: o + 1 });
            emit(l, ctx, o + 1, out)?;
            out.push(Gate::cnot(o + 1, o));
            emit(l, ctx, o + 1, out)?;
            emit(r, ctx, o + 1, out)?;
            out.push(Gate::cnot(o + 1, o));
            emit(r, ctx, o + 1, out)?;
            out.push(Gate::Assert { value: false, wire: o + 1 });
        }
    }
    Ok(())
}

type Cont<'a> = Box<dyn FnOnce(usize) -> Result<SymmetryDerivation, OracleError> + 'a>;

/// A derivation built from the symmetry rules alone, equivalent to
/// [`compile_circuit`]: compute `b` onto a fresh ancilla appended after the
/// variables, copy it to the target, uncompute.
pub fn symmetric_oracle(b: &Bexp, ctx: &VarContext) -> Result<SymmetryDerivation, OracleError> {
    let w = 1 + ctx.len();
    let body = compute_into(
        b,
        ctx,
        w,
        w + 1,
        Box::new(move |width| {
            Ok(SymmetryDerivation::target_left(
                Gate::cnot(w, 0),
                SymmetryDerivation::identity(width, vec![0]),
            ))
        }),
    )?;
    Ok(SymmetryDerivation::ancilla(false, w, body))
}

/// XORs `b` onto `dest`, runs `k` on the frame width reached, then undoes
/// the computation. New ancillae go at the current end of the frame.
fn compute_into<'a>(
    b: &'a Bexp,
    ctx: &'a VarContext,
    dest: usize,
    width: usize,
    k: Cont<'a>,
) -> Result<SymmetryDerivation, OracleError> {
    match b {
        Bexp::False => k(width),
        Bexp::True => Ok(SymmetryDerivation::conjugate(Gate::x(dest), k(width)?)),
        Bexp::Var(v) => {
            let idx = ctx.index(v).ok_or_else(|| UnboundVariable(v.clone()))?;
            Ok(SymmetryDerivation::conjugate(Gate::cnot(1 + idx, dest), k(width)?))
        }
        Bexp::Not(inner) => Ok(SymmetryDerivation::conjugate(
            Gate::x(dest),
            compute_into(inner, ctx, dest, width, k)?,
        )),
        Bexp::Xor(l, r) => compute_into(l, ctx, dest, width, Box::new(move |w| compute_into(r, ctx, dest, w, k))),
        Bexp::And(l, r) => {
            let p1 = width;
            let body = compute_into(
                l,
                ctx,
                p1,
                width + 1,
                Box::new(move |w1| {
                    let p2 = w1;
                    let body = compute_into(
                        r,
                        ctx,
                        p2,
                        w1 + 1,
                        Box::new(move |w2| Ok(SymmetryDerivation::conjugate(Gate::toffoli(p1, p2, dest), k(w2)?))),
                    )?;
                    Ok(SymmetryDerivation::ancilla(false, p2, body))
                }),
            )?;
            Ok(SymmetryDerivation::ancilla(false, p1, body))
        }
    }
}

/// Where [`check_compile_correct_report`] found a mismatch.
#[derive(Debug, Clone, PartialEq)]
pub struct CompileMismatch {
    pub valuation: Valuation,
    pub z: bool,
    pub mode: SemanticsMode,
    pub deviation: f64,
}

/// For every valuation `f` of `ctx`, every target value `z` and both
/// semantics: `compile(b, ctx)` maps `|z⟩ ⊗ |Γ(f)⟩` to
/// `|z ⊕ b(f)⟩ ⊗ |Γ(f)⟩`. Returns the first failure.
pub fn check_compile_correct_report(
    b: &Bexp,
    ctx: &VarContext,
    tol: Tolerance,
) -> Result<Option<CompileMismatch>, OracleError> {
    let c = compile_circuit(b, ctx)?;
    check_circuit_against(&c, b, ctx, tol)
}

/// Checks an already compiled oracle `c` against `b`.
pub fn check_circuit_against(
    c: &Circuit,
    b: &Bexp,
    ctx: &VarContext,
    tol: Tolerance,
) -> Result<Option<CompileMismatch>, OracleError> {
    for f in ctx.valuations() {
        let value = b.interp(&f)?;
        let state = basis_state(ctx, &f)?;
        for z in [false, true] {
            let input = bool_to_matrix(z).kron(&state);
            let expected = bool_to_matrix(z ^ value).kron(&state);
            for mode in SemanticsMode::BOTH {
                let got = denote(c, &input, mode)?;
                let deviation = got.max_abs_diff(&expected).unwrap_or(f64::INFINITY);
                if deviation > tol.eps() {
                    return Ok(Some(CompileMismatch {
                        valuation: f,
                        z,
                        mode,
                        deviation,
                    }));
                }
            }
        }
    }
    Ok(None)
}

pub fn check_compile_correct(b: &Bexp, ctx: &VarContext, tol: Tolerance) -> Result<bool, OracleError> {
    Ok(check_compile_correct_report(b, ctx, tol)?.is_none())
}
