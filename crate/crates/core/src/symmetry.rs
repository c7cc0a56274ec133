//! Source symmetry: a syntactic discipline that guarantees assertions hold.
//!
//! A [`SymmetryDerivation`] is a proof tree for a square, all-qubit circuit
//! whose wires split into *targets* and *sources*. Its rules are:
//!
//! * the identity is symmetric;
//! * `g ;; c ;; g` for a classical gate `g` (see [`ConjugationRule`]);
//! * `g ;; c` and `c ;; g` when `g` acts on a target;
//! * `init_at b i ;; c ;; assert_at b i` when `i` is a source of `c`;
//! * any circuit equivalent to a symmetric one.
//!
//! Sources are whatever wires are not targets; ancillae always enter as
//! sources. Derivations realise to circuits, invert structurally, and
//! carry their equivalence claims unchecked until [`SymmetryDerivation::check`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate, Layout};
use crate::linalg::Tolerance;
use crate::semantics::SemanticsError;
use crate::validity::{circuits_equivalent, is_valid, ValidityError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetryError {
    #[error("gate {0} is not a classical unitary (X, CNOT or Toffoli)")]
    NotClassicalUnitary(String),
    #[error("gate {gate} touches wire {wire} outside a {width}-wire frame")]
    GateOutOfFrame { gate: String, wire: usize, width: usize },
    #[error("target gate {gate} acts on source wire {wire}")]
    TargetGateOnSource { gate: String, wire: usize },
    #[error("conjugating gate {gate} acts on source wire {acted} but is controlled by target wire {control}")]
    ControlledByTarget { gate: String, acted: usize, control: usize },
    #[error("ancilla index {index} is not a source wire of a {width}-wire frame")]
    AncillaNotSource { index: usize, width: usize },
    #[error("target list {targets:?} is not sorted, distinct and below {width}")]
    BadTargets { targets: Vec<usize>, width: usize },
    #[error("witness circuit must map {width} qubits to {width} qubits")]
    WitnessType { width: usize },
    #[error("witness circuit is not equivalent to its derivation")]
    WitnessNotEquivalent,
    #[error("circuit must be square on qubits, got {0:?} -> {1:?}")]
    NotSquare(Layout, Layout),
    #[error("wire {index} out of range for {width} wires")]
    IndexOutOfRange { index: usize, width: usize },
    #[error("circuit does not end with assert_at b i ;; init_at b i")]
    NoPattern,
    #[error("assert{} at wire {wire} does not hold (trace defect {defect:.3e})", u8::from(*value))]
    InvalidAssertion { value: bool, wire: usize, defect: f64 },
    #[error("removing assert;;init changed the denotation")]
    CancellationNotEquivalent,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Validity(#[from] ValidityError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// The wire a classical gate changes: X's only wire, the target of CNOT and
/// Toffoli (their last wire).
pub fn acts_on(g: &Gate) -> Result<usize, SymmetryError> {
    match g {
        Gate::Unitary { kind, wires } if kind.is_classical() => Ok(*wires.last().expect("arity >= 1")),
        _ => Err(SymmetryError::NotClassicalUnitary(g.to_string())),
    }
}

/// Wire count plus which wires are targets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub width: usize,
    pub targets: Vec<usize>,
}

impl Frame {
    pub fn is_target(&self, w: usize) -> bool {
        self.targets.binary_search(&w).is_ok()
    }

    pub fn sources(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.width).filter(|&w| !self.is_target(w))
    }
}

/// How strictly `g ;; c ;; g` is checked.
///
/// Under [`ConjugationRule::Unrestricted`] any classical gate may conjugate.
/// That admits `CNOT(t -> s) ;; X(t) ;; CNOT(t -> s)` with `t` a target and
/// `s` a source, which flips `s`; wrapping it in an ancilla on `s` yields
/// an invalid circuit. [`ConjugationRule::SourceControlled`] (the default
/// used by [`SymmetryDerivation::frame`]) additionally requires that a gate
/// acting on a source is controlled only by sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConjugationRule {
    #[default]
    SourceControlled,
    Unrestricted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SymmetryDerivation {
    Identity {
        width: usize,
        targets: Vec<usize>,
    },
    /// `gate ;; inner ;; gate`
    Conjugate { gate: Gate, inner: Box<SymmetryDerivation> },
    /// `gate ;; inner`, gate acting on a target.
    TargetGateLeft { gate: Gate, inner: Box<SymmetryDerivation> },
    /// `inner ;; gate`, gate acting on a target.
    TargetGateRight { inner: Box<SymmetryDerivation>, gate: Gate },
    /// `init_at value index ;; inner ;; assert_at value index`. `index` is
    /// a source position of `inner`'s (one wider) frame.
    Ancilla {
        value: bool,
        index: usize,
        inner: Box<SymmetryDerivation>,
    },
    /// `circuit`, claimed equivalent to `inner`'s realisation.
    EquivWitness {
        circuit: Circuit,
        inner: Box<SymmetryDerivation>,
    },
}

impl SymmetryDerivation {
    pub fn identity(width: usize, targets: Vec<usize>) -> Self {
        SymmetryDerivation::Identity { width, targets }
    }

    pub fn conjugate(gate: Gate, inner: Self) -> Self {
        SymmetryDerivation::Conjugate {
            gate,
            inner: Box::new(inner),
        }
    }

    pub fn target_left(gate: Gate, inner: Self) -> Self {
        SymmetryDerivation::TargetGateLeft {
            gate,
            inner: Box::new(inner),
        }
    }

    pub fn target_right(inner: Self, gate: Gate) -> Self {
        SymmetryDerivation::TargetGateRight {
            inner: Box::new(inner),
            gate,
        }
    }

    pub fn ancilla(value: bool, index: usize, inner: Self) -> Self {
        SymmetryDerivation::Ancilla {
            value,
            index,
            inner: Box::new(inner),
        }
    }

    pub fn witness(circuit: Circuit, inner: Self) -> Self {
        SymmetryDerivation::EquivWitness {
            circuit,
            inner: Box::new(inner),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            SymmetryDerivation::Identity { .. } => 0,
            SymmetryDerivation::Conjugate { inner, .. }
            | SymmetryDerivation::TargetGateLeft { inner, .. }
            | SymmetryDerivation::TargetGateRight { inner, .. }
            | SymmetryDerivation::Ancilla { inner, .. }
            | SymmetryDerivation::EquivWitness { inner, .. } => 1 + inner.depth(),
        }
    }

    /// Structural well-formedness under the default conjugation rule;
    /// returns the frame of the root. Witness equivalences are not checked.
    pub fn frame(&self) -> Result<Frame, SymmetryError> {
        self.frame_with(ConjugationRule::default())
    }

    pub fn frame_with(&self, rule: ConjugationRule) -> Result<Frame, SymmetryError> {
        match self {
            SymmetryDerivation::Identity { width, targets } => {
                let ok = targets.windows(2).all(|w| w[0] < w[1]) && targets.iter().all(|&t| t < *width);
                if !ok {
                    return Err(SymmetryError::BadTargets {
                        targets: targets.clone(),
                        width: *width,
                    });
                }
                Ok(Frame {
                    width: *width,
                    targets: targets.clone(),
                })
            }
            SymmetryDerivation::Conjugate { gate, inner } => {
                let frame = inner.frame_with(rule)?;
                let acted = classical_in_frame(gate, &frame)?;
                if rule == ConjugationRule::SourceControlled && !frame.is_target(acted) {
                    if let Gate::Unitary { wires, .. } = gate {
                        if let Some(&control) = wires.iter().find(|&&w| frame.is_target(w)) {
                            return Err(SymmetryError::ControlledByTarget {
                                gate: gate.to_string(),
                                acted,
                                control,
                            });
                        }
                    }
                }
                Ok(frame)
            }
            SymmetryDerivation::TargetGateLeft { gate, inner } | SymmetryDerivation::TargetGateRight { inner, gate } => {
                let frame = inner.frame_with(rule)?;
                let acted = classical_in_frame(gate, &frame)?;
                if !frame.is_target(acted) {
                    return Err(SymmetryError::TargetGateOnSource {
                        gate: gate.to_string(),
                        wire: acted,
                    });
                }
                Ok(frame)
            }
            SymmetryDerivation::Ancilla { index, inner, .. } => {
                let frame = inner.frame_with(rule)?;
                if *index >= frame.width || frame.is_target(*index) {
                    return Err(SymmetryError::AncillaNotSource {
                        index: *index,
                        width: frame.width,
                    });
                }
                Ok(Frame {
                    width: frame.width - 1,
                    targets: frame
                        .targets
                        .iter()
                        .map(|&t| if t > *index { t - 1 } else { t })
                        .collect(),
                })
            }
            SymmetryDerivation::EquivWitness { circuit, inner } => {
                let frame = inner.frame_with(rule)?;
                let square = Layout::qubits(frame.width);
                if circuit.input() != &square || circuit.output() != &square {
                    return Err(SymmetryError::WitnessType { width: frame.width });
                }
                Ok(frame)
            }
        }
    }

    /// The circuit this derivation denotes.
    pub fn realize(&self) -> Result<Circuit, SymmetryError> {
        self.realize_with(ConjugationRule::default())
    }

    pub fn realize_with(&self, rule: ConjugationRule) -> Result<Circuit, SymmetryError> {
        let frame = self.frame_with(rule)?;
        let mut gates = Vec::new();
        self.emit(&mut gates);
        let layout = Layout::qubits(frame.width);
        Ok(Circuit::new(layout.clone(), layout, gates)?)
    }

    fn emit(&self, out: &mut Vec<Gate>) {
        match self {
            SymmetryDerivation::Identity { .. } => {}
            SymmetryDerivation::Conjugate { gate, inner } => {
                out.push(gate.clone());
                inner.emit(out);
                out.push(gate.clone());
            }
            SymmetryDerivation::TargetGateLeft { gate, inner } => {
                out.push(gate.clone());
                inner.emit(out);
            }
            SymmetryDerivation::TargetGateRight { inner, gate } => {
                inner.emit(out);
                out.push(gate.clone());
            }
            SymmetryDerivation::Ancilla { value, index, inner } => {
                out.push(Gate::Init {
                    value: *value,
                    wire: *index,
                });
                inner.emit(out);
                out.push(Gate::Assert {
                    value: *value,
                    wire: *index,
                });
            }
            SymmetryDerivation::EquivWitness { circuit, .. } => out.extend_from_slice(circuit.gates()),
        }
    }

    /// Structural checks plus every witness equivalence.
    pub fn check(&self, tol: Tolerance) -> Result<Frame, SymmetryError> {
        let frame = self.frame()?;
        self.check_witnesses(tol)?;
        Ok(frame)
    }

    fn check_witnesses(&self, tol: Tolerance) -> Result<(), SymmetryError> {
        match self {
            SymmetryDerivation::Identity { .. } => Ok(()),
            SymmetryDerivation::EquivWitness { circuit, inner } => {
                inner.check_witnesses(tol)?;
                if circuits_equivalent(circuit, &inner.realize()?, tol)? {
                    Ok(())
                } else {
                    Err(SymmetryError::WitnessNotEquivalent)
                }
            }
            SymmetryDerivation::Conjugate { inner, .. }
            | SymmetryDerivation::TargetGateLeft { inner, .. }
            | SymmetryDerivation::TargetGateRight { inner, .. }
            | SymmetryDerivation::Ancilla { inner, .. } => inner.check_witnesses(tol),
        }
    }

    /// Derivation of the inverse circuit. Target gates switch sides, the
    /// other rules invert their inner derivation in place, and a witness
    /// circuit is replaced by its reversal.
    pub fn invert(&self) -> Result<SymmetryDerivation, SymmetryError> {
        Ok(match self {
            SymmetryDerivation::Identity { .. } => self.clone(),
            SymmetryDerivation::Conjugate { gate, inner } => Self::conjugate(gate.clone(), inner.invert()?),
            SymmetryDerivation::TargetGateLeft { gate, inner } => Self::target_right(inner.invert()?, gate.clone()),
            SymmetryDerivation::TargetGateRight { inner, gate } => Self::target_left(gate.clone(), inner.invert()?),
            SymmetryDerivation::Ancilla { value, index, inner } => Self::ancilla(*value, *index, inner.invert()?),
            SymmetryDerivation::EquivWitness { circuit, inner } => Self::witness(circuit.reversed()?, inner.invert()?),
        })
    }

    /// The same derivation with a fresh source wire 0 added under every
    /// node, so that an ancilla rule can be applied at index 0.
    pub fn pad_source(&self) -> SymmetryDerivation {
        use SymmetryDerivation as D;
        let up = |g: &Gate| g.shifted(1);
        match self {
            D::Identity { width, targets } => D::identity(width + 1, targets.iter().map(|t| t + 1).collect()),
            D::Conjugate { gate, inner } => D::conjugate(up(gate), inner.pad_source()),
            D::TargetGateLeft { gate, inner } => D::target_left(up(gate), inner.pad_source()),
            D::TargetGateRight { inner, gate } => D::target_right(inner.pad_source(), up(gate)),
            D::Ancilla { value, index, inner } => D::ancilla(*value, index + 1, inner.pad_source()),
            D::EquivWitness { circuit, inner } => D::witness(circuit.pad_front(1), inner.pad_source()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("derivation serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn classical_in_frame(g: &Gate, frame: &Frame) -> Result<usize, SymmetryError> {
    let acted = acts_on(g)?;
    if let Gate::Unitary { wires, .. } = g {
        if let Some(&w) = wires.iter().find(|&&w| w >= frame.width) {
            return Err(SymmetryError::GateOutOfFrame {
                gate: g.to_string(),
                wire: w,
                width: frame.width,
            });
        }
        for (k, w) in wires.iter().enumerate() {
            if wires[..k].contains(w) {
                return Err(CircuitError::DuplicateWire { gate: 0, wire: *w }.into());
            }
        }
    }
    Ok(acted)
}

fn square_qubits(c: &Circuit) -> Result<usize, SymmetryError> {
    if c.input() != c.output() || !c.input().is_all_qubits() {
        return Err(SymmetryError::NotSquare(c.input().clone(), c.output().clone()));
    }
    Ok(c.in_width())
}

/// `∀ b, valid (init_at b i ;; c ;; assert_at b i)`, with the sandwich
/// removing wire `i` from `c`'s frame.
pub fn noop_on(c: &Circuit, i: usize, tol: Tolerance) -> Result<bool, SymmetryError> {
    let width = square_qubits(c)?;
    if i >= width {
        return Err(SymmetryError::IndexOutOfRange { index: i, width });
    }
    for b in [false, true] {
        let sandwich = Circuit::init_at(b, width - 1, i)?
            .in_seq(c)?
            .in_seq(&Circuit::assert_at(b, width, i)?)?;
        if !is_valid(&sandwich, tol)?.valid {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Source wires of `d` on which its realisation is not a no-op.
pub fn source_noop_failures(d: &SymmetryDerivation, tol: Tolerance) -> Result<Vec<usize>, SymmetryError> {
    let frame = d.frame()?;
    let c = d.realize()?;
    let mut failures = Vec::new();
    for s in frame.sources() {
        if !noop_on(&c, s, tol)? {
            failures.push(s);
        }
    }
    Ok(failures)
}

/// `noop_on` holds for every source wire.
pub fn noop_on_source(d: &SymmetryDerivation, tol: Tolerance) -> Result<bool, SymmetryError> {
    Ok(source_noop_failures(d, tol)?.is_empty())
}

/// What [`cancel_assert_init`] does when the circuit does not end in the
/// `assert_at b i ;; init_at b i` pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPattern {
    #[default]
    Error,
    Keep,
}

/// Rewrites `c ;; assert_at b i ;; init_at b i` to `c`, provided the
/// assertion in `c ;; assert_at b i` is valid. The result is re-checked for
/// equivalence with the input.
pub fn cancel_assert_init(c: &Circuit, tol: Tolerance, missing: MissingPattern) -> Result<Circuit, SymmetryError> {
    let gates = c.gates();
    let pattern = match gates {
        [.., Gate::Assert { value: a, wire: i }, Gate::Init { value: b, wire: j }] if a == b && i == j => Some((*a, *i)),
        _ => None,
    };
    let Some((value, wire)) = pattern else {
        return match missing {
            MissingPattern::Error => Err(SymmetryError::NoPattern),
            MissingPattern::Keep => Ok(c.clone()),
        };
    };
    let n = gates.len();
    let asserted = Circuit::from_gates(c.input().clone(), gates[..n - 1].to_vec())?;
    let report = is_valid(&asserted, tol)?;
    if !report.valid {
        return Err(SymmetryError::InvalidAssertion {
            value,
            wire,
            defect: report.worst_trace_defect,
        });
    }
    let prefix = Circuit::new(c.input().clone(), c.output().clone(), gates[..n - 2].to_vec())?;
    if !circuits_equivalent(&prefix, c, tol)? {
        return Err(SymmetryError::CancellationNotEquivalent);
    }
    Ok(prefix)
}
