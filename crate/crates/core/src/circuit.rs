//! Flattened circuit IR.
//!
//! A circuit is a typed list of gate applications on integer wire indices.
//! Wire types are flattened left to right into a [`Layout`]; `init` inserts
//! a fresh qubit at an explicit position and `assert`/`discard` remove one,
//! so the wire count can change between gates. [`Circuit::new`] checks the
//! whole wire trajectory once and every combinator preserves it.

use std::fmt;

use thiserror::Error;

mod json;

pub use json::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WireKind {
    Qubit,
    Bit,
}

/// Wire types as written in the source language. Only their flattening
/// ([`WireType::layout`]) matters to the IR.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum WireType {
    One,
    Bit,
    Qubit,
    Tensor(Box<WireType>, Box<WireType>),
}

impl WireType {
    pub fn tensor(a: WireType, b: WireType) -> Self {
        WireType::Tensor(Box::new(a), Box::new(b))
    }

    /// `n ⨂ Qubit`, nested to the right and terminated by `One`.
    pub fn qubits(n: usize) -> Self {
        (0..n).fold(WireType::One, |acc, _| WireType::tensor(WireType::Qubit, acc))
    }

    pub fn size(&self) -> usize {
        match self {
            WireType::One => 0,
            WireType::Bit | WireType::Qubit => 1,
            WireType::Tensor(a, b) => a.size() + b.size(),
        }
    }

    /// Left-to-right flattening of the leaves.
    pub fn layout(&self) -> Layout {
        fn go(t: &WireType, out: &mut Vec<WireKind>) {
            match t {
                WireType::One => {}
                WireType::Bit => out.push(WireKind::Bit),
                WireType::Qubit => out.push(WireKind::Qubit),
                WireType::Tensor(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        Layout(out)
    }
}

/// Flattened wire type: the kind of each wire, in index order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Layout(Vec<WireKind>);

impl Layout {
    pub fn new(kinds: Vec<WireKind>) -> Self {
        Layout(kinds)
    }

    pub fn qubits(n: usize) -> Self {
        Layout(vec![WireKind::Qubit; n])
    }

    /// `qubits` qubits followed by `bits` bits.
    pub fn mixed(qubits: usize, bits: usize) -> Self {
        let mut v = vec![WireKind::Qubit; qubits];
        v.extend(std::iter::repeat_n(WireKind::Bit, bits));
        Layout(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn kinds(&self) -> &[WireKind] {
        &self.0
    }

    pub fn is_all_qubits(&self) -> bool {
        self.0.iter().all(|&k| k == WireKind::Qubit)
    }

    pub fn concat(&self, other: &Layout) -> Layout {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Layout(v)
    }
}

impl From<&WireType> for Layout {
    fn from(t: &WireType) -> Self {
        t.layout()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitaryKind {
    X,
    H,
    Z,
    Cnot,
    Toffoli,
}

impl UnitaryKind {
    pub fn arity(self) -> usize {
        match self {
            UnitaryKind::X | UnitaryKind::H | UnitaryKind::Z => 1,
            UnitaryKind::Cnot => 2,
            UnitaryKind::Toffoli => 3,
        }
    }

    /// X, CNOT and Toffoli permute basis states.
    pub fn is_classical(self) -> bool {
        matches!(self, UnitaryKind::X | UnitaryKind::Cnot | UnitaryKind::Toffoli)
    }

    pub fn name(self) -> &'static str {
        match self {
            UnitaryKind::X => "X",
            UnitaryKind::H => "H",
            UnitaryKind::Z => "Z",
            UnitaryKind::Cnot => "CNOT",
            UnitaryKind::Toffoli => "Toffoli",
        }
    }
}

/// One gate application. For controlled gates the target is the last wire.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    Unitary { kind: UnitaryKind, wires: Vec<usize> },
    /// Inserts a fresh qubit in `|value>` so that it ends up at index `wire`.
    Init { value: bool, wire: usize },
    /// Measures a qubit in place; the wire becomes a bit.
    Meas { wire: usize },
    /// Removes a bit.
    Discard { wire: usize },
    /// Removes a qubit, asserting it is in `|value>`.
    Assert { value: bool, wire: usize },
}

impl Gate {
    pub fn x(i: usize) -> Self {
        Gate::Unitary {
            kind: UnitaryKind::X,
            wires: vec![i],
        }
    }

    pub fn h(i: usize) -> Self {
        Gate::Unitary {
            kind: UnitaryKind::H,
            wires: vec![i],
        }
    }

    pub fn z(i: usize) -> Self {
        Gate::Unitary {
            kind: UnitaryKind::Z,
            wires: vec![i],
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Unitary {
            kind: UnitaryKind::Cnot,
            wires: vec![control, target],
        }
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        Gate::Unitary {
            kind: UnitaryKind::Toffoli,
            wires: vec![c1, c2, target],
        }
    }

    /// X, CNOT, Toffoli, init and assert.
    pub fn is_classical(&self) -> bool {
        match self {
            Gate::Unitary { kind, .. } => kind.is_classical(),
            Gate::Init { .. } | Gate::Assert { .. } => true,
            Gate::Meas { .. } | Gate::Discard { .. } => false,
        }
    }

    /// Net change in wire count.
    pub fn width_delta(&self) -> isize {
        match self {
            Gate::Init { .. } => 1,
            Gate::Assert { .. } | Gate::Discard { .. } => -1,
            Gate::Unitary { .. } | Gate::Meas { .. } => 0,
        }
    }

    /// Same gate with every wire index moved up by `by`.
    pub(crate) fn shifted(&self, by: usize) -> Gate {
        match self {
            Gate::Unitary { kind, wires } => Gate::Unitary {
                kind: *kind,
                wires: wires.iter().map(|w| w + by).collect(),
            },
            Gate::Init { value, wire } => Gate::Init {
                value: *value,
                wire: wire + by,
            },
            Gate::Meas { wire } => Gate::Meas { wire: wire + by },
            Gate::Discard { wire } => Gate::Discard { wire: wire + by },
            Gate::Assert { value, wire } => Gate::Assert {
                value: *value,
                wire: wire + by,
            },
        }
    }

    /// The gate undoing this one, if it has one. Init and assert at the same
    /// position swap roles; measurement and discard have no inverse.
    pub fn inverse(&self) -> Option<Gate> {
        match self {
            Gate::Unitary { .. } => Some(self.clone()),
            Gate::Init { value, wire } => Some(Gate::Assert {
                value: *value,
                wire: *wire,
            }),
            Gate::Assert { value, wire } => Some(Gate::Init {
                value: *value,
                wire: *wire,
            }),
            Gate::Meas { .. } | Gate::Discard { .. } => None,
        }
    }

    /// Checks this gate against the current layout and updates it in place.
    fn step(&self, index: usize, layout: &mut Vec<WireKind>) -> Result<(), CircuitError> {
        let width = layout.len();
        let in_range = |wire: usize| {
            if wire < width {
                Ok(())
            } else {
                Err(CircuitError::WireOutOfRange { gate: index, wire, width })
            }
        };
        let expect = |wire: usize, kind: WireKind, layout: &[WireKind]| {
            if layout[wire] == kind {
                Ok(())
            } else {
                Err(CircuitError::WireKind {
                    gate: index,
                    wire,
                    expected: kind,
                })
            }
        };
        match self {
            Gate::Unitary { kind, wires } => {
                if wires.len() != kind.arity() {
                    return Err(CircuitError::Arity {
                        gate: index,
                        kind: *kind,
                        got: wires.len(),
                    });
                }
                for (k, &w) in wires.iter().enumerate() {
                    in_range(w)?;
                    if wires[..k].contains(&w) {
                        return Err(CircuitError::DuplicateWire { gate: index, wire: w });
                    }
                }
                // Bits may act as controls, never as targets.
                let target = *wires.last().expect("arity >= 1");
                expect(target, WireKind::Qubit, layout)?;
                if !kind.is_classical() {
                    for &w in wires {
                        expect(w, WireKind::Qubit, layout)?;
                    }
                }
            }
            Gate::Init { wire, .. } => {
                if *wire > width {
                    return Err(CircuitError::WireOutOfRange {
                        gate: index,
                        wire: *wire,
                        width: width + 1,
                    });
                }
                layout.insert(*wire, WireKind::Qubit);
            }
            Gate::Meas { wire } => {
                in_range(*wire)?;
                expect(*wire, WireKind::Qubit, layout)?;
                layout[*wire] = WireKind::Bit;
            }
            Gate::Discard { wire } => {
                in_range(*wire)?;
                expect(*wire, WireKind::Bit, layout)?;
                layout.remove(*wire);
            }
            Gate::Assert { wire, .. } => {
                in_range(*wire)?;
                expect(*wire, WireKind::Qubit, layout)?;
                layout.remove(*wire);
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Unitary { kind, wires } => write!(f, "{}{:?}", kind.name(), wires),
            Gate::Init { value, wire } => write!(f, "init{}@{}", u8::from(*value), wire),
            Gate::Meas { wire } => write!(f, "meas@{wire}"),
            Gate::Discard { wire } => write!(f, "discard@{wire}"),
            Gate::Assert { value, wire } => write!(f, "assert{}@{}", u8::from(*value), wire),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("gate {gate}: wire {wire} out of range for {width} wires")]
    WireOutOfRange { gate: usize, wire: usize, width: usize },
    #[error("gate {gate}: wire {wire} used twice")]
    DuplicateWire { gate: usize, wire: usize },
    #[error("gate {gate}: {} takes {} wires, got {got}", kind.name(), kind.arity())]
    Arity { gate: usize, kind: UnitaryKind, got: usize },
    #[error("gate {gate}: wire {wire} must be a {expected:?}")]
    WireKind { gate: usize, wire: usize, expected: WireKind },
    #[error("declared output {declared:?} does not match computed output {computed:?}")]
    OutputMismatch { declared: Layout, computed: Layout },
    #[error("cannot sequence: output {left:?} does not match input {right:?}")]
    SequenceMismatch { left: Layout, right: Layout },
    #[error("gate {gate} ({name}) has no inverse")]
    NotInvertible { gate: usize, name: String },
}

/// A well-typed circuit. Construct through [`Circuit::new`],
/// [`Circuit::from_gates`] or the combinators; fields are private so the
/// wire trajectory invariant cannot be broken.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    input: Layout,
    output: Layout,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(input: Layout, output: Layout, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let c = Self::from_gates(input, gates)?;
        if c.output != output {
            return Err(CircuitError::OutputMismatch {
                declared: output,
                computed: c.output,
            });
        }
        Ok(c)
    }

    /// Type-checks `gates` starting from `input` and infers the output layout.
    pub fn from_gates(input: Layout, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut layout = input.0.clone();
        for (i, g) in gates.iter().enumerate() {
            g.step(i, &mut layout)?;
        }
        Ok(Circuit {
            input,
            output: Layout(layout),
            gates,
        })
    }

    pub fn id_circ(layout: Layout) -> Self {
        Circuit {
            output: layout.clone(),
            input: layout,
            gates: Vec::new(),
        }
    }

    pub fn id_qubits(n: usize) -> Self {
        Self::id_circ(Layout::qubits(n))
    }

    fn single(n: usize, gate: Gate) -> Result<Self, CircuitError> {
        Self::from_gates(Layout::qubits(n), vec![gate])
    }

    pub fn x_at(n: usize, i: usize) -> Result<Self, CircuitError> {
        Self::single(n, Gate::x(i))
    }

    pub fn h_at(n: usize, i: usize) -> Result<Self, CircuitError> {
        Self::single(n, Gate::h(i))
    }

    pub fn z_at(n: usize, i: usize) -> Result<Self, CircuitError> {
        Self::single(n, Gate::z(i))
    }

    /// Control `i`, target `j`.
    pub fn cnot_at(n: usize, i: usize, j: usize) -> Result<Self, CircuitError> {
        Self::single(n, Gate::cnot(i, j))
    }

    /// Controls `i`, `j`, target `k`.
    pub fn toffoli_at(n: usize, i: usize, j: usize, k: usize) -> Result<Self, CircuitError> {
        Self::single(n, Gate::toffoli(i, j, k))
    }

    /// `n` qubits in, `n + 1` out, with the new qubit at index `i`.
    pub fn init_at(value: bool, n: usize, i: usize) -> Result<Self, CircuitError> {
        Self::single(n, Gate::Init { value, wire: i })
    }

    /// `n` qubits in, `n - 1` out, removing index `i`.
    pub fn assert_at(value: bool, n: usize, i: usize) -> Result<Self, CircuitError> {
        Self::single(n, Gate::Assert { value, wire: i })
    }

    pub fn meas_at(n: usize, i: usize) -> Result<Self, CircuitError> {
        Self::single(n, Gate::Meas { wire: i })
    }

    pub fn input(&self) -> &Layout {
        &self.input
    }

    pub fn output(&self) -> &Layout {
        &self.output
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn in_width(&self) -> usize {
        self.input.len()
    }

    pub fn out_width(&self) -> usize {
        self.output.len()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Largest wire count reached at any point.
    pub fn peak_width(&self) -> usize {
        let mut w = self.in_width() as isize;
        let mut peak = w;
        for g in &self.gates {
            w += g.width_delta();
            peak = peak.max(w);
        }
        peak as usize
    }

    pub fn is_classical(&self) -> bool {
        self.gates.iter().all(Gate::is_classical)
    }

    pub fn count_inits(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Init { .. })).count()
    }

    pub fn count_asserts(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Assert { .. })).count()
    }

    /// Sequential composition `self ;; next`.
    pub fn in_seq(&self, next: &Circuit) -> Result<Circuit, CircuitError> {
        if self.output != next.input {
            return Err(CircuitError::SequenceMismatch {
                left: self.output.clone(),
                right: next.input.clone(),
            });
        }
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&next.gates);
        Ok(Circuit {
            input: self.input.clone(),
            output: next.output.clone(),
            gates,
        })
    }

    /// Parallel composition `self || other`: `other` occupies the wires after
    /// `self`'s block and runs once `self` has finished.
    pub fn in_par(&self, other: &Circuit) -> Circuit {
        let offset = self.out_width();
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().map(|g| g.shifted(offset)));
        Circuit {
            input: self.input.concat(&other.input),
            output: self.output.concat(&other.output),
            gates,
        }
    }

    /// `id_circ(k qubits) || self`.
    pub fn pad_front(&self, k: usize) -> Circuit {
        Circuit::id_qubits(k).in_par(self)
    }

    /// `self || id_circ(k qubits)`.
    pub fn pad_back(&self, k: usize) -> Circuit {
        self.in_par(&Circuit::id_qubits(k))
    }

    /// Gates in reverse order with each gate replaced by its inverse
    /// (init and assert trade places). Fails on measurement or discard.
    pub fn reversed(&self) -> Result<Circuit, CircuitError> {
        let gates = self
            .gates
            .iter()
            .enumerate()
            .rev()
            .map(|(i, g)| {
                g.inverse().ok_or_else(|| CircuitError::NotInvertible {
                    gate: i,
                    name: g.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Circuit::new(self.output.clone(), self.input.clone(), gates)
    }

    pub fn to_json(&self) -> String {
        json::to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Circuit, ParseError> {
        json::from_json(text)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} -> {}]", self.in_width(), self.out_width())?;
        for g in &self.gates {
            write!(f, " {g}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_type_sizes() {
        assert_eq!(WireType::One.size(), 0);
        assert_eq!(WireType::qubits(3).size(), 3);
        let t = WireType::tensor(WireType::Bit, WireType::tensor(WireType::One, WireType::Qubit));
        assert_eq!(t.size(), 2);
        assert_eq!(t.layout(), Layout::new(vec![WireKind::Bit, WireKind::Qubit]));
    }

    #[test]
    fn id_circ_is_empty_and_a_unit() {
        let id = Circuit::id_circ(WireType::Qubit.layout());
        assert_eq!(id.len(), 0);
        let c = Circuit::cnot_at(2, 0, 1).unwrap();
        assert_eq!(Circuit::id_qubits(2).in_seq(&c).unwrap(), c);
        assert_eq!(c.in_seq(&Circuit::id_qubits(2)).unwrap(), c);
    }

    #[test]
    fn in_seq_checks_types_and_adds_gates() {
        let a = Circuit::x_at(2, 0).unwrap();
        let b = Circuit::cnot_at(2, 0, 1).unwrap();
        assert_eq!(a.in_seq(&b).unwrap().len(), 2);
        let c = Circuit::x_at(3, 0).unwrap();
        assert!(matches!(a.in_seq(&c), Err(CircuitError::SequenceMismatch { .. })));
    }

    #[test]
    fn in_par_offsets_second_block() {
        let c = Circuit::x_at(1, 0).unwrap().in_par(&Circuit::x_at(1, 0).unwrap());
        assert_eq!(c.gates(), &[Gate::x(0), Gate::x(1)]);
        let unit = Circuit::id_circ(Layout::default());
        let x = Circuit::x_at(1, 0).unwrap();
        assert_eq!(unit.in_par(&x), x);
        // The offset is taken after the first block's inits.
        let grow = Circuit::init_at(false, 1, 1).unwrap();
        let par = grow.in_par(&Circuit::x_at(1, 0).unwrap());
        assert_eq!(par.gates()[1], Gate::x(2));
        assert_eq!(par.in_width(), 2);
        assert_eq!(par.out_width(), 3);
    }

    #[test]
    fn at_constructors_validate() {
        assert!(Circuit::x_at(1, 1).is_err());
        assert!(matches!(
            Circuit::cnot_at(2, 1, 1),
            Err(CircuitError::DuplicateWire { .. })
        ));
        assert!(Circuit::toffoli_at(3, 0, 1, 3).is_err());
        assert!(Circuit::init_at(true, 2, 2).is_ok());
        assert!(Circuit::init_at(true, 2, 3).is_err());
        assert!(Circuit::assert_at(true, 2, 2).is_err());
        let init = Circuit::init_at(true, 2, 1).unwrap();
        assert_eq!((init.in_width(), init.out_width()), (2, 3));
    }

    #[test]
    fn classical_wires_control_but_never_target() {
        let input = Layout::mixed(1, 1);
        assert!(Circuit::from_gates(input.clone(), vec![Gate::cnot(1, 0)]).is_ok());
        assert!(matches!(
            Circuit::from_gates(input.clone(), vec![Gate::cnot(0, 1)]),
            Err(CircuitError::WireKind { .. })
        ));
        assert!(Circuit::from_gates(input.clone(), vec![Gate::x(1)]).is_err());
        assert!(Circuit::from_gates(input.clone(), vec![Gate::Assert { value: false, wire: 1 }]).is_err());
        assert!(Circuit::from_gates(input.clone(), vec![Gate::Discard { wire: 0 }]).is_err());
        let c = Circuit::from_gates(
            Layout::qubits(1),
            vec![Gate::Meas { wire: 0 }, Gate::Discard { wire: 0 }],
        )
        .unwrap();
        assert_eq!(c.out_width(), 0);
    }

    #[test]
    fn declared_output_is_checked() {
        let err = Circuit::new(Layout::qubits(1), Layout::qubits(1), vec![Gate::Init { value: false, wire: 0 }]);
        assert!(matches!(err, Err(CircuitError::OutputMismatch { .. })));
    }

    #[test]
    fn reversal_swaps_init_and_assert() {
        let c = Circuit::from_gates(
            Layout::qubits(1),
            vec![Gate::Init { value: true, wire: 0 }, Gate::cnot(0, 1), Gate::Assert { value: true, wire: 0 }],
        )
        .unwrap();
        let r = c.reversed().unwrap();
        assert_eq!(r, c);
        assert_eq!(r.reversed().unwrap(), c);
        let m = Circuit::meas_at(1, 0).unwrap();
        assert!(matches!(m.reversed(), Err(CircuitError::NotInvertible { .. })));
    }

    #[test]
    fn peak_width_tracks_ancillae() {
        let c = Circuit::from_gates(
            Layout::qubits(2),
            vec![
                Gate::Init { value: false, wire: 1 },
                Gate::Init { value: false, wire: 2 },
                Gate::Assert { value: false, wire: 2 },
                Gate::Assert { value: false, wire: 1 },
            ],
        )
        .unwrap();
        assert_eq!(c.peak_width(), 4);
        assert_eq!(c.count_inits(), 2);
        assert_eq!(c.count_asserts(), 2);
    }
}
