//! JSON interchange format for circuits.
//!
//! ```json
//! {"in":{"qubits":2,"bits":0},"out":{"qubits":2,"bits":0},"gates":[{"g":"CNOT","ws":[0,1]}]}
//! ```
//!
//! A wire type is `{"qubits":n,"bits":m}` (qubits first). Layouts that
//! interleave bits and qubits are written `{"layout":"qbq"}` instead.
//! Output is compact with fixed field order, so `to_json(from_json(s)) == s`
//! for any string this module produced.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Circuit, CircuitError, Gate, Layout, UnitaryKind, WireKind};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed circuit JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("ill-typed circuit: {0}")]
    Type(#[from] CircuitError),
    #[error("bad layout string {0:?}: expected only 'q' and 'b'")]
    Layout(String),
}

impl From<serde_json::Error> for ParseError {
    fn from(e: serde_json::Error) -> Self {
        ParseError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum LayoutRepr {
    Counts(Counts),
    Explicit(Explicit),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct Counts {
    qubits: usize,
    bits: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct Explicit {
    layout: String,
}

impl From<&Layout> for LayoutRepr {
    fn from(l: &Layout) -> Self {
        let qubits = l.kinds().iter().take_while(|&&k| k == WireKind::Qubit).count();
        if l.kinds()[qubits..].iter().all(|&k| k == WireKind::Bit) {
            LayoutRepr::Counts(Counts {
                qubits,
                bits: l.len() - qubits,
            })
        } else {
            let layout = l
                .kinds()
                .iter()
                .map(|k| match k {
                    WireKind::Qubit => 'q',
                    WireKind::Bit => 'b',
                })
                .collect();
            LayoutRepr::Explicit(Explicit { layout })
        }
    }
}

impl TryFrom<LayoutRepr> for Layout {
    type Error = ParseError;

    fn try_from(r: LayoutRepr) -> Result<Self, ParseError> {
        match r {
            LayoutRepr::Counts(Counts { qubits, bits }) => Ok(Layout::mixed(qubits, bits)),
            LayoutRepr::Explicit(Explicit { layout }) => layout
                .chars()
                .map(|c| match c {
                    'q' => Ok(WireKind::Qubit),
                    'b' => Ok(WireKind::Bit),
                    _ => Err(ParseError::Layout(layout.clone())),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Layout::new),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "g", deny_unknown_fields)]
pub(crate) enum GateRepr {
    X { ws: Vec<usize> },
    H { ws: Vec<usize> },
    Z { ws: Vec<usize> },
    #[serde(rename = "CNOT")]
    Cnot { ws: Vec<usize> },
    Toffoli { ws: Vec<usize> },
    #[serde(rename = "init")]
    Init { val: bool, w: usize },
    #[serde(rename = "assert")]
    Assert { val: bool, w: usize },
    #[serde(rename = "meas")]
    Meas { w: usize },
    #[serde(rename = "discard")]
    Discard { w: usize },
}

impl From<&Gate> for GateRepr {
    fn from(g: &Gate) -> Self {
        match g {
            Gate::Unitary { kind, wires } => {
                let ws = wires.clone();
                match kind {
                    UnitaryKind::X => GateRepr::X { ws },
                    UnitaryKind::H => GateRepr::H { ws },
                    UnitaryKind::Z => GateRepr::Z { ws },
                    UnitaryKind::Cnot => GateRepr::Cnot { ws },
                    UnitaryKind::Toffoli => GateRepr::Toffoli { ws },
                }
            }
            Gate::Init { value, wire } => GateRepr::Init { val: *value, w: *wire },
            Gate::Assert { value, wire } => GateRepr::Assert { val: *value, w: *wire },
            Gate::Meas { wire } => GateRepr::Meas { w: *wire },
            Gate::Discard { wire } => GateRepr::Discard { w: *wire },
        }
    }
}

impl From<GateRepr> for Gate {
    fn from(r: GateRepr) -> Self {
        let unitary = |kind, wires| Gate::Unitary { kind, wires };
        match r {
            GateRepr::X { ws } => unitary(UnitaryKind::X, ws),
            GateRepr::H { ws } => unitary(UnitaryKind::H, ws),
            GateRepr::Z { ws } => unitary(UnitaryKind::Z, ws),
            GateRepr::Cnot { ws } => unitary(UnitaryKind::Cnot, ws),
            GateRepr::Toffoli { ws } => unitary(UnitaryKind::Toffoli, ws),
            GateRepr::Init { val, w } => Gate::Init { value: val, wire: w },
            GateRepr::Assert { val, w } => Gate::Assert { value: val, wire: w },
            GateRepr::Meas { w } => Gate::Meas { wire: w },
            GateRepr::Discard { w } => Gate::Discard { wire: w },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct CircuitRepr {
    #[serde(rename = "in")]
    input: LayoutRepr,
    #[serde(rename = "out")]
    output: LayoutRepr,
    gates: Vec<GateRepr>,
}

impl From<&Circuit> for CircuitRepr {
    fn from(c: &Circuit) -> Self {
        CircuitRepr {
            input: c.input().into(),
            output: c.output().into(),
            gates: c.gates().iter().map(GateRepr::from).collect(),
        }
    }
}

impl TryFrom<CircuitRepr> for Circuit {
    type Error = ParseError;

    fn try_from(r: CircuitRepr) -> Result<Self, ParseError> {
        let gates = r.gates.into_iter().map(Gate::from).collect();
        Ok(Circuit::new(r.input.try_into()?, r.output.try_into()?, gates)?)
    }
}

impl Serialize for Circuit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CircuitRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = CircuitRepr::deserialize(d)?;
        Circuit::try_from(repr).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Gate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GateRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Gate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        GateRepr::deserialize(d).map(Gate::from)
    }
}

pub(crate) fn to_json(c: &Circuit) -> String {
    serde_json::to_string(&CircuitRepr::from(c)).expect("circuit serialization is infallible")
}

pub(crate) fn from_json(text: &str) -> Result<Circuit, ParseError> {
    let repr: CircuitRepr = serde_json::from_str(text)?;
    repr.try_into()
}
