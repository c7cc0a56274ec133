//! Ancilla-correct reversible circuits: a mixed-state semantics with
//! assertions, validity checking, source-symmetry derivations, an oracle
//! compiler for boolean expressions and an n-bit ripple-carry adder.

pub mod adder;
pub mod bexp;
pub mod circuit;
pub mod cli;
pub mod corpus;
pub mod linalg;
pub mod oracle;
pub mod selftest;
pub mod semantics;
pub mod symmetry;
pub mod validity;

pub use bexp::{parse_bexp, Bexp, Valuation, VarContext};
pub use circuit::{Circuit, CircuitError, Gate, Layout, UnitaryKind, WireKind, WireType};
pub use linalg::{CMatrix, Tolerance, C64};
pub use semantics::{denote, DensityMatrix, SemanticsError, SemanticsMode, Superoperator};
pub use symmetry::{SymmetryDerivation, SymmetryError};
pub use validity::{circuits_equivalent, is_valid, ValidityError, ValidityReport};
