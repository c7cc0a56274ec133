//! Ripple-carry adder assembled from compiled one-bit oracles.
//!
//! External wires of the `n`-bit adder, top to bottom:
//! `[cout, sum_n, y_n, x_n, …, sum_1, y_1, x_1, cin]`, `2 + 3n` in all.
//! While the left half runs, carry `c_k` sits on a fresh ancilla directly
//! above `sum_{k+1}`; the right half uncomputes and asserts each one.

use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::bexp::{Bexp, VarContext};
use crate::circuit::Circuit;
use crate::linalg::Tolerance;
use crate::oracle::compile_circuit;
use crate::semantics::{denote, denote_basis, DensityMatrix, SemanticsError, SemanticsMode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdderError {
    #[error("operand {value} does not fit in {n} bits")]
    Overflow { value: u64, n: usize },
    #[error("adder of width {n} is too large for the {backend} backend (limit {limit})")]
    TooLarge { n: usize, backend: Backend, limit: usize },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Wire positions of the `n`-bit adder's external interface. Bit `k` runs
/// from 1 (least significant) to `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdderLayout {
    pub n: usize,
}

impl AdderLayout {
    pub fn new(n: usize) -> Self {
        AdderLayout { n }
    }

    pub fn width(self) -> usize {
        2 + 3 * self.n
    }

    pub fn cout(self) -> usize {
        0
    }

    pub fn cin(self) -> usize {
        1 + 3 * self.n
    }

    pub fn sum(self, k: usize) -> usize {
        assert!((1..=self.n).contains(&k), "bit {k} out of range");
        1 + 3 * (self.n - k)
    }

    pub fn y(self, k: usize) -> usize {
        self.sum(k) + 1
    }

    pub fn x(self, k: usize) -> usize {
        self.sum(k) + 2
    }

    /// Basis input for integer operands. `sum` is the initial contents of
    /// the sum register.
    pub fn encode(self, x: u64, y: u64, cin: bool, sum: u64, cout: bool) -> Result<Vec<bool>, AdderError> {
        for v in [x, y, sum] {
            if self.n < 64 && v >> self.n != 0 {
                return Err(AdderError::Overflow { value: v, n: self.n });
            }
        }
        let mut bits = vec![false; self.width()];
        bits[self.cout()] = cout;
        bits[self.cin()] = cin;
        for k in 1..=self.n {
            let m = 1u64 << (k - 1);
            bits[self.x(k)] = x & m != 0;
            bits[self.y(k)] = y & m != 0;
            bits[self.sum(k)] = sum & m != 0;
        }
        Ok(bits)
    }

    pub fn decode(self, bits: &[bool]) -> AdderValues {
        assert_eq!(bits.len(), self.width(), "bit vector has the wrong width");
        let read = |pos: &dyn Fn(usize) -> usize| {
            (1..=self.n).fold(0u64, |acc, k| acc | (u64::from(bits[pos(k)]) << (k - 1)))
        };
        AdderValues {
            x: read(&|k| self.x(k)),
            y: read(&|k| self.y(k)),
            sum: read(&|k| self.sum(k)),
            cin: bits[self.cin()],
            cout: bits[self.cout()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AdderValues {
    pub x: u64,
    pub y: u64,
    pub sum: u64,
    pub cin: bool,
    pub cout: bool,
}

fn sum_expr() -> Bexp {
    Bexp::xor(Bexp::xor(Bexp::var("x"), Bexp::var("y")), Bexp::var("cin"))
}

fn carry_expr() -> Bexp {
    Bexp::xor(
        Bexp::and(Bexp::var("cin"), Bexp::xor(Bexp::var("x"), Bexp::var("y"))),
        Bexp::and(Bexp::var("x"), Bexp::var("y")),
    )
}

/// `[sum, y, x, cin]`: `sum ^= x ⊕ y ⊕ cin`.
pub fn adder_sum() -> Circuit {
    static C: OnceLock<Circuit> = OnceLock::new();
    C.get_or_init(|| {
        let ctx = VarContext::new(&["y", "x", "cin"]).expect("fixed context");
        compile_circuit(&sum_expr(), &ctx).expect("closed expression")
    })
    .clone()
}

/// `[cout, sum, y, x, cin]`: `cout ^= (cin ∧ (x ⊕ y)) ⊕ (x ∧ y)`.
pub fn adder_carry() -> Circuit {
    static C: OnceLock<Circuit> = OnceLock::new();
    C.get_or_init(|| {
        let ctx = VarContext::new(&["sum", "y", "x", "cin"]).expect("fixed context");
        compile_circuit(&carry_expr(), &ctx).expect("closed expression")
    })
    .clone()
}

/// One-bit full adder on `[cout, sum, y, x, cin]`.
pub fn adder_1() -> Circuit {
    adder_carry()
        .in_seq(&adder_sum().pad_front(1))
        .expect("five-wire blocks compose")
}

/// Classical meaning of [`adder_1`] on `[cout, sum, y, x, cin]`.
pub fn adder_1_spec(bits: [bool; 5]) -> [bool; 5] {
    let [cout, sum, y, x, cin] = bits;
    [cout ^ ((cin & (x ^ y)) ^ (x & y)), sum ^ (x ^ y ^ cin), y, x, cin]
}

/// `1 + 3n` wires to `1 + 4n`: computes sums and carries of the low `n`
/// bits, leaving carry `c_k` on a new wire above `sum_{k+1}`'s block.
pub fn adder_left(n: usize) -> Circuit {
    if n == 0 {
        return Circuit::id_qubits(1);
    }
    adder_left(n - 1)
        .pad_front(3)
        .in_seq(&Circuit::init_at(false, 4 * n, 0).expect("index 0 is in range"))
        .and_then(|c| c.in_seq(&adder_1().pad_back(4 * (n - 1))))
        .expect("adder_left blocks compose")
}

/// `1 + 4n` wires to `1 + 3n`: uncomputes and discards the carries that
/// [`adder_left`] created.
pub fn adder_right(n: usize) -> Circuit {
    if n == 0 {
        return Circuit::id_qubits(1);
    }
    adder_carry()
        .pad_back(4 * (n - 1))
        .in_seq(&Circuit::assert_at(false, 4 * n + 1, 0).expect("index 0 is in range"))
        .and_then(|c| c.in_seq(&adder_right(n - 1).pad_front(3)))
        .expect("adder_right blocks compose")
}

/// The `n`-bit adder on `2 + 3n` wires.
pub fn adder_circ(n: usize) -> Circuit {
    if n == 0 {
        return Circuit::id_qubits(2);
    }
    adder_left(n - 1)
        .pad_front(4)
        .in_seq(&adder_1().pad_back(4 * (n - 1)))
        .and_then(|c| c.in_seq(&adder_right(n - 1).pad_front(4)))
        .expect("adder_circ blocks compose")
}

/// Classical ripple-carry on the adder layout: every `sum_k` is XORed with
/// its sum bit and `cout` with the final carry; everything else is left
/// alone.
pub fn compute_adder_n(n: usize, bits: &[bool]) -> Vec<bool> {
    let l = AdderLayout::new(n);
    assert_eq!(bits.len(), l.width(), "bit vector has the wrong width");
    let mut out = bits.to_vec();
    if n == 0 {
        return out;
    }
    let mut carry = bits[l.cin()];
    for k in 1..=n {
        let (x, y) = (bits[l.x(k)], bits[l.y(k)]);
        out[l.sum(k)] ^= x ^ y ^ carry;
        carry = (carry & (x ^ y)) ^ (x & y);
    }
    out[l.cout()] ^= carry;
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Full density-matrix denotation in both modes.
    Density,
    /// Bit-level simulation with assertion tracking.
    Basis,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Density => "density",
            Backend::Basis => "basis",
        })
    }
}

/// Largest `n` each backend accepts in [`check_adder_spec`].
pub const MAX_DENSITY_N: usize = 2;
pub const MAX_BASIS_N: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdderCheck {
    pub n: usize,
    pub backend: Backend,
    pub inputs: u64,
    pub failures: u64,
    /// First failing input, as a bit string.
    pub first_failure: Option<String>,
}

impl AdderCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Runs `adder_circ(n)` on every basis input and compares with
/// [`compute_adder_n`]. The density backend checks both semantics.
pub fn check_adder_spec(n: usize, tol: Tolerance, backend: Backend) -> Result<AdderCheck, AdderError> {
    let limit = match backend {
        Backend::Density => MAX_DENSITY_N,
        Backend::Basis => MAX_BASIS_N,
    };
    if n > limit {
        return Err(AdderError::TooLarge { n, backend, limit });
    }
    let c = adder_circ(n);
    let width = AdderLayout::new(n).width();
    let mut failures = 0;
    let mut first_failure = None;
    for k in 0..1u64 << width {
        let bits = crate::semantics::index_bits(k, width);
        let expected = compute_adder_n(n, &bits);
        let ok = match backend {
            Backend::Basis => {
                let (out, valid) = denote_basis(&c, &bits)?;
                valid && out == expected
            }
            Backend::Density => {
                let rho = DensityMatrix::basis(&bits);
                let want = DensityMatrix::basis(&expected);
                let mut ok = true;
                for mode in SemanticsMode::BOTH {
                    ok &= denote(&c, &rho, mode)?.approx_eq(&want, tol);
                }
                ok
            }
        };
        if !ok {
            failures += 1;
            first_failure.get_or_insert_with(|| bits.iter().map(|&b| if b { '1' } else { '0' }).collect());
        }
    }
    Ok(AdderCheck {
        n,
        backend,
        inputs: 1 << width,
        failures,
        first_failure,
    })
}

/// Result of adding two integers with the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AdderRun {
    pub n: usize,
    pub x: u64,
    pub y: u64,
    pub cin: bool,
    pub sum: u64,
    pub cout: bool,
    pub asserts_ok: bool,
}

/// Adds `x + y + cin` on `adder_circ(n)` with zeroed sum and carry-out
/// registers, by bit-level simulation.
pub fn run_adder(n: usize, x: u64, y: u64, cin: bool) -> Result<AdderRun, AdderError> {
    run_adder_on(&adder_circ(n), n, x, y, cin)
}

/// Same as [`run_adder`] on a prebuilt `adder_circ(n)`.
pub fn run_adder_on(c: &Circuit, n: usize, x: u64, y: u64, cin: bool) -> Result<AdderRun, AdderError> {
    let l = AdderLayout::new(n);
    let (out, asserts_ok) = denote_basis(c, &l.encode(x, y, cin, 0, false)?)?;
    let v = l.decode(&out);
    Ok(AdderRun {
        n,
        x,
        y,
        cin,
        sum: v.sum,
        cout: v.cout,
        asserts_ok,
    })
}
