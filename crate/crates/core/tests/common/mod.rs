//! Dense reference semantics: every gate becomes a list of Kraus operators
//! on the full register, built as Kronecker chains of 2x2 (or 2x1, 1x2)
//! blocks. Independent of the sparse index arithmetic in the library.

#![allow(dead_code)]

use ancillary::linalg::{gates, CMatrix, C64};
use ancillary::{Circuit, Gate, SemanticsMode, UnitaryKind};

/// `⊗_w block(w)` over `n` wires, identity where no block is given.
pub fn chain(n: usize, blocks: &[(usize, CMatrix)]) -> CMatrix {
    let mut m = CMatrix::identity(1);
    for w in 0..n {
        let b = blocks
            .iter()
            .find(|(i, _)| *i == w)
            .map_or_else(|| CMatrix::identity(2), |(_, b)| b.clone());
        m = m.kron(&b);
    }
    m
}

fn bra(b: bool) -> CMatrix {
    gates::ket(b).adjoint()
}

/// Kraus operators of one gate applied to `n` wires.
pub fn kraus(g: &Gate, n: usize, mode: SemanticsMode) -> Vec<CMatrix> {
    let p = |b| gates::projector(b);
    match g {
        Gate::Unitary { kind, wires } => {
            let u = match kind {
                UnitaryKind::X => chain(n, &[(wires[0], gates::x())]),
                UnitaryKind::H => chain(n, &[(wires[0], gates::h())]),
                UnitaryKind::Z => chain(n, &[(wires[0], gates::z())]),
                UnitaryKind::Cnot => chain(n, &[(wires[0], p(false))])
                    .add(&chain(n, &[(wires[0], p(true)), (wires[1], gates::x())]))
                    .unwrap(),
                UnitaryKind::Toffoli => {
                    let both = chain(n, &[(wires[0], p(true)), (wires[1], p(true))]);
                    let flip = chain(n, &[(wires[0], p(true)), (wires[1], p(true)), (wires[2], gates::x())]);
                    chain(n, &[])
                        .add(&both.scale(C64::new(-1.0, 0.0)))
                        .unwrap()
                        .add(&flip)
                        .unwrap()
                }
            };
            vec![u]
        }
        Gate::Init { value, wire } => vec![chain(n + 1, &[(*wire, gates::ket(*value))])],
        Gate::Assert { value, wire } => match mode {
            SemanticsMode::Unsafe => vec![chain(n, &[(*wire, bra(*value))])],
            SemanticsMode::Safe => vec![chain(n, &[(*wire, bra(false))]), chain(n, &[(*wire, bra(true))])],
        },
        Gate::Meas { wire } => vec![chain(n, &[(*wire, p(false))]), chain(n, &[(*wire, p(true))])],
        Gate::Discard { wire } => vec![chain(n, &[(*wire, bra(false))]), chain(n, &[(*wire, bra(true))])],
    }
}

/// Reference denotation of `c` on a dense input matrix.
pub fn dense_denote(c: &Circuit, rho: &CMatrix, mode: SemanticsMode) -> CMatrix {
    let mut n = c.in_width();
    let mut rho = rho.clone();
    for g in c.gates() {
        let ks = kraus(g, n, mode);
        let mut next: Option<CMatrix> = None;
        for k in &ks {
            let term = k.matmul(&rho).unwrap().matmul(&k.adjoint()).unwrap();
            next = Some(match next {
                None => term,
                Some(acc) => acc.add(&term).unwrap(),
            });
        }
        rho = next.unwrap();
        n = (n as isize + g.width_delta()) as usize;
    }
    rho
}

/// Random density matrix `A A† / tr(A A†)` on `n` wires.
pub fn random_state<R: rand::Rng>(rng: &mut R, n: usize) -> CMatrix {
    let d = 1 << n;
    let data = (0..d * d)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let a = CMatrix::from_vec(d, d, data).unwrap();
    let m = a.matmul(&a.adjoint()).unwrap();
    let t = m.trace().unwrap();
    m.scale(t.inv())
}
