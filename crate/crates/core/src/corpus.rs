//! Deterministic generators for test and self-test corpora.
//!
//! Every random generator takes the RNG explicitly; [`rng`] builds the
//! seeded ChaCha generator used throughout.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bexp::Bexp;
use crate::circuit::{Circuit, Gate, Layout, UnitaryKind, WireKind};
use crate::symmetry::{acts_on, Frame, SymmetryDerivation};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every expression with at most `max_size` nodes over `vars` and the
/// constants, grouped by increasing size.
pub fn bexps_up_to(max_size: usize, vars: &[&str]) -> Vec<Bexp> {
    let mut by_size: Vec<Vec<Bexp>> = vec![Vec::new()];
    for size in 1..=max_size {
        let mut level = Vec::new();
        if size == 1 {
            level.extend(vars.iter().map(|v| Bexp::var(v)));
            level.push(Bexp::True);
            level.push(Bexp::False);
        } else {
            level.extend(by_size[size - 1].iter().cloned().map(Bexp::not));
            for left in 1..size - 1 {
                let right = size - 1 - left;
                for a in &by_size[left] {
                    for b in &by_size[right] {
                        level.push(Bexp::and(a.clone(), b.clone()));
                        level.push(Bexp::xor(a.clone(), b.clone()));
                    }
                }
            }
        }
        by_size.push(level);
    }
    by_size.into_iter().flatten().collect()
}

fn distinct<R: Rng>(rng: &mut R, width: usize, k: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..width).collect();
    all.shuffle(rng);
    all.truncate(k);
    all
}

/// A random X, CNOT or Toffoli on `width` wires (X only if `width < 2`).
pub fn random_classical_gate<R: Rng>(rng: &mut R, width: usize) -> Gate {
    assert!(width > 0, "no wires to act on");
    let max_arity = width.min(3);
    let k = rng.gen_range(1..=max_arity);
    let ws = distinct(rng, width, k);
    match ws.len() {
        1 => Gate::x(ws[0]),
        2 => Gate::cnot(ws[0], ws[1]),
        _ => Gate::toffoli(ws[0], ws[1], ws[2]),
    }
}

/// Every X, CNOT and Toffoli on `width` wires, controls in either order.
pub fn all_classical_gates(width: usize) -> Vec<Gate> {
    let mut out = Vec::new();
    for a in 0..width {
        out.push(Gate::x(a));
        for b in (0..width).filter(|&b| b != a) {
            out.push(Gate::cnot(a, b));
            for c in (0..width).filter(|&c| c != a && c != b) {
                out.push(Gate::toffoli(a, b, c));
            }
        }
    }
    out
}

/// A sequence of classical unitaries on `width` wires, none of which
/// changes wire `keep` (when given).
pub fn random_unitary_circuit<R: Rng>(rng: &mut R, width: usize, len: usize, keep: Option<usize>) -> Circuit {
    let mut gates = Vec::with_capacity(len);
    while gates.len() < len {
        let g = random_classical_gate(rng, width);
        if keep.is_some_and(|k| acts_on(&g).ok() == Some(k)) {
            continue;
        }
        gates.push(g);
    }
    Circuit::from_gates(Layout::qubits(width), gates).expect("gates are in range")
}

/// A gate allowed by the conjugation rule in `frame`.
fn conjugating_gate<R: Rng>(rng: &mut R, frame: &Frame) -> Gate {
    for _ in 0..32 {
        let g = random_classical_gate(rng, frame.width);
        let acted = acts_on(&g).expect("classical");
        let Gate::Unitary { wires, .. } = &g else { unreachable!() };
        if frame.is_target(acted) || wires.iter().all(|&w| !frame.is_target(w)) {
            return g;
        }
    }
    Gate::x(rng.gen_range(0..frame.width))
}

/// A gate acting on one of `frame`'s targets.
fn target_gate<R: Rng>(rng: &mut R, frame: &Frame) -> Gate {
    let t = *frame.targets.choose(rng).expect("frame has a target");
    let others: Vec<usize> = (0..frame.width).filter(|&w| w != t).collect();
    let k = rng.gen_range(0..=others.len().min(2));
    let mut controls: Vec<usize> = others.choose_multiple(rng, k).copied().collect();
    controls.push(t);
    match controls.len() {
        1 => Gate::x(t),
        2 => Gate::cnot(controls[0], t),
        _ => Gate::toffoli(controls[0], controls[1], t),
    }
}

/// `c` with a self-cancelling pair spliced in at a random point: `g ;; g`
/// for a classical `g`, or `init b i ;; assert b i`.
pub fn pad_with_identity<R: Rng>(rng: &mut R, c: &Circuit) -> Circuit {
    let mut widths = vec![c.in_width()];
    for g in c.gates() {
        widths.push((*widths.last().unwrap() as isize + g.width_delta()) as usize);
    }
    let pos = rng.gen_range(0..widths.len());
    let w = widths[pos];
    let pair = if w == 0 || rng.gen_bool(0.3) {
        let value = rng.gen_bool(0.5);
        let wire = rng.gen_range(0..=w);
        vec![Gate::Init { value, wire }, Gate::Assert { value, wire }]
    } else {
        let g = random_classical_gate(rng, w);
        vec![g.clone(), g]
    };
    let mut gates = c.gates().to_vec();
    gates.splice(pos..pos, pair);
    Circuit::new(c.input().clone(), c.output().clone(), gates).expect("pair preserves typing")
}

/// A random well-formed derivation: an identity on up to `max_width`
/// wires with random targets, wrapped in up to `max_depth` rules.
pub fn random_derivation<R: Rng>(rng: &mut R, max_depth: usize, max_width: usize) -> SymmetryDerivation {
    let width = rng.gen_range(1..=max_width);
    let targets: Vec<usize> = (0..width).filter(|_| rng.gen_bool(0.4)).collect();
    let mut d = SymmetryDerivation::identity(width, targets);
    let depth = rng.gen_range(0..=max_depth);
    for _ in 0..depth {
        let frame = d.frame().expect("generated derivations are well formed");
        let has_target = !frame.targets.is_empty();
        let sources: Vec<usize> = frame.sources().collect();
        d = match rng.gen_range(0..5) {
            1 if has_target => SymmetryDerivation::target_left(target_gate(rng, &frame), d),
            2 if has_target => SymmetryDerivation::target_right(d, target_gate(rng, &frame)),
            3 if frame.width >= 2 && !sources.is_empty() => {
                SymmetryDerivation::ancilla(rng.gen_bool(0.5), *sources.choose(rng).unwrap(), d)
            }
            4 => {
                let c = d.realize().expect("well formed");
                SymmetryDerivation::witness(pad_with_identity(rng, &c), d)
            }
            _ => SymmetryDerivation::conjugate(conjugating_gate(rng, &frame), d),
        };
    }
    d
}

/// Random circuit over X, CNOT, Toffoli, init and assert whose wire count
/// stays within `1..=max_width`. Assertions are placed blindly, so many
/// such circuits are invalid.
pub fn random_init_assert_circuit<R: Rng>(rng: &mut R, max_width: usize, len: usize) -> Circuit {
    let start = rng.gen_range(1..=max_width);
    let mut w = start;
    let mut gates = Vec::with_capacity(len);
    for _ in 0..len {
        let g = match rng.gen_range(0..6) {
            0 if w < max_width => Gate::Init {
                value: rng.gen_bool(0.5),
                wire: rng.gen_range(0..=w),
            },
            1 if w > 1 => Gate::Assert {
                value: rng.gen_bool(0.5),
                wire: rng.gen_range(0..w),
            },
            _ => random_classical_gate(rng, w),
        };
        w = (w as isize + g.width_delta()) as usize;
        gates.push(g);
    }
    Circuit::from_gates(Layout::qubits(start), gates).expect("widths tracked")
}

/// `c` with the value of one of its assertions flipped, if it has any.
pub fn break_an_assertion<R: Rng>(rng: &mut R, c: &Circuit) -> Option<Circuit> {
    let asserts: Vec<usize> = c
        .gates()
        .iter()
        .enumerate()
        .filter(|(_, g)| matches!(g, Gate::Assert { .. }))
        .map(|(i, _)| i)
        .collect();
    let &i = asserts.choose(rng)?;
    let mut gates = c.gates().to_vec();
    if let Gate::Assert { value, .. } = &mut gates[i] {
        *value = !*value;
    }
    Some(Circuit::new(c.input().clone(), c.output().clone(), gates).expect("same shape"))
}

/// Classical circuits for comparing the two validity judgments: a third
/// realised derivations (valid by construction), a third the same with one
/// assertion flipped, a third blind random init/assert circuits.
pub fn random_classical_corpus<R: Rng>(rng: &mut R, count: usize) -> Vec<Circuit> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let c = match out.len() % 3 {
            0 => random_derivation(rng, 5, 5).realize().expect("well formed"),
            1 => {
                let d = SymmetryDerivation::ancilla(rng.gen_bool(0.5), 0, random_derivation(rng, 4, 4).pad_source());
                let c = d.realize().expect("well formed");
                break_an_assertion(rng, &c).unwrap_or(c)
            }
            _ => {
                let len = rng.gen_range(1..=12);
                random_init_assert_circuit(rng, 4, len)
            }
        };
        out.push(c);
    }
    out
}

/// A circuit ending in `assert_at b i ;; init_at b i`.
#[derive(Debug, Clone)]
pub struct AssertInitCase {
    pub circuit: Circuit,
    /// Whether the prefix up to and including the assertion is valid by
    /// construction.
    pub valid_prefix: bool,
}

/// `U ;; init b i ;; body ;; [corruption] ;; assert b i ;; init b i` with
/// `body` realising a derivation in which `i` is a source. Without the
/// corruption the assertion is valid; the corruption is `X(i)` or a CNOT
/// from another wire onto `i`, either of which makes it fail on some input.
pub fn assert_init_case<R: Rng>(rng: &mut R, max_width: usize, valid_prefix: bool) -> AssertInitCase {
    let outer = rng.gen_range(1..max_width);
    let value = rng.gen_bool(0.5);
    let inner = random_derivation(rng, 4, outer).pad_source();
    // `inner` has width `outer_inner + 1` with source 0; embed it so its
    // wire 0 is the new ancilla and the remaining wires are the outer ones.
    let inner_width = inner.frame().expect("well formed").width;
    let body = inner.realize().expect("well formed").pad_back(outer + 1 - inner_width);
    let i = 0;
    let prefix_len = rng.gen_range(0..=3);
    let mut gates: Vec<Gate> = random_unitary_circuit(rng, outer, prefix_len, None).gates().to_vec();
    gates.push(Gate::Init { value, wire: i });
    gates.extend_from_slice(body.gates());
    if !valid_prefix {
        let other = rng.gen_range(1..=outer);
        gates.push(if rng.gen_bool(0.5) { Gate::x(i) } else { Gate::cnot(other, i) });
    }
    gates.push(Gate::Assert { value, wire: i });
    gates.push(Gate::Init { value, wire: i });
    let circuit = Circuit::from_gates(Layout::qubits(outer), gates).expect("typed by construction");
    AssertInitCase { circuit, valid_prefix }
}

/// Random circuit over the full gate set, including measurement, discard
/// and bit wires. For serialization tests; not necessarily valid.
pub fn random_circuit<R: Rng>(rng: &mut R, max_width: usize, len: usize) -> Circuit {
    let start = rng.gen_range(0..=max_width);
    let mut layout = vec![WireKind::Qubit; start];
    for k in layout.iter_mut() {
        if rng.gen_bool(0.2) {
            *k = WireKind::Bit;
        }
    }
    let input = Layout::new(layout.clone());
    let mut gates = Vec::with_capacity(len);
    for _ in 0..len {
        let qubits: Vec<usize> = (0..layout.len()).filter(|&w| layout[w] == WireKind::Qubit).collect();
        let bits: Vec<usize> = (0..layout.len()).filter(|&w| layout[w] == WireKind::Bit).collect();
        let choice = rng.gen_range(0..8);
        let g = match choice {
            0 if layout.len() < max_width => {
                let wire = rng.gen_range(0..=layout.len());
                layout.insert(wire, WireKind::Qubit);
                Gate::Init {
                    value: rng.gen_bool(0.5),
                    wire,
                }
            }
            1 if !qubits.is_empty() => {
                let wire = *qubits.choose(rng).unwrap();
                layout.remove(wire);
                Gate::Assert {
                    value: rng.gen_bool(0.5),
                    wire,
                }
            }
            2 if !qubits.is_empty() => {
                let wire = *qubits.choose(rng).unwrap();
                layout[wire] = WireKind::Bit;
                Gate::Meas { wire }
            }
            3 if !bits.is_empty() => {
                let wire = *bits.choose(rng).unwrap();
                layout.remove(wire);
                Gate::Discard { wire }
            }
            4 | 5 if !qubits.is_empty() => {
                let wire = *qubits.choose(rng).unwrap();
                if choice == 4 {
                    Gate::h(wire)
                } else {
                    Gate::z(wire)
                }
            }
            _ if !qubits.is_empty() => {
                let target = *qubits.choose(rng).unwrap();
                let others: Vec<usize> = (0..layout.len()).filter(|&w| w != target).collect();
                let k = rng.gen_range(0..=others.len().min(2));
                let mut wires: Vec<usize> = others.choose_multiple(rng, k).copied().collect();
                wires.push(target);
                let kind = [UnitaryKind::X, UnitaryKind::Cnot, UnitaryKind::Toffoli][k];
                Gate::Unitary { kind, wires }
            }
            _ => continue,
        };
        gates.push(g);
    }
    Circuit::from_gates(input, gates).expect("typed by construction")
}
