//! Corpus suites behind the `self-test` command.

use rand::Rng;
use serde::Serialize;

use crate::adder::{check_adder_spec, Backend};
use crate::bexp::VarContext;
use crate::circuit::{Circuit, Layout};
use crate::corpus;
use crate::linalg::Tolerance;
use crate::oracle::{check_circuit_against, compile};
use crate::semantics::{superoperator_of, SemanticsMode};
use crate::symmetry::{cancel_assert_init, noop_on, noop_on_source, MissingPattern};
use crate::validity::{is_identity, is_self_inverse, is_valid, semantics_agree};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelfTestReport {
    pub seed: u64,
    pub corpus_size: usize,
    pub suites: Vec<SuiteResult>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.failed == 0)
    }
}

struct Tally {
    name: &'static str,
    passed: usize,
    failed: usize,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, passed: 0, failed: 0 }
    }

    fn record(&mut self, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }

    fn done(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            passed: self.passed,
            failed: self.failed,
        }
    }
}

fn superops_equal(a: &Circuit, b: &Circuit, tol: Tolerance) -> bool {
    SemanticsMode::BOTH.iter().all(|&m| {
        match (superoperator_of(a, m), superoperator_of(b, m)) {
            (Ok(x), Ok(y)) => x.approx_eq(&y, tol),
            _ => false,
        }
    })
}

/// Runs every suite. Expressions of up to five nodes over `x, y, z` are
/// checked exhaustively; the random suites draw `corpus_size` cases from
/// a generator seeded with `seed`.
pub fn run_self_test(corpus_size: usize, seed: u64, tol: Tolerance) -> SelfTestReport {
    let mut rng = corpus::rng(seed);
    let ctx = VarContext::new(&["x", "y", "z"]).expect("fixed context");
    let exprs = corpus::bexps_up_to(5, &["x", "y", "z"]);
    let mut suites = Vec::new();

    let mut correct = Tally::new("compile_correct");
    let mut valid = Tally::new("compile_valid");
    let mut symmetric = Tally::new("compile_noop_on_source");
    let mut compiled = Vec::with_capacity(exprs.len());
    for b in &exprs {
        let Ok((c, d)) = compile(b, &ctx) else {
            correct.record(false);
            continue;
        };
        correct.record(matches!(check_circuit_against(&c, b, &ctx, tol), Ok(None)));
        valid.record(is_valid(&c, tol).is_ok_and(|r| r.valid));
        symmetric.record(noop_on_source(&d, tol).unwrap_or(false));
        compiled.push(c);
    }
    suites.extend([correct.done(), valid.done(), symmetric.done()]);

    let mut self_inverse = Tally::new("compile_self_inverse");
    for _ in 0..corpus_size.min(compiled.len()) {
        let c = &compiled[rng.gen_range(0..compiled.len())];
        self_inverse.record(is_self_inverse(c, tol).unwrap_or(false));
    }
    suites.push(self_inverse.done());

    let mut inverse = Tally::new("derivation_inverse");
    let mut reversible_valid = Tally::new("reversible_implies_valid");
    let mut source_noop = Tally::new("derivation_noop_on_source");
    for _ in 0..corpus_size {
        let d = corpus::random_derivation(&mut rng, 5, 5);
        let ok = (|| {
            let c = d.realize().ok()?;
            let inv = d.invert().ok()?.realize().ok()?;
            let round = inv.in_seq(&c).ok()?;
            Some((is_identity(&round, tol).ok()?, is_valid(&c, tol).ok()?.valid))
        })();
        inverse.record(ok.is_some_and(|(id, _)| id));
        reversible_valid.record(ok.is_some_and(|(_, v)| v));
        source_noop.record(noop_on_source(&d, tol).unwrap_or(false));
    }
    suites.extend([inverse.done(), reversible_valid.done(), source_noop.done()]);

    let mut noop = Tally::new("gate_noop");
    for width in 1..=4 {
        for g in corpus::all_classical_gates(width) {
            let acted = crate::symmetry::acts_on(&g).expect("classical");
            let c = Circuit::from_gates(Layout::qubits(width), vec![g]).expect("in range");
            for i in (0..width).filter(|&i| i != acted) {
                noop.record(noop_on(&c, i, tol).unwrap_or(false));
            }
        }
    }
    for _ in 0..corpus_size {
        let width = rng.gen_range(2..=4);
        let i = rng.gen_range(0..width);
        let (l1, l2) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let a = corpus::random_unitary_circuit(&mut rng, width, l1, Some(i));
        let b = corpus::random_unitary_circuit(&mut rng, width, l2, Some(i));
        noop.record(noop_on(&a.in_seq(&b).expect("same width"), i, tol).unwrap_or(false));
    }
    suites.push(noop.done());

    let mut cancel = Tally::new("cancel_assert_init");
    for k in 0..2 * corpus_size {
        let case = corpus::assert_init_case(&mut rng, 5, k % 2 == 0);
        let outcome = cancel_assert_init(&case.circuit, tol, MissingPattern::Error);
        cancel.record(match outcome {
            Ok(out) => case.valid_prefix && superops_equal(&out, &case.circuit, tol),
            Err(_) => !case.valid_prefix,
        });
    }
    suites.push(cancel.done());

    let mut agree = Tally::new("validity_definitions_agree");
    for c in corpus::random_classical_corpus(&mut rng, corpus_size) {
        let verdicts = (semantics_agree(&c, tol), is_valid(&c, tol));
        agree.record(matches!(verdicts, (Ok(a), Ok(r)) if a == r.valid));
    }
    suites.push(agree.done());

    let mut adder = Tally::new("adder_spec");
    for (n, backend) in [(1, Backend::Density), (2, Backend::Density), (3, Backend::Basis), (4, Backend::Basis)] {
        adder.record(check_adder_spec(n, tol, backend).is_ok_and(|r| r.passed()));
    }
    suites.push(adder.done());

    let mut json = Tally::new("json_round_trip");
    for _ in 0..corpus_size {
        let len = rng.gen_range(0..=12);
        let c = corpus::random_circuit(&mut rng, 5, len);
        let text = c.to_json();
        json.record(Circuit::from_json(&text).is_ok_and(|back| back == c && back.to_json() == text));
    }
    suites.push(json.done());

    SelfTestReport {
        seed,
        corpus_size,
        suites,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let a = run_self_test(10, 5, Tolerance::default());
        assert!(a.passed(), "{a:?}");
        assert_eq!(a, run_self_test(10, 5, Tolerance::default()));
    }
}
