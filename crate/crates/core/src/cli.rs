//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure (report on stdout),
//! 2 usage, parse or I/O errors (message on stderr).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::adder::{adder_circ, run_adder_on};
use crate::bexp::{parse_bexp, VarContext};
use crate::circuit::Circuit;
use crate::linalg::Tolerance;
use crate::oracle::compile;
use crate::selftest::run_self_test;
use crate::semantics::{denote, index_bits, DensityMatrix, SemanticsMode};
use crate::symmetry::{source_noop_failures, SymmetryDerivation};
use crate::validity::is_valid;

#[derive(Debug, Parser)]
#[command(name = "ancillary", version, about = "Compile, simulate and verify ancilla-correct circuits")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Safe,
    Unsafe,
}

impl From<ModeArg> for SemanticsMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Safe => SemanticsMode::Safe,
            ModeArg::Unsafe => SemanticsMode::Unsafe,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compile a boolean expression to an oracle circuit.
    Compile {
        #[arg(long)]
        expr: String,
        /// Comma-separated variable order; wire 1 + i holds the i-th name.
        #[arg(long, default_value = "")]
        vars: String,
        /// Circuit JSON destination (stdout if omitted).
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        /// Also write the symmetry derivation here.
        #[arg(long)]
        derivation: Option<PathBuf>,
    },
    /// Run a circuit on a basis state.
    Simulate {
        circuit: PathBuf,
        /// Input bits, wire 0 first.
        #[arg(long)]
        bits: String,
        #[arg(long, value_enum, default_value = "safe")]
        mode: ModeArg,
    },
    /// Check that every assertion in a circuit holds on every input.
    CheckValidity { circuit: PathBuf },
    /// Check a symmetry derivation and its source wires.
    CheckSymmetry { derivation: PathBuf },
    /// Write the derivation of the inverse circuit.
    Invert {
        derivation: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Add two integers with the ripple-carry adder circuit.
    Adder {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        y: u64,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        cin: u8,
        /// Write the adder circuit JSON here.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Run the built-in corpus suites.
    SelfTest {
        #[arg(long, default_value_t = 100)]
        corpus_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A failure that ends the command with exit code 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

struct Ctx<'a> {
    json: bool,
    tol: Tolerance,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    /// Prints `value` as JSON or `human` as text, per `--json`.
    fn emit<T: Serialize>(&mut self, value: &T, human: &str) -> Result<(), UsageError> {
        if self.json {
            writeln!(self.out, "{}", serde_json::to_string(value)?)?;
        } else {
            writeln!(self.out, "{human}")?;
        }
        Ok(())
    }
}

fn tolerance_from_env() -> Result<Tolerance, UsageError> {
    match std::env::var("ANCILLARY_TOL") {
        Err(_) => Ok(Tolerance::default()),
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .and_then(Tolerance::new)
            .ok_or_else(|| UsageError(format!("ANCILLARY_TOL: not a non-negative number: {s:?}"))),
    }
}

fn read(path: &Path) -> Result<String, UsageError> {
    std::fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn write_or_print(ctx: &mut Ctx<'_>, path: Option<&Path>, text: &str) -> Result<(), UsageError> {
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| UsageError(format!("{}: {e}", p.display()))),
        None => Ok(writeln!(ctx.out, "{text}")?),
    }
}

fn load_circuit(path: &Path) -> Result<Circuit, UsageError> {
    Circuit::from_json(&read(path)?).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn load_derivation(path: &Path) -> Result<SymmetryDerivation, UsageError> {
    SymmetryDerivation::from_json(&read(path)?).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn parse_bits(s: &str) -> Result<Vec<bool>, UsageError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(UsageError(format!("--bits: expected 0 or 1, got {c:?}"))),
        })
        .collect()
}

/// Runs the command line `args` (program name first). Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    let tol = match tolerance_from_env() {
        Ok(t) => t,
        Err(UsageError(m)) => {
            let _ = writeln!(err, "error: {m}");
            return 2;
        }
    };
    let mut ctx = Ctx {
        json: cli.json,
        tol,
        out,
    };
    match dispatch(cli.command, &mut ctx) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(UsageError(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
    }
}

/// `Ok(false)` means a verification failure.
fn dispatch(command: Command, ctx: &mut Ctx<'_>) -> Result<bool, UsageError> {
    match command {
        Command::Compile {
            expr,
            vars,
            out,
            derivation,
        } => {
            let b = parse_bexp(&expr)?;
            let names = VarContext::parse_list(&vars)?;
            let (c, d) = compile(&b, &names)?;
            write_or_print(ctx, out.as_deref(), &c.to_json())?;
            if let Some(p) = derivation {
                write_or_print(ctx, Some(&p), &d.to_json())?;
            }
            if let Some(p) = &out {
                let report = json!({"wires": c.in_width(), "gates": c.len(), "ancillae": c.count_inits()});
                let human = format!(
                    "wrote {}: {} wires, {} gates, {} ancillae",
                    p.display(),
                    c.in_width(),
                    c.len(),
                    c.count_inits()
                );
                ctx.emit(&report, &human)?;
            }
            Ok(true)
        }
        Command::Simulate { circuit, bits, mode } => {
            let c = load_circuit(&circuit)?;
            let input = parse_bits(&bits)?;
            if input.len() != c.in_width() {
                return Err(UsageError(format!(
                    "--bits has {} bits but the circuit takes {}",
                    input.len(),
                    c.in_width()
                )));
            }
            let mode = SemanticsMode::from(mode);
            let rho = denote(&c, &DensityMatrix::basis(&input), mode)?;
            let trace = rho.trace().re;
            let basis = rho.as_basis_state(ctx.tol);
            let ok = (trace - 1.0).abs() <= ctx.tol.eps();
            let n = rho.n_wires();
            let entries: Vec<_> = rho
                .entries()
                .iter()
                .map(|&(r, col, v)| json!([bit_string(&index_bits(r, n)), bit_string(&index_bits(col, n)), v.re, v.im]))
                .collect();
            let report = json!({
                "mode": mode.to_string(),
                "input": bits,
                "output": basis.as_deref().map(bit_string),
                "trace": trace,
                "entries": entries,
            });
            let human = match &basis {
                Some(b) => bit_string(b),
                None if rho.nnz() == 0 => format!("zero state (trace {trace})"),
                None => {
                    let mut s = format!("mixed output, trace {trace}");
                    for &(r, col, v) in rho.entries() {
                        s.push_str(&format!(
                            "\n|{}><{}|  {:+.6}{:+.6}i",
                            bit_string(&index_bits(r, n)),
                            bit_string(&index_bits(col, n)),
                            v.re,
                            v.im
                        ));
                    }
                    s
                }
            };
            ctx.emit(&report, &human)?;
            Ok(ok)
        }
        Command::CheckValidity { circuit } => {
            let c = load_circuit(&circuit)?;
            let r = is_valid(&c, ctx.tol)?;
            let human = match r.witness {
                None => format!("valid (worst trace defect {:e})", r.worst_trace_defect),
                Some(_) if c.in_width() == 0 => format!("invalid: trace defect {}", r.worst_trace_defect),
                Some((i, j)) => {
                    let n = c.in_width();
                    format!(
                        "invalid: worst trace defect {} at input |{}><{}|",
                        r.worst_trace_defect,
                        bit_string(&index_bits(i, n)),
                        bit_string(&index_bits(j, n))
                    )
                }
            };
            ctx.emit(&r, &human)?;
            Ok(r.valid)
        }
        Command::CheckSymmetry { derivation } => {
            let d = load_derivation(&derivation)?;
            let frame = match d.check(ctx.tol) {
                Ok(f) => f,
                Err(e) => {
                    let report = json!({"well_formed": false, "error": e.to_string()});
                    ctx.emit(&report, &format!("not a valid derivation: {e}"))?;
                    return Ok(false);
                }
            };
            let failing = source_noop_failures(&d, ctx.tol)?;
            let validity = is_valid(&d.realize()?, ctx.tol)?;
            let sources: Vec<usize> = frame.sources().collect();
            let report = json!({
                "well_formed": true,
                "width": frame.width,
                "targets": frame.targets,
                "sources": sources,
                "valid": validity.valid,
                "worst_trace_defect": validity.worst_trace_defect,
                "noop_on_source": failing.is_empty(),
                "failing_sources": failing,
            });
            let human = format!(
                "derivation ok: {} wires, targets {:?}\nvalid: {}\nno-op on sources: {}",
                frame.width,
                frame.targets,
                validity.valid,
                if failing.is_empty() {
                    "yes".to_string()
                } else {
                    format!("no, fails on {failing:?}")
                }
            );
            ctx.emit(&report, &human)?;
            Ok(validity.valid && failing.is_empty())
        }
        Command::Invert { derivation, out } => {
            let d = load_derivation(&derivation)?;
            if let Err(e) = d.frame() {
                let report = json!({"well_formed": false, "error": e.to_string()});
                ctx.emit(&report, &format!("not a valid derivation: {e}"))?;
                return Ok(false);
            }
            write_or_print(ctx, out.as_deref(), &d.invert()?.to_json())?;
            Ok(true)
        }
        Command::Adder { n, x, y, cin, export } => {
            let c = adder_circ(n);
            if let Some(p) = export {
                write_or_print(ctx, Some(&p), &c.to_json())?;
            }
            let r = run_adder_on(&c, n, x, y, cin == 1)?;
            let human = format!(
                "sum {}\ncout {}\nasserts {}",
                r.sum,
                u8::from(r.cout),
                if r.asserts_ok { "ok" } else { "FAILED" }
            );
            ctx.emit(&r, &human)?;
            Ok(r.asserts_ok)
        }
        Command::SelfTest { corpus_size, seed } => {
            let report = run_self_test(corpus_size, seed, ctx.tol);
            let mut human = String::new();
            for s in &report.suites {
                human.push_str(&format!("{:<28} {:>6} passed {:>4} failed\n", s.name, s.passed, s.failed));
            }
            human.push_str(if report.passed() { "all suites passed" } else { "FAILURES" });
            ctx.emit(&report, &human)?;
            Ok(report.passed())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("ancillary").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_str(&["nonsense"]).0, 2);
        assert_eq!(run_str(&["compile", "--expr", "x &"]).0, 2);
        assert_eq!(run_str(&["compile", "--expr", "x & q", "--vars", "x"]).0, 2);
        assert_eq!(run_str(&["adder", "--n", "2", "--x", "9", "--y", "0"]).0, 2);
        assert_eq!(run_str(&["adder", "--n", "2", "--x", "1", "--y", "0", "--cin", "2"]).0, 2);
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("self-test"));
    }

    #[test]
    fn compile_to_stdout() {
        let (code, out, _) = run_str(&["compile", "--expr", "x", "--vars", "x"]);
        assert_eq!(code, 0);
        assert_eq!(Circuit::from_json(out.trim()).unwrap(), Circuit::cnot_at(2, 1, 0).unwrap());
    }

    #[test]
    fn adder_run() {
        let (code, out, _) = run_str(&["adder", "--n", "4", "--x", "9", "--y", "8", "--cin", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out, "sum 2\ncout 1\nasserts ok\n");
    }
}
