//! Python bindings: circuits, the oracle compiler, validity and symmetry
//! checks, and the adder.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ancillary::adder::{self, Backend};
use ancillary::linalg::Tolerance;
use ancillary::semantics::index_bits;
use ancillary::symmetry::{self, SymmetryDerivation};
use ancillary::{oracle, validity, DensityMatrix, SemanticsMode, Valuation, VarContext};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn tol(eps: Option<f64>) -> PyResult<Tolerance> {
    match eps {
        None => Ok(Tolerance::from_env()),
        Some(e) => Tolerance::new(e).ok_or_else(|| PyValueError::new_err("tolerance must be non-negative")),
    }
}

fn mode(name: &str) -> PyResult<SemanticsMode> {
    match name {
        "safe" => Ok(SemanticsMode::Safe),
        "unsafe" => Ok(SemanticsMode::Unsafe),
        _ => Err(PyValueError::new_err(format!("mode must be 'safe' or 'unsafe', got {name:?}"))),
    }
}

fn bits_of(s: &str) -> PyResult<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(PyValueError::new_err(format!("expected 0 or 1, got {c:?}"))),
        })
        .collect()
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// A typed circuit.
#[pyclass(name = "Circuit", module = "ancillary_py", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyCircuit(ancillary::Circuit);

#[pymethods]
impl PyCircuit {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        ancillary::Circuit::from_json(text).map(PyCircuit).map_err(err)
    }

    /// Identity on `n` qubits.
    #[staticmethod]
    fn identity(n: usize) -> Self {
        PyCircuit(ancillary::Circuit::id_qubits(n))
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn in_width(&self) -> usize {
        self.0.in_width()
    }

    #[getter]
    fn out_width(&self) -> usize {
        self.0.out_width()
    }

    #[getter]
    fn peak_width(&self) -> usize {
        self.0.peak_width()
    }

    fn gates(&self) -> Vec<String> {
        self.0.gates().iter().map(ToString::to_string).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// `self ;; other`
    fn then(&self, other: &PyCircuit) -> PyResult<Self> {
        self.0.in_seq(&other.0).map(PyCircuit).map_err(err)
    }

    /// `self || other`
    fn par(&self, other: &PyCircuit) -> Self {
        PyCircuit(self.0.in_par(&other.0))
    }

    fn reversed(&self) -> PyResult<Self> {
        self.0.reversed().map(PyCircuit).map_err(err)
    }

    /// Runs the circuit on a basis state given as a bit string. Returns
    /// `(output_bits, trace)`; the bits are `None` when the output is not a
    /// single basis state.
    #[pyo3(signature = (bits, mode = "safe"))]
    fn simulate(&self, bits: &str, mode: &str) -> PyResult<(Option<String>, f64)> {
        let input = bits_of(bits)?;
        if input.len() != self.0.in_width() {
            return Err(PyValueError::new_err(format!(
                "expected {} bits, got {}",
                self.0.in_width(),
                input.len()
            )));
        }
        let out = ancillary::denote(&self.0, &DensityMatrix::basis(&input), self::mode(mode)?).map_err(err)?;
        let basis = out.as_basis_state(Tolerance::default()).map(|b| bit_string(&b));
        Ok((basis, out.trace().re))
    }

    /// Sparse output matrix as `{(row_bits, col_bits): (re, im)}`.
    #[pyo3(signature = (bits, mode = "safe"))]
    fn denote(&self, bits: &str, mode: &str) -> PyResult<BTreeMap<(String, String), (f64, f64)>> {
        let input = bits_of(bits)?;
        if input.len() != self.0.in_width() {
            return Err(PyValueError::new_err("wrong number of bits"));
        }
        let out = ancillary::denote(&self.0, &DensityMatrix::basis(&input), self::mode(mode)?).map_err(err)?;
        let n = out.n_wires();
        Ok(out
            .entries()
            .iter()
            .map(|&(r, c, v)| ((bit_string(&index_bits(r, n)), bit_string(&index_bits(c, n))), (v.re, v.im)))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("Circuit({})", self.0)
    }
}

/// A source-symmetry derivation.
#[pyclass(name = "Derivation", module = "ancillary_py", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyDerivation(SymmetryDerivation);

#[pymethods]
impl PyDerivation {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        SymmetryDerivation::from_json(text).map(PyDerivation).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn realize(&self) -> PyResult<PyCircuit> {
        self.0.realize().map(PyCircuit).map_err(err)
    }

    fn invert(&self) -> PyResult<Self> {
        self.0.invert().map(PyDerivation).map_err(err)
    }

    /// Checks the derivation, witnesses included; returns the target wires.
    #[pyo3(signature = (tolerance = None))]
    fn check(&self, tolerance: Option<f64>) -> PyResult<Vec<usize>> {
        self.0.check(tol(tolerance)?).map(|f| f.targets).map_err(err)
    }

    /// Source wires on which the realised circuit is not a no-op.
    #[pyo3(signature = (tolerance = None))]
    fn failing_sources(&self, tolerance: Option<f64>) -> PyResult<Vec<usize>> {
        symmetry::source_noop_failures(&self.0, tol(tolerance)?).map_err(err)
    }

    #[getter]
    fn depth(&self) -> usize {
        self.0.depth()
    }
}

fn context(vars: Vec<String>) -> PyResult<VarContext> {
    VarContext::new(&vars).map_err(err)
}

/// Compiles `expr` over the variable order `vars` (wire `1 + i` holds
/// `vars[i]`, wire 0 is the target).
#[pyfunction]
fn compile(expr: &str, vars: Vec<String>) -> PyResult<(PyCircuit, PyDerivation)> {
    let b = ancillary::parse_bexp(expr).map_err(err)?;
    let (c, d) = oracle::compile(&b, &context(vars)?).map_err(err)?;
    Ok((PyCircuit(c), PyDerivation(d)))
}

/// Normalised text of a parsed expression.
#[pyfunction]
fn parse_bexp(expr: &str) -> PyResult<String> {
    ancillary::parse_bexp(expr).map(|b| b.to_string()).map_err(err)
}

#[pyfunction]
fn interp(expr: &str, valuation: BTreeMap<String, bool>) -> PyResult<bool> {
    let b = ancillary::parse_bexp(expr).map_err(err)?;
    let f: Valuation = valuation.into_iter().collect();
    b.interp(&f).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (expr, vars, tolerance = None))]
fn check_compile_correct(expr: &str, vars: Vec<String>, tolerance: Option<f64>) -> PyResult<bool> {
    let b = ancillary::parse_bexp(expr).map_err(err)?;
    oracle::check_compile_correct(&b, &context(vars)?, tol(tolerance)?).map_err(err)
}

/// `{"valid", "worst_trace_defect", "witness"}`.
#[pyfunction]
#[pyo3(signature = (circuit, tolerance = None))]
fn is_valid<'py>(py: Python<'py>, circuit: &PyCircuit, tolerance: Option<f64>) -> PyResult<Bound<'py, PyDict>> {
    let r = ancillary::is_valid(&circuit.0, tol(tolerance)?).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("valid", r.valid)?;
    d.set_item("worst_trace_defect", r.worst_trace_defect)?;
    d.set_item("witness", r.witness)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (a, b, tolerance = None))]
fn equivalent(a: &PyCircuit, b: &PyCircuit, tolerance: Option<f64>) -> PyResult<bool> {
    validity::circuits_equivalent(&a.0, &b.0, tol(tolerance)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (circuit, wire, tolerance = None))]
fn noop_on(circuit: &PyCircuit, wire: usize, tolerance: Option<f64>) -> PyResult<bool> {
    symmetry::noop_on(&circuit.0, wire, tol(tolerance)?).map_err(err)
}

#[pyfunction]
fn adder_circ(n: usize) -> PyCircuit {
    PyCircuit(adder::adder_circ(n))
}

/// `(sum, cout, asserts_ok)` for `x + y + cin` on the `n`-bit adder.
#[pyfunction]
#[pyo3(signature = (n, x, y, cin = false))]
fn add(n: usize, x: u64, y: u64, cin: bool) -> PyResult<(u64, bool, bool)> {
    let r = adder::run_adder(n, x, y, cin).map_err(err)?;
    Ok((r.sum, r.cout, r.asserts_ok))
}

/// Exhaustive check of `adder_circ(n)`; backend is "density" or "basis".
#[pyfunction]
#[pyo3(signature = (n, backend = "basis", tolerance = None))]
fn check_adder_spec(n: usize, backend: &str, tolerance: Option<f64>) -> PyResult<bool> {
    let backend = match backend {
        "density" => Backend::Density,
        "basis" => Backend::Basis,
        _ => return Err(PyValueError::new_err("backend must be 'density' or 'basis'")),
    };
    adder::check_adder_spec(n, tol(tolerance)?, backend)
        .map(|r| r.passed())
        .map_err(err)
}

#[pymodule]
fn ancillary_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyDerivation>()?;
    m.add_function(wrap_pyfunction!(compile, m)?)?;
    m.add_function(wrap_pyfunction!(parse_bexp, m)?)?;
    m.add_function(wrap_pyfunction!(interp, m)?)?;
    m.add_function(wrap_pyfunction!(check_compile_correct, m)?)?;
    m.add_function(wrap_pyfunction!(is_valid, m)?)?;
    m.add_function(wrap_pyfunction!(equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(noop_on, m)?)?;
    m.add_function(wrap_pyfunction!(adder_circ, m)?)?;
    m.add_function(wrap_pyfunction!(add, m)?)?;
    m.add_function(wrap_pyfunction!(check_adder_spec, m)?)?;
    Ok(())
}
