//! Python bindings for `gridspread-core`.

use gridspread_core as core;
use gridspread_core::{Algorithm, GridSpec, Method, Norm, PairDocument, RenderFormat, Symbol};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: core::Error) -> PyErr {
    match e {
        core::Error::InvariantViolation(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Accepts a positive integer `p` or the string `"inf"`.
fn norm_arg(p: &Bound<'_, PyAny>) -> PyResult<Norm> {
    if let Ok(p) = p.extract::<u32>() {
        return Norm::finite(p).map_err(to_py);
    }
    let text: String = p.extract()?;
    text.parse().map_err(to_py)
}

fn spec(n: usize, d: usize) -> PyResult<GridSpec> {
    GridSpec::new(n, d).map_err(to_py)
}

/// A pair of arrangements with the tokens used to write it.
#[pyclass(frozen, module = "gridspread")]
struct Pair {
    doc: PairDocument,
}

#[pymethods]
impl Pair {
    #[getter]
    fn n(&self) -> usize {
        self.doc.pair.spec().n()
    }

    #[getter]
    fn d(&self) -> usize {
        self.doc.pair.spec().d()
    }

    /// Cell index of each symbol in `A`.
    fn a_cells(&self) -> Vec<usize> {
        self.doc.pair.a().cells().to_vec()
    }

    /// Cell index of each symbol in `B`.
    fn b_cells(&self) -> Vec<usize> {
        self.doc.pair.b().cells().to_vec()
    }

    fn tokens(&self) -> Vec<String> {
        self.doc.tokens().to_vec()
    }

    fn combined_distance(&self, p: &Bound<'_, PyAny>, s: usize, t: usize) -> PyResult<f64> {
        core::combined_distance(&self.doc.pair, norm_arg(p)?, Symbol(s), Symbol(t)).map_err(to_py)
    }

    /// `(min_combined, (s, t), pairs_examined)`.
    #[pyo3(signature = (p, algorithm = "pruned"))]
    fn verify(&self, py: Python<'_>, p: &Bound<'_, PyAny>, algorithm: &str) -> PyResult<(f64, (usize, usize), u64)> {
        let norm = norm_arg(p)?;
        let algorithm: Algorithm = algorithm.parse().map_err(to_py)?;
        let pair = &self.doc.pair;
        let report = py
            .detach(|| core::min_combined(pair, norm, algorithm))
            .map_err(to_py)?;
        let (s, t) = report.witness;
        Ok((report.min_combined, (s.0, t.0), report.pairs_examined))
    }

    /// `(u, v, (s, t), combined)` for the block anchored at the origin.
    fn upper_bound_witness(&self) -> PyResult<(u64, u64, (usize, usize), u64)> {
        let w = core::upper_bound_witness(&self.doc.pair).map_err(to_py)?;
        Ok((w.u, w.v, (w.witness.0 .0, w.witness.1 .0), w.combined))
    }

    fn serialize(&self) -> String {
        core::serialize(&self.doc)
    }

    #[pyo3(signature = (format = "text", k = None))]
    fn render(&self, format: &str, k: Option<usize>) -> PyResult<String> {
        let format: RenderFormat = format.parse().map_err(to_py)?;
        core::render(&self.doc, format, k).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Pair(n={}, d={})", self.n(), self.d())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.doc == other.doc
    }
}

#[pyfunction]
fn select_k(n: usize) -> usize {
    core::select_k(n)
}

#[pyfunction]
fn lower_bound(n: u64) -> u64 {
    core::lower_bound(n)
}

#[pyfunction]
#[pyo3(signature = (n, d = 2, p = None))]
fn upper_bound(n: u64, d: u64, p: Option<&Bound<'_, PyAny>>) -> PyResult<f64> {
    let norm = p.map(norm_arg).transpose()?.unwrap_or(Norm::Inf);
    spec(n as usize, d as usize)?;
    Ok(core::upper_bound(n, d, norm))
}

/// Build a pair. Returns `(pair, method, k, guarantee)`.
#[pyfunction]
#[pyo3(signature = (n, d = 2, method = "auto"))]
fn construct(n: usize, d: usize, method: &str) -> PyResult<(Pair, String, usize, u64)> {
    let spec = spec(n, d)?;
    let (pair, plan) = match method {
        "auto" => core::construct_auto(spec),
        other => core::construct::construct(spec, other.parse::<Method>().map_err(to_py)?),
    }
    .map_err(to_py)?;
    let doc = PairDocument::from_pair(pair);
    Ok((Pair { doc }, plan.method.to_string(), plan.k, plan.guarantee))
}

#[pyfunction]
fn parse(text: &str) -> PyResult<Pair> {
    Ok(Pair {
        doc: core::parse(text).map_err(to_py)?,
    })
}

/// Pair from per-symbol cell indices.
#[pyfunction]
fn from_cells(n: usize, d: usize, a: Vec<usize>, b: Vec<usize>) -> PyResult<Pair> {
    let spec = spec(n, d)?;
    let a = core::Arrangement::from_cells(spec, a).map_err(to_py)?;
    let b = core::Arrangement::from_cells(spec, b).map_err(to_py)?;
    let pair = core::ArrangementPair::new(a, b).map_err(to_py)?;
    Ok(Pair {
        doc: PairDocument::from_pair(pair),
    })
}

/// `(optimum, best_pair, arrangements_enumerated)`.
#[pyfunction]
fn exact_optimum(py: Python<'_>, n: usize, d: usize, p: &Bound<'_, PyAny>) -> PyResult<(f64, Pair, u64)> {
    let (spec, norm) = (spec(n, d)?, norm_arg(p)?);
    let r = py.detach(|| core::exact_optimum(spec, norm)).map_err(to_py)?;
    let doc = PairDocument::from_pair(r.best_pair);
    Ok((r.optimum, Pair { doc }, r.arrangements_enumerated))
}

#[pyfunction]
fn count_solutions(py: Python<'_>, n: usize, d: usize, p: &Bound<'_, PyAny>, threshold: f64) -> PyResult<u64> {
    let (spec, norm) = (spec(n, d)?, norm_arg(p)?);
    py.detach(|| core::count_solutions(spec, norm, threshold)).map_err(to_py)
}

#[pymodule]
fn gridspread(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Pair>()?;
    m.add_function(wrap_pyfunction!(select_k, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(from_cells, m)?)?;
    m.add_function(wrap_pyfunction!(exact_optimum, m)?)?;
    m.add_function(wrap_pyfunction!(count_solutions, m)?)?;
    Ok(())
}
