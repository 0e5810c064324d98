//! Python bindings: map specs, exact invariants, real and p-adic estimators.

use esl_core::invariants::{delta_from_eps, eps_from_lct};
use esl_core::lct::lct_monomial;
use esl_core::mapspec::{parse_map_spec, MapSpec};
use esl_core::padic::DEFAULT_CELL_BUDGET;
use esl_core::report::{cmd_exact, cmd_padic, cmd_real, InvariantReport, RealOptions};
use esl_core::verify::{run_suites, Suite};
use esl_core::{ExponentValue, ExponentVector, MonomialIdeal};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn exponent(s: &str) -> PyResult<ExponentValue> {
    s.parse().map_err(value_error)
}

/// A parsed map spec `map{n=..,m=..}` with optional base point.
#[pyclass(name = "MapSpec", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMapSpec {
    inner: MapSpec,
}

#[pymethods]
impl PyMapSpec {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: parse_map_spec(text).map_err(value_error)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m
    }

    /// Base point coordinates as rational strings, or `None` for the origin.
    #[getter]
    fn point(&self) -> Option<Vec<String>> {
        self.inner
            .point
            .as_ref()
            .map(|p| p.iter().map(|x| x.to_string()).collect())
    }

    #[getter]
    fn components(&self) -> Vec<String> {
        self.inner
            .map()
            .components()
            .iter()
            .map(|c| c.to_string())
            .collect()
    }

    /// Components recentred at the base point.
    fn localized(&self) -> PyResult<Vec<String>> {
        let map = self.inner.localized().map_err(value_error)?;
        Ok(map.components().iter().map(|c| c.to_string()).collect())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("MapSpec({:?})", self.inner.to_string())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// An `esl-report/1` document.
#[pyclass(name = "Report", frozen)]
struct PyReport {
    inner: InvariantReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn command(&self) -> &str {
        self.inner.command
    }

    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed()
    }

    /// `(name, passed, detail)` for every check.
    #[getter]
    fn checks(&self) -> Vec<(String, bool, String)> {
        self.inner
            .checks
            .iter()
            .map(|c| (c.name.clone(), c.passed, c.detail.clone()))
            .collect()
    }

    #[getter]
    fn notes(&self) -> Vec<String> {
        self.inner.notes.clone()
    }

    /// Exact `eps` as a string (`"inf"` or a rational), if known.
    #[getter]
    fn eps(&self) -> Option<String> {
        let exact = self.inner.exact.as_ref()?;
        exact.eps.exact.as_ref().map(|s| s.value.to_string())
    }

    fn to_json(&self) -> String {
        self.inner.to_json_pretty()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let json = PyModule::import(py, "json")?;
        json.call_method1("loads", (self.inner.to_json().to_string(),))
    }

    fn __repr__(&self) -> String {
        format!(
            "Report(command={:?}, passed={}, checks={})",
            self.inner.command,
            self.inner.passed(),
            self.inner.checks.len()
        )
    }
}

fn spec_arg(spec: &Bound<'_, PyAny>) -> PyResult<MapSpec> {
    if let Ok(s) = spec.cast::<PyMapSpec>() {
        return Ok(s.get().inner.clone());
    }
    let text: String = spec.extract()?;
    parse_map_spec(&text).map_err(value_error)
}

/// Exact lct, eps, k and delta bounds.
#[pyfunction]
fn exact(spec: &Bound<'_, PyAny>) -> PyResult<PyReport> {
    let spec = spec_arg(spec)?;
    let inner = cmd_exact(&spec).map_err(value_error)?;
    Ok(PyReport { inner })
}

/// Monte Carlo tail fit on [-1, 1]^n; returns the report and the tail histogram as CSV.
#[pyfunction]
#[pyo3(signature = (spec, samples, seed, bins = 40, fourier = false, workers = None))]
fn real(
    py: Python<'_>,
    spec: &Bound<'_, PyAny>,
    samples: usize,
    seed: u64,
    bins: usize,
    fourier: bool,
    workers: Option<usize>,
) -> PyResult<(PyReport, String)> {
    let spec = spec_arg(spec)?;
    let opts = RealOptions {
        samples,
        seed,
        bins,
        workers,
        fourier,
    };
    let (inner, hist) = py
        .detach(|| cmd_real(&spec, &opts))
        .map_err(value_error)?;
    Ok((PyReport { inner }, hist.to_csv()))
}

/// Exact p-adic ball masses for depths `0..=k`; returns the report and the mass table as CSV.
#[pyfunction]
#[pyo3(signature = (spec, p, k, budget = DEFAULT_CELL_BUDGET))]
fn padic(
    py: Python<'_>,
    spec: &Bound<'_, PyAny>,
    p: u64,
    k: u32,
    budget: u64,
) -> PyResult<(PyReport, String)> {
    let spec = spec_arg(spec)?;
    let (inner, table) = py
        .detach(|| cmd_padic(&spec, p, k, budget))
        .map_err(value_error)?;
    Ok((PyReport { inner }, table.to_csv()))
}

/// Runs one built-in suite, or every suite for `"all"`.
#[pyfunction]
#[pyo3(signature = (suite = "all"))]
fn verify(py: Python<'_>, suite: &str) -> PyResult<PyReport> {
    let suites = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse::<Suite>().map_err(value_error)?]
    };
    Ok(PyReport {
        inner: py.detach(|| run_suites(&suites)),
    })
}

/// lct of the monomial ideal with the given exponent vectors.
#[pyfunction]
fn lct(generators: Vec<Vec<u32>>) -> PyResult<String> {
    let gens = generators
        .into_iter()
        .map(ExponentVector::new)
        .collect::<Result<Vec<_>, _>>()
        .map_err(value_error)?;
    let ideal = MonomialIdeal::new(gens).map_err(value_error)?;
    Ok(lct_monomial(&ideal).map_err(value_error)?.value.to_string())
}

/// `eps` of a scalar map from its lct.
#[pyfunction]
fn eps_of_lct(lct: &str) -> PyResult<String> {
    Ok(eps_from_lct(&exponent(lct)?)
        .map_err(value_error)?
        .to_string())
}

/// `delta` from `eps`.
#[pyfunction]
fn delta_of_eps(eps: &str) -> PyResult<String> {
    Ok(delta_from_eps(&exponent(eps)?).to_string())
}

#[pymodule(name = "esl")]
fn esl_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMapSpec>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(exact, m)?)?;
    m.add_function(wrap_pyfunction!(real, m)?)?;
    m.add_function(wrap_pyfunction!(padic, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(lct, m)?)?;
    m.add_function(wrap_pyfunction!(eps_of_lct, m)?)?;
    m.add_function(wrap_pyfunction!(delta_of_eps, m)?)?;
    m.add("SCHEMA_VERSION", esl_core::report::SCHEMA_VERSION)?;
    Ok(())
}
