use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use mpiassist_core::bench::{self, BenchPredictor};
use mpiassist_core::corpus::{self, Split};
use mpiassist_core::cst::{self, SourceUnit};
use mpiassist_core::eval::{self, EvalError};
use mpiassist_core::{linearizer, mpiedit, predictor};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Hands structured results to Python as plain dicts and lists.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn split_arg(split: Option<&str>) -> PyResult<Option<Split>> {
    match split {
        None | Some("all") => Ok(None),
        Some(s) => s.parse().map(Some).map_err(value_err),
    }
}

#[pyfunction]
fn standardize(text: &str) -> PyResult<String> {
    cst::standardize(text).map_err(value_err)
}

#[pyfunction]
fn token_count(text: &str) -> usize {
    cst::token_count(text)
}

#[pyfunction]
fn sbt(text: &str) -> PyResult<Vec<String>> {
    cst::parse(text).map(|ast| linearizer::sbt(&ast)).map_err(value_err)
}

#[pyfunction]
fn xsbt(text: &str) -> PyResult<Vec<String>> {
    cst::parse(text).map(|ast| linearizer::xsbt(&ast)).map_err(value_err)
}

/// `(name, line)` for every MPI call, read lexically so that unparsable
/// predictions still yield their calls.
#[pyfunction]
fn extract_calls(text: &str) -> Vec<(String, usize)> {
    mpiedit::extract_calls_lexical(text).into_iter().map(|c| (c.name, c.line)).collect()
}

/// Returns `(pruned_code, removed)` where `removed` lists the deleted calls.
#[pyfunction]
fn prune<'py>(py: Python<'py>, text: &str) -> PyResult<(String, Bound<'py, PyAny>)> {
    let r = mpiedit::prune(&SourceUnit::new("<input>", text)).map_err(value_err)?;
    Ok((r.pruned_text, to_py(py, &r.removed)?))
}

#[pyfunction]
fn baseline_predict(input_code: &str) -> PyResult<String> {
    predictor::baseline_predict(input_code).map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (predicted_code, label_code, tolerance = eval::DEFAULT_TOLERANCE))]
fn score<'py>(py: Python<'py>, predicted_code: &str, label_code: &str, tolerance: usize) -> PyResult<Bound<'py, PyAny>> {
    let gold = mpiedit::sites(&mpiedit::extract_calls_lexical(label_code));
    let s = eval::score_example("", predicted_code, label_code, &gold, tolerance);
    to_py(py, &s)
}

/// Scores a predictions file against a dataset file and returns the report.
#[pyfunction]
#[pyo3(signature = (dataset, predictions, split = Some("test"), tolerance = eval::DEFAULT_TOLERANCE))]
fn evaluate<'py>(
    py: Python<'py>,
    dataset: PathBuf,
    predictions: PathBuf,
    split: Option<&str>,
    tolerance: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let split = split_arg(split)?;
    let (report, _) = py.detach(|| eval::evaluate(&dataset, &predictions, split, tolerance)).map_err(|e| match e {
        EvalError::Dataset(corpus::CorpusError::Io { .. }) => PyOSError::new_err(e.to_string()),
        e => value_err(e),
    })?;
    to_py(py, &report)
}

/// Problems found in a dataset file, one dict per violation.
#[pyfunction]
#[pyo3(signature = (dataset, token_limit = 320))]
fn check_dataset<'py>(py: Python<'py>, dataset: PathBuf, token_limit: usize) -> PyResult<Bound<'py, PyAny>> {
    let examples = corpus::read_dataset(&dataset).map_err(|e| PyOSError::new_err(e.to_string()))?;
    to_py(py, &corpus::check_dataset(&examples, token_limit))
}

#[pyfunction]
#[pyo3(signature = (predictor = "baseline", tolerance = eval::DEFAULT_TOLERANCE))]
fn run_benchmark<'py>(py: Python<'py>, predictor: &str, tolerance: usize) -> PyResult<Bound<'py, PyAny>> {
    let predictor: BenchPredictor = predictor.parse().map_err(PyValueError::new_err)?;
    let report = py.detach(|| bench::run_benchmark(&predictor, tolerance));
    to_py(py, &report)
}

#[pyfunction]
fn benchmark_names() -> Vec<&'static str> {
    bench::programs().iter().map(|p| p.name).collect()
}

#[pymodule]
fn mpiassist(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(standardize, m)?)?;
    m.add_function(wrap_pyfunction!(token_count, m)?)?;
    m.add_function(wrap_pyfunction!(sbt, m)?)?;
    m.add_function(wrap_pyfunction!(xsbt, m)?)?;
    m.add_function(wrap_pyfunction!(extract_calls, m)?)?;
    m.add_function(wrap_pyfunction!(prune, m)?)?;
    m.add_function(wrap_pyfunction!(baseline_predict, m)?)?;
    m.add_function(wrap_pyfunction!(score, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(check_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(run_benchmark, m)?)?;
    m.add_function(wrap_pyfunction!(benchmark_names, m)?)?;
    Ok(())
}
