//! Python bindings. Structured results cross the boundary as JSON text.

use ff8v::suites::studies::{decay_study_regime, edge_table, free_energy_study, oracle_report};
use ff8v::suites::{resolve_graph, run_suite, SuiteConfig, SUITES};
use ff8v::z_invariant::Site;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: ff8v::Error) -> PyErr {
    match e {
        ff8v::Error::Argument(_) | ff8v::Error::Regime(_) | ff8v::Error::Surface(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Names of the identity suites.
#[pyfunction]
fn suites() -> Vec<&'static str> {
    SUITES.to_vec()
}

/// Runs a suite and returns its JSON report.
#[pyfunction]
#[pyo3(signature = (name, graph=None, seed=0, tol=None, k2=None, l2=None, trials=None))]
fn verify(
    name: &str,
    graph: Option<String>,
    seed: u64,
    tol: Option<f64>,
    k2: Option<f64>,
    l2: Option<f64>,
    trials: Option<usize>,
) -> PyResult<String> {
    let cfg = SuiteConfig { graph, seed, tol, k2, l2, trials };
    run_suite(name, &cfg).map_err(py_err)?.to_json().map_err(py_err)
}

/// Brute-force and Pfaffian partition functions of a seeded random field, as JSON.
#[pyfunction]
#[pyo3(signature = (graph="cube", seed=0))]
fn oracle(graph: &str, seed: u64) -> PyResult<String> {
    let q = resolve_graph(graph).map_err(py_err)?;
    to_json(&oracle_report(&q, seed).map_err(py_err)?)
}

/// Probability that all listed edges are occupied, each edge given as `(x, y, i)`.
#[pyfunction]
fn edge_probability(k2: f64, l2: f64, edges: Vec<(i64, i64, usize)>) -> PyResult<f64> {
    if edges.iter().any(|e| e.2 > 3) {
        return Err(PyValueError::new_err("decoration index must lie in 0..4"));
    }
    let set: Vec<Site> = edges.iter().map(|&(x, y, i)| Site::new(x, y, i)).collect();
    let rows = edge_table(&[k2], l2, &[set]).map_err(py_err)?;
    Ok(rows[0].probability)
}

/// Decay scan over distances `lo..=hi`, as JSON.
#[pyfunction]
fn decay(k2: f64, l2: f64, lo: usize, hi: usize) -> PyResult<String> {
    let rs: Vec<usize> = (lo..=hi).collect();
    to_json(&decay_study_regime(k2, l2, &rs).map_err(py_err)?)
}

/// Free energy with the finite-torus sequence, as JSON.
#[pyfunction]
#[pyo3(signature = (k2, l2, sizes=vec![2, 4]))]
fn free_energy(k2: f64, l2: f64, sizes: Vec<usize>) -> PyResult<String> {
    to_json(&free_energy_study(k2, l2, &sizes).map_err(py_err)?)
}

#[pymodule]
fn ff8v_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(suites, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(edge_probability, m)?)?;
    m.add_function(wrap_pyfunction!(decay, m)?)?;
    m.add_function(wrap_pyfunction!(free_energy, m)?)?;
    Ok(())
}
