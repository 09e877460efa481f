use num_bigint::{BigInt, BigUint};
use std::time::Duration;

use pyo3::exceptions::{PyTimeoutError, PyValueError};
use pyo3::prelude::*;

use treedepth::construct::{solve_deterministic_with, DeterministicConfig};
use treedepth::counting;
use treedepth::graph;
use treedepth::linear::{solve_randomized as solve_rand, LinearConfig};
use treedepth::{oracle, pace, CoefficientRing, Outcome};

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Graph", module = "treedepth", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: treedepth::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (n, edges=Vec::new()))]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let inner = treedepth::Graph::from_edges(n, edges).map_err(value_err)?;
        Ok(PyGraph { inner })
    }

    /// Parses the PACE `tdp` format.
    #[staticmethod]
    fn from_pace(text: &str) -> PyResult<Self> {
        let inner = pace::parse_pace_graph(text).map_err(value_err)?;
        Ok(PyGraph { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<usize>> {
        if v >= self.inner.n() {
            return Err(PyValueError::new_err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.neighbors(v).to_vec())
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

#[pyclass(name = "RootedForest", module = "treedepth", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyForest {
    inner: treedepth::RootedForest,
}

#[pymethods]
impl PyForest {
    /// `parents[v]` is the parent of `v`, or `None` for a root.
    #[new]
    fn new(parents: Vec<Option<usize>>) -> PyResult<Self> {
        let inner = treedepth::RootedForest::from_parents(parents).map_err(value_err)?;
        Ok(PyForest { inner })
    }

    #[getter]
    fn parents(&self) -> Vec<Option<usize>> {
        self.inner.parents().to_vec()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    fn roots(&self) -> Vec<usize> {
        self.inner.roots()
    }

    fn depth_of(&self, v: usize) -> PyResult<usize> {
        if v >= self.inner.len() {
            return Err(PyValueError::new_err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.depth_of(v))
    }

    fn to_pace(&self) -> String {
        pace::emit_pace_forest(&self.inner)
    }

    #[staticmethod]
    fn from_pace(text: &str, n: usize) -> PyResult<Self> {
        let inner = pace::parse_pace_forest(text, n).map_err(value_err)?;
        Ok(PyForest { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("RootedForest(n={}, depth={})", self.inner.len(), self.inner.depth())
    }
}

fn outcome(out: Outcome) -> PyResult<Option<PyForest>> {
    match out {
        Outcome::Feasible(inner) => Ok(Some(PyForest { inner })),
        Outcome::Infeasible => Ok(None),
        Outcome::Timeout => Err(PyTimeoutError::new_err("solver deadline passed")),
    }
}

fn ring(modulus: Option<BigUint>) -> CoefficientRing {
    match modulus {
        Some(m) => CoefficientRing::Modular(m),
        None => CoefficientRing::Exact,
    }
}

/// An elimination forest of depth at most `d`, or `None` when `td(g) > d`.
/// Raises `TimeoutError` once `timeout` seconds pass.
#[pyfunction]
#[pyo3(signature = (g, d, threads=1, timeout=None))]
fn solve_deterministic(
    py: Python<'_>,
    g: &PyGraph,
    d: usize,
    threads: usize,
    timeout: Option<f64>,
) -> PyResult<Option<PyForest>> {
    let cfg = DeterministicConfig {
        threads: threads.max(1),
        deadline: timeout.map(Duration::from_secs_f64),
    };
    let out = py
        .detach(|| solve_deterministic_with(&g.inner, d, &cfg))
        .map_err(value_err)?;
    outcome(out)
}

/// Randomized solver; `None` may be a false negative.
#[pyfunction]
#[pyo3(signature = (g, d, seed=0, timeout=None))]
fn solve_randomized(
    py: Python<'_>,
    g: &PyGraph,
    d: usize,
    seed: u64,
    timeout: Option<f64>,
) -> PyResult<Option<PyForest>> {
    let cfg = LinearConfig {
        deadline: timeout.map(Duration::from_secs_f64),
        ..LinearConfig::with_seed(seed)
    };
    let (out, _) = py
        .detach(|| solve_rand(&g.inner, d, &cfg))
        .map_err(value_err)?;
    outcome(out)
}

#[pyfunction]
#[pyo3(signature = (g, t, d, modulus=None, weights=None))]
fn count_elim_trees(
    py: Python<'_>,
    g: &PyGraph,
    t: &PyForest,
    d: usize,
    modulus: Option<BigUint>,
    weights: Option<Vec<BigInt>>,
) -> PyResult<BigInt> {
    let ring = ring(modulus);
    py.detach(|| counting::count_elim_trees(&g.inner, &t.inner, d, &ring, weights.as_deref()))
        .map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (g, t, d, modulus=None))]
fn count_elim_forests(
    py: Python<'_>,
    g: &PyGraph,
    t: &PyForest,
    d: usize,
    modulus: Option<BigUint>,
) -> PyResult<BigInt> {
    let ring = ring(modulus);
    py.detach(|| counting::count_elim_forests(&g.inner, &t.inner, d, &ring, None))
        .map_err(value_err)
}

#[pyfunction]
fn validate_elimination_forest(g: &PyGraph, f: &PyForest, d: usize) -> bool {
    treedepth::validate_elimination_forest(&g.inner, &f.inner, d)
}

#[pyfunction]
fn dfs_elimination_forest(g: &PyGraph) -> PyForest {
    PyForest {
        inner: graph::dfs_elimination_forest(&g.inner),
    }
}

#[pyfunction]
fn improved_graph(g: &PyGraph, d: usize) -> PyGraph {
    PyGraph {
        inner: graph::improved_graph(&g.inner, d),
    }
}

/// Exact treedepth by exhaustive search; at most 20 vertices.
#[pyfunction]
fn brute_td(g: &PyGraph) -> PyResult<usize> {
    oracle::brute_td(&g.inner).map_err(value_err)
}

#[pymodule]
#[pyo3(name = "treedepth")]
fn treedepth_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyForest>()?;
    m.add_function(wrap_pyfunction!(solve_deterministic, m)?)?;
    m.add_function(wrap_pyfunction!(solve_randomized, m)?)?;
    m.add_function(wrap_pyfunction!(count_elim_trees, m)?)?;
    m.add_function(wrap_pyfunction!(count_elim_forests, m)?)?;
    m.add_function(wrap_pyfunction!(validate_elimination_forest, m)?)?;
    m.add_function(wrap_pyfunction!(dfs_elimination_forest, m)?)?;
    m.add_function(wrap_pyfunction!(improved_graph, m)?)?;
    m.add_function(wrap_pyfunction!(brute_td, m)?)?;
    Ok(())
}
