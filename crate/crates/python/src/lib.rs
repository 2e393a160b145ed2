//! Python bindings. Reports come back as plain dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pythonize::pythonize;
use serde::Serialize;

use framepot::frame::{self, Exponent, RANK_TOL};
use framepot::minimizer::{self, MinimizeOptions};
use framepot::relaxation::{self, RelaxationProblem};
use framepot::{theorem, transition, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Solver(_) | Error::StructureViolation(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    pythonize(py, value).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Unit vectors in R^d.
#[pyclass(name = "UnitVectorConfiguration", module = "framepot", frozen)]
struct PyConfiguration(frame::UnitVectorConfiguration);

#[pymethods]
impl PyConfiguration {
    #[new]
    #[pyo3(signature = (d, vectors, normalize = false))]
    fn new(d: usize, vectors: Vec<Vec<f64>>, normalize: bool) -> PyResult<Self> {
        let cfg = if normalize {
            frame::UnitVectorConfiguration::normalized(d, &vectors)
        } else {
            frame::UnitVectorConfiguration::new(d, &vectors)
        };
        cfg.map(PyConfiguration).map_err(py_err)
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.dim()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn vectors(&self) -> Vec<Vec<f64>> {
        self.0.to_vecs()
    }

    fn gram(&self) -> PyGram {
        PyGram(frame::gram_of(&self.0))
    }

    fn energy(&self, p: f64) -> PyResult<f64> {
        Ok(frame::config_energy(&self.0, Exponent::new(p).map_err(py_err)?))
    }

    fn __repr__(&self) -> String {
        format!("UnitVectorConfiguration(d={}, N={})", self.0.dim(), self.0.len())
    }
}

/// Symmetric matrix with unit diagonal.
#[pyclass(name = "GramMatrix", module = "framepot", frozen)]
struct PyGram(frame::GramMatrix);

#[pymethods]
impl PyGram {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        frame::GramMatrix::from_rows(&rows).map(PyGram).map_err(py_err)
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.0.to_rows()
    }

    fn energy(&self, p: f64) -> PyResult<f64> {
        Ok(frame::frame_energy(&self.0, Exponent::new(p).map_err(py_err)?))
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.0.eigenvalues()
    }

    #[pyo3(signature = (max_rank, tol = RANK_TOL))]
    fn rank_report<'py>(&self, py: Python<'py>, max_rank: usize, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &frame::validate_rank(&self.0, max_rank, tol))
    }

    fn __len__(&self) -> usize {
        self.0.order()
    }
}

#[pyfunction]
fn repeated_ortho_config(d: usize, n: usize) -> PyResult<PyConfiguration> {
    frame::repeated_ortho_config(d, n).map(PyConfiguration).map_err(py_err)
}

#[pyfunction]
fn multiplicity_energy(multiplicities: Vec<usize>) -> f64 {
    frame::multiplicity_energy(&multiplicities)
}

/// M(c, p, N) with the achieving candidate.
#[pyfunction]
fn m_value<'py>(py: Python<'py>, c: f64, p: f64, n: usize) -> PyResult<Bound<'py, PyAny>> {
    let prob = RelaxationProblem::new(c, p, n).map_err(py_err)?;
    to_py(py, &relaxation::m_value(&prob).map_err(py_err)?)
}

#[pyfunction]
fn m_bruteforce(c: f64, p: f64, n: usize, grid_steps: usize) -> PyResult<f64> {
    let prob = RelaxationProblem::new(c, p, n).map_err(py_err)?;
    relaxation::m_bruteforce(&prob, grid_steps).map_err(py_err)
}

#[pyfunction]
fn check_bound<'py>(py: Python<'py>, config: &PyConfiguration, p: f64) -> PyResult<Bound<'py, PyAny>> {
    let r = relaxation::check_bound(&frame::gram_of(&config.0), config.0.dim(), p).map_err(py_err)?;
    to_py(py, &r)
}

/// (p0, q) for excess m.
#[pyfunction]
fn p_threshold(m: usize) -> (f64, f64) {
    let t = theorem::p_threshold(m);
    (t.p0, t.q)
}

#[pyfunction]
#[pyo3(signature = (m, p_override = None))]
fn verify_theorem<'py>(py: Python<'py>, m: usize, p_override: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| theorem::verify_theorem(m, p_override)).map_err(py_err)?;
    to_py(py, &r)
}

#[pyfunction]
fn five_point_energy(alpha: f64, p: f64) -> PyResult<f64> {
    transition::five_point_energy(alpha, p).map_err(py_err)
}

#[pyfunction]
fn solve_transition<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &transition::solve_transition().map_err(py_err)?)
}

#[pyfunction]
fn subthreshold_witness<'py>(py: Python<'py>, epsilon: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &transition::subthreshold_witness(epsilon).map_err(py_err)?)
}

fn options(restarts: usize, seed: u64, max_iterations: usize) -> MinimizeOptions {
    MinimizeOptions {
        restarts,
        max_iterations,
        ..MinimizeOptions::default()
    }
    .with_seed(seed)
}

#[pyfunction]
#[pyo3(signature = (d, n, p, restarts = 64, seed = 0, max_iterations = 5000))]
fn minimize_energy<'py>(
    py: Python<'py>,
    d: usize,
    n: usize,
    p: f64,
    restarts: usize,
    seed: u64,
    max_iterations: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = options(restarts, seed, max_iterations);
    let r = py.detach(|| minimizer::minimize_energy(d, n, p, &opts)).map_err(py_err)?;
    to_py(py, &r.summary(p))
}

#[pyfunction]
#[pyo3(signature = (n, tol = 1e-4, restarts = 64, seed = 0, max_iterations = 5000))]
fn circle_transition<'py>(
    py: Python<'py>,
    n: usize,
    tol: f64,
    restarts: usize,
    seed: u64,
    max_iterations: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = options(restarts, seed, max_iterations);
    let r = py.detach(|| transition::circle_transition(n, tol, &opts)).map_err(py_err)?;
    to_py(py, &r)
}

#[pymodule]
#[pyo3(name = "framepot")]
fn framepot_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfiguration>()?;
    m.add_class::<PyGram>()?;
    m.add_function(wrap_pyfunction!(repeated_ortho_config, m)?)?;
    m.add_function(wrap_pyfunction!(multiplicity_energy, m)?)?;
    m.add_function(wrap_pyfunction!(m_value, m)?)?;
    m.add_function(wrap_pyfunction!(m_bruteforce, m)?)?;
    m.add_function(wrap_pyfunction!(check_bound, m)?)?;
    m.add_function(wrap_pyfunction!(p_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorem, m)?)?;
    m.add_function(wrap_pyfunction!(five_point_energy, m)?)?;
    m.add_function(wrap_pyfunction!(solve_transition, m)?)?;
    m.add_function(wrap_pyfunction!(subthreshold_witness, m)?)?;
    m.add_function(wrap_pyfunction!(minimize_energy, m)?)?;
    m.add_function(wrap_pyfunction!(circle_transition, m)?)?;
    Ok(())
}
