//! Python bindings for `renyi-bounds`.

use std::path::PathBuf;

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use renyi_core as core;
use renyi_core::report::{report_to_json, SweepConfig};
use renyi_core::{Error, QuadratureSpec, RenyiOrder, SystemKind};

fn to_py(e: Error) -> PyErr {
    if e.is_numeric() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn spec(order: Option<usize>, tol: Option<f64>) -> PyResult<QuadratureSpec> {
    let mut s = QuadratureSpec::default();
    if let Some(o) = order {
        s.base_order = o;
    }
    if let Some(t) = tol {
        s.rel_tol = t;
    }
    s.validate().map_err(to_py)?;
    Ok(s)
}

fn order(d: usize, lambda: f64) -> PyResult<RenyiOrder> {
    RenyiOrder::new(lambda, d).map_err(to_py)
}

/// Hyperspherical quantum numbers `(μ_1, …, μ_{d-1})`.
#[pyclass(frozen, module = "renyi_bounds")]
struct QuantumNumberChain {
    inner: core::QuantumNumberChain,
}

#[pymethods]
impl QuantumNumberChain {
    #[new]
    fn new(d: usize, mu: Vec<i64>) -> PyResult<Self> {
        Ok(Self { inner: core::QuantumNumberChain::new(d, mu).map_err(to_py)? })
    }

    /// All chains with leading entry `l` and non-negative last entry.
    #[staticmethod]
    fn enumerate(d: usize, l: i64) -> PyResult<Vec<Self>> {
        Ok(core::QuantumNumberChain::enumerate(d, l)
            .map_err(to_py)?
            .into_iter()
            .map(|inner| Self { inner })
            .collect())
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn mu(&self) -> Vec<i64> {
        self.inner.mu().to_vec()
    }

    #[getter]
    fn l(&self) -> i64 {
        self.inner.l()
    }

    fn cos2_moment(&self, k: usize) -> PyResult<f64> {
        core::cos2_moment(&self.inner, k).map_err(to_py)
    }

    fn correlation_diagonal(&self) -> PyResult<Vec<f64>> {
        Ok(core::correlation_diagonal(&self.inner).map_err(to_py)?.entries().to_vec())
    }

    fn loss(&self) -> PyResult<f64> {
        core::entropy_loss(&self.inner).map_err(to_py)
    }

    fn angular_renyi(&self, lambda: f64) -> PyResult<f64> {
        core::angular_renyi(&self.inner, lambda).map_err(to_py)
    }

    fn angular_density(&self, angles: Vec<f64>) -> PyResult<f64> {
        core::angular_density(&self.inner, &angles).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("QuantumNumberChain(d={}, mu={:?})", self.inner.d(), self.inner.mu())
    }
}

/// Normalized radial wavefunction `R(r)`.
#[pyclass(frozen, module = "renyi_bounds")]
struct RadialState {
    inner: core::RadialState,
}

#[pymethods]
impl RadialState {
    #[staticmethod]
    fn oscillator(n_r: u32, l: u32, d: usize) -> PyResult<Self> {
        Ok(Self { inner: core::oscillator_state(n_r, l, d).map_err(to_py)? })
    }

    #[staticmethod]
    fn hydrogen(n: u32, l: u32, d: usize) -> PyResult<Self> {
        Ok(Self { inner: core::hydrogen_state(n, l, d).map_err(to_py)? })
    }

    /// Interpolated state from `(r, R(r))` pairs.
    #[staticmethod]
    #[pyo3(signature = (samples, d, l=0))]
    fn tabulated(samples: Vec<(f64, f64)>, d: usize, l: i64) -> PyResult<Self> {
        Ok(Self { inner: core::tabulated_state(&samples, d, l).map_err(to_py)? })
    }

    #[staticmethod]
    #[pyo3(signature = (path, d, l=0))]
    fn from_file(path: PathBuf, d: usize, l: i64) -> PyResult<Self> {
        Ok(Self { inner: core::tabulated_state_from_file(&path, d, l).map_err(to_py)? })
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn l(&self) -> i64 {
        self.inner.l()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    fn amplitude(&self, r: f64) -> f64 {
        self.inner.amplitude(r)
    }

    fn r2_expectation(&self) -> PyResult<f64> {
        core::r2_expectation(&self.inner).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("RadialState({}, d={})", self.inner.label(), self.inner.d())
    }
}

/// Entropy of a state compared with the baseline and improved bounds.
#[pyclass(frozen, get_all, module = "renyi_bounds")]
struct BoundReport {
    system: String,
    d: usize,
    mu: Vec<i64>,
    lambda_: f64,
    r2: f64,
    entropy: f64,
    method: String,
    est_error: f64,
    bound_baseline: f64,
    bound_improved: f64,
    loss: f64,
    slack_baseline: f64,
    slack_improved: f64,
    holds: bool,
    json: String,
}

impl From<core::BoundReport> for BoundReport {
    fn from(r: core::BoundReport) -> Self {
        Self {
            json: report_to_json(&r),
            system: r.system,
            d: r.d,
            mu: r.mu,
            lambda_: r.lambda,
            r2: r.r2,
            entropy: r.h,
            method: r.h_method.to_string(),
            est_error: r.h_est_error,
            bound_baseline: r.bound_baseline,
            bound_improved: r.bound_improved,
            loss: r.loss,
            slack_baseline: r.slack_baseline,
            slack_improved: r.slack_improved,
            holds: r.holds,
        }
    }
}

#[pymethods]
impl BoundReport {
    fn __repr__(&self) -> String {
        format!(
            "BoundReport({} mu={:?} lambda={} H={} bound={} holds={})",
            self.system, self.mu, self.lambda_, self.entropy, self.bound_improved, self.holds
        )
    }
}

#[pyfunction]
fn bd_lambda(d: usize, lambda: f64) -> PyResult<f64> {
    core::bd_lambda(order(d, lambda)?).map_err(to_py)
}

/// Bound constant with the printed `1/(1-λ)` exponent for λ > 1.
#[pyfunction]
fn bd_lambda_printed(d: usize, lambda: f64) -> PyResult<f64> {
    core::maxent::bd_lambda_printed(order(d, lambda)?).map_err(to_py)
}

#[pyfunction]
fn baseline_bound(d: usize, lambda: f64, r2: f64) -> PyResult<f64> {
    core::baseline_renyi_bound(order(d, lambda)?, r2).map_err(to_py)
}

/// Rényi entropy of the unit-covariance extremal density, by quadrature.
#[pyfunction]
fn extremal_renyi(d: usize, lambda: f64) -> PyResult<f64> {
    core::extremal_renyi(order(d, lambda)?).map_err(to_py)
}

fn entropy_dict<'py>(py: Python<'py>, v: core::EntropyValue) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("lambda", v.lambda)?;
    out.set_item("value", v.value)?;
    out.set_item("method", v.method.to_string())?;
    out.set_item("est_error", v.est_error)?;
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (state, chain, lambda_, order=None, tol=None))]
fn renyi_total<'py>(
    py: Python<'py>,
    state: &RadialState,
    chain: &QuantumNumberChain,
    lambda_: f64,
    order: Option<usize>,
    tol: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let s = spec(order, tol)?;
    let v = py.detach(|| core::renyi_total(&state.inner, &chain.inner, lambda_, &s)).map_err(to_py)?;
    entropy_dict(py, v)
}

/// Tensor-product oracle for `renyi_total` (d ≤ 4).
#[pyfunction]
#[pyo3(signature = (state, chain, lambda_, order=None, tol=None))]
fn renyi_total_tensor<'py>(
    py: Python<'py>,
    state: &RadialState,
    chain: &QuantumNumberChain,
    lambda_: f64,
    order: Option<usize>,
    tol: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let s = spec(order, tol)?;
    let v = py.detach(|| core::renyi_total_tensor(&state.inner, &chain.inner, lambda_, &s)).map_err(to_py)?;
    entropy_dict(py, v)
}

#[pyfunction]
#[pyo3(signature = (state, chain, lambda_, order=None, tol=None))]
fn verify(
    py: Python<'_>,
    state: &RadialState,
    chain: &QuantumNumberChain,
    lambda_: f64,
    order: Option<usize>,
    tol: Option<f64>,
) -> PyResult<BoundReport> {
    let s = spec(order, tol)?;
    let r = py.detach(|| core::verify(&state.inner, &chain.inner, lambda_, &s)).map_err(to_py)?;
    Ok(r.into())
}

/// Runs the catalog sweep; failed cells come back as `(system, d, mu, lambda, message)`.
#[pyfunction]
#[pyo3(signature = (dims, lambdas, systems=None))]
fn sweep(
    py: Python<'_>,
    dims: Vec<usize>,
    lambdas: Vec<f64>,
    systems: Option<Vec<String>>,
) -> PyResult<(Vec<BoundReport>, Vec<(String, usize, Vec<i64>, f64, String)>)> {
    let mut config = SweepConfig::catalog();
    config.dims = dims;
    config.lambdas = lambdas;
    if let Some(names) = systems {
        config.systems = names
            .iter()
            .map(|n| n.parse::<SystemKind>())
            .collect::<Result<_, _>>()
            .map_err(to_py)?;
    }
    let cells = py.detach(|| core::sweep(&config, &QuadratureSpec::default())).map_err(to_py)?;
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for c in cells {
        match c.outcome {
            Ok(r) => reports.push(r.into()),
            Err(e) => failures.push((c.system, c.d, c.mu, c.lambda, e.to_string())),
        }
    }
    Ok((reports, failures))
}

/// Draws `count` points; returns a list of coordinate tuples.
#[pyfunction]
fn sample_state(
    py: Python<'_>,
    state: &RadialState,
    chain: &QuantumNumberChain,
    count: usize,
    seed: u64,
) -> PyResult<Vec<Vec<f64>>> {
    let cloud = py.detach(|| core::sample_state(&state.inner, &chain.inner, count, seed)).map_err(to_py)?;
    Ok(cloud.points().map(|p| p.to_vec()).collect())
}

/// Second-moment matrix and its trace-normalized form.
#[pyfunction]
fn empirical_covariance(points: Vec<Vec<f64>>) -> PyResult<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let d = points.first().map_or(0, Vec::len);
    if points.iter().any(|p| p.len() != d) {
        return Err(PyValueError::new_err("points must all have the same dimension"));
    }
    let cloud = core::PointCloud::new(d, points.concat()).map_err(to_py)?;
    let cov = core::empirical_covariance(&cloud).map_err(to_py)?;
    Ok((cov.second_moment, cov.normalized))
}

/// Samples and reduces in one call, without returning the point cloud.
#[pyfunction]
fn sample_covariance(
    py: Python<'_>,
    state: &RadialState,
    chain: &QuantumNumberChain,
    count: usize,
    seed: u64,
) -> PyResult<Vec<Vec<f64>>> {
    py.detach(|| {
        let cloud = core::sample_state(&state.inner, &chain.inner, count, seed)?;
        core::empirical_covariance(&cloud)
    })
    .map(|c| c.normalized)
    .map_err(to_py)
}

#[pymodule]
fn renyi_bounds(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<QuantumNumberChain>()?;
    m.add_class::<RadialState>()?;
    m.add_class::<BoundReport>()?;
    m.add_function(wrap_pyfunction!(bd_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(bd_lambda_printed, m)?)?;
    m.add_function(wrap_pyfunction!(baseline_bound, m)?)?;
    m.add_function(wrap_pyfunction!(extremal_renyi, m)?)?;
    m.add_function(wrap_pyfunction!(renyi_total, m)?)?;
    m.add_function(wrap_pyfunction!(renyi_total_tensor, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(sample_state, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_covariance, m)?)?;
    m.add_function(wrap_pyfunction!(sample_covariance, m)?)?;
    Ok(())
}
