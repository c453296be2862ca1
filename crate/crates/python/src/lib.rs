//! Python bindings. Structured results cross the boundary as plain dicts
//! and lists built from the core types' JSON form.

use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use safeswitch_core::certificates::{self as certs, BoundMethod, SynthesisOptions};
use safeswitch_core::primitives::{self as prims};
use safeswitch_core::schema::{library_fingerprint, LibraryDocument};
use safeswitch_core::simulation::{self as sim, CampaignConfig, DisturbanceShape};
use safeswitch_core::switching::{self as sw, DwellTimeBudget, SwitchingSignal};
use safeswitch_core::walker::{self, WalkerMode};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse<T: std::str::FromStr>(text: &str) -> PyResult<T>
where
    T::Err: std::fmt::Display,
{
    text.parse().map_err(err)
}

/// A validated primitive library.
#[pyclass(name = "Library", frozen)]
struct PyLibrary {
    inner: prims::PrimitiveLibrary,
}

#[pymethods]
impl PyLibrary {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = LibraryDocument::from_json(text)
            .and_then(|d| d.to_library())
            .map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let inner = safeswitch_core::schema::load_library(&path).map_err(err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        LibraryDocument::from_library("library", &self.inner).to_json_pretty()
    }

    #[getter]
    fn ids(&self) -> Vec<usize> {
        self.inner.ids().collect()
    }

    #[getter]
    fn state_dim(&self) -> usize {
        self.inner.state_dim()
    }

    /// Largest contraction rate in the library.
    #[getter]
    fn lambda_max(&self) -> f64 {
        self.inner.lambda()
    }

    #[getter]
    fn fingerprint(&self) -> String {
        library_fingerprint(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[pyo3(signature = (id, x, d=None))]
    fn eval_map(&self, id: usize, x: Vec<f64>, d: Option<Vec<f64>>) -> PyResult<Vec<f64>> {
        let p = self.inner.get(id).map_err(err)?;
        let d = d.unwrap_or_else(|| vec![0.0; self.inner.dist_dim()]);
        prims::eval_map(p, &x, &d).map_err(err)
    }

    fn lyapunov_value(&self, id: usize, x: Vec<f64>) -> PyResult<f64> {
        let p = self.inner.get(id).map_err(err)?;
        prims::lyapunov_value(&p.lyapunov, &x).map_err(err)
    }

    fn in_basin(&self, id: usize, x: Vec<f64>) -> PyResult<bool> {
        let p = self.inner.get(id).map_err(err)?;
        if x.len() != p.state_dim() {
            return Err(err("state dimension mismatch"));
        }
        Ok(p.in_basin(&x))
    }

    #[pyo3(signature = (id, samples=10_000, seed=0))]
    fn verify_contraction<'py>(
        &self,
        py: Python<'py>,
        id: usize,
        samples: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let r = prims::verify_contraction(self.inner.get(id).map_err(err)?, samples, seed)
            .map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("pass", r.pass)?;
        out.set_item("worst_ratio", r.worst_ratio)?;
        out.set_item("witness", r.witness)?;
        Ok(out)
    }

    #[pyo3(signature = (id, level, samples=10_000, seed=0))]
    fn certify_basin<'py>(
        &self,
        py: Python<'py>,
        id: usize,
        level: f64,
        samples: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let r = prims::certify_basin(self.inner.get(id).map_err(err)?, level, samples, seed)
            .map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("certified", r.certified)?;
        out.set_item("worst_ratio", r.worst_ratio)?;
        out.set_item("worst_image_level", r.worst_image_level)?;
        out.set_item("witness", r.witness)?;
        Ok(out)
    }

    #[pyo3(signature = (kappa, method="analytic", resolution=201))]
    fn omega(&self, kappa: f64, method: &str, resolution: usize) -> PyResult<f64> {
        match parse::<BoundMethod>(method)? {
            BoundMethod::Analytic => certs::omega_analytic(&self.inner, kappa),
            BoundMethod::Grid => certs::omega_grid(&self.inner, kappa, resolution),
        }
        .map_err(err)
    }

    #[pyo3(signature = (kappa, method="analytic", resolution=201))]
    fn mu(&self, kappa: f64, method: &str, resolution: usize) -> PyResult<f64> {
        match parse::<BoundMethod>(method)? {
            BoundMethod::Analytic => certs::mu_analytic(&self.inner, kappa),
            BoundMethod::Grid => certs::mu_grid(&self.inner, kappa, resolution),
        }
        .map_err(err)
    }
}

/// A dwell-time certificate bound to one library.
#[pyclass(name = "Certificate", frozen)]
struct PyCertificate {
    inner: certs::Certificate,
}

#[pymethods]
impl PyCertificate {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: certs::Certificate::from_json(text).map_err(err)?,
        })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: certs::Certificate::load(&path).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json_pretty()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }

    #[getter]
    fn n0_bar(&self) -> u32 {
        self.inner.n0_bar
    }

    #[getter]
    fn na_bar(&self) -> f64 {
        self.inner.na_bar
    }

    #[getter]
    fn delta_hat(&self) -> Option<f64> {
        self.inner.delta_hat
    }

    #[getter]
    fn trapping_level(&self) -> f64 {
        self.inner.trapping_level()
    }

    fn check_library(&self, library: &PyLibrary) -> PyResult<()> {
        self.inner.check_library(&library.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Certificate(kappa={}, n0_bar={}, na_bar={})",
            self.inner.kappa, self.inner.n0_bar, self.inner.na_bar
        )
    }
}

/// Returns the certificate, or `None` if no κ in the sweep is feasible.
#[pyfunction]
#[pyo3(signature = (library, method="analytic"))]
fn synthesize_certificate(library: &PyLibrary, method: &str) -> PyResult<Option<PyCertificate>> {
    let opts = SynthesisOptions::defaults(&library.inner, parse(method)?);
    let outcome = certs::synthesize_certificate(&library.inner, &opts).map_err(err)?;
    Ok(outcome.certificate.map(|inner| PyCertificate { inner }))
}

#[pyfunction]
#[pyo3(signature = (library, certificate, trials=256, horizon=200, seed=0))]
fn estimate_disturbance_margin(
    library: &PyLibrary,
    certificate: &PyCertificate,
    trials: usize,
    horizon: usize,
    seed: u64,
) -> PyResult<f64> {
    let opts = certs::MarginOptions {
        trial_budget: trials,
        horizon,
        seed,
        ..Default::default()
    };
    certs::estimate_disturbance_margin(&library.inner, &certificate.inner, &opts).map_err(err)
}

#[pyfunction]
fn dwell_time_bound(mu: f64, lambda_max: f64, epsilon: f64) -> PyResult<f64> {
    certs::dwell_time_bound(mu, lambda_max, epsilon).map_err(err)
}

#[pyfunction]
fn count_switches(sigma: Vec<usize>, lower: usize, upper: usize) -> PyResult<u32> {
    let s = SwitchingSignal::new(sigma).map_err(err)?;
    sw::count_switches(&s, lower, upper).map_err(err)
}

#[pyfunction]
fn validate_dwell_time<'py>(
    py: Python<'py>,
    sigma: Vec<usize>,
    n0: f64,
    na: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let s = SwitchingSignal::new(sigma).map_err(err)?;
    let budget = DwellTimeBudget::new(n0, na).map_err(err)?;
    to_py(py, &sw::validate_dwell_time(&s, &budget))
}

#[pyfunction]
#[pyo3(signature = (phi, dead_zone=0.0))]
fn heading_policy(phi: f64, dead_zone: f64) -> PyResult<usize> {
    sw::heading_policy(phi, dead_zone).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (library, certificate, episodes, horizon, amplitude=0.0, seed=0, shape="ball"))]
fn monte_carlo<'py>(
    py: Python<'py>,
    library: &PyLibrary,
    certificate: &PyCertificate,
    episodes: usize,
    horizon: usize,
    amplitude: f64,
    seed: u64,
    shape: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = CampaignConfig {
        shape: parse::<DisturbanceShape>(shape)?,
        ..CampaignConfig::new(episodes, horizon, amplitude, seed)
    };
    let report = py
        .detach(|| sim::monte_carlo(&library.inner, &certificate.inner, &cfg))
        .map_err(err)?;
    to_py(py, &report)
}

/// Runs a scenario document; `mode` overrides the document's mode.
#[pyfunction]
#[pyo3(signature = (path, mode=None))]
fn run_scenario<'py>(
    py: Python<'py>,
    path: PathBuf,
    mode: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let mut scenario = walker::load_scenario(&path).map_err(err)?;
    if let Some(m) = mode {
        scenario.mode = parse::<WalkerMode>(m)?;
    }
    let trace = walker::run_scenario(&scenario).map_err(err)?;
    let out = to_py(py, &trace)?;
    let extra = PyDict::new(py);
    extra.set_item("max_lateral_deviation", trace.max_lateral_deviation())?;
    extra.set_item("final_lateral_deviation", trace.final_lateral_deviation())?;
    extra.set_item("all_in_basins", trace.all_in_basins())?;
    extra.set_item("usage_counts", trace.usage_counts())?;
    out.call_method1("update", (extra,))?;
    Ok(out)
}

#[pymodule]
fn safeswitch(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLibrary>()?;
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(synthesize_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_disturbance_margin, m)?)?;
    m.add_function(wrap_pyfunction!(dwell_time_bound, m)?)?;
    m.add_function(wrap_pyfunction!(count_switches, m)?)?;
    m.add_function(wrap_pyfunction!(validate_dwell_time, m)?)?;
    m.add_function(wrap_pyfunction!(heading_policy, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
