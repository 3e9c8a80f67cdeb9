//! Python module `hmhd`: grids, spectral fields, solver states and the
//! diagnostics and verification entry points.

use std::sync::Arc;

use hmhd_core::diagnostics::{hall_cancellation, RunStatus};
use hmhd_core::initial_data::{coefficient_norms, make_v0, random_divfree_field, AnnulusDataParams};
use hmhd_core::linear_flows::{lemma22_integral, q_kernel_radial};
use hmhd_core::lp::{gn_ratio, sobolev_norm_direct};
use hmhd_core::solver::{self, ExponentConfig, RunOptions, StepControl, StepMode};
use hmhd_core::spectral::{self as sp};
use hmhd_core::verify::{run_suite, VerifyOptions};
use hmhd_core::HmhdError;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: HmhdError) -> PyErr {
    match e {
        HmhdError::BlowUp { .. } | HmhdError::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(name = "Grid", frozen)]
#[derive(Clone)]
struct PyGrid(Arc<hmhd_core::Grid>);

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (n, box_length, dealias = 2.0 / 3.0))]
    fn new(n: usize, box_length: f64, dealias: f64) -> PyResult<Self> {
        hmhd_core::Grid::new(n, box_length, dealias).map(PyGrid).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn box_length(&self) -> f64 {
        self.0.box_length()
    }

    #[getter]
    fn cutoff(&self) -> i64 {
        self.0.cutoff()
    }

    #[getter]
    fn frequency_step(&self) -> f64 {
        self.0.frequency_step()
    }

    /// Flat array index of the integer wavenumber `k`.
    fn index_of(&self, k: [i64; 3]) -> usize {
        let n = self.0.n() as i64;
        let w = |x: i64| x.rem_euclid(n) as usize;
        self.0.index(w(k[0]), w(k[1]), w(k[2]))
    }

    fn __repr__(&self) -> String {
        format!("Grid(n={}, box_length={}, cutoff={})", self.0.n(), self.0.box_length(), self.0.cutoff())
    }
}

#[pyclass(name = "SpectralField")]
#[derive(Clone)]
struct PyField(hmhd_core::SpectralVectorField);

#[pymethods]
impl PyField {
    #[staticmethod]
    fn zeros(grid: &PyGrid) -> Self {
        PyField(hmhd_core::SpectralVectorField::zeros(&grid.0))
    }

    /// Three flat coefficient lists of length `N³`.
    #[staticmethod]
    fn from_components(grid: &PyGrid, comps: [Vec<Complex64>; 3]) -> PyResult<Self> {
        hmhd_core::SpectralVectorField::from_components(&grid.0, comps).map(PyField).map_err(err)
    }

    /// Random solenoidal field with `‖f‖_{H^s} = target`.
    #[staticmethod]
    #[pyo3(signature = (grid, s, target, seed, decay = 2.0))]
    fn random_divfree(grid: &PyGrid, s: f64, target: f64, seed: u64, decay: f64) -> PyResult<Self> {
        random_divfree_field(&grid.0, s, target, decay, seed).map(PyField).map_err(err)
    }

    /// Annulus-supported Beltrami data of shell half-width `epsilon`.
    #[staticmethod]
    fn annulus_v0(grid: &PyGrid, epsilon: f64) -> PyResult<Self> {
        make_v0(&grid.0, &AnnulusDataParams { epsilon, ..Default::default() }).map(PyField).map_err(err)
    }

    fn components(&self) -> Vec<Vec<Complex64>> {
        self.0.components().iter().cloned().collect()
    }

    /// Samples on the collocation grid, one flat list per component.
    fn physical(&self) -> Vec<Vec<f64>> {
        sp::transform_inverse(&self.0).samples().iter().cloned().collect()
    }

    fn grid(&self) -> PyGrid {
        PyGrid(self.0.grid().clone())
    }

    fn l2_norm(&self) -> f64 {
        sp::l2_norm(&self.0)
    }

    #[pyo3(signature = (s, homogeneous = false))]
    fn sobolev_norm(&self, s: f64, homogeneous: bool) -> f64 {
        sobolev_norm_direct(&self.0, s, homogeneous)
    }

    fn divergence_residual(&self) -> f64 {
        sp::divergence_residual(&self.0)
    }

    fn curl(&self) -> Self {
        PyField(sp::curl(&self.0))
    }

    fn leray_project(&self) -> Self {
        PyField(sp::leray_project(&self.0))
    }

    fn fractional_laplacian(&self, gamma: f64) -> PyResult<Self> {
        sp::fractional_laplacian(&self.0, gamma).map(PyField).map_err(err)
    }

    fn hall_term(&self) -> Self {
        PyField(sp::hall_term(&self.0))
    }

    fn hall_cancellation(&self) -> f64 {
        hall_cancellation(&self.0)
    }

    fn inner(&self, other: &PyField) -> PyResult<f64> {
        sp::inner_product(&self.0, &other.0).map_err(err)
    }

    /// Lattice `(L¹, L²)` norms of the Fourier density.
    fn coefficient_norms(&self) -> (f64, f64) {
        coefficient_norms(&self.0)
    }

    fn gn_ratio(&self, s: f64, gamma: f64) -> PyResult<f64> {
        gn_ratio(&self.0, s, gamma).map_err(err)
    }

    fn __add__(&self, other: &PyField) -> PyResult<Self> {
        self.0.grid().same_as(other.0.grid()).then(|| PyField(self.0.add(&other.0))).ok_or_else(|| PyValueError::new_err("grid mismatch"))
    }

    fn __sub__(&self, other: &PyField) -> PyResult<Self> {
        self.0.grid().same_as(other.0.grid()).then(|| PyField(self.0.sub(&other.0))).ok_or_else(|| PyValueError::new_err("grid mismatch"))
    }

    fn __mul__(&self, a: f64) -> Self {
        PyField(self.0.scaled(a))
    }

    fn __rmul__(&self, a: f64) -> Self {
        PyField(self.0.scaled(a))
    }
}

#[pyclass(name = "State")]
#[derive(Clone)]
struct PyState(solver::SimState);

fn control(dt: f64, hall: bool, nonlinear: bool, adaptive: bool) -> StepControl {
    StepControl {
        dt,
        dt_max: dt,
        mode: if adaptive { StepMode::Adaptive } else { StepMode::Fixed },
        hall_enabled: hall,
        nonlinear_enabled: nonlinear,
        ..Default::default()
    }
}

#[pymethods]
impl PyState {
    #[new]
    #[pyo3(signature = (u, b, alpha = 1.0, beta = 0.5, s = 3.0, galerkin_radius = f64::INFINITY))]
    fn new(u: &PyField, b: &PyField, alpha: f64, beta: f64, s: f64, galerkin_radius: f64) -> PyResult<Self> {
        solver::SimState::new(u.0.clone(), b.0.clone(), ExponentConfig { alpha, beta, s }, galerkin_radius).map(PyState).map_err(err)
    }

    #[getter]
    fn time(&self) -> f64 {
        self.0.time
    }

    #[getter]
    fn step_count(&self) -> u64 {
        self.0.step_count
    }

    #[getter]
    fn u(&self) -> PyField {
        PyField(self.0.u_hat.clone())
    }

    #[getter]
    fn b(&self) -> PyField {
        PyField(self.0.b_hat.clone())
    }

    /// `‖u‖² + ‖b‖²`.
    fn energy(&self) -> f64 {
        solver::energy(&self.0)
    }

    /// Advances one step and returns the new state.
    #[pyo3(signature = (dt, hall = true, nonlinear = true))]
    fn step(&self, dt: f64, hall: bool, nonlinear: bool) -> PyResult<Self> {
        solver::step_with_dt(&self.0, &control(dt, hall, nonlinear, false), dt).map(PyState).map_err(err)
    }

    /// Nonlinear tendencies `(du, db)`.
    #[pyo3(signature = (hall = true))]
    fn tendencies(&self, hall: bool) -> (PyField, PyField) {
        let (du, db) = solver::rhs_nonlinear(&self.0, hall);
        (PyField(du), PyField(db))
    }

    #[pyo3(signature = (hall = true))]
    fn cfl_dt(&self, hall: bool) -> f64 {
        solver::cfl_dt(&self.0, &control(1.0, hall, true, true)).dt
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        hmhd_core::checkpoint::write_checkpoint(&path, &self.0).map_err(err)
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        hmhd_core::checkpoint::read_checkpoint(&path).map(PyState).map_err(err)
    }
}

/// Integrates to `t_end` and returns a dict with `status`, `rows` (one dict
/// per report), `energy_residual` and the final `state`.
#[pyfunction]
#[pyo3(signature = (state, dt, t_end, diagnostics_every = 10, hall = true, nonlinear = true, adaptive = false))]
fn run<'py>(
    py: Python<'py>,
    state: &PyState,
    dt: f64,
    t_end: f64,
    diagnostics_every: u64,
    hall: bool,
    nonlinear: bool,
    adaptive: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let record = py
        .detach(|| solver::run(&state.0, &control(dt, hall, nonlinear, adaptive), t_end, diagnostics_every, &RunOptions::default()))
        .map_err(err)?;
    let out = PyDict::new(py);
    let status = match record.status {
        RunStatus::Completed => "completed",
        RunStatus::BlowUp => "blow_up",
        RunStatus::Error => "error",
    };
    out.set_item("status", status)?;
    let rows = record
        .reports
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            for (k, v) in hmhd_core::diagnostics::CSV_COLUMNS.iter().zip(r.values()) {
                d.set_item(*k, v)?;
            }
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;
    out.set_item("rows", rows)?;
    out.set_item("energy_residual", record.energy_residual)?;
    out.set_item("state", record.final_state.map(PyState))?;
    Ok(out)
}

/// `∫₀^T ‖G(t)‖_{H^{s+1/2}} dt` for the linear flows built on `v0`.
#[pyfunction]
#[pyo3(signature = (v0, alpha, alpha1 = 1.0, alpha2 = 1.0, s = 3.0, t_max = 20.0, dt = 0.05))]
fn forcing_time_integral(v0: &PyField, alpha: f64, alpha1: f64, alpha2: f64, s: f64, t_max: f64, dt: f64) -> PyResult<f64> {
    lemma22_integral(&v0.0, alpha, alpha1, alpha2, s, t_max, dt).map(|r| r.value).map_err(err)
}

/// Kernel `Q` at `|ξ−η| = a`, `|η| = b`.
#[pyfunction]
fn q_kernel(alpha: f64, t: f64, a: f64, b: f64) -> f64 {
    q_kernel_radial(alpha, t, a, b)
}

/// Runs a verification suite; returns `(passed, notes)`.
#[pyfunction]
#[pyo3(signature = (suite, samples = 20, seed = 0, alpha = 1.0))]
fn verify(py: Python<'_>, suite: &str, samples: usize, seed: u64, alpha: f64) -> PyResult<(bool, Vec<(String, f64)>)> {
    let opts = VerifyOptions { samples, seed, alpha, ..Default::default() };
    let result = py.detach(|| run_suite(suite, &opts)).map_err(err)?;
    Ok((result.passed(), result.notes))
}

#[pymodule]
fn hmhd(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyState>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(forcing_time_integral, m)?)?;
    m.add_function(wrap_pyfunction!(q_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
