//! Galerkin-truncated Hall-MHD time integration with integrating factors for
//! the fractional dissipation.

use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::checkpoint::write_checkpoint;
use crate::diagnostics::{report, DissipationTracker, RunRecord, RunStatus};
use crate::error::{HmhdError, Result};
use crate::field::{to_physical, to_spectral, SpectralVectorField};
use crate::grid::Grid;
use crate::linear_flows::LinearFlowPair;
use crate::lp::sobolev_norm_direct;
use crate::spectral::{advect, curl, for_each_mode, for_each_retained_mode, fractional_symbol, hall_term, leray_project};

/// Dissipation and regularity exponents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentConfig {
    pub alpha: f64,
    pub beta: f64,
    pub s: f64,
}

impl Default for ExponentConfig {
    fn default() -> Self {
        ExponentConfig { alpha: 1.0, beta: 0.5, s: 3.0 }
    }
}

impl ExponentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(HmhdError::Config(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(HmhdError::Config(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.s > 2.5 && self.s.is_finite()) {
            return Err(HmhdError::Config(format!("s must exceed 5/2, got {}", self.s)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SimState {
    pub u_hat: SpectralVectorField,
    pub b_hat: SpectralVectorField,
    pub time: f64,
    pub step_count: u64,
    pub exponents: ExponentConfig,
    /// Radius of the Galerkin ball in frequency units; `∞` keeps every
    /// dealiased mode.
    pub galerkin_radius: f64,
}

impl SimState {
    /// Projects both fields onto the solenoidal, dealiased, Galerkin-truncated
    /// subspace.
    pub fn new(u: SpectralVectorField, b: SpectralVectorField, exponents: ExponentConfig, galerkin_radius: f64) -> Result<SimState> {
        u.grid().check_same(b.grid(), "state")?;
        exponents.validate()?;
        if !(galerkin_radius > 0.0) {
            return Err(HmhdError::Config(format!("galerkin radius must be positive, got {galerkin_radius}")));
        }
        let mut state = SimState { u_hat: u, b_hat: b, time: 0.0, step_count: 0, exponents, galerkin_radius };
        state.u_hat = leray_project(&state.u_hat);
        state.b_hat = leray_project(&state.b_hat);
        state.truncate();
        Ok(state)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.u_hat.grid()
    }

    fn with_fields(&self, u_hat: SpectralVectorField, b_hat: SpectralVectorField) -> SimState {
        SimState { u_hat, b_hat, time: self.time, step_count: self.step_count, exponents: self.exponents, galerkin_radius: self.galerkin_radius }
    }

    fn truncate(&mut self) {
        for f in [&mut self.u_hat, &mut self.b_hat] {
            f.dealias();
            if self.galerkin_radius.is_finite() {
                f.truncate_ball(self.galerkin_radius);
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u_hat.is_finite() && self.b_hat.is_finite()
    }

    /// `‖u‖_{H^s} + ‖b‖_{H^s}`.
    pub fn hs_norm(&self) -> f64 {
        let s = self.exponents.s;
        sobolev_norm_direct(&self.u_hat, s, false) + sobolev_norm_direct(&self.b_hat, s, false)
    }

    /// Largest frequency the state can carry.
    pub fn max_frequency(&self) -> f64 {
        let g = self.grid();
        let cube = 3f64.sqrt() * g.cutoff() as f64 * g.frequency_step();
        cube.min(self.galerkin_radius)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepMode {
    Fixed,
    Adaptive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub dt: f64,
    /// Upper bound for adaptive steps.
    pub dt_max: f64,
    pub cfl_safety: f64,
    pub mode: StepMode,
    pub nonlinear_enabled: bool,
    pub hall_enabled: bool,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { dt: 0.01, dt_max: 0.01, cfl_safety: 0.3, mode: StepMode::Fixed, nonlinear_enabled: true, hall_enabled: true }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(HmhdError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.dt_max > 0.0) {
            return Err(HmhdError::Config(format!("dt_max must be positive, got {}", self.dt_max)));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(HmhdError::Config(format!("cfl_safety must lie in (0, 1], got {}", self.cfl_safety)));
        }
        Ok(())
    }
}

/// Zeroes all modes with `|ξ| > radius` in both fields.
pub fn galerkin_truncate(state: &SimState, radius: f64) -> Result<SimState> {
    if !(radius > 0.0) {
        return Err(HmhdError::Domain(format!("truncation radius must be positive, got {radius}")));
    }
    let mut out = state.clone();
    out.u_hat.truncate_ball(radius);
    out.b_hat.truncate_ball(radius);
    Ok(out)
}

/// Nonlinear tendencies in conservative form:
/// `du = −P ∇·(u⊗u − b⊗b)`, `db = ∇×((u − ∇×b)×b)`, truncated to the
/// Galerkin ball.
pub fn rhs_nonlinear(state: &SimState, hall_enabled: bool) -> (SpectralVectorField, SpectralVectorField) {
    let g = state.grid().clone();
    let u = &state.u_hat;
    let b = &state.b_hat;
    let j = if hall_enabled { Some(curl(b)) } else { None };
    let mut inputs: Vec<&[Complex64]> = Vec::with_capacity(9);
    inputs.extend(u.components().iter().map(|c| c.as_slice()));
    inputs.extend(b.components().iter().map(|c| c.as_slice()));
    if let Some(j) = &j {
        inputs.extend(j.components().iter().map(|c| c.as_slice()));
    }
    let phys = to_physical(&g, &inputs, true);
    drop(j);
    let len = g.len();
    let (pu, rest) = phys.split_at(3);
    let (pb, pj) = rest.split_at(3);
    let mut products = vec![vec![0.0; len]; 9];
    {
        let (flux, emf) = products.split_at_mut(6);
        const PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];
        for (t, &(a, c)) in flux.iter_mut().zip(PAIRS.iter()) {
            for x in 0..len {
                t[x] = pu[a][x] * pu[c][x] - pb[a][x] * pb[c][x];
            }
        }
        for x in 0..len {
            let (w0, w1, w2) = if pj.is_empty() {
                (pu[0][x], pu[1][x], pu[2][x])
            } else {
                (pu[0][x] - pj[0][x], pu[1][x] - pj[1][x], pu[2][x] - pj[2][x])
            };
            emf[0][x] = w1 * pb[2][x] - w2 * pb[1][x];
            emf[1][x] = w2 * pb[0][x] - w0 * pb[2][x];
            emf[2][x] = w0 * pb[1][x] - w1 * pb[0][x];
        }
    }
    drop(phys);
    let refs: Vec<&[f64]> = products.iter().map(|p| p.as_slice()).collect();
    let spec = to_spectral(&g, &refs, true);
    drop(products);

    let mut du = SpectralVectorField::zeros(&g);
    let mut db = SpectralVectorField::zeros(&g);
    let limit = galerkin_limit(state);
    let i = Complex64::new(0.0, 1.0);
    for_each_retained_mode(&g, |idx, xi, k2| {
        if k2 == 0 || (k2 as f64) > limit {
            return;
        }
        let t = |a: usize, c: usize| -> Complex64 {
            let slot = match (a.min(c), a.max(c)) {
                (0, 0) => 0,
                (1, 1) => 1,
                (2, 2) => 2,
                (0, 1) => 3,
                (0, 2) => 4,
                _ => 5,
            };
            spec[slot][idx]
        };
        let mut m = [Complex64::new(0.0, 0.0); 3];
        for (a, out) in m.iter_mut().enumerate() {
            *out = -i * (t(a, 0) * xi[0] + t(a, 1) * xi[1] + t(a, 2) * xi[2]);
        }
        let xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if xi2 == 0.0 {
            return;
        }
        let dot = (m[0] * xi[0] + m[1] * xi[1] + m[2] * xi[2]) / xi2;
        du.set(idx, [m[0] - dot * xi[0], m[1] - dot * xi[1], m[2] - dot * xi[2]]);
        let e = [spec[6][idx], spec[7][idx], spec[8][idx]];
        db.set(
            idx,
            [
                i * (e[2] * xi[1] - e[1] * xi[2]),
                i * (e[0] * xi[2] - e[2] * xi[0]),
                i * (e[1] * xi[0] - e[0] * xi[1]),
            ],
        );
    });
    (du, db)
}

/// Largest admissible `|k|²` of the Galerkin ball.
fn galerkin_limit(state: &SimState) -> f64 {
    if state.galerkin_radius.is_finite() {
        (state.galerkin_radius / state.grid().frequency_step()).powi(2) * (1.0 + 1e-12)
    } else {
        f64::INFINITY
    }
}

/// The same tendencies assembled from `advect` and `hall_term`:
/// `du = −P[J(u·∇u) − J(b·∇b)]`, `db = −J(u·∇b) + J(b·∇u) − J(hall(b))`.
pub fn rhs_nonlinear_reference(state: &SimState, hall_enabled: bool) -> Result<(SpectralVectorField, SpectralVectorField)> {
    let (u, b) = (&state.u_hat, &state.b_hat);
    let j = |mut f: SpectralVectorField| {
        if state.galerkin_radius.is_finite() {
            f.truncate_ball(state.galerkin_radius);
        }
        f
    };
    let mut m = j(advect(u, u)?);
    m.axpy(-1.0, &j(advect(b, b)?));
    let du = leray_project(&m).scaled(-1.0);
    let mut db = j(advect(b, u)?);
    db.axpy(-1.0, &j(advect(u, b)?));
    if hall_enabled {
        db.axpy(-1.0, &j(hall_term(b)));
    }
    Ok((j(du), db))
}

/// Per-mode integrating factors `e^{-τλ}` for the velocity and magnetic
/// symbols, tabulated by `|k|²`.
struct Factors {
    lambda_u: Vec<f64>,
    lambda_b: Vec<f64>,
}

impl Factors {
    fn new(state: &SimState) -> Factors {
        let g = state.grid();
        Factors {
            lambda_u: fractional_symbol(g, state.exponents.alpha),
            lambda_b: fractional_symbol(g, state.exponents.beta),
        }
    }

    fn tables(&self, tau: f64) -> (Vec<f64>, Vec<f64>) {
        (
            self.lambda_u.iter().map(|l| (-tau * l).exp()).collect(),
            self.lambda_b.iter().map(|l| (-tau * l).exp()).collect(),
        )
    }
}

/// One stage combination per retained mode inside the Galerkin ball:
/// `a·E_a·x + c·E_c·(y + dt·n)`, Leray-projected when `project` is set.
/// Every other mode of the result is zero.
#[allow(clippy::too_many_arguments)]
fn stage(
    x: Option<(f64, &[f64], &SpectralVectorField)>,
    c: f64,
    table: &[f64],
    y: &SpectralVectorField,
    n: &SpectralVectorField,
    dt: f64,
    limit: f64,
    project: bool,
) -> SpectralVectorField {
    let g = y.grid().clone();
    let mut out = SpectralVectorField::zeros(&g);
    let zero = Complex64::new(0.0, 0.0);
    for_each_retained_mode(&g, |idx, xi, k2| {
        if (k2 as f64) > limit {
            return;
        }
        let k = k2 as usize;
        let (yv, nv) = (y.at(idx), n.at(idx));
        let xv = x.map(|(a, t, f)| (a * t[k], f.at(idx)));
        let e = c * table[k];
        let mut v = [zero; 3];
        for d in 0..3 {
            v[d] = e * (yv[d] + dt * nv[d]);
            if let Some((w, xv)) = xv {
                v[d] += w * xv[d];
            }
        }
        let xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if project && k2 != 0 && xi2 != 0.0 {
            let p = (v[0] * xi[0] + v[1] * xi[1] + v[2] * xi[2]) / xi2;
            v = [v[0] - p * xi[0], v[1] - p * xi[1], v[2] - p * xi[2]];
        }
        out.set(idx, v);
    });
    out
}

fn tendency(state: &SimState, control: &StepControl) -> (SpectralVectorField, SpectralVectorField) {
    if control.nonlinear_enabled {
        rhs_nonlinear(state, control.hall_enabled)
    } else {
        (SpectralVectorField::zeros(state.grid()), SpectralVectorField::zeros(state.grid()))
    }
}

/// One IF-SSPRK3 step of size `dt`, optionally reusing the tendency at the
/// current state.
fn step_inner(
    state: &SimState,
    control: &StepControl,
    dt: f64,
    first: Option<(SpectralVectorField, SpectralVectorField)>,
) -> Result<SimState> {
    let factors = Factors::new(state);
    let (eu_full, eb_full) = factors.tables(dt);
    let (eu_half, eb_half) = factors.tables(0.5 * dt);
    let (eu_back, eb_back) = factors.tables(-0.5 * dt);
    let limit = galerkin_limit(state);
    let (u, b) = (&state.u_hat, &state.b_hat);
    let (nu, nb) = first.unwrap_or_else(|| tendency(state, control));

    let s1 = state.with_fields(
        stage(None, 1.0, &eu_full, u, &nu, dt, limit, false),
        stage(None, 1.0, &eb_full, b, &nb, dt, limit, false),
    );
    drop((nu, nb));

    let (nu, nb) = tendency(&s1, control);
    let s2 = state.with_fields(
        stage(Some((0.75, &eu_half, u)), 0.25, &eu_back, &s1.u_hat, &nu, dt, limit, false),
        stage(Some((0.75, &eb_half, b)), 0.25, &eb_back, &s1.b_hat, &nb, dt, limit, false),
    );
    drop((s1, nu, nb));

    let (nu, nb) = tendency(&s2, control);
    let mut next = state.with_fields(
        stage(Some((1.0 / 3.0, &eu_full, u)), 2.0 / 3.0, &eu_half, &s2.u_hat, &nu, dt, limit, true),
        stage(Some((1.0 / 3.0, &eb_full, b)), 2.0 / 3.0, &eb_half, &s2.b_hat, &nb, dt, limit, true),
    );
    drop((s2, nu, nb));

    next.time = state.time + dt;
    next.step_count = state.step_count + 1;
    if !next.is_finite() {
        return Err(HmhdError::BlowUp {
            time: next.time,
            reason: "non-finite coefficients".into(),
            last_good: Box::new(state.clone()),
        });
    }
    Ok(next)
}

/// One step with `control.dt` (fixed mode) or the CFL step (adaptive mode).
pub fn step(state: &SimState, control: &StepControl) -> Result<SimState> {
    control.validate()?;
    let dt = match control.mode {
        StepMode::Fixed => control.dt,
        StepMode::Adaptive => cfl_dt(state, control).dt,
    };
    step_inner(state, control, dt, None)
}

/// One step of an explicitly given size.
pub fn step_with_dt(state: &SimState, control: &StepControl, dt: f64) -> Result<SimState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(HmhdError::Config(format!("dt must be positive, got {dt}")));
    }
    step_inner(state, control, dt, None)
}

pub const DT_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CflStep {
    pub dt: f64,
    pub floored: bool,
}

/// `safety · min(h/max|u|, h/max|b|, 1/(max|b| k_max²))`, capped by `dt_max`
/// and floored at [`DT_FLOOR`]. The whistler bound applies only with the
/// Hall term enabled.
pub fn cfl_dt(state: &SimState, control: &StepControl) -> CflStep {
    let g = state.grid();
    let (u, b) = (&state.u_hat, &state.b_hat);
    let c = [u.component(0), u.component(1), u.component(2), b.component(0), b.component(1), b.component(2)];
    let phys = to_physical(g, &c, true);
    let mag = |p: &[Vec<f64>]| (0..g.len()).map(|x| p[0][x] * p[0][x] + p[1][x] * p[1][x] + p[2][x] * p[2][x]).fold(0.0, f64::max).sqrt();
    let umax = mag(&phys[0..3]);
    let bmax = mag(&phys[3..6]);
    let h = g.spacing();
    let kmax = state.max_frequency();
    let mut limit = f64::INFINITY;
    if umax > 0.0 {
        limit = limit.min(h / umax);
    }
    if bmax > 0.0 {
        limit = limit.min(h / bmax);
        if control.hall_enabled && control.nonlinear_enabled {
            limit = limit.min(1.0 / (bmax * kmax * kmax));
        }
    }
    let dt = (control.cfl_safety * limit).min(control.dt_max);
    if !(dt >= DT_FLOOR) {
        return CflStep { dt: DT_FLOOR, floored: true };
    }
    CflStep { dt, floored: false }
}

/// Output options for [`run`].
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Steps between checkpoints; 0 disables them.
    pub checkpoint_every: u64,
    pub checkpoint_dir: Option<PathBuf>,
    pub checkpoint_prefix: String,
    /// Linear flow subtracted for the perturbation columns.
    pub flow: Option<LinearFlowPair>,
    pub config: serde_json::Value,
}

pub const BLOWUP_GROWTH: f64 = 1e6;

/// `2 L³ Σ λ Re(conj c · (−λ c + n))`, the time derivative of `L³ Σ λ|c|²`.
fn dissipation_rate(f: &SpectralVectorField, n: &SpectralVectorField, lambda: &[f64]) -> f64 {
    let g = f.grid();
    let mut acc = 0.0;
    for_each_mode(g, |idx, _, k2| {
        let l = lambda[k2 as usize];
        if l == 0.0 {
            return;
        }
        for c in 0..3 {
            let a = f.component(c)[idx];
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let d = -l * a + n.component(c)[idx];
            acc += l * (a.re * d.re + a.im * d.im);
        }
    });
    2.0 * g.volume() * acc
}

/// Energy-balance bookkeeping for `‖u‖² + ‖b‖² + 2∫(‖Λ^α u‖² + ‖Λ^β b‖²)`,
/// integrated with the endpoint-corrected trapezoid rule.
struct EnergyBalance {
    lambda_u: Vec<f64>,
    lambda_b: Vec<f64>,
    initial: f64,
    integral: f64,
    d: f64,
    d_rate: f64,
    worst: f64,
}

impl EnergyBalance {
    fn new(state: &SimState, n: &(SpectralVectorField, SpectralVectorField)) -> EnergyBalance {
        let lambda_u = fractional_symbol(state.grid(), state.exponents.alpha);
        let lambda_b = fractional_symbol(state.grid(), state.exponents.beta);
        let mut eb = EnergyBalance { lambda_u, lambda_b, initial: energy(state), integral: 0.0, d: 0.0, d_rate: 0.0, worst: 0.0 };
        (eb.d, eb.d_rate) = eb.rates(state, n);
        eb
    }

    fn rates(&self, state: &SimState, n: &(SpectralVectorField, SpectralVectorField)) -> (f64, f64) {
        let vol = state.grid().volume();
        let d = vol * (state.u_hat.weighted_energy(&self.lambda_u) + state.b_hat.weighted_energy(&self.lambda_b));
        let rate = dissipation_rate(&state.u_hat, &n.0, &self.lambda_u) + dissipation_rate(&state.b_hat, &n.1, &self.lambda_b);
        (d, rate)
    }

    fn advance(&mut self, state: &SimState, n: &(SpectralVectorField, SpectralVectorField), dt: f64) -> f64 {
        let (d, rate) = self.rates(state, n);
        self.integral += 0.5 * dt * (self.d + d) + dt * dt / 12.0 * (self.d_rate - rate);
        self.d = d;
        self.d_rate = rate;
        let residual = self.residual(state);
        self.worst = self.worst.max(residual);
        residual
    }

    fn residual(&self, state: &SimState) -> f64 {
        if self.initial == 0.0 {
            return 0.0;
        }
        (energy(state) + 2.0 * self.integral - self.initial).abs() / self.initial
    }
}

/// `‖u‖²_{L²} + ‖b‖²_{L²}`.
pub fn energy(state: &SimState) -> f64 {
    let vol = state.grid().volume();
    (state.u_hat.coefficient_l2().powi(2) + state.b_hat.coefficient_l2().powi(2)) * vol
}

/// Advances to `t_end`, recording a report every `diagnostics_every` steps
/// and at both ends. A blow-up ends the run early with status `BlowUp`.
pub fn run(initial: &SimState, control: &StepControl, t_end: f64, diagnostics_every: u64, options: &RunOptions) -> Result<RunRecord> {
    control.validate()?;
    if !(t_end > initial.time) {
        return Err(HmhdError::Config(format!("t_end {t_end} must exceed the initial time {}", initial.time)));
    }
    let every = diagnostics_every.max(1);
    let started = std::time::Instant::now();
    let mut record = RunRecord::new(options.config.clone());
    let mut tracker = DissipationTracker::new(initial);
    let mut state = initial.clone();
    let initial_hs = state.hs_norm();
    let mut n = tendency(&state, control);
    let mut balance = EnergyBalance::new(&state, &n);
    let mut last_dt = 0.0;
    record.push(report(&state, options.flow.as_ref(), &tracker, last_dt)?);
    let tol = 1e-12 * t_end.abs().max(1.0);
    loop {
        if state.time >= t_end - tol {
            break;
        }
        let mut dt = match control.mode {
            StepMode::Fixed => control.dt,
            StepMode::Adaptive => {
                let c = cfl_dt(&state, control);
                if c.floored {
                    record.dt_floor_hits += 1;
                    log::warn!("time step floored at t = {}", state.time);
                }
                c.dt
            }
        };
        if state.time + dt > t_end - tol {
            dt = t_end - state.time;
        }
        let next = match step_inner(&state, control, dt, Some(n)) {
            Ok(next) => next,
            Err(HmhdError::BlowUp { time, reason, last_good }) => {
                record.mark_blow_up(time, &reason);
                record.final_state = Some(*last_good);
                record.energy_residual = balance.worst;
                record.wall_seconds = started.elapsed().as_secs_f64();
                return Ok(record);
            }
            Err(e) => return Err(e),
        };
        let growth = next.hs_norm();
        if initial_hs > 0.0 && growth > BLOWUP_GROWTH * initial_hs {
            record.mark_blow_up(next.time, &format!("H^s norm grew to {growth:e}"));
            record.final_state = Some(state);
            record.energy_residual = balance.worst;
            record.wall_seconds = started.elapsed().as_secs_f64();
            return Ok(record);
        }
        tracker.advance(&next, dt);
        state = next;
        last_dt = dt;
        n = tendency(&state, control);
        let residual = balance.advance(&state, &n, dt);
        record.energy_residuals.push((state.time, residual));
        let at_end = state.time >= t_end - tol;
        if state.step_count % every == 0 || at_end {
            record.push(report(&state, options.flow.as_ref(), &tracker, last_dt)?);
        }
        if options.checkpoint_every > 0 && state.step_count % options.checkpoint_every == 0 {
            if let Some(dir) = &options.checkpoint_dir {
                let path = dir.join(format!("{}_{:08}.chk", options.checkpoint_prefix, state.step_count));
                write_checkpoint(&path, &state)?;
                record.checkpoints.push(path);
            }
        }
    }
    record.status = RunStatus::Completed;
    record.energy_residual = balance.worst;
    record.final_state = Some(state);
    record.wall_seconds = started.elapsed().as_secs_f64();
    Ok(record)
}
