//! Per-report energy functionals, run records and their CSV/JSON forms.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{HmhdError, Result};
use crate::field::SpectralVectorField;
use crate::linear_flows::LinearFlowPair;
use crate::lp::sobolev_norm_direct;
use crate::solver::SimState;
use crate::spectral::{divergence_residual, for_each_mode, fractional_symbol, hall_term, inner_product, l2_norm};

pub use crate::initial_data::smallness_111;

pub const CSV_COLUMNS: [&str; 14] = [
    "time",
    "l2_u",
    "l2_b",
    "hs_u",
    "hs_b",
    "diss_u_cum",
    "diss_b_cum",
    "E_total",
    "div_u",
    "div_b",
    "hall_cancel",
    "pert_f_hs",
    "pert_h_hs",
    "dt",
];

/// One diagnostics row. Norm columns hold squares; `pert_*` are NaN when no
/// linear flow is attached.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub time: f64,
    pub l2_u: f64,
    pub l2_b: f64,
    pub hs_u: f64,
    pub hs_b: f64,
    pub diss_u_cum: f64,
    pub diss_b_cum: f64,
    #[serde(rename = "E_total")]
    pub e_total: f64,
    pub div_u: f64,
    pub div_b: f64,
    pub hall_cancel: f64,
    pub pert_f_hs: f64,
    pub pert_h_hs: f64,
    pub dt: f64,
}

impl EnergyReport {
    pub fn values(&self) -> [f64; 14] {
        [
            self.time,
            self.l2_u,
            self.l2_b,
            self.hs_u,
            self.hs_b,
            self.diss_u_cum,
            self.diss_b_cum,
            self.e_total,
            self.div_u,
            self.div_b,
            self.hall_cancel,
            self.pert_f_hs,
            self.pert_h_hs,
            self.dt,
        ]
    }

    pub fn from_values(v: [f64; 14]) -> EnergyReport {
        EnergyReport {
            time: v[0],
            l2_u: v[1],
            l2_b: v[2],
            hs_u: v[3],
            hs_b: v[4],
            diss_u_cum: v[5],
            diss_b_cum: v[6],
            e_total: v[7],
            div_u: v[8],
            div_b: v[9],
            hall_cancel: v[10],
            pert_f_hs: v[11],
            pert_h_hs: v[12],
            dt: v[13],
        }
    }
}

/// `‖Λ^γ f‖²_{H^s}` with `‖g‖_{H^s} = ‖g‖_{L²} + ‖g‖_{Ḣ^s}`.
pub fn dissipation_norm_sq(f: &SpectralVectorField, gamma: f64, s: f64) -> f64 {
    let g = f.grid();
    let low = fractional_symbol(g, gamma);
    let high = fractional_symbol(g, gamma + s);
    let vol = g.volume();
    let a = (vol * f.weighted_energy(&low)).sqrt();
    let b = (vol * f.weighted_energy(&high)).sqrt();
    (a + b).powi(2)
}

/// Running trapezoid integrals of `‖Λ^α u‖²_{H^s}` and `‖Λ^β b‖²_{H^s}`.
#[derive(Clone, Debug)]
pub struct DissipationTracker {
    rate_u: f64,
    rate_b: f64,
    pub cum_u: f64,
    pub cum_b: f64,
}

impl DissipationTracker {
    pub fn new(state: &SimState) -> DissipationTracker {
        let (rate_u, rate_b) = Self::rates(state);
        DissipationTracker { rate_u, rate_b, cum_u: 0.0, cum_b: 0.0 }
    }

    fn rates(state: &SimState) -> (f64, f64) {
        let e = state.exponents;
        (dissipation_norm_sq(&state.u_hat, e.alpha, e.s), dissipation_norm_sq(&state.b_hat, e.beta, e.s))
    }

    pub fn advance(&mut self, next: &SimState, dt: f64) {
        let (ru, rb) = Self::rates(next);
        self.cum_u += 0.5 * dt * (self.rate_u + ru);
        self.cum_b += 0.5 * dt * (self.rate_b + rb);
        self.rate_u = ru;
        self.rate_b = rb;
    }
}

/// `|⟨hall(b), b⟩| / (‖hall(b)‖ ‖b‖)`, zero when either factor vanishes.
pub fn hall_cancellation(b: &SpectralVectorField) -> f64 {
    let h = hall_term(b);
    let denom = l2_norm(&h) * l2_norm(b);
    if denom == 0.0 {
        return 0.0;
    }
    inner_product(&h, b).expect("same grid").abs() / denom
}

pub fn report(state: &SimState, flow: Option<&LinearFlowPair>, tracker: &DissipationTracker, dt: f64) -> Result<EnergyReport> {
    let s = state.exponents.s;
    let hs = |f: &SpectralVectorField| sobolev_norm_direct(f, s, false).powi(2);
    let (pert_f_hs, pert_h_hs) = match flow {
        Some(flow) => {
            state.grid().check_same(flow.v0.grid(), "report")?;
            let f = state.u_hat.sub(&flow.velocity(state.time)?);
            let h = state.b_hat.sub(&flow.magnetic(state.time)?);
            (hs(&f), hs(&h))
        }
        None => (f64::NAN, f64::NAN),
    };
    let hs_u = hs(&state.u_hat);
    let hs_b = hs(&state.b_hat);
    Ok(EnergyReport {
        time: state.time,
        l2_u: l2_norm(&state.u_hat).powi(2),
        l2_b: l2_norm(&state.b_hat).powi(2),
        hs_u,
        hs_b,
        diss_u_cum: tracker.cum_u,
        diss_b_cum: tracker.cum_b,
        e_total: hs_u + hs_b + tracker.cum_u + tracker.cum_b,
        div_u: divergence_residual(&state.u_hat),
        div_b: divergence_residual(&state.b_hat),
        hall_cancel: hall_cancellation(&state.b_hat),
        pert_f_hs,
        pert_h_hs,
        dt,
    })
}

/// Energy `L³Σ|f̂|²` binned by the nearest integer lattice radius `|k|`.
pub fn shell_spectrum(f: &SpectralVectorField) -> Vec<(f64, f64)> {
    let g = f.grid();
    let shells = (g.max_k2() as f64).sqrt().round() as usize + 1;
    let mut energy = vec![0.0; shells];
    for_each_mode(g, |idx, _, k2| {
        let c = f.at(idx);
        let e = c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr();
        if e != 0.0 {
            energy[(k2 as f64).sqrt().round() as usize] += e;
        }
    });
    let vol = g.volume();
    energy.into_iter().enumerate().map(|(k, e)| (k as f64, e * vol)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    BlowUp,
    Error,
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub config: serde_json::Value,
    pub reports: Vec<EnergyReport>,
    pub checkpoints: Vec<PathBuf>,
    pub status: RunStatus,
    pub blow_up: Option<(f64, String)>,
    /// Worst relative energy-balance residual over all steps.
    pub energy_residual: f64,
    /// `(time, residual)` after every step.
    pub energy_residuals: Vec<(f64, f64)>,
    pub dt_floor_hits: u64,
    pub final_state: Option<SimState>,
    pub wall_seconds: f64,
}

impl RunRecord {
    pub fn new(config: serde_json::Value) -> RunRecord {
        RunRecord {
            config,
            reports: Vec::new(),
            checkpoints: Vec::new(),
            status: RunStatus::Error,
            blow_up: None,
            energy_residual: 0.0,
            energy_residuals: Vec::new(),
            dt_floor_hits: 0,
            final_state: None,
            wall_seconds: 0.0,
        }
    }

    pub fn push(&mut self, r: EnergyReport) {
        self.reports.push(r);
    }

    pub fn mark_blow_up(&mut self, time: f64, reason: &str) {
        self.status = RunStatus::BlowUp;
        self.blow_up = Some((time, reason.to_string()));
    }

    pub fn summary_json(&self) -> serde_json::Value {
        let peak = |f: fn(&EnergyReport) -> f64| self.reports.iter().map(f).fold(0.0, f64::max);
        let finite_or_null = |x: f64| if x.is_finite() { serde_json::json!(x) } else { serde_json::Value::Null };
        serde_json::json!({
            "config": self.config,
            "status": self.status,
            "blow_up": self.blow_up.as_ref().map(|(t, r)| serde_json::json!({"time": t, "reason": r})),
            "rows": self.reports.len(),
            "final_time": self.reports.last().map(|r| r.time),
            "peak_hs_u": peak(|r| r.hs_u),
            "peak_hs_b": peak(|r| r.hs_b),
            "peak_E_total": peak(|r| r.e_total),
            "energy_residual": finite_or_null(self.energy_residual),
            "dt_floor_hits": self.dt_floor_hits,
            "checkpoints": self.checkpoints,
            "wall_seconds": self.wall_seconds,
        })
    }

    pub fn write_summary(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, &self.summary_json())?;
        writeln!(w)?;
        Ok(())
    }
}

/// Writes the header and one row per report, each value with 17 significant
/// digits.
pub fn write_csv(reports: &[EnergyReport], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_COLUMNS)?;
    for r in reports {
        w.write_record(r.values().iter().map(|v| format!("{v:.16e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<EnergyReport>> {
    let mut rd = csv::Reader::from_path(path)?;
    let header = rd.headers()?.clone();
    if header.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(HmhdError::Format(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut out = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        if rec.len() != CSV_COLUMNS.len() {
            return Err(HmhdError::Format(format!("row {} has {} fields", line + 1, rec.len())));
        }
        let mut v = [0.0; 14];
        for (slot, field) in v.iter_mut().zip(rec.iter()) {
            *slot = field
                .trim()
                .parse()
                .map_err(|_| HmhdError::Format(format!("row {}: cannot parse {field:?}", line + 1)))?;
        }
        out.push(EnergyReport::from_values(v));
    }
    Ok(out)
}
