//! Property sweeps behind the `verify` command. Each suite produces a table
//! of ratios, a list of failed hard checks and soft empirical summaries.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{HmhdError, Result};
use crate::field::SpectralVectorField;
use crate::grid::Grid;
use crate::initial_data::{coefficient_norms, make_v0, random_divfree_field, AnnulusDataParams};
use crate::linear_flows::{lemma22_integral, q_kernel_bound_check, shell_sample_pattern};
use crate::lp::{gn_ratio, sobolev_norm_direct, LPBlockSet};
use crate::solver::{run, ExponentConfig, RunOptions, SimState, StepControl};
use crate::spectral::l2_norm;

pub const SUITES: [&str; 6] = ["lp", "commutator", "gn", "linflow", "qkernel", "energy"];

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Number of random samples (fields or triples).
    pub samples: usize,
    pub seed: u64,
    /// Dissipation exponent for the kernel and linear-flow suites.
    pub alpha: f64,
    pub epsilons: Vec<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { samples: 20, seed: 0, alpha: 1.0, epsilons: vec![0.125, 0.0625, 0.03125] }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub failures: Vec<String>,
    /// Empirical constants, reported but never asserted.
    pub notes: Vec<(String, f64)>,
}

impl SuiteResult {
    fn new(suite: &str, columns: &[&str]) -> SuiteResult {
        SuiteResult {
            suite: suite.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn random_field(grid: &Arc<Grid>, seed: u64) -> Result<SpectralVectorField> {
    random_divfree_field(grid, 0.0, 1.0, 0.0, seed)
}

fn box_grid(n: usize) -> Result<Arc<Grid>> {
    Grid::with_default_dealias(n, 2.0 * PI)
}

pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<SuiteResult> {
    match name {
        "lp" => suite_lp(opts),
        "commutator" => suite_commutator(opts),
        "gn" => suite_gn(opts),
        "linflow" => suite_linflow(opts),
        "qkernel" => suite_qkernel(opts),
        "energy" => suite_energy(opts),
        other => Err(HmhdError::Config(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")))),
    }
}

/// Partition of unity, block reconstruction and LP/direct norm equivalence.
pub fn suite_lp(opts: &VerifyOptions) -> Result<SuiteResult> {
    let g = box_grid(32)?;
    let lp = LPBlockSet::new(&g);
    let mut out = SuiteResult::new("lp", &["sample", "s", "lp_over_direct", "reconstruction_error"]);
    let mut worst_partition: f64 = 0.0;
    for k2 in 0..=g.max_k2() as usize {
        let total: f64 = (lp.j_min()..=lp.j_max()).map(|j| lp.table(j).map(|t| t[k2]).unwrap_or(0.0)).sum();
        worst_partition = worst_partition.max((total - 1.0).abs());
    }
    out.check(worst_partition < 1e-14, || format!("partition of unity off by {worst_partition:e}"));
    for i in 0..opts.samples {
        let f = random_field(&g, opts.seed + i as u64)?;
        let mut sum = SpectralVectorField::zeros(&g);
        for j in lp.j_min()..=lp.j_max() {
            sum.axpy(1.0, &lp.dyadic_block(&f, j)?);
        }
        let recon = l2_norm(&sum.sub(&f)) / l2_norm(&f);
        out.check(recon < 1e-12, || format!("sample {i}: reconstruction error {recon:e}"));
        for s in [0.5, 1.0, 3.0] {
            let ratio = lp.sobolev_norm(&f, s, true)? / sobolev_norm_direct(&f, s, true);
            out.check((0.5..=2.0).contains(&ratio), || format!("sample {i} s {s}: ratio {ratio}"));
            out.rows.push(vec![i as f64, s, ratio, recon]);
        }
    }
    out.notes.push(("partition_error".into(), worst_partition));
    Ok(out)
}

/// Commutator ratio over random triples and blocks 0..=4, plus the
/// constant-`H` cancellation.
pub fn suite_commutator(opts: &VerifyOptions) -> Result<SuiteResult> {
    let g = box_grid(32)?;
    let lp = LPBlockSet::new(&g);
    let mut out = SuiteResult::new("commutator", &["sample", "j", "ratio"]);
    let x = random_field(&g, opts.seed + 7)?;
    let w = random_field(&g, opts.seed + 8)?;
    let mut h = SpectralVectorField::zeros(&g);
    h.component_mut(0)[0] = Complex64::new(0.7, 0.0);
    h.component_mut(2)[0] = Complex64::new(-1.1, 0.0);
    for j in 0..=4 {
        let num = lp.lemma21_numerator(&h, &x, &w, j)?;
        let scale = l2_norm(&x) * l2_norm(&w);
        out.check(num <= 1e-12 * scale, || format!("constant H, j {j}: numerator {num:e}"));
    }
    let mut max_ratio: f64 = 0.0;
    for i in 0..opts.samples {
        let base = opts.seed + 3 * i as u64 + 100;
        let (h, x, w) = (random_field(&g, base)?, random_field(&g, base + 1)?, random_field(&g, base + 2)?);
        for j in 0..=4 {
            let r = lp.lemma21_ratio(&h, &x, &w, j)?;
            out.check(r.is_finite(), || format!("sample {i} j {j}: ratio {r}"));
            max_ratio = max_ratio.max(r);
            out.rows.push(vec![i as f64, j as f64, r]);
        }
    }
    out.notes.push(("max_ratio".into(), max_ratio));
    Ok(out)
}

/// Interpolation ratio: exactly 1 on single modes, at most 1 otherwise.
pub fn suite_gn(opts: &VerifyOptions) -> Result<SuiteResult> {
    let g = box_grid(16)?;
    let mut out = SuiteResult::new("gn", &["sample", "s", "gamma", "ratio"]);
    let pairs = [(1.0, 0.5), (3.0, 1.0), (2.0, 0.5)];
    for (m, k) in [[1, 0, 0], [0, 2, 1], [3, 1, 2]].iter().enumerate() {
        let mut f = SpectralVectorField::zeros(&g);
        let idx = g.index(k[0], k[1], k[2]);
        f.component_mut(m % 3)[idx] = Complex64::new(0.5, 0.25);
        f.component_mut(m % 3)[g.mirror_index(idx)] = Complex64::new(0.5, -0.25);
        for &(s, gamma) in &pairs {
            let r = gn_ratio(&f, s, gamma)?;
            out.check((r - 1.0).abs() < 1e-12, || format!("single mode {k:?}: ratio {r}"));
        }
    }
    let mut max_ratio: f64 = 0.0;
    for i in 0..opts.samples {
        let f = random_field(&g, opts.seed + i as u64)?;
        for &(s, gamma) in &pairs {
            let r = gn_ratio(&f, s, gamma)?;
            out.check(r <= 1.0 + 1e-10, || format!("sample {i} s {s} gamma {gamma}: ratio {r}"));
            max_ratio = max_ratio.max(r);
            out.rows.push(vec![i as f64, s, gamma, r]);
        }
    }
    out.notes.push(("max_ratio".into(), max_ratio));
    Ok(out)
}

/// Norm and time-integral scalings of the linear flows across the
/// ε-sweep, on a box fine enough to resolve the thinnest shell.
pub fn suite_linflow(opts: &VerifyOptions) -> Result<SuiteResult> {
    let (n, l) = linflow_grid(&opts.epsilons);
    let g = Grid::with_default_dealias(n, l)?;
    let mut out = SuiteResult::new("linflow", &["epsilon", "l1", "l2", "l2_scaled", "l1_scaled", "integral", "integral_scaled"]);
    let mut first = true;
    for &eps in &opts.epsilons {
        let v0 = make_v0(&g, &AnnulusDataParams { epsilon: eps, ..Default::default() })?;
        let (l1, l2) = coefficient_norms(&v0);
        let log = (1.0 / eps).ln();
        let integral = lemma22_integral(&v0, opts.alpha, 1.0, 1.0, 3.0, 20.0, 0.1)?;
        out.check(integral.value.is_finite(), || format!("epsilon {eps}: integral {}", integral.value));
        if first {
            for (alpha, a1, a2) in [(0.5, 1.0, 1.0), (opts.alpha, 0.0, 1.0), (opts.alpha, 1.0, 0.0)] {
                let z = lemma22_integral(&v0, alpha, a1, a2, 3.0, 20.0, 0.1)?.value;
                out.check(z == 0.0, || format!("alpha {alpha} amplitudes ({a1}, {a2}): integral {z:e}"));
            }
            first = false;
        }
        out.rows.push(vec![
            eps,
            l1,
            l2,
            l2 / (eps.powf(-0.5) * log),
            l1 / (eps.sqrt() * log),
            integral.value,
            integral.value / (eps * l1 * l2),
        ]);
    }
    for (col, name) in [(3, "l2_spread"), (4, "l1_spread"), (6, "integral_spread")] {
        let vals: Vec<f64> = out.rows.iter().map(|r| r[col]).collect();
        let hi = vals.iter().cloned().fold(0.0, f64::max);
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        out.notes.push((name.into(), hi / lo));
    }
    Ok(out)
}

/// Smallest `N` and box with `2π/L ≤ ε` for every ε of the sweep that keeps
/// each shell `|ξ| ≤ 1 + ε` inside the dealiased cube.
pub fn linflow_grid(epsilons: &[f64]) -> (usize, f64) {
    let eps_min = epsilons.iter().cloned().fold(f64::INFINITY, f64::min);
    let eps_max = epsilons.iter().cloned().fold(0.0, f64::max);
    let mut l = 32.0 * PI;
    while 2.0 * PI / l > eps_min * (1.0 + 1e-12) {
        l *= 2.0;
    }
    let dk = 2.0 * PI / l;
    let mut n = 16;
    while ((2.0 / 3.0) * (n / 2) as f64).floor() * dk < 1.0 + eps_max + eps_min {
        n += 8;
    }
    (n, l)
}

/// `|Q|` on the shell over 10⁴ samples and a range of times, at ε and ε/2.
pub fn suite_qkernel(opts: &VerifyOptions) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("qkernel", &["epsilon", "t", "max_ratio", "max_abs_q"]);
    let pattern = shell_sample_pattern(10_000, opts.seed);
    let eps = opts.epsilons.first().copied().unwrap_or(0.0625);
    let ts: Vec<f64> = (0..=40).map(|i| 0.25 * i as f64).collect();
    let mut peak = [0.0; 2];
    for (slot, e) in [eps, eps / 2.0].into_iter().enumerate() {
        for &t in &ts {
            let r = q_kernel_bound_check(opts.alpha, e, &[t], &pattern);
            out.check(r.max_ratio.is_finite(), || format!("epsilon {e} t {t}: ratio {}", r.max_ratio));
            if opts.alpha == 0.5 {
                out.check(r.max_abs_q == 0.0, || format!("alpha 1/2, epsilon {e} t {t}: |Q| = {:e}", r.max_abs_q));
            }
            peak[slot] = f64::max(peak[slot], r.max_abs_q);
            out.rows.push(vec![e, t, r.max_ratio, r.max_abs_q]);
        }
    }
    let max_ratio = out.rows.iter().map(|r| r[2]).fold(0.0, f64::max);
    out.notes.push(("max_ratio".into(), max_ratio));
    if peak[0] > 0.0 {
        out.notes.push(("half_epsilon_peak_ratio".into(), peak[1] / peak[0]));
    }
    Ok(out)
}

/// Energy-balance residual of a small random run under step halving.
pub fn suite_energy(opts: &VerifyOptions) -> Result<SuiteResult> {
    let g = box_grid(16)?;
    let u = random_divfree_field(&g, 3.0, 0.005, 2.0, opts.seed)?;
    let b = random_divfree_field(&g, 3.0, 0.005, 2.0, opts.seed + 1)?;
    let state = SimState::new(u, b, ExponentConfig::default(), f64::INFINITY)?;
    let mut out = SuiteResult::new("energy", &["dt", "residual"]);
    for dt in [0.1, 0.05, 0.025] {
        let record = run(&state, &StepControl { dt, ..Default::default() }, 1.0, 1000, &RunOptions::default())?;
        out.check(record.energy_residual.is_finite(), || format!("dt {dt}: residual {}", record.energy_residual));
        out.rows.push(vec![dt, record.energy_residual]);
    }
    let mid = out.rows[1][1];
    out.check(mid < 1e-4, || format!("residual {mid:e} at dt 0.05"));
    for w in 0..2 {
        let (a, b) = (out.rows[w][1], out.rows[w + 1][1]);
        if a > 1e-14 {
            out.notes.push((format!("halving_ratio_{w}"), a / b));
        }
    }
    Ok(out)
}
