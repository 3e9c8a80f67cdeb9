//! Exact fractional-heat flows `U`, `B` started from `v₀`, the forcings they
//! generate in the perturbation system, and the kernel `Q`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{HmhdError, Result};
use crate::field::SpectralVectorField;
use crate::initial_data::coefficient_norms;
use crate::lp::sobolev_norm_direct;
use crate::spectral::{cross_product, curl};

/// `e^{-t(-Δ)^γ} f`.
pub fn semigroup_apply(field: &SpectralVectorField, t: f64, gamma: f64) -> Result<SpectralVectorField> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(HmhdError::Domain(format!("semigroup time must be finite and >= 0, got {t}")));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(HmhdError::Domain(format!("semigroup exponent must be finite and >= 0, got {gamma}")));
    }
    let table = field.grid().radial_table(|r| (-t * if gamma == 0.0 { 1.0 } else { r.powf(2.0 * gamma) }).exp());
    let mut out = field.clone();
    out.apply_radial(&table);
    Ok(out)
}

/// `U(t) = α₁ e^{-t(-Δ)^α} v₀` and `B(t) = α₂ e^{-t(-Δ)^{1/2}} v₀`.
#[derive(Clone, Debug)]
pub struct LinearFlowPair {
    pub v0: SpectralVectorField,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha: f64,
}

impl LinearFlowPair {
    pub fn new(v0: SpectralVectorField, alpha1: f64, alpha2: f64, alpha: f64) -> Result<LinearFlowPair> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(HmhdError::Domain(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        Ok(LinearFlowPair { v0, alpha1, alpha2, alpha })
    }

    pub fn velocity(&self, t: f64) -> Result<SpectralVectorField> {
        if t == 0.0 {
            return Ok(self.v0.scaled(self.alpha1));
        }
        Ok(semigroup_apply(&self.v0, t, self.alpha)?.scaled(self.alpha1))
    }

    pub fn magnetic(&self, t: f64) -> Result<SpectralVectorField> {
        if t == 0.0 {
            return Ok(self.v0.scaled(self.alpha2));
        }
        Ok(semigroup_apply(&self.v0, t, 0.5)?.scaled(self.alpha2))
    }
}

/// `F = U×(∇×U) − B×(∇×B)`.
pub fn forcing_f(u: &SpectralVectorField, b: &SpectralVectorField) -> Result<SpectralVectorField> {
    u.grid().check_same(b.grid(), "forcing_f")?;
    let mut out = cross_product(u, &curl(u))?;
    out.axpy(-1.0, &cross_product(b, &curl(b))?);
    Ok(out)
}

/// `G = ∇×(U×B)`.
pub fn forcing_g(u: &SpectralVectorField, b: &SpectralVectorField) -> Result<SpectralVectorField> {
    Ok(curl(&cross_product(u, b)?))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QKernelParams {
    pub alpha: f64,
    pub t: f64,
    pub xi: [f64; 3],
    pub eta: [f64; 3],
}

/// `Q` as a function of `a = |ξ−η|` and `b = |η|`.
pub fn q_kernel_radial(alpha: f64, t: f64, a: f64, b: f64) -> f64 {
    let p = 2.0 * alpha;
    (-t * (a.powf(p) + b)).exp() - (-t * (a + b.powf(p))).exp()
}

/// `Q(t,ξ,η) = e^{-t(|ξ−η|^{2α}+|η|)} − e^{-t(|ξ−η|+|η|^{2α})}`.
pub fn q_kernel(params: &QKernelParams) -> f64 {
    let d = [0, 1, 2].map(|i| params.xi[i] - params.eta[i]);
    let a = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    let b = (params.eta[0].powi(2) + params.eta[1].powi(2) + params.eta[2].powi(2)).sqrt();
    q_kernel_radial(params.alpha, params.t, a, b)
}

/// Deterministic points of `[-1, 1]²`, mapped to the shell as `1 + εx`.
pub fn shell_sample_pattern(count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QBoundReport {
    /// `max |Q| / ((e^{-(1/2)(1/2)^{2α}t} + e^{-t/4}) ε)`.
    pub max_ratio: f64,
    pub max_abs_q: f64,
}

/// Sweeps `|ξ−η| = 1 + εx`, `|η| = 1 + εy` over the pattern and every `t`.
pub fn q_kernel_bound_check(alpha: f64, epsilon: f64, t_samples: &[f64], pattern: &[(f64, f64)]) -> QBoundReport {
    let mut max_ratio: f64 = 0.0;
    let mut max_abs_q: f64 = 0.0;
    for &t in t_samples {
        let envelope = ((-0.5 * 0.5f64.powf(2.0 * alpha) * t).exp() + (-t / 4.0).exp()) * epsilon;
        for &(x, y) in pattern {
            let q = q_kernel_radial(alpha, t, 1.0 + epsilon * x, 1.0 + epsilon * y).abs();
            max_abs_q = max_abs_q.max(q);
            max_ratio = max_ratio.max(q / envelope);
        }
    }
    QBoundReport { max_ratio, max_abs_q }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeIntegral {
    pub value: f64,
    /// Integrand at `t_max` relative to its maximum over the grid.
    pub tail_fraction: f64,
    /// Set when the tail fraction exceeds 1e-8.
    pub decay_warning: bool,
}

/// Composite trapezoid of `t ↦ ‖∇×(U×B)‖_{H^{s+1/2}}` on `[0, t_max]`.
pub fn lemma22_integral(
    v0: &SpectralVectorField,
    alpha: f64,
    alpha1: f64,
    alpha2: f64,
    s: f64,
    t_max: f64,
    dt_quad: f64,
) -> Result<TimeIntegral> {
    if !(t_max > 0.0 && dt_quad > 0.0 && t_max.is_finite()) {
        return Err(HmhdError::Domain(format!("invalid quadrature t_max={t_max} dt={dt_quad}")));
    }
    let flow = LinearFlowPair::new(v0.clone(), alpha1, alpha2, alpha)?;
    // U and B are parallel when either amplitude vanishes or both flows share
    // the same semigroup.
    if alpha1 * alpha2 == 0.0 || alpha == 0.5 {
        return Ok(TimeIntegral { value: 0.0, tail_fraction: 0.0, decay_warning: false });
    }
    let steps = (t_max / dt_quad).round().max(1.0) as usize;
    let h = t_max / steps as f64;
    let mut values = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let t = i as f64 * h;
        let g = forcing_g(&flow.velocity(t)?, &flow.magnetic(t)?)?;
        values.push(sobolev_norm_direct(&g, s + 0.5, false));
    }
    let value = h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[steps]));
    let peak = values.iter().cloned().fold(0.0, f64::max);
    let tail_fraction = if peak > 0.0 { values[steps] / peak } else { 0.0 };
    Ok(TimeIntegral { value, tail_fraction, decay_warning: tail_fraction >= 1e-8 })
}

/// `‖U×(∇×U)‖_{H^{s+1/2}} + ‖B×(∇×B)‖_{H^{s+1/2}}`.
pub fn lemma22_pointwise(u: &SpectralVectorField, b: &SpectralVectorField, s: f64) -> Result<f64> {
    u.grid().check_same(b.grid(), "lemma22_pointwise")?;
    let fu = cross_product(u, &curl(u))?;
    let fb = cross_product(b, &curl(b))?;
    Ok(sobolev_norm_direct(&fu, s + 0.5, false) + sobolev_norm_direct(&fb, s + 0.5, false))
}

/// `ε^{s+1/2} (e^{-t/2^{2α}} + e^{-t/2})² ‖v̂₀‖_{L²} ‖v̂₀‖_{L¹}`.
pub fn lemma22_pointwise_scale(flow: &LinearFlowPair, t: f64, s: f64, epsilon: f64) -> f64 {
    let (l1, l2) = coefficient_norms(&flow.v0);
    let env = (-t / 2f64.powf(2.0 * flow.alpha)).exp() + (-t / 2.0).exp();
    epsilon.powf(s + 0.5) * env * env * l2 * l1
}

/// Pointwise forcing norm at `t` normalized by [`lemma22_pointwise_scale`].
pub fn lemma22_pointwise_ratio(flow: &LinearFlowPair, t: f64, s: f64, epsilon: f64) -> Result<f64> {
    let lhs = lemma22_pointwise(&flow.velocity(t)?, &flow.magnetic(t)?, s)?;
    let scale = lemma22_pointwise_scale(flow, t, s, epsilon);
    Ok(if scale == 0.0 { 0.0 } else { lhs / scale })
}
