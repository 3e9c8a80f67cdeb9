//! Initial conditions: small random solenoidal data and the annulus-supported
//! Beltrami construction with its large-data decomposition.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{HmhdError, Result};
use crate::field::SpectralVectorField;
use crate::grid::Grid;
use crate::lp::sobolev_norm_direct;
use crate::spectral::{for_each_mode, leray_project};

/// Parameters of the shell data `v₀ = ε^{-3/2} log(1/ε) g`.
///
/// The shell profile is `ψ(r) = ε^{profile_exponent} (1 − ((r−1)/ε)²)²` on
/// `(1−ε, 1+ε)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusDataParams {
    pub epsilon: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub tangent_axis: [f64; 3],
    pub seed: u64,
    pub delta: f64,
    pub profile_exponent: f64,
    /// Regularity index used for the perturbation norms.
    pub s: f64,
    /// Power-law decay of the random perturbation spectrum.
    pub spectrum_decay: f64,
    /// Constant in the exponential factor of the smallness functional.
    pub smallness_constant: f64,
}

impl Default for AnnulusDataParams {
    fn default() -> Self {
        AnnulusDataParams {
            epsilon: 1.0 / 16.0,
            alpha1: 1.0,
            alpha2: 1.0,
            tangent_axis: [0.0, 0.0, 1.0],
            seed: 0,
            delta: 1.0,
            profile_exponent: 1.1,
            s: 3.0,
            spectrum_decay: 2.0,
            smallness_constant: 1.0,
        }
    }
}

impl AnnulusDataParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 0.5) {
            return Err(HmhdError::Domain(format!("epsilon must lie in (0, 1/2], got {}", self.epsilon)));
        }
        let norm = self.tangent_axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(HmhdError::Domain("tangent axis must be a nonzero finite vector".into()));
        }
        if !(self.delta > 0.0) {
            return Err(HmhdError::Domain(format!("delta must be positive, got {}", self.delta)));
        }
        for (name, v) in [
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("profile_exponent", self.profile_exponent),
            ("s", self.s),
            ("spectrum_decay", self.spectrum_decay),
            ("smallness_constant", self.smallness_constant),
        ] {
            if !v.is_finite() {
                return Err(HmhdError::Domain(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    pub fn profile(&self, r: f64) -> f64 {
        let x = (r - 1.0) / self.epsilon;
        if x.abs() >= 1.0 {
            0.0
        } else {
            self.epsilon.powf(self.profile_exponent) * (1.0 - x * x).powi(2)
        }
    }

    /// `ε^{-3/2} log(1/ε)`.
    pub fn amplification(&self) -> f64 {
        self.epsilon.powf(-1.5) * (1.0 / self.epsilon).ln()
    }
}

/// The Beltrami field `g`, built mode by mode as
/// `c_ξ = (2π/L)³ (m − i n) ψ(|ξ|)` with `n = ξ×e/|ξ×e|` and `m = ξ×n/|ξ|`,
/// which gives `iξ × c_ξ = |ξ| c_ξ`.
pub fn make_beltrami_g(grid: &Arc<Grid>, params: &AnnulusDataParams) -> Result<SpectralVectorField> {
    params.validate()?;
    let eps = params.epsilon;
    let dk = grid.frequency_step();
    if dk > 2.0 * eps {
        return Err(HmhdError::Construction(format!(
            "lattice spacing {dk} does not resolve a shell of half-width {eps}"
        )));
    }
    if 1.0 + eps > grid.cutoff() as f64 * dk {
        return Err(HmhdError::Construction(format!(
            "shell radius {} exceeds the retained frequency range {}",
            1.0 + eps,
            grid.cutoff() as f64 * dk
        )));
    }
    let e = params.tangent_axis;
    let en = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
    let e = [e[0] / en, e[1] / en, e[2] / en];
    let weight = dk.powi(3);
    let mut out = SpectralVectorField::zeros(grid);
    let mut populated = 0usize;
    for_each_mode(grid, |idx, xi, k2| {
        // Nyquist axes report ξ = 0, so the radius comes from the integer k.
        let r = (k2 as f64).sqrt() * dk;
        let psi = params.profile(r);
        if psi <= 0.0 {
            return;
        }
        let t = cross(xi, e);
        let tn = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
        if tn <= 1e-12 * r {
            return;
        }
        let n = [t[0] / tn, t[1] / tn, t[2] / tn];
        let m = cross(xi, n).map(|x| x / r);
        let a = weight * psi;
        out.set(idx, [0, 1, 2].map(|c| Complex64::new(a * m[c], -a * n[c])));
        populated += 1;
    });
    if populated == 0 {
        return Err(HmhdError::Construction("annulus contains no usable lattice points".into()));
    }
    Ok(out)
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn make_v0(grid: &Arc<Grid>, params: &AnnulusDataParams) -> Result<SpectralVectorField> {
    Ok(make_beltrami_g(grid, params)?.scaled(params.amplification()))
}

/// Lattice `L¹` and `L²` norms of the Fourier density `c_ξ / (2π/L)³`,
/// integrated with cell volume `(2π/L)³`.
pub fn coefficient_norms(field: &SpectralVectorField) -> (f64, f64) {
    let w = field.grid().frequency_step().powi(3);
    let c = field.components();
    let mut l1 = 0.0;
    let mut sq = 0.0;
    for i in 0..field.grid().len() {
        let e = c[0][i].norm_sqr() + c[1][i].norm_sqr() + c[2][i].norm_sqr();
        l1 += e.sqrt();
        sq += e;
    }
    (l1, (sq / w).sqrt())
}

/// Random solenoidal field with spectrum `|ξ|^{-decay}` on the dealiased
/// modes, scaled to `‖f‖_{H^s} = target`.
pub fn random_divfree_field(grid: &Arc<Grid>, s: f64, target: f64, spectrum_decay: f64, seed: u64) -> Result<SpectralVectorField> {
    if !(target >= 0.0 && target.is_finite()) {
        return Err(HmhdError::Domain(format!("target norm must be finite and >= 0, got {target}")));
    }
    let mut out = SpectralVectorField::zeros(grid);
    if target == 0.0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n();
    for i0 in 0..n {
        for i1 in 0..n {
            for i2 in 0..n {
                let idx = grid.index(i0, i1, i2);
                let mirror = grid.mirror_index(idx);
                if !grid.is_retained(i0, i1, i2) || idx >= mirror {
                    continue;
                }
                let xi = grid.xi(i0, i1, i2);
                let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
                let amp = r.powf(-spectrum_decay);
                let v = [0; 3].map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im) * amp
                });
                out.set(idx, v);
                out.set(mirror, v.map(|z| z.conj()));
            }
        }
    }
    let mut out = leray_project(&out);
    let norm = sobolev_norm_direct(&out, s, false);
    if norm == 0.0 {
        return Err(HmhdError::Construction("random field has no solenoidal content".into()));
    }
    out.scale_mut(target / norm);
    Ok(out)
}

/// `(‖u₀₁‖²_{H^s} + ‖b₀₁‖²_{H^s} + (ε^{s+1/2}+ε)‖v̂₀‖_{L²}‖v̂₀‖_{L¹} + ‖v̂₀‖_{L¹}) exp(C‖v̂₀‖_{L¹})`.
pub fn smallness_111(
    u01: &SpectralVectorField,
    b01: &SpectralVectorField,
    v0: &SpectralVectorField,
    epsilon: f64,
    s: f64,
    c: f64,
) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(HmhdError::Domain(format!("epsilon must lie in (0, 1/2], got {epsilon}")));
    }
    let (l1, l2) = coefficient_norms(v0);
    let hu = sobolev_norm_direct(u01, s, false);
    let hb = sobolev_norm_direct(b01, s, false);
    Ok((hu * hu + hb * hb + (epsilon.powf(s + 0.5) + epsilon) * l2 * l1 + l1) * (c * l1).exp())
}

/// The large-data decomposition `u₀ = u₀₁ + α₁v₀`, `b₀ = b₀₁ + α₂v₀`.
#[derive(Clone, Debug)]
pub struct Theorem2Data {
    pub u0: SpectralVectorField,
    pub b0: SpectralVectorField,
    pub u01: SpectralVectorField,
    pub b01: SpectralVectorField,
    pub v0: SpectralVectorField,
    pub smallness_value: f64,
}

pub fn make_theorem2_data(grid: &Arc<Grid>, params: &AnnulusDataParams, u01_norm: f64, b01_norm: f64) -> Result<Theorem2Data> {
    params.validate()?;
    let v0 = make_v0(grid, params)?;
    let u01 = random_divfree_field(grid, params.s, u01_norm, params.spectrum_decay, params.seed)?;
    let b01 = random_divfree_field(grid, params.s, b01_norm, params.spectrum_decay, params.seed.wrapping_add(1))?;
    let mut u0 = u01.clone();
    u0.axpy(params.alpha1, &v0);
    let mut b0 = b01.clone();
    b0.axpy(params.alpha2, &v0);
    let smallness_value = if params.alpha1 == 0.0 && params.alpha2 == 0.0 {
        let z = SpectralVectorField::zeros(grid);
        smallness_111(&u01, &b01, &z, params.epsilon, params.s, params.smallness_constant)?
    } else {
        smallness_111(&u01, &b01, &v0, params.epsilon, params.s, params.smallness_constant)?
    };
    Ok(Theorem2Data { u0, b0, u01, b01, v0, smallness_value })
}

/// Whether all coefficient energy lies in `lo ≤ |ξ| ≤ hi`, up to a relative
/// leak of 1e-24, together with the leaked fraction.
pub fn spectral_support_check(field: &SpectralVectorField, lo: f64, hi: f64) -> (bool, f64) {
    let mut inside = 0.0;
    let mut outside = 0.0;
    let tol = 1e-12;
    let dk = field.grid().frequency_step();
    for_each_mode(field.grid(), |idx, _, k2| {
        let c = field.at(idx);
        let e = c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr();
        if e == 0.0 {
            return;
        }
        let r = (k2 as f64).sqrt() * dk;
        if r >= lo * (1.0 - tol) && r <= hi * (1.0 + tol) {
            inside += e;
        } else {
            outside += e;
        }
    });
    let total = inside + outside;
    if total == 0.0 {
        return (true, 0.0);
    }
    let frac = outside / total;
    (frac < 1e-24, frac)
}
