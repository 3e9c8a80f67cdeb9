//! Dyadic Littlewood-Paley decomposition and the norms built on it.

use std::sync::Arc;

use crate::error::{HmhdError, Result};
use crate::field::{to_physical, SpectralVectorField};
use crate::grid::Grid;
use crate::spectral::{advect, fractional_symbol, gradient_tensor};

const INNER: f64 = 0.75;
const OUTER: f64 = 4.0 / 3.0;

fn smooth_step_kernel(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// C∞ step: 0 for `x ≤ 0`, 1 for `x ≥ 1`.
fn smooth_step(x: f64) -> f64 {
    let a = smooth_step_kernel(x);
    let b = smooth_step_kernel(1.0 - x);
    a / (a + b)
}

/// The transition of the cutoff is pulled toward the inner radius, which puts
/// most of the weight of `φ_j` near `|ξ| = 2^j`. With a symmetric transition
/// the block centres sit near `1.4·2^j` and the `2^{2js}` weights undershoot
/// the direct `Ḣ^s` norm by about `1.4^{-s}`.
const WARP: f64 = 0.25;

/// Radial cutoff equal to 1 on `[0, 3/4]` and 0 on `[4/3, ∞)`.
pub fn cutoff_chi(r: f64) -> f64 {
    let t = (r - INNER) / (OUTER - INNER);
    if t <= 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        1.0 - smooth_step(t.powf(WARP))
    }
}

/// Unnormalized `φ_j(r)`.
pub fn partition_phi(j: i32, r: f64) -> f64 {
    if j < 0 {
        cutoff_chi(r)
    } else {
        cutoff_chi(r / 2f64.powi(j + 1)) - cutoff_chi(r / 2f64.powi(j))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormSpec {
    pub s: f64,
    pub p: f64,
    pub r: f64,
    pub homogeneous: bool,
}

impl NormSpec {
    pub fn new(s: f64, p: f64, r: f64, homogeneous: bool) -> Result<NormSpec> {
        if !s.is_finite() || p.is_nan() || r.is_nan() || p < 1.0 || r < 1.0 {
            return Err(HmhdError::Domain(format!("invalid norm spec s={s} p={p} r={r}")));
        }
        Ok(NormSpec { s, p, r, homogeneous })
    }
}

/// Partition `{φ_j}` for `j = -1..=j_max`, tabulated by `|k|²`.
#[derive(Clone, Debug)]
pub struct LPBlockSet {
    grid: Arc<Grid>,
    j_max: i32,
    tables: Vec<Vec<f64>>,
}

impl LPBlockSet {
    pub const J_MIN: i32 = -1;

    pub fn new(grid: &Arc<Grid>) -> LPBlockSet {
        let top = grid.max_retained_frequency();
        let mut j_max = -1;
        while INNER * 2f64.powi(j_max + 1) < top {
            j_max += 1;
        }
        let dk = grid.frequency_step();
        let count = grid.max_k2() as usize + 1;
        let mut tables = vec![vec![0.0; count]; (j_max + 2) as usize];
        for k2 in 0..count {
            let r = (k2 as f64).sqrt() * dk;
            let raw: Vec<f64> = (-1..=j_max).map(|j| partition_phi(j, r)).collect();
            let total: f64 = raw.iter().sum();
            for (t, v) in tables.iter_mut().zip(raw) {
                t[k2] = if total > 0.0 { v / total } else { 0.0 };
            }
        }
        LPBlockSet { grid: grid.clone(), j_max, tables }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn j_min(&self) -> i32 {
        Self::J_MIN
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    /// `φ_j` tabulated by `|k|²`.
    pub fn table(&self, j: i32) -> Result<&[f64]> {
        if j < Self::J_MIN || j > self.j_max {
            return Err(HmhdError::OutOfRange(format!("block {j} outside [-1, {}]", self.j_max)));
        }
        Ok(&self.tables[(j + 1) as usize])
    }

    fn check(&self, f: &SpectralVectorField) -> Result<()> {
        self.grid.check_same(f.grid(), "littlewood-paley")
    }

    /// `Δ_j f`.
    pub fn dyadic_block(&self, f: &SpectralVectorField, j: i32) -> Result<SpectralVectorField> {
        self.check(f)?;
        let table = self.table(j)?;
        let mut out = f.clone();
        out.apply_radial(table);
        Ok(out)
    }

    /// `S_k f = Σ_{j ≤ k-1} Δ_j f`.
    pub fn low_pass(&self, f: &SpectralVectorField, k: i32) -> Result<SpectralVectorField> {
        self.check(f)?;
        let mut table = vec![0.0; self.tables[0].len()];
        for j in Self::J_MIN..k.min(self.j_max + 1) {
            for (t, v) in table.iter_mut().zip(&self.tables[(j + 1) as usize]) {
                *t += v;
            }
        }
        let mut out = f.clone();
        out.apply_radial(&table);
        Ok(out)
    }

    /// `Δ̃_k = Δ_{k-1} + Δ_k + Δ_{k+1}`, with out-of-range blocks dropped.
    pub fn widened_block(&self, f: &SpectralVectorField, k: i32) -> Result<SpectralVectorField> {
        self.check(f)?;
        let mut out = SpectralVectorField::zeros(f.grid());
        for j in (k - 1)..=(k + 1) {
            if (Self::J_MIN..=self.j_max).contains(&j) {
                out.axpy(1.0, &self.dyadic_block(f, j)?);
            }
        }
        Ok(out)
    }

    /// `‖Δ_j f‖²_{L²}` for every block.
    pub fn block_energies(&self, f: &SpectralVectorField) -> Result<Vec<f64>> {
        self.check(f)?;
        let vol = self.grid.volume();
        Ok(self
            .tables
            .iter()
            .map(|t| f.weighted_energy(&t.iter().map(|x| x * x).collect::<Vec<_>>()) * vol)
            .collect())
    }

    /// LP Sobolev norm: `‖f‖_{Ḣ^s}² = Σ_j 2^{2js}‖Δ_j f‖²`, and
    /// `‖f‖_{H^s} = ‖f‖_{L²} + ‖f‖_{Ḣ^s}`.
    pub fn sobolev_norm(&self, f: &SpectralVectorField, s: f64, homogeneous: bool) -> Result<f64> {
        let energies = self.block_energies(f)?;
        let hom = energies
            .iter()
            .enumerate()
            .map(|(i, e)| 2f64.powf(2.0 * (i as f64 - 1.0) * s) * e)
            .sum::<f64>()
            .sqrt();
        if homogeneous {
            Ok(hom)
        } else {
            Ok(l2(f) + hom)
        }
    }

    /// `‖Δ_j f‖_{L^p}`; `p = 2` uses Parseval, otherwise collocation sums.
    pub fn block_lp_norm(&self, f: &SpectralVectorField, j: i32, p: f64) -> Result<f64> {
        let block = self.dyadic_block(f, j)?;
        Ok(lp_norm(&block, p))
    }

    /// `(Σ_j (2^{js}‖Δ_j f‖_{L^p})^r)^{1/r}`, a supremum for `r = ∞`. The
    /// inhomogeneous variant adds `‖f‖_{L^p}`.
    pub fn besov_norm(&self, f: &SpectralVectorField, spec: NormSpec) -> Result<f64> {
        self.check(f)?;
        let mut terms = Vec::with_capacity(self.tables.len());
        for j in Self::J_MIN..=self.j_max {
            terms.push(2f64.powf(j as f64 * spec.s) * self.block_lp_norm(f, j, spec.p)?);
        }
        let hom = if spec.r.is_infinite() {
            terms.iter().cloned().fold(0.0, f64::max)
        } else {
            terms.iter().map(|t| t.powf(spec.r)).sum::<f64>().powf(1.0 / spec.r)
        };
        if spec.homogeneous {
            Ok(hom)
        } else {
            Ok(lp_norm(f, spec.p) + hom)
        }
    }

    /// `Δ_j((H·∇)X) − (H·∇)(Δ_j X)`.
    pub fn commutator_advection(&self, h: &SpectralVectorField, x: &SpectralVectorField, j: i32) -> Result<SpectralVectorField> {
        self.check(h)?;
        self.check(x)?;
        let whole = self.dyadic_block(&advect(h, x)?, j)?;
        let parts = advect(h, &self.dyadic_block(x, j)?)?;
        Ok(whole.sub(&parts))
    }

    /// The three terms of the commutator bound for block `j`:
    /// `‖∇H‖∞‖Δ_jX‖‖Δ_jW‖`, `‖Δ_jH‖∞‖∇X‖‖Δ_jW‖` and
    /// `‖∇H‖∞‖Δ_jW‖ Σ_{k≥j-1} 2^{j-k}‖Δ_kX‖`.
    pub fn lemma21_bound_terms(
        &self,
        h: &SpectralVectorField,
        x: &SpectralVectorField,
        w: &SpectralVectorField,
        j: i32,
    ) -> Result<[f64; 3]> {
        self.check(h)?;
        self.check(x)?;
        self.check(w)?;
        self.table(j)?;
        let grad_h = gradient_sup(h);
        let xj = lp_norm(&self.dyadic_block(x, j)?, 2.0);
        let wj = lp_norm(&self.dyadic_block(w, j)?, 2.0);
        let hj = lp_norm(&self.dyadic_block(h, j)?, f64::INFINITY);
        let grad_x = fractional_symbol(x.grid(), 0.5);
        let grad_x = (x.weighted_energy(&grad_x) * x.grid().volume()).sqrt();
        let energies = self.block_energies(x)?;
        let mut tail = 0.0;
        for k in (j - 1).max(Self::J_MIN)..=self.j_max {
            tail += 2f64.powi(j - k) * energies[(k + 1) as usize].sqrt();
        }
        Ok([grad_h * xj * wj, hj * grad_x * wj, grad_h * wj * tail])
    }

    /// `|⟨[Δ_j, H·∇]X, Δ_j W⟩|` over the full right-hand side of the
    /// commutator bound. A vanishing bound forces a vanishing numerator, so
    /// that case reports 0 (the numerator is then pure roundoff).
    pub fn lemma21_ratio(&self, h: &SpectralVectorField, x: &SpectralVectorField, w: &SpectralVectorField, j: i32) -> Result<f64> {
        let num = self.lemma21_numerator(h, x, w, j)?;
        let den: f64 = self.lemma21_bound_terms(h, x, w, j)?.iter().sum();
        if den == 0.0 {
            Ok(0.0)
        } else {
            Ok(num / den)
        }
    }

    pub fn lemma21_numerator(&self, h: &SpectralVectorField, x: &SpectralVectorField, w: &SpectralVectorField, j: i32) -> Result<f64> {
        let c = self.commutator_advection(h, x, j)?;
        let wj = self.dyadic_block(w, j)?;
        Ok(crate::spectral::inner_product(&c, &wj)?.abs())
    }
}

fn l2(f: &SpectralVectorField) -> f64 {
    crate::spectral::l2_norm(f)
}

/// `‖f‖_{L^p}` over the box; `p = 2` by Parseval, other `p` on the
/// collocation grid (`p = ∞` is the maximum pointwise magnitude).
pub fn lp_norm(f: &SpectralVectorField, p: f64) -> f64 {
    if p == 2.0 {
        return l2(f);
    }
    let g = f.grid();
    let c = f.components();
    let phys = to_physical(g, &[&c[0], &c[1], &c[2]], false);
    let mags = (0..g.len()).map(|i| (phys[0][i].powi(2) + phys[1][i].powi(2) + phys[2][i].powi(2)).sqrt());
    if p.is_infinite() {
        mags.fold(0.0, f64::max)
    } else {
        (mags.map(|m| m.powf(p)).sum::<f64>() * g.volume() / g.len() as f64).powf(1.0 / p)
    }
}

/// `max_x |∇H(x)|` with the Frobenius norm of the gradient tensor.
pub fn gradient_sup(h: &SpectralVectorField) -> f64 {
    let g = h.grid();
    let tensor = gradient_tensor(h);
    let refs: Vec<&[_]> = tensor.iter().map(|t| t.as_slice()).collect();
    let phys = to_physical(g, &refs, false);
    (0..g.len())
        .map(|i| phys.iter().map(|p| p[i] * p[i]).sum::<f64>())
        .fold(0.0, f64::max)
        .sqrt()
}

/// Direct multiplier norm: `‖f‖_{Ḣ^s} = (L³ Σ|ξ|^{2s}|f̂|²)^{1/2}`, and
/// `‖f‖_{H^s} = ‖f‖_{L²} + ‖f‖_{Ḣ^s}`.
pub fn sobolev_norm_direct(f: &SpectralVectorField, s: f64, homogeneous: bool) -> f64 {
    let mut table = fractional_symbol(f.grid(), s);
    if s != 0.0 {
        table[0] = 0.0;
    }
    let hom = (f.weighted_energy(&table) * f.grid().volume()).sqrt();
    if homogeneous {
        hom
    } else {
        l2(f) + hom
    }
}

/// `‖Λ^s f‖ / (‖Λ^γ f‖^{γ/s} ‖Λ^{γ+s} f‖^{1-γ/s})` with direct norms.
pub fn gn_ratio(f: &SpectralVectorField, s: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && s > gamma && s.is_finite()) {
        return Err(HmhdError::Domain(format!("gn_ratio needs s > gamma > 0, got s={s} gamma={gamma}")));
    }
    let num = sobolev_norm_direct(f, s, true);
    if num == 0.0 {
        return Ok(0.0);
    }
    let low = sobolev_norm_direct(f, gamma, true);
    let high = sobolev_norm_direct(f, gamma + s, true);
    let theta = gamma / s;
    Ok(num / (low.powf(theta) * high.powf(1.0 - theta)))
}
