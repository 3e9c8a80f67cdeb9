//! Spectral and physical vector/scalar fields on a [`Grid`], plus the batched
//! transforms used by the quadratic operators.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{HmhdError, Result};
use crate::fft::Direction;
use crate::grid::Grid;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Fourier coefficients of a real vector field: `f(x) = Σ_k c_k e^{iξ_k·x}`.
#[derive(Clone, Debug)]
pub struct SpectralVectorField {
    grid: Arc<Grid>,
    comps: [Vec<Complex64>; 3],
}

/// Fourier coefficients of a real scalar field.
#[derive(Clone, Debug)]
pub struct SpectralScalarField {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
}

/// Real samples on the `N³` collocation lattice.
#[derive(Clone, Debug)]
pub struct PhysicalVectorField {
    grid: Arc<Grid>,
    samples: [Vec<f64>; 3],
}

impl SpectralVectorField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        let len = grid.len();
        SpectralVectorField {
            grid: grid.clone(),
            comps: [vec![ZERO; len], vec![ZERO; len], vec![ZERO; len]],
        }
    }

    pub fn from_components(grid: &Arc<Grid>, comps: [Vec<Complex64>; 3]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(HmhdError::Config(format!(
                "coefficient arrays must have length N³ = {}",
                grid.len()
            )));
        }
        Ok(SpectralVectorField { grid: grid.clone(), comps })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn component(&self, i: usize) -> &[Complex64] {
        &self.comps[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.comps[i]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.comps
    }

    pub fn into_components(self) -> [Vec<Complex64>; 3] {
        self.comps
    }

    /// Coefficient vector at a flat lattice index.
    pub fn at(&self, idx: usize) -> [Complex64; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    pub fn set(&mut self, idx: usize, v: [Complex64; 3]) {
        for (c, x) in self.comps.iter_mut().zip(v) {
            c[idx] = x;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale_mut(a);
        out
    }

    pub fn scale_mut(&mut self, a: f64) {
        for c in self.comps.iter_mut() {
            c.iter_mut().for_each(|x| *x *= a);
        }
    }

    /// `self += a·other`.
    ///
    /// Panics if the grids differ.
    pub fn axpy(&mut self, a: f64, other: &SpectralVectorField) {
        assert!(self.grid.same_as(&other.grid), "axpy on fields from different grids");
        for (c, o) in self.comps.iter_mut().zip(&other.comps) {
            c.iter_mut().zip(o).for_each(|(x, y)| *x += *y * a);
        }
    }

    pub fn add(&self, other: &SpectralVectorField) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &SpectralVectorField) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Multiplies every mode by `table[|k|²]`.
    pub fn apply_radial(&mut self, table: &[f64]) {
        let g = self.grid.clone();
        let n = g.n();
        for c in self.comps.iter_mut() {
            for i0 in 0..n {
                for i1 in 0..n {
                    let base = g.index(i0, i1, 0);
                    for i2 in 0..n {
                        c[base + i2] *= table[g.k2(i0, i1, i2) as usize];
                    }
                }
            }
        }
    }

    /// Sum over modes of `weight(|k|²)·|c_k|²`.
    pub fn weighted_energy(&self, table: &[f64]) -> f64 {
        let g = &self.grid;
        let n = g.n();
        let mut acc = 0.0;
        for i0 in 0..n {
            for i1 in 0..n {
                let base = g.index(i0, i1, 0);
                for i2 in 0..n {
                    let idx = base + i2;
                    let e = self.comps[0][idx].norm_sqr() + self.comps[1][idx].norm_sqr() + self.comps[2][idx].norm_sqr();
                    if e != 0.0 {
                        acc += table[g.k2(i0, i1, i2) as usize] * e;
                    }
                }
            }
        }
        acc
    }

    /// Zeroes every coefficient on a Nyquist plane.
    pub fn zero_nyquist(&mut self) {
        let g = self.grid.clone();
        let h = g.n() / 2;
        for c in self.comps.iter_mut() {
            zero_nyquist_planes(&g, c, h);
        }
    }

    /// Zeroes every mode outside the dealias cube.
    pub fn dealias(&mut self) {
        let g = self.grid.clone();
        for c in self.comps.iter_mut() {
            mask_outside(&g, c);
        }
    }

    /// Zeroes every mode with `|ξ| > radius`.
    pub fn truncate_ball(&mut self, radius: f64) {
        let g = self.grid.clone();
        let dk = g.frequency_step();
        let limit = (radius / dk).powi(2);
        let n = g.n();
        for c in self.comps.iter_mut() {
            for (idx, x) in c.iter_mut().enumerate() {
                let (i0, i1, i2) = (idx / (n * n), (idx / n) % n, idx % n);
                if g.k2(i0, i1, i2) as f64 > limit * (1.0 + 1e-12) {
                    *x = ZERO;
                }
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|x| x.re.is_finite() && x.im.is_finite()))
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flat_map(|c| c.iter()).map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Largest `|c(-k) - conj(c(k))|` over all modes.
    pub fn hermitian_defect(&self) -> f64 {
        self.comps.iter().map(|c| hermitian_defect(&self.grid, c)).fold(0.0, f64::max)
    }

    /// Replaces every coefficient pair by its Hermitian part.
    pub fn symmetrize(&mut self) {
        let g = self.grid.clone();
        for c in self.comps.iter_mut() {
            symmetrize(&g, c);
        }
    }

    /// Spectral L² norm `(Σ|c|²)^{1/2}` without the box-volume factor.
    pub fn coefficient_l2(&self) -> f64 {
        self.comps.iter().flat_map(|c| c.iter()).map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl SpectralScalarField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        SpectralScalarField { grid: grid.clone(), coeffs: vec![ZERO; grid.len()] }
    }

    pub fn from_coefficients(grid: &Arc<Grid>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(HmhdError::Config(format!("coefficient array must have length N³ = {}", grid.len())));
        }
        Ok(SpectralScalarField { grid: grid.clone(), coeffs })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.grid, &self.coeffs)
    }
}

impl PhysicalVectorField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        let len = grid.len();
        PhysicalVectorField { grid: grid.clone(), samples: [vec![0.0; len], vec![0.0; len], vec![0.0; len]] }
    }

    pub fn from_samples(grid: &Arc<Grid>, samples: [Vec<f64>; 3]) -> Result<Self> {
        if samples.iter().any(|s| s.len() != grid.len()) {
            return Err(HmhdError::Config(format!("sample arrays must have length N³ = {}", grid.len())));
        }
        if samples.iter().any(|s| s.iter().any(|x| !x.is_finite())) {
            return Err(HmhdError::Config("physical samples must be finite".into()));
        }
        Ok(PhysicalVectorField { grid: grid.clone(), samples })
    }

    /// Samples `f(x)` at every collocation point.
    pub fn from_fn<F: Fn([f64; 3]) -> [f64; 3]>(grid: &Arc<Grid>, f: F) -> Self {
        let mut out = PhysicalVectorField::zeros(grid);
        let n = grid.n();
        for idx in 0..grid.len() {
            let (i0, i1, i2) = (idx / (n * n), (idx / n) % n, idx % n);
            let v = f([grid.coordinate(i0), grid.coordinate(i1), grid.coordinate(i2)]);
            for c in 0..3 {
                out.samples[c][idx] = v[c];
            }
        }
        out
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.samples[i]
    }

    pub fn samples(&self) -> &[Vec<f64>; 3] {
        &self.samples
    }

    /// Largest pointwise vector magnitude.
    pub fn max_magnitude(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| (self.samples[0][i].powi(2) + self.samples[1][i].powi(2) + self.samples[2][i].powi(2)).sqrt())
            .fold(0.0, f64::max)
    }
}

fn zero_nyquist_planes(g: &Grid, c: &mut [Complex64], h: usize) {
    let n = g.n();
    for i0 in 0..n {
        for i1 in 0..n {
            let base = g.index(i0, i1, 0);
            if i0 == h || i1 == h {
                c[base..base + n].iter_mut().for_each(|x| *x = ZERO);
            } else {
                c[base + h] = ZERO;
            }
        }
    }
}

pub(crate) fn mask_outside(g: &Grid, c: &mut [Complex64]) {
    let n = g.n();
    let r = g.retained_axis();
    for i0 in 0..n {
        for i1 in 0..n {
            let base = g.index(i0, i1, 0);
            if !(r[i0] && r[i1]) {
                c[base..base + n].iter_mut().for_each(|x| *x = ZERO);
            } else {
                for i2 in 0..n {
                    if !r[i2] {
                        c[base + i2] = ZERO;
                    }
                }
            }
        }
    }
}

fn hermitian_defect(g: &Grid, c: &[Complex64]) -> f64 {
    let mut worst = 0.0f64;
    for idx in 0..c.len() {
        let (i0, i1, i2) = g.unravel(idx);
        if g.is_nyquist(i0) || g.is_nyquist(i1) || g.is_nyquist(i2) {
            continue;
        }
        let m = g.mirror_index(idx);
        worst = worst.max((c[m] - c[idx].conj()).norm());
    }
    worst
}

fn symmetrize(g: &Grid, c: &mut [Complex64]) {
    let orig = c.to_vec();
    for (idx, x) in c.iter_mut().enumerate() {
        let m = g.mirror_index(idx);
        *x = (orig[idx] + orig[m].conj()) * 0.5;
    }
}

/// Inverse-transforms Hermitian spectra to real samples, two per complex FFT.
///
/// With `pruned = true` every input must vanish outside the dealias cube.
pub(crate) fn to_physical(grid: &Grid, spectra: &[&[Complex64]], pruned: bool) -> Vec<Vec<f64>> {
    let active = if pruned { Some(grid.retained_axis()) } else { None };
    let pairs: Vec<(usize, Option<usize>)> =
        (0..spectra.len()).step_by(2).map(|i| (i, if i + 1 < spectra.len() { Some(i + 1) } else { None })).collect();
    let results: Vec<(Vec<f64>, Option<Vec<f64>>)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let mut buf: Vec<Complex64> = match b {
                Some(b) => spectra[a].iter().zip(spectra[b]).map(|(x, y)| x + Complex64::i() * y).collect(),
                None => spectra[a].to_vec(),
            };
            grid.plan().transform(&mut buf, Direction::Inverse, active);
            let re = buf.iter().map(|z| z.re).collect();
            let im = b.map(|_| buf.iter().map(|z| z.im).collect());
            (re, im)
        })
        .collect();
    let mut out = Vec::with_capacity(spectra.len());
    for (re, im) in results {
        out.push(re);
        if let Some(im) = im {
            out.push(im);
        }
    }
    out
}

/// Forward-transforms real samples, two per complex FFT. With `pruned = true`
/// only dealiased outputs are computed and everything else is zeroed.
pub(crate) fn to_spectral(grid: &Grid, reals: &[&[f64]], pruned: bool) -> Vec<Vec<Complex64>> {
    let active = if pruned { Some(grid.retained_axis()) } else { None };
    let pairs: Vec<(usize, Option<usize>)> =
        (0..reals.len()).step_by(2).map(|i| (i, if i + 1 < reals.len() { Some(i + 1) } else { None })).collect();
    let results: Vec<(Vec<Complex64>, Option<Vec<Complex64>>)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let mut buf: Vec<Complex64> = match b {
                Some(b) => reals[a].iter().zip(reals[b]).map(|(&x, &y)| Complex64::new(x, y)).collect(),
                None => reals[a].iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            };
            grid.plan().transform(&mut buf, Direction::Forward, active);
            match b {
                None => {
                    if pruned {
                        mask_outside(grid, &mut buf);
                    }
                    (buf, None)
                }
                Some(_) => {
                    let len = buf.len();
                    let mut first = vec![ZERO; len];
                    let mut second = vec![ZERO; len];
                    let half_i = Complex64::new(0.0, -0.5);
                    let n = grid.n();
                    let keep: Vec<usize> = (0..n).filter(|&i| !pruned || grid.retained_axis()[i]).collect();
                    let mirror: Vec<usize> = (0..n).map(|i| grid.mirror(i)).collect();
                    for &i0 in &keep {
                        for &i1 in &keep {
                            let base = grid.index(i0, i1, 0);
                            let mbase = grid.index(mirror[i0], mirror[i1], 0);
                            for &i2 in &keep {
                                let z = buf[base + i2];
                                let zm = buf[mbase + mirror[i2]].conj();
                                first[base + i2] = (z + zm) * 0.5;
                                second[base + i2] = (z - zm) * half_i;
                            }
                        }
                    }
                    (first, Some(second))
                }
            }
        })
        .collect();
    let mut out = Vec::with_capacity(reals.len());
    for (a, b) in results {
        out.push(a);
        if let Some(b) = b {
            out.push(b);
        }
    }
    out
}
