#![allow(dead_code)]

use std::sync::Arc;

use hmhd_core::{Grid, SpectralVectorField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random real field with every mode of `|k| <= kmax` populated.
pub fn random_field(grid: &Arc<Grid>, kmax: f64, seed: u64) -> SpectralVectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralVectorField::zeros(grid);
    let n = grid.n();
    for i0 in 0..n {
        for i1 in 0..n {
            for i2 in 0..n {
                if (grid.k2(i0, i1, i2) as f64) <= kmax * kmax {
                    let idx = grid.index(i0, i1, i2);
                    let mut v = [Complex64::new(0.0, 0.0); 3];
                    for c in v.iter_mut() {
                        *c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    }
                    f.set(idx, v);
                }
            }
        }
    }
    f.symmetrize();
    f.zero_nyquist();
    f
}

pub fn random_solenoidal(grid: &Arc<Grid>, kmax: f64, seed: u64) -> SpectralVectorField {
    hmhd_core::spectral::leray_project(&random_field(grid, kmax, seed))
}

/// Field with the single real mode `amp·cos(k·x)` in component `comp`.
pub fn cos_mode(grid: &Arc<Grid>, k: [i64; 3], comp: usize, amp: f64) -> SpectralVectorField {
    let mut f = SpectralVectorField::zeros(grid);
    let n = grid.n() as i64;
    let wrap = |k: i64| k.rem_euclid(n) as usize;
    if k == [0, 0, 0] {
        f.component_mut(comp)[0] = Complex64::new(amp, 0.0);
        return f;
    }
    for sign in [1, -1] {
        let idx = grid.index(wrap(sign * k[0]), wrap(sign * k[1]), wrap(sign * k[2]));
        f.component_mut(comp)[idx] = Complex64::new(amp / 2.0, 0.0);
    }
    f
}

/// Field with the single real mode `amp·sin(k·x)` in component `comp`.
pub fn sin_mode(grid: &Arc<Grid>, k: [i64; 3], comp: usize, amp: f64) -> SpectralVectorField {
    let mut f = SpectralVectorField::zeros(grid);
    let n = grid.n() as i64;
    let wrap = |k: i64| k.rem_euclid(n) as usize;
    for sign in [1i64, -1] {
        let idx = grid.index(wrap(sign * k[0]), wrap(sign * k[1]), wrap(sign * k[2]));
        f.component_mut(comp)[idx] = Complex64::new(0.0, -(sign as f64) * amp / 2.0);
    }
    f
}

pub fn max_diff(a: &SpectralVectorField, b: &SpectralVectorField) -> f64 {
    a.sub(b).max_abs()
}

pub fn rel_diff(a: &SpectralVectorField, b: &SpectralVectorField) -> f64 {
    let scale = a.coefficient_l2().max(b.coefficient_l2());
    if scale == 0.0 {
        0.0
    } else {
        a.sub(b).coefficient_l2() / scale
    }
}
