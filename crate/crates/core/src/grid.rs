//! Periodic lattice geometry: resolution, box length, wavenumbers and the
//! dealiasing mask.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{HmhdError, Result};
use crate::fft::FftPlan;

pub const DEFAULT_DEALIAS_FRACTION: f64 = 2.0 / 3.0;

/// Periodic box `[0, L)³` sampled by `N³` collocation points.
///
/// Lattice frequencies are `ξ = (2π/L)·k` with integer `k` in the centered
/// range `-N/2 ≤ k_i < N/2`. Array index `i` maps to `k = i` for `i < N/2`
/// and `k = i − N` otherwise, so `i = N/2` is the Nyquist index.
#[derive(Debug)]
pub struct Grid {
    n: usize,
    box_length: f64,
    dealias_fraction: f64,
    cutoff: i64,
    wavenumbers: Vec<i64>,
    retained: Vec<bool>,
    plan: FftPlan,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.box_length == other.box_length && self.dealias_fraction == other.dealias_fraction
    }
}

impl Grid {
    pub fn new(n: usize, box_length: f64, dealias_fraction: f64) -> Result<Arc<Grid>> {
        if n < 8 || n % 2 != 0 {
            return Err(HmhdError::Config(format!("points_per_axis must be even and >= 8, got {n}")));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(HmhdError::Config(format!("box_length must be positive, got {box_length}")));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(HmhdError::Config(format!("dealias_fraction must lie in (0, 1], got {dealias_fraction}")));
        }
        keep_large_blocks();
        let half = (n / 2) as i64;
        // Nyquist (|k| = N/2) is never retained.
        let cutoff = ((dealias_fraction * half as f64 + 1e-12).floor() as i64).min(half - 1);
        let wavenumbers: Vec<i64> = (0..n).map(|i| if (i as i64) < half { i as i64 } else { i as i64 - n as i64 }).collect();
        let retained = wavenumbers.iter().map(|k| k.abs() <= cutoff).collect();
        Ok(Arc::new(Grid {
            n,
            box_length,
            dealias_fraction,
            cutoff,
            wavenumbers,
            retained,
            plan: FftPlan::new(n),
        }))
    }

    /// Grid with the default 2/3 dealiasing rule.
    pub fn with_default_dealias(n: usize, box_length: f64) -> Result<Arc<Grid>> {
        Grid::new(n, box_length, DEFAULT_DEALIAS_FRACTION)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Number of lattice points, `N³`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Frequency spacing `2π/L`.
    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Physical grid spacing `L/N`.
    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(3)
    }

    /// Largest retained `|k_i|` on each axis.
    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    /// Largest retained `|ξ|` (corner of the dealiased cube).
    pub fn max_retained_frequency(&self) -> f64 {
        (3.0f64).sqrt() * self.cutoff as f64 * self.frequency_step()
    }

    pub fn wavenumber(&self, i: usize) -> i64 {
        self.wavenumbers[i]
    }

    pub fn wavenumbers(&self) -> &[i64] {
        &self.wavenumbers
    }

    /// Physical frequency along one axis; zero on the Nyquist index.
    pub fn axis_frequency(&self, i: usize) -> f64 {
        if self.is_nyquist(i) {
            0.0
        } else {
            self.wavenumbers[i] as f64 * self.frequency_step()
        }
    }

    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n / 2
    }

    /// Per-axis dealias mask (the full mask is the tensor product).
    pub fn retained_axis(&self) -> &[bool] {
        &self.retained
    }

    pub fn is_retained(&self, i0: usize, i1: usize, i2: usize) -> bool {
        self.retained[i0] && self.retained[i1] && self.retained[i2]
    }

    pub fn index(&self, i0: usize, i1: usize, i2: usize) -> usize {
        (i0 * self.n + i1) * self.n + i2
    }

    pub fn unravel(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n;
        (idx / (n * n), (idx / n) % n, idx % n)
    }

    /// Index of `-k` along one axis.
    pub fn mirror(&self, i: usize) -> usize {
        (self.n - i) % self.n
    }

    pub fn mirror_index(&self, idx: usize) -> usize {
        let (i0, i1, i2) = self.unravel(idx);
        self.index(self.mirror(i0), self.mirror(i1), self.mirror(i2))
    }

    /// `|k|²` in integer lattice units.
    pub fn k2(&self, i0: usize, i1: usize, i2: usize) -> i64 {
        let (a, b, c) = (self.wavenumbers[i0], self.wavenumbers[i1], self.wavenumbers[i2]);
        a * a + b * b + c * c
    }

    /// Largest `|k|²` on the lattice, the length of radial tables minus one.
    pub fn max_k2(&self) -> i64 {
        let h = (self.n / 2) as i64;
        3 * h * h
    }

    /// Physical frequency vector of a lattice index.
    pub fn xi(&self, i0: usize, i1: usize, i2: usize) -> [f64; 3] {
        [self.axis_frequency(i0), self.axis_frequency(i1), self.axis_frequency(i2)]
    }

    /// Tabulates `f(|ξ|)` for every integer `|k|²` so that radial multipliers
    /// cost one lookup per mode.
    pub fn radial_table<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        let dk = self.frequency_step();
        (0..=self.max_k2()).map(|k2| f((k2 as f64).sqrt() * dk)).collect()
    }

    pub(crate) fn plan(&self) -> &FftPlan {
        &self.plan
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self == other
    }

    pub(crate) fn check_same(&self, other: &Grid, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(HmhdError::GridMismatch(format!(
                "{what}: N={} L={} vs N={} L={}",
                self.n, self.box_length, other.n, other.box_length
            )))
        }
    }

    /// Physical coordinate of collocation index `i` along one axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }
}

/// Field buffers at N = 128 exceed glibc's mmap threshold, so every
/// temporary would be mapped and faulted in afresh. Serving them from the
/// heap instead lets freed buffers be reused.
fn keep_large_blocks() {
    #[cfg(all(target_os = "linux", target_env = "gnu"))]
    {
        static ONCE: std::sync::Once = std::sync::Once::new();
        ONCE.call_once(|| unsafe {
            libc::mallopt(libc::M_MMAP_THRESHOLD, 1 << 30);
            libc::mallopt(libc::M_TRIM_THRESHOLD, 1 << 30);
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_or_small_resolution() {
        assert!(Grid::new(7, 1.0, 2.0 / 3.0).is_err());
        assert!(Grid::new(6, 1.0, 2.0 / 3.0).is_err());
        assert!(Grid::new(8, 0.0, 2.0 / 3.0).is_err());
        assert!(Grid::new(8, 1.0, 0.0).is_err());
        assert!(Grid::new(8, 1.0, 1.5).is_err());
    }

    #[test]
    fn wavenumbers_centered_and_mask_excludes_nyquist() {
        let g = Grid::new(8, 2.0 * PI, 1.0).unwrap();
        assert_eq!(g.wavenumbers(), &[0, 1, 2, 3, -4, -3, -2, -1]);
        assert!(!g.retained_axis()[4]);
        assert!(g.retained_axis()[3]);
        assert_eq!(g.axis_frequency(4), 0.0);

        let g = Grid::with_default_dealias(64, 2.0 * PI).unwrap();
        assert_eq!(g.cutoff(), 21);
        assert_eq!(g.retained_axis().iter().filter(|r| **r).count(), 43);
    }

    #[test]
    fn mirror_maps_k_to_minus_k() {
        let g = Grid::with_default_dealias(16, 3.0).unwrap();
        for i in 0..16 {
            if !g.is_nyquist(i) {
                assert_eq!(g.wavenumber(g.mirror(i)), -g.wavenumber(i));
            }
        }
    }
}
