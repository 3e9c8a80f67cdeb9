//! Three-dimensional complex FFT on an `n³` row-major cube, with optional
//! pruning of lines that are known to be zero on input or unused on output.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Physical samples to coefficients, scaled by `1/n³`.
    Forward,
    /// Coefficients to physical samples, unscaled.
    Inverse,
}

#[derive(Clone)]
pub struct FftPlan {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FftPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FftPlan").field("n", &self.n).finish()
    }
}

impl FftPlan {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftPlan {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// In-place transform of `data` (length `n³`).
    ///
    /// With `active = Some(mask)`, the transform assumes that for an inverse
    /// transform every input coefficient with an inactive index on any axis is
    /// zero, and for a forward transform only outputs whose indices are active
    /// on every axis are wanted. Outputs outside the active cube are then
    /// unspecified.
    pub fn transform(&self, data: &mut [Complex64], direction: Direction, active: Option<&[bool]>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "fft buffer length does not match n³");
        let all = vec![true; n];
        let act = active.unwrap_or(&all);
        let mut plane = vec![Complex64::new(0.0, 0.0); n * n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.forward.get_inplace_scratch_len().max(self.inverse.get_inplace_scratch_len())];
        match direction {
            Direction::Inverse => {
                let fft = &*self.inverse;
                self.pass_contiguous(data, fft, &mut scratch, |i0, i1| act[i0] && act[i1]);
                self.pass_middle(data, fft, &mut plane, &mut scratch, |i0| act[i0]);
                self.pass_outer(data, fft, &mut plane, &mut scratch);
            }
            Direction::Forward => {
                let fft = &*self.forward;
                self.pass_outer(data, fft, &mut plane, &mut scratch);
                self.pass_middle(data, fft, &mut plane, &mut scratch, |i0| act[i0]);
                self.pass_contiguous(data, fft, &mut scratch, |i0, i1| act[i0] && act[i1]);
                let scale = 1.0 / (n * n * n) as f64;
                data.iter_mut().for_each(|c| *c *= scale);
            }
        }
    }

    fn pass_contiguous<F>(&self, data: &mut [Complex64], fft: &dyn Fft<f64>, scratch: &mut [Complex64], keep: F)
    where
        F: Fn(usize, usize) -> bool,
    {
        let n = self.n;
        let lines = data.len() / n;
        let mut start = 0;
        while start < lines {
            if !keep(start / n, start % n) {
                start += 1;
                continue;
            }
            let mut end = start + 1;
            while end < lines && keep(end / n, end % n) {
                end += 1;
            }
            fft.process_with_scratch(&mut data[start * n..end * n], scratch);
            start = end;
        }
    }

    fn pass_middle<P>(&self, data: &mut [Complex64], fft: &dyn Fft<f64>, plane: &mut [Complex64], scratch: &mut [Complex64], keep_plane: P)
    where
        P: Fn(usize) -> bool,
    {
        let n = self.n;
        for (i0, slab) in data.chunks_exact_mut(n * n).enumerate() {
            if !keep_plane(i0) {
                continue;
            }
            transpose(slab, plane, n);
            fft.process_with_scratch(plane, scratch);
            transpose(plane, slab, n);
        }
    }

    fn pass_outer(&self, data: &mut [Complex64], fft: &dyn Fft<f64>, plane: &mut [Complex64], scratch: &mut [Complex64]) {
        let n = self.n;
        let nn = n * n;
        for i1 in 0..n {
            for i0 in 0..n {
                let row = &data[i0 * nn + i1 * n..i0 * nn + i1 * n + n];
                for (i2, v) in row.iter().enumerate() {
                    plane[i2 * n + i0] = *v;
                }
            }
            fft.process_with_scratch(plane, scratch);
            for i0 in 0..n {
                let row = &mut data[i0 * nn + i1 * n..i0 * nn + i1 * n + n];
                for (i2, v) in row.iter_mut().enumerate() {
                    *v = plane[i2 * n + i0];
                }
            }
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    const B: usize = 16;
    for ib in (0..n).step_by(B) {
        for jb in (0..n).step_by(B) {
            for i in ib..(ib + B).min(n) {
                for j in jb..(jb + B).min(n) {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}
