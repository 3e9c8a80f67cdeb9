//! Constant-coefficient and quadratic operators on spectral fields.
//!
//! Quadratic operators act on the dealiased part of their inputs: factors are
//! truncated to the dealias cube, multiplied pointwise on the collocation grid
//! and the product is truncated again, which is exact on the retained modes.

use num_complex::Complex64;

use crate::error::{HmhdError, Result};
use crate::field::{to_physical, to_spectral, PhysicalVectorField, SpectralScalarField, SpectralVectorField};
use crate::grid::Grid;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Calls `f(idx, ξ, |k|²)` for every lattice mode.
pub(crate) fn for_each_mode<F: FnMut(usize, [f64; 3], i64)>(grid: &Grid, mut f: F) {
    let n = grid.n();
    let axis: Vec<f64> = (0..n).map(|i| grid.axis_frequency(i)).collect();
    for i0 in 0..n {
        for i1 in 0..n {
            let base = grid.index(i0, i1, 0);
            for i2 in 0..n {
                f(base + i2, [axis[i0], axis[i1], axis[i2]], grid.k2(i0, i1, i2));
            }
        }
    }
}

/// Like [`for_each_mode`], restricted to the dealiased cube.
pub(crate) fn for_each_retained_mode<F: FnMut(usize, [f64; 3], i64)>(grid: &Grid, mut f: F) {
    let n = grid.n();
    let axis: Vec<f64> = (0..n).map(|i| grid.axis_frequency(i)).collect();
    let keep: Vec<usize> = (0..n).filter(|&i| grid.retained_axis()[i]).collect();
    for &i0 in &keep {
        for &i1 in &keep {
            let base = grid.index(i0, i1, 0);
            for &i2 in &keep {
                f(base + i2, [axis[i0], axis[i1], axis[i2]], grid.k2(i0, i1, i2));
            }
        }
    }
}

pub fn transform_forward(field: &PhysicalVectorField) -> SpectralVectorField {
    let g = field.grid();
    let s = field.samples();
    let mut comps = to_spectral(g, &[&s[0], &s[1], &s[2]], false).into_iter();
    let comps = [comps.next().unwrap(), comps.next().unwrap(), comps.next().unwrap()];
    SpectralVectorField::from_components(g, comps).expect("transform preserves shape")
}

pub fn transform_inverse(field: &SpectralVectorField) -> PhysicalVectorField {
    let g = field.grid();
    let c = field.components();
    let mut samples = to_physical(g, &[&c[0], &c[1], &c[2]], false).into_iter();
    let samples = [samples.next().unwrap(), samples.next().unwrap(), samples.next().unwrap()];
    PhysicalVectorField::from_samples(g, samples).expect("transform preserves shape")
}

/// Table of `|ξ|^{2γ}` indexed by `|k|²`; the zero mode maps to `0` for
/// `γ > 0` and to `1` for `γ = 0`.
pub fn fractional_symbol(grid: &Grid, gamma: f64) -> Vec<f64> {
    grid.radial_table(|r| if gamma == 0.0 { 1.0 } else { r.powf(2.0 * gamma) })
}

/// `(−Δ)^γ` as the Fourier multiplier `|ξ|^{2γ}`.
pub fn fractional_laplacian(field: &SpectralVectorField, gamma: f64) -> Result<SpectralVectorField> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(HmhdError::Domain(format!("fractional exponent must be finite and >= 0, got {gamma}")));
    }
    let mut out = field.clone();
    out.apply_radial(&fractional_symbol(field.grid(), gamma));
    out.zero_nyquist();
    Ok(out)
}

/// Projection onto divergence-free fields, `(Id − ξξᵀ/|ξ|²)` per mode.
pub fn leray_project(field: &SpectralVectorField) -> SpectralVectorField {
    let g = field.grid().clone();
    let mut out = field.clone();
    for_each_mode(&g, |idx, xi, k2| {
        if k2 == 0 {
            return;
        }
        let c = out.at(idx);
        let xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if xi2 == 0.0 {
            return;
        }
        let dot = c[0] * xi[0] + c[1] * xi[1] + c[2] * xi[2];
        let p = dot / xi2;
        out.set(idx, [c[0] - p * xi[0], c[1] - p * xi[1], c[2] - p * xi[2]]);
    });
    out.zero_nyquist();
    out
}

/// `∇×f`, i.e. `iξ × f̂` per mode.
pub fn curl(field: &SpectralVectorField) -> SpectralVectorField {
    let g = field.grid().clone();
    let mut out = SpectralVectorField::zeros(&g);
    for_each_mode(&g, |idx, xi, _| {
        let c = field.at(idx);
        out.set(
            idx,
            [
                I * (c[2] * xi[1] - c[1] * xi[2]),
                I * (c[0] * xi[2] - c[2] * xi[0]),
                I * (c[1] * xi[0] - c[0] * xi[1]),
            ],
        );
    });
    out.zero_nyquist();
    out
}

/// `∇·f`, i.e. `iξ·f̂` per mode.
pub fn divergence(field: &SpectralVectorField) -> SpectralScalarField {
    let g = field.grid().clone();
    let mut out = SpectralScalarField::zeros(&g);
    {
        let o = out.coefficients_mut();
        for_each_mode(&g, |idx, xi, _| {
            let c = field.at(idx);
            o[idx] = I * (c[0] * xi[0] + c[1] * xi[1] + c[2] * xi[2]);
        });
    }
    out
}

/// `∇φ`, i.e. `iξ φ̂` per mode.
pub fn gradient(scalar: &SpectralScalarField) -> SpectralVectorField {
    let g = scalar.grid().clone();
    let mut out = SpectralVectorField::zeros(&g);
    let c = scalar.coefficients();
    for_each_mode(&g, |idx, xi, _| {
        let v = I * c[idx];
        out.set(idx, [v * xi[0], v * xi[1], v * xi[2]]);
    });
    out.zero_nyquist();
    out
}

/// `‖∇·f‖_{L²} / ‖∇f‖_{L²}`, zero for a constant field.
pub fn divergence_residual(field: &SpectralVectorField) -> f64 {
    let mut div2 = 0.0;
    let mut grad2 = 0.0;
    for_each_mode(field.grid(), |idx, xi, _| {
        let c = field.at(idx);
        let xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        div2 += (c[0] * xi[0] + c[1] * xi[1] + c[2] * xi[2]).norm_sqr();
        grad2 += xi2 * (c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr());
    });
    if grad2 == 0.0 {
        0.0
    } else {
        (div2 / grad2).sqrt()
    }
}

/// Spectral partial derivatives `∂_j f_i`, returned in order `(i, j)` row-major.
pub(crate) fn gradient_tensor(field: &SpectralVectorField) -> Vec<Vec<Complex64>> {
    let g = field.grid().clone();
    let len = g.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); len]; 9];
    for_each_mode(&g, |idx, xi, _| {
        let c = field.at(idx);
        for i in 0..3 {
            let ic = I * c[i];
            for j in 0..3 {
                out[3 * i + j][idx] = ic * xi[j];
            }
        }
    });
    out
}

fn dealiased(field: &SpectralVectorField) -> SpectralVectorField {
    let mut f = field.clone();
    f.dealias();
    f
}

fn vector_from(grid: &std::sync::Arc<Grid>, mut v: Vec<Vec<Complex64>>) -> SpectralVectorField {
    let c2 = v.pop().unwrap();
    let c1 = v.pop().unwrap();
    let c0 = v.pop().unwrap();
    let mut f = SpectralVectorField::from_components(grid, [c0, c1, c2]).expect("shape");
    f.zero_nyquist();
    f
}

/// `(velocity·∇)target`, computed pseudo-spectrally and dealiased.
pub fn advect(velocity: &SpectralVectorField, target: &SpectralVectorField) -> Result<SpectralVectorField> {
    velocity.grid().check_same(target.grid(), "advect")?;
    let g = velocity.grid().clone();
    let u = dealiased(velocity);
    let grad = gradient_tensor(&dealiased(target));
    let mut inputs: Vec<&[Complex64]> = u.components().iter().map(|c| c.as_slice()).collect();
    inputs.extend(grad.iter().map(|c| c.as_slice()));
    let phys = to_physical(&g, &inputs, true);
    let (uu, dd) = phys.split_at(3);
    let mut prod = vec![vec![0.0; g.len()]; 3];
    for (i, p) in prod.iter_mut().enumerate() {
        for (x, out) in p.iter_mut().enumerate() {
            *out = uu[0][x] * dd[3 * i][x] + uu[1][x] * dd[3 * i + 1][x] + uu[2][x] * dd[3 * i + 2][x];
        }
    }
    let refs: Vec<&[f64]> = prod.iter().map(|p| p.as_slice()).collect();
    Ok(vector_from(&g, to_spectral(&g, &refs, true)))
}

/// Dealiased pointwise cross product `a × b`.
pub fn cross_product(a: &SpectralVectorField, b: &SpectralVectorField) -> Result<SpectralVectorField> {
    a.grid().check_same(b.grid(), "cross_product")?;
    let g = a.grid().clone();
    let a = dealiased(a);
    let b = dealiased(b);
    let (ac, bc) = (a.components(), b.components());
    let phys = to_physical(&g, &[&ac[0], &ac[1], &ac[2], &bc[0], &bc[1], &bc[2]], true);
    let prod = cross_samples(&phys[0..3], &phys[3..6]);
    let refs: Vec<&[f64]> = prod.iter().map(|p| p.as_slice()).collect();
    Ok(vector_from(&g, to_spectral(&g, &refs, true)))
}

pub(crate) fn cross_samples(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let len = a[0].len();
    let mut out = vec![vec![0.0; len]; 3];
    for x in 0..len {
        out[0][x] = a[1][x] * b[2][x] - a[2][x] * b[1][x];
        out[1][x] = a[2][x] * b[0][x] - a[0][x] * b[2][x];
        out[2][x] = a[0][x] * b[1][x] - a[1][x] * b[0][x];
    }
    out
}

/// Hall term `∇×((∇×b)×b)`, evaluated through the pointwise cross product.
pub fn hall_term(b: &SpectralVectorField) -> SpectralVectorField {
    let j = curl(b);
    curl(&cross_product(&j, b).expect("same grid"))
}

/// Hall term evaluated as `∇×((b·∇)b)`; the gradient part `½∇|b|²` of the
/// cross-product form is annihilated by the outer curl.
pub fn hall_term_advective(b: &SpectralVectorField) -> SpectralVectorField {
    curl(&advect(b, b).expect("same grid"))
}

/// `∫_box a·b dx = L³ Σ_k Re(â_k·conj(b̂_k))`.
pub fn inner_product(a: &SpectralVectorField, b: &SpectralVectorField) -> Result<f64> {
    a.grid().check_same(b.grid(), "inner_product")?;
    let mut acc = 0.0;
    for (ca, cb) in a.components().iter().zip(b.components()) {
        acc += ca.iter().zip(cb).map(|(x, y)| x.re * y.re + x.im * y.im).sum::<f64>();
    }
    Ok(acc * a.grid().volume())
}

/// Box L² norm.
pub fn l2_norm(f: &SpectralVectorField) -> f64 {
    (f.weighted_energy(&vec![1.0; f.grid().max_k2() as usize + 1]) * f.grid().volume()).sqrt()
}

/// Zero-mean pressure solving `−ΔP = ∇·(u·∇u − b·∇b)`.
pub fn pressure_recover(u: &SpectralVectorField, b: &SpectralVectorField) -> Result<SpectralScalarField> {
    u.grid().check_same(b.grid(), "pressure_recover")?;
    let mut forcing = advect(u, u)?;
    forcing.axpy(-1.0, &advect(b, b)?);
    let div = divergence(&forcing);
    let g = u.grid().clone();
    let mut p = SpectralScalarField::zeros(&g);
    {
        let out = p.coefficients_mut();
        let d = div.coefficients();
        for_each_mode(&g, |idx, xi, k2| {
            let xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            if k2 != 0 && xi2 > 0.0 {
                out[idx] = d[idx] / xi2;
            }
        });
    }
    Ok(p)
}
