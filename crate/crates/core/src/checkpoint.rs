//! Binary snapshots of a [`SimState`].
//!
//! Layout, little-endian: magic `HMHD`, version `u32`, `N` as `u32`, step
//! count `u64`, then `L`, dealias fraction, time, α, β, s and the Galerkin
//! radius as `f64`, then the six spectral components `u_x, u_y, u_z, b_x,
//! b_y, b_z`, each `N³` pairs `(re, im)` of `f64`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{HmhdError, Result};
use crate::field::SpectralVectorField;
use crate::grid::Grid;
use crate::solver::{ExponentConfig, SimState};

const MAGIC: &[u8; 4] = b"HMHD";
const VERSION: u32 = 1;

pub fn write_checkpoint(path: &Path, state: &SimState) -> Result<()> {
    let g = state.grid();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(g.n() as u32).to_le_bytes())?;
    w.write_all(&state.step_count.to_le_bytes())?;
    let e = state.exponents;
    for x in [g.box_length(), g.dealias_fraction(), state.time, e.alpha, e.beta, e.s, state.galerkin_radius] {
        w.write_all(&x.to_le_bytes())?;
    }
    for f in [&state.u_hat, &state.b_hat] {
        for c in f.components() {
            for z in c {
                w.write_all(&z.re.to_le_bytes())?;
                w.write_all(&z.im.to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn read_array<const K: usize>(r: &mut impl Read) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => HmhdError::Format("truncated checkpoint".into()),
        _ => HmhdError::Io(e),
    })?;
    Ok(buf)
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    Ok(f64::from_le_bytes(read_array::<8>(r)?))
}

pub fn read_checkpoint(path: &Path) -> Result<SimState> {
    let mut r = BufReader::new(File::open(path)?);
    if &read_array::<4>(&mut r)? != MAGIC {
        return Err(HmhdError::Format(format!("{} is not a checkpoint", path.display())));
    }
    let version = u32::from_le_bytes(read_array::<4>(&mut r)?);
    if version != VERSION {
        return Err(HmhdError::Format(format!("unsupported checkpoint version {version}")));
    }
    let n = u32::from_le_bytes(read_array::<4>(&mut r)?) as usize;
    if n > 4096 {
        return Err(HmhdError::Format(format!("implausible resolution {n}")));
    }
    let step_count = u64::from_le_bytes(read_array::<8>(&mut r)?);
    let mut h = [0.0; 7];
    for x in h.iter_mut() {
        *x = read_f64(&mut r)?;
    }
    let [box_length, dealias, time, alpha, beta, s, galerkin_radius] = h;
    let grid = Grid::new(n, box_length, dealias)?;
    let exponents = ExponentConfig { alpha, beta, s };
    exponents.validate()?;
    let mut read_field = || -> Result<SpectralVectorField> {
        let mut comps: [Vec<Complex64>; 3] = Default::default();
        for c in comps.iter_mut() {
            c.reserve_exact(grid.len());
            for _ in 0..grid.len() {
                let re = read_f64(&mut r)?;
                let im = read_f64(&mut r)?;
                c.push(Complex64::new(re, im));
            }
        }
        SpectralVectorField::from_components(&grid, comps)
    };
    let u_hat = read_field()?;
    let b_hat = read_field()?;
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(HmhdError::Format("trailing bytes after checkpoint payload".into()));
    }
    Ok(SimState { u_hat, b_hat, time, step_count, exponents, galerkin_radius })
}
