//! Pseudo-spectral Hall-MHD simulator with fractional dissipation.

pub mod checkpoint;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod initial_data;
pub mod linear_flows;
pub mod lp;
pub mod solver;
pub mod spectral;
pub mod verify;

pub use error::{HmhdError, Result};
pub use field::{PhysicalVectorField, SpectralScalarField, SpectralVectorField};
pub use grid::Grid;
