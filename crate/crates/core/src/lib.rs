//! Pseudo-spectral solvers for the compressible primitive equations (CPE) and
//! the incompressible primitive equations (PE) on the horizontally periodic
//! slab `[0, 2π)² × [0, 2)`, together with the well-prepared initial data and
//! the functionals used to measure the low Mach number limit.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line, and the experiment runner live in the `lowmach-harness` crate.
//!
//! Layout:
//! - [`spectral`]: grid, Fourier fields with z-parity, transforms and calculus.
//! - [`model`]: parameters, prognostic states and constitutive formulas.
//! - [`pe`] / [`cpe`]: right-hand sides and SSP-RK3 steppers.
//! - [`wellprepared`]: compatible PE data and matched CPE data.
//! - [`diagnostics`]: perturbation view, energy/dissipation, rates.
#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cpe;
pub mod diagnostics;
mod error;
pub mod model;
pub mod pe;
mod rk;
pub mod spectral;
pub mod wellprepared;

pub use error::{Error, Result};
pub use model::{CPEState, PEState, Params, Tolerances};
pub use spectral::{Axis, Grid, HVel, Parity, SpectralField2, SpectralField3};
