//! Fourier representation on the periodic slab `[0, 2π)² × [0, 2)`.
//!
//! Transforms: [`SpectralField3::from_samples`] / [`SpectralField3::to_samples`]
//! (and the 2-D counterparts). Calculus, parity handling, the 2/3-rule and
//! Sobolev norms live on the field types; this module adds the vector-valued
//! helpers the solvers share.

mod fft;
mod field;
mod grid;

pub use field::{HVel, Parity, SpectralField2, SpectralField3};
pub use grid::{Axis, Grid, HORIZONTAL_PERIOD, VERTICAL_PERIOD};

use alloc::vec::Vec;

/// `div_h v = ∂_x u + ∂_y v`.
pub fn div_h(v: &HVel) -> SpectralField3 {
    v[0].deriv(Axis::X) + v[1].deriv(Axis::Y)
}

pub fn div_h2(v: &[SpectralField2; 2]) -> SpectralField2 {
    v[0].deriv(Axis::X) + v[1].deriv(Axis::Y)
}

pub fn grad_h2(f: &SpectralField2) -> [SpectralField2; 2] {
    [f.deriv(Axis::X), f.deriv(Axis::Y)]
}

pub fn grad_h(f: &SpectralField3) -> HVel {
    [f.deriv(Axis::X), f.deriv(Axis::Y)]
}

/// Transform a physical-space product back, truncate with the 2/3 rule and
/// project onto the expected parity.
pub fn product_to_spectral(grid: Grid, parity: Parity, samples: &[f64]) -> SpectralField3 {
    SpectralField3::from_samples(grid, Parity::Mixed, samples)
        .expect("product has grid size")
        .dealiased()
        .parity_project(parity)
}

pub fn product_to_spectral2(grid: Grid, samples: &[f64]) -> SpectralField2 {
    SpectralField2::from_samples(grid, samples)
        .expect("product has grid size")
        .dealiased()
}

/// Expand 2-D samples to every level of a 3-D column layout.
pub fn broadcast_z(grid: &Grid, samples2: &[f64]) -> Vec<f64> {
    let nz = grid.nz();
    samples2.iter().flat_map(|&v| core::iter::repeat_n(v, nz)).collect()
}

/// Squared `H^s` norm of a horizontal velocity (sum over components).
pub fn hvel_sobolev_sq(v: &HVel, s: u32) -> f64 {
    v.iter()
        .map(|c| {
            let n = c.sobolev_norm(s);
            n * n
        })
        .sum()
}
