//! Incompressible primitive equations
//!
//! ```text
//! div_h v_p + ∂_z w_p = 0,
//! ρ₀(∂_t v_p + v_p·∇_h v_p + w_p ∂_z v_p) + ∇_h(c_s² ρ₁) = μΔ_h v_p + λ∇_h div_h v_p + ∂_zz v_p,
//! ∂_z ρ₁ = 0.
//! ```
//!
//! The pressure `ρ₁` only acts on the barotropic mode, so it is eliminated by
//! the barotropic Leray projection and recovered afterwards as a diagnostic.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{sound_speed_sq, PEState, Params};
use crate::rk::ssp_rk3;
use crate::spectral::{
    div_h, product_to_spectral, product_to_spectral2, Axis, Grid, HVel, Parity, SpectralField2, SpectralField3,
};

/// Right-hand side `∂_t v_p` after projection.
#[derive(Debug, Clone, PartialEq)]
pub struct PETendency {
    pub dv: HVel,
}

/// `w_p = -∫₀ᶻ div_h v_p dz'`. Requires `div_h v̄_p = 0`.
pub fn diagnose_w_pe(v: &HVel, p: &Params) -> Result<SpectralField3> {
    let div = div_h(v);
    Ok(-div.integrate_z_from_zero(p.tolerances.solvability)?)
}

/// Derivative wavenumber as used by [`SpectralField3::deriv`] (zero at Nyquist).
fn deriv_k(i: usize, n: usize) -> f64 {
    if Grid::is_nyquist(i, n) {
        0.0
    } else {
        Grid::wavenumber(i, n) as f64
    }
}

/// Remove the gradient part of the barotropic mode:
/// `v̄ ← v̄ - ∇_h Δ_h⁻¹ div_h v̄`. The baroclinic part is untouched.
pub fn leray_project_barotropic(v: &HVel) -> HVel {
    let g = *v[0].grid();
    let mut u = v[0].clone();
    let mut w = v[1].clone();
    for i in 0..g.nx() {
        let kx = deriv_k(i, g.nx());
        for j in 0..g.ny() {
            let ky = deriv_k(j, g.ny());
            let k2 = kx * kx + ky * ky;
            if k2 == 0.0 {
                continue;
            }
            let idx = g.idx3(i, j, 0);
            let a = u.coeffs()[idx];
            let b = w.coeffs()[idx];
            let proj = (a * kx + b * ky) / k2;
            u.coeffs_mut()[idx] = a - proj * kx;
            w.coeffs_mut()[idx] = b - proj * ky;
        }
    }
    [u, w]
}

/// Column means of 3-D samples (exact `m = 0` coefficient for products of
/// band-limited fields).
pub(crate) fn z_average(grid: &Grid, samples: &[f64]) -> Vec<f64> {
    let nz = grid.nz() as f64;
    samples
        .chunks(grid.nz())
        .map(|col| col.iter().sum::<f64>() / nz)
        .collect()
}

/// `Σ_ij ∂_i ∂_j ∫₀¹ a_i b_j dz` from physical samples.
fn barotropic_div_div(grid: &Grid, a: [&[f64]; 2], b: [&[f64]; 2]) -> SpectralField2 {
    let mut acc = SpectralField2::zeros(*grid);
    let axes = [Axis::X, Axis::Y];
    for (ai, &ax_i) in a.iter().zip(&axes) {
        for (bj, &ax_j) in b.iter().zip(&axes) {
            let prod: Vec<f64> = ai.iter().zip(bj.iter()).map(|(x, y)| x * y).collect();
            let avg = product_to_spectral2(*grid, &z_average(grid, &prod));
            acc = acc + avg.deriv(ax_i).deriv(ax_j);
        }
    }
    acc
}

fn hvel_samples(v: &HVel) -> [Vec<f64>; 2] {
    [v[0].to_samples(), v[1].to_samples()]
}

/// Pressure `ρ₁`: `-c_s² Δ_h ρ₁ = ρ₀ ∫₀¹ div_h div_h(v_p ⊗ v_p) dz`, `∫ ρ₁ = 0`.
pub fn diagnose_pressure_rho1(s: &PEState, p: &Params) -> Result<SpectralField2> {
    let g = *s.grid();
    let vs = hvel_samples(&s.v);
    let src = barotropic_div_div(&g, [&vs[0], &vs[1]], [&vs[0], &vs[1]]) * p.rho0;
    src.solve_neg_laplacian_h(sound_speed_sq(p), p.tolerances.solvability)
}

/// `∂_t ρ₁`: `-c_s² Δ_h ρ₁,t = 2ρ₀ ∫₀¹ div_h div_h(v_p ⊗ ∂_t v_p) dz`.
pub fn diagnose_rho1_t(s: &PEState, dv: &PETendency, p: &Params) -> Result<SpectralField2> {
    let g = *s.grid();
    let vs = hvel_samples(&s.v);
    let ts = hvel_samples(&dv.dv);
    let src = (barotropic_div_div(&g, [&vs[0], &vs[1]], [&ts[0], &ts[1]])
        + barotropic_div_div(&g, [&ts[0], &ts[1]], [&vs[0], &vs[1]]))
        * p.rho0;
    src.solve_neg_laplacian_h(sound_speed_sq(p), p.tolerances.solvability)
}

/// Viscous operator `μΔ_h v + λ∇_h div_h v + ∂_zz v` (not divided by density).
pub(crate) fn viscous_term(v: &HVel, p: &Params) -> HVel {
    let div = div_h(v);
    [
        (v[0].laplacian_h() * p.mu + &(div.deriv(Axis::X) * p.lambda)) + v[0].dzz(),
        (v[1].laplacian_h() * p.mu + &(div.deriv(Axis::Y) * p.lambda)) + v[1].dzz(),
    ]
}

/// Physical samples of `v·∇_h v + w ∂_z v`, one vector per component.
pub(crate) fn advection_samples(v: &HVel, w: &SpectralField3) -> [Vec<f64>; 2] {
    let u = v[0].to_samples();
    let vv = v[1].to_samples();
    let ws = w.to_samples();
    let comp = |f: &SpectralField3| -> Vec<f64> {
        let fx = f.deriv(Axis::X).to_samples();
        let fy = f.deriv(Axis::Y).to_samples();
        let fz = f.deriv(Axis::Z).to_samples();
        (0..u.len())
            .map(|n| u[n] * fx[n] + vv[n] * fy[n] + ws[n] * fz[n])
            .collect()
    };
    [comp(&v[0]), comp(&v[1])]
}

/// Tendency before the barotropic projection.
pub(crate) fn pe_rhs_unprojected(s: &PEState, p: &Params) -> Result<HVel> {
    let g = *s.grid();
    let w = diagnose_w_pe(&s.v, p)?;
    let adv = advection_samples(&s.v, &w);
    let visc = viscous_term(&s.v, p);
    let inv = 1.0 / p.rho0;
    let mut out = Vec::with_capacity(2);
    for (visc_c, adv_c) in visc.into_iter().zip(adv.iter()) {
        let n = product_to_spectral(g, Parity::Even, adv_c);
        let mut d = (visc_c * inv - n).parity_project(Parity::Even);
        // ∫ v·∇v + w∂_z v = 0 for a solenoidal field; keep ∫ v_p fixed exactly
        d.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
        out.push(d);
    }
    let dv: [SpectralField3; 2] = out.try_into().expect("two components");
    Ok(dv)
}

/// `∂_t v_p = ρ₀⁻¹[μΔ_h v + λ∇_h div_h v + ∂_zz v] - (v·∇_h v + w ∂_z v) - ρ₀⁻¹∇_h(c_s²ρ₁)`,
/// with the pressure term realized by [`leray_project_barotropic`].
pub fn pe_rhs(s: &PEState, p: &Params) -> Result<PETendency> {
    Ok(PETendency {
        dv: leray_project_barotropic(&pe_rhs_unprojected(s, p)?),
    })
}

/// Largest velocity magnitude `|(u, v, w)|` on the grid.
pub(crate) fn max_speed(v: &HVel, w: &SpectralField3) -> f64 {
    let u = v[0].to_samples();
    let vv = v[1].to_samples();
    let ws = w.to_samples();
    (0..u.len())
        .map(|n| libm::sqrt(u[n] * u[n] + vv[n] * vv[n] + ws[n] * ws[n]))
        .fold(0.0, f64::max)
}

/// Advective and viscous step limits for the PE.
pub fn stable_dt_pe(s: &PEState, p: &Params) -> Result<f64> {
    let g = s.grid();
    let w = diagnose_w_pe(&s.v, p)?;
    let umax = max_speed(&s.v, &w);
    let dx = g.dx_min();
    let advective = if umax > 0.0 {
        p.cfl_advective * dx / umax
    } else {
        f64::INFINITY
    };
    let viscous = p.cfl_viscous * dx * dx / (2.0 * (p.mu + p.lambda + 1.0) / p.rho0);
    Ok(advective.min(viscous))
}

/// One SSP-RK3 step with the barotropic projection after every stage.
pub fn pe_step(s: &PEState, dt: f64, p: &Params) -> Result<PEState> {
    let limit = stable_dt_pe(s, p)?;
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::CFLViolation { dt, limit });
    }
    let t = s.t;
    let v = ssp_rk3(
        &s.v,
        dt,
        |v: &HVel| Ok(pe_rhs(&PEState { v: v.clone(), t }, p)?.dv),
        |v: HVel| leray_project_barotropic(&v),
    )?;
    Ok(PEState { v, t: s.t + dt })
}

#[cfg(test)]
mod tests;
