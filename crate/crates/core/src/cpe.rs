//! Compressible primitive equations
//!
//! ```text
//! ∂_t ρ + div_h(ρ v) + ∂_z(ρ w) = 0,
//! ρ(∂_t v + v·∇_h v + w ∂_z v) + ε⁻² ∇_h ρ^γ = μΔ_h v + λ∇_h div_h v + ∂_zz v,
//! ∂_z ρ = 0.
//! ```
//!
//! Density is two-dimensional and advanced by the vertically averaged
//! continuity equation `∂_t ρ = -div_h(ρ v̄)`. The vertical velocity is
//! diagnostic: `ρ w = -∫₀ᶻ div_h(ρ ṽ) dz'`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{CPEState, Params};
use crate::pe::{advection_samples, max_speed, viscous_term};
use crate::rk::ssp_rk3;
use crate::spectral::{
    broadcast_z, div_h2, product_to_spectral, product_to_spectral2, Axis, HVel, Parity, SpectralField2, SpectralField3,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CPETendency {
    pub drho: SpectralField2,
    pub dv: HVel,
}

fn positive_samples(rho: &SpectralField2) -> Result<Vec<f64>> {
    let r = rho.to_samples();
    match r.iter().copied().find(|x| !(*x > 0.0)) {
        Some(value) => Err(Error::NonpositiveDensity { value }),
        None => Ok(r),
    }
}

/// `ρ ṽ` for both components, truncated and even.
fn rho_times_baroclinic(rho3: &[f64], v: &HVel) -> [SpectralField3; 2] {
    let g = *v[0].grid();
    let comp = |c: &SpectralField3| {
        let s = c.baroclinic().to_samples();
        let prod: Vec<f64> = s.iter().zip(rho3).map(|(a, r)| a * r).collect();
        product_to_spectral(g, Parity::Even, &prod)
    };
    [comp(&v[0]), comp(&v[1])]
}

/// `ρ w = -∫₀ᶻ div_h(ρ ṽ) dz'`, as spectral coefficients (odd).
pub(crate) fn rho_w(rho3: &[f64], v: &HVel, p: &Params) -> Result<SpectralField3> {
    let flux = rho_times_baroclinic(rho3, v);
    let div = flux[0].deriv(Axis::X) + flux[1].deriv(Axis::Y);
    Ok(-div.integrate_z_from_zero(p.tolerances.solvability)?)
}

/// Vertical velocity of the CPE, odd in z and zero at `z ∈ ℤ`.
pub fn diagnose_w_cpe(rho: &SpectralField2, v: &HVel, p: &Params) -> Result<SpectralField3> {
    let g = *rho.grid();
    let rho3 = broadcast_z(&g, &positive_samples(rho)?);
    let rw = rho_w(&rho3, v, p)?.to_samples();
    let w: Vec<f64> = rw.iter().zip(&rho3).map(|(a, r)| a / r).collect();
    Ok(product_to_spectral(g, Parity::Odd, &w))
}

/// `∫₀¹ div_h(ρ ṽ) dz` on the grid; vanishes identically since `ρ` is
/// z-independent and `ṽ` has zero vertical mean.
pub fn baroclinic_flux_mean(rho: &SpectralField2, v: &HVel) -> Result<SpectralField2> {
    let g = *rho.grid();
    let rho3 = broadcast_z(&g, &positive_samples(rho)?);
    let flux = rho_times_baroclinic(&rho3, v);
    (flux[0].deriv(Axis::X) + flux[1].deriv(Axis::Y)).vertical_average()
}

/// Semi-discrete right-hand side:
/// `∂_t ρ = -div_h(ρ v̄)`,
/// `∂_t v = -(v·∇_h v + w ∂_z v) + ρ⁻¹[μΔ_h v + λ∇_h div_h v + ∂_zz v - ε⁻²∇_h ρ^γ]`.
pub fn cpe_rhs(s: &CPEState, p: &Params) -> Result<CPETendency> {
    s.check_density(p)?;
    let g = *s.grid();
    let r2 = s.rho.to_samples();
    let rho3 = broadcast_z(&g, &r2);

    let vbar = [
        s.v[0].vertical_average()?.to_samples(),
        s.v[1].vertical_average()?.to_samples(),
    ];
    let mass_flux = [
        product_to_spectral2(g, &vbar[0].iter().zip(&r2).map(|(a, r)| a * r).collect::<Vec<_>>()),
        product_to_spectral2(g, &vbar[1].iter().zip(&r2).map(|(a, r)| a * r).collect::<Vec<_>>()),
    ];
    let drho = -div_h2(&mass_flux);

    let rw = rho_w(&rho3, &s.v, p)?.to_samples();
    let w_samples: Vec<f64> = rw.iter().zip(&rho3).map(|(a, r)| a / r).collect();
    let w = product_to_spectral(g, Parity::Odd, &w_samples);
    let adv = advection_samples(&s.v, &w);

    // ρ^γ - ρ₀^γ; the constant would only add round-off to a gradient
    let p0 = libm::pow(p.rho0, p.gamma);
    let pressure: Vec<f64> = r2.iter().map(|&r| libm::pow(r, p.gamma) - p0).collect();
    let pressure = product_to_spectral2(g, &pressure) * (1.0 / (p.eps * p.eps));
    let grad_p = [
        broadcast_z(&g, &pressure.deriv(Axis::X).to_samples()),
        broadcast_z(&g, &pressure.deriv(Axis::Y).to_samples()),
    ];

    let visc = viscous_term(&s.v, p);
    let mut dv = Vec::with_capacity(2);
    for c in 0..2 {
        let vs = visc[c].to_samples();
        let out: Vec<f64> = (0..vs.len())
            .map(|n| -adv[c][n] + (vs[n] - grad_p[c][n]) / rho3[n])
            .collect();
        dv.push(product_to_spectral(g, Parity::Even, &out));
    }
    let dv: HVel = dv.try_into().expect("two components");
    Ok(CPETendency { drho, dv })
}

/// The three step limits of [`stable_dt`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepLimits {
    /// `cfl_acoustic·ε·Δx_h / c_max`, `c_max = √(γ ρ_max^{γ-1})`.
    pub acoustic: f64,
    pub advective: f64,
    pub viscous: f64,
}

impl StepLimits {
    pub fn min(&self) -> f64 {
        self.acoustic.min(self.advective).min(self.viscous)
    }
}

pub fn step_limits(s: &CPEState, p: &Params) -> Result<StepLimits> {
    let g = s.grid();
    let (rmin, rmax) = s.rho_range();
    if !(rmin > 0.0) {
        return Err(Error::NonpositiveDensity { value: rmin });
    }
    let c_max = libm::sqrt(p.gamma * libm::pow(rmax, p.gamma - 1.0));
    let acoustic = p.cfl_acoustic * p.eps * g.dx_h() / c_max;
    let w = diagnose_w_cpe(&s.rho, &s.v, p)?;
    let umax = max_speed(&s.v, &w);
    let dx = g.dx_min();
    let advective = if umax > 0.0 {
        p.cfl_advective * dx / umax
    } else {
        f64::INFINITY
    };
    let viscous = p.cfl_viscous * dx * dx * rmin / (2.0 * (p.mu + p.lambda + 1.0));
    Ok(StepLimits {
        acoustic,
        advective,
        viscous,
    })
}

/// Largest stable step: the minimum of the acoustic, advective and viscous limits.
pub fn stable_dt(s: &CPEState, p: &Params) -> Result<f64> {
    Ok(step_limits(s, p)?.min())
}

/// One SSP-RK3 step, followed by the density bound check.
pub fn cpe_step(s: &CPEState, dt: f64, p: &Params) -> Result<CPEState> {
    let limit = stable_dt(s, p)?;
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::CFLViolation { dt, limit });
    }
    let t = s.t;
    let (rho, v) = ssp_rk3(
        &(s.rho.clone(), s.v.clone()),
        dt,
        |u: &(SpectralField2, HVel)| {
            let d = cpe_rhs(
                &CPEState {
                    rho: u.0.clone(),
                    v: u.1.clone(),
                    t,
                },
                p,
            )?;
            Ok((d.drho, d.dv))
        },
        |u| u,
    )?;
    let next = CPEState { rho, v, t: s.t + dt };
    next.check_density(p)?;
    Ok(next)
}

/// `∫_Ω [ρ|v|²/2 + ε⁻² Π(ρ)]` with the relative pressure potential
/// `Π(ρ) = (ρ^γ - ρ₀^γ - γρ₀^{γ-1}(ρ - ρ₀))/(γ - 1)`, by grid quadrature.
pub fn total_energy(s: &CPEState, p: &Params) -> f64 {
    let g = s.grid();
    let r2 = s.rho.to_samples();
    let rho3 = broadcast_z(g, &r2);
    let u = s.v[0].to_samples();
    let v = s.v[1].to_samples();
    let kinetic: f64 = (0..u.len())
        .map(|n| 0.5 * rho3[n] * (u[n] * u[n] + v[n] * v[n]))
        .sum::<f64>()
        * g.volume()
        / g.len3() as f64;
    let p0 = libm::pow(p.rho0, p.gamma);
    let slope = p.gamma * libm::pow(p.rho0, p.gamma - 1.0);
    let potential: f64 = r2
        .iter()
        .map(|&r| (libm::pow(r, p.gamma) - p0 - slope * (r - p.rho0)) / (p.gamma - 1.0))
        .sum::<f64>()
        * g.volume()
        / g.len2() as f64;
    kinetic + potential / (p.eps * p.eps)
}
