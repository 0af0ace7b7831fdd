//! Perturbation functionals, conservation audits, convergence metrics and
//! rate fitting.
//!
//! With `ρ^ε = ρ₀ + ε²ρ₁ + ξ`, `v^ε = v_p + ψʰ`, `w^ε = w_p + ψᶻ`:
//!
//! ```text
//! E = ‖ψʰ‖²_{H²} + ‖εψʰ_t‖²_{L²} + ‖ε⁻¹ξ‖²_{H²} + ‖ξ_t‖²_{L²}
//! D = ‖∇ψʰ‖²_{H²} + ‖εψʰ_t‖²_{H¹} + ‖ε⁻¹∇_h ξ‖²_{H¹} + ‖ξ_t‖²_{L²}
//! ```
//!
//! Time derivatives come from the semi-discrete right-hand sides, never from
//! differences of stored states.

use alloc::string::String;
use alloc::vec::Vec;

use crate::cpe::{cpe_rhs, diagnose_w_cpe};
use crate::error::{Error, Result};
use crate::model::{CPEState, PEState, Params, PerturbationView};
use crate::pe::{diagnose_pressure_rho1, diagnose_rho1_t, diagnose_w_pe, pe_rhs};
use crate::spectral::{
    broadcast_z, div_h, hvel_sobolev_sq, product_to_spectral, Axis, HVel, Parity, SpectralField2, SpectralField3,
};

/// The four terms of `E(t)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnergyParts {
    /// `‖ψʰ‖²_{H²}`
    pub psi_h2: f64,
    /// `‖εψʰ_t‖²_{L²}`
    pub eps_psit_l2: f64,
    /// `‖ε⁻¹ξ‖²_{H²}`
    pub xi_h2: f64,
    /// `‖ξ_t‖²_{L²}`
    pub xit_l2: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.psi_h2 + self.eps_psit_l2 + self.xi_h2 + self.xit_l2
    }
}

/// The four terms of `D(t)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DissipationParts {
    /// `‖∇ψʰ‖²_{H²}` (full 3-D gradient)
    pub grad_psi_h2: f64,
    /// `‖εψʰ_t‖²_{H¹}`
    pub eps_psit_h1: f64,
    /// `‖ε⁻¹∇_h ξ‖²_{H¹}`
    pub grad_xi_h1: f64,
    /// `‖ξ_t‖²_{L²}`
    pub xit_l2: f64,
}

impl DissipationParts {
    pub fn total(&self) -> f64 {
        self.grad_psi_h2 + self.eps_psit_h1 + self.grad_xi_h1 + self.xit_l2
    }
}

/// `‖v^ε − v_p‖_{H²}`, `‖ρ^ε − ρ₀‖_{H²}`, `‖w^ε − w_p‖_{H¹}` and, for
/// reference, `‖ξ‖_{H²} = ‖ρ^ε − ρ₀ − ε²ρ₁‖_{H²}`. Norms, not squares.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConvergenceMetrics {
    pub v_h2: f64,
    pub rho_h2: f64,
    pub w_h1: f64,
    pub xi_h2: f64,
}

impl ConvergenceMetrics {
    pub fn from_view(view: &PerturbationView) -> Self {
        ConvergenceMetrics {
            v_h2: libm::sqrt(hvel_sobolev_sq(&view.psi_h, 2)),
            rho_h2: view.zeta.sobolev_norm(2),
            w_h1: view.psi_z.sobolev_norm(1),
            xi_h2: view.xi.sobolev_norm(2),
        }
    }
}

/// `∫ρ` and `∫ρv` over the slab.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Conservation {
    pub mass: f64,
    pub momentum: [f64; 2],
}

/// Everything recorded at one output time of a paired run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnergyReport {
    pub t: f64,
    pub energy: EnergyParts,
    pub dissipation: DissipationParts,
    pub mass: f64,
    pub momentum: [f64; 2],
    /// `‖v_p‖²_{L²}`
    pub pe_l2_sq: f64,
    pub convergence: ConvergenceMetrics,
}

fn check_pair(cpe: &CPEState, pe: &PEState) -> Result<()> {
    if cpe.grid() != pe.grid() {
        return Err(Error::GridMismatch);
    }
    if (cpe.t - pe.t).abs() > 1e-12 * cpe.t.abs().max(1.0) {
        return Err(Error::TimeMismatch(cpe.t, pe.t));
    }
    Ok(())
}

fn hvel_sub(a: &HVel, b: &HVel) -> HVel {
    [a[0].clone() - &b[0], a[1].clone() - &b[1]]
}

fn density_deviation(cpe: &CPEState, p: &Params) -> SpectralField2 {
    let mut zeta = cpe.rho.clone();
    zeta.coeffs_mut()[0].re -= p.rho0;
    zeta
}

/// Decompose a CPE state against the PE state at the same time.
pub fn perturbation_view(cpe: &CPEState, pe: &PEState, p: &Params) -> Result<PerturbationView> {
    check_pair(cpe, pe)?;
    let e2 = p.eps * p.eps;
    let rho1 = diagnose_pressure_rho1(pe, p)?;
    let dpe = pe_rhs(pe, p)?;
    let rho1_t = diagnose_rho1_t(pe, &dpe, p)?;
    let dcpe = cpe_rhs(cpe, p)?;

    let zeta = density_deviation(cpe, p);
    let xi = zeta.clone() - (&rho1 * e2);
    let psi_z = diagnose_w_cpe(&cpe.rho, &cpe.v, p)? - diagnose_w_pe(&pe.v, p)?;
    Ok(PerturbationView {
        t: cpe.t,
        eps: p.eps,
        rho1,
        xi,
        psi_h: hvel_sub(&cpe.v, &pe.v),
        psi_z,
        zeta,
        xi_t: dcpe.drho - (&rho1_t * e2),
        psi_h_t: hvel_sub(&dcpe.dv, &dpe.dv),
    })
}

/// `ψᶻ = -ρ⁻¹∫₀ᶻ [div_h(ρψ̃ʰ) + ṽ_p·∇_h ρ] dz'`, computed without either
/// vertical velocity.
pub fn psi_z_closed_form(cpe: &CPEState, pe: &PEState, p: &Params) -> Result<SpectralField3> {
    check_pair(cpe, pe)?;
    let g = *cpe.grid();
    let r2 = cpe.rho.to_samples();
    if let Some(&value) = r2.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::NonpositiveDensity { value });
    }
    let rho3 = broadcast_z(&g, &r2);
    let psi = hvel_sub(&cpe.v, &pe.v);
    let times_rho = |f: &SpectralField3| {
        let s: Vec<f64> = f
            .baroclinic()
            .to_samples()
            .iter()
            .zip(&rho3)
            .map(|(a, r)| a * r)
            .collect();
        product_to_spectral(g, Parity::Even, &s)
    };
    let flux_div = times_rho(&psi[0]).deriv(Axis::X) + times_rho(&psi[1]).deriv(Axis::Y);

    let rx = broadcast_z(&g, &cpe.rho.deriv(Axis::X).to_samples());
    let ry = broadcast_z(&g, &cpe.rho.deriv(Axis::Y).to_samples());
    let ux = pe.v[0].baroclinic().to_samples();
    let uy = pe.v[1].baroclinic().to_samples();
    let transport: Vec<f64> = (0..ux.len()).map(|n| ux[n] * rx[n] + uy[n] * ry[n]).collect();
    let integrand = flux_div + product_to_spectral(g, Parity::Even, &transport);

    let integral = integrand.integrate_z_from_zero(p.tolerances.solvability)?.to_samples();
    let out: Vec<f64> = integral.iter().zip(&rho3).map(|(a, r)| -a / r).collect();
    Ok(product_to_spectral(g, Parity::Odd, &out))
}

fn sq(x: f64) -> f64 {
    x * x
}

pub fn energy_e(view: &PerturbationView) -> EnergyParts {
    let e2 = view.eps * view.eps;
    EnergyParts {
        psi_h2: hvel_sobolev_sq(&view.psi_h, 2),
        eps_psit_l2: e2 * hvel_sobolev_sq(&view.psi_h_t, 0),
        xi_h2: sq(view.xi.sobolev_norm(2)) / e2,
        xit_l2: sq(view.xi_t.sobolev_norm(0)),
    }
}

pub fn dissipation_d(view: &PerturbationView) -> DissipationParts {
    let e2 = view.eps * view.eps;
    let grad_h2 = |k2: f64| k2 * sq(1.0 + k2);
    DissipationParts {
        grad_psi_h2: view.psi_h.iter().map(|c| c.weighted_sq(grad_h2)).sum(),
        eps_psit_h1: e2 * hvel_sobolev_sq(&view.psi_h_t, 1),
        grad_xi_h1: view.xi.weighted_sq(|k2| k2 * (1.0 + k2)) / e2,
        xit_l2: sq(view.xi_t.sobolev_norm(0)),
    }
}

/// Mass and momentum by quadrature on the collocation grid (exact for
/// band-limited fields).
pub fn conservation_report(cpe: &CPEState) -> Conservation {
    let g = cpe.grid();
    let vol = g.volume();
    let r2 = cpe.rho.to_samples();
    let rho3 = broadcast_z(g, &r2);
    let momentum = [0, 1].map(|c| {
        let s = cpe.v[c].to_samples();
        s.iter().zip(&rho3).map(|(a, r)| a * r).sum::<f64>() / s.len() as f64 * vol
    });
    Conservation {
        mass: cpe.rho.mean() * vol,
        momentum,
    }
}

/// Distances between a CPE state and the PE state at the same time.
pub fn convergence_metrics(cpe: &CPEState, pe: &PEState, p: &Params) -> Result<ConvergenceMetrics> {
    check_pair(cpe, pe)?;
    let rho1 = diagnose_pressure_rho1(pe, p)?;
    let zeta = density_deviation(cpe, p);
    let xi = zeta.clone() - (&rho1 * (p.eps * p.eps));
    let psi_z = diagnose_w_cpe(&cpe.rho, &cpe.v, p)? - diagnose_w_pe(&pe.v, p)?;
    Ok(ConvergenceMetrics {
        v_h2: libm::sqrt(hvel_sobolev_sq(&hvel_sub(&cpe.v, &pe.v), 2)),
        rho_h2: zeta.sobolev_norm(2),
        w_h1: psi_z.sobolev_norm(1),
        xi_h2: xi.sobolev_norm(2),
    })
}

/// Full report for one output time.
pub fn energy_report(cpe: &CPEState, pe: &PEState, p: &Params) -> Result<EnergyReport> {
    let view = perturbation_view(cpe, pe, p)?;
    let cons = conservation_report(cpe);
    Ok(EnergyReport {
        t: cpe.t,
        energy: energy_e(&view),
        dissipation: dissipation_d(&view),
        mass: cons.mass,
        momentum: cons.momentum,
        pe_l2_sq: pe.l2_sq(),
        convergence: ConvergenceMetrics::from_view(&view),
    })
}

/// `μ‖∇_h v‖² + λ‖div_h v‖² + ‖∂_z v‖²`.
pub fn pe_dissipation(v: &HVel, p: &Params) -> f64 {
    let mut grad = 0.0;
    let mut dz = 0.0;
    for c in v {
        grad += sq(c.deriv(Axis::X).sobolev_norm(0)) + sq(c.deriv(Axis::Y).sobolev_norm(0));
        dz += sq(c.deriv(Axis::Z).sobolev_norm(0));
    }
    p.mu * grad + p.lambda * sq(div_h(v).sobolev_norm(0)) + dz
}

/// Discrete energy balance of a PE trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyResidual {
    /// `ρ₀/2 (‖v_{n+1}‖² - ‖v_n‖²)/dt + (D_n + D_{n+1})/2`
    pub series: Vec<f64>,
    /// `max_n |residual_n|`
    pub max: f64,
    /// `Σ_n |residual_n| dt`
    pub accumulated: f64,
}

/// Residual of `d/dt(ρ₀/2‖v‖²) + μ‖∇_h v‖² + λ‖div_h v‖² + ‖∂_z v‖² = 0`
/// along a uniformly spaced history.
pub fn pe_energy_residual(history: &[PEState], p: &Params) -> Result<EnergyResidual> {
    if history.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: history.len(),
        });
    }
    let dt = history[1].t - history[0].t;
    let dev = history
        .windows(2)
        .map(|w| ((w[1].t - w[0].t) - dt).abs() / dt.abs())
        .fold(0.0, f64::max);
    if !(dt > 0.0) || !(dev <= 1e-9) {
        return Err(Error::NonuniformSpacing(dev));
    }
    let energy: Vec<f64> = history.iter().map(|s| 0.5 * p.rho0 * s.l2_sq()).collect();
    let diss: Vec<f64> = history.iter().map(|s| pe_dissipation(&s.v, p)).collect();
    let series: Vec<f64> = (0..history.len() - 1)
        .map(|n| (energy[n + 1] - energy[n]) / dt + 0.5 * (diss[n] + diss[n + 1]))
        .collect();
    let max = series.iter().fold(0.0, |m: f64, r| m.max(r.abs()));
    let accumulated = series.iter().map(|r| r.abs() * dt).sum();
    Ok(EnergyResidual {
        series,
        max,
        accumulated,
    })
}

/// Least-squares line `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| sq(x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| sq(y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParams(String::from("abscissae are all equal")));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| sq(y - slope * x - intercept)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(LinearFit { slope, intercept, r2 })
}

fn logs(v: &[f64]) -> Result<Vec<f64>> {
    v.iter()
        .map(|&x| {
            if x > 0.0 {
                Ok(libm::log(x))
            } else {
                Err(Error::NonpositiveData(x))
            }
        })
        .collect()
}

/// Fit `log y = slope·log x + intercept`.
pub fn fit_log_slope(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    fit_line(&logs(xs)?, &logs(ys)?)
}

/// Fit `log y = slope·t + intercept` (exponential rate).
pub fn fit_semilog_slope(ts: &[f64], ys: &[f64]) -> Result<LinearFit> {
    fit_line(ts, &logs(ys)?)
}

#[cfg(test)]
mod tests;
