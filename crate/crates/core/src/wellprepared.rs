//! Compatible PE initial data and matched well-prepared CPE data.
//!
//! The CPE starts from `ρ = ρ₀ + ε²ρ₁,in`, `v = v_p,in`, i.e. `ξ_in = 0`,
//! `ψʰ_in = 0`; the acoustic part of the data is then `O(ε²)`.

use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use alloc::string::String;

use crate::diagnostics::{energy_e, perturbation_view, EnergyParts};
use crate::error::{Error, Result};
use crate::model::{CPEState, PEState, Params};
use crate::pe::{diagnose_pressure_rho1, leray_project_barotropic};
use crate::spectral::{div_h, Grid, HVel, Parity, SpectralField3};

/// Analytic initial velocities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum IcFamily {
    /// `A(sin x cos y cos πz, -cos x sin y cos πz)`: purely baroclinic.
    BaroclinicTaylorGreen,
    /// z-independent, divergence-free, stream function
    /// `sin x sin y + ½ cos(x + 2y)`.
    BarotropicVortex,
    /// `A cos(πz) x̂`: an exact decaying solution of both systems.
    HeatMode,
}

impl IcFamily {
    pub const ALL: [IcFamily; 3] = [
        IcFamily::BaroclinicTaylorGreen,
        IcFamily::BarotropicVortex,
        IcFamily::HeatMode,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IcFamily::BaroclinicTaylorGreen => "baroclinic-taylor-green",
            IcFamily::BarotropicVortex => "barotropic-vortex",
            IcFamily::HeatMode => "heat-mode",
        }
    }
}

impl fmt::Display for IcFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IcFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IcFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFamily(String::from(s)))
    }
}

pub fn sample_initial_velocity(family: IcFamily, amplitude: f64, grid: Grid) -> Result<HVel> {
    if !(amplitude >= 0.0) || !amplitude.is_finite() {
        return Err(Error::InvalidParams(alloc::format!(
            "amplitude must be non-negative, got {amplitude}"
        )));
    }
    let a = amplitude;
    let f = |h: &dyn Fn(f64, f64, f64) -> f64| SpectralField3::from_fn(grid, Parity::Even, h);
    let v = match family {
        IcFamily::BaroclinicTaylorGreen => [
            f(&|x, y, z| a * libm::sin(x) * libm::cos(y) * libm::cos(PI * z)),
            f(&|x, y, z| -a * libm::cos(x) * libm::sin(y) * libm::cos(PI * z)),
        ],
        // u = -∂_y ψ, v = ∂_x ψ
        IcFamily::BarotropicVortex => [
            f(&|x, y, _| -a * (libm::sin(x) * libm::cos(y) - libm::sin(x + 2.0 * y))),
            f(&|x, y, _| a * (libm::cos(x) * libm::sin(y) - 0.5 * libm::sin(x + 2.0 * y))),
        ],
        IcFamily::HeatMode => [
            f(&|_, _, z| a * libm::cos(PI * z)),
            SpectralField3::zeros(grid, Parity::Even),
        ],
    };
    Ok(v.map(|c| c.dealiased()))
}

/// Remove the mean and the barotropic gradient part: afterwards `∫v = 0`
/// and `div_h v̄ = 0`.
pub fn enforce_compatibility(v: &HVel) -> HVel {
    let mut out = v.clone();
    for c in &mut out {
        c.coeffs_mut()[0] = num_complex::Complex64::new(0.0, 0.0);
    }
    leray_project_barotropic(&out)
}

/// `(|∫v|, max|div_h v̄|)` on the grid.
pub fn compatibility_defect(v: &HVel) -> Result<(f64, f64)> {
    let vol = v[0].grid().volume();
    let momentum = libm::hypot(v[0].mean(), v[1].mean()) * vol;
    let div = div_h(v)
        .vertical_average()?
        .to_samples()
        .iter()
        .fold(0.0, |m: f64, x| m.max(x.abs()));
    Ok((momentum, div))
}

/// PE state `v_in` and CPE state `(ρ₀ + ε²ρ₁,in, v_in)` at `t = 0`.
pub fn build_initial_states(v_in: &HVel, p: &Params) -> Result<(PEState, CPEState)> {
    if *v_in[0].grid() != p.grid || *v_in[1].grid() != p.grid {
        return Err(Error::GridMismatch);
    }
    for c in v_in {
        if c.parity() != Parity::Even {
            return Err(Error::ParityMismatch {
                expected: Parity::Even,
                got: c.parity(),
            });
        }
    }
    let tol = p.tolerances.solvability;
    let (momentum, divergence) = compatibility_defect(v_in)?;
    if !(momentum <= tol && divergence <= tol) {
        return Err(Error::Incompatible {
            momentum,
            divergence,
            tol,
        });
    }
    let pe = PEState {
        v: v_in.clone(),
        t: 0.0,
    };
    let rho1 = diagnose_pressure_rho1(&pe, p)?;
    let mut rho = rho1 * (p.eps * p.eps);
    rho.coeffs_mut()[0].re += p.rho0;
    let cpe = CPEState {
        rho,
        v: v_in.clone(),
        t: 0.0,
    };
    cpe.check_density(p)?;
    Ok((pe, cpe))
}

/// `E_in`, i.e. `E(0)`, with the initial time derivatives taken from the
/// right-hand sides.
pub fn initial_energy(pe0: &PEState, cpe0: &CPEState, p: &Params) -> Result<EnergyParts> {
    Ok(energy_e(&perturbation_view(cpe0, pe0, p)?))
}
