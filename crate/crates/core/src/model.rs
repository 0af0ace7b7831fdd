//! Parameters, prognostic states, and the pointwise constitutive formulas
//! shared by both solvers.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::spectral::{Grid, HVel, SpectralField2, SpectralField3};

/// Numerical tolerances, overridable from configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Tolerances {
    /// Solvability checks: vertical means before integration, elliptic RHS means.
    pub solvability: f64,
    /// Transform round trips.
    pub round_trip: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            solvability: 1e-10,
            round_trip: 1e-12,
        }
    }
}

/// Physical and numerical parameters.
///
/// Pressure law `P(ρ) = ρ^γ`; the momentum equation carries the factor `ε⁻²`
/// in front of `∇_h P`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Params {
    pub rho0: f64,
    pub gamma: f64,
    pub mu: f64,
    pub lambda: f64,
    pub eps: f64,
    pub grid: Grid,
    pub cfl_acoustic: f64,
    pub cfl_advective: f64,
    pub cfl_viscous: f64,
    pub t_end: f64,
    pub output_stride: usize,
    #[cfg_attr(feature = "serde", serde(default))]
    pub tolerances: Tolerances,
}

impl Params {
    /// The desk-scale configuration: 32×32×16, ρ₀ = 1, γ = 2, μ = λ = 1.
    pub fn desk(eps: f64) -> Self {
        Params {
            rho0: 1.0,
            gamma: 2.0,
            mu: 1.0,
            lambda: 1.0,
            eps,
            grid: Grid::new(32, 32, 16).expect("valid grid"),
            cfl_acoustic: 0.5,
            cfl_advective: 0.5,
            cfl_viscous: 0.5,
            t_end: 0.5,
            output_stride: 10,
            tolerances: Tolerances::default(),
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_grid(mut self, grid: Grid) -> Self {
        self.grid = grid;
        self
    }

    /// Every violated invariant, as human-readable messages.
    pub fn validate(&self) -> core::result::Result<(), Vec<String>> {
        let mut v = Vec::new();
        let finite = [self.rho0, self.gamma, self.mu, self.lambda, self.eps, self.t_end];
        if finite.iter().any(|x| !x.is_finite()) {
            v.push(String::from("all parameters must be finite"));
        }
        if !(self.rho0 > 0.0) {
            v.push(format!("rho0 > 0 required, got {}", self.rho0));
        }
        if !(self.gamma > 1.0) {
            v.push(format!("gamma > 1 required, got {}", self.gamma));
        }
        if !(self.mu > 0.0) {
            v.push(format!("mu > 0 required, got {}", self.mu));
        }
        if !(self.lambda > 0.0) {
            v.push(format!("0 < lambda required, got lambda = {}", self.lambda));
        }
        if !(self.lambda < 4.0 * self.mu) {
            v.push(format!(
                "lambda < 4 mu violated: lambda = {}, 4 mu = {}",
                self.lambda,
                4.0 * self.mu
            ));
        }
        if !(4.0 * self.mu < 12.0 * self.lambda) {
            v.push(format!(
                "4 mu < 12 lambda violated: 4 mu = {}, 12 lambda = {}",
                4.0 * self.mu,
                12.0 * self.lambda
            ));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            v.push(format!("eps in (0, 1) required, got {}", self.eps));
        }
        for (name, c) in [
            ("cfl_acoustic", self.cfl_acoustic),
            ("cfl_advective", self.cfl_advective),
            ("cfl_viscous", self.cfl_viscous),
        ] {
            if !(c > 0.0 && c < 1.0) {
                v.push(format!("{name} in (0, 1) required, got {c}"));
            }
        }
        if !(self.t_end >= 0.0) {
            v.push(format!("t_end >= 0 required, got {}", self.t_end));
        }
        if self.output_stride == 0 {
            v.push(String::from("output_stride >= 1 required"));
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }

    pub fn validated(self) -> Result<Self> {
        self.validate().map_err(|v| Error::InvalidParams(v.join("; ")))?;
        Ok(self)
    }
}

/// `c_s² = γ ρ₀^{γ-1}`.
pub fn sound_speed_sq(p: &Params) -> f64 {
    p.gamma * libm::pow(p.rho0, p.gamma - 1.0)
}

/// Taylor remainder of the pressure about `ρ₀`:
/// `R(ζ) = ρ^γ - ρ₀^γ - c_s² ζ` with `ρ = ρ₀ + ζ`.
pub fn residue(zeta: f64, p: &Params) -> Result<f64> {
    let rho = p.rho0 + zeta;
    if !(rho > 0.0) {
        return Err(Error::NonpositiveDensity { value: rho });
    }
    Ok(libm::pow(rho, p.gamma) - libm::pow(p.rho0, p.gamma) - sound_speed_sq(p) * zeta)
}

/// Incompressible state: horizontal velocity `v_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PEState {
    pub v: HVel,
    pub t: f64,
}

/// Compressible state: density `ρ^ε` (z-independent by type) and horizontal
/// velocity `v^ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct CPEState {
    pub rho: SpectralField2,
    pub v: HVel,
    pub t: f64,
}

impl PEState {
    pub fn rest(grid: Grid) -> Self {
        PEState {
            v: zero_hvel(grid),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.v[0].grid()
    }

    /// `∫_Ω v_p` per component.
    pub fn momentum(&self) -> [f64; 2] {
        let vol = self.grid().volume();
        [self.v[0].mean() * vol, self.v[1].mean() * vol]
    }

    /// `‖v_p‖²_{L²}`.
    pub fn l2_sq(&self) -> f64 {
        crate::spectral::hvel_sobolev_sq(&self.v, 0)
    }
}

impl CPEState {
    pub fn rest(p: &Params) -> Self {
        CPEState {
            rho: SpectralField2::constant(p.grid, p.rho0),
            v: zero_hvel(p.grid),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.rho.grid()
    }

    /// Density extrema on the collocation grid.
    pub fn rho_range(&self) -> (f64, f64) {
        self.rho
            .to_samples()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
                (lo.min(r), hi.max(r))
            })
    }

    /// Enforce `½ρ₀ < ρ < 2ρ₀` on the grid.
    pub fn check_density(&self, p: &Params) -> Result<()> {
        let (min, max) = self.rho_range();
        let (lower, upper) = (0.5 * p.rho0, 2.0 * p.rho0);
        if min > lower && max < upper {
            Ok(())
        } else {
            Err(Error::DensityOutOfBounds { min, max, lower, upper })
        }
    }
}

pub fn zero_hvel(grid: Grid) -> HVel {
    [
        SpectralField3::zeros(grid, crate::spectral::Parity::Even),
        SpectralField3::zeros(grid, crate::spectral::Parity::Even),
    ]
}

/// Deviation of a CPE state from the PE state under the ansatz
/// `ρ^ε = ρ₀ + ε²ρ₁ + ξ`, `v^ε = v_p + ψʰ`, `w^ε = w_p + ψᶻ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationView {
    pub t: f64,
    pub eps: f64,
    /// `ρ₁` of the PE state.
    pub rho1: SpectralField2,
    pub xi: SpectralField2,
    pub psi_h: HVel,
    pub psi_z: SpectralField3,
    /// `ζ = ε²ρ₁ + ξ = ρ^ε - ρ₀`.
    pub zeta: SpectralField2,
    pub xi_t: SpectralField2,
    pub psi_h_t: HVel,
}

impl PerturbationView {
    /// `ρ₀ + ε²ρ₁ + ξ`, mode by mode.
    pub fn reconstruct_rho(&self, rho0: f64) -> SpectralField2 {
        let mut r = (&self.rho1 * (self.eps * self.eps)) + &self.xi;
        r.coeffs_mut()[0].re += rho0;
        r
    }
}
