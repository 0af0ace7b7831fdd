//! Experiment configuration (JSON, snake_case keys, unknown keys rejected).

use std::path::{Path, PathBuf};

use lowmach_core::wellprepared::IcFamily;
use lowmach_core::{Grid, Params, Tolerances};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Physical and numerical parameters shared by every ε of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseParams {
    pub rho0: f64,
    pub gamma: f64,
    pub mu: f64,
    pub lambda: f64,
    pub grid: Grid,
    pub cfl_acoustic: f64,
    pub cfl_advective: f64,
    pub cfl_viscous: f64,
    /// Steps between rows for the single-solver commands.
    #[serde(default = "default_stride")]
    pub output_stride: usize,
}

fn default_stride() -> usize {
    10
}

impl Default for BaseParams {
    fn default() -> Self {
        let p = Params::desk(0.1);
        BaseParams {
            rho0: p.rho0,
            gamma: p.gamma,
            mu: p.mu,
            lambda: p.lambda,
            grid: p.grid,
            cfl_acoustic: p.cfl_acoustic,
            cfl_advective: p.cfl_advective,
            cfl_viscous: p.cfl_viscous,
            output_stride: p.output_stride,
        }
    }
}

/// Pass/fail thresholds applied to a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Admissible range of the fitted slope of `sup_t ‖v^ε − v_p‖_{H²}` vs ε.
    pub slope_min: f64,
    pub slope_max: f64,
    pub r2_min: f64,
    /// Largest admissible max/min ratio of `sup_t E / ε²` across the sweep.
    pub energy_ratio_max: f64,
    /// Admissible range of the slope of `E_in` vs ε.
    pub initial_slope_min: f64,
    pub initial_slope_max: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            slope_min: 0.8,
            slope_max: 1.2,
            r2_min: 0.98,
            energy_ratio_max: 4.0,
            initial_slope_min: 3.5,
            initial_slope_max: 4.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: BaseParams,
    /// Strictly decreasing, each in (0, 1).
    pub eps_list: Vec<f64>,
    pub ic_family: IcFamily,
    pub amplitude: f64,
    pub t_end: f64,
    /// Output times are `k·t_end/output_count`, `k = 0..=output_count`.
    pub output_count: usize,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub thresholds: Thresholds,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for ExperimentConfig {
    /// The desk-scale convergence study.
    fn default() -> Self {
        ExperimentConfig {
            params: BaseParams::default(),
            eps_list: vec![0.1, 0.05, 0.025, 0.0125],
            ic_family: IcFamily::BaroclinicTaylorGreen,
            amplitude: 1.0,
            t_end: 0.5,
            output_count: 20,
            out_dir: default_out_dir(),
            seed: 0,
            tolerances: Tolerances::default(),
            thresholds: Thresholds::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        Self::load_unchecked(path)?.validated()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_unchecked(text)?.validated()
    }

    /// Parse without checking invariants, so that `verify` can report them.
    pub fn load_unchecked(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json_unchecked(&text)
    }

    pub fn from_json_unchecked(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Solver parameters for one ε.
    pub fn params_for(&self, eps: f64) -> Params {
        let b = &self.params;
        Params {
            rho0: b.rho0,
            gamma: b.gamma,
            mu: b.mu,
            lambda: b.lambda,
            eps,
            grid: b.grid,
            cfl_acoustic: b.cfl_acoustic,
            cfl_advective: b.cfl_advective,
            cfl_viscous: b.cfl_viscous,
            t_end: self.t_end,
            output_stride: b.output_stride,
            tolerances: self.tolerances,
        }
    }

    /// Replace the sweep by a single ε.
    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps_list = vec![eps];
        self
    }

    /// Every violated invariant.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.eps_list.is_empty() {
            v.push("eps_list must not be empty".to_string());
        }
        if self.eps_list.windows(2).any(|w| !(w[1] < w[0])) {
            v.push(format!("eps_list must be strictly decreasing, got {:?}", self.eps_list));
        }
        // params are checked once per ε so that eps range errors name the value
        for &eps in &self.eps_list {
            if let Err(errs) = self.params_for(eps).validate() {
                for e in errs {
                    if !v.contains(&e) {
                        v.push(e);
                    }
                }
            }
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            v.push(format!("amplitude >= 0 required, got {}", self.amplitude));
        }
        if self.output_count == 0 {
            v.push("output_count >= 1 required".to_string());
        }
        v
    }

    pub fn validated(self) -> Result<Self> {
        let v = self.violations();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(HarnessError::Config(v))
        }
    }

    /// `k·t_end/output_count` for `k = 0..=output_count`; a single time when
    /// `t_end = 0`.
    pub fn output_times(&self) -> Vec<f64> {
        if self.t_end == 0.0 {
            return vec![0.0];
        }
        let n = self.output_count;
        let mut times: Vec<f64> = (0..=n).map(|k| self.t_end * k as f64 / n as f64).collect();
        times[n] = self.t_end;
        times
    }
}
