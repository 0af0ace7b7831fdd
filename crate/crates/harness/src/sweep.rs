//! ε-sweeps and their rate fits.

use lowmach_core::diagnostics::{fit_log_slope, ConvergenceMetrics, LinearFit};
use serde::Serialize;

use crate::config::{ExperimentConfig, Thresholds};
use crate::error::{Context, HarnessError, Result};
use crate::run::{run_pair, PairRun, RunAudit};

/// Sup-in-time quantities of one ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepEntry {
    pub eps: f64,
    pub sup: ConvergenceMetrics,
    /// `sup_t ‖ε⁻¹ξ‖_{H²}`
    pub sup_xi_h2_over_eps: f64,
    pub sup_energy: f64,
    pub sup_energy_over_eps2: f64,
    pub initial_energy: f64,
    pub pe_steps: usize,
    pub cpe_steps: usize,
    pub audit: RunAudit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepFits {
    /// `sup_t ‖v^ε − v_p‖_{H²}` vs ε.
    pub v_h2: LinearFit,
    /// `sup_t ‖ρ^ε − ρ₀‖_{H²}` vs ε.
    pub rho_h2: LinearFit,
    /// `sup_t ‖ξ‖_{H²}` vs ε.
    pub xi_h2: LinearFit,
    /// `sup_t ‖w^ε − w_p‖_{H¹}` vs ε.
    pub w_h1: LinearFit,
    /// `E_in` vs ε.
    pub initial_energy: LinearFit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepPass {
    pub slope: bool,
    pub r2: bool,
    pub energy_ratio: bool,
    pub initial_slope: bool,
    pub initial_bound: bool,
}

impl SweepPass {
    pub fn all(&self) -> bool {
        self.slope && self.r2 && self.energy_ratio && self.initial_slope && self.initial_bound
    }
}

/// The JSON summary of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub entries: Vec<SweepEntry>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// max/min of `sup_t E / ε²` over the sweep.
    pub energy_ratio: f64,
    pub fits: SweepFits,
    pub thresholds: Thresholds,
    pub pass: SweepPass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub runs: Vec<PairRun>,
    pub summary: SweepSummary,
}

fn entry(run: &PairRun) -> SweepEntry {
    let sup = run.sup_metrics();
    let sup_energy = run.sup(|r| r.energy.total());
    SweepEntry {
        eps: run.eps,
        sup,
        sup_xi_h2_over_eps: sup.xi_h2 / run.eps,
        sup_energy,
        sup_energy_over_eps2: sup_energy / (run.eps * run.eps),
        initial_energy: run.initial_energy.total(),
        pe_steps: run.pe_steps,
        cpe_steps: run.cpe_steps,
        audit: run.audit,
    }
}

/// Fit the rates and apply the thresholds.
pub fn summarize(runs: &[PairRun], thresholds: Thresholds) -> Result<SweepSummary> {
    let entries: Vec<SweepEntry> = runs.iter().map(entry).collect();
    let eps: Vec<f64> = entries.iter().map(|e| e.eps).collect();
    let fit = |f: &dyn Fn(&SweepEntry) -> f64, what: &str| {
        let ys: Vec<f64> = entries.iter().map(f).collect();
        fit_log_slope(&eps, &ys).context(|| format!("fitting {what}"))
    };
    let fits = SweepFits {
        v_h2: fit(&|e| e.sup.v_h2, "velocity error")?,
        rho_h2: fit(&|e| e.sup.rho_h2, "density deviation")?,
        xi_h2: fit(&|e| e.sup.xi_h2, "density perturbation")?,
        w_h1: fit(&|e| e.sup.w_h1, "vertical velocity error")?,
        initial_energy: fit(&|e| e.initial_energy, "initial energy")?,
    };
    let ratios = entries.iter().map(|e| e.sup_energy_over_eps2);
    let (lo, hi) = ratios.fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
    let energy_ratio = hi / lo;
    let t = thresholds;
    let pass = SweepPass {
        slope: (t.slope_min..=t.slope_max).contains(&fits.v_h2.slope),
        r2: fits.v_h2.r2 >= t.r2_min,
        energy_ratio: energy_ratio < t.energy_ratio_max,
        initial_slope: (t.initial_slope_min..=t.initial_slope_max).contains(&fits.initial_energy.slope),
        initial_bound: entries.iter().all(|e| e.initial_energy <= e.eps * e.eps),
    };
    Ok(SweepSummary {
        entries,
        slope: fits.v_h2.slope,
        intercept: fits.v_h2.intercept,
        r2: fits.v_h2.r2,
        energy_ratio,
        fits,
        thresholds,
        pass,
    })
}

/// One worker per ε; results are gathered in `eps_list` order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    if cfg.eps_list.len() < 3 {
        return Err(HarnessError::Config(vec![format!(
            "a sweep needs at least 3 eps values, got {}",
            cfg.eps_list.len()
        )]));
    }
    let runs: Vec<Result<PairRun>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .eps_list
            .iter()
            .map(|&eps| scope.spawn(move || run_pair(cfg, eps)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let summary = summarize(&runs, cfg.thresholds)?;
    Ok(SweepReport { runs, summary })
}
