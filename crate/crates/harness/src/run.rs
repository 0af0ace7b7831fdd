//! Paired and single-solver runs.
//!
//! Both integrators use their own stable step and clip the last substep so
//! that every output time is hit exactly.

use lowmach_core::cpe::{cpe_step, diagnose_w_cpe, stable_dt, total_energy};
use lowmach_core::diagnostics::{
    conservation_report, dissipation_d, energy_e, pe_dissipation, perturbation_view, psi_z_closed_form,
    ConvergenceMetrics, EnergyParts, EnergyReport,
};
use lowmach_core::pe::{diagnose_w_pe, pe_step, stable_dt_pe};
use lowmach_core::wellprepared::{build_initial_states, enforce_compatibility, sample_initial_velocity};
use lowmach_core::{CPEState, HVel, PEState, Params, SpectralField3};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{Context, Result};

/// Largest `|c_0|`, `|c_{nz/2}|` and `|c_l + c_{nz-l}|` over all columns:
/// zero exactly when the field is a pure sine series in z.
pub fn sine_defect(w: &SpectralField3) -> f64 {
    let g = w.grid();
    let c = w.coeffs();
    let mut worst = 0.0f64;
    for i in 0..g.nx() {
        for j in 0..g.ny() {
            worst = worst
                .max(c[g.idx3(i, j, 0)].norm())
                .max(c[g.idx3(i, j, g.nz() / 2)].norm());
            for l in 1..g.nz() {
                worst = worst.max((c[g.idx3(i, j, l)] + c[g.idx3(i, j, g.mirror_z(l))]).norm());
            }
        }
    }
    worst
}

fn parity_contamination(v: &HVel) -> f64 {
    v[0].parity_contamination().max(v[1].parity_contamination())
}

/// Structural and conservation audit of a run, sampled after every step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunAudit {
    /// Largest relative change of `∫ρ` from its initial value.
    pub mass_drift: f64,
    /// Largest `|∫v_p|`.
    pub pe_momentum: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    /// Largest wrong-parity fraction of either velocity.
    pub parity_contamination: f64,
    /// Largest [`sine_defect`] of either vertical velocity (output times).
    pub sine_defect: f64,
    /// Largest `‖ψᶻ_closed − ψᶻ_diff‖_{L²}` over output times.
    pub psi_z_gap: f64,
}

impl RunAudit {
    fn new() -> Self {
        RunAudit {
            mass_drift: 0.0,
            pe_momentum: 0.0,
            rho_min: f64::INFINITY,
            rho_max: f64::NEG_INFINITY,
            parity_contamination: 0.0,
            sine_defect: 0.0,
            psi_z_gap: 0.0,
        }
    }

    fn see_pe(&mut self, s: &PEState) {
        let m = s.momentum();
        self.pe_momentum = self.pe_momentum.max(m[0].abs()).max(m[1].abs());
        self.parity_contamination = self.parity_contamination.max(parity_contamination(&s.v));
    }

    fn see_cpe(&mut self, s: &CPEState, mass0: f64) {
        let mass = s.rho.mean();
        self.mass_drift = self.mass_drift.max(((mass - mass0) / mass0).abs());
        let (lo, hi) = s.rho_range();
        self.rho_min = self.rho_min.min(lo);
        self.rho_max = self.rho_max.max(hi);
        self.parity_contamination = self.parity_contamination.max(parity_contamination(&s.v));
    }
}

/// Advance to `target` with the PE stable step, landing exactly on it.
pub fn advance_pe(
    mut s: PEState,
    target: f64,
    p: &Params,
    mut each: impl FnMut(&PEState),
) -> lowmach_core::Result<(PEState, usize)> {
    let mut steps = 0;
    while s.t < target {
        let dt = stable_dt_pe(&s, p)?;
        let last = s.t + dt >= target;
        s = pe_step(&s, if last { target - s.t } else { dt }, p)?;
        if last {
            s.t = target;
        }
        steps += 1;
        each(&s);
    }
    Ok((s, steps))
}

/// Advance to `target` with the CPE stable step, landing exactly on it.
pub fn advance_cpe(
    mut s: CPEState,
    target: f64,
    p: &Params,
    mut each: impl FnMut(&CPEState),
) -> lowmach_core::Result<(CPEState, usize)> {
    let mut steps = 0;
    while s.t < target {
        let dt = stable_dt(&s, p)?;
        let last = s.t + dt >= target;
        s = cpe_step(&s, if last { target - s.t } else { dt }, p)?;
        if last {
            s.t = target;
        }
        steps += 1;
        each(&s);
    }
    Ok((s, steps))
}

/// Result of [`run_pair`].
#[derive(Debug, Clone, PartialEq)]
pub struct PairRun {
    pub eps: f64,
    /// One entry per output time.
    pub reports: Vec<EnergyReport>,
    pub initial_energy: EnergyParts,
    pub audit: RunAudit,
    pub pe_steps: usize,
    pub cpe_steps: usize,
    pub final_pe: PEState,
    pub final_cpe: CPEState,
}

impl PairRun {
    pub fn sup(&self, f: impl Fn(&EnergyReport) -> f64) -> f64 {
        self.reports.iter().map(f).fold(0.0, f64::max)
    }

    pub fn sup_metrics(&self) -> ConvergenceMetrics {
        ConvergenceMetrics {
            v_h2: self.sup(|r| r.convergence.v_h2),
            rho_h2: self.sup(|r| r.convergence.rho_h2),
            w_h1: self.sup(|r| r.convergence.w_h1),
            xi_h2: self.sup(|r| r.convergence.xi_h2),
        }
    }
}

/// Compatible initial velocity of the configured family.
pub fn initial_velocity(cfg: &ExperimentConfig) -> Result<HVel> {
    let v = sample_initial_velocity(cfg.ic_family, cfg.amplitude, cfg.params.grid)
        .context(|| format!("sampling {}", cfg.ic_family))?;
    Ok(enforce_compatibility(&v))
}

fn record(cpe: &CPEState, pe: &PEState, p: &Params, audit: &mut RunAudit) -> lowmach_core::Result<EnergyReport> {
    let view = perturbation_view(cpe, pe, p)?;
    let closed = psi_z_closed_form(cpe, pe, p)?;
    audit.psi_z_gap = audit.psi_z_gap.max((closed - &view.psi_z).sobolev_norm(0));
    let w_defect = sine_defect(&diagnose_w_cpe(&cpe.rho, &cpe.v, p)?).max(sine_defect(&diagnose_w_pe(&pe.v, p)?));
    audit.sine_defect = audit.sine_defect.max(w_defect);
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

/// Run PE and CPE side by side from well-prepared data at one ε.
pub fn run_pair(cfg: &ExperimentConfig, eps: f64) -> Result<PairRun> {
    let p = cfg.params_for(eps).validated().context(|| format!("eps = {eps}"))?;
    let v = initial_velocity(cfg)?;
    let (mut pe, mut cpe) = build_initial_states(&v, &p).context(|| format!("eps = {eps}: initial data"))?;
    let mass0 = cpe.rho.mean();
    let mut audit = RunAudit::new();
    audit.see_pe(&pe);
    audit.see_cpe(&cpe, mass0);

    let times = cfg.output_times();
    let mut reports = Vec::with_capacity(times.len());
    reports.push(record(&cpe, &pe, &p, &mut audit).context(|| format!("eps = {eps}, t = 0"))?);
    let initial_energy = reports[0].energy;
    let (mut pe_steps, mut cpe_steps) = (0, 0);
    for &t in &times[1..] {
        let (next, n) =
            advance_pe(pe, t, &p, |s| audit.see_pe(s)).context(|| format!("eps = {eps}: PE towards t = {t}"))?;
        pe = next;
        pe_steps += n;
        let (next, n) = advance_cpe(cpe, t, &p, |s| audit.see_cpe(s, mass0))
            .context(|| format!("eps = {eps}: CPE towards t = {t}"))?;
        cpe = next;
        cpe_steps += n;
        reports.push(record(&cpe, &pe, &p, &mut audit).context(|| format!("eps = {eps}, t = {t}"))?);
    }
    Ok(PairRun {
        eps,
        reports,
        initial_energy,
        audit,
        pe_steps,
        cpe_steps,
        final_pe: pe,
        final_cpe: cpe,
    })
}

/// One row of a PE-only run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeRow {
    pub step: usize,
    pub t: f64,
    pub l2_sq: f64,
    pub momentum_x: f64,
    pub momentum_y: f64,
    /// `μ‖∇_h v‖² + λ‖div_h v‖² + ‖∂_z v‖²`
    pub dissipation: f64,
}

/// One row of a CPE-only run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CpeRow {
    pub step: usize,
    pub t: f64,
    pub mass: f64,
    pub momentum_x: f64,
    pub momentum_y: f64,
    pub total_energy: f64,
    pub rho_min: f64,
    pub rho_max: f64,
}

fn pe_row(step: usize, s: &PEState, p: &Params) -> PeRow {
    let m = s.momentum();
    PeRow {
        step,
        t: s.t,
        l2_sq: s.l2_sq(),
        momentum_x: m[0],
        momentum_y: m[1],
        dissipation: pe_dissipation(&s.v, p),
    }
}

fn cpe_row(step: usize, s: &CPEState, p: &Params) -> CpeRow {
    let c = conservation_report(s);
    let (rho_min, rho_max) = s.rho_range();
    CpeRow {
        step,
        t: s.t,
        mass: c.mass,
        momentum_x: c.momentum[0],
        momentum_y: c.momentum[1],
        total_energy: total_energy(s, p),
        rho_min,
        rho_max,
    }
}

/// PE alone up to `t_end`, a row every `output_stride` steps and at the end.
pub fn run_pe(cfg: &ExperimentConfig) -> Result<Vec<PeRow>> {
    let p = cfg
        .params_for(cfg.eps_list[0])
        .validated()
        .context(|| "parameters".to_string())?;
    let (pe, _) = build_initial_states(&initial_velocity(cfg)?, &p).context(|| "initial data".to_string())?;
    let stride = p.output_stride;
    let mut rows = vec![pe_row(0, &pe, &p)];
    let mut step = 0;
    let (last, _) = advance_pe(pe, cfg.t_end, &p, |s| {
        step += 1;
        if step % stride == 0 {
            rows.push(pe_row(step, s, &p));
        }
    })
    .context(|| "PE run".to_string())?;
    if step % stride != 0 {
        rows.push(pe_row(step, &last, &p));
    }
    Ok(rows)
}

/// CPE alone at one ε up to `t_end`.
pub fn run_cpe(cfg: &ExperimentConfig, eps: f64) -> Result<Vec<CpeRow>> {
    let p = cfg.params_for(eps).validated().context(|| format!("eps = {eps}"))?;
    let (_, cpe) =
        build_initial_states(&initial_velocity(cfg)?, &p).context(|| format!("eps = {eps}: initial data"))?;
    let stride = p.output_stride;
    let mut rows = vec![cpe_row(0, &cpe, &p)];
    let mut step = 0;
    let (last, _) = advance_cpe(cpe, cfg.t_end, &p, |s| {
        step += 1;
        if step % stride == 0 {
            rows.push(cpe_row(step, s, &p));
        }
    })
    .context(|| format!("eps = {eps}: CPE run"))?;
    if step % stride != 0 {
        rows.push(cpe_row(step, &last, &p));
    }
    Ok(rows)
}
