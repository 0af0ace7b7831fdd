//! Self-checks runnable from the command line.
//!
//! Every check reports instead of aborting, so a tampered configuration
//! produces failed entries rather than a crash.

use lowmach_core::diagnostics::{fit_semilog_slope, pe_energy_residual, LinearFit};
use lowmach_core::model::sound_speed_sq;
use lowmach_core::pe::{diagnose_pressure_rho1, pe_step, stable_dt_pe};
use lowmach_core::wellprepared::{build_initial_states, sample_initial_velocity, IcFamily};
use lowmach_core::{CPEState, Error, Grid, PEState, Parity, SpectralField2, SpectralField3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::run::{advance_cpe, advance_pe, initial_velocity};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = Result<(bool, String), String>;

fn check(name: &'static str, f: impl FnOnce() -> Outcome) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(detail) => Check {
            name,
            passed: false,
            detail: format!("error: {detail}"),
        },
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn config(cfg: &ExperimentConfig) -> Outcome {
    let v = cfg.violations();
    Ok((v.is_empty(), if v.is_empty() { "ok".into() } else { v.join("; ") }))
}

fn round_trip(cfg: &ExperimentConfig) -> Outcome {
    let g = cfg.params.grid;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let samples: Vec<f64> = (0..g.len3()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let f = SpectralField3::from_samples(g, Parity::Mixed, &samples).map_err(err)?;
    let e3 = max_abs_diff(&f.to_samples(), &samples);
    let s2: Vec<f64> = (0..g.len2()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let e2 = max_abs_diff(&SpectralField2::from_samples(g, &s2).map_err(err)?.to_samples(), &s2);
    let tol = cfg.tolerances.round_trip;
    Ok((
        e3 <= tol && e2 <= tol,
        format!("3-D {e3:.2e}, 2-D {e2:.2e}, tolerance {tol:.0e}"),
    ))
}

fn parity(cfg: &ExperimentConfig) -> Outcome {
    let p = cfg.params_for(cfg.eps_list[0]);
    let mut s = PEState {
        v: initial_velocity(cfg).map_err(|e| e.to_string())?,
        t: 0.0,
    };
    for _ in 0..20 {
        let dt = stable_dt_pe(&s, &p).map_err(err)?;
        s = pe_step(&s, dt, &p).map_err(err)?;
    }
    let c = s.v[0].parity_contamination().max(s.v[1].parity_contamination());
    Ok((c <= 1e-12, format!("odd fraction after 20 steps {c:.2e}")))
}

fn conservation(cfg: &ExperimentConfig) -> Outcome {
    let eps = cfg.eps_list[0];
    let p = cfg.params_for(eps);
    let v = initial_velocity(cfg).map_err(|e| e.to_string())?;
    let (pe, cpe) = build_initial_states(&v, &p).map_err(err)?;
    let horizon = 20.0 * stable_dt_pe(&pe, &p).map_err(err)?;
    let mass0 = cpe.rho.mean();
    let (cpe, _) = advance_cpe(cpe, horizon, &p, |_| {}).map_err(err)?;
    let mut momentum = 0.0f64;
    advance_pe(pe, horizon, &p, |s| {
        let m = s.momentum();
        momentum = momentum.max(m[0].abs()).max(m[1].abs());
    })
    .map_err(err)?;
    let drift = ((cpe.rho.mean() - mass0) / mass0).abs();
    Ok((
        drift <= 1e-12 && momentum <= 1e-12,
        format!("mass drift {drift:.2e}, |∫v_p| {momentum:.2e}"),
    ))
}

fn energy_residual(cfg: &ExperimentConfig) -> Outcome {
    let p = cfg.params_for(cfg.eps_list[0]);
    let v = sample_initial_velocity(IcFamily::HeatMode, 1.0, p.grid).map_err(err)?;
    let dt0 = stable_dt_pe(&PEState { v: v.clone(), t: 0.0 }, &p).map_err(err)?;
    let acc = |k: usize| -> Result<f64, String> {
        let dt = dt0 / k as f64;
        let mut h = vec![PEState { v: v.clone(), t: 0.0 }];
        for n in 1..=10 * k {
            let mut next = pe_step(h.last().unwrap(), dt, &p).map_err(err)?;
            next.t = n as f64 * dt;
            h.push(next);
        }
        Ok(pe_energy_residual(&h, &p).map_err(err)?.accumulated)
    };
    let (a, b) = (acc(1)?, acc(2)?);
    let order = (a / b).log2();
    Ok((
        order >= 1.8,
        format!("accumulated {a:.2e} -> {b:.2e}, order {order:.2}"),
    ))
}

fn elliptic(cfg: &ExperimentConfig) -> Outcome {
    let p = cfg
        .params_for(cfg.eps_list[0])
        .with_grid(Grid::new(8, 8, 4).map_err(err)?);
    let c2 = sound_speed_sq(&p);
    let rhs = SpectralField2::from_fn(p.grid, |x, y| (x + 2.0 * y).cos());
    let u = rhs.solve_neg_laplacian_h(c2, p.tolerances.solvability).map_err(err)?;
    let want: Vec<f64> = p
        .grid
        .points2()
        .map(|(x, y)| (x + 2.0 * y).cos() / (5.0 * c2))
        .collect();
    let e1 = max_abs_diff(&u.to_samples(), &want);

    // steady 2-D Taylor-Green: c²ρ₁ = ρ₀(cos 2x + cos 2y)/4
    let tg = [
        SpectralField3::from_fn(p.grid, Parity::Even, |x, y, _| x.sin() * y.cos()),
        SpectralField3::from_fn(p.grid, Parity::Even, |x, y, _| -x.cos() * y.sin()),
    ];
    let rho1 = diagnose_pressure_rho1(&PEState { v: tg, t: 0.0 }, &p).map_err(err)?;
    let want: Vec<f64> = p
        .grid
        .points2()
        .map(|(x, y)| p.rho0 * ((2.0 * x).cos() + (2.0 * y).cos()) / (4.0 * c2))
        .collect();
    let e2 = max_abs_diff(&rho1.to_samples(), &want);
    let mean = rho1.mean().abs();
    Ok((
        e1 <= 1e-12 && e2 <= 1e-12 && mean <= 1e-14,
        format!("Poisson {e1:.2e}, pressure {e2:.2e}, mean {mean:.2e}"),
    ))
}

fn boundaries(cfg: &ExperimentConfig) -> Outcome {
    let p = cfg.params_for(cfg.eps_list[0]);
    let g = p.grid;
    let tol = p.tolerances.solvability;
    let mut failures = Vec::new();
    let constant = SpectralField3::from_fn(g, Parity::Even, |_, _, _| 1.0);
    if !matches!(
        constant.integrate_z_from_zero(tol),
        Err(Error::NonzeroVerticalMean { .. })
    ) {
        failures.push("vertical integral of a field with nonzero mean was accepted");
    }
    if !matches!(
        SpectralField2::constant(g, 1.0).solve_neg_laplacian_h(1.0, tol),
        Err(Error::NonzeroMeanRHS { .. })
    ) {
        failures.push("Poisson problem with nonzero mean was accepted");
    }
    let mut low = CPEState::rest(&p);
    low.rho = SpectralField2::constant(g, 0.4 * p.rho0);
    if !matches!(low.check_density(&p), Err(Error::DensityOutOfBounds { .. })) {
        failures.push("density below rho0/2 was accepted");
    }
    let bad = lowmach_core::Params {
        lambda: 5.0 * p.mu,
        ..p
    };
    if bad.validate().is_ok() {
        failures.push("lambda >= 4 mu was accepted");
    }
    Ok((
        failures.is_empty(),
        if failures.is_empty() {
            "all rejected".into()
        } else {
            failures.join("; ")
        },
    ))
}

/// Decay of the PE energy over the configured horizon. Informational: it only
/// fails if the energy grows.
fn decay(cfg: &ExperimentConfig) -> Outcome {
    let p = cfg.params_for(cfg.eps_list[0]);
    let times = cfg.output_times();
    let mut s = PEState {
        v: initial_velocity(cfg).map_err(|e| e.to_string())?,
        t: 0.0,
    };
    if times.len() < 3 || s.l2_sq() == 0.0 {
        return Ok((true, "skipped: no decay to fit".into()));
    }
    let (mut ts, mut ys) = (vec![0.0], vec![s.l2_sq()]);
    for &t in &times[1..] {
        s = advance_pe(s, t, &p, |_| {}).map_err(err)?.0;
        ts.push(t);
        ys.push(s.l2_sq());
    }
    let f: LinearFit = fit_semilog_slope(&ts, &ys).map_err(err)?;
    Ok((f.slope <= 0.0, format!("rate {:.3}, r2 {:.4}", f.slope, f.r2)))
}

/// Run every check against `cfg`.
pub fn verify(cfg: &ExperimentConfig) -> Vec<Check> {
    let mut out = vec![check("config", || config(cfg))];
    if cfg.eps_list.is_empty() {
        return out;
    }
    out.push(check("round-trip", || round_trip(cfg)));
    out.push(check("parity", || parity(cfg)));
    out.push(check("conservation", || conservation(cfg)));
    out.push(check("energy-residual", || energy_residual(cfg)));
    out.push(check("oracle-elliptic", || elliptic(cfg)));
    out.push(check("boundaries", || boundaries(cfg)));
    out.push(check("decay", || decay(cfg)));
    out
}
