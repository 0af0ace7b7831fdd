use super::*;
use crate::cpe::{cpe_step, stable_dt};
use crate::model::zero_hvel;
use crate::pe::{pe_step, stable_dt_pe};
use crate::spectral::Grid;
use crate::wellprepared::{build_initial_states, sample_initial_velocity, IcFamily};
use core::f64::consts::PI;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::vec;
use std::vec::Vec;

fn params(n: usize, nz: usize, eps: f64) -> Params {
    Params::desk(eps).with_grid(Grid::new(n, n, nz).unwrap())
}

fn field(p: &Params, f: impl Fn(f64, f64, f64) -> f64) -> SpectralField3 {
    SpectralField3::from_fn(p.grid, Parity::Even, f)
}

fn zero_view(p: &Params) -> PerturbationView {
    let z2 = SpectralField2::zeros(p.grid);
    PerturbationView {
        t: 0.0,
        eps: p.eps,
        rho1: z2.clone(),
        xi: z2.clone(),
        psi_h: zero_hvel(p.grid),
        psi_z: SpectralField3::zeros(p.grid, Parity::Odd),
        zeta: z2.clone(),
        xi_t: z2,
        psi_h_t: zero_hvel(p.grid),
    }
}

/// Midpoint rule over the slab.
fn quad(f: impl Fn(f64, f64, f64) -> f64) -> f64 {
    let (nh, nz) = (64, 32);
    let (hh, hz) = (2.0 * PI / nh as f64, 2.0 / nz as f64);
    let mut s = 0.0;
    for i in 0..nh {
        for j in 0..nh {
            for l in 0..nz {
                s += f((i as f64 + 0.5) * hh, (j as f64 + 0.5) * hh, (l as f64 + 0.5) * hz);
            }
        }
    }
    s * hh * hh * hz
}

fn perturbed_pair(p: &Params) -> (CPEState, PEState) {
    let v = sample_initial_velocity(IcFamily::BaroclinicTaylorGreen, 1.0, p.grid).unwrap();
    let (pe, mut cpe) = build_initial_states(&v, p).unwrap();
    cpe.rho = cpe.rho + SpectralField2::from_fn(p.grid, |x, y| 0.03 * (x - y).cos() + 0.02 * (2.0 * y).sin());
    cpe.v[0] = cpe.v[0].clone()
        + field(p, |x, y, z| {
            0.05 * (x + y).sin() * (2.0 * PI * z).cos() + 0.01 * y.cos()
        });
    cpe.v[1] = cpe.v[1].clone() + field(p, |x, _, z| 0.04 * (2.0 * x).cos() * (PI * z).cos());
    (cpe, pe)
}

#[test]
fn rest_states_give_zero_view() {
    let p = params(8, 8, 0.1);
    let v = perturbation_view(&CPEState::rest(&p), &PEState::rest(p.grid), &p).unwrap();
    assert_eq!(energy_e(&v).total(), 0.0);
    assert_eq!(dissipation_d(&v).total(), 0.0);
    assert_eq!(v.psi_z.sobolev_norm(0), 0.0);
}

#[test]
fn ansatz_state_has_zero_perturbation() {
    let p = params(16, 8, 0.1);
    let v = sample_initial_velocity(IcFamily::BarotropicVortex, 1.0, p.grid).unwrap();
    let (pe, cpe) = build_initial_states(&v, &p).unwrap();
    let view = perturbation_view(&cpe, &pe, &p).unwrap();
    assert!(view.rho1.sobolev_norm(0) > 0.1);
    assert!(view.xi.sobolev_norm(2) < 1e-15);
    assert_eq!(hvel_sobolev_sq(&view.psi_h, 2), 0.0);
    let back = view.reconstruct_rho(p.rho0);
    let diff = back
        .coeffs()
        .iter()
        .zip(cpe.rho.coeffs())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(diff < 1e-12);
}

#[test]
fn reconstruction_identity_for_perturbed_state() {
    let p = params(16, 8, 0.2);
    let (cpe, pe) = perturbed_pair(&p);
    let view = perturbation_view(&cpe, &pe, &p).unwrap();
    let back = view.reconstruct_rho(p.rho0);
    let diff = back
        .coeffs()
        .iter()
        .zip(cpe.rho.coeffs())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(diff < 1e-12);
}

#[test]
fn two_routes_to_psi_z_agree() {
    let p = params(16, 16, 0.2);
    let (cpe, pe) = perturbed_pair(&p);
    let view = perturbation_view(&cpe, &pe, &p).unwrap();
    let closed = psi_z_closed_form(&cpe, &pe, &p).unwrap();
    assert!(view.psi_z.sobolev_norm(0) > 1e-3);
    assert!((closed - &view.psi_z).sobolev_norm(0) < 1e-10);
}

#[test]
fn mismatched_pairs_are_rejected() {
    let p = params(8, 8, 0.1);
    let mut pe = PEState::rest(p.grid);
    pe.t = 0.5;
    assert_eq!(
        perturbation_view(&CPEState::rest(&p), &pe, &p),
        Err(Error::TimeMismatch(0.0, 0.5))
    );
    let other = PEState::rest(Grid::new(8, 8, 4).unwrap());
    assert_eq!(
        convergence_metrics(&CPEState::rest(&p), &other, &p),
        Err(Error::GridMismatch)
    );
}

#[test]
fn energy_of_single_mode_matches_quadrature() {
    let p = params(8, 8, 0.1);
    let mut view = zero_view(&p);
    view.psi_h[0] = field(&p, |x, _, _| x.sin());
    // ‖sin x‖²_{H²} = (1 + 1)² ∫ sin²x
    let want = 4.0 * quad(|x, _, _| x.sin().powi(2));
    let e = energy_e(&view);
    assert!((e.total() - want).abs() < 1e-10 * want, "{} vs {want}", e.total());
    assert_eq!(e.psi_h2, e.total());
}

#[test]
fn dissipation_of_single_mode_matches_quadrature() {
    let p = params(8, 8, 0.1);
    let mut view = zero_view(&p);
    view.psi_h[0] = field(&p, |x, _, z| x.sin() * (PI * z).cos());
    let k2 = 1.0 + PI * PI;
    let grad_l2 = quad(|x, _, z| (x.cos() * (PI * z).cos()).powi(2) + (PI * x.sin() * (PI * z).sin()).powi(2));
    let want = (1.0 + k2).powi(2) * grad_l2;
    let d = dissipation_d(&view);
    assert!((d.grad_psi_h2 - want).abs() < 1e-10 * want);
    assert_eq!(d.total(), d.grad_psi_h2);
}

#[test]
fn functionals_are_quadratic_and_nonnegative() {
    let p = params(8, 8, 0.3);
    let mut view = zero_view(&p);
    view.xi = SpectralField2::from_fn(p.grid, |x, y| (x + y).cos());
    view.xi_t = SpectralField2::from_fn(p.grid, |x, _| x.sin());
    view.psi_h_t[1] = field(&p, |_, y, z| y.cos() * (PI * z).cos());
    let e1 = energy_e(&view);
    let d1 = dissipation_d(&view);
    // ‖ε⁻¹ξ‖²_{H²} with |k|² = 2
    let xi_sq = quad(|x, y, _| (x + y).cos().powi(2));
    assert!((e1.xi_h2 - 9.0 * xi_sq / (p.eps * p.eps)).abs() < 1e-10 * e1.xi_h2);
    assert!((d1.grad_xi_h1 - 2.0 * 3.0 * xi_sq / (p.eps * p.eps)).abs() < 1e-10 * d1.grad_xi_h1);
    view.xi = view.xi * 2.0;
    let e2 = energy_e(&view);
    assert!((e2.xi_h2 - 4.0 * e1.xi_h2).abs() < 1e-12 * e2.xi_h2);
    assert_eq!(e2.eps_psit_l2, e1.eps_psit_l2);
    for x in [e1.total(), d1.total(), e1.eps_psit_l2, d1.eps_psit_h1, e1.xit_l2] {
        assert!(x > 0.0);
    }
}

#[test]
fn conservation_examples() {
    let p = params(8, 8, 0.1);
    let c = conservation_report(&CPEState::rest(&p));
    assert!((c.mass - 8.0 * PI * PI).abs() < 1e-12);
    assert_eq!(c.momentum, [0.0, 0.0]);
    let s = CPEState {
        rho: SpectralField2::from_fn(p.grid, |x, _| 1.0 + 0.1 * x.cos()),
        v: [
            field(&p, |x, _, _| x.cos()),
            SpectralField3::zeros(p.grid, Parity::Even),
        ],
        t: 0.0,
    };
    let c = conservation_report(&s);
    let want = quad(|x, _, _| (1.0 + 0.1 * x.cos()) * x.cos());
    assert!((c.momentum[0] - want).abs() < 1e-10 * want);
    assert!((c.momentum[0] - 0.1 * p.grid.volume() / 2.0).abs() < 1e-12 * want);
}

fn heat_history(p: &Params, dt: f64, steps: usize) -> Vec<PEState> {
    let v = sample_initial_velocity(IcFamily::HeatMode, 0.5, p.grid).unwrap();
    let mut h = vec![PEState { v, t: 0.0 }];
    for _ in 0..steps {
        let next = pe_step(h.last().unwrap(), dt, p).unwrap();
        h.push(next);
    }
    h
}

#[test]
fn energy_residual_examples() {
    let p = params(8, 8, 0.1);
    let rest = vec![
        PEState::rest(p.grid),
        PEState {
            t: 0.1,
            ..PEState::rest(p.grid)
        },
    ];
    let r = pe_energy_residual(&rest, &p).unwrap();
    assert_eq!(r.series, vec![0.0]);
    assert!(matches!(
        pe_energy_residual(&rest[..1], &p),
        Err(Error::TooFewPoints { .. })
    ));
    let uneven: Vec<PEState> = [0.0, 0.1, 0.3]
        .iter()
        .map(|&t| PEState {
            t,
            ..PEState::rest(p.grid)
        })
        .collect();
    assert!(matches!(
        pe_energy_residual(&uneven, &p),
        Err(Error::NonuniformSpacing(_))
    ));

    let a = pe_energy_residual(&heat_history(&p, 0.004, 25), &p).unwrap();
    let b = pe_energy_residual(&heat_history(&p, 0.002, 50), &p).unwrap();
    assert_eq!(a.max, a.series.iter().fold(0.0, |m: f64, x| m.max(x.abs())));
    let order = (a.accumulated / b.accumulated).log2();
    assert!((order - 2.0).abs() < 0.1, "order {order}");
    assert!((a.max / b.max).log2() > 1.9);
}

#[test]
fn convergence_metrics_examples() {
    let p = params(8, 16, 0.1);
    assert_eq!(
        convergence_metrics(&CPEState::rest(&p), &PEState::rest(p.grid), &p).unwrap(),
        ConvergenceMetrics::default()
    );

    // heat mode is an exact solution of both systems
    let v = sample_initial_velocity(IcFamily::HeatMode, 0.2, p.grid).unwrap();
    let (mut pe, mut cpe) = build_initial_states(&v, &p).unwrap();
    assert_eq!(
        convergence_metrics(&cpe, &pe, &p).unwrap(),
        ConvergenceMetrics::default()
    );
    let dt = stable_dt(&cpe, &p).unwrap().min(stable_dt_pe(&pe, &p).unwrap());
    for _ in 0..20 {
        cpe = cpe_step(&cpe, dt, &p).unwrap();
        pe = pe_step(&pe, dt, &p).unwrap();
    }
    let m = convergence_metrics(&cpe, &pe, &p).unwrap();
    assert!(m.v_h2 < 1e-12 && m.rho_h2 < 1e-14 && m.w_h1 < 1e-14, "{m:?}");

    // swapping the sign of a velocity perturbation leaves the norms unchanged
    let p = params(16, 8, 0.1);
    let (mut cpe, pe) = perturbed_pair(&p);
    cpe.rho = SpectralField2::constant(p.grid, p.rho0);
    let flip = |s: &CPEState| CPEState {
        v: [pe.v[0].clone() * 2.0 - &s.v[0], pe.v[1].clone() * 2.0 - &s.v[1]],
        ..s.clone()
    };
    let m1 = convergence_metrics(&cpe, &pe, &p).unwrap();
    let m2 = convergence_metrics(&flip(&cpe), &pe, &p).unwrap();
    assert!((m1.v_h2 - m2.v_h2).abs() < 1e-12 * m1.v_h2);
    assert!((m1.w_h1 - m2.w_h1).abs() < 1e-12 * m1.w_h1);
    assert_eq!(m1.rho_h2, 0.0);
}

#[test]
fn report_rows_are_consistent() {
    let p = params(16, 8, 0.2);
    let (cpe, pe) = perturbed_pair(&p);
    let r = energy_report(&cpe, &pe, &p).unwrap();
    let m = convergence_metrics(&cpe, &pe, &p).unwrap();
    assert_eq!(r.convergence, m);
    assert_eq!(r.pe_l2_sq, pe.l2_sq());
    assert!(r.energy.total() > 0.0 && r.dissipation.total() > 0.0);
    assert_eq!(r.mass, conservation_report(&cpe).mass);
}

#[test]
fn log_fits_of_exact_power_laws() {
    let xs = [0.1, 0.05, 0.025, 0.0125];
    let lin: Vec<f64> = xs.iter().map(|x| 3.0 * x).collect();
    let f = fit_log_slope(&xs, &lin).unwrap();
    assert!((f.slope - 1.0).abs() < 1e-12 && (f.r2 - 1.0).abs() < 1e-12);
    assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
    let quad: Vec<f64> = xs.iter().map(|x| 0.5 * x * x).collect();
    assert!((fit_log_slope(&xs, &quad).unwrap().slope - 2.0).abs() < 1e-12);

    let ts = [0.0f64, 0.5, 1.0, 1.5];
    let decay: Vec<f64> = ts.iter().map(|t| 2.0 * (-3.0 * *t).exp()).collect();
    let d = fit_semilog_slope(&ts, &decay).unwrap();
    assert!((d.slope + 3.0).abs() < 1e-12);
}

#[test]
fn log_fit_of_noisy_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let xs: Vec<f64> = (0..8).map(|i| 0.2 * 0.5f64.powi(i)).collect();
    for _ in 0..50 {
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| 2.0 * x * (1.0 + rng.random_range(-0.05..0.05)))
            .collect();
        let f = fit_log_slope(&xs, &ys).unwrap();
        assert!((0.9..=1.1).contains(&f.slope), "{f:?}");
    }
}

#[test]
fn log_fit_errors() {
    assert_eq!(
        fit_log_slope(&[1.0, 2.0], &[1.0, 0.0]),
        Err(Error::NonpositiveData(0.0))
    );
    assert!(matches!(fit_log_slope(&[1.0], &[1.0]), Err(Error::TooFewPoints { .. })));
    assert!(matches!(
        fit_line(&[1.0, 1.0], &[1.0, 2.0]),
        Err(Error::InvalidParams(_))
    ));
}
