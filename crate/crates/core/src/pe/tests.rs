use super::*;
use crate::spectral::tests::dense_solve;
use crate::spectral::{grad_h2, hvel_sobolev_sq};
use core::f64::consts::PI;
use std::vec::Vec;

fn params(n: usize, nz: usize) -> Params {
    Params::desk(0.1).with_grid(Grid::new(n, n, nz).unwrap())
}

fn field(p: &Params, f: impl Fn(f64, f64, f64) -> f64) -> SpectralField3 {
    SpectralField3::from_fn(p.grid, Parity::Even, f)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn heat_mode(p: &Params, amp: f64) -> HVel {
    [
        field(p, |_, _, z| amp * (PI * z).cos()),
        SpectralField3::zeros(p.grid, Parity::Even),
    ]
}

#[test]
fn w_from_baroclinic_shear() {
    let p = params(8, 16);
    let v = [
        field(&p, |x, _, z| (PI * z).cos() * x.sin()),
        SpectralField3::zeros(p.grid, Parity::Even),
    ];
    let w = diagnose_w_pe(&v, &p).unwrap();
    assert_eq!(w.parity(), Parity::Odd);
    let want: Vec<f64> = p
        .grid
        .points3()
        .map(|(x, _, z)| -(PI * z).sin() * x.cos() / PI)
        .collect();
    assert!(max_diff(&w.to_samples(), &want) < 1e-14);
}

#[test]
fn w_vanishes_for_z_only_flow_and_rejects_barotropic_divergence() {
    let p = params(8, 8);
    let v = [
        field(&p, |_, _, z| (PI * z).cos() + 0.2),
        field(&p, |_, _, z| (2.0 * PI * z).cos()),
    ];
    let w = diagnose_w_pe(&v, &p).unwrap();
    assert!(w.sobolev_norm(0) == 0.0);

    let bad = [
        field(&p, |x, _, _| x.sin()),
        SpectralField3::zeros(p.grid, Parity::Even),
    ];
    assert!(matches!(
        diagnose_w_pe(&bad, &p),
        Err(Error::NonzeroVerticalMean { .. })
    ));
}

#[test]
fn leray_projection_examples() {
    let p = params(8, 8);
    let solenoidal = [field(&p, |_, y, _| y.sin()), field(&p, |x, _, _| x.sin())];
    assert!(div_h(&solenoidal).sobolev_norm(0) < 1e-14);
    assert_eq!(leray_project_barotropic(&solenoidal), solenoidal);

    // ∇_h cos x
    let grad = [
        field(&p, |x, _, _| -x.sin()),
        SpectralField3::zeros(p.grid, Parity::Even),
    ];
    let out = leray_project_barotropic(&grad);
    assert!(hvel_sobolev_sq(&out, 0) < 1e-28);

    // baroclinic part is untouched, mean preserved
    let mixed = [
        field(&p, |x, y, z| x.cos() + (x + y).sin() * (PI * z).cos() + 0.3),
        field(&p, |_, y, _| y.sin()),
    ];
    let out = leray_project_barotropic(&mixed);
    assert_eq!(out[0].baroclinic(), mixed[0].baroclinic());
    assert_eq!(out[0].mean(), mixed[0].mean());
    assert!(div_h(&out).vertical_average().unwrap().sobolev_norm(0) < 1e-14);
    let again = leray_project_barotropic(&out);
    assert!((again[0].clone() - &out[0]).sobolev_norm(0) < 1e-15);
    assert!((again[1].clone() - &out[1]).sobolev_norm(0) < 1e-15);
}

#[test]
fn rhs_of_rest_is_zero() {
    let p = params(8, 8);
    let s = PEState::rest(p.grid);
    let d = pe_rhs(&s, &p).unwrap();
    assert_eq!(hvel_sobolev_sq(&d.dv, 0), 0.0);
}

#[test]
fn rhs_of_heat_mode_is_pure_vertical_diffusion() {
    let p = Params {
        rho0: 1.7,
        ..params(8, 16)
    };
    let v = heat_mode(&p, 0.1);
    let d = pe_rhs(&PEState { v: v.clone(), t: 0.0 }, &p).unwrap();
    let want = v[0].clone() * (-PI * PI / p.rho0);
    assert!(max_diff(&d.dv[0].to_samples(), &want.to_samples()) < 1e-14);
    assert!(d.dv[1].sobolev_norm(0) < 1e-15);
    // ∂_zz coefficient against a centered second difference
    let h = 1e-4;
    let z = 0.3;
    let fd = ((PI * (z + h)).cos() - 2.0 * (PI * z).cos() + (PI * (z - h)).cos()) / (h * h);
    assert!((fd / (PI * z).cos() + PI * PI).abs() < 1e-5);
}

/// Finite-difference evaluation of the unprojected PE right-hand side of an
/// analytic field, with `w` from Simpson quadrature of the FD divergence.
fn fd_rhs(p: &Params, u: &dyn Fn(f64, f64, f64) -> f64, v: &dyn Fn(f64, f64, f64) -> f64, h: f64) -> [Vec<f64>; 2] {
    let dx = |f: &dyn Fn(f64, f64, f64) -> f64, x: f64, y: f64, z: f64| (f(x + h, y, z) - f(x - h, y, z)) / (2.0 * h);
    let dy = |f: &dyn Fn(f64, f64, f64) -> f64, x: f64, y: f64, z: f64| (f(x, y + h, z) - f(x, y - h, z)) / (2.0 * h);
    let dz = |f: &dyn Fn(f64, f64, f64) -> f64, x: f64, y: f64, z: f64| (f(x, y, z + h) - f(x, y, z - h)) / (2.0 * h);
    let d2 = |f: &dyn Fn(f64, f64, f64) -> f64, x: f64, y: f64, z: f64, e: [f64; 3]| {
        (f(x + e[0] * h, y + e[1] * h, z + e[2] * h) - 2.0 * f(x, y, z) + f(x - e[0] * h, y - e[1] * h, z - e[2] * h))
            / (h * h)
    };
    let dxy = |f: &dyn Fn(f64, f64, f64) -> f64, x: f64, y: f64, z: f64| {
        (f(x + h, y + h, z) - f(x + h, y - h, z) - f(x - h, y + h, z) + f(x - h, y - h, z)) / (4.0 * h * h)
    };
    let div = |x: f64, y: f64, z: f64| dx(u, x, y, z) + dy(v, x, y, z);
    let w = |x: f64, y: f64, z: f64| {
        let n = 200;
        let s = z / n as f64;
        let mut acc = div(x, y, 0.0) + div(x, y, z);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * div(x, y, i as f64 * s);
        }
        -acc * s / 3.0
    };
    let mut out = [Vec::new(), Vec::new()];
    for (x, y, z) in p.grid.points3() {
        let (uu, vv, ww) = (u(x, y, z), v(x, y, z), w(x, y, z));
        let lap_u = d2(u, x, y, z, [1.0, 0.0, 0.0]) + d2(u, x, y, z, [0.0, 1.0, 0.0]);
        let lap_v = d2(v, x, y, z, [1.0, 0.0, 0.0]) + d2(v, x, y, z, [0.0, 1.0, 0.0]);
        let gdiv_x = d2(u, x, y, z, [1.0, 0.0, 0.0]) + dxy(v, x, y, z);
        let gdiv_y = dxy(u, x, y, z) + d2(v, x, y, z, [0.0, 1.0, 0.0]);
        let visc_u = p.mu * lap_u + p.lambda * gdiv_x + d2(u, x, y, z, [0.0, 0.0, 1.0]);
        let visc_v = p.mu * lap_v + p.lambda * gdiv_y + d2(v, x, y, z, [0.0, 0.0, 1.0]);
        let adv_u = uu * dx(u, x, y, z) + vv * dy(u, x, y, z) + ww * dz(u, x, y, z);
        let adv_v = uu * dx(v, x, y, z) + vv * dy(v, x, y, z) + ww * dz(v, x, y, z);
        out[0].push(visc_u / p.rho0 - adv_u);
        out[1].push(visc_v / p.rho0 - adv_v);
    }
    out
}

#[test]
fn rhs_matches_finite_differences_to_second_order() {
    let p = Params {
        mu: 0.8,
        lambda: 0.5,
        rho0: 1.3,
        ..params(16, 16)
    };
    let a = 0.3;
    let u = move |x: f64, y: f64, z: f64| a * x.sin() * y.cos() * (PI * z).cos();
    let v = move |x: f64, y: f64, z: f64| 0.5 * a * x.cos() * (2.0 * y).sin() * (PI * z).cos();
    let s = PEState {
        v: [field(&p, u), field(&p, v)],
        t: 0.0,
    };
    assert!(diagnose_w_pe(&s.v, &p).unwrap().sobolev_norm(0) > 0.01);
    let spectral = pe_rhs_unprojected(&s, &p).unwrap();
    let spectral = [spectral[0].to_samples(), spectral[1].to_samples()];
    let h = p.grid.dx_min() / 4.0;
    let errs: Vec<f64> = [h, h / 2.0]
        .iter()
        .map(|&hh| {
            let fd = fd_rhs(&p, &u, &v, hh);
            max_diff(&spectral[0], &fd[0]).max(max_diff(&spectral[1], &fd[1]))
        })
        .collect();
    assert!(errs[0] < 0.05, "{errs:?}");
    let order = (errs[0] / errs[1]).log2();
    assert!((order - 2.0).abs() < 0.1, "observed order {order}, errors {errs:?}");
}

#[test]
fn projection_removes_exactly_the_pressure_gradient() {
    let p = params(16, 16);
    let s = PEState {
        v: leray_project_barotropic(&[
            field(&p, |x, y, z| x.sin() * y.cos() * (PI * z).cos() + 0.4 * (2.0 * y).sin()),
            field(&p, |x, y, z| {
                -x.cos() * y.sin() * (PI * z).cos() + 0.3 * x.sin() * (2.0 * PI * z).cos()
            }),
        ]),
        t: 0.0,
    };
    let raw = pe_rhs_unprojected(&s, &p).unwrap();
    let proj = pe_rhs(&s, &p).unwrap().dv;
    let rho1 = diagnose_pressure_rho1(&s, &p).unwrap();
    let grad = grad_h2(&(rho1 * (sound_speed_sq(&p) / p.rho0)));
    for c in 0..2 {
        let removed = raw[c].clone() - &proj[c];
        let want = SpectralField3::from_horizontal(&grad[c]);
        assert!(max_diff(&removed.to_samples(), &want.to_samples()) < 1e-12);
    }
}

#[test]
fn step_keeps_rest_at_rest() {
    let p = params(8, 8);
    let s = PEState::rest(p.grid);
    let n = pe_step(&s, 1e-3, &p).unwrap();
    assert_eq!(hvel_sobolev_sq(&n.v, 0), 0.0);
    assert!((n.t - 1e-3).abs() < 1e-18);
}

#[test]
fn step_rejects_unstable_dt() {
    let p = params(8, 8);
    let s = PEState {
        v: heat_mode(&p, 0.1),
        t: 0.0,
    };
    let limit = stable_dt_pe(&s, &p).unwrap();
    assert!(matches!(pe_step(&s, 2.0 * limit, &p), Err(Error::CFLViolation { .. })));
    assert!(matches!(pe_step(&s, 0.0, &p), Err(Error::CFLViolation { .. })));
}

fn heat_error(p: &Params, dt: f64, steps: usize) -> f64 {
    let amp = 0.1;
    let mut s = PEState {
        v: heat_mode(p, amp),
        t: 0.0,
    };
    for _ in 0..steps {
        s = pe_step(&s, dt, p).unwrap();
    }
    let decay = (-PI * PI * s.t / p.rho0).exp();
    let exact = heat_mode(p, amp * decay);
    (s.v[0].clone() - &exact[0]).sobolev_norm(0) / exact[0].sobolev_norm(0)
}

#[test]
fn heat_mode_local_error_is_fourth_order() {
    let p = params(8, 16);
    let dt = stable_dt_pe(
        &PEState {
            v: heat_mode(&p, 0.1),
            t: 0.0,
        },
        &p,
    )
    .unwrap();
    let e1 = heat_error(&p, dt, 1);
    let e2 = heat_error(&p, dt / 2.0, 1);
    // RK3 local error (π²dt)⁴/24
    let z = PI * PI * dt / p.rho0;
    assert!(e1 < 1.1 * z.powi(4) / 24.0, "{e1}");
    assert!((e1 / e2).log2() > 3.8, "{e1} {e2}");
}

#[test]
fn heat_mode_global_error_is_third_order() {
    let p = params(8, 16);
    let t_end = 0.1;
    let errs: Vec<f64> = [100usize, 200, 400]
        .iter()
        .map(|&n| heat_error(&p, t_end / n as f64, n))
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((6.5..9.5).contains(&ratio), "{errs:?}");
    }
}

#[test]
fn pressure_of_rest_and_heat_mode_vanishes() {
    let p = params(8, 8);
    assert_eq!(
        diagnose_pressure_rho1(&PEState::rest(p.grid), &p)
            .unwrap()
            .sobolev_norm(0),
        0.0
    );
    let s = PEState {
        v: heat_mode(&p, 0.5),
        t: 0.0,
    };
    assert!(diagnose_pressure_rho1(&s, &p).unwrap().sobolev_norm(0) < 1e-15);
}

#[test]
fn pressure_of_cellular_flow_matches_dense_solve() {
    let p = Params {
        rho0: 1.5,
        ..params(8, 4)
    };
    let s = PEState {
        v: [field(&p, |_, y, _| y.sin()), field(&p, |x, _, _| x.sin())],
        t: 0.0,
    };
    let rho1 = diagnose_pressure_rho1(&s, &p).unwrap();
    let cs2 = sound_speed_sq(&p);
    // div_h div_h(v⊗v) = 2 cos x cos y, analytically
    let src: Vec<f64> = p
        .grid
        .points2()
        .map(|(x, y)| p.rho0 * 2.0 * x.cos() * y.cos())
        .collect();
    let dense = dense_solve(8, cs2, &src);
    assert!(max_diff(&rho1.to_samples(), &dense) < 1e-12);
    let closed: Vec<f64> = p
        .grid
        .points2()
        .map(|(x, y)| p.rho0 * x.cos() * y.cos() / cs2)
        .collect();
    assert!(max_diff(&rho1.to_samples(), &closed) < 1e-14);
    assert!(rho1.mean().abs() < 1e-17);
}

#[test]
fn rho1_t_of_trivial_inputs_vanishes() {
    let p = params(8, 8);
    let s = PEState::rest(p.grid);
    let d = pe_rhs(&s, &p).unwrap();
    assert_eq!(diagnose_rho1_t(&s, &d, &p).unwrap().sobolev_norm(0), 0.0);
    let s = PEState {
        v: [field(&p, |_, y, _| y.sin()), field(&p, |x, _, _| x.sin())],
        t: 0.0,
    };
    let zero = PETendency {
        dv: crate::model::zero_hvel(p.grid),
    };
    assert_eq!(diagnose_rho1_t(&s, &zero, &p).unwrap().sobolev_norm(0), 0.0);
}

#[test]
fn rho1_t_of_single_modes_matches_dense_solve() {
    let p = params(8, 4);
    let s = PEState {
        v: [
            field(&p, |_, y, _| y.sin()),
            SpectralField3::zeros(p.grid, Parity::Even),
        ],
        t: 0.0,
    };
    let dv = PETendency {
        dv: [
            SpectralField3::zeros(p.grid, Parity::Even),
            field(&p, |x, _, _| x.sin()),
        ],
    };
    let r = diagnose_rho1_t(&s, &dv, &p).unwrap();
    // 2ρ₀ ∂_x∂_y(sin y sin x) = 2ρ₀ cos x cos y
    let src: Vec<f64> = p
        .grid
        .points2()
        .map(|(x, y)| 2.0 * p.rho0 * x.cos() * y.cos())
        .collect();
    let cs2 = sound_speed_sq(&p);
    assert!(max_diff(&r.to_samples(), &dense_solve(8, cs2, &src)) < 1e-12);
    let closed: Vec<f64> = p
        .grid
        .points2()
        .map(|(x, y)| p.rho0 * x.cos() * y.cos() / cs2)
        .collect();
    assert!(max_diff(&r.to_samples(), &closed) < 1e-14);
}

#[test]
fn rho1_t_matches_centered_difference_along_trajectory() {
    let p = params(16, 8);
    let v0 = leray_project_barotropic(&[
        field(&p, |x, y, z| x.sin() * y.cos() * (PI * z).cos() + 0.5 * (2.0 * y).sin()),
        field(&p, |x, y, z| -x.cos() * y.sin() * (PI * z).cos() + 0.5 * x.sin()),
    ]);
    let s0 = PEState { v: v0, t: 0.0 };
    let h_big = 2e-3;
    let mut errs = Vec::new();
    for h in [h_big, h_big / 2.0] {
        let steps = 8;
        let dt = h / steps as f64;
        let march = |mut s: PEState| {
            for _ in 0..steps {
                s = pe_step(&s, dt, &p).unwrap();
            }
            s
        };
        let s_mid = march(s0.clone());
        let s_end = march(s_mid.clone());
        // centered at t = h using states at 0 and 2h
        let r0 = diagnose_pressure_rho1(&s0, &p).unwrap();
        let r2 = diagnose_pressure_rho1(&s_end, &p).unwrap();
        let fd = (r2 - &r0) * (1.0 / (2.0 * h));
        let d = pe_rhs(&s_mid, &p).unwrap();
        let exact = diagnose_rho1_t(&s_mid, &d, &p).unwrap();
        errs.push((fd - &exact).sobolev_norm(0) / exact.sobolev_norm(0));
    }
    assert!(errs[0] < 1e-3, "{errs:?}");
    let order = (errs[0] / errs[1]).log2();
    assert!(order > 1.8, "order {order}, {errs:?}");
}

#[test]
fn long_run_invariants() {
    let p = params(16, 8);
    let mut s = PEState {
        v: leray_project_barotropic(&[
            field(&p, |x, y, z| x.sin() * y.cos() * (PI * z).cos() + 0.3 * (2.0 * y).sin()),
            field(&p, |x, y, z| {
                -x.cos() * y.sin() * (PI * z).cos() + 0.2 * (x + y).cos() * (2.0 * PI * z).cos()
            }),
        ]),
        t: 0.0,
    };
    let mut e_prev = s.l2_sq();
    for _ in 0..200 {
        let dt = stable_dt_pe(&s, &p).unwrap();
        s = pe_step(&s, dt, &p).unwrap();
        let e = s.l2_sq();
        assert!(e <= e_prev * (1.0 + 1e-10), "energy grew: {e_prev} -> {e}");
        e_prev = e;
        let m = s.momentum();
        assert!(m[0].abs() < 1e-12 && m[1].abs() < 1e-12);
        assert!(div_h(&s.v).vertical_average().unwrap().sobolev_norm(0) < 1e-10);
        assert!(s.v[0].parity_contamination() < 1e-12);
    }
    let w = diagnose_w_pe(&s.v, &p).unwrap();
    let g = p.grid;
    for i in 0..g.nx() {
        for j in 0..g.ny() {
            // sine representation: c(-m) = -c(m) bitwise, c(0) = c(nz/2) = 0
            assert_eq!(w.coeffs()[g.idx3(i, j, 0)].norm(), 0.0);
            assert_eq!(w.coeffs()[g.idx3(i, j, g.nz() / 2)].norm(), 0.0);
            for l in 1..g.nz() {
                assert_eq!(w.coeffs()[g.idx3(i, j, l)], -w.coeffs()[g.idx3(i, j, g.mirror_z(l))]);
            }
        }
    }
}
