//! Three-stage, third-order strong-stability-preserving Runge-Kutta
//! (Shu-Osher form).

use crate::error::Result;
use crate::spectral::{HVel, SpectralField2};

pub(crate) trait LinComb: Sized {
    /// `a·self + b·x`
    fn lincomb(self, a: f64, b: f64, x: &Self) -> Self;
}

impl LinComb for HVel {
    fn lincomb(self, a: f64, b: f64, x: &Self) -> Self {
        let [u, v] = self;
        [(u * a).axpy(b, &x[0]), (v * a).axpy(b, &x[1])]
    }
}

impl LinComb for (SpectralField2, HVel) {
    fn lincomb(self, a: f64, b: f64, x: &Self) -> Self {
        ((self.0 * a).axpy(b, &x.0), self.1.lincomb(a, b, &x.1))
    }
}

/// Advance `u` by `dt`; `project` is applied to every stage value.
pub(crate) fn ssp_rk3<U: LinComb + Clone>(
    u: &U,
    dt: f64,
    mut rhs: impl FnMut(&U) -> Result<U>,
    mut project: impl FnMut(U) -> U,
) -> Result<U> {
    let k0 = rhs(u)?;
    let u1 = project(u.clone().lincomb(1.0, dt, &k0));
    let k1 = rhs(&u1)?;
    let u2 = project(u1.lincomb(1.0, dt, &k1).lincomb(0.25, 0.75, u));
    let k2 = rhs(&u2)?;
    let u3 = project(u2.lincomb(1.0, dt, &k2).lincomb(2.0 / 3.0, 1.0 / 3.0, u));
    Ok(u3)
}
