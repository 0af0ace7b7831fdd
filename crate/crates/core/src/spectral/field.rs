use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use super::fft::transform_nd;
use super::grid::{Axis, Grid};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Symmetry of a 3-D field under `z ↦ -z`.
///
/// Horizontal velocities are `Even` (cosine series in z), vertical velocities
/// are `Odd` (sine series). `Mixed` marks a field with no declared symmetry,
/// e.g. arbitrary samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn flipped(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::Mixed => Parity::Mixed,
        }
    }

    /// Parity of a pointwise product.
    pub fn product(self, other: Parity) -> Parity {
        match (self, other) {
            (Parity::Mixed, _) | (_, Parity::Mixed) => Parity::Mixed,
            (a, b) if a == b => Parity::Even,
            _ => Parity::Odd,
        }
    }

    fn sum(self, other: Parity) -> Parity {
        if self == other {
            self
        } else {
            Parity::Mixed
        }
    }
}

/// Three-dimensional real field stored as Fourier coefficients.
///
/// Coefficients are normalized so that the `(0,0,0)` entry is the domain mean.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField3 {
    grid: Grid,
    parity: Parity,
    coeffs: Vec<Complex64>,
}

/// Horizontal field, constant in z. Density, `ξ` and `ρ₁` use this type so the
/// hydrostatic constraint `∂_z ρ = 0` holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField2 {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

/// Horizontal velocity `(u, v)`.
pub type HVel = [SpectralField3; 2];

fn forward(dims: &[usize], samples: &[f64]) -> Result<Vec<Complex64>> {
    let n: usize = dims.iter().product();
    if samples.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: samples.len(),
        });
    }
    let mut data: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    transform_nd(&mut data, dims, false);
    let scale = 1.0 / n as f64;
    for c in &mut data {
        *c *= scale;
    }
    Ok(data)
}

fn inverse(dims: &[usize], coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut data = coeffs.to_vec();
    transform_nd(&mut data, dims, true);
    data
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, x| m.max(x.abs()))
}

impl SpectralField3 {
    pub fn zeros(grid: Grid, parity: Parity) -> Self {
        SpectralField3 {
            grid,
            parity,
            coeffs: vec![ZERO; grid.len3()],
        }
    }

    /// Forward transform of physical samples (storage order of [`Grid::idx3`]).
    /// A pure parity is imposed by projection.
    pub fn from_samples(grid: Grid, parity: Parity, samples: &[f64]) -> Result<Self> {
        let coeffs = forward(&[grid.nx(), grid.ny(), grid.nz()], samples)?;
        Ok(SpectralField3 {
            grid,
            parity: Parity::Mixed,
            coeffs,
        }
        .parity_project(parity))
    }

    pub fn from_fn(grid: Grid, parity: Parity, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let samples: Vec<f64> = grid.points3().map(|(x, y, z)| f(x, y, z)).collect();
        Self::from_samples(grid, parity, &samples).expect("sample count matches grid")
    }

    pub fn from_parts(grid: Grid, parity: Parity, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len3() {
            return Err(Error::DimensionMismatch {
                expected: grid.len3(),
                got: coeffs.len(),
            });
        }
        Ok(SpectralField3 { grid, parity, coeffs })
    }

    /// z-independent 3-D field with the same horizontal content.
    pub fn from_horizontal(f: &SpectralField2) -> Self {
        let grid = f.grid;
        let mut out = Self::zeros(grid, Parity::Even);
        for (c2, col) in f.coeffs.iter().zip(out.coeffs.chunks_mut(grid.nz())) {
            col[0] = *c2;
        }
        out
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn parity(&self) -> Parity {
        self.parity
    }
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, kx: i64, ky: i64, m: i64) -> Complex64 {
        let g = &self.grid;
        self.coeffs[g.idx3(
            Grid::index_of(kx, g.nx()),
            Grid::index_of(ky, g.ny()),
            Grid::index_of(m, g.nz()),
        )]
    }

    pub fn set_coeff(&mut self, kx: i64, ky: i64, m: i64, value: Complex64) {
        let g = self.grid;
        let idx = g.idx3(
            Grid::index_of(kx, g.nx()),
            Grid::index_of(ky, g.ny()),
            Grid::index_of(m, g.nz()),
        );
        self.coeffs[idx] = value;
    }

    fn complex_samples(&self) -> Vec<Complex64> {
        inverse(&[self.grid.nx(), self.grid.ny(), self.grid.nz()], &self.coeffs)
    }

    /// Inverse transform; the imaginary round-off is discarded.
    pub fn to_samples(&self) -> Vec<f64> {
        self.complex_samples().into_iter().map(|c| c.re).collect()
    }

    /// Largest imaginary part of the inverse transform relative to the largest
    /// real part (zero for a Hermitian-symmetric field).
    pub fn imag_residue(&self) -> f64 {
        let s = self.complex_samples();
        let re = s.iter().fold(0.0f64, |m, c| m.max(c.re.abs()));
        let im = s.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
        if re == 0.0 {
            im
        } else {
            im / re
        }
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Spectral derivative. `∂_z` flips the parity; Nyquist modes are dropped.
    pub fn deriv(&self, axis: Axis) -> Self {
        let g = self.grid;
        let mut out = self.clone();
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                for l in 0..g.nz() {
                    let (k, nyq) = match axis {
                        Axis::X => (g.kx(i), Grid::is_nyquist(i, g.nx())),
                        Axis::Y => (g.ky(j), Grid::is_nyquist(j, g.ny())),
                        Axis::Z => (g.kz(l), Grid::is_nyquist(l, g.nz())),
                    };
                    let c = &mut out.coeffs[g.idx3(i, j, l)];
                    *c = if nyq { ZERO } else { *c * Complex64::new(0.0, k) };
                }
            }
        }
        if axis == Axis::Z {
            out.parity = self.parity.flipped();
        }
        out
    }

    /// Multiply each coefficient by a real symbol `s(kx, ky, kz)`.
    pub fn apply_symbol(&self, symbol: impl Fn(f64, f64, f64) -> f64) -> Self {
        let g = self.grid;
        let mut out = self.clone();
        for i in 0..g.nx() {
            let kx = g.kx(i);
            for j in 0..g.ny() {
                let ky = g.ky(j);
                for l in 0..g.nz() {
                    out.coeffs[g.idx3(i, j, l)] *= symbol(kx, ky, g.kz(l));
                }
            }
        }
        out
    }

    /// `Δ_h f`.
    pub fn laplacian_h(&self) -> Self {
        self.apply_symbol(|kx, ky, _| -(kx * kx + ky * ky))
    }

    /// `∂_zz f`.
    pub fn dzz(&self) -> Self {
        self.apply_symbol(|_, _, kz| -kz * kz)
    }

    /// `F(z) = ∫₀ᶻ f dz'` for an even field with vanishing vertical average.
    ///
    /// The `m = 0` slice would integrate to a term linear in z, which is not
    /// periodic, so its pointwise magnitude must be below `tol`.
    pub fn integrate_z_from_zero(&self, tol: f64) -> Result<Self> {
        if self.parity != Parity::Even {
            return Err(Error::ParityMismatch {
                expected: Parity::Even,
                got: self.parity,
            });
        }
        let avg = self.vertical_average()?;
        let max_abs = max_abs(&avg.to_samples());
        if !(max_abs <= tol) {
            return Err(Error::NonzeroVerticalMean { max_abs, tol });
        }
        let g = self.grid;
        let mut out = Self::zeros(g, Parity::Odd);
        for (src, dst) in self.coeffs.chunks(g.nz()).zip(out.coeffs.chunks_mut(g.nz())) {
            for l in 1..g.nz() {
                if Grid::is_nyquist(l, g.nz()) {
                    continue;
                }
                // even input: the constants c_m/(iπm) cancel pairwise, so F(0) = 0
                dst[l] = src[l] / Complex64::new(0.0, g.kz(l));
            }
        }
        Ok(out)
    }

    /// `f̄ = ∫₀¹ f dz`, which for an even field is the `m = 0` slice.
    pub fn vertical_average(&self) -> Result<SpectralField2> {
        if self.parity != Parity::Even {
            return Err(Error::ParityMismatch {
                expected: Parity::Even,
                got: self.parity,
            });
        }
        Ok(self.vertical_slice())
    }

    /// The `m = 0` slice regardless of parity (the full-period average).
    pub(crate) fn vertical_slice(&self) -> SpectralField2 {
        let g = self.grid;
        let coeffs = self.coeffs.chunks(g.nz()).map(|col| col[0]).collect();
        SpectralField2 { grid: g, coeffs }
    }

    /// `f̃ = f - f̄`.
    pub fn baroclinic(&self) -> Self {
        let mut out = self.clone();
        let nz = self.grid.nz();
        for col in out.coeffs.chunks_mut(nz) {
            col[0] = ZERO;
        }
        out
    }

    /// Replace the `m = 0` slice.
    pub fn set_barotropic(&mut self, f: &SpectralField2) {
        let nz = self.grid.nz();
        for (col, c) in self.coeffs.chunks_mut(nz).zip(&f.coeffs) {
            col[0] = *c;
        }
    }

    /// 2/3-rule truncation in all three directions.
    pub fn dealias(&mut self) {
        let g = self.grid;
        for i in 0..g.nx() {
            let bx = Grid::in_band(i, g.nx());
            for j in 0..g.ny() {
                let bxy = bx && Grid::in_band(j, g.ny());
                for l in 0..g.nz() {
                    if !(bxy && Grid::in_band(l, g.nz())) {
                        self.coeffs[g.idx3(i, j, l)] = ZERO;
                    }
                }
            }
        }
    }

    pub fn dealiased(mut self) -> Self {
        self.dealias();
        self
    }

    /// Symmetrize (`Even`) or antisymmetrize (`Odd`) the coefficients in m.
    /// `Mixed` leaves the coefficients alone and drops the label.
    pub fn parity_project(&self, parity: Parity) -> Self {
        let g = self.grid;
        let sign = match parity {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
            Parity::Mixed => {
                let mut out = self.clone();
                out.parity = Parity::Mixed;
                return out;
            }
        };
        let nz = g.nz();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for col in self.coeffs.chunks(nz) {
            for l in 0..nz {
                coeffs.push((col[l] + col[g.mirror_z(l)] * sign) * 0.5);
            }
        }
        SpectralField3 {
            grid: g,
            parity,
            coeffs,
        }
    }

    /// Norm of the component with the opposite symmetry relative to the full
    /// norm. Zero for a pure field; undefined (returns 0) for `Mixed`.
    pub fn parity_contamination(&self) -> f64 {
        let wrong = match self.parity {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::Mixed => return 0.0,
        };
        let total = self.sobolev_norm(0);
        if total == 0.0 {
            return 0.0;
        }
        self.parity_project(wrong).sobolev_norm(0) / total
    }

    /// Plancherel-normalized `H^s(Ω)` norm with weights `(1 + |k|²)^s`,
    /// `k = (kx, ky, π m)`.
    pub fn sobolev_norm(&self, s: u32) -> f64 {
        libm::sqrt(self.weighted_sq(|k2| powi(1.0 + k2, s)))
    }

    /// `Σ_k w(|k|²) |f̂_k|² · |Ω|`.
    pub fn weighted_sq(&self, weight: impl Fn(f64) -> f64) -> f64 {
        let g = self.grid;
        let mut acc = 0.0;
        for i in 0..g.nx() {
            let kx = g.kx(i);
            for j in 0..g.ny() {
                let ky = g.ky(j);
                for l in 0..g.nz() {
                    let kz = g.kz(l);
                    acc += weight(kx * kx + ky * ky + kz * kz) * self.coeffs[g.idx3(i, j, l)].norm_sqr();
                }
            }
        }
        acc * g.volume()
    }

    /// `∫_Ω f g` via Parseval.
    pub fn inner(&self, other: &Self) -> f64 {
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        s * self.grid.volume()
    }

    fn zip_with(mut self, rhs: &Self, f: impl Fn(&mut Complex64, Complex64)) -> Self {
        assert_eq!(self.grid, rhs.grid, "fields live on different grids");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            f(a, *b);
        }
        self.parity = self.parity.sum(rhs.parity);
        self
    }

    /// `self + a·x`
    pub fn axpy(self, a: f64, x: &Self) -> Self {
        self.zip_with(x, |s, xv| *s += xv * a)
    }
}

fn powi(x: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, _| acc * x)
}

impl Add<&SpectralField3> for SpectralField3 {
    type Output = SpectralField3;
    fn add(self, rhs: &SpectralField3) -> SpectralField3 {
        self.zip_with(rhs, |a, b| *a += b)
    }
}
impl Add for SpectralField3 {
    type Output = SpectralField3;
    fn add(self, rhs: SpectralField3) -> SpectralField3 {
        self + &rhs
    }
}
impl Sub<&SpectralField3> for SpectralField3 {
    type Output = SpectralField3;
    fn sub(self, rhs: &SpectralField3) -> SpectralField3 {
        self.zip_with(rhs, |a, b| *a -= b)
    }
}
impl Sub for SpectralField3 {
    type Output = SpectralField3;
    fn sub(self, rhs: SpectralField3) -> SpectralField3 {
        self - &rhs
    }
}
impl AddAssign<&SpectralField3> for SpectralField3 {
    fn add_assign(&mut self, rhs: &SpectralField3) {
        let lhs = core::mem::replace(
            self,
            SpectralField3 {
                grid: self.grid,
                parity: self.parity,
                coeffs: Vec::new(),
            },
        );
        *self = lhs + rhs;
    }
}
impl SubAssign<&SpectralField3> for SpectralField3 {
    fn sub_assign(&mut self, rhs: &SpectralField3) {
        let lhs = core::mem::replace(
            self,
            SpectralField3 {
                grid: self.grid,
                parity: self.parity,
                coeffs: Vec::new(),
            },
        );
        *self = lhs - rhs;
    }
}
impl Mul<f64> for SpectralField3 {
    type Output = SpectralField3;
    fn mul(mut self, a: f64) -> SpectralField3 {
        for c in &mut self.coeffs {
            *c *= a;
        }
        self
    }
}
impl Mul<f64> for &SpectralField3 {
    type Output = SpectralField3;
    fn mul(self, a: f64) -> SpectralField3 {
        self.clone() * a
    }
}
impl Neg for SpectralField3 {
    type Output = SpectralField3;
    fn neg(self) -> SpectralField3 {
        self * -1.0
    }
}

impl SpectralField2 {
    pub fn zeros(grid: Grid) -> Self {
        SpectralField2 {
            grid,
            coeffs: vec![ZERO; grid.len2()],
        }
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.coeffs[0] = Complex64::new(value, 0.0);
        f
    }

    pub fn from_samples(grid: Grid, samples: &[f64]) -> Result<Self> {
        let coeffs = forward(&[grid.nx(), grid.ny()], samples)?;
        Ok(SpectralField2 { grid, coeffs })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let samples: Vec<f64> = grid.points2().map(|(x, y)| f(x, y)).collect();
        Self::from_samples(grid, &samples).expect("sample count matches grid")
    }

    pub fn from_parts(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len2() {
            return Err(Error::DimensionMismatch {
                expected: grid.len2(),
                got: coeffs.len(),
            });
        }
        Ok(SpectralField2 { grid, coeffs })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, kx: i64, ky: i64) -> Complex64 {
        let g = &self.grid;
        self.coeffs[g.idx2(Grid::index_of(kx, g.nx()), Grid::index_of(ky, g.ny()))]
    }

    pub fn set_coeff(&mut self, kx: i64, ky: i64, value: Complex64) {
        let g = self.grid;
        let idx = g.idx2(Grid::index_of(kx, g.nx()), Grid::index_of(ky, g.ny()));
        self.coeffs[idx] = value;
    }

    pub fn to_samples(&self) -> Vec<f64> {
        inverse(&[self.grid.nx(), self.grid.ny()], &self.coeffs)
            .into_iter()
            .map(|c| c.re)
            .collect()
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Horizontal derivative; `Axis::Z` gives zero.
    pub fn deriv(&self, axis: Axis) -> Self {
        let g = self.grid;
        let mut out = self.clone();
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                let (k, nyq) = match axis {
                    Axis::X => (g.kx(i), Grid::is_nyquist(i, g.nx())),
                    Axis::Y => (g.ky(j), Grid::is_nyquist(j, g.ny())),
                    Axis::Z => (0.0, true),
                };
                let c = &mut out.coeffs[g.idx2(i, j)];
                *c = if nyq { ZERO } else { *c * Complex64::new(0.0, k) };
            }
        }
        out
    }

    pub fn apply_symbol(&self, symbol: impl Fn(f64, f64) -> f64) -> Self {
        let g = self.grid;
        let mut out = self.clone();
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                out.coeffs[g.idx2(i, j)] *= symbol(g.kx(i), g.ky(j));
            }
        }
        out
    }

    pub fn laplacian_h(&self) -> Self {
        self.apply_symbol(|kx, ky| -(kx * kx + ky * ky))
    }

    pub fn dealias(&mut self) {
        let g = self.grid;
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                if !(Grid::in_band(i, g.nx()) && Grid::in_band(j, g.ny())) {
                    self.coeffs[g.idx2(i, j)] = ZERO;
                }
            }
        }
    }

    pub fn dealiased(mut self) -> Self {
        self.dealias();
        self
    }

    /// `H^s` norm over the full slab `Ω_h × [0, 2)`, treating the field as
    /// constant in z.
    pub fn sobolev_norm(&self, s: u32) -> f64 {
        libm::sqrt(self.weighted_sq(|k2| powi(1.0 + k2, s)))
    }

    pub fn weighted_sq(&self, weight: impl Fn(f64) -> f64) -> f64 {
        let g = self.grid;
        let mut acc = 0.0;
        for i in 0..g.nx() {
            let kx = g.kx(i);
            for j in 0..g.ny() {
                let ky = g.ky(j);
                acc += weight(kx * kx + ky * ky) * self.coeffs[g.idx2(i, j)].norm_sqr();
            }
        }
        acc * g.volume()
    }

    /// Solve `-scale·Δ_h u = rhs` with `∫ u = 0`.
    pub fn solve_neg_laplacian_h(&self, scale: f64, tol: f64) -> Result<Self> {
        let mean = self.coeffs[0].norm();
        if !(mean <= tol) {
            return Err(Error::NonzeroMeanRHS { mean, tol });
        }
        let mut out = self.apply_symbol(|kx, ky| {
            let k2 = kx * kx + ky * ky;
            if k2 == 0.0 {
                0.0
            } else {
                1.0 / (scale * k2)
            }
        });
        out.coeffs[0] = ZERO;
        Ok(out)
    }

    fn zip_with(mut self, rhs: &Self, f: impl Fn(&mut Complex64, Complex64)) -> Self {
        assert_eq!(self.grid, rhs.grid, "fields live on different grids");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            f(a, *b);
        }
        self
    }

    pub fn axpy(self, a: f64, x: &Self) -> Self {
        self.zip_with(x, |s, xv| *s += xv * a)
    }
}

impl Add<&SpectralField2> for SpectralField2 {
    type Output = SpectralField2;
    fn add(self, rhs: &SpectralField2) -> SpectralField2 {
        self.zip_with(rhs, |a, b| *a += b)
    }
}
impl Add for SpectralField2 {
    type Output = SpectralField2;
    fn add(self, rhs: SpectralField2) -> SpectralField2 {
        self + &rhs
    }
}
impl Sub<&SpectralField2> for SpectralField2 {
    type Output = SpectralField2;
    fn sub(self, rhs: &SpectralField2) -> SpectralField2 {
        self.zip_with(rhs, |a, b| *a -= b)
    }
}
impl Sub for SpectralField2 {
    type Output = SpectralField2;
    fn sub(self, rhs: SpectralField2) -> SpectralField2 {
        self - &rhs
    }
}
impl Mul<f64> for SpectralField2 {
    type Output = SpectralField2;
    fn mul(mut self, a: f64) -> SpectralField2 {
        for c in &mut self.coeffs {
            *c *= a;
        }
        self
    }
}
impl Mul<f64> for &SpectralField2 {
    type Output = SpectralField2;
    fn mul(self, a: f64) -> SpectralField2 {
        self.clone() * a
    }
}
impl Neg for SpectralField2 {
    type Output = SpectralField2;
    fn neg(self) -> SpectralField2 {
        self * -1.0
    }
}
