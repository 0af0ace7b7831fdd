use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Horizontal period of the slab in x and y.
pub const HORIZONTAL_PERIOD: f64 = 2.0 * PI;
/// Vertical period; the physical layer is `z ∈ [0, 1]` and fields are extended
/// evenly or oddly to `[0, 2)`.
pub const VERTICAL_PERIOD: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Collocation grid on `[0, 2π)² × [0, 2)`.
///
/// Coefficients use FFT ordering along each axis: index `i` carries the
/// wavenumber `i` for `i <= n/2` and `i - n` above that. Vertical wavenumbers
/// are `π·m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, try_from = "RawGrid"))]
pub struct Grid {
    nx: usize,
    ny: usize,
    nz: usize,
}

#[cfg(feature = "serde")]
#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    nx: usize,
    ny: usize,
    nz: usize,
}

#[cfg(feature = "serde")]
impl TryFrom<RawGrid> for Grid {
    type Error = Error;
    fn try_from(g: RawGrid) -> Result<Self> {
        Grid::new(g.nx, g.ny, g.nz)
    }
}

impl Grid {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self> {
        let ok = |n: usize| n >= 4 && n.is_multiple_of(2);
        if ok(nx) && ok(ny) && ok(nz) {
            Ok(Grid { nx, ny, nz })
        } else {
            Err(Error::InvalidGrid { nx, ny, nz })
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn len2(&self) -> usize {
        self.nx * self.ny
    }
    pub fn len3(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    /// z is the fastest index, so each vertical column is contiguous.
    #[inline]
    pub fn idx3(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.ny + j) * self.nz + l
    }
    #[inline]
    pub fn idx2(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    /// Signed integer wavenumber of FFT index `i` on an axis of length `n`.
    #[inline]
    pub fn wavenumber(i: usize, n: usize) -> i64 {
        if i <= n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// FFT index of the signed wavenumber `k` (inverse of [`Grid::wavenumber`]).
    #[inline]
    pub fn index_of(k: i64, n: usize) -> usize {
        k.rem_euclid(n as i64) as usize
    }

    #[inline]
    pub fn kx(&self, i: usize) -> f64 {
        Self::wavenumber(i, self.nx) as f64
    }
    #[inline]
    pub fn ky(&self, j: usize) -> f64 {
        Self::wavenumber(j, self.ny) as f64
    }
    /// Physical vertical wavenumber `π·m`.
    #[inline]
    pub fn kz(&self, l: usize) -> f64 {
        PI * Self::wavenumber(l, self.nz) as f64
    }

    /// Index of the z-mirror mode `-m`.
    #[inline]
    pub fn mirror_z(&self, l: usize) -> usize {
        (self.nz - l) % self.nz
    }

    #[inline]
    pub fn is_nyquist(i: usize, n: usize) -> bool {
        i == n / 2
    }

    /// 2/3-rule: keep `|k| <= n/3`.
    #[inline]
    pub fn in_band(i: usize, n: usize) -> bool {
        3 * Self::wavenumber(i, n).unsigned_abs() as usize <= n
    }

    pub fn x(&self, i: usize) -> f64 {
        HORIZONTAL_PERIOD * i as f64 / self.nx as f64
    }
    pub fn y(&self, j: usize) -> f64 {
        HORIZONTAL_PERIOD * j as f64 / self.ny as f64
    }
    pub fn z(&self, l: usize) -> f64 {
        VERTICAL_PERIOD * l as f64 / self.nz as f64
    }

    pub fn dx_h(&self) -> f64 {
        HORIZONTAL_PERIOD / self.nx.max(self.ny) as f64
    }
    pub fn dz(&self) -> f64 {
        VERTICAL_PERIOD / self.nz as f64
    }
    pub fn dx_min(&self) -> f64 {
        self.dx_h().min(self.dz())
    }

    /// `|Ω| = (2π)²·2`.
    pub fn volume(&self) -> f64 {
        HORIZONTAL_PERIOD * HORIZONTAL_PERIOD * VERTICAL_PERIOD
    }

    /// Physical coordinates of every 3-D sample in storage order.
    pub fn points3(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.nx).flat_map(move |i| {
            (0..self.ny).flat_map(move |j| (0..self.nz).map(move |l| (self.x(i), self.y(j), self.z(l))))
        })
    }

    pub fn points2(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.nx).flat_map(move |i| (0..self.ny).map(move |j| (self.x(i), self.y(j))))
    }
}
