//! One-dimensional complex FFT used along each grid axis.
//!
//! Power-of-two lengths use an iterative radix-2 Cooley-Tukey pass; any other
//! length falls back to a tabulated direct DFT (grid axes are short).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub(crate) struct Plan {
    n: usize,
    // e^{-2πi j/n}, j = 0..n
    roots: Vec<Complex64>,
    bitrev: Option<Vec<usize>>,
}

impl Plan {
    pub(crate) fn new(n: usize) -> Self {
        let roots = (0..n)
            .map(|j| {
                let a = -2.0 * PI * j as f64 / n as f64;
                Complex64::new(libm::cos(a), libm::sin(a))
            })
            .collect();
        let bitrev = n.is_power_of_two().then(|| {
            let bits = n.trailing_zeros();
            (0..n)
                .map(|i| {
                    if bits == 0 {
                        0
                    } else {
                        i.reverse_bits() >> (usize::BITS - bits)
                    }
                })
                .collect()
        });
        Plan { n, roots, bitrev }
    }

    pub(crate) fn len(&self) -> usize {
        self.n
    }

    /// Unnormalized transform: forward uses e^{-ikx}, inverse e^{+ikx}.
    pub(crate) fn process(&self, buf: &mut [Complex64], scratch: &mut Vec<Complex64>, inverse: bool) {
        debug_assert_eq!(buf.len(), self.n);
        match &self.bitrev {
            Some(rev) => self.radix2(buf, rev, inverse),
            None => self.direct(buf, scratch, inverse),
        }
    }

    fn root(&self, j: usize, inverse: bool) -> Complex64 {
        let r = self.roots[j % self.n];
        if inverse {
            r.conj()
        } else {
            r
        }
    }

    fn radix2(&self, buf: &mut [Complex64], rev: &[usize], inverse: bool) {
        let n = self.n;
        for (i, &j) in rev.iter().enumerate() {
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.root(k * stride, inverse);
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }

    fn direct(&self, buf: &mut [Complex64], scratch: &mut Vec<Complex64>, inverse: bool) {
        scratch.clear();
        scratch.extend_from_slice(buf);
        for (k, out) in buf.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, x) in scratch.iter().enumerate() {
                acc += x * self.root(j * k, inverse);
            }
            *out = acc;
        }
    }
}

/// Transform a row-major array of shape `dims` along every axis.
pub(crate) fn transform_nd(data: &mut [Complex64], dims: &[usize], inverse: bool) {
    let total: usize = dims.iter().product();
    debug_assert_eq!(data.len(), total);
    let mut scratch = Vec::new();
    for (axis, &n) in dims.iter().enumerate() {
        if n == 1 {
            continue;
        }
        let plan = Plan::new(n);
        let stride: usize = dims[axis + 1..].iter().product();
        let outer = total / (n * stride);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for o in 0..outer {
            for s in 0..stride {
                let base = o * n * stride + s;
                if stride == 1 {
                    plan.process(&mut data[base..base + n], &mut scratch, inverse);
                    continue;
                }
                for (i, c) in line.iter_mut().enumerate() {
                    *c = data[base + i * stride];
                }
                plan.process(&mut line, &mut scratch, inverse);
                for (i, c) in line.iter().enumerate() {
                    data[base + i * stride] = *c;
                }
            }
        }
        debug_assert_eq!(plan.len(), n);
    }
}
