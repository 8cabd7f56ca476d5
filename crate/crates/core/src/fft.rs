//! Radix-2 complex FFT.
//!
//! Grid sizes are powers of two by construction (a `GridSpec` invariant), so
//! a plain iterative Cooley-Tukey transform covers every case. Twiddles are
//! rebuilt per call; at the sizes involved this is far from the profile.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

/// Complex double, kept minimal: only what the transforms need.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct C64 {
    pub re: f64,
    pub im: f64,
}

impl C64 {
    pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        C64 { re, im }
    }

    pub fn conj(self) -> Self {
        C64 { re: self.re, im: -self.im }
    }

    pub fn scale(self, a: f64) -> Self {
        C64 { re: self.re * a, im: self.im * a }
    }

    pub fn abs(self) -> f64 {
        libm::hypot(self.re, self.im)
    }
}

impl Add for C64 {
    type Output = C64;
    fn add(self, o: C64) -> C64 {
        C64 { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for C64 {
    type Output = C64;
    fn sub(self, o: C64) -> C64 {
        C64 { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for C64 {
    type Output = C64;
    fn mul(self, o: C64) -> C64 {
        C64 {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

/// In-place transform; `inverse` applies the conjugate transform and the
/// 1/n scale, so `fft(ifft(x)) == x` up to rounding.
pub fn fft_inplace(buf: &mut [C64], inverse: bool) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    if n <= 1 {
        return;
    }

    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }

    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * core::f64::consts::PI / len as f64;
        let wlen = C64::new(libm::cos(ang), libm::sin(ang));
        let mut i = 0;
        while i < n {
            let mut w = C64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = buf[i + k];
                let v = buf[i + k + len / 2] * w;
                buf[i + k] = u + v;
                buf[i + k + len / 2] = u - v;
                w = w * wlen;
            }
            i += len;
        }
        len <<= 1;
    }

    if inverse {
        let inv = 1.0 / n as f64;
        for z in buf.iter_mut() {
            *z = z.scale(inv);
        }
    }
}

/// Row-column transform of an `n x n` row-major square array.
pub fn fft2_inplace(buf: &mut [C64], n: usize, inverse: bool) {
    debug_assert_eq!(buf.len(), n * n);
    for row in buf.chunks_exact_mut(n) {
        fft_inplace(row, inverse);
    }
    let mut col = vec![C64::ZERO; n];
    for c in 0..n {
        for r in 0..n {
            col[r] = buf[r * n + c];
        }
        fft_inplace(&mut col, inverse);
        for r in 0..n {
            buf[r * n + c] = col[r];
        }
    }
}

/// Forward transform of real samples laid out per `axes` (1 => length n,
/// 2 => n x n row-major).
pub fn forward_real(values: &[f64], n: usize, axes: usize) -> Vec<C64> {
    let mut buf: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
    match axes {
        1 => fft_inplace(&mut buf, false),
        2 => fft2_inplace(&mut buf, n, false),
        _ => unreachable!("dim is 1 or 2 by construction"),
    }
    buf
}

/// Inverse transform, discarding the imaginary residue (input transforms of
/// real data leave it at rounding level).
pub fn inverse_to_real(mut buf: Vec<C64>, n: usize, axes: usize) -> Vec<f64> {
    match axes {
        1 => fft_inplace(&mut buf, true),
        2 => fft2_inplace(&mut buf, n, true),
        _ => unreachable!("dim is 1 or 2 by construction"),
    }
    buf.into_iter().map(|z| z.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn dft_naive(x: &[C64], inverse: bool) -> Vec<C64> {
        let n = x.len();
        let sign = if inverse { 1.0 } else { -1.0 };
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = C64::ZERO;
            for (j, &v) in x.iter().enumerate() {
                let ang = sign * 2.0 * core::f64::consts::PI * (k * j) as f64 / n as f64;
                acc = acc + v * C64::new(libm::cos(ang), libm::sin(ang));
            }
            if inverse {
                acc = acc.scale(1.0 / n as f64);
            }
            out.push(acc);
        }
        out
    }

    #[test]
    fn matches_naive_dft() {
        let mut x: Vec<C64> = (0..64)
            .map(|i| C64::new(libm::sin(0.7 * i as f64), libm::cos(1.3 * i as f64)))
            .collect();
        let expect = dft_naive(&x, false);
        fft_inplace(&mut x, false);
        for (a, b) in x.iter().zip(&expect) {
            assert!((*a - *b).abs() < 1e-10);
        }
    }

    #[test]
    fn round_trip() {
        let orig: Vec<C64> = (0..256).map(|i| C64::new(i as f64 * 0.01, 0.0)).collect();
        let mut x = orig.clone();
        fft_inplace(&mut x, false);
        fft_inplace(&mut x, true);
        for (a, b) in x.iter().zip(&orig) {
            assert!((*a - *b).abs() < 1e-12);
        }
    }
}
