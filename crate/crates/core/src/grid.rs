//! Periodic uniform grids on `[-L, L)^n` and the sampled functions living
//! on them: Lebesgue norms, periodic convolution (spectral and direct),
//! kernel rescaling, and the samplers used to realize analytic kernels.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! * nodes `x_i = -L + i h` with `h = 2L / N`; the origin is the node `N/2`;
//! * Fourier bin `m` carries the frequency `xi = pi k / L` with
//!   `k = m` for `m <= N/2` and `k = m - N` otherwise;
//! * discrete integrals are `h^n` times the sample sum, which on this node
//!   layout is the periodic trapezoid rule.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::fft::{self, C64};
use crate::{Error, Result};

/// Spatial dimension of a grid; higher dimensions are out of scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn axes(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }
}

/// Uniform periodic grid over `[-L, L)^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    dim: Dim,
    n: usize,
    extent: f64,
}

/// Minimum grid size per axis.
pub const MIN_GRID: usize = 16;

impl GridSpec {
    /// `n` points per axis on `[-extent, extent)`; `n` must be a power of
    /// two with `n >= 16`, and the extent positive and finite.
    pub fn new(dim: Dim, n: usize, extent: f64) -> Result<Self> {
        if !n.is_power_of_two() || n < MIN_GRID {
            return Err(Error::InvalidGrid(format!(
                "size {n} must be a power of two with at least {MIN_GRID} points"
            )));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::InvalidGrid(format!("extent {extent} must be positive")));
        }
        Ok(GridSpec { dim, n, extent })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Domain half-width `L`.
    pub fn extent(&self) -> f64 {
        self.extent
    }

    /// Mesh width `h = 2L / N`.
    pub fn h(&self) -> f64 {
        2.0 * self.extent / self.n as f64
    }

    /// Cell volume `h^n`.
    pub fn cell_volume(&self) -> f64 {
        match self.dim {
            Dim::One => self.h(),
            Dim::Two => self.h() * self.h(),
        }
    }

    /// Total sample count (`N` or `N^2`).
    pub fn len(&self) -> usize {
        match self.dim {
            Dim::One => self.n,
            Dim::Two => self.n * self.n,
        }
    }

    /// Node coordinate along one axis.
    pub fn axis_coord(&self, i: usize) -> f64 {
        -self.extent + self.h() * i as f64
    }

    /// Node coordinates of a flat index; in 1D the second entry is 0.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        match self.dim {
            Dim::One => [self.axis_coord(flat), 0.0],
            Dim::Two => [self.axis_coord(flat / self.n), self.axis_coord(flat % self.n)],
        }
    }

    /// Signed frequency index of bin `m`.
    fn bin_k(&self, m: usize) -> i64 {
        if m <= self.n / 2 {
            m as i64
        } else {
            m as i64 - self.n as i64
        }
    }

    /// Frequency along one axis for bin `m`: `pi k / L`.
    pub fn axis_freq(&self, m: usize) -> f64 {
        core::f64::consts::PI * self.bin_k(m) as f64 / self.extent
    }

    /// Frequency vector of a flat bin index; in 1D the second entry is 0.
    pub fn freq(&self, flat: usize) -> [f64; 2] {
        match self.dim {
            Dim::One => [self.axis_freq(flat), 0.0],
            Dim::Two => [self.axis_freq(flat / self.n), self.axis_freq(flat % self.n)],
        }
    }

    /// Euclidean length of the frequency vector at a flat bin index.
    pub fn freq_abs(&self, flat: usize) -> f64 {
        let f = self.freq(flat);
        match self.dim {
            Dim::One => libm::fabs(f[0]),
            Dim::Two => libm::hypot(f[0], f[1]),
        }
    }

    /// Largest representable frequency magnitude along an axis.
    pub fn nyquist(&self) -> f64 {
        core::f64::consts::PI * (self.n / 2) as f64 / self.extent
    }
}

/// Real samples on a grid. Samples are finite by construction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                spec.len(),
                values.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { index: i });
            }
        }
        Ok(GridFunction { spec, values })
    }

    /// Zero function.
    pub fn zeros(spec: GridSpec) -> Self {
        GridFunction { spec, values: vec![0.0; spec.len()] }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Discrete integral `h^n * sum`.
    pub fn mass(&self) -> f64 {
        self.spec.cell_volume() * self.values.iter().sum::<f64>()
    }

    /// Pointwise difference; errors on mismatched grids.
    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(GridFunction { spec: self.spec, values })
    }

    /// Pointwise scale.
    pub fn scale(&self, a: f64) -> GridFunction {
        GridFunction {
            spec: self.spec,
            values: self.values.iter().map(|v| v * a).collect(),
        }
    }

    /// Forward transform of the samples.
    pub fn fft(&self) -> Vec<C64> {
        fft::forward_real(&self.values, self.spec.n, self.spec.dim.axes())
    }

    /// Build a function from Fourier bins (inverse transform, real part).
    pub fn from_fft(spec: GridSpec, bins: Vec<C64>) -> Result<Self> {
        if bins.len() != spec.len() {
            return Err(Error::InvalidGrid(String::from("bin count mismatch")));
        }
        let values = fft::inverse_to_real(bins, spec.n, spec.dim.axes());
        GridFunction::new(spec, values)
    }
}

/// Lebesgue exponent in `[1, inf]`, infinity exact.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LpExponent(f64);

impl LpExponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        Ok(LpExponent(p))
    }

    pub const ONE: LpExponent = LpExponent(1.0);
    pub const TWO: LpExponent = LpExponent(2.0);
    pub const INFINITY: LpExponent = LpExponent(f64::INFINITY);

    pub fn get(&self) -> f64 {
        self.0
    }

    pub fn is_infinite(&self) -> bool {
        self.0.is_infinite()
    }

    /// Dual exponent `p' = p / (p - 1)`; 1 and infinity swap.
    pub fn conjugate(&self) -> LpExponent {
        if self.0 == 1.0 {
            LpExponent::INFINITY
        } else if self.0.is_infinite() {
            LpExponent::ONE
        } else {
            LpExponent(self.0 / (self.0 - 1.0))
        }
    }
}

/// `L^p` norm of the samples: `(h^n sum |f_i|^p)^(1/p)`, max-norm for
/// `p = inf`.
pub fn lp_norm(f: &GridFunction, p: LpExponent) -> f64 {
    let vals = f.values();
    if p.is_infinite() {
        return vals.iter().fold(0.0, |acc, v| acc.max(libm::fabs(*v)));
    }
    let pw = p.get();
    let sum: f64 = if pw == 1.0 {
        vals.iter().map(|v| libm::fabs(*v)).sum()
    } else if pw == 2.0 {
        vals.iter().map(|v| v * v).sum()
    } else {
        vals.iter().map(|v| libm::pow(libm::fabs(*v), pw)).sum()
    };
    libm::pow(f.spec().cell_volume() * sum, 1.0 / pw)
}

/// Convolution evaluation route. Both routes are kept live: `Direct` is the
/// quadratic-cost reference that validates the spectral path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvMethod {
    Fft,
    Direct,
}

/// Periodic convolution `h^n sum_j f_j g_{k-j}`, with the kernel's origin at
/// the center node.
pub fn convolve(f: &GridFunction, g: &GridFunction, method: ConvMethod) -> Result<GridFunction> {
    if f.spec() != g.spec() {
        return Err(Error::SpecMismatch);
    }
    let spec = *f.spec();
    match method {
        ConvMethod::Fft => convolve_fft(&spec, f, g),
        ConvMethod::Direct => convolve_direct(&spec, f, g),
    }
}

fn shift_origin(spec: &GridSpec, values: &[f64]) -> Vec<f64> {
    // rotate so the node at x = 0 (index N/2 per axis) lands at index 0
    let n = spec.n;
    let half = n / 2;
    let mut out = vec![0.0; values.len()];
    match spec.dim {
        Dim::One => {
            for i in 0..n {
                out[i] = values[(i + half) % n];
            }
        }
        Dim::Two => {
            for r in 0..n {
                for c in 0..n {
                    out[r * n + c] = values[((r + half) % n) * n + ((c + half) % n)];
                }
            }
        }
    }
    out
}

fn convolve_fft(spec: &GridSpec, f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    let axes = spec.dim.axes();
    let fa = fft::forward_real(f.values(), spec.n, axes);
    let gs = shift_origin(spec, g.values());
    let ga = fft::forward_real(&gs, spec.n, axes);
    let prod: Vec<C64> = fa.iter().zip(&ga).map(|(a, b)| *a * *b).collect();
    let vals = fft::inverse_to_real(prod, spec.n, axes);
    let scale = spec.cell_volume();
    GridFunction::new(*spec, vals.into_iter().map(|v| v * scale).collect())
}

fn convolve_direct(spec: &GridSpec, f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    let n = spec.n;
    let half = n / 2;
    let fv = f.values();
    let gv = g.values();
    let scale = spec.cell_volume();
    let mut out = vec![0.0; fv.len()];
    match spec.dim {
        Dim::One => {
            for k in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += fv[j] * gv[(k + n + half - j) % n];
                }
                out[k] = acc * scale;
            }
        }
        Dim::Two => {
            for k1 in 0..n {
                for k2 in 0..n {
                    let mut acc = 0.0;
                    for j1 in 0..n {
                        let r = ((k1 + n + half - j1) % n) * n;
                        let fr = j1 * n;
                        for j2 in 0..n {
                            acc += fv[fr + j2] * gv[r + (k2 + n + half - j2) % n];
                        }
                    }
                    out[k1 * n + k2] = acc * scale;
                }
            }
        }
    }
    GridFunction::new(*spec, out)
}

/// Interpolation rule for rescaling sampled kernels. Nearest-cell keeps jump
/// discontinuities sharp; cubic suits smooth samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Interpolation {
    NearestCell,
    Cubic,
}

/// Relative threshold defining the numerical support of a sampled kernel.
pub const SUPPORT_THRESHOLD_REL: f64 = 1e-12;

/// Minimum points per axis the rescaled support must keep.
pub const MIN_SUPPORT_POINTS: usize = 4;

/// Relative tolerance on mass preservation under rescaling.
pub const RESCALE_MASS_REL: f64 = 1e-3;

/// Cell-extent bounding box of the numerical support (samples above
/// [`SUPPORT_THRESHOLD_REL`] of the peak); `None` for the zero function.
/// In 1D the second axis spans `[0, 0]`.
pub fn support_box(f: &GridFunction) -> Option<([f64; 2], [f64; 2])> {
    let spec = f.spec();
    let n = spec.n;
    let peak = f.values().iter().fold(0.0, |acc: f64, v| acc.max(libm::fabs(*v)));
    if peak == 0.0 {
        return None;
    }
    let thr = SUPPORT_THRESHOLD_REL * peak;
    let mut lo = [usize::MAX; 2];
    let mut hi = [0usize; 2];
    let mut any = false;
    for (flat, v) in f.values().iter().enumerate() {
        if libm::fabs(*v) > thr {
            any = true;
            let idx = match spec.dim {
                Dim::One => [flat, 0],
                Dim::Two => [flat / n, flat % n],
            };
            for a in 0..spec.dim.axes() {
                lo[a] = lo[a].min(idx[a]);
                hi[a] = hi[a].max(idx[a]);
            }
        }
    }
    if !any {
        return None;
    }
    let h = spec.h();
    let mut blo = [0.0; 2];
    let mut bhi = [0.0; 2];
    for a in 0..spec.dim.axes() {
        blo[a] = spec.axis_coord(lo[a]) - 0.5 * h;
        bhi[a] = spec.axis_coord(hi[a]) + 0.5 * h;
    }
    Some((blo, bhi))
}

/// Per-axis extent of the numerical support, in grid points.
fn support_points_per_axis(f: &GridFunction) -> usize {
    match support_box(f) {
        None => 0,
        Some((lo, hi)) => {
            let h = f.spec().h();
            (0..f.spec().dim.axes())
                .map(|a| libm::round((hi[a] - lo[a]) / h) as usize)
                .max()
                .unwrap_or(0)
        }
    }
}

fn interp_eval(f: &GridFunction, y: &[f64; 2], rule: Interpolation) -> f64 {
    let spec = f.spec();
    let n = spec.n;
    let h = spec.h();
    let l = spec.extent();
    let axes = spec.dim.axes();
    for a in 0..axes {
        if y[a] < -l || y[a] >= l {
            return 0.0;
        }
    }
    let sample = |i: [i64; 2]| -> f64 {
        for a in 0..axes {
            if i[a] < 0 || i[a] >= n as i64 {
                return 0.0;
            }
        }
        match spec.dim {
            Dim::One => f.values()[i[0] as usize],
            Dim::Two => f.values()[i[0] as usize * n + i[1] as usize],
        }
    };
    match rule {
        Interpolation::NearestCell => {
            let mut idx = [0i64; 2];
            for a in 0..axes {
                idx[a] = libm::round((y[a] + l) / h) as i64;
            }
            sample(idx)
        }
        Interpolation::Cubic => {
            let mut base = [0i64; 2];
            let mut frac = [0.0f64; 2];
            for a in 0..axes {
                let t = (y[a] + l) / h;
                let fl = libm::floor(t);
                base[a] = fl as i64;
                frac[a] = t - fl;
            }
            let cr = |pm1: f64, p0: f64, p1: f64, p2: f64, t: f64| -> f64 {
                0.5 * (2.0 * p0
                    + (p1 - pm1) * t
                    + (2.0 * pm1 - 5.0 * p0 + 4.0 * p1 - p2) * t * t
                    + (3.0 * (p0 - p1) + p2 - pm1) * t * t * t)
            };
            match spec.dim {
                Dim::One => {
                    let p: Vec<f64> =
                        (-1..3).map(|d| sample([base[0] + d, 0])).collect();
                    cr(p[0], p[1], p[2], p[3], frac[0])
                }
                Dim::Two => {
                    let mut rows = [0.0; 4];
                    for (ri, d0) in (-1..3).enumerate() {
                        let p: Vec<f64> = (-1..3)
                            .map(|d1| sample([base[0] + d0, base[1] + d1]))
                            .collect();
                        rows[ri] = cr(p[0], p[1], p[2], p[3], frac[1]);
                    }
                    cr(rows[0], rows[1], rows[2], rows[3], frac[0])
                }
            }
        }
    }
}

/// Rescale a sampled kernel to `rho_eps(x) = eps^-n rho(x / eps)` by
/// interpolating the samples. Fails when the shrunken support would sit on
/// fewer than [`MIN_SUPPORT_POINTS`] nodes per axis, or when the discrete
/// mass moves more than [`RESCALE_MASS_REL`] relatively; the drift is
/// reported, never silently absorbed.
pub fn rescale_kernel(
    rho: &GridFunction,
    eps: f64,
    rule: Interpolation,
) -> Result<GridFunction> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidScale(eps));
    }
    let width = match support_box(rho) {
        // rescaling the zero function is the zero function
        None => return Ok(GridFunction::zeros(*rho.spec())),
        Some(_) => support_points_per_axis(rho),
    };
    let scaled = width as f64 * eps;
    if scaled < MIN_SUPPORT_POINTS as f64 {
        return Err(Error::UnderResolved {
            eps,
            points_per_axis: libm::floor(scaled) as usize,
        });
    }
    let spec = *rho.spec();
    let inv_vol = match spec.dim {
        Dim::One => 1.0 / eps,
        Dim::Two => 1.0 / (eps * eps),
    };
    let mut vals = Vec::with_capacity(spec.len());
    for flat in 0..spec.len() {
        let x = spec.point(flat);
        let y = [x[0] / eps, x[1] / eps];
        vals.push(inv_vol * interp_eval(rho, &y, rule));
    }
    let out = GridFunction::new(spec, vals)?;
    let m0 = rho.mass();
    let m1 = out.mass();
    // drift is judged against the total variation, not the signed mass,
    // so mean-zero inputs are held to the same absolute scale as unit-mass
    // kernels instead of an empty relative one
    let denom = libm::fabs(m0).max(lp_norm(rho, LpExponent::ONE)).max(1e-12);
    if libm::fabs(m1 - m0) > RESCALE_MASS_REL * denom {
        return Err(Error::MassDrift { expected: m0, actual: m1 });
    }
    Ok(out)
}

/// Sample a pointwise formula at the nodes.
pub fn sample_fn(spec: GridSpec, f: impl Fn(&[f64; 2]) -> f64) -> Result<GridFunction> {
    let mut vals = Vec::with_capacity(spec.len());
    for flat in 0..spec.len() {
        vals.push(f(&spec.point(flat)));
    }
    GridFunction::new(spec, vals)
}

/// Sample the normalized indicator of the box `prod_d [lo_d, hi_d]` with
/// edge cells weighted by their covered fraction, which keeps the discrete
/// mass exactly 1 and moments second-order accurate.
pub fn sample_box(spec: GridSpec, lo: &[f64], hi: &[f64]) -> Result<GridFunction> {
    let axes = spec.dim.axes();
    if lo.len() != axes || hi.len() != axes {
        return Err(Error::InvalidKernel(String::from("corner dimension mismatch")));
    }
    let mut volume = 1.0;
    for a in 0..axes {
        if !(hi[a] > lo[a]) {
            return Err(Error::InvalidKernel(format!(
                "degenerate box: corner {} is not below {}",
                lo[a], hi[a]
            )));
        }
        volume *= hi[a] - lo[a];
    }
    let h = spec.h();
    let n = spec.n;
    // per-axis covered fraction of each cell
    let cover_axis = |lo_a: f64, hi_a: f64| -> Vec<f64> {
        (0..n)
            .map(|i| {
                let c = spec.axis_coord(i);
                let covered = (hi_a.min(c + 0.5 * h) - lo_a.max(c - 0.5 * h)).max(0.0);
                covered / h
            })
            .collect()
    };
    let w0 = cover_axis(lo[0], hi[0]);
    let vals = match spec.dim {
        Dim::One => w0.iter().map(|w| w / volume).collect(),
        Dim::Two => {
            let w1 = cover_axis(lo[1], hi[1]);
            let mut v = Vec::with_capacity(n * n);
            for r in 0..n {
                for c in 0..n {
                    v.push(w0[r] * w1[c] / volume);
                }
            }
            v
        }
    };
    GridFunction::new(spec, vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec1(n: usize, l: f64) -> GridSpec {
        GridSpec::new(Dim::One, n, l).unwrap()
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(GridSpec::new(Dim::One, 48, 1.0).is_err());
        assert!(GridSpec::new(Dim::One, 8, 1.0).is_err());
        assert!(GridSpec::new(Dim::One, 64, 0.0).is_err());
        assert!(GridSpec::new(Dim::One, 64, f64::NAN).is_err());
    }

    #[test]
    fn rejects_non_finite_samples() {
        let spec = spec1(16, 1.0);
        let mut vals = vec![0.0; 16];
        vals[3] = f64::NAN;
        assert!(matches!(
            GridFunction::new(spec, vals),
            Err(Error::NonFiniteSample { index: 3 })
        ));
    }

    #[test]
    fn constant_norms() {
        // |1| over [-1,1)^n at p = 2 is 2^(n/2)
        let f1 = GridFunction::new(spec1(64, 1.0), vec![1.0; 64]).unwrap();
        assert!((lp_norm(&f1, LpExponent::TWO) - libm::sqrt(2.0)).abs() < 1e-12);
        let s2 = GridSpec::new(Dim::Two, 32, 1.0).unwrap();
        let f2 = GridFunction::new(s2, vec![1.0; 32 * 32]).unwrap();
        assert!((lp_norm(&f2, LpExponent::TWO) - 2.0).abs() < 1e-12);
        assert!((lp_norm(&f2, LpExponent::INFINITY) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exponent_validation_and_duality() {
        assert!(LpExponent::new(0.5).is_err());
        assert!(LpExponent::new(f64::NAN).is_err());
        assert_eq!(LpExponent::ONE.conjugate(), LpExponent::INFINITY);
        assert_eq!(LpExponent::INFINITY.conjugate(), LpExponent::ONE);
        assert!((LpExponent::new(3.0).unwrap().conjugate().get() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn delta_convolution_is_identity() {
        let spec = spec1(64, 2.0);
        let h = spec.h();
        let mut dv = vec![0.0; 64];
        dv[32] = 1.0 / h; // discrete delta at the origin
        let delta = GridFunction::new(spec, dv).unwrap();
        let f = sample_fn(spec, |x| libm::sin(x[0])).unwrap();
        for method in [ConvMethod::Fft, ConvMethod::Direct] {
            let c = convolve(&f, &delta, method).unwrap();
            for (a, b) in c.values().iter().zip(f.values()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn box_sampling_mass_exact() {
        let spec = spec1(256, 2.0);
        let b = sample_box(spec, &[-0.5], &[0.5]).unwrap();
        assert!((b.mass() - 1.0).abs() < 1e-14);
        let s2 = GridSpec::new(Dim::Two, 64, 2.0).unwrap();
        let b2 = sample_box(s2, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((b2.mass() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rescale_guards() {
        let spec = spec1(256, 2.0);
        let b = sample_box(spec, &[-0.5], &[0.5]).unwrap();
        // support is 64 points wide; eps = 1/32 leaves 2 points
        assert!(matches!(
            rescale_kernel(&b, 1.0 / 32.0, Interpolation::NearestCell),
            Err(Error::UnderResolved { .. })
        ));
        assert!(rescale_kernel(&b, 0.0, Interpolation::NearestCell).is_err());
        assert!(rescale_kernel(&b, 1.5, Interpolation::NearestCell).is_err());
    }
}
