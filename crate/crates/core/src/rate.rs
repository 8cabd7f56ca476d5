//! Mollifier approximation rates and the rate functional.
//!
//! The central object is the deviation `dev(eps) = |f - f * rho_eps|_p`
//! and the functional `int_0^1 eps^{-sq-1} dev(eps)^q deps`, the
//! convolution-side counterpart of the dyadic seminorm. The integral is
//! evaluated blockwise over `eps in [2^{-j-1}, 2^{-j}]` with the power-law
//! weight integrated exactly, and a second, independent quadrature route
//! (plain trapezoid in `ln eps`) cross-checks the block sum.
//!
//! Deviations come from one of two engines. When the kernel has a
//! closed-form Fourier transform, `dev` is computed spectrally as
//! `|ifft((1 - rho_hat(eps xi)) f_hat)|_p`, which stays exact down to
//! scales far below the mesh (the multiplier is evaluated analytically,
//! not resampled). Sampled kernels fall back to genuine grid convolution
//! and inherit its resolution limits.

use alloc::string::String;
use alloc::vec::Vec;

use crate::fft::C64;
use crate::grid::{self, lp_norm, ConvMethod, Dim, GridFunction, GridSpec, LpExponent};
use crate::kernels::{KernelTransform, MollifierSpec};
use crate::littlewood_paley::{BesovParams, TruncatedValue, TRUNCATION_SHARE_MAX};
use crate::{Error, Result};

/// Deviations below this are FFT roundoff, not approximation error.
pub const DEVIATION_FLOOR: f64 = 1e-13;

/// Fewest points a decay fit will accept.
pub const FIT_MIN_POINTS: usize = 5;

/// The eta test calls a sum converged when the top dyadic level carries
/// less than this share at every sampled `eps`.
pub const ETA_TAIL_SHARE_MAX: f64 = 0.01;

/// Smallest discrete mean the eta test accepts (the test function must
/// have nonzero integral).
pub const ETA_MEAN_MIN: f64 = 1e-10;

/// Largest discrete mean the vanishing-mean diagnostic accepts.
pub const PSI_MEAN_MAX: f64 = 1e-10;

/// Blockwise geometric grid on `(0, 1]`: `j_max + 1` dyadic blocks
/// `[2^{-j-1}, 2^{-j}]`, each carrying `samples_per_block` log-midpoint
/// nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpsilonGrid {
    j_max: usize,
    samples_per_block: usize,
}

impl EpsilonGrid {
    pub fn new(j_max: usize, samples_per_block: usize) -> Result<Self> {
        if j_max < 3 {
            return Err(Error::InvalidEpsilonGrid(alloc::format!(
                "{} dyadic blocks cover too little of (0, 1]; need j_max >= 3",
                j_max + 1
            )));
        }
        if samples_per_block == 0 {
            return Err(Error::InvalidEpsilonGrid(String::from(
                "need at least one sample per block",
            )));
        }
        Ok(EpsilonGrid { j_max, samples_per_block })
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn samples_per_block(&self) -> usize {
        self.samples_per_block
    }

    /// Log-midpoint node `i` of block `j`:
    /// `2^{-j-1} * 2^{(i + 1/2) / m}`, inside `[2^{-j-1}, 2^{-j}]`.
    pub fn node(&self, j: usize, i: usize) -> f64 {
        let m = self.samples_per_block as f64;
        libm::exp2(-(j as f64) - 1.0 + (i as f64 + 0.5) / m)
    }

    /// All nodes in strictly decreasing order.
    pub fn nodes(&self) -> Vec<f64> {
        let m = self.samples_per_block;
        let mut out = Vec::with_capacity((self.j_max + 1) * m);
        for j in 0..=self.j_max {
            for i in (0..m).rev() {
                out.push(self.node(j, i));
            }
        }
        out
    }

    /// Smallest scale any node reaches.
    pub fn eps_min(&self) -> f64 {
        libm::exp2(-(self.j_max as f64) - 1.0)
    }
}

/// Which deviation engine to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviationRoute {
    /// Spectral when the kernel transform exists, spatial otherwise.
    Auto,
    /// Closed-form multiplier on the Fourier side; errors when the
    /// kernel has no transform.
    Spectral,
    /// Rescale, convolve, subtract on the grid.
    Spatial,
}

enum EngineBody {
    Spectral { f_hat: Vec<C64>, transform: KernelTransform },
    Spatial,
}

/// Evaluates `|f - f * rho_eps|_p` for one fixed `(f, rho, p)` across
/// many scales.
pub struct DeviationEngine<'a> {
    f: &'a GridFunction,
    rho: &'a MollifierSpec,
    p: LpExponent,
    body: EngineBody,
}

impl<'a> DeviationEngine<'a> {
    pub fn new(
        f: &'a GridFunction,
        rho: &'a MollifierSpec,
        p: LpExponent,
        route: DeviationRoute,
    ) -> Result<Self> {
        if f.spec().dim() != rho.dim() {
            return Err(Error::SpecMismatch);
        }
        let spectral = || -> Option<EngineBody> {
            let nyq = f.spec().nyquist();
            let xi_max = match f.spec().dim() {
                Dim::One => nyq,
                Dim::Two => nyq * core::f64::consts::SQRT_2,
            };
            let transform = rho.transform(xi_max)?;
            Some(EngineBody::Spectral { f_hat: f.fft(), transform })
        };
        let body = match route {
            DeviationRoute::Spatial => EngineBody::Spatial,
            DeviationRoute::Spectral => spectral().ok_or(Error::InvalidKernel(String::from(
                "kernel has no closed-form transform; use the spatial route",
            )))?,
            DeviationRoute::Auto => spectral().unwrap_or(EngineBody::Spatial),
        };
        Ok(DeviationEngine { f, rho, p, body })
    }

    /// Route actually in effect.
    pub fn route_name(&self) -> &'static str {
        match self.body {
            EngineBody::Spectral { .. } => "spectral",
            EngineBody::Spatial => "spatial",
        }
    }

    /// `|f - f * rho_eps|_p`.
    pub fn deviation(&self, eps: f64) -> Result<f64> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidScale(eps));
        }
        let spec = *self.f.spec();
        match &self.body {
            EngineBody::Spectral { f_hat, transform } => {
                let bins: Vec<C64> = f_hat
                    .iter()
                    .enumerate()
                    .map(|(flat, v)| {
                        let xi = spec.freq(flat);
                        let r = transform.eval(&[eps * xi[0], eps * xi[1]]);
                        let m = C64::new(1.0 - r.re, -r.im);
                        *v * m
                    })
                    .collect();
                let diff = GridFunction::from_fft(spec, bins)?;
                Ok(lp_norm(&diff, self.p))
            }
            EngineBody::Spatial => {
                let rho_eps = self.rho.sample_scaled(spec, eps)?;
                let conv = grid::convolve(self.f, &rho_eps, ConvMethod::Fft)?;
                Ok(lp_norm(&self.f.sub(&conv)?, self.p))
            }
        }
    }
}

/// A measured deviation curve with its provenance.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateProfile {
    entries: Vec<(f64, f64)>,
    pub p: LpExponent,
    pub kernel_id: String,
    pub function_id: String,
}

impl RateProfile {
    /// Entries must come in strictly decreasing `eps` order with
    /// nonnegative deviations.
    pub fn new(
        entries: Vec<(f64, f64)>,
        p: LpExponent,
        kernel_id: String,
        function_id: String,
    ) -> Result<Self> {
        for w in entries.windows(2) {
            if !(w[1].0 < w[0].0) {
                return Err(Error::InvalidEpsilonGrid(String::from(
                    "profile scales must strictly decrease",
                )));
            }
        }
        if entries.iter().any(|(e, d)| !(*e > 0.0) || *d < 0.0 || !d.is_finite()) {
            return Err(Error::InvalidEpsilonGrid(String::from(
                "profile entries must have positive scales and finite nonnegative deviations",
            )));
        }
        Ok(RateProfile { entries, p, kernel_id, function_id })
    }

    /// `(eps, deviation)` pairs, `eps` strictly decreasing.
    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }
}

/// Measure the deviation curve of `f` under `rho` on the grid's nodes.
pub fn rate_profile(
    f: &GridFunction,
    rho: &MollifierSpec,
    p: LpExponent,
    grid: &EpsilonGrid,
    kernel_id: &str,
    function_id: &str,
) -> Result<RateProfile> {
    let engine = DeviationEngine::new(f, rho, p, DeviationRoute::Auto)?;
    let mut entries = Vec::new();
    for eps in grid.nodes() {
        entries.push((eps, engine.deviation(eps)?));
    }
    RateProfile::new(entries, p, String::from(kernel_id), String::from(function_id))
}

fn functional_from_devs(
    devs: &[Vec<f64>],
    grid: &EpsilonGrid,
    params: &BesovParams,
) -> TruncatedValue {
    let s = params.s;
    if params.q.is_infinite() {
        // sup_eps eps^{-s} dev(eps)
        let mut sup = 0.0f64;
        let mut last_block_sup = 0.0f64;
        for (j, block) in devs.iter().enumerate() {
            for (i, d) in block.iter().enumerate() {
                let eps = grid.node(j, i);
                let v = libm::pow(eps, -s) * d;
                sup = sup.max(v);
                if j == grid.j_max() {
                    last_block_sup = last_block_sup.max(v);
                }
            }
        }
        let share = if sup > 0.0 { last_block_sup / sup } else { 0.0 };
        return TruncatedValue {
            value: sup,
            last_level_share: share,
            converged: share < TRUNCATION_SHARE_MAX,
        };
    }
    let q = params.q.get();
    let sq = s * q;
    let m = grid.samples_per_block() as f64;
    let mut total = 0.0;
    let mut last_block = 0.0;
    for (j, block) in devs.iter().enumerate() {
        let block_lo = libm::exp2(-(j as f64) - 1.0);
        let mut acc = 0.0;
        for (i, d) in block.iter().enumerate() {
            // exact integral of eps^{-sq-1} over the node's slice
            let lo = block_lo * libm::exp2(i as f64 / m);
            let hi = block_lo * libm::exp2((i as f64 + 1.0) / m);
            let weight = (libm::pow(lo, -sq) - libm::pow(hi, -sq)) / sq;
            acc += libm::pow(*d, q) * weight;
        }
        total += acc;
        if j == grid.j_max() {
            last_block = acc;
        }
    }
    let share = if total > 0.0 { last_block / total } else { 0.0 };
    TruncatedValue {
        value: total,
        last_level_share: share,
        converged: share < TRUNCATION_SHARE_MAX,
    }
}

/// The rate functional `int_0^1 eps^{-sq-1} |f - f * rho_eps|_p^q deps`,
/// block sum with exactly integrated weights; the sup form at `q = inf`.
/// The diagnostic share is the deepest block's contribution.
pub fn mollifier_functional(
    f: &GridFunction,
    rho: &MollifierSpec,
    params: &BesovParams,
    grid: &EpsilonGrid,
) -> Result<TruncatedValue> {
    let engine = DeviationEngine::new(f, rho, params.p, DeviationRoute::Auto)?;
    let mut devs = Vec::with_capacity(grid.j_max() + 1);
    for j in 0..=grid.j_max() {
        let mut block = Vec::with_capacity(grid.samples_per_block());
        for i in 0..grid.samples_per_block() {
            block.push(engine.deviation(grid.node(j, i))?);
        }
        devs.push(block);
    }
    Ok(functional_from_devs(&devs, grid, params))
}

/// Independent quadrature of the same integral: endpoint-inclusive
/// uniform trapezoid in `t = ln eps` over `[ln eps_min, 0]` with
/// `(j_max + 1) * samples_per_block + 1` nodes. Exists to cross-check
/// the block sum; the two must agree to quadrature accuracy (the
/// property suite pins 1%).
pub fn mollifier_functional_direct(
    f: &GridFunction,
    rho: &MollifierSpec,
    params: &BesovParams,
    grid: &EpsilonGrid,
) -> Result<TruncatedValue> {
    let engine = DeviationEngine::new(f, rho, params.p, DeviationRoute::Auto)?;
    let s = params.s;
    let n_steps = (grid.j_max() + 1) * grid.samples_per_block();
    let t_lo = libm::log(grid.eps_min());
    let dt = -t_lo / n_steps as f64;
    if params.q.is_infinite() {
        let mut sup = 0.0f64;
        let mut last_block_sup = 0.0f64;
        let block_edge = libm::log(libm::exp2(-(grid.j_max() as f64)));
        for k in 0..=n_steps {
            let t = t_lo + dt * k as f64;
            let eps = libm::exp(t);
            let v = libm::pow(eps, -s) * engine.deviation(eps)?;
            sup = sup.max(v);
            if t <= block_edge + 1e-12 {
                last_block_sup = last_block_sup.max(v);
            }
        }
        let share = if sup > 0.0 { last_block_sup / sup } else { 0.0 };
        return Ok(TruncatedValue {
            value: sup,
            last_level_share: share,
            converged: share < TRUNCATION_SHARE_MAX,
        });
    }
    let q = params.q.get();
    let sq = s * q;
    // integrand in t: dev(e^t)^q e^{-sq t}
    let mut total = 0.0;
    for k in 0..=n_steps {
        let t = t_lo + dt * k as f64;
        let eps = libm::exp(t);
        let g = libm::pow(engine.deviation(eps)?, q) * libm::exp(-sq * t);
        let w = if k == 0 || k == n_steps { 0.5 } else { 1.0 };
        total += w * g;
    }
    total *= dt;
    Ok(TruncatedValue { value: total, last_level_share: 0.0, converged: true })
}

/// Outcome of the admissibility test: partial sums
/// `S_eps(J') = sum_{j<=J'} 2^{s j} |eta - eta * rho_{2^{-j} eps}|_1`
/// at each sampled `eps in [1/2, 1]`, and the tail-share verdict.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EtaTestReport {
    pub s: f64,
    pub epsilons: Vec<f64>,
    /// `partial_sums[k][j]` is `S_{epsilons[k]}` truncated at level `j`.
    pub partial_sums: Vec<Vec<f64>>,
    /// Top-level share of the full sum, per sampled `eps`.
    pub tail_shares: Vec<f64>,
    /// True when every sampled `eps` has tail share below
    /// [`ETA_TAIL_SHARE_MAX`].
    pub converged: bool,
}

/// The admissibility test: whether the weighted deviation sum of a
/// nonzero-mean test function `eta` stays summable at smoothness `s`.
/// Divergence is detected scale-free, by the share of the deepest level,
/// because the sum's magnitude depends on `eta`.
pub fn eta_test(
    rho: &MollifierSpec,
    eta: &GridFunction,
    s: f64,
    levels: usize,
    eps_samples: usize,
) -> Result<EtaTestReport> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidSmoothness(s));
    }
    if levels == 0 || eps_samples == 0 {
        return Err(Error::InvalidEpsilonGrid(String::from(
            "eta test needs at least one level and one eps sample",
        )));
    }
    let mean = eta.mass();
    if libm::fabs(mean) <= ETA_MEAN_MIN {
        return Err(Error::ZeroMeanEta { mean });
    }
    let epsilons: Vec<f64> = if eps_samples == 1 {
        alloc::vec![0.75]
    } else {
        (0..eps_samples)
            .map(|i| 0.5 + 0.5 * i as f64 / (eps_samples - 1) as f64)
            .collect()
    };
    let engine = DeviationEngine::new(eta, rho, LpExponent::ONE, DeviationRoute::Auto)?;
    let mut partial_sums = Vec::with_capacity(epsilons.len());
    let mut tail_shares = Vec::with_capacity(epsilons.len());
    for &eps in &epsilons {
        let mut cum = Vec::with_capacity(levels + 1);
        let mut acc = 0.0;
        let mut last = 0.0;
        for j in 0..=levels {
            let scale = libm::exp2(-(j as f64)) * eps;
            last = libm::exp2(s * j as f64) * engine.deviation(scale)?;
            acc += last;
            cum.push(acc);
        }
        tail_shares.push(if acc > 0.0 { last / acc } else { 0.0 });
        partial_sums.push(cum);
    }
    let converged = tail_shares.iter().all(|sh| *sh < ETA_TAIL_SHARE_MAX);
    Ok(EtaTestReport { s, epsilons, partial_sums, tail_shares, converged })
}

/// Least-squares fit of `ln dev` against `ln eps`.
#[derive(Debug, Clone, Copy)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

/// Fit the empirical decay exponent over `fit_range = (eps_lo, eps_hi)`,
/// ignoring deviations at the floating-point floor.
pub fn decay_exponent(profile: &RateProfile, fit_range: (f64, f64)) -> Result<DecayFit> {
    let (lo, hi) = fit_range;
    let pts: Vec<(f64, f64)> = profile
        .entries()
        .iter()
        .filter(|(e, d)| *e >= lo && *e <= hi && *d > DEVIATION_FLOOR)
        .map(|(e, d)| (libm::log(*e), libm::log(*d)))
        .collect();
    if pts.len() < FIT_MIN_POINTS {
        return Err(Error::TooFewPoints { found: pts.len(), needed: FIT_MIN_POINTS });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|(x, _)| x).sum::<f64>() / n;
    let my = pts.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = pts.iter().map(|(_, y)| (y - my) * (y - my)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(DecayFit { slope, intercept, r_squared, points_used: pts.len() })
}

/// Sampled `|rho * psi_eps|_1` at dyadic scales, with a monotonicity
/// statistic.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KeylemReport {
    /// `(eps, |rho * psi_eps|_1)` at `eps = 2^{-j}`, `j = 0..=j_max`.
    pub entries: Vec<(f64, f64)>,
    /// Fraction of consecutive pairs that decrease.
    pub decreasing_trend: f64,
}

/// Vanishing-mean diagnostic: convolving any integrable kernel with a
/// shrinking mean-zero `psi_eps` must die out in `L^1`. Evaluated at the
/// dyadic scales `2^{-j}` down to the grid's `j_max` block; `psi` is
/// rescaled by interpolation, which reads the well-resolved native
/// samples, so it tracks analytic rescaling to interpolation accuracy.
pub fn keylem_diagnostic(
    rho: &MollifierSpec,
    psi: &GridFunction,
    grid: &EpsilonGrid,
) -> Result<KeylemReport> {
    let mean = psi.mass();
    if libm::fabs(mean) > PSI_MEAN_MAX {
        return Err(Error::NonZeroMeanPsi { mean });
    }
    let spec = *psi.spec();
    let rho_s = rho.sample(spec)?;
    let mut entries = Vec::with_capacity(grid.j_max() + 1);
    for j in 0..=grid.j_max() {
        let eps = libm::exp2(-(j as f64));
        let psi_eps = if j == 0 {
            psi.clone()
        } else {
            grid::rescale_kernel(psi, eps, grid::Interpolation::Cubic)?
        };
        let conv = grid::convolve(&rho_s, &psi_eps, ConvMethod::Fft)?;
        entries.push((eps, lp_norm(&conv, LpExponent::ONE)));
    }
    let mut dec = 0usize;
    for w in entries.windows(2) {
        if w[1].1 < w[0].1 {
            dec += 1;
        }
    }
    let decreasing_trend = if entries.len() > 1 {
        dec as f64 / (entries.len() - 1) as f64
    } else {
        1.0
    };
    Ok(KeylemReport { entries, decreasing_trend })
}

/// The canonical mean-zero test function: the derivative of a unit
/// Gaussian, `-x e^{-x^2/2} / sqrt(2 pi)` (in 2D, the first-axis partial
/// of the unit Gaussian). Odd symmetry cancels the discrete mean down to
/// summation roundoff.
pub fn gaussian_derivative(spec: GridSpec) -> Result<GridFunction> {
    let cut2 = {
        let c = crate::kernels::GAUSS_CUTOFF_SIGMAS;
        c * c
    };
    let norm = match spec.dim() {
        Dim::One => 1.0 / libm::sqrt(2.0 * core::f64::consts::PI),
        Dim::Two => 1.0 / (2.0 * core::f64::consts::PI),
    };
    grid::sample_fn(spec, move |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        if r2 > cut2 {
            0.0
        } else {
            -x[0] * norm * libm::exp(-0.5 * r2)
        }
    })
}
