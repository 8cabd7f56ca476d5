//! Dyadic frequency decomposition and the smoothness norms built on it.
//!
//! The filter bank consists of a radial low-pass profile `zeta_hat` (1 on
//! the unit ball, 0 outside radius 2, smooth in between), the band profile
//! `phi_hat(t) = zeta_hat(t/2) - zeta_hat(t)`, and an auxiliary profile
//! `psi_hat` that is 1 on the support of `phi_hat` and 0 at the origin.
//! Dilations of `phi_hat` tile frequency space into dyadic annuli, and the
//! telescoping identity
//!
//! `zeta_hat(xi) + sum_{j=1..J} phi_hat(2^{1-j} xi) = zeta_hat(2^-J xi)`
//!
//! makes the finite partition of unity exact (to roundoff) below `2^J`.
//! The smoothness seminorm weights the resulting pieces by `2^{s j}` in
//! `l^q`; truncation at the grid's top usable level `J` is surfaced as a
//! last-level share diagnostic instead of being hidden.

use alloc::vec::Vec;

use crate::fft::C64;
use crate::grid::{lp_norm, GridFunction, GridSpec, LpExponent};
use crate::{Error, Result};

/// Default inner transition offset: the low-pass stays 1 out to `1 + 0.1`.
pub const DELTA_IN_DEFAULT: f64 = 0.1;

/// Default outer transition offset: the low-pass vanishes from `2 - 0.1`.
pub const DELTA_OUT_DEFAULT: f64 = 0.1;

/// A reported value is converged when the top level carries less than
/// this share of the total.
pub const TRUNCATION_SHARE_MAX: f64 = 0.05;

/// Fewest dyadic levels worth decomposing over.
pub const MIN_LEVELS: usize = 3;

/// Nodes of the cumulative smoothstep table.
const SMOOTH_NODES: usize = 8193;

/// Rise interval of the auxiliary profile `psi_hat`.
const PSI_RISE: (f64, f64) = (0.8, 0.95);

/// Fall interval of the auxiliary profile `psi_hat`.
const PSI_FALL: (f64, f64) = (4.2, 5.0);

/// Smoothness-norm parameters: exponent `s`, integrability `p`, and the
/// level-summation exponent `q` (infinity exact for both exponents).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BesovParams {
    pub s: f64,
    pub p: LpExponent,
    pub q: LpExponent,
}

impl BesovParams {
    pub fn new(s: f64, p: LpExponent, q: LpExponent) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidSmoothness(s));
        }
        Ok(BesovParams { s, p, q })
    }
}

/// Radial filter profiles tied to one grid. Immutable after construction;
/// reproducible from `(spec, delta_in, delta_out)` alone.
#[derive(Debug, Clone)]
pub struct FilterBank {
    spec: GridSpec,
    delta_in: f64,
    delta_out: f64,
    levels_max: usize,
    smooth: Vec<f64>,
}

/// Largest dyadic level the grid supports: the top band's frequency
/// support must stay under the Nyquist frequency `pi N / (2 L)`, giving
/// `J = floor(log2(pi N / (8 L)))`.
pub fn levels_for(spec: &GridSpec) -> i64 {
    let arg = core::f64::consts::PI * spec.n() as f64 / (8.0 * spec.extent());
    libm::floor(libm::log2(arg)) as i64
}

impl FilterBank {
    /// Build the bank. The low-pass profile is 1 on `[0, 1 + delta_in]`,
    /// 0 on `[2 - delta_out, inf)`, and a smoothstep in between, so the
    /// transition window must be a nonempty subinterval of `(1, 2)`.
    pub fn build(spec: GridSpec, delta_in: f64, delta_out: f64) -> Result<Self> {
        if !(delta_in > 0.0 && delta_out > 0.0 && 1.0 + delta_in < 2.0 - delta_out) {
            return Err(Error::InvalidFilter(alloc::format!(
                "transition window [{}, {}] must be a nonempty subinterval of (1, 2)",
                1.0 + delta_in,
                2.0 - delta_out
            )));
        }
        let j = levels_for(&spec);
        if j < MIN_LEVELS as i64 {
            return Err(Error::GridTooCoarse { levels: j.max(0) as i32 });
        }
        Ok(FilterBank {
            spec,
            delta_in,
            delta_out,
            levels_max: j as usize,
            smooth: build_smoothstep(),
        })
    }

    /// Bank with the default transition offsets.
    pub fn with_defaults(spec: GridSpec) -> Result<Self> {
        FilterBank::build(spec, DELTA_IN_DEFAULT, DELTA_OUT_DEFAULT)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Top usable dyadic level `J`.
    pub fn levels_max(&self) -> usize {
        self.levels_max
    }

    /// Smoothstep `g: [0,1] -> [0,1]`, exactly 0 and 1 at the ends, flat
    /// to all orders there.
    fn smoothstep(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        let pos = u * (SMOOTH_NODES - 1) as f64;
        let i = libm::floor(pos) as usize;
        if i + 1 >= SMOOTH_NODES {
            return 1.0;
        }
        let frac = pos - i as f64;
        self.smooth[i] * (1.0 - frac) + self.smooth[i + 1] * frac
    }

    /// Radial low-pass profile: 1 for `t <= 1 + delta_in`, 0 for
    /// `t >= 2 - delta_out`.
    pub fn zeta_hat(&self, t: f64) -> f64 {
        let a = 1.0 + self.delta_in;
        let b = 2.0 - self.delta_out;
        let t = libm::fabs(t);
        if t <= a {
            1.0
        } else if t >= b {
            0.0
        } else {
            1.0 - self.smoothstep((t - a) / (b - a))
        }
    }

    /// Radial band profile `zeta_hat(t/2) - zeta_hat(t)`, supported in
    /// the annulus `(1, 4)`.
    pub fn phi_hat(&self, t: f64) -> f64 {
        self.zeta_hat(0.5 * t) - self.zeta_hat(t)
    }

    /// Auxiliary profile: 0 at the origin, 1 on the support of `phi_hat`,
    /// compactly supported in `(0.8, 5)`.
    pub fn psi_hat(&self, t: f64) -> f64 {
        let t = libm::fabs(t);
        if t <= PSI_RISE.0 || t >= PSI_FALL.1 {
            0.0
        } else if t < PSI_RISE.1 {
            self.smoothstep((t - PSI_RISE.0) / (PSI_RISE.1 - PSI_RISE.0))
        } else if t <= PSI_FALL.0 {
            1.0
        } else {
            1.0 - self.smoothstep((t - PSI_FALL.0) / (PSI_FALL.1 - PSI_FALL.0))
        }
    }

    /// Fourier multiplier of decomposition level `j`: the low-pass for
    /// `j = 0`, the dilated band `phi_hat(2^{1-j} t)` for `j >= 1`, whose
    /// support sits inside the annulus `(2^{j-1}, 2^{j+1})`.
    pub fn band_multiplier(&self, j: usize, t: f64) -> f64 {
        if j == 0 {
            self.zeta_hat(t)
        } else {
            self.phi_hat(libm::exp2(1.0 - j as f64) * t)
        }
    }

    /// Deviation of the telescoped multiplier sum from 1 at radial
    /// frequency `t`; exact (to roundoff) for `t <= 2^J`.
    pub fn partition_residual(&self, t: f64) -> f64 {
        let mut acc = self.zeta_hat(t);
        for j in 1..=self.levels_max {
            acc += self.band_multiplier(j, t);
        }
        libm::fabs(acc - 1.0)
    }
}

/// Cumulative integral of `exp(-1/(u(1-u)))`, normalized to end at 1.
fn build_smoothstep() -> Vec<f64> {
    let n = SMOOTH_NODES;
    let du = 1.0 / (n - 1) as f64;
    let w = |u: f64| -> f64 {
        if u <= 0.0 || u >= 1.0 {
            0.0
        } else {
            libm::exp(-1.0 / (u * (1.0 - u)))
        }
    };
    let mut cum = Vec::with_capacity(n);
    cum.push(0.0);
    let mut acc = 0.0;
    let mut prev = w(0.0);
    for i in 1..n {
        let cur = w(du * i as f64);
        acc += 0.5 * (prev + cur) * du;
        cum.push(acc);
        prev = cur;
    }
    let total = cum[n - 1];
    for v in cum.iter_mut() {
        *v /= total;
    }
    cum
}

/// The decomposition `f = sum_j f_j`: level 0 carries frequencies below
/// 2, level `j >= 1` the annulus around `2^j`.
#[derive(Debug, Clone)]
pub struct LPDecomposition {
    pieces: Vec<GridFunction>,
}

impl LPDecomposition {
    /// Pieces `f_0 ..= f_J` in level order.
    pub fn pieces(&self) -> &[GridFunction] {
        &self.pieces
    }

    pub fn into_pieces(self) -> Vec<GridFunction> {
        self.pieces
    }

    /// Sum of all pieces: the smooth band-limited projection of the
    /// input (exactly the input when it carries no frequencies above
    /// `2^J`).
    pub fn reconstruct(&self) -> GridFunction {
        let spec = *self.pieces[0].spec();
        let mut acc = GridFunction::zeros(spec);
        for p in &self.pieces {
            acc = acc.sub(&p.scale(-1.0)).expect("pieces share one grid");
        }
        acc
    }
}

/// Split `f` into its dyadic frequency pieces under `bank`.
pub fn lp_decompose(f: &GridFunction, bank: &FilterBank) -> Result<LPDecomposition> {
    if f.spec() != bank.spec() {
        return Err(Error::SpecMismatch);
    }
    let spec = *f.spec();
    let hat = f.fft();
    let mut pieces = Vec::with_capacity(bank.levels_max + 1);
    for j in 0..=bank.levels_max {
        let filtered: Vec<C64> = hat
            .iter()
            .enumerate()
            .map(|(flat, v)| v.scale(bank.band_multiplier(j, spec.freq_abs(flat))))
            .collect();
        pieces.push(GridFunction::from_fft(spec, filtered)?);
    }
    Ok(LPDecomposition { pieces })
}

/// A level-truncated value together with its truncation diagnostic: the
/// share of the top level in the total, and whether that share is under
/// [`TRUNCATION_SHARE_MAX`].
#[derive(Debug, Clone, Copy)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TruncatedValue {
    pub value: f64,
    pub last_level_share: f64,
    pub converged: bool,
}

fn truncated(value: f64, last_term: f64, total: f64) -> TruncatedValue {
    let share = if total > 0.0 { last_term / total } else { 0.0 };
    TruncatedValue { value, last_level_share: share, converged: share < TRUNCATION_SHARE_MAX }
}

/// Seminorm of an existing decomposition:
/// `(sum_j 2^{s j q} |f_j|_p^q)^{1/q}`, with the sup over levels at
/// `q = inf`.
pub fn seminorm_of_pieces(decomp: &LPDecomposition, params: &BesovParams) -> TruncatedValue {
    let s = params.s;
    let norms: Vec<f64> = decomp
        .pieces
        .iter()
        .enumerate()
        .map(|(j, f_j)| libm::exp2(s * j as f64) * lp_norm(f_j, params.p))
        .collect();
    if params.q.is_infinite() {
        let sup = norms.iter().fold(0.0f64, |a, v| a.max(*v));
        return truncated(sup, *norms.last().unwrap_or(&0.0), sup);
    }
    let q = params.q.get();
    let total: f64 = norms.iter().map(|v| libm::pow(*v, q)).sum();
    let last = libm::pow(*norms.last().unwrap_or(&0.0), q);
    truncated(libm::pow(total, 1.0 / q), last, total)
}

/// Dyadic smoothness seminorm of `f` under `bank`.
pub fn besov_seminorm(
    f: &GridFunction,
    bank: &FilterBank,
    params: &BesovParams,
) -> Result<TruncatedValue> {
    Ok(seminorm_of_pieces(&lp_decompose(f, bank)?, params))
}

/// Full norm: `(|f|_p^q + seminorm^q)^{1/q}` (max of the two at
/// `q = inf`). The diagnostic is inherited from the seminorm part.
pub fn besov_norm(
    f: &GridFunction,
    bank: &FilterBank,
    params: &BesovParams,
) -> Result<TruncatedValue> {
    let semi = besov_seminorm(f, bank, params)?;
    let lp = lp_norm(f, params.p);
    let value = if params.q.is_infinite() {
        lp.max(semi.value)
    } else {
        let q = params.q.get();
        libm::pow(libm::pow(lp, q) + libm::pow(semi.value, q), 1.0 / q)
    };
    Ok(TruncatedValue { value, ..semi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample_fn, Dim};
    use alloc::vec::Vec;
    use rand::{Rng, SeedableRng};

    fn bank_1024() -> FilterBank {
        let spec = GridSpec::new(Dim::One, 1024, 16.0).unwrap();
        FilterBank::with_defaults(spec).unwrap()
    }

    #[test]
    fn level_budget() {
        assert_eq!(bank_1024().levels_max(), 4);
        let coarse = GridSpec::new(Dim::One, 128, 16.0).unwrap();
        assert!(matches!(
            FilterBank::with_defaults(coarse),
            Err(Error::GridTooCoarse { .. })
        ));
        let bad = GridSpec::new(Dim::One, 1024, 16.0).unwrap();
        assert!(FilterBank::build(bad, 0.6, 0.5).is_err());
    }

    #[test]
    fn profile_supports() {
        let bank = bank_1024();
        assert_eq!(bank.zeta_hat(0.0), 1.0);
        assert_eq!(bank.zeta_hat(1.1), 1.0);
        assert_eq!(bank.zeta_hat(1.9), 0.0);
        let mid = bank.zeta_hat(1.5);
        assert!(mid > 0.0 && mid < 1.0);
        assert_eq!(bank.phi_hat(0.5), 0.0);
        assert_eq!(bank.phi_hat(1.0), 0.0);
        assert_eq!(bank.phi_hat(2.0), 1.0);
        assert_eq!(bank.phi_hat(4.0), 0.0);
        assert_eq!(bank.psi_hat(0.0), 0.0);
        for t in [1.1_f64, 2.0, 3.0, 3.8] {
            assert_eq!(bank.psi_hat(t), 1.0, "psi must be 1 on the band support at {t}");
        }
        assert_eq!(bank.psi_hat(5.0), 0.0);
        // profile stays within [0, 1]
        for i in 0..400 {
            let t = i as f64 * 0.01;
            let z = bank.zeta_hat(t);
            assert!((0.0..=1.0).contains(&z));
        }
    }

    #[test]
    fn partition_of_unity_random_frequencies() {
        let bank = bank_1024();
        let cap = libm::exp2(bank.levels_max() as f64);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let t: f64 = rng.gen_range(0.0..cap);
            assert!(bank.partition_residual(t) <= 1e-12, "residual at {t}");
        }
    }

    #[test]
    fn constant_stays_in_level_zero() {
        let bank = bank_1024();
        let spec = *bank.spec();
        let f = GridFunction::new(spec, alloc::vec![1.5; spec.len()]).unwrap();
        let d = lp_decompose(&f, &bank).unwrap();
        for (a, b) in d.pieces()[0].values().iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        for piece in &d.pieces()[1..] {
            assert!(lp_norm(piece, LpExponent::INFINITY) < 1e-12);
        }
    }

    #[test]
    fn cosine_lands_in_adjacent_bands() {
        let bank = bank_1024();
        let spec = *bank.spec();
        // |xi| = 3 sits in the annuli of levels 1 and 2 only
        let k = (3.0 * spec.extent() / core::f64::consts::PI) as usize;
        let xi = spec.axis_freq(k);
        let f = sample_fn(spec, |x| libm::cos(xi * x[0])).unwrap();
        let d = lp_decompose(&f, &bank).unwrap();
        let norms: Vec<f64> = d.pieces().iter().map(|p| lp_norm(p, LpExponent::TWO)).collect();
        assert!(norms[1] + norms[2] > 0.9 * lp_norm(&f, LpExponent::TWO));
        assert!(norms[0] < 1e-12);
        for n in &norms[3..] {
            assert!(*n < 1e-12);
        }
    }

    #[test]
    fn single_band_seminorm_identity() {
        let bank = bank_1024();
        let spec = *bank.spec();
        // pick a grid frequency in the flat part of band 3's multiplier
        let k = libm::round(8.0 * spec.extent() / core::f64::consts::PI) as usize;
        let xi = spec.axis_freq(k);
        assert_eq!(bank.band_multiplier(3, xi), 1.0);
        let f = sample_fn(spec, |x| libm::cos(xi * x[0])).unwrap();
        let params =
            BesovParams::new(1.0, LpExponent::TWO, LpExponent::TWO).unwrap();
        let semi = besov_seminorm(&f, &bank, &params).unwrap();
        let expected = 8.0 * lp_norm(&f, LpExponent::TWO);
        assert!(
            (semi.value - expected).abs() <= 1e-8 * expected,
            "{} vs {expected}",
            semi.value
        );
    }

    #[test]
    fn reconstruction_of_band_limited_input() {
        let bank = bank_1024();
        let spec = *bank.spec();
        let xi1 = spec.axis_freq(5);
        let xi2 = spec.axis_freq(40);
        let f = sample_fn(spec, |x| {
            libm::cos(xi1 * x[0]) + 0.3 * libm::sin(xi2 * x[0])
        })
        .unwrap();
        let d = lp_decompose(&f, &bank).unwrap();
        let r = d.reconstruct();
        let err = lp_norm(&r.sub(&f).unwrap(), LpExponent::TWO);
        assert!(err <= 1e-10 * lp_norm(&f, LpExponent::TWO));
    }

    #[test]
    fn seminorm_monotone_in_s_and_homogeneous() {
        let bank = bank_1024();
        let spec = *bank.spec();
        let f = sample_fn(spec, |x| libm::exp(-x[0] * x[0])).unwrap();
        let mut prev = 0.0;
        for s in [0.3, 0.7, 1.1, 1.9] {
            let params = BesovParams::new(s, LpExponent::TWO, LpExponent::TWO).unwrap();
            let v = besov_seminorm(&f, &bank, &params).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
        let params = BesovParams::new(0.7, LpExponent::TWO, LpExponent::TWO).unwrap();
        let one = besov_seminorm(&f, &bank, &params).unwrap().value;
        let two = besov_seminorm(&f.scale(2.0), &bank, &params).unwrap().value;
        assert!((two - 2.0 * one).abs() < 1e-12 * one.max(1.0));
    }

    #[test]
    fn zero_function_norms() {
        let bank = bank_1024();
        let f = GridFunction::zeros(*bank.spec());
        let params = BesovParams::new(1.0, LpExponent::TWO, LpExponent::INFINITY).unwrap();
        let n = besov_norm(&f, &bank, &params).unwrap();
        assert_eq!(n.value, 0.0);
        assert!(n.converged);
    }
}
