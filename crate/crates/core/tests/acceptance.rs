//! The acceptance gate: eight end-to-end criteria with pinned grids and
//! tolerances. Each test prints a single PASS line on success; a failure
//! panics with the measured numbers, so the log always states which
//! criterion fell and by how much.

use std::time::Instant;

use besov_core::grid::{convolve, lp_norm, ConvMethod, Dim, GridFunction, GridSpec, LpExponent};
use besov_core::kernels::{fractional_moment, moment_tensor_quadrature, MollifierSpec};
use besov_core::littlewood_paley::{besov_norm, BesovParams, FilterBank};
use besov_core::rate::{
    decay_exponent, eta_test, gaussian_derivative, keylem_diagnostic, mollifier_functional,
    rate_profile, EpsilonGrid, RateProfile,
};
use besov_core::verify::{
    equivalence_experiment, operator_norm_estimate, schur_bound, standard_battery,
    standard_family, KernelMatrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SLOPE_TOL: f64 = 0.15;
const RATIO_SPREAD_ONE_SIDED: f64 = 1e3;
const RATIO_SPREAD_EQUIVALENCE: f64 = 100.0;
const REFINEMENT_DRIFT: f64 = 0.10;
const KEYLEM_DROP: f64 = 0.05;
const SCHUR_SLACK: f64 = 1e-6;
const MOMENT_TOL: f64 = 1e-6;
const FFT_ORACLE_TOL: f64 = 1e-10;
const PARTITION_TOL: f64 = 1e-12;
const REGRESSION_TOL: f64 = 1e-10;

fn spec1(n: usize) -> GridSpec {
    GridSpec::new(Dim::One, n, 16.0).unwrap()
}

fn battery_kernel(id: &str) -> MollifierSpec {
    standard_battery(Dim::One)
        .unwrap()
        .into_iter()
        .find(|(b, _)| b == id)
        .unwrap_or_else(|| panic!("battery has no kernel {id}"))
        .1
}

#[test]
fn criterion_1_taylor_rate_slopes() {
    let started = Instant::now();
    let spec = spec1(4096);
    let eta = MollifierSpec::gaussian(Dim::One, &[0.0], 1.0)
        .unwrap()
        .sample(spec)
        .unwrap();
    let grid = EpsilonGrid::new(7, 4).unwrap();
    let fit_window = (2f64.powi(-7), 2f64.powi(-2));
    let cases = [
        ("cube_centered", 2.0),
        ("cube_shifted", 1.0),
        ("gaussian", 2.0),
        ("mix_k3", 3.0),
    ];
    for (id, k0) in cases {
        let rho = battery_kernel(id);
        let profile = rate_profile(&eta, &rho, LpExponent::ONE, &grid, id, "gaussian_eta").unwrap();
        let fit = decay_exponent(&profile, fit_window).unwrap();
        assert!(
            (fit.slope - k0).abs() <= SLOPE_TOL,
            "criterion 1: FAIL ({id} slope {:.4} vs k0 {k0})",
            fit.slope
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "criterion 1: FAIL (runtime {:.1}s over 30s budget)",
        elapsed.as_secs_f64()
    );
    println!(
        "criterion 1 (taylor rate slopes within {SLOPE_TOL}, {:.1}s): PASS",
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_2_cube_dichotomy() {
    let spec = spec1(4096);
    let eta = MollifierSpec::gaussian(Dim::One, &[0.0], 1.0)
        .unwrap()
        .sample(spec)
        .unwrap();
    let centered = battery_kernel("cube_centered");
    let shifted = battery_kernel("cube_shifted");
    let cases = [
        ("centered cube, s=1.5", &centered, 1.5, true),
        ("shifted cube, s=0.5", &shifted, 0.5, true),
        ("shifted cube, s=1.5", &shifted, 1.5, false),
        ("centered cube, s=2.5", &centered, 2.5, false),
    ];
    for (label, rho, s, want_converged) in cases {
        let report = eta_test(rho, &eta, s, 14, 3).unwrap();
        assert_eq!(
            report.converged, want_converged,
            "criterion 2: FAIL ({label} tail shares {:?})",
            report.tail_shares
        );
    }
    println!("criterion 2 (cube dichotomy at the tail-share threshold): PASS");
}

#[test]
fn criterion_3_vanishing_mean_diagnostic() {
    let spec = spec1(4096);
    let psi = gaussian_derivative(spec).unwrap();
    let grid = EpsilonGrid::new(8, 1).unwrap();
    for (id, rho) in standard_battery(Dim::One).unwrap() {
        let report = keylem_diagnostic(&rho, &psi, &grid).unwrap();
        let at_one = report.entries.first().unwrap().1;
        let deep = report
            .entries
            .iter()
            .find(|(eps, _)| (*eps - 2f64.powi(-8)).abs() < 1e-15)
            .unwrap()
            .1;
        assert!(
            deep < KEYLEM_DROP * at_one,
            "criterion 3: FAIL ({id}: {deep:.6} vs {KEYLEM_DROP} x {at_one:.6})"
        );
    }
    println!("criterion 3 (mean-zero convolutions die off by 2^-8): PASS");
}

struct RatioTable {
    ids: Vec<String>,
    ratios: Vec<f64>,
}

fn ratio_table(
    n: usize,
    rho: &MollifierSpec,
    kernel_id: &str,
    s: f64,
) -> RatioTable {
    let spec = spec1(n);
    let family = standard_family(spec).unwrap();
    let bank = FilterBank::with_defaults(spec).unwrap();
    let grid = EpsilonGrid::new(7, 4).unwrap();
    let params = BesovParams::new(s, LpExponent::TWO, LpExponent::TWO).unwrap();
    let report = equivalence_experiment(&family, rho, &params, &bank, &grid, kernel_id).unwrap();
    assert!(report.skipped.is_empty());
    RatioTable {
        ids: report.ratios.iter().map(|r| r.id.clone()).collect(),
        ratios: report.ratios.iter().map(|r| r.ratio).collect(),
    }
}

fn spread(ratios: &[f64]) -> f64 {
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0f64, f64::max);
    hi / lo
}

fn max_refinement_drift(coarse: &RatioTable, fine: &RatioTable) -> f64 {
    coarse
        .ids
        .iter()
        .zip(&coarse.ratios)
        .zip(&fine.ratios)
        .map(|((_, a), b)| (a - b).abs() / a)
        .fold(0.0f64, f64::max)
}

#[test]
fn criterion_4_one_sided_bound() {
    let battery = standard_battery(Dim::One).unwrap();
    let mut worst_spread = 0.0f64;
    let mut worst_drift = 0.0f64;
    for (id, rho) in &battery {
        for s in [0.5, 1.5] {
            let coarse = ratio_table(1024, rho, id, s);
            for r in &coarse.ratios {
                assert!(
                    r.is_finite() && *r > 0.0,
                    "criterion 4: FAIL ({id} s={s} ratio {r})"
                );
            }
            let sp = spread(&coarse.ratios);
            assert!(
                sp <= RATIO_SPREAD_ONE_SIDED,
                "criterion 4: FAIL ({id} s={s} spread {sp:.1})"
            );
            let fine = ratio_table(2048, rho, id, s);
            let drift = max_refinement_drift(&coarse, &fine);
            assert!(
                drift < REFINEMENT_DRIFT,
                "criterion 4: FAIL ({id} s={s} refinement drift {:.1}%)",
                100.0 * drift
            );
            worst_spread = worst_spread.max(sp);
            worst_drift = worst_drift.max(drift);
        }
    }
    println!(
        "criterion 4 (one-sided bound: worst spread {worst_spread:.1} <= 1e3, worst refinement drift {:.2}%): PASS",
        100.0 * worst_drift
    );
}

#[test]
fn criterion_5_equivalence_for_admissible_pairs() {
    let mut worst_spread = 0.0f64;
    let mut worst_drift = 0.0f64;
    for id in ["gaussian", "cube_centered"] {
        let rho = battery_kernel(id);
        let coarse = ratio_table(1024, &rho, id, 0.7);
        let sp = spread(&coarse.ratios);
        assert!(
            sp <= RATIO_SPREAD_EQUIVALENCE,
            "criterion 5: FAIL ({id} spread {sp:.1})"
        );
        let fine = ratio_table(2048, &rho, id, 0.7);
        let drift = max_refinement_drift(&coarse, &fine);
        assert!(
            drift < REFINEMENT_DRIFT,
            "criterion 5: FAIL ({id} refinement drift {:.1}%)",
            100.0 * drift
        );
        worst_spread = worst_spread.max(sp);
        worst_drift = worst_drift.max(drift);
    }
    println!(
        "criterion 5 (equivalence at s=0.7: worst spread {worst_spread:.2} <= 100, worst drift {:.2}%): PASS",
        100.0 * worst_drift
    );
}

#[test]
fn criterion_6_schur_dominance() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let n = 30;
    for trial in 0..200 {
        let data: Vec<f64> = (0..n * n).map(|_| rng.gen::<f64>()).collect();
        let k = KernelMatrix::new(n, n, data).unwrap();
        for p in [LpExponent::ONE, LpExponent::TWO, LpExponent::INFINITY] {
            let bound = schur_bound(&k, p).unwrap().bound;
            let est = operator_norm_estimate(&k, p, 120).unwrap();
            assert!(
                est <= bound * (1.0 + SCHUR_SLACK),
                "criterion 6: FAIL (trial {trial} p {:?}: estimate {est} vs bound {bound})",
                p.get()
            );
        }
    }
    println!("criterion 6 (operator-norm estimates under the mass bound, 200 matrices): PASS");
}

#[test]
fn criterion_7_moment_closed_forms() {
    // tight extent: the coverage-edge quadrature error scales as h^2/6,
    // which needs h below ~2.4e-3 to clear the tolerance
    let tight = GridSpec::new(Dim::One, 4096, 2.0).unwrap();
    let cube = battery_kernel("cube_centered");
    let second = moment_tensor_quadrature(&cube, 2, tight).unwrap();
    let diag = second.value(&[0, 0]).unwrap();
    assert!(
        (diag - 1.0 / 12.0).abs() < MOMENT_TOL,
        "criterion 7: FAIL (second moment {diag} vs 1/12)"
    );
    let frac = fractional_moment(&cube, 1.0, tight).unwrap();
    assert!(
        (frac - 0.25).abs() < MOMENT_TOL,
        "criterion 7: FAIL (fractional moment {frac} vs 1/4)"
    );
    println!("criterion 7 (cube moment 1/12 and fractional moment 1/4 by quadrature): PASS");
}

#[test]
fn criterion_8_infrastructure_oracles() {
    // convolution routes
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [16usize, 64, 128] {
        let spec = GridSpec::new(Dim::One, n, 4.0).unwrap();
        let f = GridFunction::new(spec, (0..n).map(|_| rng.gen::<f64>() - 0.5).collect()).unwrap();
        let g = GridFunction::new(spec, (0..n).map(|_| rng.gen::<f64>() - 0.5).collect()).unwrap();
        let fast = convolve(&f, &g, ConvMethod::Fft).unwrap();
        let slow = convolve(&f, &g, ConvMethod::Direct).unwrap();
        let scale = lp_norm(&slow, LpExponent::INFINITY).max(1e-30);
        let gap = lp_norm(&fast.sub(&slow).unwrap(), LpExponent::INFINITY) / scale;
        assert!(gap <= FFT_ORACLE_TOL, "criterion 8: FAIL (fft gap {gap} at n {n})");
    }
    for n in [16usize, 32] {
        let spec = GridSpec::new(Dim::Two, n, 4.0).unwrap();
        let len = n * n;
        let f =
            GridFunction::new(spec, (0..len).map(|_| rng.gen::<f64>() - 0.5).collect()).unwrap();
        let g =
            GridFunction::new(spec, (0..len).map(|_| rng.gen::<f64>() - 0.5).collect()).unwrap();
        let fast = convolve(&f, &g, ConvMethod::Fft).unwrap();
        let slow = convolve(&f, &g, ConvMethod::Direct).unwrap();
        let scale = lp_norm(&slow, LpExponent::INFINITY).max(1e-30);
        let gap = lp_norm(&fast.sub(&slow).unwrap(), LpExponent::INFINITY) / scale;
        assert!(gap <= FFT_ORACLE_TOL, "criterion 8: FAIL (2d fft gap {gap} at n {n})");
    }

    // partition of unity across the usable band
    let spec = spec1(1024);
    let bank = FilterBank::with_defaults(spec).unwrap();
    let top = (2.0f64).powi(bank.levels_max() as i32);
    for _ in 0..1000 {
        let t = rng.gen::<f64>() * top;
        let r = bank.partition_residual(t);
        assert!(r <= PARTITION_TOL, "criterion 8: FAIL (partition residual {r} at {t})");
    }

    // regression on synthetic power laws
    let grid = EpsilonGrid::new(6, 4).unwrap();
    for slope in [0.5, 1.0, 2.0, 3.25] {
        let entries: Vec<(f64, f64)> = grid
            .nodes()
            .iter()
            .map(|e| (*e, 1.7 * e.powf(slope)))
            .collect();
        let profile = RateProfile::new(
            entries,
            LpExponent::ONE,
            String::from("synthetic"),
            String::from("power"),
        )
        .unwrap();
        let fit = decay_exponent(&profile, (0.0, 1.0)).unwrap();
        assert!(
            (fit.slope - slope).abs() < REGRESSION_TOL,
            "criterion 8: FAIL (regression {} vs {slope})",
            fit.slope
        );
    }
    println!("criterion 8 (fft oracle, partition residual, regression oracle): PASS");
}
