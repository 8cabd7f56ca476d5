// compile check for the README example
use besov_core::grid::{sample_fn, Dim, GridSpec, LpExponent};
use besov_core::kernels::MollifierSpec;
use besov_core::littlewood_paley::{besov_norm, BesovParams, FilterBank};
use besov_core::rate::{mollifier_functional, EpsilonGrid};

#[test]
fn readme_example_compiles_and_agrees() -> besov_core::Result<()> {
    let spec = GridSpec::new(Dim::One, 1024, 16.0)?;
    let f = sample_fn(spec, |&[x, _]| (-x * x / 2.0).exp())?;
    let params = BesovParams::new(0.7, LpExponent::TWO, LpExponent::TWO)?;

    let bank = FilterBank::with_defaults(spec)?;
    let dyadic = besov_norm(&f, &bank, &params)?;

    let rho = MollifierSpec::gaussian(Dim::One, &[0.0], 1.0)?;
    let eps = EpsilonGrid::new(7, 4)?;
    let functional = mollifier_functional(&f, &rho, &params, &eps)?;
    assert!(dyadic.value > 0.0 && functional.value > 0.0);
    Ok(())
}
