//! Run configuration: one JSON document, strictly parsed.
//!
//! Every section rejects unknown keys, so a typo fails the run instead of
//! silently falling back to a default. Command-line `--set path=value`
//! overrides are applied to the document before parsing, where `path` is a
//! dotted route to a leaf (`besov.s`, `grid.n`, `kernel.kind`).

use std::fs;
use std::path::Path;

use besov_core::grid::{Dim, GridSpec, LpExponent};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub grid: GridSpec,
    /// Kernel descriptor, interpreted by the descriptor module.
    pub kernel: Value,
    /// Function descriptor, interpreted by the descriptor module.
    pub function: Value,
    pub besov: BesovConfig,
    pub epsilon_grid: EpsConfig,
    pub eta: EtaConfig,
    pub moments: MomentConfig,
    pub fit: FitConfig,
    pub verify: VerifyConfig,
    pub output_dir: String,
}

#[derive(Debug, Clone, Copy)]
pub struct BesovConfig {
    pub s: f64,
    pub p: LpExponent,
    pub q: LpExponent,
}

#[derive(Debug, Clone, Copy)]
pub struct EpsConfig {
    pub j_max: usize,
    pub samples_per_block: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct EtaConfig {
    pub levels: usize,
    pub eps_samples: usize,
}

#[derive(Debug, Clone)]
pub struct MomentConfig {
    pub k_max: usize,
    pub fractional_s: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct FitConfig {
    pub eps_lo: Option<f64>,
    pub eps_hi: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub two_sided_cap: f64,
    pub one_sided_cap: f64,
    pub schur_trials: usize,
    pub schur_size: usize,
}

pub fn load(path: Option<&Path>, sets: &[String]) -> Result<RunConfig, CliError> {
    let mut doc = match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::config(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::config(format!("{}: {e}", p.display())))?
        }
        None => Value::Object(Default::default()),
    };
    if !doc.is_object() {
        return Err(CliError::config("configuration root must be a JSON object"));
    }
    for set in sets {
        apply_set(&mut doc, set)?;
    }
    parse(&doc)
}

/// `path=value`; the value is JSON when it parses as JSON, a bare string
/// otherwise, so `--set besov.q=inf` and `--set kernel.kind=cube` work
/// without shell-quoted quotes.
fn apply_set(doc: &mut Value, set: &str) -> Result<(), CliError> {
    let (path, raw) = set
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("--set needs path=value, got {set:?}")))?;
    if path.is_empty() {
        return Err(CliError::config(format!("--set has an empty path: {set:?}")));
    }
    let value: Value = serde_json::from_str(raw).unwrap_or(Value::String(String::from(raw)));
    let mut node = &mut *doc;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        if seg.is_empty() {
            return Err(CliError::config(format!("--set path has an empty segment: {path}")));
        }
        let map = node.as_object_mut().ok_or_else(|| {
            CliError::config(format!("--set {path}: {} is not an object", segments[..i].join(".")))
        })?;
        if i + 1 == segments.len() {
            map.insert(String::from(*seg), value);
            return Ok(());
        }
        node = map
            .entry(String::from(*seg))
            .or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("split('.') yields at least one segment");
}

fn parse(doc: &Value) -> Result<RunConfig, CliError> {
    let root = section(doc, "")?;
    check_keys(
        root,
        &[
            "grid", "kernel", "function", "besov", "epsilon_grid", "eta", "moments", "fit",
            "verify", "output_dir",
        ],
        "",
    )?;

    let grid = {
        let g = member_section(root, "grid")?;
        check_keys(&g, &["dim", "n", "extent"], "grid")?;
        let dim = match get_u64(&g, "dim", "grid", 1)? {
            1 => Dim::One,
            2 => Dim::Two,
            d => return Err(CliError::config(format!("grid.dim must be 1 or 2, got {d}"))),
        };
        let n = get_u64(&g, "n", "grid", 1024)? as usize;
        let extent = get_f64(&g, "extent", "grid", 16.0)?;
        GridSpec::new(dim, n, extent)?
    };

    let kernel = root
        .get("kernel")
        .cloned()
        .unwrap_or_else(|| serde_json::json!({ "kind": "gaussian" }));
    let function = root
        .get("function")
        .cloned()
        .unwrap_or_else(|| serde_json::json!({ "kind": "gaussian" }));

    let besov = {
        let b = member_section(root, "besov")?;
        check_keys(&b, &["s", "p", "q"], "besov")?;
        BesovConfig {
            s: get_f64(&b, "s", "besov", 0.7)?,
            p: get_exponent(&b, "p", "besov", 2.0)?,
            q: get_exponent(&b, "q", "besov", 2.0)?,
        }
    };

    let epsilon_grid = {
        let e = member_section(root, "epsilon_grid")?;
        check_keys(&e, &["j_max", "samples_per_block"], "epsilon_grid")?;
        EpsConfig {
            j_max: get_u64(&e, "j_max", "epsilon_grid", 7)? as usize,
            samples_per_block: get_u64(&e, "samples_per_block", "epsilon_grid", 4)? as usize,
        }
    };

    let eta = {
        let e = member_section(root, "eta")?;
        check_keys(&e, &["levels", "eps_samples"], "eta")?;
        EtaConfig {
            levels: get_u64(&e, "levels", "eta", 12)? as usize,
            eps_samples: get_u64(&e, "eps_samples", "eta", 3)? as usize,
        }
    };

    let moments = {
        let m = member_section(root, "moments")?;
        check_keys(&m, &["k_max", "fractional_s"], "moments")?;
        let fractional_s = match m.get("fractional_s") {
            None => vec![0.5],
            Some(v) => as_f64_array(v, "moments.fractional_s")?,
        };
        MomentConfig { k_max: get_u64(&m, "k_max", "moments", 6)? as usize, fractional_s }
    };

    let fit = {
        let f = member_section(root, "fit")?;
        check_keys(&f, &["eps_lo", "eps_hi"], "fit")?;
        FitConfig {
            eps_lo: opt_f64(&f, "eps_lo", "fit")?,
            eps_hi: opt_f64(&f, "eps_hi", "fit")?,
        }
    };

    let verify = {
        let v = member_section(root, "verify")?;
        check_keys(&v, &["two_sided_cap", "one_sided_cap", "schur_trials", "schur_size"], "verify")?;
        VerifyConfig {
            two_sided_cap: get_f64(&v, "two_sided_cap", "verify", 100.0)?,
            one_sided_cap: get_f64(&v, "one_sided_cap", "verify", 1000.0)?,
            schur_trials: get_u64(&v, "schur_trials", "verify", 200)? as usize,
            schur_size: get_u64(&v, "schur_size", "verify", 30)? as usize,
        }
    };

    let output_dir = match root.get("output_dir") {
        None => String::from("."),
        Some(Value::String(s)) => s.clone(),
        Some(v) => {
            return Err(CliError::config(format!("output_dir must be a string, got {v}")))
        }
    };

    Ok(RunConfig {
        grid,
        kernel,
        function,
        besov,
        epsilon_grid,
        eta,
        moments,
        fit,
        verify,
        output_dir,
    })
}

type Map = serde_json::Map<String, Value>;

fn section<'a>(v: &'a Value, ctx: &str) -> Result<&'a Map, CliError> {
    v.as_object().ok_or_else(|| {
        let what = if ctx.is_empty() { "configuration root" } else { ctx };
        CliError::config(format!("{what} must be a JSON object"))
    })
}

/// Section lookup that tolerates absence: missing sections use defaults.
fn member_section(root: &Map, key: &str) -> Result<Map, CliError> {
    match root.get(key) {
        None => Ok(Map::default()),
        Some(v) => Ok(section(v, key)?.clone()),
    }
}

fn check_keys(map: &Map, allowed: &[&str], ctx: &str) -> Result<(), CliError> {
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            let place = if ctx.is_empty() { String::new() } else { format!(" in {ctx}") };
            return Err(CliError::config(format!(
                "unknown configuration key {key:?}{place}; allowed: {}",
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}

fn get_f64(map: &Map, key: &str, ctx: &str, default: f64) -> Result<f64, CliError> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| CliError::config(format!("{ctx}.{key} must be a number, got {v}"))),
    }
}

fn opt_f64(map: &Map, key: &str, ctx: &str) -> Result<Option<f64>, CliError> {
    match map.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| CliError::config(format!("{ctx}.{key} must be a number, got {v}"))),
    }
}

fn get_u64(map: &Map, key: &str, ctx: &str, default: u64) -> Result<u64, CliError> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v.as_u64().ok_or_else(|| {
            CliError::config(format!("{ctx}.{key} must be a nonnegative integer, got {v}"))
        }),
    }
}

/// Lebesgue exponents accept a number or the string `"inf"`.
fn get_exponent(map: &Map, key: &str, ctx: &str, default: f64) -> Result<LpExponent, CliError> {
    let raw = match map.get(key) {
        None => default,
        Some(Value::String(s)) if s.eq_ignore_ascii_case("inf") => f64::INFINITY,
        Some(v) => v.as_f64().ok_or_else(|| {
            CliError::config(format!("{ctx}.{key} must be a number or \"inf\", got {v}"))
        })?,
    };
    Ok(LpExponent::new(raw)?)
}

fn as_f64_array(v: &Value, ctx: &str) -> Result<Vec<f64>, CliError> {
    let arr = v
        .as_array()
        .ok_or_else(|| CliError::config(format!("{ctx} must be an array of numbers")))?;
    arr.iter()
        .map(|x| {
            x.as_f64()
                .ok_or_else(|| CliError::config(format!("{ctx} must hold numbers, got {x}")))
        })
        .collect()
}
