//! Kernel and function descriptors.
//!
//! Both are small JSON objects with a `kind` tag. Kernels build a
//! [`MollifierSpec`]; functions sample onto the configured grid. Unknown
//! kinds and unknown fields are configuration errors.

use std::path::{Path, PathBuf};

use besov_core::grid::{sample_fn, Dim, GridFunction, GridSpec};
use besov_core::kernels::{MixtureTerm, MollifierSpec};
use besov_core::verify::standard_family;
use serde_json::Value;

use crate::bgf;
use crate::error::CliError;

/// Resolved kernel plus a stable id for output labeling.
#[derive(Debug)]
pub struct KernelChoice {
    pub id: String,
    pub spec: MollifierSpec,
}

pub fn kernel_from_value(v: &Value, dim: Dim) -> Result<KernelChoice, CliError> {
    let (kind, map) = tagged(v, "kernel")?;
    match kind {
        "gaussian" => {
            keys(map, &["kind", "center", "variance"], "kernel")?;
            let center = coords(map, "center", dim)?;
            let variance = num_or(map, "variance", 1.0, "kernel")?;
            Ok(KernelChoice {
                id: String::from("gaussian"),
                spec: MollifierSpec::gaussian(dim, &center, variance)?,
            })
        }
        "cube" => {
            keys(map, &["kind", "lo", "hi"], "kernel")?;
            let lo = coords_or(map, "lo", dim, -0.5)?;
            let hi = coords_or(map, "hi", dim, 0.5)?;
            Ok(KernelChoice { id: String::from("cube"), spec: MollifierSpec::cube(dim, &lo, &hi)? })
        }
        "bump" => {
            keys(map, &["kind", "radius"], "kernel")?;
            let radius = num_or(map, "radius", 1.0, "kernel")?;
            Ok(KernelChoice { id: String::from("bump"), spec: MollifierSpec::bump(dim, radius)? })
        }
        "mixture" => {
            keys(map, &["kind", "components"], "kernel")?;
            let comps = map
                .get("components")
                .and_then(Value::as_array)
                .ok_or_else(|| CliError::config("kernel.components must be an array"))?;
            let mut terms = Vec::with_capacity(comps.len());
            for c in comps {
                terms.push(mixture_term(c, dim)?);
            }
            Ok(KernelChoice {
                id: String::from("mixture"),
                spec: MollifierSpec::mixture(dim, terms)?,
            })
        }
        "sampled" => {
            keys(map, &["kind", "path"], "kernel")?;
            let path = path_field(map, "kernel")?;
            let g = bgf::read_grid_function(&path)?;
            if g.spec().dim() != dim {
                return Err(CliError::config(format!(
                    "kernel file {} is {}-dimensional, the grid is {}-dimensional",
                    path.display(),
                    g.spec().dim().axes(),
                    dim.axes()
                )));
            }
            Ok(KernelChoice {
                id: format!("sampled:{}", path.display()),
                spec: MollifierSpec::sampled(g)?,
            })
        }
        "battery" => {
            keys(map, &["kind", "id"], "kernel")?;
            let id = map
                .get("id")
                .and_then(Value::as_str)
                .ok_or_else(|| CliError::config("kernel.id must name a battery member"))?;
            let battery = besov_core::verify::standard_battery(dim)?;
            let names: Vec<&str> = battery.iter().map(|(n, _)| n.as_str()).collect();
            battery
                .iter()
                .find(|(n, _)| n == id)
                .map(|(n, k)| KernelChoice { id: n.clone(), spec: k.clone() })
                .ok_or_else(|| {
                    CliError::config(format!(
                        "unknown battery kernel {id:?}; available: {}",
                        names.join(", ")
                    ))
                })
        }
        other => Err(CliError::config(format!(
            "unknown kernel kind {other:?}; expected gaussian, cube, bump, mixture, sampled, \
             or battery"
        ))),
    }
}

fn mixture_term(v: &Value, dim: Dim) -> Result<MixtureTerm, CliError> {
    let (kind, map) = tagged(v, "mixture component")?;
    let weight = num_or(map, "weight", f64::NAN, "component")?;
    if weight.is_nan() {
        return Err(CliError::config("every mixture component needs a weight"));
    }
    let form = match kind {
        "gaussian" => {
            keys(map, &["kind", "weight", "center", "variance"], "component")?;
            let center = coords(map, "center", dim)?;
            let variance = num_or(map, "variance", 1.0, "component")?;
            let probe = MollifierSpec::gaussian(dim, &center, variance)?;
            probe.form().clone()
        }
        "cube" => {
            keys(map, &["kind", "weight", "lo", "hi"], "component")?;
            let lo = coords_or(map, "lo", dim, -0.5)?;
            let hi = coords_or(map, "hi", dim, 0.5)?;
            MollifierSpec::cube(dim, &lo, &hi)?.form().clone()
        }
        "bump" => {
            keys(map, &["kind", "weight", "radius"], "component")?;
            MollifierSpec::bump(dim, num_or(map, "radius", 1.0, "component")?)?.form().clone()
        }
        other => {
            return Err(CliError::config(format!(
                "mixture components must be gaussian, cube, or bump, got {other:?}"
            )))
        }
    };
    Ok(MixtureTerm { weight, form })
}

/// Resolved function plus a stable id.
#[derive(Debug)]
pub struct FunctionChoice {
    pub id: String,
    pub f: GridFunction,
}

pub fn function_from_value(v: &Value, spec: GridSpec) -> Result<FunctionChoice, CliError> {
    let (kind, map) = tagged(v, "function")?;
    match kind {
        "gaussian" => {
            keys(map, &["kind", "center", "variance"], "function")?;
            let center = coords_or(map, "center", spec.dim(), 0.0)?;
            let variance = num_or(map, "variance", 1.0, "function")?;
            if !(variance > 0.0 && variance.is_finite()) {
                return Err(CliError::config(format!(
                    "function.variance must be positive, got {variance}"
                )));
            }
            let c = [center[0], *center.get(1).unwrap_or(&0.0)];
            let f = sample_fn(spec, move |x| {
                let dx = x[0] - c[0];
                let dy = x[1] - c[1];
                (-(dx * dx + dy * dy) / (2.0 * variance)).exp()
            })?;
            Ok(FunctionChoice { id: String::from("gaussian"), f })
        }
        "zero" => {
            keys(map, &["kind"], "function")?;
            Ok(FunctionChoice { id: String::from("zero"), f: GridFunction::zeros(spec) })
        }
        "family" => {
            keys(map, &["kind", "member"], "function")?;
            let member = map
                .get("member")
                .and_then(Value::as_str)
                .ok_or_else(|| CliError::config("function.member must name a family member"))?;
            let family = standard_family(spec)?;
            let names: Vec<&str> = family.members().iter().map(|m| m.id.as_str()).collect();
            family
                .members()
                .iter()
                .find(|m| m.id == member)
                .map(|m| FunctionChoice { id: format!("family:{}", m.id), f: m.f.clone() })
                .ok_or_else(|| {
                    CliError::config(format!(
                        "unknown family member {member:?}; available: {}",
                        names.join(", ")
                    ))
                })
        }
        "bgf1" => {
            keys(map, &["kind", "path"], "function")?;
            let path = path_field(map, "function")?;
            let f = bgf::read_grid_function(&path)?;
            if *f.spec() != spec {
                return Err(CliError::config(format!(
                    "function file {} holds a {}-point grid of extent {}, the configuration \
                     asks for {} points of extent {}",
                    path.display(),
                    f.spec().n(),
                    f.spec().extent(),
                    spec.n(),
                    spec.extent()
                )));
            }
            Ok(FunctionChoice { id: format!("bgf1:{}", path.display()), f })
        }
        "csv" => {
            keys(map, &["kind", "path"], "function")?;
            let path = path_field(map, "function")?;
            let values = bgf::read_values_csv(&path, spec.len())?;
            Ok(FunctionChoice {
                id: format!("csv:{}", path.display()),
                f: GridFunction::new(spec, values)?,
            })
        }
        other => Err(CliError::config(format!(
            "unknown function kind {other:?}; expected gaussian, zero, family, bgf1, or csv"
        ))),
    }
}

type Map = serde_json::Map<String, Value>;

fn tagged<'a>(v: &'a Value, what: &str) -> Result<(&'a str, &'a Map), CliError> {
    let map = v
        .as_object()
        .ok_or_else(|| CliError::config(format!("{what} must be a JSON object")))?;
    let kind = map
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::config(format!("{what} needs a string field \"kind\"")))?;
    Ok((kind, map))
}

fn keys(map: &Map, allowed: &[&str], ctx: &str) -> Result<(), CliError> {
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(CliError::config(format!(
                "unknown field {key:?} in {ctx}; allowed: {}",
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}

fn num_or(map: &Map, key: &str, default: f64, ctx: &str) -> Result<f64, CliError> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| CliError::config(format!("{ctx}.{key} must be a number, got {v}"))),
    }
}

/// Required coordinate array with one entry per axis.
fn coords(map: &Map, key: &str, dim: Dim) -> Result<Vec<f64>, CliError> {
    coords_or(map, key, dim, 0.0)
}

fn coords_or(map: &Map, key: &str, dim: Dim, default: f64) -> Result<Vec<f64>, CliError> {
    match map.get(key) {
        None => Ok(vec![default; dim.axes()]),
        Some(v) => {
            let arr = v.as_array().ok_or_else(|| {
                CliError::config(format!("{key} must be an array with one entry per axis"))
            })?;
            arr.iter()
                .map(|x| {
                    x.as_f64().ok_or_else(|| {
                        CliError::config(format!("{key} must hold numbers, got {x}"))
                    })
                })
                .collect()
        }
    }
}

fn path_field(map: &Map, ctx: &str) -> Result<PathBuf, CliError> {
    map.get("path")
        .and_then(Value::as_str)
        .map(|s| Path::new(s).to_path_buf())
        .ok_or_else(|| CliError::config(format!("{ctx}.path must be a string")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn kernel_kinds_resolve() {
        let v = json!({ "kind": "cube", "lo": [0.0], "hi": [1.0] });
        let k = kernel_from_value(&v, Dim::One).unwrap();
        assert_eq!(k.id, "cube");
        let v = json!({ "kind": "battery", "id": "mix_k3" });
        let k = kernel_from_value(&v, Dim::One).unwrap();
        assert_eq!(k.id, "mix_k3");
        let v = json!({ "kind": "pyramid" });
        let err = kernel_from_value(&v, Dim::One).unwrap_err();
        assert!(err.message.contains("pyramid"));
    }

    #[test]
    fn unknown_fields_fail_closed() {
        let v = json!({ "kind": "gaussian", "varaince": 2.0 });
        let err = kernel_from_value(&v, Dim::One).unwrap_err();
        assert_eq!(err.code, crate::error::EXIT_CONFIG);
        assert!(err.message.contains("varaince"), "{}", err.message);
    }

    #[test]
    fn function_family_lookup_names_alternatives() {
        // the family's band cap needs the grid to resolve mode 81
        let spec = GridSpec::new(Dim::One, 256, 16.0).unwrap();
        let v = json!({ "kind": "family", "member": "does_not_exist" });
        let err = function_from_value(&v, spec).unwrap_err();
        assert!(err.message.contains("gauss_wide"), "{}", err.message);
    }
}
