//! Grid function files.
//!
//! `BGF1` is a little-endian binary container for one real grid function:
//!
//! ```text
//! bytes 0..8    magic "BGF1GRID"
//! bytes 8..12   format version (u32, currently 1)
//! bytes 12..16  reserved (u32, zero)
//! bytes 16..20  dimension (u32, 1 or 2)
//! bytes 20..24  points per axis (u32)
//! bytes 24..32  domain half-width (f64)
//! bytes 32..    samples (f64, row-major, N or N*N values)
//! ```
//!
//! The plain-text alternative is one sample per line in flat index order,
//! paired with the grid from the run configuration.

use std::fs;
use std::path::Path;

use besov_core::grid::{Dim, GridFunction, GridSpec};

use crate::error::CliError;

pub const MAGIC: &[u8; 8] = b"BGF1GRID";
pub const VERSION: u32 = 1;

/// Reference writer for the layout above; the reader is checked against
/// it, and external producers can follow it byte for byte.
#[allow(dead_code)]
pub fn write_grid_function(path: &Path, g: &GridFunction) -> Result<(), CliError> {
    let spec = g.spec();
    let mut buf = Vec::with_capacity(32 + 8 * g.values().len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&0u32.to_le_bytes());
    buf.extend_from_slice(&(spec.dim().axes() as u32).to_le_bytes());
    buf.extend_from_slice(&(spec.n() as u32).to_le_bytes());
    buf.extend_from_slice(&spec.extent().to_le_bytes());
    for v in g.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_grid_function(path: &Path) -> Result<GridFunction, CliError> {
    let name = path.display();
    let bytes = fs::read(path)
        .map_err(|e| CliError::config(format!("cannot read {name}: {e}")))?;
    if bytes.len() < 32 {
        return Err(CliError::config(format!("{name}: truncated header")));
    }
    if &bytes[0..8] != MAGIC {
        return Err(CliError::config(format!("{name}: not a BGF1 file")));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(CliError::config(format!(
            "{name}: unsupported format version {version}"
        )));
    }
    let dim = match u32::from_le_bytes(bytes[16..20].try_into().unwrap()) {
        1 => Dim::One,
        2 => Dim::Two,
        d => return Err(CliError::config(format!("{name}: dimension {d} out of range"))),
    };
    let n = u32::from_le_bytes(bytes[20..24].try_into().unwrap()) as usize;
    let extent = f64::from_le_bytes(bytes[24..32].try_into().unwrap());
    let spec = GridSpec::new(dim, n, extent)
        .map_err(|e| CliError::config(format!("{name}: {e}")))?;
    let expected = 32 + 8 * spec.len();
    if bytes.len() != expected {
        return Err(CliError::config(format!(
            "{name}: {} bytes, expected {expected} for a {n}-point grid",
            bytes.len()
        )));
    }
    let values: Vec<f64> = bytes[32..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    GridFunction::new(spec, values).map_err(|e| CliError::config(format!("{name}: {e}")))
}

/// One `f64` per non-empty line, flat index order.
pub fn read_values_csv(path: &Path, expected: usize) -> Result<Vec<f64>, CliError> {
    let name = path.display();
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {name}: {e}")))?;
    let mut values = Vec::with_capacity(expected);
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            CliError::config(format!("{name}:{}: not a number: {line:?}", lineno + 1))
        })?;
        values.push(v);
    }
    if values.len() != expected {
        return Err(CliError::config(format!(
            "{name}: {} samples, the configured grid needs {expected}",
            values.len()
        )));
    }
    Ok(values)
}

/// Read back a `epsilon,deviation` profile written by the rate command.
pub fn read_profile_csv(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let name = path.display();
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {name}: {e}")))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "epsilon,deviation" => {}
        _ => {
            return Err(CliError::config(format!(
                "{name}: expected header line 'epsilon,deviation'"
            )))
        }
    }
    let mut entries = Vec::new();
    for (lineno, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        let parse = |cell: Option<&str>| -> Result<f64, CliError> {
            cell.and_then(|c| c.trim().parse::<f64>().ok()).ok_or_else(|| {
                CliError::config(format!("{name}:{}: malformed row {line:?}", lineno + 1))
            })
        };
        let eps = parse(cells.next())?;
        let dev = parse(cells.next())?;
        if cells.next().is_some() {
            return Err(CliError::config(format!(
                "{name}:{}: expected two columns",
                lineno + 1
            )));
        }
        entries.push((eps, dev));
    }
    if entries.is_empty() {
        return Err(CliError::config(format!("{name}: no profile rows")));
    }
    Ok(entries)
}
