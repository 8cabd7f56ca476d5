//! Deterministic output encoding.
//!
//! Every float in a payload file or on stdout goes through [`float_repr`],
//! which prints 17 significant digits: enough to round-trip an `f64`
//! exactly, so a re-run of the same configuration is byte-identical and a
//! profile read back from disk fits to the same slope bit for bit.
//! Objects keep insertion order; nothing here consults clocks or maps with
//! randomized iteration.

use std::fmt::Write as _;

/// `f64` at full precision: 17 significant digits in scientific notation,
/// a valid JSON number.
pub fn float_repr(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // JSON has no literal for these; the payload schema reserves null
        String::from("null")
    }
}

/// JSON document tree with ordered object fields.
#[derive(Debug, Clone)]
pub enum Json {
    Null,
    Bool(bool),
    /// Integer-valued counts and orders.
    Int(i64),
    /// Rendered through [`float_repr`].
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(&'static str, Json)>),
}

impl Json {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::Num(x) => out.push_str(&float_repr(*x)),
            Json::Str(s) => write_escaped(out, s),
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    newline(out, indent + 1);
                    item.write(out, indent + 1);
                }
                newline(out, indent);
                out.push(']');
            }
            Json::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (key, value)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    newline(out, indent + 1);
                    write_escaped(out, key);
                    out.push_str(": ");
                    value.write(out, indent + 1);
                }
                newline(out, indent);
                out.push('}');
            }
        }
    }
}

fn newline(out: &mut String, indent: usize) {
    out.push('\n');
    for _ in 0..indent {
        out.push_str("  ");
    }
}

fn write_escaped(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

/// CSV with a fixed header; cells are either full-precision floats or
/// verbatim strings (ids never contain commas or quotes).
pub fn csv(header: &str, rows: &[Vec<CsvCell>]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            match cell {
                CsvCell::Num(x) => out.push_str(&float_repr(*x)),
                CsvCell::Int(k) => {
                    let _ = write!(out, "{k}");
                }
                CsvCell::Str(s) => out.push_str(s),
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone)]
pub enum CsvCell {
    Num(f64),
    Int(i64),
    Str(String),
}

/// One executed verification check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    /// `Ok(detail)` or `Err(failure message)`.
    pub result: Result<String, String>,
}

/// JUnit-style XML for the verification suite. The payload carries no
/// timestamps; wall-clock data lives in the sidecar metadata file.
pub fn junit(suite: &str, checks: &[CheckOutcome]) -> String {
    let failures = checks.iter().filter(|c| c.result.is_err()).count();
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = write!(
        out,
        "<testsuite name=\"{}\" tests=\"{}\" failures=\"{}\">\n",
        xml_escape(suite),
        checks.len(),
        failures
    );
    for c in checks {
        match &c.result {
            Ok(_) => {
                let _ = write!(out, "  <testcase name=\"{}\"/>\n", xml_escape(&c.name));
            }
            Err(msg) => {
                let _ = write!(
                    out,
                    "  <testcase name=\"{}\">\n    <failure message=\"{}\"/>\n  </testcase>\n",
                    xml_escape(&c.name),
                    xml_escape(msg)
                );
            }
        }
    }
    out.push_str("</testsuite>\n");
    out
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}
