//! File formats: configuration JSON, Gram CSV, and machine-readable reports.
//!
//! Reports are written through [`to_json_string`], which prints every
//! floating-point value with 17 significant digits and object keys in sorted
//! order, so equal inputs give byte-identical files.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::frame::{GramMatrix, UnitVectorConfiguration};

/// On-disk configuration: `{"d": int, "vectors": [[real, ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub d: usize,
    pub vectors: Vec<Vec<f64>>,
}

impl ConfigFile {
    pub fn from_config(config: &UnitVectorConfiguration) -> Self {
        ConfigFile {
            d: config.dim(),
            vectors: config.to_vecs(),
        }
    }

    pub fn into_config(self) -> Result<UnitVectorConfiguration> {
        UnitVectorConfiguration::new(self.d, &self.vectors)
    }
}

pub fn parse_config(text: &str) -> Result<ConfigFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Reads and validates a configuration file.
pub fn read_config(path: &Path) -> Result<UnitVectorConfiguration> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_config(&text)?.into_config()
}

/// `x` with 17 significant digits in scientific notation; `null` when not finite.
pub fn fmt_sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

/// Gram matrix as CSV: `N` rows of `N` comma-separated values.
pub fn write_gram_csv<W: Write>(gram: &GramMatrix, mut out: W) -> Result<()> {
    for row in gram.to_rows() {
        let line: Vec<String> = row.into_iter().map(fmt_sig17).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// Pretty JSON with 17-significant-digit floats.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize, out: &mut String| out.extend(std::iter::repeat_n(' ', 2 * n));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&fmt_sig17(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // short numeric rows stay on one line
            if items.iter().all(|x| x.is_number()) && items.len() <= 8 {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(x, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                pad(indent + 1, out);
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                pad(indent + 1, out);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push('}');
        }
    }
}

/// What produced an output file. Wall-clock time and thread count are
/// deliberately absent so identical manifests give identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub tool_version: String,
}

impl RunManifest {
    pub fn new(subcommand: &str, parameters: Value, seed: Option<u64>) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            parameters,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// Manifest as `#`-prefixed comment lines for CSV output.
    pub fn csv_header(&self) -> Result<String> {
        let json = to_json_string(&serde_json::json!({ "manifest": self }))?;
        Ok(json.lines().map(|l| format!("# {l}\n")).collect())
    }
}

#[derive(Debug, Serialize)]
pub struct Document<'a, T: Serialize> {
    pub manifest: &'a RunManifest,
    pub result: &'a T,
}

/// `{"manifest": ..., "result": ...}` as 17-digit JSON.
pub fn document_json<T: Serialize>(manifest: &RunManifest, result: &T) -> Result<String> {
    to_json_string(&Document { manifest, result })
}
