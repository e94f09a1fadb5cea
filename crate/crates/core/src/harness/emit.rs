//! Deterministic CSV / JSON serialization.
//!
//! Rationals are written as `p/q` strings and floats with 17 significant
//! digits in scientific notation, so re-running an experiment reproduces
//! byte-identical files.

use std::fmt::Display;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Usage(format!("unknown format {other:?}"))),
        }
    }
}

/// Tabular view used for CSV output: fixed column order.
pub trait Tabular {
    fn header(&self) -> Vec<&'static str>;
    fn records(&self) -> Vec<Vec<String>>;
}

/// 17 significant digits, scientific notation.
pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// A float serialized as a JSON number with 17 significant digits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(format_real(self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_str(&format_real(self.0))
        }
    }
}

impl Display for Real {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_real(self.0))
    }
}

pub fn ser_display<T: Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn to_csv_string<R: Tabular>(report: &R) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(report.header())?;
    for rec in report.records() {
        w.write_record(&rec)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Serde(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serde(e.to_string()))
}

pub fn to_json_string<R: Serialize>(report: &R) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn render<R: Tabular + Serialize>(report: &R, format: Format) -> Result<String> {
    match format {
        Format::Csv => to_csv_string(report),
        Format::Json => to_json_string(report),
    }
}

/// Writes `report` to `path` in the requested format.
pub fn emit<R: Tabular + Serialize>(report: &R, format: Format, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = render(report, format)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Empty;

    impl Tabular for Empty {
        fn header(&self) -> Vec<&'static str> {
            vec!["a", "b"]
        }
        fn records(&self) -> Vec<Vec<String>> {
            vec![]
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        assert_eq!(to_csv_string(&Empty).unwrap(), "a,b\n");
    }

    #[test]
    fn reals_have_17_significant_digits() {
        assert_eq!(format_real(37.0 / 17.0), "2.1764705882352939e0");
        assert_eq!(format_real(1.0), "1.0000000000000000e0");
        assert_eq!(format_real(f64::INFINITY), "inf");
        let json = serde_json::to_string(&Real(0.1)).unwrap();
        assert_eq!(json, "1.0000000000000001e-1");
        let back: f64 = serde_json::from_str(&json).unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn emit_writes_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/out.csv");
        emit(&crate::harness::report::RatioReport::new("x"), Format::Csv, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "lemma,label,params,lhs,bound,ratio,verdict\n");
    }
}
