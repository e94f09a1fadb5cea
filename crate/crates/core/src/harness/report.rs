use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::harness::emit::{format_real, Tabular};
use crate::scalar::format_rational;

/// A reported number: exact rational, or a float for expressions with
/// fractional powers and logarithms.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Approx(f64),
}

impl Value {
    pub fn int(v: u64) -> Self {
        Value::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Value::Approx(x) => *x,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(q) => f.write_str(&format_rational(q)),
            Value::Approx(x) => f.write_str(&format_real(*x)),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Exact(q) => s.serialize_str(&format_rational(q)),
            Value::Approx(x) => crate::harness::emit::Real(*x).serialize(s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The inequality `lhs ≤ bound` is a theorem and was checked exactly.
    AssertedExact,
    /// Empirical constant only; nothing is asserted.
    ReportOnly,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::AssertedExact => "ASSERTED-EXACT",
            Verdict::ReportOnly => "REPORT-ONLY",
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub label: String,
    pub params: String,
    pub lhs: Value,
    pub bound: Value,
    pub ratio: Value,
    pub verdict: Verdict,
}

impl RatioRow {
    /// An exactly checked row; fails with [`Error::Assertion`] if `lhs > bound`.
    pub fn asserted(
        label: impl Into<String>,
        params: impl Into<String>,
        lhs: BigRational,
        bound: BigRational,
    ) -> Result<Self> {
        let label = label.into();
        let params = params.into();
        if lhs > bound {
            return Err(Error::Assertion(format!(
                "{label} [{params}]: {} > {}",
                format_rational(&lhs),
                format_rational(&bound)
            )));
        }
        let ratio = if bound.is_zero() {
            BigRational::zero()
        } else {
            &lhs / &bound
        };
        Ok(RatioRow {
            label,
            params,
            lhs: Value::Exact(lhs),
            bound: Value::Exact(bound),
            ratio: Value::Exact(ratio),
            verdict: Verdict::AssertedExact,
        })
    }

    /// A report-only row; the ratio is `lhs / bound` in floating point.
    pub fn report(
        label: impl Into<String>,
        params: impl Into<String>,
        lhs: Value,
        bound: f64,
    ) -> Self {
        let l = lhs.to_f64();
        let ratio = if bound == 0.0 && l == 0.0 { 0.0 } else { l / bound };
        RatioRow {
            label: label.into(),
            params: params.into(),
            lhs,
            bound: Value::Approx(bound),
            ratio: Value::Approx(ratio),
            verdict: Verdict::ReportOnly,
        }
    }

    pub fn is_exact_ok(&self) -> bool {
        match (&self.lhs, &self.bound) {
            (Value::Exact(l), Value::Exact(b)) => l <= b && !b.is_negative(),
            _ => false,
        }
    }
}

/// Rows produced by one lemma check.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RatioReport {
    pub lemma: String,
    pub rows: Vec<RatioRow>,
}

impl RatioReport {
    pub fn new(lemma: impl Into<String>) -> Self {
        RatioReport {
            lemma: lemma.into(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: RatioRow) {
        self.rows.push(row);
    }

    /// Largest report-only ratio among rows whose label matches.
    pub fn max_ratio(&self, label: &str) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.label == label)
            .map(|r| r.ratio.to_f64())
            .fold(None, |acc, x| Some(acc.map_or(x, |a: f64| a.max(x))))
    }
}

impl Tabular for RatioReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["lemma", "label", "params", "lhs", "bound", "ratio", "verdict"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    self.lemma.clone(),
                    r.label.clone(),
                    r.params.clone(),
                    r.lhs.to_string(),
                    r.bound.to_string(),
                    r.ratio.to_string(),
                    r.verdict.as_str().to_string(),
                ]
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn asserted_rows_check_the_inequality() {
        let row = RatioRow::asserted("x", "", q(2, 1), q(5, 1)).unwrap();
        assert_eq!(row.ratio, Value::Exact(q(2, 5)));
        assert!(row.is_exact_ok());
        assert!(matches!(
            RatioRow::asserted("x", "", q(6, 1), q(5, 1)),
            Err(Error::Assertion(_))
        ));
        let zero = RatioRow::asserted("x", "", q(0, 1), q(0, 1)).unwrap();
        assert_eq!(zero.ratio, Value::Exact(q(0, 1)));
    }

    #[test]
    fn value_formatting() {
        assert_eq!(Value::Exact(q(1, 3)).to_string(), "1/3");
        assert_eq!(Value::Approx(0.5).to_string(), "5.0000000000000000e-1");
    }
}
