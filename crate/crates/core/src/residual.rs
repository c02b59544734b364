//! Labelled residual tables produced by every verifier.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
}

/// Gated residuals (`checks`) plus informational quantities (`info`) such as
/// invertibility margins and condition numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub name: String,
    pub tol: f64,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub info: Vec<Check>,
}

impl ResidualReport {
    pub fn new(name: impl Into<String>, tol: f64) -> Self {
        ResidualReport {
            name: name.into(),
            tol,
            checks: Vec::new(),
            info: Vec::new(),
        }
    }

    pub fn push(&mut self, label: impl Into<String>, value: f64) {
        self.checks.push(Check {
            label: label.into(),
            value,
        });
    }

    pub fn note(&mut self, label: impl Into<String>, value: f64) {
        self.info.push(Check {
            label: label.into(),
            value,
        });
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.checks
            .iter()
            .chain(self.info.iter())
            .find(|c| c.label == label)
            .map(|c| c.value)
    }

    /// Largest gated residual; NaN is reported as infinity.
    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| if c.value.is_nan() { f64::INFINITY } else { c.value })
            .fold(0.0, f64::max)
    }

    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(move |c| !(c.value <= self.tol))
    }

    pub fn passed(&self) -> bool {
        self.failing().next().is_none()
    }

    pub fn merge(&mut self, other: ResidualReport) {
        self.checks.extend(other.checks);
        self.info.extend(other.info);
    }

    /// `Ok(self)` when every check passes, otherwise a verification error
    /// carrying the full table.
    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(Error::Verification(Box::new(self)))
        }
    }
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failing: Vec<_> = self.failing().collect();
        if failing.is_empty() {
            write!(
                f,
                "{}: pass (max residual {:.3e}, tol {:.1e})",
                self.name,
                self.max_residual(),
                self.tol
            )
        } else {
            write!(f, "{}: FAIL (tol {:.1e})", self.name, self.tol)?;
            for c in failing {
                write!(f, "; {} = {:.3e}", c.label, c.value)?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_counts_as_failure() {
        let mut r = ResidualReport::new("t", 1e-8);
        r.push("a", 0.0);
        assert!(r.passed());
        r.push("b", f64::NAN);
        assert!(!r.passed());
        assert_eq!(r.max_residual(), f64::INFINITY);
        assert!(r.clone().into_result().is_err());
    }

    #[test]
    fn info_is_not_gated() {
        let mut r = ResidualReport::new("t", 1e-8);
        r.note("condition", 1e12);
        assert!(r.passed());
        assert_eq!(r.get("condition"), Some(1e12));
    }
}
