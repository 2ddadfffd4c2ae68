//! Residual records shared by the verification suites, the CLI and the
//! acceptance runner.

use serde::{Serialize, Serializer};

use crate::C64;

/// Round to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Serialize a complex number as `[re, im]` at 12 significant digits.
pub fn ser_c64<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
    [round12(z.re), round12(z.im)].serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
    /// Set for identities whose printed form is known to fail; the check
    /// then records the printed residual and is not counted as a failure
    /// of the implementation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub erratum: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, residual: f64, tol: f64) {
        let passed = residual.is_finite() && residual <= tol;
        self.checks.push(Check { name: name.into(), residual, tol, passed, erratum: None });
    }

    /// Record the printed form of an identity that is expected to fail.
    pub fn push_erratum(&mut self, name: impl Into<String>, residual: f64, tol: f64, note: impl Into<String>) {
        let passed = residual.is_finite() && residual <= tol;
        self.checks.push(Check { name: name.into(), residual, tol, passed, erratum: Some(note.into()) });
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    /// Failures that are not documented errata.
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed && c.erratum.is_none()).collect()
    }

    /// Errata whose printed form did fail, as expected.
    pub fn errata(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.erratum.is_some()).collect()
    }

    pub fn ok(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().filter(|c| c.erratum.is_none()).map(|c| c.residual).fold(0.0, f64::max)
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            let tag = match (&c.erratum, c.passed) {
                (None, true) => "ok  ",
                (None, false) => "FAIL",
                (Some(_), false) => "errt",
                (Some(_), true) => "ok* ",
            };
            write!(f, "{tag} {:<48} {:.3e} (tol {:.0e})", c.name, c.residual, c.tol)?;
            if let Some(n) = &c.erratum {
                write!(f, "  [{n}]")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(-5951.554512345678), -5951.55451235);
        assert_eq!(round12(0.0), 0.0);
    }

    #[test]
    fn errata_do_not_count_as_failures() {
        let mut r = Report::new();
        r.push("a", 1e-12, 1e-9);
        r.push_erratum("b", 0.5, 1e-9, "printed sign");
        assert!(r.ok());
        r.push("c", f64::NAN, 1e-9);
        assert_eq!(r.failures().len(), 1);
    }
}
