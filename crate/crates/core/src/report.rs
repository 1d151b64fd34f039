use std::fmt;

/// One checked identity: its name, the formula it checks, and the outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub identity: String,
    pub anchor: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Report {
    /// `pass` is `residual ≤ tolerance`; a NaN residual fails.
    pub fn new(identity: impl Into<String>, anchor: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            identity: identity.into(),
            anchor: anchor.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }

    /// A yes/no check recorded as residual `0` or `1` against tolerance `0`.
    pub fn flag(identity: impl Into<String>, anchor: impl Into<String>, holds: bool) -> Self {
        Self::new(identity, anchor, if holds { 0.0 } else { 1.0 }, 0.0)
    }

    /// Count of mismatches against tolerance `0`.
    pub fn count(identity: impl Into<String>, anchor: impl Into<String>, failures: usize) -> Self {
        Self::new(identity, anchor, failures as f64, 0.0)
    }

    /// Rows for a failed computation: the error name stands in the anchor.
    pub fn error(identity: impl Into<String>, err: &crate::Error) -> Self {
        Self::new(identity, format!("error: {}", err.name()), f64::NAN, 0.0)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "pass" } else { "FAIL" };
        write!(
            f,
            "{verdict}  {}  [{}]  residual {:e} / tol {:e}",
            self.identity, self.anchor, self.residual, self.tolerance
        )
    }
}

pub fn all_pass(reports: &[Report]) -> bool {
    reports.iter().all(|r| r.pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_is_residual_within_tolerance() {
        assert!(Report::new("a", "x = x", 1e-12, 1e-12).pass);
        assert!(!Report::new("a", "x = x", 2e-12, 1e-12).pass);
        assert!(!Report::new("a", "x = x", f64::NAN, 1.0).pass);
        assert!(Report::flag("b", "P", true).pass);
        assert!(!Report::count("c", "P", 3).pass);
    }
}
