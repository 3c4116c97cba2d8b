use serde::{Deserialize, Serialize};

/// One named verification result.
///
/// Upper-bound checks pass when `max_residual <= tol`. Lower-bound checks
/// (nondegeneracy, positivity) also carry `min_value`; their residual is the
/// amount by which the bound is violated, zero when satisfied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub max_residual: f64,
    pub samples: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_value: Option<f64>,
}

impl CheckReport {
    pub fn max_residual(name: impl Into<String>, residuals: &[f64], tol: f64) -> Self {
        let max = residuals.iter().fold(0.0_f64, |acc, &r| {
            if r.is_nan() {
                f64::INFINITY
            } else {
                acc.max(r)
            }
        });
        Self {
            check: name.into(),
            max_residual: max,
            samples: residuals.len(),
            pass: max <= tol,
            min_value: None,
        }
    }

    /// Passes when every value exceeds `threshold`.
    pub fn lower_bound(name: impl Into<String>, values: &[f64], threshold: f64) -> Self {
        let min = values.iter().fold(f64::INFINITY, |acc, &v| {
            if v.is_nan() {
                f64::NEG_INFINITY
            } else {
                acc.min(v)
            }
        });
        Self {
            check: name.into(),
            max_residual: if min > threshold {
                0.0
            } else {
                threshold - min
            },
            samples: values.len(),
            pass: min > threshold,
            min_value: Some(min),
        }
    }

    /// Boolean outcome per sample; residual counts failing samples.
    pub fn all_true(name: impl Into<String>, outcomes: &[bool]) -> Self {
        let failures = outcomes.iter().filter(|&&b| !b).count();
        Self {
            check: name.into(),
            max_residual: failures as f64,
            samples: outcomes.len(),
            pass: failures == 0,
            min_value: None,
        }
    }

    /// Merges reports of the same check over disjoint sample sets.
    pub fn merge(mut self, other: &CheckReport) -> Self {
        self.max_residual = self.max_residual.max(other.max_residual);
        self.samples += other.samples;
        self.pass &= other.pass;
        self.min_value = match (self.min_value, other.min_value) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Ordered list of named checks.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CompatibilityReport(pub Vec<CheckReport>);

impl CompatibilityReport {
    pub fn all_pass(&self) -> bool {
        self.0.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckReport> {
        self.0.iter().find(|c| c.check == name)
    }

    pub fn push(&mut self, c: CheckReport) {
        self.0.push(c);
    }

    pub fn extend(&mut self, other: CompatibilityReport) {
        self.0.extend(other.0);
    }
}
