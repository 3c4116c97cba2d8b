use serde::{Deserialize, Serialize};

/// Tolerance ladder shared by every module.
///
/// `degeneracy` and `root_cluster` are relative: two values `a`, `b` are
/// merged when `|a - b| <= tol * max(1, |a|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub construction: f64,
    pub verification: f64,
    pub degeneracy: f64,
    pub root_cluster: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            construction: 1e-12,
            verification: 1e-9,
            degeneracy: 1e-9,
            root_cluster: 1e-7,
        }
    }
}

pub(crate) fn close_relative(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(1.0)
}
