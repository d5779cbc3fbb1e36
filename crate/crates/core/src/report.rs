//! Machine-readable diagnostics report (`schema: 1`).

use serde::{Deserialize, Serialize};

use crate::maps::Gate;
use crate::spec::ManifoldSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

/// Role of a check in the exit-code contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// Holds for every statistical structure; failure is an error.
    Identity,
    /// Holds whenever its hypotheses hold; not applicable otherwise.
    Conditional,
    /// A property of the instance; failing is informative, not an error.
    Condition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub kind: CheckKind,
    pub max_residual: Option<f64>,
    pub argmax: Option<Vec<f64>>,
    pub status: Status,
}

impl CheckResult {
    /// Worst residual over the samples; ties keep the earliest point.
    pub fn from_samples(name: &str, kind: CheckKind, points: &[Vec<f64>], values: &[f64], tol: f64) -> Self {
        let mut best: Option<(usize, f64)> = None;
        for (i, &v) in values.iter().enumerate() {
            let worse = match best {
                None => true,
                Some((_, b)) => v > b || (v.is_nan() && !b.is_nan()),
            };
            if worse {
                best = Some((i, v));
            }
        }
        match best {
            Some((i, v)) => CheckResult {
                name: name.to_string(),
                kind,
                max_residual: Some(v),
                argmax: Some(points[i].clone()),
                status: if v <= tol { Status::Pass } else { Status::Fail },
            },
            None => Self::not_applicable(name, kind),
        }
    }

    pub fn not_applicable(name: &str, kind: CheckKind) -> Self {
        CheckResult {
            name: name.to_string(),
            kind,
            max_residual: None,
            argmax: None,
            status: Status::NotApplicable,
        }
    }

    /// Counts against the exit code.
    pub fn is_failure(&self) -> bool {
        self.kind != CheckKind::Condition && self.status == Status::Fail
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub codazzi: bool,
    pub ric_symmetric: bool,
    pub conjugate_symmetric: bool,
    pub equiaffine: bool,
    pub semi_equiaffine: bool,
    pub constant_curvature: bool,
}

/// Flag equivalence for the bi-tension characterisation of the semi-equiaffine condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Main1Equivalence {
    /// From the (T1) and (T2) residuals.
    pub by_tchebychev: Gate,
    /// From `τ₂ = τ̄₂ = 0`.
    pub by_bitension: Gate,
    pub consistent: bool,
}

/// Symmetric Ricci tensor against closedness of `η`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricRicci {
    pub ricci_symmetric: Gate,
    pub tchebychev_closed: Gate,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureFitReport {
    pub lambda: f64,
    pub residual: f64,
    pub constant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleInfo {
    pub count: usize,
    pub seed: u64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub schema: u32,
    pub spec: ManifoldSpec,
    pub spec_hash: String,
    pub tolerance: f64,
    pub samples: SampleInfo,
    pub curvature_fit: Option<CurvatureFitReport>,
    pub flags: Flags,
    pub main1: Main1Equivalence,
    pub symmetric_ricci: SymmetricRicci,
    pub checks: Vec<CheckResult>,
    pub runtime_ms: u64,
}

impl DiagnosticsReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Every identity and applicable conditional check passes and both
    /// flag equivalences hold.
    pub fn all_pass(&self) -> bool {
        !self.checks.iter().any(CheckResult::is_failure) && self.main1.consistent && self.symmetric_ricci.consistent
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            2
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_picks_first_worst() {
        let pts = vec![vec![0.0], vec![1.0], vec![2.0]];
        let c = CheckResult::from_samples("x", CheckKind::Identity, &pts, &[0.1, 0.3, 0.3], 0.2);
        assert_eq!(c.argmax, Some(vec![1.0]));
        assert_eq!(c.status, Status::Fail);
        assert!(c.is_failure());
        let c = CheckResult::from_samples("x", CheckKind::Condition, &pts, &[0.1, 0.3, 0.3], 0.2);
        assert!(!c.is_failure());
    }

    #[test]
    fn nan_counts_as_failure() {
        let pts = vec![vec![0.0], vec![1.0]];
        let c = CheckResult::from_samples("x", CheckKind::Identity, &pts, &[0.0, f64::NAN], 1.0);
        assert_eq!(c.status, Status::Fail);
    }
}
