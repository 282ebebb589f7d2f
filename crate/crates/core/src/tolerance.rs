use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Every numerical threshold used by the analyses.
///
/// Relative tolerances are multiplied by the operator norm of the
/// Liouvillian at the point of use; everything else is absolute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    /// `‖M − M†‖∞` allowed for Hermitian operators.
    pub hermiticity: f64,
    /// `|tr ρ − 1|` allowed for density matrices.
    pub trace: f64,
    /// Most negative eigenvalue allowed for density matrices.
    pub positivity: f64,
    /// Most negative Choi eigenvalue for complete positivity.
    pub cp: f64,
    /// Trace defect allowed for trace preservation.
    pub tp: f64,
    /// `‖T(I) − I‖∞` below which a map counts as unital.
    pub unital: f64,
    /// Peripheral eigenvalue threshold, relative to `‖L‖∞`.
    pub peripheral_rel: f64,
    /// Eigenvalue clustering threshold, relative to `‖M‖∞`.
    pub cluster_rel: f64,
    /// Structural checks on the isometric/sweeping split.
    pub split_check: f64,
    /// `1 − tr ρ²` below which a state counts as pure.
    pub purity: f64,
    /// `‖L e‖₁` below which an operator counts as fixed.
    pub fixedness: f64,
    /// Hilbert–Schmidt residual outside the isometric part for robust states.
    pub robustness: f64,
    /// Slack on entropy monotonicity along a trajectory.
    pub monotonicity: f64,
    /// Slack on Lipschitz constants exceeding one.
    pub lipschitz: f64,
    /// Slack on `k(s+t) ≤ k(s)k(t)`.
    pub submultiplicativity: f64,
    /// Distances below this are excluded from decay-rate fits.
    pub fit_floor: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            hermiticity: 1e-10,
            trace: 1e-10,
            positivity: 1e-10,
            cp: 1e-9,
            tp: 1e-10,
            unital: 1e-9,
            peripheral_rel: 1e-8,
            cluster_rel: 1e-7,
            split_check: 1e-9,
            purity: 1e-9,
            fixedness: 1e-9,
            robustness: 1e-9,
            monotonicity: 1e-9,
            lipschitz: 1e-9,
            submultiplicativity: 1e-6,
            fit_floor: 1e-12,
        }
    }
}

impl ToleranceConfig {
    /// Reads overrides from a TOML file; absent keys keep their defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    /// Absolute peripheral threshold for a generator of the given norm.
    pub fn peripheral_abs(&self, generator_norm: f64) -> f64 {
        (self.peripheral_rel * generator_norm).max(f64::EPSILON)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_override_keeps_defaults() {
        let t: ToleranceConfig = toml::from_str("cp = 1e-7").unwrap();
        assert_eq!(t.cp, 1e-7);
        assert_eq!(t.tp, ToleranceConfig::default().tp);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(toml::from_str::<ToleranceConfig>("cpp = 1.0").is_err());
    }
}
