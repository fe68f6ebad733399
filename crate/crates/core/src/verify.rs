//! Oracle-equivalence checks of the closed forms on one model.
//!
//! Each check compares a production computation against an independent
//! enumeration of the within-clique dynamics.

use serde::{Deserialize, Serialize};

use crate::clique::{clique_cascade_size, clique_fixpoint, total_variation, CliqueModel};
use crate::dist::{ModelParams, LAW_TOLERANCE};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Total variation between the closed-form and enumerated clique laws.
    CliqueLawTotalVariation,
    /// `|Σ p_E − 1|`.
    CliqueLawMass,
    /// Number of tuples whose closed-form cascade size differs from the
    /// fixpoint of the round-based dynamics.
    CascadeSizeMismatches,
    /// `max_x |m_{x|w} − oracle|`.
    MeanActiveChildren,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub kind: CheckKind,
    pub clique_size: usize,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(kind: CheckKind, clique_size: usize, value: f64, tolerance: f64) -> Self {
        Self {
            kind,
            clique_size,
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

/// Runs every check for each clique size `w ≥ 2` in the support of `q`.
pub fn verify_model(params: &ModelParams) -> Result<Vec<CheckResult>> {
    let model = CliqueModel::new(params)?;
    let mut checks = Vec::new();
    for (w, _) in params.q().support().filter(|&(w, _)| w >= 2) {
        let law = model.outcome_law(w)?;
        let oracle = model.brute_force_law(w)?;
        let tv = total_variation(law.iter().map(|(o, p)| (o, p)), &oracle);
        checks.push(CheckResult::new(CheckKind::CliqueLawTotalVariation, w, tv, LAW_TOLERANCE));

        let mass: f64 = law.iter().map(|(_, p)| p).sum();
        checks.push(CheckResult::new(CheckKind::CliqueLawMass, w, (mass - 1.0).abs(), LAW_TOLERANCE));

        let mut mismatches = 0u64;
        let mut sorted = Vec::with_capacity(w - 1);
        let mut failure = None;
        model.for_each_tuple(w, |tuple, _| {
            if failure.is_some() {
                return;
            }
            let fixpoint = clique_fixpoint(model.theta(), w, tuple).iter().filter(|&&a| a).count();
            sorted.clear();
            sorted.extend_from_slice(tuple);
            sorted.sort_unstable();
            match clique_cascade_size(model.theta(), w, &sorted) {
                Ok(l) if l == fixpoint => {}
                Ok(_) => mismatches += 1,
                Err(e) => failure = Some(e),
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        checks.push(CheckResult::new(CheckKind::CascadeSizeMismatches, w, mismatches as f64, 0.0));

        let mut worst = 0.0f64;
        for x in 0..params.type_dim() {
            let diff = (model.m_x_given_w(x, w) - model.m_x_given_w_oracle(x, w)?).abs();
            worst = worst.max(diff);
        }
        checks.push(CheckResult::new(CheckKind::MeanActiveChildren, w, worst, LAW_TOLERANCE));
    }
    Ok(checks)
}
