//! CSV and JSON renderings of an ensemble summary.

use std::fmt::Write as _;

use super::ensemble::EnsembleSummary;
use crate::error::{ModelError, Result};

/// One row per step. Dual ensembles carry a leading `network` column.
pub fn to_csv(summary: &EnsembleSummary) -> String {
    let dual = summary.networks.len() > 1;
    let mut out = String::new();
    if dual {
        out.push_str("network,");
    }
    out.push_str("step,mean_pi_r,mean_pi_f,ci_r,ci_f\n");
    for net in &summary.networks {
        for s in &net.steps {
            if dual {
                let _ = write!(out, "{},", net.network);
            }
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                s.step, s.mean_pi_r, s.mean_pi_f, s.ci_r, s.ci_f
            );
        }
    }
    out
}

pub fn to_json(summary: &EnsembleSummary) -> Result<String> {
    serde_json::to_string_pretty(summary).map_err(|e| ModelError::Config(e.to_string()))
}
