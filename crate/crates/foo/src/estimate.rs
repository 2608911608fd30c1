//! Frequency estimates of the mock hazards from a recorded history.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{FooError, Result};
use crate::record::{Answer, History};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HazardEstimates {
    /// True statements turned false per true statement per revision.
    pub lambda: f64,
    /// Unflagged false statements repaired per exposure per revision.
    pub q: f64,
    /// False statements flagged per critic per false statement critiqued.
    pub d: f64,
    pub true_exposures: u64,
    pub false_exposures: u64,
    pub detection_opportunities: u64,
}

fn truth(a: &Answer) -> Result<&[bool]> {
    a.truth.as_deref().ok_or_else(|| {
        FooError::Unsupported(format!(
            "answer of {} carries no statement-level ground truth",
            a.agent
        ))
    })
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Revisions in round `k` are compared with the start-of-round answers of
/// the same agent under round `k - 1`'s authoritative judgement; critiques
/// are scored against the ground truth of the answer they target.
pub fn estimate_empirical_hazards(history: &History) -> Result<HazardEstimates> {
    if history.rounds.len() < 2 {
        return Err(FooError::Config(format!(
            "hazard estimation needs at least 2 rounds, history has {}",
            history.rounds.len()
        )));
    }
    let (mut t_exp, mut t_flip, mut f_exp, mut f_fix, mut det_opp, mut det_hit) = (0u64, 0, 0, 0, 0, 0);
    for (k, round) in history.rounds.iter().enumerate() {
        let start: HashMap<&str, &Answer> = round.answers.iter().map(|a| (a.agent.as_str(), a)).collect();
        for c in &round.critiques {
            let target = start.get(c.target.as_str()).ok_or_else(|| {
                FooError::Config(format!("critique target {} missing from round {}", c.target, round.round))
            })?;
            for (i, ok) in truth(target)?.iter().enumerate() {
                if !ok {
                    det_opp += 1;
                    det_hit += u64::from(c.flags.contains(&i));
                }
            }
        }
        if k == 0 {
            continue;
        }
        let judgement = history.rounds[k - 1].judgement();
        for rev in &round.revisions {
            let Some(old) = start.get(rev.agent.as_str()) else { continue };
            let upheld = judgement.map(|j| j.upheld_for(&rev.agent)).unwrap_or_default();
            for (i, (before, after)) in truth(old)?.iter().zip(truth(rev)?).enumerate() {
                match (before, after) {
                    (true, a) => {
                        t_exp += 1;
                        t_flip += u64::from(!a);
                    }
                    (false, _) if upheld.contains(&i) => {}
                    (false, a) => {
                        f_exp += 1;
                        f_fix += u64::from(*a);
                    }
                }
            }
        }
    }
    Ok(HazardEstimates {
        lambda: ratio(t_flip, t_exp),
        q: ratio(f_fix, f_exp),
        d: ratio(det_hit, det_opp),
        true_exposures: t_exp,
        false_exposures: f_exp,
        detection_opportunities: det_opp,
    })
}
