use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{FooError, Result};

/// When the consensus loop stops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergencePolicy {
    pub min_rounds: usize,
    pub max_rounds: usize,
    /// Normalized edit distance in `[0, 1]` at or below which a round counts
    /// as converged.
    pub edit_distance_threshold: f64,
    /// Disabling cross-examination turns specialists into isolated revisers;
    /// used as the control arm when measuring loop efficacy.
    pub cross_examination: bool,
}

impl Default for ConvergencePolicy {
    fn default() -> Self {
        Self {
            min_rounds: 3,
            max_rounds: 10,
            edit_distance_threshold: 0.05,
            cross_examination: true,
        }
    }
}

impl ConvergencePolicy {
    pub fn fixed_rounds(rounds: usize) -> Self {
        Self {
            min_rounds: rounds,
            max_rounds: rounds,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_rounds < 1 || self.min_rounds > self.max_rounds {
            return Err(FooError::Config(format!(
                "need 1 <= min_rounds <= max_rounds, got {} and {}",
                self.min_rounds, self.max_rounds
            )));
        }
        if !(0.0..=1.0).contains(&self.edit_distance_threshold) {
            return Err(FooError::Config(format!(
                "edit_distance_threshold must lie in [0, 1], got {}",
                self.edit_distance_threshold
            )));
        }
        Ok(())
    }

    pub fn should_stop(&self, round: usize, metric: f64) -> bool {
        round >= self.max_rounds || (round >= self.min_rounds && metric <= self.edit_distance_threshold)
    }
}

/// Backend failures are retried with exponential backoff before the agent
/// is marked inactive for the rest of the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub retries: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            retries: 2,
            base_delay: Duration::from_millis(250),
        }
    }
}

impl RetryPolicy {
    /// Delay before retry `attempt` (1-based).
    pub fn delay(&self, attempt: u32) -> Duration {
        self.base_delay * 2u32.saturating_pow(attempt.saturating_sub(1))
    }
}
