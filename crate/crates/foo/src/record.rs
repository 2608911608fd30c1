//! Exported run records. Every top-level document carries
//! [`SCHEMA_VERSION`]; bump it on any breaking field change.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Agent answer. `truth` is the hidden per-statement ground truth, present
/// only for mock backends.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Answer {
    pub agent: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<Vec<bool>>,
}

impl Answer {
    pub fn false_fraction(&self) -> Option<f64> {
        let t = self.truth.as_ref()?;
        if t.is_empty() {
            return None;
        }
        Some(t.iter().filter(|ok| !**ok).count() as f64 / t.len() as f64)
    }
}

/// Critique of one target by one critic. `flags` lists statement indices the
/// critic marked as false, when the backend can address statements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Critique {
    pub critic: String,
    pub target: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flaw {
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statement: Option<usize>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub critics: Vec<String>,
}

/// Outcome for one flagged statement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementVerdict {
    pub target: String,
    pub statement: usize,
    pub upheld: bool,
    pub votes: usize,
    pub critics: usize,
    /// The harmonizer's own check decided a tied vote.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub tie_break: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Judgement {
    pub round: usize,
    pub harmonizer: String,
    pub summary: String,
    pub agreed: Vec<Flaw>,
    pub contested: Vec<Flaw>,
    pub verdicts: Vec<StatementVerdict>,
}

impl Judgement {
    /// Statement indices of `target` the judgement upholds as false.
    pub fn upheld_for(&self, target: &str) -> Vec<usize> {
        self.verdicts
            .iter()
            .filter(|v| v.upheld && v.target == target)
            .map(|v| v.statement)
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.agreed.is_empty() && self.contested.is_empty() && self.verdicts.is_empty()
    }
}

/// One consensus round.
///
/// `answers` are the specialists' answers at the start of the round, the ones
/// critiqued. `revisions` are the answers specialists produced this round
/// under the previous round's judgement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub answers: Vec<Answer>,
    pub revisions: Vec<Answer>,
    pub critiques: Vec<Critique>,
    /// One per active harmonizer; the first is authoritative.
    pub judgements: Vec<Judgement>,
    /// `None` when the round was cut short by an abort.
    pub metric: Option<f64>,
}

impl RoundRecord {
    pub fn judgement(&self) -> Option<&Judgement> {
        self.judgements.first()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Broadcast,
    Review,
    Harmonize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentFailure {
    pub agent: String,
    /// 0 for the broadcast.
    pub round: usize,
    pub phase: Phase,
    pub error: String,
    pub attempts: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub schema_version: u32,
    pub task: String,
    pub broadcast: Vec<Answer>,
    pub rounds: Vec<RoundRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<AgentFailure>,
}

impl History {
    pub fn new(task: impl Into<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            task: task.into(),
            broadcast: Vec::new(),
            rounds: Vec::new(),
            failures: Vec::new(),
        }
    }
}
