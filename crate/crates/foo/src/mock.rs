//! Mock agents driven by per-statement hazards.
//!
//! An answer is a fixed-length list of statements with hidden truth bits.
//! Fabrication turns a true statement false with probability `lambda`,
//! self-repair turns an unflagged false statement true with probability `q`,
//! and a critic flags each false statement of a peer with probability `d`.
//! Critics never flag true statements.

use std::collections::BTreeMap;

use discursive_core::sim::StreamKey;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::backend::{AgentBackend, Reply, Request};
use crate::error::{BackendError, FooError, Result};
use crate::record::{Answer, Critique, Flaw, Judgement, StatementVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MockAgentModel {
    pub statements: usize,
    pub lambda: f64,
    pub q: f64,
    pub d: f64,
    pub seed: u64,
}

impl MockAgentModel {
    pub fn new(statements: usize, lambda: f64, q: f64, d: f64, seed: u64) -> Result<Self> {
        let m = Self { statements, lambda, q, d, seed };
        m.validate()?;
        Ok(m)
    }

    /// Calibrated fabrication, repair and detection hazards.
    pub fn calibrated(statements: usize, seed: u64) -> Self {
        Self {
            statements,
            lambda: 0.055,
            q: 0.05,
            d: 0.19,
            seed,
        }
    }

    /// Probabilities may sit on the closed unit interval so that the
    /// degenerate cases (no fabrication, certain detection) are expressible.
    pub fn validate(&self) -> Result<()> {
        if self.statements == 0 {
            return Err(FooError::Config("mock answers need at least one statement".into()));
        }
        for (name, v) in [("lambda", self.lambda), ("q", self.q), ("d", self.d)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(FooError::Config(format!("mock {name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

/// Stream purposes; `run` is the agent's roster position, `step` the round.
const LANE_BROADCAST: u8 = 0;
const LANE_CRITIQUE: u8 = 1;
const LANE_HARMONIZE: u8 = 2;
const LANE_REVISE: u8 = 3;

pub fn render(truth: &[bool]) -> String {
    truth
        .iter()
        .enumerate()
        .map(|(i, ok)| format!("claim {i}: {}.", if *ok { "holds" } else { "fails" }))
        .collect::<Vec<_>>()
        .join("\n")
}

/// First-pass answer: each statement false with probability `lambda`.
pub fn initial_truth<R: Rng + ?Sized>(model: &MockAgentModel, rng: &mut R) -> Vec<bool> {
    (0..model.statements).map(|_| !rng.random_bool(model.lambda)).collect()
}

/// Indices of false statements the critic detects.
pub fn detect<R: Rng + ?Sized>(model: &MockAgentModel, truth: &[bool], rng: &mut R) -> Vec<usize> {
    truth
        .iter()
        .enumerate()
        .filter(|(_, ok)| !**ok)
        .filter(|_| rng.random_bool(model.d))
        .map(|(i, _)| i)
        .collect()
}

/// Upheld false statements are repaired and exempt from this round's
/// hazards; every other statement faces fabrication or self-repair.
pub fn revise_truth<R: Rng + ?Sized>(
    model: &MockAgentModel,
    truth: &[bool],
    upheld: &[usize],
    rng: &mut R,
) -> Vec<bool> {
    truth
        .iter()
        .enumerate()
        .map(|(i, &ok)| {
            if !ok && upheld.contains(&i) {
                true
            } else if ok {
                !rng.random_bool(model.lambda)
            } else {
                rng.random_bool(model.q)
            }
        })
        .collect()
}

fn critique_text(target: &str, flags: &[usize]) -> String {
    if flags.is_empty() {
        format!("no flaws found in the answer of {target}.")
    } else {
        let list: Vec<String> = flags.iter().map(ToString::to_string).collect();
        format!("flaws in the answer of {target}: claims {} fail.", list.join(", "))
    }
}

/// Majority vote across the critics of each target. Unanimous flags are
/// agreed; split flags are contested and upheld by strict majority, with an
/// even split settled by the harmonizer's own detection draw.
pub fn harmonize_votes<R: Rng + ?Sized>(
    model: &MockAgentModel,
    harmonizer: &str,
    round: usize,
    answers: &[Answer],
    critiques: &[Critique],
    rng: &mut R,
) -> Judgement {
    let mut j = Judgement {
        round,
        harmonizer: harmonizer.to_owned(),
        ..Judgement::default()
    };
    for target in answers {
        let critics: Vec<&Critique> = critiques.iter().filter(|c| c.target == target.agent).collect();
        let mut votes: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for c in &critics {
            for &s in &c.flags {
                votes.entry(s).or_default().push(c.critic.clone());
            }
        }
        for (statement, voters) in votes {
            let (n, k) = (critics.len(), voters.len());
            let flaw = Flaw {
                target: target.agent.clone(),
                statement: Some(statement),
                description: format!("claim {statement} fails"),
                critics: voters,
            };
            let mut tie_break = false;
            let upheld = if k == n {
                j.agreed.push(flaw);
                true
            } else {
                j.contested.push(flaw);
                if 2 * k > n {
                    true
                } else if 2 * k == n {
                    tie_break = true;
                    let is_false = target
                        .truth
                        .as_ref()
                        .and_then(|t| t.get(statement))
                        .is_some_and(|ok| !ok);
                    is_false && rng.random_bool(model.d)
                } else {
                    false
                }
            };
            j.verdicts.push(StatementVerdict {
                target: target.agent.clone(),
                statement,
                upheld,
                votes: k,
                critics: n,
                tie_break,
            });
        }
    }
    let upheld = j.verdicts.iter().filter(|v| v.upheld).count();
    j.summary = format!(
        "round {round}: {} agreed, {} contested, {upheld} upheld",
        j.agreed.len(),
        j.contested.len()
    );
    j
}

/// Backend for one mock agent.
#[derive(Debug, Clone)]
pub struct MockBackend {
    model: MockAgentModel,
    agent: String,
    position: u64,
}

impl MockBackend {
    /// `position` is the agent's index in the roster and keys its streams.
    pub fn new(model: MockAgentModel, agent: impl Into<String>, position: usize) -> Self {
        Self {
            model,
            agent: agent.into(),
            position: position as u64,
        }
    }

    fn rng(&self, lane: u8, round: usize) -> ChaCha8Rng {
        StreamKey::new(self.model.seed).step_rng(self.position, lane, round as u64)
    }

    fn answer(&self, truth: Vec<bool>) -> Answer {
        Answer {
            agent: self.agent.clone(),
            text: render(&truth),
            truth: Some(truth),
        }
    }
}

fn truth_of(a: &Answer) -> std::result::Result<&[bool], BackendError> {
    a.truth
        .as_deref()
        .ok_or_else(|| BackendError::Malformed(format!("answer of {} has no ground truth", a.agent)))
}

impl AgentBackend for MockBackend {
    fn call(&mut self, request: &Request) -> std::result::Result<Reply, BackendError> {
        match request {
            Request::Broadcast { .. } => {
                let truth = initial_truth(&self.model, &mut self.rng(LANE_BROADCAST, 0));
                Ok(Reply::Answer(self.answer(truth)))
            }
            Request::Review { round, revise, peers, .. } => {
                let revision = match revise {
                    Some(input) => {
                        let upheld = input.judgement.upheld_for(&self.agent);
                        let mut rng = self.rng(LANE_REVISE, *round);
                        let truth = revise_truth(&self.model, truth_of(&input.own)?, &upheld, &mut rng);
                        Some(self.answer(truth))
                    }
                    None => None,
                };
                let mut rng = self.rng(LANE_CRITIQUE, *round);
                let critiques = peers
                    .iter()
                    .map(|p| {
                        let flags = detect(&self.model, truth_of(p)?, &mut rng);
                        Ok(Critique {
                            critic: self.agent.clone(),
                            target: p.agent.clone(),
                            text: critique_text(&p.agent, &flags),
                            flags,
                        })
                    })
                    .collect::<std::result::Result<_, BackendError>>()?;
                Ok(Reply::Review { revision, critiques })
            }
            Request::Harmonize { round, answers, critiques, .. } => {
                let mut rng = self.rng(LANE_HARMONIZE, *round);
                Ok(Reply::Judgement(harmonize_votes(
                    &self.model,
                    &self.agent,
                    *round,
                    answers,
                    critiques,
                    &mut rng,
                )))
            }
        }
    }

    fn has_ground_truth(&self) -> bool {
        true
    }
}
