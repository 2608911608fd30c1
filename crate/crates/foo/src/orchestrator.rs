//! The consensus loop.
//!
//! Broadcast asks every agent, harmonizers included, for a first answer.
//! Each consensus round then calls every active agent once:
//!
//! 1. each specialist revises its answer under the previous round's
//!    judgement (from round 2 on) and critiques every other specialist's
//!    start-of-round answer, in one call;
//! 2. after a barrier, each harmonizer aggregates the round's critiques into
//!    a judgement; the first active harmonizer's judgement is authoritative.
//!
//! A run of `r` rounds with full participation therefore makes
//! `(1 + r) * |A|` backend calls. Calls within a phase run concurrently;
//! ledger appends happen afterwards in roster order from a single writer.

use discursive_ledger::{Kind, Ledger, Payload, Timestamp};
use serde::{Deserialize, Serialize};

use crate::backend::{check_reply, AgentBackend, Reply, Request, RevisionInput};
use crate::clock::{Clock, LogicalClock};
use crate::error::{BackendError, FooError, Result};
use crate::mock::MockBackend;
use crate::policy::{ConvergencePolicy, RetryPolicy};
use crate::record::{AgentFailure, Answer, Critique, History, Judgement, Phase, RoundRecord};
use crate::remote::{RemoteBackend, DEFAULT_TIMEOUT};
use crate::roster::{validate_roster, AgentSpec, BackendKind, RunConfig};
use crate::text::{max_pairwise_distance, normalized_edit_distance};

pub struct Agent {
    pub spec: AgentSpec,
    backend: Box<dyn AgentBackend>,
    active: bool,
}

impl Agent {
    pub fn new(spec: AgentSpec, backend: Box<dyn AgentBackend>) -> Self {
        Self { spec, backend, active: true }
    }

    pub fn is_active(&self) -> bool {
        self.active
    }

    pub fn has_ground_truth(&self) -> bool {
        self.backend.has_ground_truth()
    }
}

impl std::fmt::Debug for Agent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Agent")
            .field("spec", &self.spec)
            .field("active", &self.active)
            .finish_non_exhaustive()
    }
}

/// Instantiates the backend named by each roster entry.
pub fn build_agents(config: &RunConfig) -> Result<Vec<Agent>> {
    config.validate()?;
    config
        .agents
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let backend: Box<dyn AgentBackend> = match spec.backend {
                BackendKind::Mock => {
                    let model = config
                        .mock
                        .ok_or_else(|| FooError::Config("mock model missing".into()))?;
                    Box::new(MockBackend::new(model, spec.id.clone(), i))
                }
                BackendKind::Remote => Box::new(
                    RemoteBackend::from_spec(spec, DEFAULT_TIMEOUT)
                        .map_err(|e| FooError::Config(format!("agent {}: {e}", spec.id)))?,
                ),
            };
            Ok(Agent::new(spec.clone(), backend))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Converged { round: usize },
    MaxRounds,
    Aborted { reason: String },
}

#[derive(Debug)]
pub struct FooOutcome {
    pub status: RunStatus,
    /// Last authoritative judgement, if any round completed.
    pub judgement: Option<Judgement>,
    pub history: History,
    /// Run-level ledger covering every logged interaction.
    pub ledger: Ledger,
    /// One ledger per agent, in roster order, holding that agent's blocks.
    pub agent_ledgers: Vec<(String, Ledger)>,
    pub calls: u64,
    /// Latest answer of every specialist that produced one.
    pub final_answers: Vec<Answer>,
}

impl FooOutcome {
    /// Mean false-statement share over the final answers (mock backends).
    pub fn final_false_fraction(&self) -> Option<f64> {
        let fs: Option<Vec<f64>> = self.final_answers.iter().map(Answer::false_fraction).collect();
        let fs = fs?;
        (!fs.is_empty()).then(|| fs.iter().sum::<f64>() / fs.len() as f64)
    }
}

pub struct Orchestrator {
    agents: Vec<Agent>,
    ledger: Ledger,
    agent_ledgers: Vec<Ledger>,
    clock: Box<dyn Clock>,
    retry: RetryPolicy,
    calls: u64,
    history: History,
}

type CallResult = (std::result::Result<Reply, BackendError>, u32);

fn call_with_retry(agent: &mut Agent, req: &Request, retry: RetryPolicy) -> CallResult {
    let mut attempts = 0;
    loop {
        if attempts > 0 {
            std::thread::sleep(retry.delay(attempts));
        }
        attempts += 1;
        let res = agent
            .backend
            .call(req)
            .and_then(|r| check_reply(&agent.spec.id, req, &r).map(|()| r));
        if res.is_ok() || attempts > retry.retries {
            return (res, attempts);
        }
    }
}

impl Orchestrator {
    /// Needs a valid roster and a ledger that verifies. Timestamps come from
    /// a logical clock starting after the genesis block.
    pub fn new(agents: Vec<Agent>, ledger: Ledger) -> Result<Self> {
        let specs: Vec<AgentSpec> = agents.iter().map(|a| a.spec.clone()).collect();
        validate_roster(&specs)?;
        let verdict = ledger.verify();
        if !verdict.is_verified() {
            return Err(FooError::Config(format!("run ledger does not verify: {verdict}")));
        }
        let genesis = Timestamp::parse(&ledger.blocks()[0].timestamp)?;
        let agent_ledgers = agents
            .iter()
            .map(|_| Ledger::genesis(ledger.salt().clone(), genesis.clone()))
            .collect();
        Ok(Self {
            agents,
            agent_ledgers,
            clock: Box::new(LogicalClock::after(&genesis)),
            ledger,
            retry: RetryPolicy::default(),
            calls: 0,
            history: History::new(""),
        })
    }

    pub fn with_clock(mut self, clock: Box<dyn Clock>) -> Self {
        self.clock = clock;
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    fn log(&mut self, agent: usize, kind: Kind, message: String) -> Result<()> {
        let payload = Payload::new(self.agents[agent].spec.id.clone(), kind, message, self.clock.now());
        self.agent_ledgers[agent].append(payload.clone())?;
        self.ledger.append(payload)?;
        Ok(())
    }

    /// Runs every present request concurrently and waits for all of them.
    fn phase(&mut self, requests: &[Option<Request>]) -> Vec<Option<CallResult>> {
        let retry = self.retry;
        let results: Vec<Option<CallResult>> = std::thread::scope(|s| {
            let handles: Vec<_> = self
                .agents
                .iter_mut()
                .zip(requests)
                .map(|(agent, req)| req.as_ref().map(|r| s.spawn(move || call_with_retry(agent, r, retry))))
                .collect();
            handles
                .into_iter()
                .map(|h| h.map(|h| h.join().expect("backend call panicked")))
                .collect()
        });
        self.calls += results.iter().flatten().map(|(_, n)| u64::from(*n)).sum::<u64>();
        results
    }

    fn fail(&mut self, agent: usize, round: usize, phase: Phase, error: BackendError, attempts: u32) {
        self.agents[agent].active = false;
        self.history.failures.push(AgentFailure {
            agent: self.agents[agent].spec.id.clone(),
            round,
            phase,
            error: error.to_string(),
            attempts,
        });
    }

    fn abort_reason(&self, current: &[Option<Answer>]) -> Option<String> {
        let active = |h: bool| {
            self.agents
                .iter()
                .zip(current)
                .any(|(a, ans)| a.active && a.spec.is_harmonizer() == h && ans.is_some())
        };
        if !active(false) {
            Some("no active specialist remains".into())
        } else if !self.agents.iter().any(|a| a.active && a.spec.is_harmonizer()) {
            Some("no active harmonizer remains".into())
        } else {
            None
        }
    }

    pub fn run(mut self, task: &str, policy: &ConvergencePolicy) -> Result<FooOutcome> {
        if task.trim().is_empty() {
            return Err(FooError::Config("task must not be empty".into()));
        }
        policy.validate()?;
        self.history = History::new(task);
        let n = self.agents.len();

        let reqs: Vec<Option<Request>> = (0..n)
            .map(|_| Some(Request::Broadcast { task: task.to_owned() }))
            .collect();
        let mut current: Vec<Option<Answer>> = vec![None; n];
        for (i, res) in self.phase(&reqs).into_iter().enumerate() {
            match res {
                Some((Ok(Reply::Answer(a)), _)) => {
                    self.log(i, Kind::Initial, a.text.clone())?;
                    self.history.broadcast.push(a.clone());
                    current[i] = Some(a);
                }
                Some((Err(e), attempts)) => self.fail(i, 0, Phase::Broadcast, e, attempts),
                Some((Ok(_), _)) | None => unreachable!("checked by check_reply"),
            }
        }

        let mut prev: Option<Judgement> = None;
        let mut status = RunStatus::MaxRounds;
        for round in 1..=policy.max_rounds {
            if let Some(reason) = self.abort_reason(&current) {
                status = RunStatus::Aborted { reason };
                break;
            }
            let specialist = |a: &Agent| a.active && !a.spec.is_harmonizer();
            let snapshot: Vec<Answer> = self
                .agents
                .iter()
                .zip(&current)
                .filter(|(a, _)| specialist(a))
                .filter_map(|(_, ans)| ans.clone())
                .collect();

            let reqs: Vec<Option<Request>> = (0..n)
                .map(|i| {
                    let own = current[i].as_ref().filter(|_| specialist(&self.agents[i]))?;
                    let revise = prev
                        .as_ref()
                        .map(|j| RevisionInput { own: own.clone(), judgement: j.clone() });
                    let peers: Vec<Answer> = if policy.cross_examination {
                        snapshot.iter().filter(|a| a.agent != own.agent).cloned().collect()
                    } else {
                        Vec::new()
                    };
                    (revise.is_some() || !peers.is_empty()).then(|| Request::Review {
                        task: task.to_owned(),
                        round,
                        revise,
                        peers,
                    })
                })
                .collect();

            let mut record = RoundRecord {
                round,
                answers: snapshot.clone(),
                revisions: Vec::new(),
                critiques: Vec::new(),
                judgements: Vec::new(),
                metric: None,
            };
            let mut drift = 0.0f64;
            for (i, res) in self.phase(&reqs).into_iter().enumerate() {
                match res {
                    Some((Ok(Reply::Review { revision, critiques }), _)) => {
                        if let Some(r) = revision {
                            self.log(i, Kind::Revision, r.text.clone())?;
                            if let Some(old) = &current[i] {
                                drift = drift.max(normalized_edit_distance(&old.text, &r.text));
                            }
                            record.revisions.push(r.clone());
                            current[i] = Some(r);
                        }
                        for c in critiques {
                            self.log(i, Kind::Critique, critique_message(&c))?;
                            record.critiques.push(c);
                        }
                    }
                    Some((Err(e), attempts)) => self.fail(i, round, Phase::Review, e, attempts),
                    Some((Ok(_), _)) => unreachable!("checked by check_reply"),
                    None => {}
                }
            }
            if let Some(reason) = self.abort_reason(&current) {
                self.history.rounds.push(record);
                status = RunStatus::Aborted { reason };
                break;
            }

            let reqs: Vec<Option<Request>> = self
                .agents
                .iter()
                .map(|a| {
                    (a.active && a.spec.is_harmonizer()).then(|| Request::Harmonize {
                        task: task.to_owned(),
                        round,
                        answers: snapshot.clone(),
                        critiques: record.critiques.clone(),
                    })
                })
                .collect();
            for (i, res) in self.phase(&reqs).into_iter().enumerate() {
                match res {
                    Some((Ok(Reply::Judgement(j)), _)) => {
                        let message = serde_json::to_string(&j).expect("judgements serialize");
                        self.log(i, Kind::Harmonization, message)?;
                        record.judgements.push(j);
                    }
                    Some((Err(e), attempts)) => self.fail(i, round, Phase::Harmonize, e, attempts),
                    Some((Ok(_), _)) => unreachable!("checked by check_reply"),
                    None => {}
                }
            }
            if record.judgements.is_empty() {
                self.history.rounds.push(record);
                status = RunStatus::Aborted { reason: "no active harmonizer remains".into() };
                break;
            }

            let texts: Vec<&str> = self
                .agents
                .iter()
                .zip(&current)
                .filter(|(a, _)| specialist(a))
                .filter_map(|(_, ans)| ans.as_ref().map(|x| x.text.as_str()))
                .collect();
            let metric = drift.max(max_pairwise_distance(&texts));
            record.metric = Some(metric);
            prev = record.judgements.first().cloned();
            self.history.rounds.push(record);
            if policy.should_stop(round, metric) {
                if round >= policy.min_rounds && metric <= policy.edit_distance_threshold {
                    status = RunStatus::Converged { round };
                }
                break;
            }
        }

        let final_answers = self
            .agents
            .iter()
            .zip(&current)
            .filter(|(a, _)| !a.spec.is_harmonizer())
            .filter_map(|(_, ans)| ans.clone())
            .collect();
        let agent_ledgers = self
            .agents
            .iter()
            .map(|a| a.spec.id.clone())
            .zip(self.agent_ledgers)
            .collect();
        Ok(FooOutcome {
            status,
            judgement: prev,
            history: self.history,
            ledger: self.ledger,
            agent_ledgers,
            calls: self.calls,
            final_answers,
        })
    }
}

/// Critique blocks store the full critique record so the target survives in
/// the ledger.
fn critique_message(c: &Critique) -> String {
    serde_json::to_string(c).expect("critiques serialize")
}

/// Runs the loop with default retries and a logical clock.
pub fn run_foo(
    task: &str,
    agents: Vec<Agent>,
    policy: &ConvergencePolicy,
    ledger: Ledger,
) -> Result<FooOutcome> {
    Orchestrator::new(agents, ledger)?.run(task, policy)
}
