use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use discursive_foo::{
    estimate_empirical_hazards, Agent, AgentBackend, AgentSpec, BackendError, ConvergencePolicy,
    FooError, MockAgentModel, MockBackend, Orchestrator, Reply, Request, RetryPolicy, Role,
    RunStatus,
};
use discursive_ledger::{Kind, Ledger, Salt, Timestamp};

fn ledger() -> Ledger {
    Ledger::genesis(Salt::new(b"test-salt".to_vec()).unwrap(), Timestamp::epoch())
}

fn mock_agents(model: MockAgentModel, specialists: usize, harmonizers: usize) -> Vec<Agent> {
    let specs = (0..harmonizers)
        .map(|i| AgentSpec::mock(format!("h{i}"), Role::Harmonizer))
        .chain((0..specialists).map(|i| AgentSpec::mock(format!("s{i}"), Role::Specialist)));
    specs
        .enumerate()
        .map(|(pos, spec)| {
            let backend = MockBackend::new(model, spec.id.clone(), pos);
            Agent::new(spec, Box::new(backend))
        })
        .collect()
}

fn run(model: MockAgentModel, specialists: usize, policy: &ConvergencePolicy) -> discursive_foo::FooOutcome {
    Orchestrator::new(mock_agents(model, specialists, 1), ledger())
        .unwrap()
        .run("assess the claims", policy)
        .unwrap()
}

#[test]
fn three_agents_three_rounds_make_twelve_calls() {
    let out = run(MockAgentModel::calibrated(20, 1), 2, &ConvergencePolicy::fixed_rounds(3));
    assert_eq!(out.calls, 12);
    assert_eq!(out.history.rounds.len(), 3);
    assert!(!matches!(out.status, RunStatus::Aborted { .. }));
}

#[test]
fn critiques_cover_every_ordered_pair_without_self() {
    let out = run(MockAgentModel::calibrated(20, 2), 4, &ConvergencePolicy::fixed_rounds(2));
    for r in &out.history.rounds {
        assert_eq!(r.critiques.len(), 4 * 3);
        assert!(r.critiques.iter().all(|c| c.critic != c.target));
        assert!(r.critiques.iter().all(|c| !c.target.starts_with('h')));
    }
}

#[test]
fn ledger_records_every_interaction_and_verifies() {
    let out = run(MockAgentModel::calibrated(20, 3), 3, &ConvergencePolicy::fixed_rounds(3));
    let count = |k: Kind| out.ledger.blocks().iter().filter(|b| b.kind == k).count();
    assert_eq!(count(Kind::Initial), 4);
    let critiques: usize = out.history.rounds.iter().map(|r| r.critiques.len()).sum();
    let revisions: usize = out.history.rounds.iter().map(|r| r.revisions.len()).sum();
    assert_eq!(count(Kind::Critique), critiques);
    assert_eq!(count(Kind::Revision), revisions);
    assert_eq!(count(Kind::Harmonization), 3);
    assert_eq!(out.ledger.len(), 1 + 4 + critiques + revisions + 3);
    assert!(out.ledger.verify().is_verified());
    // Revisions start in round 2 and precede that round's critiques.
    assert_eq!(revisions, 2 * 3);
    for (id, l) in &out.agent_ledgers {
        assert!(l.verify().is_verified(), "{id}");
        assert!(l.blocks()[1..].iter().all(|b| &b.agent == id));
    }
    let total: usize = out.agent_ledgers.iter().map(|(_, l)| l.len() - 1).sum();
    assert_eq!(total, out.ledger.len() - 1);
}

#[test]
fn identical_answers_converge_after_one_round() {
    let model = MockAgentModel::new(10, 0.0, 0.05, 0.19, 4).unwrap();
    let policy = ConvergencePolicy { min_rounds: 1, ..ConvergencePolicy::default() };
    let out = run(model, 3, &policy);
    assert_eq!(out.status, RunStatus::Converged { round: 1 });
    assert_eq!(out.history.rounds[0].metric, Some(0.0));
    assert_eq!(out.calls, 4 + 4);
}

#[test]
fn flawless_judgement_leaves_true_answers_unchanged() {
    let model = MockAgentModel::new(10, 0.0, 0.05, 0.19, 5).unwrap();
    let out = run(model, 2, &ConvergencePolicy::fixed_rounds(3));
    for r in &out.history.rounds[1..] {
        for rev in &r.revisions {
            let before = r.answers.iter().find(|a| a.agent == rev.agent).unwrap();
            assert_eq!(before.text, rev.text);
        }
        assert_eq!(r.metric, Some(0.0));
    }
}

fn mean_final_false(cross_examination: bool) -> f64 {
    let mut total = 0.0;
    for seed in 0..20 {
        let policy = ConvergencePolicy { cross_examination, ..ConvergencePolicy::fixed_rounds(5) };
        let out = run(MockAgentModel::calibrated(50, seed), 3, &policy);
        total += out.final_false_fraction().unwrap();
    }
    total / 20.0
}

#[test]
fn cross_examination_beats_control() {
    let (critiqued, control) = (mean_final_false(true), mean_final_false(false));
    assert!(critiqued < control, "critiqued {critiqued} control {control}");
    assert!(critiqued < 0.60);
}

#[test]
fn control_run_skips_round_one_calls() {
    let policy = ConvergencePolicy { cross_examination: false, ..ConvergencePolicy::fixed_rounds(1) };
    let out = run(MockAgentModel::calibrated(10, 6), 2, &policy);
    // Broadcast plus the harmonizer; specialists have nothing to do yet.
    assert_eq!(out.calls, 3 + 1);
    assert!(out.history.rounds[0].critiques.is_empty());
}

#[test]
fn runs_are_deterministic() {
    let a = run(MockAgentModel::calibrated(30, 7), 3, &ConvergencePolicy::fixed_rounds(4));
    let b = run(MockAgentModel::calibrated(30, 7), 3, &ConvergencePolicy::fixed_rounds(4));
    assert_eq!(a.history, b.history);
    assert_eq!(a.ledger, b.ledger);
    let c = run(MockAgentModel::calibrated(30, 8), 3, &ConvergencePolicy::fixed_rounds(4));
    assert_ne!(a.history, c.history);
}

#[test]
fn hazard_estimates_recover_the_mock() {
    let model = MockAgentModel::calibrated(200, 11);
    let out = run(model, 4, &ConvergencePolicy::fixed_rounds(20));
    let est = estimate_empirical_hazards(&out.history).unwrap();
    assert!((est.lambda - model.lambda).abs() <= 0.02, "{est:?}");
    assert!((est.q - model.q).abs() <= 0.02, "{est:?}");
    assert!((est.d - model.d).abs() <= 0.02, "{est:?}");
}

#[test]
fn degenerate_hazards_estimate_to_zero() {
    let out = run(MockAgentModel::new(50, 0.0, 0.05, 0.19, 12).unwrap(), 3, &ConvergencePolicy::fixed_rounds(4));
    assert_eq!(estimate_empirical_hazards(&out.history).unwrap().lambda, 0.0);
    let out = run(MockAgentModel::new(50, 0.2, 0.05, 0.0, 13).unwrap(), 3, &ConvergencePolicy::fixed_rounds(4));
    assert_eq!(estimate_empirical_hazards(&out.history).unwrap().d, 0.0);
}

#[test]
fn estimator_needs_two_rounds() {
    let out = run(MockAgentModel::calibrated(10, 14), 2, &ConvergencePolicy::fixed_rounds(1));
    assert!(matches!(estimate_empirical_hazards(&out.history), Err(FooError::Config(_))));
}

/// Fails every call after the first `ok` calls.
struct Flaky {
    inner: MockBackend,
    ok: u64,
    seen: Arc<AtomicU64>,
}

impl AgentBackend for Flaky {
    fn call(&mut self, request: &Request) -> Result<Reply, BackendError> {
        if self.seen.fetch_add(1, Ordering::SeqCst) >= self.ok {
            return Err(BackendError::Status(503));
        }
        self.inner.call(request)
    }
}

fn flaky_run(fail_role: Role, ok: u64) -> (discursive_foo::FooOutcome, u64) {
    let model = MockAgentModel::calibrated(10, 15);
    let seen = Arc::new(AtomicU64::new(0));
    let mut agents = mock_agents(model, 2, 1);
    let pos = agents.iter().position(|a| a.spec.role == fail_role).unwrap();
    let spec = agents[pos].spec.clone();
    agents[pos] = Agent::new(
        spec.clone(),
        Box::new(Flaky { inner: MockBackend::new(model, spec.id, pos), ok, seen: seen.clone() }),
    );
    let retry = RetryPolicy { retries: 2, base_delay: Duration::from_millis(1) };
    let out = Orchestrator::new(agents, ledger())
        .unwrap()
        .with_retry(retry)
        .run("task", &ConvergencePolicy::fixed_rounds(3))
        .unwrap();
    (out, seen.load(Ordering::SeqCst))
}

#[test]
fn failed_harmonizer_aborts_with_intact_ledger() {
    let (out, seen) = flaky_run(Role::Harmonizer, 1);
    assert!(matches!(out.status, RunStatus::Aborted { .. }));
    assert_eq!(seen, 1 + 3);
    assert_eq!(out.history.failures.len(), 1);
    assert_eq!(out.history.failures[0].attempts, 3);
    assert_eq!(out.history.rounds.len(), 1);
    assert!(out.ledger.verify().is_verified());
    assert!(out.judgement.is_none());
}

#[test]
fn failed_specialist_drops_out_and_run_continues() {
    let (out, _) = flaky_run(Role::Specialist, 1);
    assert_eq!(out.history.rounds.len(), 3);
    assert!(!matches!(out.status, RunStatus::Aborted { .. }));
    assert_eq!(out.history.failures.len(), 1);
    // Round 1 critiques were made against the start-of-round snapshot; after
    // that the remaining specialist has no peer left.
    assert_eq!(out.history.rounds[0].critiques.len(), 1);
    assert!(out.history.rounds[1].critiques.is_empty());
    assert_eq!(out.history.rounds[1].revisions.len(), 1);
    assert_eq!(out.final_answers.len(), 2);
    assert!(out.ledger.verify().is_verified());
}

#[test]
fn rejects_unverified_ledger_and_empty_task() {
    let model = MockAgentModel::calibrated(10, 16);
    let mut l = ledger();
    l.blocks_mut()[0].message.push('x');
    assert!(Orchestrator::new(mock_agents(model, 2, 1), l).is_err());
    let orch = Orchestrator::new(mock_agents(model, 2, 1), ledger()).unwrap();
    assert!(orch.run("  ", &ConvergencePolicy::default()).is_err());
}
