//! Trajectories and ensembles of seeded runs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::{StreamKey, LANE_PRIMARY};
use super::step::{step_dual, step_single, DualModel, NetworkState};
use crate::error::{ModelError, Result};
use crate::model::{HazardParams, ProportionState};

/// Two-sided 95 % normal quantile used for confidence half-widths.
pub const Z_95: f64 = 1.96;

/// Default actors per network.
pub const DEFAULT_ACTORS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub actors: u64,
    pub steps: usize,
    pub runs: usize,
    pub seed: u64,
    pub initial_true_fraction: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            actors: DEFAULT_ACTORS,
            steps: 100,
            runs: 20,
            seed: 0,
            initial_true_fraction: 1.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.actors < 1 {
            return Err(ModelError::Config("actors must be >= 1".into()));
        }
        if self.runs < 1 {
            return Err(ModelError::Config("runs must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.initial_true_fraction) {
            return Err(ModelError::Config(format!(
                "initial_true_fraction must lie in [0, 1], got {}",
                self.initial_true_fraction
            )));
        }
        Ok(())
    }
}

/// The process being simulated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Process {
    Single { params: HazardParams },
    Dual { model: DualModel },
}

impl Process {
    pub fn networks(&self) -> usize {
        match self {
            Process::Single { .. } => 1,
            Process::Dual { .. } => 2,
        }
    }
}

/// One network's time series, `steps + 1` entries long.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub proportions: Vec<ProportionState>,
    pub states: Vec<NetworkState>,
}

impl Trajectory {
    fn from_states(states: Vec<NetworkState>) -> Self {
        let proportions = states.iter().map(NetworkState::proportions).collect();
        Self { proportions, states }
    }

    pub fn final_state(&self) -> &NetworkState {
        self.states.last().expect("trajectory always holds the initial state")
    }
}

/// Runs one replicate. Returns one trajectory per network; run `r` only
/// ever draws from streams keyed by `(config.seed, r)`.
pub fn run_trajectory(config: &SimConfig, process: &Process, run: u64) -> Result<Vec<Trajectory>> {
    config.validate()?;
    let key = StreamKey::new(config.seed);
    let start = NetworkState::with_true_fraction(config.actors, config.initial_true_fraction)?;
    match process {
        Process::Single { params } => {
            let mut states = Vec::with_capacity(config.steps + 1);
            let mut s = start;
            states.push(s);
            for step in 0..config.steps {
                s = step_single(&s, params, &mut key.step_rng(run, LANE_PRIMARY, step as u64));
                states.push(s);
            }
            Ok(vec![Trajectory::from_states(states)])
        }
        Process::Dual { model } => {
            let mut a = Vec::with_capacity(config.steps + 1);
            let mut b = Vec::with_capacity(config.steps + 1);
            let mut pair = [start, start];
            a.push(pair[0]);
            b.push(pair[1]);
            for step in 0..config.steps {
                pair = step_dual(&pair, model, &mut key.step_rng(run, LANE_PRIMARY, step as u64));
                a.push(pair[0]);
                b.push(pair[1]);
            }
            Ok(vec![Trajectory::from_states(a), Trajectory::from_states(b)])
        }
    }
}

/// Statistics at one step across runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub step: usize,
    pub mean_pi_r: f64,
    pub mean_pi_f: f64,
    /// 95 % half-width of the mean, `1.96 sd / sqrt(runs)`.
    pub ci_r: f64,
    pub ci_f: f64,
    /// Sample standard deviation of `pi_f` across runs.
    pub sd_f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSummary {
    pub network: usize,
    pub steps: Vec<StepSummary>,
}

impl NetworkSummary {
    pub fn final_step(&self) -> &StepSummary {
        self.steps.last().expect("summary covers at least the initial step")
    }

    pub fn mean_pi_f(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.mean_pi_f).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub config: SimConfig,
    pub process: Process,
    pub networks: Vec<NetworkSummary>,
}

/// All replicate trajectories, `runs x networks`, in run order.
pub fn run_replicates(config: &SimConfig, process: &Process) -> Result<Vec<Vec<Trajectory>>> {
    config.validate()?;
    (0..config.runs as u64)
        .into_par_iter()
        .map(|run| run_trajectory(config, process, run))
        .collect()
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Per-step mean and confidence half-widths across `config.runs` replicates.
pub fn run_ensemble(config: &SimConfig, process: &Process) -> Result<EnsembleSummary> {
    if config.runs < 2 {
        return Err(ModelError::Config(
            "an ensemble needs at least 2 runs for confidence intervals".into(),
        ));
    }
    let replicates = run_replicates(config, process)?;
    Ok(summarize(config, process, &replicates))
}

/// Deterministic reduction of replicate trajectories in run order.
pub fn summarize(
    config: &SimConfig,
    process: &Process,
    replicates: &[Vec<Trajectory>],
) -> EnsembleSummary {
    let runs = replicates.len();
    let scale = Z_95 / (runs as f64).sqrt();
    let networks = (0..process.networks())
        .map(|k| {
            let steps = (0..=config.steps)
                .map(|t| {
                    let rs: Vec<f64> =
                        replicates.iter().map(|r| r[k].proportions[t].pi_r).collect();
                    let fs: Vec<f64> =
                        replicates.iter().map(|r| r[k].proportions[t].pi_f).collect();
                    let (mean_r, sd_r) = mean_sd(&rs);
                    let (mean_f, sd_f) = mean_sd(&fs);
                    StepSummary {
                        step: t,
                        mean_pi_r: mean_r,
                        mean_pi_f: mean_f,
                        ci_r: scale * sd_r,
                        ci_f: scale * sd_f,
                        sd_f,
                    }
                })
                .collect();
            NetworkSummary { network: k, steps }
        })
        .collect();
    EnsembleSummary {
        config: *config,
        process: *process,
        networks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single() -> Process {
        Process::Single {
            params: HazardParams::calibrated(),
        }
    }

    #[test]
    fn zero_steps_is_initial_state() {
        let cfg = SimConfig { steps: 0, ..SimConfig::default() };
        let t = run_trajectory(&cfg, &single(), 0).unwrap();
        assert_eq!(t[0].states.len(), 1);
        assert_eq!(t[0].states[0].t_count, 1000);

        let s = run_ensemble(&cfg, &single()).unwrap();
        assert_eq!(s.networks[0].steps.len(), 1);
        assert_eq!(s.networks[0].steps[0].ci_f, 0.0);
        assert_eq!(s.networks[0].steps[0].ci_r, 0.0);
    }

    #[test]
    fn ensemble_needs_two_runs() {
        let cfg = SimConfig { runs: 1, ..SimConfig::default() };
        assert!(matches!(run_ensemble(&cfg, &single()), Err(ModelError::Config(_))));
    }

    #[test]
    fn different_seeds_different_paths() {
        let a = SimConfig { seed: 11, ..SimConfig::default() };
        let b = SimConfig { seed: 12, ..SimConfig::default() };
        assert_ne!(
            run_trajectory(&a, &single(), 0).unwrap(),
            run_trajectory(&b, &single(), 0).unwrap()
        );
    }

    #[test]
    fn means_are_normalized() {
        let cfg = SimConfig { steps: 30, runs: 5, ..SimConfig::default() };
        let s = run_ensemble(&cfg, &single()).unwrap();
        for st in &s.networks[0].steps {
            assert!((st.mean_pi_r + st.mean_pi_f - 1.0).abs() < 1e-12);
            assert!(st.ci_r >= 0.0 && st.ci_f >= 0.0);
        }
    }
}
