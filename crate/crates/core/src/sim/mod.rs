//! Seeded stochastic simulation of actor networks.

pub mod ensemble;
pub mod export;
pub mod rng;
pub mod step;

pub use ensemble::{
    run_ensemble, run_replicates, run_trajectory, summarize, EnsembleSummary, NetworkSummary,
    Process, SimConfig, StepSummary, Trajectory, DEFAULT_ACTORS, Z_95,
};
pub use export::{to_csv, to_json};
pub use rng::{StreamKey, LANE_PARTNER, LANE_PRIMARY};
pub use step::{step_dual, step_single, DualModel, Fabrication, NetworkState};
