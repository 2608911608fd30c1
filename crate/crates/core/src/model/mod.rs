//! Closed-form mathematics of invalidation dynamics.
//!
//! Everything here is a pure function of its inputs. Hazards are per
//! statement per step; entropies are in bits; the KL divergence fed to
//! [`invalidation_floor`] is in nats.

mod cross;
mod info;
mod markov;
mod params;
mod planning;

pub use cross::{
    consistency_lambda, cross_fixed_point, cross_fixed_point_with_tolerance, truth_dominance,
    CrossEquilibrium, Dominance, DEFAULT_CONSISTENCY_TOL,
};
pub use info::{
    concentration_ratio, invalidation_floor, joint_entropy_decomposition, ranked_prefix_mass,
    DiscreteDistribution, EntropyDecomposition, FloorInputs, DEFAULT_CONCENTRATION_EPS,
    DISTRIBUTION_TOL,
};
pub use markov::{
    build_transition, fixed_point, iterate_expectation, spectral_gap, SpectralGap,
    TransitionMatrix,
};
pub use params::{
    DetectionParams, DualNetworkParams, HazardParams, ProportionState, NORMALIZATION_TOL,
};
pub use planning::{effective_hazard, false_share_with_agents, min_agents, min_agents_interior};
