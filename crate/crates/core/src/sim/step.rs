//! One-step stochastic updates of actor counts.
//!
//! Within a step every count is drawn from the start-of-step state and the
//! moves are applied together:
//!
//! * `Z ~ Binomial(T, p)` true to false slips
//! * `X ~ Poisson(mean)` fabrications, truncated so `Z + X <= T`
//! * `W ~ Binomial(F, q)` internal repairs
//! * `Y ~ Binomial(F, d)` partner detections (dual only), truncated so `W + Y <= F`
//!
//! Fabrications convert true believers to false ones and detections convert
//! false believers back, so each network's actor count is conserved exactly.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::model::{DualNetworkParams, HazardParams, ProportionState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NetworkState {
    pub n: u64,
    pub t_count: u64,
    pub f_count: u64,
}

impl NetworkState {
    pub fn new(t_count: u64, f_count: u64) -> Result<Self> {
        let n = t_count
            .checked_add(f_count)
            .ok_or_else(|| domain("actor count overflows"))?;
        if n == 0 {
            return Err(domain("a network needs at least one actor"));
        }
        Ok(Self { n, t_count, f_count })
    }

    /// `round(true_fraction * n)` true believers, the rest false.
    pub fn with_true_fraction(n: u64, true_fraction: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&true_fraction) {
            return Err(domain(format!(
                "initial true fraction must lie in [0, 1], got {true_fraction}"
            )));
        }
        let t = ((true_fraction * n as f64).round() as u64).min(n);
        Self::new(t, n - t)
    }

    pub fn proportions(&self) -> ProportionState {
        let pi_f = self.f_count as f64 / self.n as f64;
        ProportionState {
            pi_r: self.t_count as f64 / self.n as f64,
            pi_f,
        }
    }
}

/// What the fabrication mean scales with in the dual-network model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fabrication {
    /// `E[X] = lambda * T`: each true statement fabricates independently.
    PerTrueStatement,
    /// `E[X] = lambda * n`: fabrication is a per-actor rate, matching the
    /// mean-field equations whose fixed point is `lambda / d`.
    #[default]
    PerActor,
}

/// Dual-network process definition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualModel {
    pub params: DualNetworkParams,
    pub fabrication: Fabrication,
}

impl DualModel {
    pub fn new(params: DualNetworkParams, fabrication: Fabrication) -> Self {
        Self { params, fabrication }
    }
}

fn binomial<R: Rng + ?Sized>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    // p and n are validated upstream; Binomial::new only fails outside [0, 1].
    Binomial::new(n, p.min(1.0))
        .map(|b| b.sample(rng))
        .unwrap_or(0)
}

fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if mean.is_nan() || mean <= 0.0 {
        return 0;
    }
    match Poisson::new(mean) {
        Ok(dist) => {
            let x: f64 = dist.sample(rng);
            x as u64
        }
        Err(_) => u64::MAX,
    }
}

/// Samples the outflow from true believers: `(Z, X)` with `Z + X <= T`.
fn true_outflow<R: Rng + ?Sized>(
    rng: &mut R,
    state: &NetworkState,
    params: &HazardParams,
    fabrication_mean: f64,
) -> u64 {
    let t = state.t_count;
    let slips = binomial(rng, t, params.p());
    let fabricated = poisson(rng, fabrication_mean).min(t - slips);
    slips + fabricated
}

/// Single network with slips, truncated fabrication and internal repair.
pub fn step_single<R: Rng + ?Sized>(
    state: &NetworkState,
    params: &HazardParams,
    rng: &mut R,
) -> NetworkState {
    let to_false = true_outflow(rng, state, params, params.lambda() * state.t_count as f64);
    let to_true = binomial(rng, state.f_count, params.q());
    NetworkState {
        n: state.n,
        t_count: state.t_count - to_false + to_true,
        f_count: state.f_count + to_false - to_true,
    }
}

/// Two networks that detect each other's falsehoods. Network 0 is sampled
/// before network 1 from the same stream.
pub fn step_dual<R: Rng + ?Sized>(
    states: &[NetworkState; 2],
    model: &DualModel,
    rng: &mut R,
) -> [NetworkState; 2] {
    let mut next = *states;
    for (k, state) in states.iter().enumerate() {
        let params = &model.params.networks[k];
        let d = model.params.detection[k].d();
        let base = match model.fabrication {
            Fabrication::PerTrueStatement => state.t_count,
            Fabrication::PerActor => state.n,
        };
        let to_false = true_outflow(rng, state, params, params.lambda() * base as f64);
        let repaired = binomial(rng, state.f_count, params.q());
        let detected = binomial(rng, state.f_count, d).min(state.f_count - repaired);
        let to_true = repaired + detected;
        next[k] = NetworkState {
            n: state.n,
            t_count: state.t_count - to_false + to_true,
            f_count: state.f_count + to_false - to_true,
        };
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DetectionParams;
    use crate::sim::rng::StreamKey;

    #[test]
    fn initial_state_rounding() {
        let s = NetworkState::with_true_fraction(1000, 1.0).unwrap();
        assert_eq!((s.t_count, s.f_count), (1000, 0));
        let s = NetworkState::with_true_fraction(3, 0.5).unwrap();
        assert_eq!(s.t_count + s.f_count, 3);
        assert!(NetworkState::with_true_fraction(10, 1.5).is_err());
        assert!(NetworkState::new(0, 0).is_err());
    }

    #[test]
    fn vanishing_hazards_leave_state_unchanged() {
        let params = HazardParams::new(1e-9, 1e-9, 0.0).unwrap();
        let s = NetworkState::new(600, 400).unwrap();
        let key = StreamKey::new(7);
        let unchanged = (0..200)
            .filter(|i| step_single(&s, &params, &mut key.step_rng(*i, 0, 0)) == s)
            .count();
        assert!(unchanged >= 199);
    }

    #[test]
    fn replay_is_identical() {
        let params = HazardParams::calibrated();
        let s = NetworkState::new(600, 400).unwrap();
        let key = StreamKey::new(2024);
        let a = step_single(&s, &params, &mut key.step_rng(0, 0, 5));
        let b = step_single(&s, &params, &mut key.step_rng(0, 0, 5));
        assert_eq!(a, b);
        assert_eq!(a.t_count + a.f_count, 1000);

        let dual = DualModel::new(DualNetworkParams::calibrated(), Fabrication::PerActor);
        let pair = [s, s];
        let a = step_dual(&pair, &dual, &mut key.step_rng(1, 0, 9));
        let b = step_dual(&pair, &dual, &mut key.step_rng(1, 0, 9));
        assert_eq!(a, b);
    }

    #[test]
    fn truncation_keeps_counts_valid_at_extremes() {
        // Huge fabrication pressure on a tiny network.
        let params = HazardParams::new(0.3, 0.1, 0.59).unwrap();
        let det = DetectionParams::new(0.9).unwrap();
        let dual = DualModel::new(DualNetworkParams::symmetric(params, det), Fabrication::PerActor);
        let key = StreamKey::new(1);
        let mut single = NetworkState::new(2, 1).unwrap();
        let mut pair = [NetworkState::new(1, 2).unwrap(), NetworkState::new(3, 0).unwrap()];
        for step in 0..500 {
            single = step_single(&single, &params, &mut key.step_rng(0, 0, step));
            pair = step_dual(&pair, &dual, &mut key.step_rng(0, 1, step));
            assert_eq!(single.t_count + single.f_count, 3);
            assert_eq!(pair[0].t_count + pair[0].f_count, 3);
            assert_eq!(pair[1].t_count + pair[1].f_count, 3);
        }
    }
}
