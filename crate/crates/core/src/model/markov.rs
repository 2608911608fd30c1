//! Two-state belief dynamics: transition matrix, equilibrium and convergence.

use serde::{Deserialize, Serialize};

use super::params::{HazardParams, ProportionState, NORMALIZATION_TOL};
use crate::error::{domain, Result};

/// Column-stochastic 2x2 matrix acting on `(pi_r, pi_f)` column vectors.
///
/// `entries[row][col]`; column 0 holds the fate of true believers, column 1
/// the fate of false believers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    entries: [[f64; 2]; 2],
}

impl TransitionMatrix {
    pub fn new(entries: [[f64; 2]; 2]) -> Result<Self> {
        for (col, (&a, &b)) in entries[0].iter().zip(&entries[1]).enumerate() {
            if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
                return Err(domain(format!("column {col} has entries outside [0, 1]")));
            }
            if (a + b - 1.0).abs() > NORMALIZATION_TOL {
                return Err(domain(format!("column {col} sums to {}, not 1", a + b)));
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row][col]
    }

    pub fn apply(&self, s: &ProportionState) -> ProportionState {
        let m = &self.entries;
        ProportionState {
            pi_r: m[0][0] * s.pi_r + m[0][1] * s.pi_f,
            pi_f: m[1][0] * s.pi_r + m[1][1] * s.pi_f,
        }
    }

    /// Non-unit eigenvalue. For a column-stochastic 2x2 matrix this is the
    /// trace minus one.
    pub fn second_eigenvalue(&self) -> f64 {
        self.entries[0][0] + self.entries[1][1] - 1.0
    }
}

/// `T_lambda` with fabrication folded into the true to false column.
pub fn build_transition(params: &HazardParams) -> TransitionMatrix {
    let out = params.corruption();
    let q = params.q();
    TransitionMatrix {
        entries: [[1.0 - out, q], [out, 1.0 - q]],
    }
}

/// Unique stationary state `(q, p + lambda) / (p + lambda + q)`.
pub fn fixed_point(params: &HazardParams) -> ProportionState {
    let out = params.corruption();
    let total = out + params.q();
    ProportionState {
        pi_r: params.q() / total,
        pi_f: out / total,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGap {
    /// `1 - (p + lambda + q)`.
    pub second_eigenvalue: f64,
    /// `1 - |second_eigenvalue|`.
    pub gap: f64,
}

pub fn spectral_gap(params: &HazardParams) -> SpectralGap {
    let second = 1.0 - (params.corruption() + params.q());
    SpectralGap {
        second_eigenvalue: second,
        gap: 1.0 - second.abs(),
    }
}

/// Deterministic mean trajectory `pi(t + 1) = T pi(t)`, `steps + 1` states.
pub fn iterate_expectation(
    matrix: &TransitionMatrix,
    start: ProportionState,
    steps: usize,
) -> Vec<ProportionState> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut state = start;
    out.push(state);
    for _ in 0..steps {
        state = matrix.apply(&state);
        out.push(state);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn calibrated_matrix() {
        let t = build_transition(&HazardParams::calibrated());
        let e = t.entries();
        assert!(close(e[0][0], 0.925, 1e-15));
        assert!(close(e[0][1], 0.05, 1e-15));
        assert!(close(e[1][0], 0.075, 1e-15));
        assert!(close(e[1][1], 0.95, 1e-15));
        assert!(TransitionMatrix::new(e).is_ok());
    }

    #[test]
    fn symmetric_flip_matrix() {
        let t = build_transition(&HazardParams::new(0.5, 0.5 - 1e-12, 0.0).unwrap());
        assert!(close(t.get(0, 0), 0.5, 1e-11));
        assert!(close(t.get(1, 1), 0.5, 1e-11));
    }

    #[test]
    fn fixed_point_examples() {
        let fp = fixed_point(&HazardParams::calibrated());
        assert!(close(fp.pi_r, 0.40, 1e-12));
        assert!(close(fp.pi_f, 0.60, 1e-12));

        let sym = fixed_point(&HazardParams::new(0.1, 0.1, 0.0).unwrap());
        assert!(close(sym.pi_r, 0.5, 1e-15));

        // p + q = 1 is outside the open domain; approach it from below.
        let near = fixed_point(&HazardParams::new(0.3, 0.7 - 1e-12, 0.0).unwrap());
        assert!(close(near.pi_r, 0.7, 1e-11));
        assert!(close(near.pi_f, 0.3, 1e-11));
    }

    #[test]
    fn spectral_gap_calibrated() {
        let g = spectral_gap(&HazardParams::calibrated());
        assert!(close(g.second_eigenvalue, 0.875, 1e-15));
        assert!(close(g.gap, 0.125, 1e-15));
        let m = build_transition(&HazardParams::calibrated());
        assert!(close(m.second_eigenvalue(), 0.875, 1e-15));
    }

    #[test]
    fn spectral_gap_near_unit_sum() {
        let g = spectral_gap(&HazardParams::new(0.3, 0.3, 0.4 - 1e-9).unwrap());
        assert!(close(g.gap, 1.0, 1e-8));
    }

    #[test]
    fn iterate_from_all_true() {
        let params = HazardParams::calibrated();
        let m = build_transition(&params);
        let traj = iterate_expectation(&m, ProportionState::all_true(), 100);
        assert_eq!(traj.len(), 101);
        assert!(close(traj[1].pi_r, 0.925, 1e-15));
        assert!(close(traj[1].pi_f, 0.075, 1e-15));
        assert!(close(traj[100].pi_f, 0.60, 1e-4));
    }

    #[test]
    fn iterate_from_fixed_point_is_constant() {
        let params = HazardParams::calibrated();
        let fp = fixed_point(&params);
        let traj = iterate_expectation(&build_transition(&params), fp, 25);
        for s in traj {
            assert!(s.distance(&fp) < 1e-14);
        }
    }

    #[test]
    fn zero_steps_returns_start() {
        let m = build_transition(&HazardParams::calibrated());
        let traj = iterate_expectation(&m, ProportionState::all_true(), 0);
        assert_eq!(traj, vec![ProportionState::all_true()]);
    }

    #[test]
    fn rejects_non_stochastic_matrix() {
        assert!(TransitionMatrix::new([[0.5, 0.5], [0.6, 0.5]]).is_err());
        assert!(TransitionMatrix::new([[1.2, 0.5], [-0.2, 0.5]]).is_err());
    }
}
