//! Dual-network equilibrium under cross-network detection.

use serde::{Deserialize, Serialize};

use super::markov::fixed_point;
use super::params::{DetectionParams, HazardParams};
use crate::error::{domain, ModelError, Result};

/// Default relative tolerance on `|lambda - d p / (p + q)|`.
pub const DEFAULT_CONSISTENCY_TOL: f64 = 0.05;

/// Residuals at or below this relative size count as an exact match.
const EXACT_REL: f64 = 1e-12;

/// Fabrication hazard that keeps the dual-network mean proportions normalized:
/// `lambda = d p / (p + q)`.
///
/// Takes raw hazards so boundary values (`d = 0`) can be evaluated.
pub fn consistency_lambda(p: f64, q: f64, d: f64) -> f64 {
    d * p / (p + q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossEquilibrium {
    /// `lambda q / (d p)`.
    pub pi_t: f64,
    /// `lambda / d`.
    pub pi_f: f64,
    /// `pi_t + pi_f`; equals one only when the consistency constraint holds.
    pub sum: f64,
    /// `|lambda - d p / (p + q)| / (d p / (p + q))`.
    pub relative_residual: f64,
    /// Set when the constraint is not met exactly but lies within tolerance,
    /// so the pair may not be normalized.
    pub inconsistent: bool,
}

/// Mean fixed point of one network coupled to a detecting partner, using the
/// default consistency tolerance.
pub fn cross_fixed_point(params: &HazardParams, det: &DetectionParams) -> Result<CrossEquilibrium> {
    cross_fixed_point_with_tolerance(params, det, DEFAULT_CONSISTENCY_TOL)
}

pub fn cross_fixed_point_with_tolerance(
    params: &HazardParams,
    det: &DetectionParams,
    tolerance: f64,
) -> Result<CrossEquilibrium> {
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return Err(domain(format!("tolerance must be >= 0, got {tolerance}")));
    }
    let (p, q, lambda, d) = (params.p(), params.q(), params.lambda(), det.d());
    let pi_f = lambda / d;
    if pi_f > 1.0 {
        return Err(domain(format!(
            "lambda / d = {pi_f} exceeds 1; detection too weak for this fabrication rate"
        )));
    }
    let consistent = consistency_lambda(p, q, d);
    let relative_residual = (lambda - consistent).abs() / consistent;
    if relative_residual > tolerance {
        return Err(ModelError::Consistency {
            lambda,
            consistent,
            relative_residual,
            tolerance,
        });
    }
    let pi_t = lambda * q / (d * p);
    Ok(CrossEquilibrium {
        pi_t,
        pi_f,
        sum: pi_t + pi_f,
        relative_residual,
        inconsistent: relative_residual > EXACT_REL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dominance {
    pub truth_dominant: bool,
    /// `pi_f(single) - pi_f(cross)`; positive when detection helps.
    pub margin: f64,
    pub single_pi_f: f64,
    pub cross_pi_f: f64,
}

/// Compares the isolated stationary false share with `lambda / d`.
pub fn truth_dominance(params: &HazardParams, det: &DetectionParams) -> Dominance {
    let single_pi_f = fixed_point(params).pi_f;
    let cross_pi_f = params.lambda() / det.d();
    let margin = single_pi_f - cross_pi_f;
    Dominance {
        truth_dominant: margin > 0.0,
        margin,
        single_pi_f,
        cross_pi_f,
    }
}
