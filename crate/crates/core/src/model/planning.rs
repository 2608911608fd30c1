//! Agent-count planning: effective correction hazard and the smallest number
//! of mutually detecting networks that meets a falsehood tolerance.

use super::params::{DetectionParams, HazardParams};
use crate::error::{domain, Result};

/// `q + (n - 1) d`: aggregate repair rate with `n - 1` detecting partners.
pub fn effective_hazard(q: f64, det: &DetectionParams, n: u32) -> Result<f64> {
    if n < 1 {
        return Err(domain("agent count n must be >= 1"));
    }
    if !(q.is_finite() && q > 0.0 && q < 1.0) {
        return Err(domain(format!("q must lie in (0, 1), got {q}")));
    }
    Ok(q + f64::from(n - 1) * det.d())
}

/// Stationary false share of a focal network coupled to `n - 1` partners.
pub fn false_share_with_agents(params: &HazardParams, det: &DetectionParams, n: u32) -> Result<f64> {
    let q_eff = effective_hazard(params.q(), det, n)?;
    let inflow = params.corruption();
    Ok(inflow / (inflow + q_eff))
}

/// Smallest `n >= 1` with `false_share_with_agents(n) <= epsilon`.
///
/// Evaluates the closed form `ceil(1 + ((p + lambda)(1/eps - 1) - q) / d)`,
/// clamps at one, then nudges by at most a step in either direction so the
/// result is minimal under the same floating-point evaluation as
/// [`false_share_with_agents`].
pub fn min_agents(params: &HazardParams, det: &DetectionParams, epsilon: f64) -> Result<u32> {
    if !(epsilon.is_finite() && epsilon > 0.0 && epsilon < 1.0) {
        return Err(domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let interior =
        1.0 + (params.corruption() * (1.0 / epsilon - 1.0) - params.q()) / det.d();
    let raw = interior.ceil();
    if raw > f64::from(u32::MAX - 1) {
        return Err(domain(format!("required agent count {raw} overflows")));
    }
    let mut n = (raw as u32).max(1);
    let share = |n| false_share_with_agents(params, det, n);
    while n > 1 && share(n - 1)? <= epsilon {
        n -= 1;
    }
    while share(n)? > epsilon {
        n += 1;
    }
    Ok(n)
}

/// Closed-form interior value before the ceiling, e.g. 8.24 for the
/// calibrated profile at `epsilon = 0.05`.
pub fn min_agents_interior(params: &HazardParams, det: &DetectionParams, epsilon: f64) -> f64 {
    1.0 + (params.corruption() * (1.0 / epsilon - 1.0) - params.q()) / det.d()
}
