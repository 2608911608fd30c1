//! Hazard parameters and normalized belief states.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Tolerance on `pi_r + pi_f = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

fn open_unit(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must lie in (0, 1), got {v}")))
    }
}

/// Per-statement, per-step hazards of a single network.
///
/// * `p` - intrinsic true to false slip probability
/// * `q` - internal false to true repair probability
/// * `lambda` - fabrication hazard per true statement
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHazard")]
pub struct HazardParams {
    p: f64,
    q: f64,
    lambda: f64,
}

#[derive(Deserialize)]
struct RawHazard {
    p: f64,
    q: f64,
    lambda: f64,
}

impl TryFrom<RawHazard> for HazardParams {
    type Error = crate::ModelError;
    fn try_from(r: RawHazard) -> Result<Self> {
        Self::new(r.p, r.q, r.lambda)
    }
}

impl HazardParams {
    /// Calibration profile used throughout the parameter analysis.
    pub const CALIBRATED_P: f64 = 0.02;
    pub const CALIBRATED_Q: f64 = 0.05;
    pub const CALIBRATED_LAMBDA: f64 = 0.055;

    pub fn new(p: f64, q: f64, lambda: f64) -> Result<Self> {
        open_unit("p", p)?;
        open_unit("q", q)?;
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(domain(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        if p + lambda + q >= 1.0 {
            return Err(domain(format!(
                "p + lambda + q must be < 1 for geometric convergence, got {}",
                p + lambda + q
            )));
        }
        Ok(Self { p, q, lambda })
    }

    pub fn calibrated() -> Self {
        Self {
            p: Self::CALIBRATED_P,
            q: Self::CALIBRATED_Q,
            lambda: Self::CALIBRATED_LAMBDA,
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Total true to false inflow hazard, `p + lambda`.
    pub fn corruption(&self) -> f64 {
        self.p + self.lambda
    }
}

/// Probability per false statement per step that a partner network detects
/// and corrects it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDetection")]
pub struct DetectionParams {
    d: f64,
}

#[derive(Deserialize)]
struct RawDetection {
    d: f64,
}

impl TryFrom<RawDetection> for DetectionParams {
    type Error = crate::ModelError;
    fn try_from(r: RawDetection) -> Result<Self> {
        Self::new(r.d)
    }
}

impl DetectionParams {
    pub const CALIBRATED_D: f64 = 0.19;

    pub fn new(d: f64) -> Result<Self> {
        open_unit("d", d)?;
        Ok(Self { d })
    }

    pub fn calibrated() -> Self {
        Self { d: Self::CALIBRATED_D }
    }

    pub fn d(&self) -> f64 {
        self.d
    }
}

/// Hazards of two coupled networks. `detection[k]` is the probability that a
/// false statement of network `k` is caught by its partner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualNetworkParams {
    pub networks: [HazardParams; 2],
    pub detection: [DetectionParams; 2],
}

impl DualNetworkParams {
    /// Two identical networks detecting each other's falsehoods at the same rate.
    pub fn symmetric(params: HazardParams, det: DetectionParams) -> Self {
        Self {
            networks: [params, params],
            detection: [det, det],
        }
    }

    pub fn calibrated() -> Self {
        Self::symmetric(HazardParams::calibrated(), DetectionParams::calibrated())
    }
}

/// Normalized belief shares `(pi_r, pi_f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProportionState {
    pub pi_r: f64,
    pub pi_f: f64,
}

impl ProportionState {
    pub fn new(pi_r: f64, pi_f: f64) -> Result<Self> {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        if !in_unit(pi_r) || !in_unit(pi_f) {
            return Err(domain(format!("shares must lie in [0, 1], got ({pi_r}, {pi_f})")));
        }
        if (pi_r + pi_f - 1.0).abs() > NORMALIZATION_TOL {
            return Err(domain(format!("shares must sum to 1, got {}", pi_r + pi_f)));
        }
        Ok(Self { pi_r, pi_f })
    }

    /// State with the given true share and its complement.
    pub fn from_true_share(pi_r: f64) -> Result<Self> {
        Self::new(pi_r, 1.0 - pi_r)
    }

    pub fn all_true() -> Self {
        Self { pi_r: 1.0, pi_f: 0.0 }
    }

    /// Sup-norm distance between two states.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.pi_r - other.pi_r).abs().max((self.pi_f - other.pi_f).abs())
    }
}
