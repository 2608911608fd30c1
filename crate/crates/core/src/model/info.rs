//! Information measures: the invalidation floor (natural-log KL) and entropy
//! diagnostics (bits).

use serde::{Deserialize, Serialize};

use crate::error::{domain, ModelError, Result};

/// Tolerance on `sum(probabilities) = 1`.
pub const DISTRIBUTION_TOL: f64 = 1e-9;

/// Default floor in the denominator of [`concentration_ratio`].
pub const DEFAULT_CONCENTRATION_EPS: f64 = 1e-9;

/// Corpus contamination and model divergence.
///
/// `q_corpus` is the training-distribution mass on invalid sequences; it is
/// unrelated to the repair hazard `q`. `kl` is in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloorInputs {
    pub q_corpus: f64,
    pub kl: f64,
}

/// Lower bound `q exp(-KL / q)` on the invalid mass a trained model keeps.
pub fn invalidation_floor(inputs: &FloorInputs) -> Result<f64> {
    let FloorInputs { q_corpus, kl } = *inputs;
    if !(q_corpus.is_finite() && q_corpus > 0.0 && q_corpus <= 1.0) {
        return Err(domain(format!("q_corpus must lie in (0, 1], got {q_corpus}")));
    }
    if !(kl.is_finite() && kl >= 0.0) {
        return Err(domain(format!("kl must be finite and >= 0, got {kl}")));
    }
    Ok(q_corpus * (-kl / q_corpus).exp())
}

/// Finite distribution over ranked or indexed outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    probabilities: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(domain("distribution has no outcomes"));
        }
        if let Some(bad) = probabilities.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(domain(format!("probability {bad} is negative or not finite")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(domain(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { probabilities })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(domain("uniform distribution needs at least one outcome"));
        }
        Self::new(vec![1.0 / m as f64; m])
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Number of strictly positive entries.
    pub fn support_size(&self) -> usize {
        self.probabilities.iter().filter(|p| **p > 0.0).count()
    }

    /// Shannon entropy in bits over the support.
    pub fn entropy_bits(&self) -> f64 {
        entropy_bits(&self.probabilities)
    }

    /// Probabilities sorted in descending order.
    pub fn ranked(&self) -> Vec<f64> {
        let mut r = self.probabilities.clone();
        r.sort_by(|a, b| b.total_cmp(a));
        r
    }
}

fn entropy_bits(ps: &[f64]) -> f64 {
    ps.iter()
        .filter(|p| **p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// Chain-rule decomposition `H(L, Y) = H(L) + sum_n pi(n) H(Y | L = n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyDecomposition {
    pub length_entropy: f64,
    /// `H(Y | L = n)` for every length with positive probability, `None` otherwise.
    pub conditional_entropies: Vec<Option<f64>>,
    pub weighted_conditional_entropy: f64,
    /// `H(L) + sum_n pi(n) H(Y | L = n)`.
    pub chain_rule_joint: f64,
    /// Entropy of the flattened joint table `pi(n) P(y | n)`.
    pub direct_joint: f64,
}

impl EntropyDecomposition {
    /// `|chain_rule_joint - direct_joint|`.
    pub fn identity_residual(&self) -> f64 {
        (self.chain_rule_joint - self.direct_joint).abs()
    }
}

/// `conditionals[n]` must be `Some` whenever `length_dist[n] > 0`.
pub fn joint_entropy_decomposition(
    length_dist: &DiscreteDistribution,
    conditionals: &[Option<DiscreteDistribution>],
) -> Result<EntropyDecomposition> {
    if conditionals.len() != length_dist.len() {
        return Err(ModelError::Shape(format!(
            "{} conditional slots for {} lengths",
            conditionals.len(),
            length_dist.len()
        )));
    }
    let mut conditional_entropies = Vec::with_capacity(conditionals.len());
    let mut weighted = 0.0;
    let mut joint_cells = Vec::new();
    for (n, (&pi_n, cond)) in length_dist.probabilities().iter().zip(conditionals).enumerate() {
        if pi_n > 0.0 {
            let cond = cond.as_ref().ok_or_else(|| {
                ModelError::Shape(format!("no conditional distribution for length index {n}"))
            })?;
            let h = cond.entropy_bits();
            weighted += pi_n * h;
            conditional_entropies.push(Some(h));
            joint_cells.extend(cond.probabilities().iter().map(|p| pi_n * p));
        } else {
            conditional_entropies.push(None);
        }
    }
    let length_entropy = length_dist.entropy_bits();
    Ok(EntropyDecomposition {
        length_entropy,
        conditional_entropies,
        weighted_conditional_entropy: weighted,
        chain_rule_joint: length_entropy + weighted,
        direct_joint: entropy_bits(&joint_cells),
    })
}

/// `R_k(P) = (sum of the k largest p_i) / max(k / |supp P|, eps)`.
pub fn concentration_ratio(dist: &DiscreteDistribution, k: usize, eps: f64) -> Result<f64> {
    if k == 0 {
        return Err(domain("k must be >= 1"));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(domain(format!("eps must be > 0, got {eps}")));
    }
    let support = dist.support_size();
    if support == 0 {
        return Err(domain("distribution has empty support"));
    }
    let top: f64 = dist.ranked().iter().take(k).sum();
    let denom = (k as f64 / support as f64).max(eps);
    Ok(top / denom)
}

/// Prefix sums of the ranked probabilities, `[p_1, p_1 + p_2, ...]`.
pub fn ranked_prefix_mass(dist: &DiscreteDistribution) -> Vec<f64> {
    dist.ranked()
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_examples() {
        let f = |q, kl| invalidation_floor(&FloorInputs { q_corpus: q, kl }).unwrap();
        assert_eq!(f(0.1, 0.0), 0.1);
        assert!((f(0.1, 0.2) - 0.013_533_528_323_661_27).abs() < 1e-15);
        assert!(f(0.1, 0.2) < f(0.1, 0.1));
        assert!(f(0.5, 50.0) > 0.0);
    }

    #[test]
    fn floor_domain_errors() {
        let e = |q, kl| invalidation_floor(&FloorInputs { q_corpus: q, kl });
        assert!(e(0.0, 0.1).is_err());
        assert!(e(1.5, 0.1).is_err());
        assert!(e(0.1, -0.1).is_err());
        assert!(e(0.1, f64::INFINITY).is_err());
    }

    #[test]
    fn degenerate_length_distribution() {
        let length = DiscreteDistribution::new(vec![0.0, 1.0, 0.0]).unwrap();
        let cond = DiscreteDistribution::new(vec![0.5, 0.25, 0.25]).unwrap();
        let d = joint_entropy_decomposition(&length, &[None, Some(cond.clone()), None]).unwrap();
        assert_eq!(d.length_entropy, 0.0);
        assert!((d.chain_rule_joint - cond.entropy_bits()).abs() < 1e-12);
        assert!((d.chain_rule_joint - 1.5).abs() < 1e-12);
        assert_eq!(d.conditional_entropies, vec![None, Some(1.5), None]);
    }

    #[test]
    fn uniform_conditionals_give_two_bits() {
        let length = DiscreteDistribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        let u4 = DiscreteDistribution::uniform(4).unwrap();
        let conds = vec![Some(u4.clone()), Some(u4.clone()), Some(u4)];
        let d = joint_entropy_decomposition(&length, &conds).unwrap();
        assert!((d.weighted_conditional_entropy - 2.0).abs() < 1e-12);
        assert!(d.identity_residual() < 1e-9);
    }

    #[test]
    fn missing_conditional_is_shape_error() {
        let length = DiscreteDistribution::new(vec![0.5, 0.5]).unwrap();
        let u = DiscreteDistribution::uniform(2).unwrap();
        assert!(matches!(
            joint_entropy_decomposition(&length, &[Some(u.clone()), None]),
            Err(ModelError::Shape(_))
        ));
        assert!(matches!(
            joint_entropy_decomposition(&length, &[Some(u)]),
            Err(ModelError::Shape(_))
        ));
    }

    #[test]
    fn concentration_examples() {
        let u = DiscreteDistribution::uniform(10).unwrap();
        for k in 1..=10 {
            assert!((concentration_ratio(&u, k, DEFAULT_CONCENTRATION_EPS).unwrap() - 1.0).abs() < 1e-12);
        }

        let mut ps = vec![0.5, 0.4];
        ps.extend(std::iter::repeat_n(0.1 / 98.0, 98));
        let peaked = DiscreteDistribution::new(ps).unwrap();
        assert_eq!(peaked.support_size(), 100);
        let r = concentration_ratio(&peaked, 2, 1e-6).unwrap();
        assert!((r - 45.0).abs() < 1e-9);

        let prefix = ranked_prefix_mass(&peaked);
        assert!(prefix.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn distribution_validation() {
        assert!(DiscreteDistribution::new(vec![]).is_err());
        assert!(DiscreteDistribution::new(vec![0.5, 0.4]).is_err());
        assert!(DiscreteDistribution::new(vec![1.5, -0.5]).is_err());
        let u = DiscreteDistribution::uniform(3).unwrap();
        assert!(concentration_ratio(&u, 0, 1e-9).is_err());
        assert!(concentration_ratio(&u, 1, 0.0).is_err());
    }
}
