use discursive_core::model::*;
use proptest::prelude::*;

fn hazards() -> impl Strategy<Value = HazardParams> {
    (0.001f64..0.3, 0.001f64..0.3, 0.0f64..0.3)
        .prop_map(|(p, q, l)| HazardParams::new(p, q, l).unwrap())
}

fn detection() -> impl Strategy<Value = DetectionParams> {
    (0.01f64..0.9).prop_map(|d| DetectionParams::new(d).unwrap())
}

/// Hazards whose fabrication rate satisfies the dual-network constraint exactly.
fn consistent_pair() -> impl Strategy<Value = (HazardParams, DetectionParams)> {
    (0.001f64..0.3, 0.001f64..0.3, 0.01f64..0.6).prop_map(|(p, q, d)| {
        let l = consistency_lambda(p, q, d);
        (HazardParams::new(p, q, l).unwrap(), DetectionParams::new(d).unwrap())
    })
}

fn sup(a: &ProportionState, b: &ProportionState) -> f64 {
    (a.pi_r - b.pi_r).abs().max((a.pi_f - b.pi_f).abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn fixed_point_is_invariant(h in hazards()) {
        let t = build_transition(&h);
        let pi = fixed_point(&h);
        prop_assert!(sup(&t.apply(&pi), &pi) <= 1e-12);
        prop_assert!((pi.pi_r + pi.pi_f - 1.0).abs() <= NORMALIZATION_TOL);
        let cols = t.entries();
        for (a, b) in cols[0].iter().zip(&cols[1]) {
            prop_assert!((a + b - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn expectation_contracts_geometrically(h in hazards(), r0 in 0.0f64..=1.0, steps in 0usize..60) {
        let t = build_transition(&h);
        let pi = fixed_point(&h);
        let start = ProportionState::from_true_share(r0).unwrap();
        let path = iterate_expectation(&t, start, steps);
        prop_assert_eq!(path.len(), steps + 1);
        let rate = (1.0 - (h.p() + h.lambda() + h.q())).abs();
        let d0 = sup(&start, &pi);
        for (k, s) in path.iter().enumerate() {
            prop_assert!(sup(s, &pi) <= d0 * rate.powi(k as i32) + 1e-9);
        }
    }

    #[test]
    fn one_agent_is_the_isolated_network(h in hazards(), d in detection()) {
        prop_assert_eq!(false_share_with_agents(&h, &d, 1).unwrap(), fixed_point(&h).pi_f);
    }

    #[test]
    fn min_agents_is_minimal(h in hazards(), d in detection()) {
        for i in 1..=99 {
            let eps = f64::from(i) / 100.0;
            let n = min_agents(&h, &d, eps).unwrap();
            prop_assert!(false_share_with_agents(&h, &d, n).unwrap() <= eps);
            if n > 1 {
                prop_assert!(false_share_with_agents(&h, &d, n - 1).unwrap() > eps);
            }
        }
    }

    #[test]
    fn dominance_sign_matches_equilibria((h, d) in consistent_pair()) {
        let single = fixed_point(&h).pi_f;
        let cross = cross_fixed_point(&h, &d).unwrap().pi_f;
        let dom = truth_dominance(&h, &d);
        prop_assert_eq!(dom.truth_dominant, single - cross > 0.0);
    }

    #[test]
    fn consistent_cross_pair_is_normalized((h, d) in consistent_pair()) {
        let eq = cross_fixed_point(&h, &d).unwrap();
        prop_assert!((eq.pi_t + eq.pi_f - 1.0).abs() <= 1e-12);
        prop_assert!(!eq.inconsistent);
    }

    #[test]
    fn floor_properties(q in 0.01f64..=1.0, kl in 0.0f64..5.0, dk in 1e-3f64..1.0, dq in 1e-3f64..0.5) {
        let f = |q_corpus, kl| invalidation_floor(&FloorInputs { q_corpus, kl }).unwrap();
        let v = f(q, kl);
        prop_assert!(v > 0.0 && v <= q);
        prop_assert_eq!(f(q, 0.0), q);
        prop_assert!(f(q, kl + dk) < v);
        let q2 = (q + dq).min(1.0);
        if q2 > q {
            prop_assert!(f(q2, kl) > v);
        }
    }
}

fn table() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..=8, 1usize..=8).prop_flat_map(|(rows, cols)| {
        prop::collection::vec(prop::collection::vec(prop_oneof![Just(0.0), 0.01f64..1.0], cols), rows)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn entropy_chain_rule_matches_brute_force(raw in table()) {
        let total: f64 = raw.iter().flatten().sum();
        prop_assume!(total > 0.0);
        let joint: Vec<Vec<f64>> =
            raw.iter().map(|r| r.iter().map(|x| x / total).collect()).collect();
        let marginal: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
        let conds: Vec<Option<DiscreteDistribution>> = joint
            .iter()
            .zip(&marginal)
            .map(|(r, m)| {
                (*m > 0.0).then(|| {
                    let row: Vec<f64> = r.iter().map(|x| x / m).collect();
                    let s: f64 = row.iter().sum();
                    DiscreteDistribution::new(row.iter().map(|x| x / s).collect()).unwrap()
                })
            })
            .collect();
        let ms: f64 = marginal.iter().sum();
        let length = DiscreteDistribution::new(marginal.iter().map(|x| x / ms).collect()).unwrap();
        let dec = joint_entropy_decomposition(&length, &conds).unwrap();

        let brute: f64 = joint
            .iter()
            .flatten()
            .filter(|p| **p > 0.0)
            .map(|p| -p * p.log2())
            .sum();
        prop_assert!((dec.chain_rule_joint - brute).abs() <= 1e-9);
        prop_assert!(dec.identity_residual() <= 1e-9);
    }

    #[test]
    fn ranked_prefix_is_monotone(raw in prop::collection::vec(0.0f64..1.0, 1..50)) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 0.0);
        let dist = DiscreteDistribution::new(raw.iter().map(|x| x / total).collect()).unwrap();
        let prefix = ranked_prefix_mass(&dist);
        prop_assert!(prefix.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!((prefix.last().unwrap() - 1.0).abs() < 1e-9);
    }
}
