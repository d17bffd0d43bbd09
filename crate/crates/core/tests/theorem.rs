use hmc_core::verify::{sweep_instance, theorem_report};
use hmc_core::*;
use proptest::prelude::*;

const TOL: Tolerances = Tolerances::DEFAULT;

fn positive_fill(alphabet: &Alphabet, weights: &[f64]) -> JointDistribution {
    let raw: Vec<f64> = (0..alphabet.len()).map(|i| weights[i % weights.len()]).collect();
    let sum: f64 = raw.iter().sum();
    JointDistribution::new(alphabet.clone(), 1, raw.into_iter().map(|w| w / sum).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Uniqueness does not depend on which strictly positive fill is used.
    #[test]
    fn any_positive_fill_gives_a_unique_invariant(
        seed in 0u64..10_000,
        weights in prop::collection::vec(0.01f64..1.0, 3),
    ) {
        let inst = sweep_instance(seed).unwrap();
        let pi = stationary_first_order(&inst.chain, &TOL).unwrap();
        let oracle = lumped_oracle(&inst.chain, &pi, &inst.lumping, &TOL).unwrap();
        let fill = positive_fill(inst.lumping.codomain(), &weights);
        let z = markov_approximation(&oracle, inst.k, Some(&fill), &TOL).unwrap();
        let pk = oracle.marginal(inst.k).unwrap();
        let report = theorem_report(&z, &pk, &TOL).unwrap();
        prop_assert!(report.unique && report.mu_matches_lumped_marginal && report.support_equals_s);
        let proof = proof_structure_check(&z, &report.s, &TOL).unwrap();
        prop_assert!(proof.all());
        prop_assert!(proof.max_escape_steps <= inst.k);
    }
}

#[test]
fn fill_with_a_zero_is_rejected() {
    let x = corpus::example3_chain();
    let g = corpus::example3_lumping();
    let pi = stationary_first_order(&x, &TOL).unwrap();
    let oracle = lumped_oracle(&x, &pi, &g, &TOL).unwrap();
    let fill = JointDistribution::new(g.codomain().clone(), 1, vec![1.0, 0.0]).unwrap();
    assert!(matches!(
        markov_approximation(&oracle, 2, Some(&fill), &TOL),
        Err(Error::NonPositiveFill { index: 1, .. })
    ));
}

#[test]
fn canonical_examples_all_pass() {
    let report = canonical_examples(&TOL).unwrap();
    assert!(report.all_passed(), "{report:?}");
}

#[test]
fn non_ergodic_base_chain_is_a_precondition_failure() {
    let g = LumpingFunction::new(Alphabet::numbered(2).unwrap(), Alphabet::numbered(2).unwrap(), vec![0, 1])
        .unwrap();
    assert!(matches!(
        verify_main_theorem(&corpus::identity2(), &g, 1, &TOL),
        Err(Error::Precondition(_))
    ));
}
