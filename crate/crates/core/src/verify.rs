//! Executable checks of the uniqueness theorem for Markov approximations of
//! lumped chains, its corollaries, and the reference examples.
//!
//! The pipeline for one instance is: stationary chain `X` -> lumped process
//! `Y = g(X)` -> k-th order approximation `Z` -> lift -> classification and
//! invariant set. The theorem predicts a single recurrent class equal to the
//! support `S` of the arity-k marginal of `Y`.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{
    encode_context, lift, n_step_matrix, Alphabet, HigherOrderChain, JointDistribution,
    Tolerances,
};
use crate::classify::{
    classify_lift, default_regularity_bound, is_regular, reachable_from, single_recurrent_class,
    ClassDecomposition,
};
use crate::error::{Error, Result};
use crate::invariant::{invariant_set, is_invariant, pair_marginal_consistency, stationary_first_order};
use crate::process::{
    lumped_oracle, markov_approximation, project_oracle, relative_entropy_rate, LumpingFunction,
    MarginalOracle,
};
use crate::{chain::chain_oracle, corpus};

/// Outcome of running the theorem pipeline on one approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremReport {
    pub unique: bool,
    pub num_recurrent_classes_of_lift: usize,
    /// The invariant distribution, present iff it is unique.
    pub mu: Option<JointDistribution>,
    pub mu_matches_lumped_marginal: bool,
    pub support_equals_s: bool,
    /// Support of the process's arity-k marginal, as context indices.
    pub s: Vec<usize>,
    pub classes: ClassDecomposition,
    pub approximation: HigherOrderChain,
}

/// Evaluates an order-k chain `z` against the arity-k marginal it was
/// derived from.
pub fn theorem_report(
    z: &HigherOrderChain,
    marginal: &JointDistribution,
    tol: &Tolerances,
) -> Result<TheoremReport> {
    let classes = classify_lift(z, tol);
    let points = invariant_set(z, tol)?;
    let s = marginal.support(tol.zero);
    let unique = points.len() == 1;
    let (mu, matches, support_equal) = if unique {
        let mu = points.into_iter().next().expect("one point");
        let matches = mu.max_abs_diff(marginal)? <= 1e-9;
        let support_equal = mu.support(tol.zero) == s;
        (Some(mu), matches, support_equal)
    } else {
        (None, false, false)
    };
    Ok(TheoremReport {
        unique,
        num_recurrent_classes_of_lift: classes.num_classes(),
        mu,
        mu_matches_lumped_marginal: matches,
        support_equals_s: support_equal,
        s,
        classes,
        approximation: z.clone(),
    })
}

fn check_theorem_preconditions(
    x: &HigherOrderChain,
    g: &LumpingFunction,
    k: usize,
    tol: &Tolerances,
) -> Result<()> {
    if x.order() != 1 {
        return Err(Error::Precondition(format!("X must be first order, got order {}", x.order())));
    }
    if !single_recurrent_class(x, tol)? {
        return Err(Error::Precondition("X must have a single recurrent class".into()));
    }
    if g.domain() != x.alphabet() {
        return Err(Error::Precondition("lumping domain must equal the alphabet of X".into()));
    }
    if k == 0 {
        return Err(Error::Precondition("approximation order must be at least 1".into()));
    }
    Ok(())
}

/// Runs the theorem pipeline with uniform fill.
pub fn verify_main_theorem(
    x: &HigherOrderChain,
    g: &LumpingFunction,
    k: usize,
    tol: &Tolerances,
) -> Result<TheoremReport> {
    check_theorem_preconditions(x, g, k, tol)?;
    let pi = stationary_first_order(x, tol)?;
    let oracle = lumped_oracle(x, &pi, g, tol)?;
    let z = markov_approximation(&oracle, k, None, tol)?;
    theorem_report(&z, &oracle.marginal(k)?, tol)
}

/// Copy of `chain` with one context row replaced. Used to build the
/// counterexample where a zero in the fill creates a second closed class.
pub fn override_row(chain: &HigherOrderChain, context: usize, row: Vec<f64>) -> Result<HigherOrderChain> {
    let mut rows = chain.to_rows();
    if context >= rows.len() {
        return Err(Error::ContextOutOfRange { index: context, contexts: rows.len() });
    }
    rows[context] = row;
    HigherOrderChain::new(chain.alphabet().clone(), chain.order(), rows)
}

/// Rewrites a lumping of an order-l chain as a lumping of its first-order
/// lift: the window `(x_0, .., x_{l-1})` is mapped to `g(x_0)`.
pub fn reduce_higher_order_lumping(
    x: &HigherOrderChain,
    g: &LumpingFunction,
    tol: &Tolerances,
) -> Result<(HigherOrderChain, LumpingFunction)> {
    if g.domain() != x.alphabet() {
        return Err(Error::DimensionMismatch("lumping domain differs from the chain alphabet".into()));
    }
    let classes = classify_lift(x, tol);
    if classes.num_classes() != 1 {
        return Err(Error::NotUnique {
            count: classes.num_classes(),
            classes: "in the lift of X".into(),
        });
    }
    let lifted = lift(x)?;
    let windows = x.num_contexts() / x.num_symbols();
    let map = (0..x.num_contexts()).map(|w| g.apply(w / windows)).collect();
    let lifted_g = LumpingFunction::new(lifted.alphabet().clone(), g.codomain().clone(), map)?;
    Ok((lifted, lifted_g))
}

/// Both routes around the commuting square and their largest difference.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutationReport {
    pub equal: bool,
    pub max_discrepancy: f64,
    /// Approximation of `g(X)`.
    pub direct: HigherOrderChain,
    /// Approximation of `g(M)` with `M` the stationary approximation of `X`.
    pub via_model: HigherOrderChain,
}

/// Compares the k-th order approximation of `g(X)` with that of `g(M)`,
/// where `M` is the k-th order approximation of `X` started at its unique
/// invariant distribution. Fails if the lift of `M` has several classes.
pub fn verify_commutation<O: MarginalOracle + ?Sized>(
    x_oracle: &O,
    g: &LumpingFunction,
    k: usize,
    tol: &Tolerances,
) -> Result<CommutationReport> {
    let direct = markov_approximation(&project_oracle(x_oracle, g)?, k, None, tol)?;

    let m = markov_approximation(x_oracle, k, None, tol)?;
    let points = invariant_set(&m, tol)?;
    if points.len() != 1 {
        return Err(Error::Precondition(format!(
            "lift of the approximation of X has {} recurrent classes",
            points.len()
        )));
    }
    let (lifted, lifted_g) = reduce_higher_order_lumping(&m, g, tol)?;
    let pi = JointDistribution::new(lifted.alphabet().clone(), 1, points[0].mass().to_vec())?;
    let via_model = markov_approximation(&lumped_oracle(&lifted, &pi, &lifted_g, tol)?, k, None, tol)?;

    let max_discrepancy = direct
        .rows()
        .flatten()
        .zip(via_model.rows().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(CommutationReport { equal: max_discrepancy <= 1e-12, max_discrepancy, direct, via_model })
}

/// The three steps of the uniqueness argument, checked on the lifted graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProofStructure {
    /// Every pair in `S` is mutually reachable.
    pub s_communicates: bool,
    /// No positive transition leaves `S`.
    pub s_closed: bool,
    /// Every state outside `S` reaches `S` within `k` steps.
    pub complement_escapes: bool,
    /// Longest shortest escape observed (0 when `S^c` is empty).
    pub max_escape_steps: usize,
}

impl ProofStructure {
    pub fn all(&self) -> bool {
        self.s_communicates && self.s_closed && self.complement_escapes
    }
}

pub fn proof_structure_check(
    z: &HigherOrderChain,
    s: &[usize],
    tol: &Tolerances,
) -> Result<ProofStructure> {
    if s.is_empty() {
        return Err(Error::Precondition("S must be nonempty".into()));
    }
    let successors = z.lifted_successors(tol.zero);
    let states = successors.len();
    let mut in_s = vec![false; states];
    for &y in s {
        if y >= states {
            return Err(Error::ContextOutOfRange { index: y, contexts: states });
        }
        in_s[y] = true;
    }
    let s_communicates = s.iter().all(|&y| {
        let reach = reachable_from(&successors, y);
        s.iter().all(|&t| reach[t])
    });
    let s_closed = s.iter().all(|&y| successors[y].iter().all(|&t| in_s[t]));

    let mut complement_escapes = true;
    let mut max_escape_steps = 0;
    for start in (0..states).filter(|&y| !in_s[y]) {
        match steps_to_set(&successors, start, &in_s, z.order()) {
            Some(d) => max_escape_steps = max_escape_steps.max(d),
            None => complement_escapes = false,
        }
    }
    Ok(ProofStructure { s_communicates, s_closed, complement_escapes, max_escape_steps })
}

/// Breadth-first distance from `start` to the target set, capped at `limit`.
fn steps_to_set(successors: &[Vec<usize>], start: usize, target: &[bool], limit: usize) -> Option<usize> {
    let mut depth = vec![usize::MAX; successors.len()];
    depth[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        if depth[s] == limit {
            continue;
        }
        for &t in &successors[s] {
            if target[t] {
                return Some(depth[s] + 1);
            }
            if depth[t] == usize::MAX {
                depth[t] = depth[s] + 1;
                queue.push_back(t);
            }
        }
    }
    None
}

/// A random chain with a single recurrent class and a non-injective lumping.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub seed: u64,
    pub chain: HigherOrderChain,
    pub lumping: LumpingFunction,
    pub k: usize,
    pub num_transient: usize,
}

/// Deterministic instance: a strictly positive recurrent block on
/// `size_x - num_transient` states plus transient states whose rows put
/// positive mass into the block, with state order shuffled.
pub fn generate_instance(
    seed: u64,
    size_x: usize,
    size_y: usize,
    num_transient: usize,
    k: usize,
) -> Result<Instance> {
    if size_y < 2 || size_y >= size_x {
        return Err(Error::InfeasibleSizes(format!("need 2 <= |Y| < |X|, got |Y| = {size_y}, |X| = {size_x}")));
    }
    if num_transient >= size_x {
        return Err(Error::InfeasibleSizes(format!(
            "{num_transient} transient states leave no recurrent state among {size_x}"
        )));
    }
    if k == 0 {
        return Err(Error::InfeasibleSizes("k must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..size_x).collect();
    order.shuffle(&mut rng);
    let recurrent = &order[..size_x - num_transient];
    let transient = &order[size_x - num_transient..];

    let mut rows = vec![vec![0.0; size_x]; size_x];
    for &i in recurrent {
        for &j in recurrent {
            rows[i][j] = rng.random_range(0.05..1.0);
        }
    }
    for &i in transient {
        for j in 0..size_x {
            if rng.random_bool(0.5) {
                rows[i][j] = rng.random_range(0.05..1.0);
            }
        }
        let target = recurrent[rng.random_range(0..recurrent.len())];
        rows[i][target] = rng.random_range(0.05..1.0);
    }
    for row in &mut rows {
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= sum);
    }
    let chain = HigherOrderChain::new(Alphabet::numbered(size_x)?, 1, rows)?;

    let mut map = vec![0; size_x];
    let mut symbols: Vec<usize> = (0..size_x).collect();
    symbols.shuffle(&mut rng);
    for (i, &x) in symbols.iter().enumerate() {
        map[x] = if i < size_y { i } else { rng.random_range(0..size_y) };
    }
    let codomain = Alphabet::new((0..size_y).map(|i| char::from(b'a' + i as u8).to_string()))?;
    let lumping = LumpingFunction::new(chain.alphabet().clone(), codomain, map)?;
    Ok(Instance { seed, chain, lumping, k, num_transient })
}

/// Instance for property sweeps with sizes drawn from the seed:
/// `|Y|` in {2, 3}, `|Y| < |X| <= 6`, `k` in {1, 2, 3}, up to 2 transient states.
pub fn sweep_instance(seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let size_y = rng.random_range(2..=3);
    let size_x = rng.random_range(size_y + 1..=6);
    let k = rng.random_range(1..=3);
    let num_transient = rng.random_range(0..=2.min(size_x - 1));
    generate_instance(seed, size_x, size_y, num_transient, k)
}

/// One stated outcome of a reference example.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleBlock {
    pub title: &'static str,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExamplesReport {
    pub blocks: Vec<ExampleBlock>,
}

impl ExamplesReport {
    pub fn all_passed(&self) -> bool {
        self.blocks.iter().all(|b| b.checks.iter().all(|c| c.passed))
    }
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check { name, passed, detail: detail.into() }
}

fn context_set(alphabet: &Alphabet, words: &[&[&str]]) -> Vec<usize> {
    let mut set: Vec<usize> = words
        .iter()
        .map(|w| encode_context(alphabet, w).expect("known symbols"))
        .collect();
    set.sort_unstable();
    set
}

/// Regular second-order chain whose lift has two recurrent classes.
pub fn example1_block(tol: &Tolerances) -> Result<ExampleBlock> {
    let z = corpus::example1_chain();
    let a = z.alphabet();
    let classes = classify_lift(&z, tol);
    let lifted_alphabet = lift(&z)?.alphabet().clone();
    let expected_classes = vec![
        context_set(a, &[&["1", "2"], &["2", "3"], &["3", "1"], &["3", "4"], &["4", "1"]]),
        context_set(a, &[&["1", "3"], &["3", "2"], &["2", "1"], &["1", "4"], &["4", "3"]]),
    ];
    let expected_transient = context_set(
        a,
        &[&["1", "1"], &["2", "2"], &["2", "4"], &["3", "3"], &["4", "2"], &["4", "4"]],
    );
    let verdict = is_regular(&z, default_regularity_bound(&z), tol);
    let q10_positive = n_step_matrix(&z, 10)?.iter().flatten().all(|v| *v > 0.0);
    let points = invariant_set(&z, tol)?;
    let all_invariant = points
        .iter()
        .map(|mu| is_invariant(&z, mu, 1e-9))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|b| b);
    let marginal_gap = points
        .iter()
        .map(|mu| pair_marginal_consistency(mu).map(|m| m.discrepancy))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(ExampleBlock {
        title: "Example 1: regular chain, lift with two recurrent classes",
        checks: vec![
            check(
                "lift classes",
                classes.recurrent_classes == expected_classes && classes.transient == expected_transient,
                classes.display(&lifted_alphabet).to_string(),
            ),
            check(
                "regular within 10 steps",
                verdict.witness().is_some_and(|w| w <= 10) && q10_positive,
                format!("{verdict:?}, Q^(10) positive: {q10_positive}"),
            ),
            check(
                "two invariant extreme points",
                points.len() == 2 && all_invariant,
                format!("{} extreme points, all invariant: {all_invariant}", points.len()),
            ),
            check(
                "pair marginals agree",
                marginal_gap <= 1e-9,
                format!("max discrepancy {marginal_gap:e}"),
            ),
        ],
    })
}

/// First-order chain with a transient state: the approximation differs from
/// the chain yet has zero divergence.
pub fn example2_block(tol: &Tolerances) -> Result<ExampleBlock> {
    let w = corpus::example2_chain();
    let pi = stationary_first_order(&w, tol)?;
    let oracle = chain_oracle(&w, &pi, tol)?;
    let z1 = markov_approximation(&oracle, 1, None, tol)?;
    let estimate = relative_entropy_rate(&oracle, &z1, None, 6, tol)?;
    let max_rate = estimate.points.iter().map(|p| p.divergence.abs()).fold(0.0, f64::max);
    let z2 = markov_approximation(&oracle, 2, None, tol)?;
    let effective = z2.effective_order(1e-12);
    Ok(ExampleBlock {
        title: "Example 2: approximating a first-order chain with a transient state",
        checks: vec![
            check("pi_1 = 0", pi.mass()[0].abs() < 1e-12, format!("pi = {:?}", pi.mass())),
            check(
                "context-1 row uniform",
                z1.row(0) == [1.0 / 3.0; 3],
                format!("Q(1,.) = {:?}, P(1,.) = {:?}", z1.row(0), w.row(0)),
            ),
            check(
                "zero divergence up to n = 6",
                max_rate < 1e-12,
                format!("max |KL_n| = {max_rate:e}"),
            ),
            check(
                "order-2 approximation is not order 1",
                effective == 2,
                format!("effective order {effective}"),
            ),
        ],
    })
}

/// Zero-probability context: uniform fill gives uniqueness, a zero fill
/// entry does not.
pub fn example3_block(tol: &Tolerances) -> Result<ExampleBlock> {
    let x = corpus::example3_chain();
    let g = corpus::example3_lumping();
    let report = verify_main_theorem(&x, &g, 2, tol)?;
    let a = g.codomain();
    let s = context_set(a, &[&["1", "2"], &["2", "1"], &["2", "2"]]);
    let one_one = encode_context(a, &["1", "1"])?;
    let lifted_alphabet = lift(&report.approximation)?.alphabet().clone();

    let overridden = override_row(&report.approximation, one_one, vec![1.0, 0.0])?;
    let classes = classify_lift(&overridden, tol);
    let points = invariant_set(&overridden, tol)?;
    Ok(ExampleBlock {
        title: "Example 3: fill choice on a zero-probability context",
        checks: vec![
            check(
                "uniform fill: single class S, (1,1) transient",
                report.unique
                    && report.classes.recurrent_classes == vec![s.clone()]
                    && report.classes.transient == vec![one_one],
                report.classes.display(&lifted_alphabet).to_string(),
            ),
            check(
                "uniform fill: unique invariant distribution",
                report.unique && report.mu_matches_lumped_marginal && report.support_equals_s,
                format!("unique: {}", report.unique),
            ),
            check(
                "(1,0) override: two classes",
                classes.recurrent_classes == vec![vec![one_one], s] && points.len() == 2,
                format!("{}, {} extreme points", classes.display(&lifted_alphabet), points.len()),
            ),
        ],
    })
}

pub fn canonical_examples(tol: &Tolerances) -> Result<ExamplesReport> {
    Ok(ExamplesReport {
        blocks: vec![example1_block(tol)?, example2_block(tol)?, example3_block(tol)?],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: Tolerances = Tolerances::DEFAULT;

    #[test]
    fn example3_theorem_holds_with_uniform_fill() {
        let r = verify_main_theorem(&corpus::example3_chain(), &corpus::example3_lumping(), 2, &TOL).unwrap();
        assert!(r.unique);
        assert_eq!(r.num_recurrent_classes_of_lift, 1);
        assert!(r.mu_matches_lumped_marginal && r.support_equals_s);
        assert_eq!(r.s, vec![1, 2, 3]);
        assert_eq!(r.classes.transient, vec![0]);
        let p = proof_structure_check(&r.approximation, &r.s, &TOL).unwrap();
        assert!(p.all());
        assert_eq!(p.max_escape_steps, 1);
    }

    #[test]
    fn example3_override_has_two_classes() {
        let r = verify_main_theorem(&corpus::example3_chain(), &corpus::example3_lumping(), 2, &TOL).unwrap();
        let z = override_row(&r.approximation, 0, vec![1.0, 0.0]).unwrap();
        let marginal = JointDistribution::new(z.alphabet().clone(), 2, r.mu.clone().unwrap().mass().to_vec()).unwrap();
        let bad = theorem_report(&z, &marginal, &TOL).unwrap();
        assert!(!bad.unique);
        assert_eq!(bad.classes.recurrent_classes, vec![vec![0], vec![1, 2, 3]]);
        let p = proof_structure_check(&z, &bad.s, &TOL).unwrap();
        assert!(p.s_communicates && p.s_closed);
        assert!(!p.complement_escapes);
        // The closed singleton {(1,1)} violates closure once taken as S.
        let closed_pair = proof_structure_check(&z, &[0, 1], &TOL).unwrap();
        assert!(!closed_pair.s_closed);
        assert!(override_row(&z, 7, vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn bijective_lumping_recovers_chain_marginal() {
        let x = corpus::example2_chain();
        let g = LumpingFunction::new(x.alphabet().clone(), x.alphabet().clone(), vec![0, 1, 2]).unwrap();
        let r = verify_main_theorem(&x, &g, 2, &TOL).unwrap();
        assert!(r.unique && r.mu_matches_lumped_marginal && r.support_equals_s);
        let pi = stationary_first_order(&x, &TOL).unwrap();
        let direct = chain_oracle(&x, &pi, &TOL).unwrap().marginal(2).unwrap();
        assert!(r.mu.unwrap().max_abs_diff(&direct).unwrap() < 1e-9);
    }

    #[test]
    fn theorem_preconditions_are_named() {
        let g = LumpingFunction::new(
            corpus::identity2().alphabet().clone(),
            corpus::identity2().alphabet().clone(),
            vec![0, 1],
        )
        .unwrap();
        let err = verify_main_theorem(&corpus::identity2(), &g, 1, &TOL).unwrap_err();
        assert!(err.to_string().contains("single recurrent class"));
        let err = verify_main_theorem(&corpus::example1_chain(), &g, 1, &TOL).unwrap_err();
        assert!(err.to_string().contains("first order"));
    }

    #[test]
    fn first_order_reduction_is_identity() {
        let x = corpus::example3_chain();
        let g = corpus::example3_lumping();
        let (lifted, lg) = reduce_higher_order_lumping(&x, &g, &TOL).unwrap();
        assert_eq!(lifted, x);
        assert_eq!(lg, g);
    }

    #[test]
    fn reduction_maps_windows_by_first_symbol() {
        let inst = generate_instance(3, 3, 2, 0, 2).unwrap();
        let m = markov_approximation(
            &chain_oracle(&inst.chain, &stationary_first_order(&inst.chain, &TOL).unwrap(), &TOL).unwrap(),
            2,
            None,
            &TOL,
        )
        .unwrap();
        let (lifted, lg) = reduce_higher_order_lumping(&m, &inst.lumping, &TOL).unwrap();
        assert_eq!(lifted.order(), 1);
        for w in 0..9 {
            assert_eq!(lg.apply(w), inst.lumping.apply(w / 3));
        }
        assert!(reduce_higher_order_lumping(&corpus::example1_chain(), &LumpingFunction::new(
            corpus::example1_chain().alphabet().clone(),
            Alphabet::numbered(2).unwrap(),
            vec![0, 1, 0, 1],
        ).unwrap(), &TOL).is_err());
    }

    #[test]
    fn commutation_collapses_for_markov_input() {
        let inst = generate_instance(11, 4, 2, 1, 1).unwrap();
        let pi = stationary_first_order(&inst.chain, &TOL).unwrap();
        let oracle = chain_oracle(&inst.chain, &pi, &TOL).unwrap();
        let r = verify_commutation(&oracle, &inst.lumping, 1, &TOL).unwrap();
        assert!(r.equal, "{}", r.max_discrepancy);
    }

    #[test]
    fn commutation_hypothesis_failure_is_reported() {
        // A mixture of two absorbing states approximates to the identity.
        let id = corpus::identity2();
        let mixed = JointDistribution::uniform(id.alphabet().clone(), 1).unwrap();
        let oracle = chain_oracle(&id, &mixed, &TOL).unwrap();
        let g = LumpingFunction::new(id.alphabet().clone(), id.alphabet().clone(), vec![1, 0]).unwrap();
        assert!(matches!(verify_commutation(&oracle, &g, 1, &TOL), Err(Error::Precondition(_))));
    }

    #[test]
    fn generation_is_deterministic_and_valid() {
        assert_eq!(generate_instance(42, 5, 2, 1, 2), generate_instance(42, 5, 2, 1, 2));
        assert_ne!(generate_instance(42, 5, 2, 1, 2), generate_instance(43, 5, 2, 1, 2));
        for seed in 0..50 {
            let inst = sweep_instance(seed).unwrap();
            assert!(single_recurrent_class(&inst.chain, &TOL).unwrap());
            assert!(!inst.lumping.is_injective());
            let d = crate::classify::classify_first_order(&inst.chain, &TOL).unwrap();
            assert_eq!(d.transient.len(), inst.num_transient);
        }
        assert!(generate_instance(1, 3, 3, 0, 1).is_err());
        assert!(generate_instance(1, 3, 1, 0, 1).is_err());
        assert!(generate_instance(1, 3, 2, 3, 1).is_err());
    }

    #[test]
    fn canonical_examples_all_pass() {
        let report = canonical_examples(&TOL).unwrap();
        for block in &report.blocks {
            for c in &block.checks {
                assert!(c.passed, "{}: {} ({})", block.title, c.name, c.detail);
            }
        }
    }
}
