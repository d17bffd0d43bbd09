//! Acceptance suite: one line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{
    boolean_reachability, brute_force_classes, dense_lift, enumerate_lumped_marginal,
    nullity_of_stationary_system, random_lumping, sparse_chain,
};
use hmc_core::verify::{override_row, sweep_instance, Instance};
use hmc_core::*;

const TOL: Tolerances = Tolerances::DEFAULT;

type Outcome = std::result::Result<String, String>;
type Check = std::result::Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Check {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn contexts(alphabet: &Alphabet, words: &[&str]) -> Vec<usize> {
    let mut v: Vec<usize> = words
        .iter()
        .map(|w| encode_context(alphabet, &w.split(',').collect::<Vec<_>>()).unwrap())
        .collect();
    v.sort_unstable();
    v
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let z = corpus::example1_chain();
    let a = z.alphabet();
    let classes = classify_first_order(&lift(&z).map_err(|e| e.to_string())?, &TOL)
        .map_err(|e| e.to_string())?;
    let expected = vec![
        contexts(a, &["1,2", "2,3", "3,1", "3,4", "4,1"]),
        contexts(a, &["1,3", "3,2", "2,1", "1,4", "4,3"]),
    ];
    ensure(classes.recurrent_classes == expected, || format!("classes {:?}", classes.recurrent_classes))?;
    let transient = contexts(a, &["1,1", "2,2", "2,4", "3,3", "4,2", "4,4"]);
    ensure(classes.transient == transient, || format!("transient {:?}", classes.transient))?;
    let verdict = is_regular(&z, classify::default_regularity_bound(&z), &TOL);
    let witness = verdict.witness().ok_or_else(|| format!("{verdict:?}"))?;
    ensure(witness <= 10, || format!("witness {witness}"))?;
    let q10 = n_step_matrix(&z, 10).map_err(|e| e.to_string())?;
    ensure(q10.iter().flatten().all(|v| *v > 0.0), || "Q^(10) has a zero".into())?;
    let points = invariant_set(&z, &TOL).map_err(|e| e.to_string())?;
    ensure(points.len() == 2, || format!("{} extreme points", points.len()))?;
    for mu in &points {
        ensure(is_invariant(&z, mu, 1e-9).unwrap(), || "extreme point not invariant".into())?;
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("witness n = {witness}, 2 classes, 6 transient, 2 extreme points, {elapsed:?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let w = corpus::example2_chain();
    let pi = stationary_first_order(&w, &TOL).map_err(|e| e.to_string())?;
    ensure(pi.mass()[0].abs() < 1e-12, || format!("pi_1 = {}", pi.mass()[0]))?;
    let oracle = chain_oracle(&w, &pi, &TOL).map_err(|e| e.to_string())?;
    let z1 = markov_approximation(&oracle, 1, None, &TOL).map_err(|e| e.to_string())?;
    ensure(z1.row(0) == [1.0 / 3.0; 3], || format!("row 1 = {:?}", z1.row(0)))?;
    let est = relative_entropy_rate(&oracle, &z1, None, 6, &TOL).map_err(|e| e.to_string())?;
    ensure(est.points.len() == 5, || "expected n = 2..=6".into())?;
    let worst = est.points.iter().map(|p| p.divergence.abs().max(p.rate.abs())).fold(0.0, f64::max);
    ensure(worst < 1e-12, || format!("max |D_n| = {worst:e}"))?;
    let z2 = markov_approximation(&oracle, 2, None, &TOL).map_err(|e| e.to_string())?;
    // rows (1,x) and (2,x) must differ for some x, so Z is not first order.
    let differing = (0..3).find(|&x| z2.row(x) != z2.row(3 + x));
    ensure(differing.is_some() && z2.effective_order(1e-12) == 2, || "order-2 approximation is order 1".into())?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "pi_1 = {:e}, max |D_n| = {worst:e} for n <= 6, rows (1,{x}) != (2,{x}), {elapsed:?}",
        pi.mass()[0],
        x = differing.unwrap() + 1
    ))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let x = corpus::example3_chain();
    let g = corpus::example3_lumping();
    let report = verify_main_theorem(&x, &g, 2, &TOL).map_err(|e| e.to_string())?;
    let a = g.codomain();
    let s = contexts(a, &["1,2", "2,1", "2,2"]);
    let one_one = contexts(a, &["1,1"]);
    ensure(report.classes.recurrent_classes == vec![s.clone()], || format!("{:?}", report.classes))?;
    ensure(report.classes.transient == one_one, || format!("{:?}", report.classes))?;
    ensure(report.unique && invariant_set(&report.approximation, &TOL).unwrap().len() == 1, || "not unique".into())?;
    let overridden = override_row(&report.approximation, one_one[0], vec![1.0, 0.0]).map_err(|e| e.to_string())?;
    let classes = classify_first_order(&lift(&overridden).unwrap(), &TOL).unwrap();
    ensure(classes.recurrent_classes == vec![one_one.clone(), s], || format!("{classes:?}"))?;
    let points = invariant_set(&overridden, &TOL).unwrap();
    ensure(points.len() == 2, || format!("{} extreme points", points.len()))?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("uniform fill unique on S, override gives 2 classes, {elapsed:?}"))
}

fn theorem_instances() -> Vec<Instance> {
    (0..200).map(|seed| sweep_instance(seed).unwrap()).collect()
}

fn criterion_4(instances: &[Instance]) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for inst in instances {
        let ny = inst.lumping.codomain().len();
        let nx = inst.chain.num_symbols();
        ensure(nx <= 6 && (2..=3).contains(&ny) && (1..=3).contains(&inst.k), || format!("seed {} out of range", inst.seed))?;
        ensure(ny.pow(inst.k as u32) <= 27 && inst.num_transient <= 2, || format!("seed {} out of range", inst.seed))?;
        let r = verify_main_theorem(&inst.chain, &inst.lumping, inst.k, &TOL).map_err(|e| format!("seed {}: {e}", inst.seed))?;
        ensure(r.unique && r.mu_matches_lumped_marginal && r.support_equals_s, || format!("seed {}: {r:?}", inst.seed))?;
        // Independent check against path enumeration.
        let pi = stationary_first_order(&inst.chain, &TOL).unwrap();
        let brute = enumerate_lumped_marginal(&inst.chain, pi.mass(), &inst.lumping, inst.k);
        let mu = r.mu.as_ref().unwrap();
        let gap = mu.mass().iter().zip(&brute).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(gap);
        ensure(gap <= 1e-9, || format!("seed {}: |mu - p| = {gap:e}", inst.seed))?;
        let brute_support: Vec<usize> = (0..brute.len()).filter(|&i| brute[i] > TOL.zero).collect();
        ensure(mu.support(TOL.zero) == brute_support, || format!("seed {}: support differs", inst.seed))?;
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!("{} instances unique, max |mu - p_Y| = {worst:e}, {elapsed:?}", instances.len()))
}

/// Lumpings whose order-(k+1) approximation genuinely uses k+1 symbols of
/// memory, so the lumped process is not k-th order Markov.
fn non_markov_oracles() -> Vec<(LumpedOracle, usize)> {
    let mut found = Vec::new();
    let mut seed = 1000;
    while found.len() < 20 {
        seed += 1;
        let k = 1 + (seed as usize % 2);
        let inst = generate_instance(seed, 4 + (seed as usize % 2), 2, seed as usize % 2, k).unwrap();
        let pi = stationary_first_order(&inst.chain, &TOL).unwrap();
        let oracle = lumped_oracle(&inst.chain, &pi, &inst.lumping, &TOL).unwrap();
        let longer = markov_approximation(&oracle, k + 1, None, &TOL).unwrap();
        if longer.effective_order(1e-9) == k + 1 {
            found.push((oracle, k));
        }
    }
    found
}

fn criterion_5(instances: &[Instance]) -> Outcome {
    let mut residual = 0.0f64;
    let mut check = |oracle: &dyn MarginalOracle, k: usize| -> Check {
        let z = markov_approximation(oracle, k, None, &TOL).map_err(|e| e.to_string())?;
        let pk = oracle.marginal(k).unwrap();
        residual = residual.max(invariant::invariance_residual(&z, &pk).unwrap());
        ensure(is_invariant(&z, &pk, 1e-9).unwrap(), || "marginal not invariant".into())
    };
    for inst in instances {
        let pi = stationary_first_order(&inst.chain, &TOL).unwrap();
        let oracle = lumped_oracle(&inst.chain, &pi, &inst.lumping, &TOL).unwrap();
        check(&oracle, inst.k).map_err(|e| format!("seed {}: {e}", inst.seed))?;
    }
    let extra = non_markov_oracles();
    for (oracle, k) in &extra {
        check(oracle, *k)?;
    }
    Ok(format!("{} + {} oracles, max residual {residual:e}", instances.len(), extra.len()))
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..50u64 {
        // X = h(B) for a random chain B, then a further lumping g of X.
        let size_x = 3 + (seed as usize % 3);
        let size_b = size_x + 1;
        let k = 1 + (seed as usize % 2);
        let base = generate_instance(seed + 500, size_b, size_x, seed as usize % 2, k).unwrap();
        let pi = stationary_first_order(&base.chain, &TOL).unwrap();
        let x_oracle = lumped_oracle(&base.chain, &pi, &base.lumping, &TOL).unwrap();
        let size_y = 2 + (seed as usize % 2).min(size_x - 3);
        let g = random_lumping(seed + 900, base.lumping.codomain(), size_y);
        let r = verify_commutation(&x_oracle, &g, k, &TOL).map_err(|e| format!("seed {seed}: {e}"))?;
        worst = worst.max(r.max_discrepancy);
        ensure(r.equal, || format!("seed {seed}: discrepancy {:e}", r.max_discrepancy))?;
    }
    Ok(format!("50 instances, max discrepancy {worst:e}"))
}

/// Every chain with at most 64 lifted states used anywhere in this suite.
fn corpus_chains(instances: &[Instance]) -> Vec<(String, HigherOrderChain)> {
    let mut chains = vec![
        ("example1".to_string(), corpus::example1_chain()),
        ("example2".to_string(), corpus::example2_chain()),
        ("example3".to_string(), corpus::example3_chain()),
        ("identity2".to_string(), corpus::identity2()),
        ("cycle2".to_string(), corpus::cycle2()),
    ];
    let ex3 = verify_main_theorem(&corpus::example3_chain(), &corpus::example3_lumping(), 2, &TOL).unwrap();
    chains.push(("example3-approximation".into(), ex3.approximation.clone()));
    chains.push(("example3-override".into(), override_row(&ex3.approximation, 0, vec![1.0, 0.0]).unwrap()));
    for inst in instances.iter().take(60) {
        chains.push((format!("instance-{}", inst.seed), inst.chain.clone()));
        let r = verify_main_theorem(&inst.chain, &inst.lumping, inst.k, &TOL).unwrap();
        chains.push((format!("approximation-{}", inst.seed), r.approximation));
    }
    for seed in 0..60 {
        let (n, k) = [(2, 1), (3, 1), (4, 1), (2, 2), (3, 2), (4, 2), (2, 3), (3, 3), (2, 4), (2, 5)][seed % 10];
        chains.push((format!("sparse-{seed}"), sparse_chain(seed as u64, n, k, 0.45)));
    }
    chains.retain(|(_, c)| c.num_contexts() <= 64);
    chains
}

fn criterion_7(chains: &[(String, HigherOrderChain)]) -> Outcome {
    let mut multi = 0;
    for (name, chain) in chains {
        let dense = dense_lift(chain);
        let nullity = nullity_of_stationary_system(&dense, 1e-9);
        let points = invariant_set(chain, &TOL).unwrap();
        ensure(points.len() == nullity, || format!("{name}: {} points, nullity {nullity}", points.len()))?;
        if nullity > 1 {
            multi += 1;
        }
        let reach = boolean_reachability(&dense, TOL.zero);
        let (classes, transient) = brute_force_classes(&reach);
        let lifted = lift(chain).unwrap();
        let d = classify_first_order(&lifted, &TOL).unwrap();
        ensure(d.recurrent_classes == classes && d.transient == transient, || format!("{name}: {d:?}"))?;
    }
    Ok(format!("{} chains ({multi} with several classes) agree with the rank and reachability oracles", chains.len()))
}

fn criterion_8(chains: &[(String, HigherOrderChain)], instances: &[Instance]) -> Outcome {
    let mut count = 0;
    let mut worst = 0.0f64;
    let mut record = |mu: &JointDistribution, name: &str| -> Check {
        let m = pair_marginal_consistency(mu).unwrap();
        count += 1;
        worst = worst.max(m.discrepancy);
        ensure(m.discrepancy <= 1e-9, || format!("{name}: discrepancy {:e}", m.discrepancy))
    };
    for (name, chain) in chains.iter().filter(|(_, c)| c.order() == 2) {
        for mu in invariant_set(chain, &TOL).unwrap() {
            record(&mu, name)?;
        }
    }
    for inst in instances.iter().filter(|i| i.k == 2) {
        let r = verify_main_theorem(&inst.chain, &inst.lumping, 2, &TOL).unwrap();
        record(r.mu.as_ref().unwrap(), &format!("instance-{}", inst.seed))?;
    }
    Ok(format!("{count} arity-2 invariant distributions, max discrepancy {worst:e}"))
}

fn criterion_9(instances: &[Instance]) -> Outcome {
    let mut escapes = 0;
    for inst in instances {
        let r = verify_main_theorem(&inst.chain, &inst.lumping, inst.k, &TOL).unwrap();
        let p = proof_structure_check(&r.approximation, &r.s, &TOL).map_err(|e| e.to_string())?;
        ensure(p.all(), || format!("seed {}: {p:?}", inst.seed))?;
        ensure(p.max_escape_steps <= inst.k, || format!("seed {}: escape in {} > k", inst.seed, p.max_escape_steps))?;
        if p.max_escape_steps > 0 {
            escapes += 1;
        }
    }
    Ok(format!("{} instances pass all three steps ({escapes} with nonempty S^c)", instances.len()))
}

fn main() -> ExitCode {
    let instances = theorem_instances();
    let chains = corpus_chains(&instances);
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 example 1 reproduction", Box::new(criterion_1)),
        ("2 example 2 reproduction", Box::new(criterion_2)),
        ("3 example 3 reproduction", Box::new(criterion_3)),
        ("4 uniqueness property suite", Box::new(|| criterion_4(&instances))),
        ("5 approximation keeps the marginal invariant", Box::new(|| criterion_5(&instances))),
        ("6 approximation commutes with lumping", Box::new(criterion_6)),
        ("7 rank and reachability oracle equivalence", Box::new(|| criterion_7(&chains))),
        ("8 pair marginal identity", Box::new(|| criterion_8(&chains, &instances))),
        ("9 proof structure", Box::new(|| criterion_9(&instances))),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        match std::panic::catch_unwind(std::panic::AssertUnwindSafe(run)) {
            Ok(Ok(detail)) => println!("PASS criterion {name}: {detail}"),
            Ok(Err(detail)) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL criterion {name}: panicked");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
