//! Test-only generators and brute-force oracles. Nothing here calls the
//! routines it is used to check.

#![allow(dead_code)]

use hmc_core::chain::decode_indices;
use hmc_core::{Alphabet, HigherOrderChain, LumpingFunction};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random k-th order chain where each entry is zero with probability
/// `1 - density` (every row keeps at least one positive entry).
pub fn sparse_chain(seed: u64, symbols: usize, order: usize, density: f64) -> HigherOrderChain {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let contexts = symbols.pow(order as u32);
    let rows = (0..contexts)
        .map(|_| {
            let mut row: Vec<f64> = (0..symbols)
                .map(|_| if rng.random_bool(density) { rng.random_range(0.1..1.0) } else { 0.0 })
                .collect();
            if row.iter().all(|v| *v == 0.0) {
                row[rng.random_range(0..symbols)] = 1.0;
            }
            let sum: f64 = row.iter().sum();
            row.into_iter().map(|v| v / sum).collect()
        })
        .collect();
    HigherOrderChain::new(Alphabet::numbered(symbols).unwrap(), order, rows).unwrap()
}

/// Random surjective, non-injective map onto `size_y` letters.
pub fn random_lumping(seed: u64, domain: &Alphabet, size_y: usize) -> LumpingFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = domain.len();
    assert!(size_y >= 2 && size_y < n);
    let mut map: Vec<usize> = (0..n).map(|i| if i < size_y { i } else { rng.random_range(0..size_y) }).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        map.swap(i, j);
    }
    LumpingFunction::new(domain.clone(), Alphabet::numbered(size_y).unwrap(), map).unwrap()
}

/// `p(g(X_0..X_{n-1}) = y)` for a first-order chain by enumerating every
/// `X` path.
pub fn enumerate_lumped_marginal(
    p: &HigherOrderChain,
    pi: &[f64],
    g: &LumpingFunction,
    n: usize,
) -> Vec<f64> {
    let nx = p.num_symbols();
    let ny = g.codomain().len();
    let mut out = vec![0.0; ny.pow(n as u32)];
    for path in 0..nx.pow(n as u32) {
        let xs = decode_indices(nx, n, path);
        let mut m = pi[xs[0]];
        for w in xs.windows(2) {
            m *= p.prob(w[0], w[1]);
        }
        let y = xs.iter().fold(0, |acc, &x| acc * ny + g.apply(x));
        out[y] += m;
    }
    out
}

/// Dense lifted transition matrix built entry by entry from the shift rule.
pub fn dense_lift(chain: &HigherOrderChain) -> Vec<Vec<f64>> {
    let n = chain.num_symbols();
    let k = chain.order();
    let states = chain.num_contexts();
    let mut p = vec![vec![0.0; states]; states];
    for from in 0..states {
        let fw = decode_indices(n, k, from);
        for to in 0..states {
            let tw = decode_indices(n, k, to);
            if fw[1..] == tw[..k - 1] {
                p[from][to] = chain.prob(from, tw[k - 1]);
            }
        }
    }
    p
}

/// Dimension of the null space of `P^T - I`, from singular values.
pub fn nullity_of_stationary_system(p: &[Vec<f64>], tol: f64) -> usize {
    let n = p.len();
    let m = DMatrix::from_fn(n, n, |i, j| p[j][i] - if i == j { 1.0 } else { 0.0 });
    m.svd(false, false).singular_values.iter().filter(|s| **s < tol).count()
}

/// Transitive closure `B + B^2 + ... + B^N` by repeated boolean products.
pub fn boolean_reachability(p: &[Vec<f64>], zero_tol: f64) -> Vec<Vec<bool>> {
    let n = p.len();
    let step: Vec<Vec<bool>> = p.iter().map(|r| r.iter().map(|v| *v > zero_tol).collect()).collect();
    let mut power = step.clone();
    let mut reach = step.clone();
    for _ in 1..n {
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for t in 0..n {
                if power[i][t] {
                    for j in 0..n {
                        next[i][j] |= step[t][j];
                    }
                }
            }
        }
        power = next;
        for i in 0..n {
            for j in 0..n {
                reach[i][j] |= power[i][j];
            }
        }
    }
    reach
}

/// Recurrent classes and transient states from a reachability relation:
/// `i` is recurrent iff everything it reaches reaches it back.
pub fn brute_force_classes(reach: &[Vec<bool>]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let n = reach.len();
    let recurrent: Vec<bool> = (0..n).map(|i| (0..n).all(|j| !reach[i][j] || reach[j][i])).collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut transient = Vec::new();
    for i in 0..n {
        if !recurrent[i] {
            transient.push(i);
            continue;
        }
        if classes.iter().any(|c| c.contains(&i)) {
            continue;
        }
        classes.push((0..n).filter(|&j| reach[i][j] && reach[j][i]).collect());
    }
    classes.sort_by_key(|c| c[0]);
    (classes, transient)
}
