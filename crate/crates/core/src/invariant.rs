//! Stationary distributions of first-order chains and the invariant set of a
//! k-th order chain.
//!
//! A distribution `mu` on `Z^k` is invariant for a k-th order chain iff
//! `mu(z_1..z_k) = sum_{z_0} mu(z_0..z_{k-1}) Q(z_0..z_{k-1}, z_k)`, which is
//! the same as being stationary for its lift. Each recurrent class of the
//! lift carries exactly one stationary distribution; these are the extreme
//! points of the invariant set.

use crate::chain::{HigherOrderChain, JointDistribution, Tolerances};
use crate::classify::{classify_first_order, classify_lift, format_state_set, ClassDecomposition};
use crate::error::{Error, Result};
use crate::linalg;

fn not_unique(chain: &HigherOrderChain, classes: &ClassDecomposition) -> Error {
    let sets: Vec<String> = classes
        .recurrent_classes
        .iter()
        .map(|c| format_state_set(chain.alphabet(), c))
        .collect();
    Error::NotUnique { count: classes.num_classes(), classes: sets.join(" ") }
}

/// Clears round-off below zero and on states known to carry no mass, then
/// renormalises.
fn clean(mut mass: Vec<f64>, zero_states: &[usize]) -> Vec<f64> {
    for &s in zero_states {
        mass[s] = 0.0;
    }
    for m in &mut mass {
        if *m < 0.0 {
            *m = 0.0;
        }
    }
    let total: f64 = mass.iter().sum();
    mass.iter_mut().for_each(|m| *m /= total);
    mass
}

/// The unique stationary distribution of a first-order chain with a single
/// recurrent class.
pub fn stationary_first_order(
    chain: &HigherOrderChain,
    tol: &Tolerances,
) -> Result<JointDistribution> {
    let classes = classify_first_order(chain, tol)?;
    if classes.num_classes() != 1 {
        return Err(not_unique(chain, &classes));
    }
    let n = chain.num_symbols();
    let flat: Vec<f64> = chain.rows().flatten().copied().collect();
    let pi = match linalg::stationary_vector(&flat, n) {
        Ok(pi) => pi,
        Err(Error::Singular { .. }) => return Err(not_unique(chain, &classes)),
        Err(e) => return Err(e),
    };
    let pi = clean(pi, &classes.transient);
    JointDistribution::new(chain.alphabet().clone(), 1, pi)
}

/// Stationary distribution of the lift restricted to one closed class,
/// embedded with zeros elsewhere.
fn class_stationary(chain: &HigherOrderChain, class: &[usize]) -> Result<Vec<f64>> {
    let m = class.len();
    let contexts = chain.num_contexts();
    let mut position = vec![usize::MAX; contexts];
    for (i, &s) in class.iter().enumerate() {
        position[s] = i;
    }
    let mut restricted = vec![0.0; m * m];
    for (i, &c) in class.iter().enumerate() {
        for (z, &q) in chain.row(c).iter().enumerate() {
            let j = position[chain.shift(c, z)];
            if j != usize::MAX {
                restricted[i * m + j] += q;
            }
        }
    }
    let local = linalg::stationary_vector(&restricted, m)?;
    let mut mass = vec![0.0; contexts];
    for (i, &s) in class.iter().enumerate() {
        mass[s] = local[i];
    }
    let outside: Vec<usize> = (0..contexts).filter(|&s| position[s] == usize::MAX).collect();
    Ok(clean(mass, &outside))
}

/// Extreme points of the invariant set, one per recurrent class of the
/// lift, in class order.
pub fn invariant_set(chain: &HigherOrderChain, tol: &Tolerances) -> Result<Vec<JointDistribution>> {
    classify_lift(chain, tol)
        .recurrent_classes
        .iter()
        .map(|class| {
            let mass = class_stationary(chain, class)?;
            JointDistribution::new(chain.alphabet().clone(), chain.order(), mass)
        })
        .collect()
}

/// Max-norm residual of the window-update fixed-point equation.
pub fn invariance_residual(chain: &HigherOrderChain, mu: &JointDistribution) -> Result<f64> {
    if mu.arity() != chain.order() || mu.alphabet().len() != chain.num_symbols() {
        return Err(Error::DimensionMismatch(format!(
            "distribution of arity {} over {} symbols vs chain of order {} over {} symbols",
            mu.arity(),
            mu.alphabet().len(),
            chain.order(),
            chain.num_symbols()
        )));
    }
    let next = chain.step_lifted(mu.mass());
    Ok(next
        .iter()
        .zip(mu.mass())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

pub fn is_invariant(chain: &HigherOrderChain, mu: &JointDistribution, tol: f64) -> Result<bool> {
    Ok(invariance_residual(chain, mu)? <= tol)
}

/// Row and column marginals of a distribution on pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMarginals {
    pub row: Vec<f64>,
    pub column: Vec<f64>,
    pub discrepancy: f64,
}

pub fn pair_marginal_consistency(mu: &JointDistribution) -> Result<PairMarginals> {
    if mu.arity() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "pair marginals need arity 2, got {}",
            mu.arity()
        )));
    }
    let row = mu.marginalize_last()?.mass().to_vec();
    let column = mu.marginalize_first()?.mass().to_vec();
    let discrepancy = row
        .iter()
        .zip(&column)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(PairMarginals { row, column, discrepancy })
}
