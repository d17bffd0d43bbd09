//! Fixed reference instances used by the examples report, the CLI and tests.
//!
//! Where only a zero pattern is prescribed, the positive entries below are
//! arbitrary concrete choices; only structural conclusions (supports, class
//! structure, vanishing divergences) are checked against them.

use crate::chain::{Alphabet, HigherOrderChain};
use crate::process::LumpingFunction;

fn chain(symbols: usize, order: usize, rows: Vec<Vec<f64>>) -> HigherOrderChain {
    HigherOrderChain::new(Alphabet::numbered(symbols).unwrap(), order, rows)
        .expect("corpus chains are valid")
}

/// Second-order chain on `{1,2,3,4}` that is regular while its lift has two
/// recurrent classes.
pub fn example1_chain() -> HigherOrderChain {
    chain(
        4,
        2,
        vec![
            vec![0.5, 0.5, 0.0, 0.0], // 1,1
            vec![0.0, 0.0, 1.0, 0.0], // 1,2
            vec![0.0, 1.0, 0.0, 0.0], // 1,3
            vec![0.0, 0.0, 1.0, 0.0], // 1,4
            vec![0.0, 0.0, 0.5, 0.5], // 2,1
            vec![0.0, 0.5, 0.5, 0.0], // 2,2
            vec![0.5, 0.0, 0.0, 0.5], // 2,3
            vec![1.0, 0.0, 0.0, 0.0], // 2,4
            vec![0.0, 1.0, 0.0, 0.0], // 3,1
            vec![1.0, 0.0, 0.0, 0.0], // 3,2
            vec![0.0, 0.5, 0.5, 0.0], // 3,3
            vec![1.0, 0.0, 0.0, 0.0], // 3,4
            vec![0.0, 1.0, 0.0, 0.0], // 4,1
            vec![0.0, 1.0, 0.0, 0.0], // 4,2
            vec![0.0, 1.0, 0.0, 0.0], // 4,3
            vec![0.0, 0.0, 0.5, 0.5], // 4,4
        ],
    )
}

/// First-order chain on `{1,2,3}` with `P(1,3) = P(2,1) = P(3,1) = 0` and all
/// other entries positive: state 1 is transient.
pub fn example2_chain() -> HigherOrderChain {
    chain(
        3,
        1,
        vec![vec![0.5, 0.5, 0.0], vec![0.0, 0.4, 0.6], vec![0.0, 0.7, 0.3]],
    )
}

/// First-order chain on `{1,2,3}` with `P(1,1) = 0` and all other entries
/// positive.
pub fn example3_chain() -> HigherOrderChain {
    chain(
        3,
        1,
        vec![vec![0.0, 0.5, 0.5], vec![0.3, 0.3, 0.4], vec![0.3, 0.4, 0.3]],
    )
}

/// `1 -> 1`, `2 -> 2`, `3 -> 2`.
pub fn example3_lumping() -> LumpingFunction {
    LumpingFunction::new(
        Alphabet::numbered(3).unwrap(),
        Alphabet::numbered(2).unwrap(),
        vec![0, 1, 1],
    )
    .unwrap()
}

/// Two absorbing states.
pub fn identity2() -> HigherOrderChain {
    chain(2, 1, vec![vec![1.0, 0.0], vec![0.0, 1.0]])
}

/// Deterministic period-2 cycle.
pub fn cycle2() -> HigherOrderChain {
    chain(2, 1, vec![vec![0.0, 1.0], vec![1.0, 0.0]])
}
