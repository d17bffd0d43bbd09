//! Accessibility, recurrence classification and regularity.
//!
//! First-order classification works on the positive-transition graph: a
//! strongly connected component is a recurrent class iff no positive edge
//! leaves it. For a k-th order chain the state space of interest is the
//! alphabet itself, with accessibility quantified over every possible
//! history `u` of length `k - 1`.

use std::collections::VecDeque;
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::chain::{Alphabet, HigherOrderChain, Tolerances};
use crate::error::{Error, Result};

/// Recurrent classes (sorted by smallest member) and the transient states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecomposition {
    pub recurrent_classes: Vec<Vec<usize>>,
    pub transient: Vec<usize>,
}

impl ClassDecomposition {
    pub fn num_states(&self) -> usize {
        self.recurrent_classes.iter().map(Vec::len).sum::<usize>() + self.transient.len()
    }

    pub fn num_classes(&self) -> usize {
        self.recurrent_classes.len()
    }

    pub fn class_of(&self, state: usize) -> Option<usize> {
        self.recurrent_classes.iter().position(|c| c.binary_search(&state).is_ok())
    }

    /// Renders the decomposition with the labels of `alphabet`.
    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> DisplayClasses<'a> {
        DisplayClasses { classes: self, alphabet }
    }
}

/// Formats a set of states as `{a,b,...}` using parenthesised tuple labels.
pub fn format_state_set(alphabet: &Alphabet, states: &[usize]) -> String {
    let labels: Vec<String> = states.iter().map(|&s| state_label(alphabet, s)).collect();
    format!("{{{}}}", labels.join(","))
}

fn state_label(alphabet: &Alphabet, state: usize) -> String {
    let label = alphabet.symbol_at(state);
    if label.contains(',') {
        format!("({label})")
    } else {
        label.to_string()
    }
}

pub struct DisplayClasses<'a> {
    classes: &'a ClassDecomposition,
    alphabet: &'a Alphabet,
}

impl fmt::Display for DisplayClasses<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .classes
            .recurrent_classes
            .iter()
            .map(|c| format_state_set(self.alphabet, c))
            .collect();
        write!(
            f,
            "recurrent {} transient {}",
            parts.join(" "),
            format_state_set(self.alphabet, &self.classes.transient)
        )
    }
}

/// Classifies the states of a graph given as successor lists.
pub(crate) fn classify_graph(successors: &[Vec<usize>]) -> ClassDecomposition {
    let mut graph = DiGraph::<(), ()>::with_capacity(successors.len(), 0);
    let nodes: Vec<_> = (0..successors.len()).map(|_| graph.add_node(())).collect();
    for (s, succ) in successors.iter().enumerate() {
        for &t in succ {
            graph.add_edge(nodes[s], nodes[t], ());
        }
    }
    let mut component = vec![0usize; successors.len()];
    let sccs = tarjan_scc(&graph);
    for (i, scc) in sccs.iter().enumerate() {
        for node in scc {
            component[node.index()] = i;
        }
    }
    let mut recurrent_classes = Vec::new();
    let mut transient = Vec::new();
    for (i, scc) in sccs.iter().enumerate() {
        let mut members: Vec<usize> = scc.iter().map(|n| n.index()).collect();
        members.sort_unstable();
        let closed = members
            .iter()
            .all(|&s| successors[s].iter().all(|&t| component[t] == i));
        if closed {
            recurrent_classes.push(members);
        } else {
            transient.extend(members);
        }
    }
    recurrent_classes.sort_by_key(|c| c[0]);
    transient.sort_unstable();
    ClassDecomposition { recurrent_classes, transient }
}

pub(crate) fn first_order_successors(chain: &HigherOrderChain, zero_tol: f64) -> Vec<Vec<usize>> {
    chain
        .rows()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, p)| **p > zero_tol)
                .map(|(j, _)| j)
                .collect()
        })
        .collect()
}

fn require_first_order(chain: &HigherOrderChain) -> Result<()> {
    if chain.order() != 1 {
        return Err(Error::NotFirstOrder(chain.order()));
    }
    Ok(())
}

pub fn classify_first_order(chain: &HigherOrderChain, tol: &Tolerances) -> Result<ClassDecomposition> {
    require_first_order(chain)?;
    Ok(classify_graph(&first_order_successors(chain, tol.zero)))
}

/// Classification of the lifted chain, computed from the shift structure
/// without materialising the dense lifted matrix. Equal to
/// `classify_first_order(&lift(chain)?)`.
pub fn classify_lift(chain: &HigherOrderChain, tol: &Tolerances) -> ClassDecomposition {
    classify_graph(&chain.lifted_successors(tol.zero))
}

pub fn single_recurrent_class(chain: &HigherOrderChain, tol: &Tolerances) -> Result<bool> {
    Ok(classify_first_order(chain, tol)?.num_classes() == 1)
}

/// States reachable from `start` in one or more steps.
pub(crate) fn reachable_from(successors: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; successors.len()];
    let mut queue: VecDeque<usize> = successors[start].iter().copied().collect();
    for &t in &successors[start] {
        seen[t] = true;
    }
    while let Some(s) = queue.pop_front() {
        for &t in &successors[s] {
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    seen
}

/// Whether `to` is accessible from `from`: for every history `u` of length
/// `k - 1`, the lifted state `(u, from)` reaches some window ending in `to`.
pub fn accessible(chain: &HigherOrderChain, from: usize, to: usize, tol: &Tolerances) -> bool {
    let successors = chain.lifted_successors(tol.zero);
    let n = chain.num_symbols();
    let histories = chain.num_contexts() / n;
    (0..histories).all(|u| {
        let reach = reachable_from(&successors, u * n + from);
        reach.iter().enumerate().any(|(t, &r)| r && t % n == to)
    })
}

/// `matrix[a][b]` is true iff `b` is accessible from `a`.
pub fn accessibility_matrix(chain: &HigherOrderChain, tol: &Tolerances) -> Vec<Vec<bool>> {
    let successors = chain.lifted_successors(tol.zero);
    let n = chain.num_symbols();
    let histories = chain.num_contexts() / n;
    let mut matrix = vec![vec![true; n]; n];
    for u in 0..histories {
        for (from, row) in matrix.iter_mut().enumerate() {
            let reach = reachable_from(&successors, u * n + from);
            let mut ends = vec![false; n];
            for (t, &r) in reach.iter().enumerate() {
                if r {
                    ends[t % n] = true;
                }
            }
            for (cell, end) in row.iter_mut().zip(ends) {
                *cell &= end;
            }
        }
    }
    matrix
}

/// Classes of the communication relation on `Z` itself. States that do not
/// communicate with themselves, and classes that access something outside,
/// are transient.
pub fn classify_higher_order(chain: &HigherOrderChain, tol: &Tolerances) -> ClassDecomposition {
    let acc = accessibility_matrix(chain, tol);
    let n = acc.len();
    let mut assigned = vec![false; n];
    let mut recurrent_classes = Vec::new();
    let mut transient = Vec::new();
    for z in 0..n {
        if assigned[z] {
            continue;
        }
        if !acc[z][z] {
            assigned[z] = true;
            transient.push(z);
            continue;
        }
        let class: Vec<usize> = (z..n).filter(|&w| acc[z][w] && acc[w][z]).collect();
        for &w in &class {
            assigned[w] = true;
        }
        let closed = class
            .iter()
            .all(|&w| (0..n).all(|v| !acc[w][v] || acc[v][w]));
        if closed {
            recurrent_classes.push(class);
        } else {
            transient.extend(class);
        }
    }
    transient.sort_unstable();
    ClassDecomposition { recurrent_classes, transient }
}

/// Result of a bounded search for an entrywise positive `Q^(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    /// `Q^(witness)` is positive and no smaller power is.
    Regular { witness: usize },
    /// The positivity pattern of `Q^(n)` became periodic before turning
    /// positive, so no power is ever positive.
    Never { detected_at: usize, cycle_length: usize },
    NotWithinBound { searched: usize },
}

impl Regularity {
    pub fn witness(&self) -> Option<usize> {
        match self {
            Regularity::Regular { witness } => Some(*witness),
            _ => None,
        }
    }
}

/// `4 * (|Z|^k)^2`.
pub fn default_regularity_bound(chain: &HigherOrderChain) -> usize {
    4 * chain.num_contexts() * chain.num_contexts()
}

#[derive(Clone, PartialEq, Eq)]
struct BitMatrix {
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn new(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Self { words, bits: vec![0; rows * words] }
    }

    fn set(&mut self, r: usize, c: usize) {
        self.bits[r * self.words + c / 64] |= 1 << (c % 64);
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }

    fn ones(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(r).iter().enumerate().flat_map(|(w, &word)| {
            (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }

    /// `self * other` over the boolean semiring.
    fn times(&self, other: &BitMatrix) -> BitMatrix {
        let rows = self.bits.len() / self.words.max(1);
        let mut out = BitMatrix { words: other.words, bits: vec![0; rows * other.words] };
        for r in 0..rows {
            for t in self.ones(r) {
                let src = other.row(t);
                let dst = &mut out.bits[r * other.words..(r + 1) * other.words];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d |= s;
                }
            }
        }
        out
    }

    fn intersects(&self, r: usize, mask: &[u64]) -> bool {
        self.row(r).iter().zip(mask).any(|(a, b)| a & b != 0)
    }
}

/// Smallest `n <= n_max` with `Q^(n)` entrywise positive, searched with
/// boolean reachability. Detects an eventually periodic pattern and stops
/// early with [`Regularity::Never`].
pub fn is_regular(chain: &HigherOrderChain, n_max: usize, tol: &Tolerances) -> Regularity {
    let contexts = chain.num_contexts();
    let n = chain.num_symbols();
    let mut step = BitMatrix::new(contexts, contexts);
    for (s, succ) in chain.lifted_successors(tol.zero).iter().enumerate() {
        for &t in succ {
            step.set(s, t);
        }
    }
    let masks: Vec<Vec<u64>> = (0..n)
        .map(|z| {
            let mut m = BitMatrix::new(1, contexts);
            for t in (z..contexts).step_by(n) {
                m.set(0, t);
            }
            m.bits
        })
        .collect();
    let positive =
        |m: &BitMatrix| (0..contexts).all(|c| masks.iter().all(|mask| m.intersects(c, mask)));

    if n_max == 0 {
        return Regularity::NotWithinBound { searched: 0 };
    }
    if positive(&step) {
        return Regularity::Regular { witness: 1 };
    }
    // Brent's cycle detection over the sequence of reachability patterns.
    let mut power = 1;
    let mut lam = 1;
    let mut tortoise = step.clone();
    let mut hare = step.times(&step);
    for power_n in 2..=n_max {
        if positive(&hare) {
            return Regularity::Regular { witness: power_n };
        }
        if tortoise == hare {
            return Regularity::Never { detected_at: power_n, cycle_length: lam };
        }
        if power == lam {
            tortoise = hare.clone();
            power *= 2;
            lam = 0;
        }
        hare = hare.times(&step);
        lam += 1;
    }
    Regularity::NotWithinBound { searched: n_max }
}
