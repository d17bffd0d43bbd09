//! Core value types: alphabets, joint distributions over words, homogeneous
//! k-th order chains, and the Doob lift to a first-order chain on windows.
//!
//! Contexts `z_0 .. z_{k-1}` are encoded row-major with the earliest symbol
//! most significant, so the rows of a transition matrix appear in the order
//! `(1,1), (1,2), ..., (n,n)` for an alphabet `1..n` and `k = 2`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::invariant;
use crate::process::MarginalOracle;

/// Maximum number of entries any joint table may have.
pub const TABLE_BUDGET: usize = 10_000_000;

/// Numerical cutoffs shared by all analyses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Probabilities at or below this value are structural zeros.
    pub zero: f64,
    /// Allowed deviation of a row sum (or total mass) from one.
    pub row: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances { zero: 1e-12, row: 1e-9 };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// `base^exp` as a table size, failing once it exceeds [`TABLE_BUDGET`].
pub fn table_size(base: usize, exp: usize) -> Result<usize> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc *= base as u128;
        if acc > TABLE_BUDGET as u128 {
            return Err(Error::BudgetExceeded { entries: acc, budget: TABLE_BUDGET });
        }
    }
    Ok(acc as usize)
}

/// An ordered, finite set of distinct symbol labels.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = labels.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet must be nonempty".into()));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(|c| c.is_whitespace() || c == '#') {
                return Err(Error::InvalidAlphabet(format!(
                    "label `{s}` must be nonempty without whitespace or `#`"
                )));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate label `{s}`")));
            }
        }
        Ok(Self { symbols, index })
    }

    /// The alphabet `1, 2, ..., n`.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol_at(&self, i: usize) -> &str {
        &self.symbols[i]
    }

    pub fn index_of(&self, symbol: &str) -> Result<usize> {
        self.index
            .get(symbol)
            .copied()
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))
    }

    /// The alphabet of k-tuples, labels joined with commas, in context order.
    pub fn product(&self, k: usize) -> Result<Alphabet> {
        let count = table_size(self.len(), k)?;
        let labels = (0..count).map(|i| {
            decode_indices(self.len(), k, i)
                .iter()
                .map(|&s| self.symbol_at(s))
                .collect::<Vec<_>>()
                .join(",")
        });
        Alphabet::new(labels)
    }

    /// Renders a word given as a context index, e.g. `(1,2)`.
    pub fn format_word(&self, arity: usize, index: usize) -> String {
        let parts: Vec<&str> = decode_indices(self.len(), arity, index)
            .into_iter()
            .map(|s| self.symbol_at(s))
            .collect();
        format!("({})", parts.join(","))
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.symbols).finish()
    }
}

/// Row-major index of a word of symbol indices, first symbol most significant.
pub fn encode_indices(size: usize, word: &[usize]) -> usize {
    word.iter().fold(0, |acc, &s| acc * size + s)
}

/// Inverse of [`encode_indices`] for words of length `k`.
pub fn decode_indices(size: usize, k: usize, mut index: usize) -> Vec<usize> {
    let mut word = vec![0; k];
    for slot in word.iter_mut().rev() {
        *slot = index % size;
        index /= size;
    }
    word
}

pub fn encode_context<S: AsRef<str>>(alphabet: &Alphabet, symbols: &[S]) -> Result<usize> {
    let word = symbols
        .iter()
        .map(|s| alphabet.index_of(s.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(encode_indices(alphabet.len(), &word))
}

pub fn decode_context(alphabet: &Alphabet, k: usize, index: usize) -> Result<Vec<String>> {
    let contexts = table_size(alphabet.len(), k)?;
    if index >= contexts {
        return Err(Error::ContextOutOfRange { index, contexts });
    }
    Ok(decode_indices(alphabet.len(), k, index)
        .into_iter()
        .map(|s| alphabet.symbol_at(s).to_string())
        .collect())
}

/// A probability mass function on words of a fixed length.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    alphabet: Alphabet,
    arity: usize,
    mass: Vec<f64>,
}

impl JointDistribution {
    pub fn new(alphabet: Alphabet, arity: usize, mass: Vec<f64>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidDistribution("arity must be at least 1".into()));
        }
        let expected = table_size(alphabet.len(), arity)?;
        if mass.len() != expected {
            return Err(Error::InvalidDistribution(format!(
                "expected {expected} entries, found {}",
                mass.len()
            )));
        }
        if let Some((i, &m)) = mass.iter().enumerate().find(|(_, m)| !(**m >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("entry {i} is {m}")));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > Tolerances::DEFAULT.row {
            return Err(Error::InvalidDistribution(format!("total mass is {total}")));
        }
        Ok(Self { alphabet, arity, mass })
    }

    pub(crate) fn from_parts(alphabet: Alphabet, arity: usize, mass: Vec<f64>) -> Self {
        debug_assert_eq!(mass.len(), alphabet.len().pow(arity as u32));
        Self { alphabet, arity, mass }
    }

    pub fn uniform(alphabet: Alphabet, arity: usize) -> Result<Self> {
        let n = table_size(alphabet.len(), arity)?;
        Ok(Self { alphabet, arity, mass: vec![1.0 / n as f64; n] })
    }

    /// The i.i.d. product `r ⊗ ... ⊗ r` of an arity-1 distribution.
    pub fn iid_power(single: &JointDistribution, arity: usize) -> Result<Self> {
        if single.arity != 1 {
            return Err(Error::DimensionMismatch("i.i.d. power needs an arity-1 factor".into()));
        }
        let size = single.alphabet.len();
        let n = table_size(size, arity)?;
        let mass = (0..n)
            .map(|i| decode_indices(size, arity, i).iter().map(|&s| single.mass[s]).product())
            .collect();
        Ok(Self { alphabet: single.alphabet.clone(), arity, mass })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn get(&self, word: &[usize]) -> f64 {
        self.mass[encode_indices(self.alphabet.len(), word)]
    }

    /// Indices of words with mass strictly above `zero_tol`.
    pub fn support(&self, zero_tol: f64) -> Vec<usize> {
        (0..self.mass.len()).filter(|&i| self.mass[i] > zero_tol).collect()
    }

    /// Sums out the last coordinate.
    pub fn marginalize_last(&self) -> Result<JointDistribution> {
        if self.arity < 2 {
            return Err(Error::DimensionMismatch("cannot marginalize an arity-1 distribution".into()));
        }
        let n = self.alphabet.len();
        let mass = self.mass.chunks(n).map(|c| c.iter().sum()).collect();
        Ok(Self::from_parts(self.alphabet.clone(), self.arity - 1, mass))
    }

    /// Sums out the first coordinate.
    pub fn marginalize_first(&self) -> Result<JointDistribution> {
        if self.arity < 2 {
            return Err(Error::DimensionMismatch("cannot marginalize an arity-1 distribution".into()));
        }
        let rest = self.mass.len() / self.alphabet.len();
        let mut mass = vec![0.0; rest];
        for (i, m) in self.mass.iter().enumerate() {
            mass[i % rest] += m;
        }
        Ok(Self::from_parts(self.alphabet.clone(), self.arity - 1, mass))
    }

    /// Marginal of the first `arity` coordinates.
    pub fn prefix_marginal(&self, arity: usize) -> Result<JointDistribution> {
        let mut d = self.clone();
        while d.arity > arity {
            d = d.marginalize_last()?;
        }
        Ok(d)
    }

    pub fn max_abs_diff(&self, other: &JointDistribution) -> Result<f64> {
        if self.arity != other.arity || self.alphabet.len() != other.alphabet.len() {
            return Err(Error::DimensionMismatch(format!(
                "arity {} over {} symbols vs arity {} over {} symbols",
                self.arity,
                self.alphabet.len(),
                other.arity,
                other.alphabet.len()
            )));
        }
        Ok(self
            .mass
            .iter()
            .zip(&other.mass)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// One way a candidate transition matrix fails to be a valid chain.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ZeroOrder,
    RowCount { expected: usize, found: usize },
    RowLength { row: usize, expected: usize, found: usize },
    EntryOutOfRange { row: usize, column: usize, value: f64 },
    RowNotStochastic { row: usize, sum: f64 },
    TooLarge(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroOrder => write!(f, "order must be at least 1"),
            Violation::RowCount { expected, found } => {
                write!(f, "expected {expected} rows, found {found}")
            }
            Violation::RowLength { row, expected, found } => {
                write!(f, "row {row} has {found} entries, expected {expected}")
            }
            Violation::EntryOutOfRange { row, column, value } => {
                write!(f, "row {row} column {column}: entry {value} outside [0,1]")
            }
            Violation::RowNotStochastic { row, sum } => {
                write!(f, "row {row} not stochastic (sum {sum})")
            }
            Violation::TooLarge(msg) => write!(f, "{msg}"),
        }
    }
}

/// Outcome of [`validate_chain`]: empty means well formed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks that `rows` form a row-stochastic `|Z|^k x |Z|` matrix.
pub fn validate_chain(
    alphabet: &Alphabet,
    order: usize,
    rows: &[Vec<f64>],
    row_tol: f64,
) -> ValidationReport {
    let mut violations = Vec::new();
    if order == 0 {
        violations.push(Violation::ZeroOrder);
        return ValidationReport { violations };
    }
    let n = alphabet.len();
    let expected = match table_size(n, order) {
        Ok(c) => c,
        Err(e) => {
            violations.push(Violation::TooLarge(e.to_string()));
            return ValidationReport { violations };
        }
    };
    if rows.len() != expected {
        violations.push(Violation::RowCount { expected, found: rows.len() });
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            violations.push(Violation::RowLength { row: r, expected: n, found: row.len() });
            continue;
        }
        let mut in_range = true;
        for (c, &v) in row.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                violations.push(Violation::EntryOutOfRange { row: r, column: c, value: v });
                in_range = false;
            }
        }
        let sum: f64 = row.iter().sum();
        if in_range && (sum - 1.0).abs() > row_tol {
            violations.push(Violation::RowNotStochastic { row: r, sum });
        }
    }
    ValidationReport { violations }
}

/// A homogeneous k-th order chain: `|Z|^k` context rows over `|Z|` symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct HigherOrderChain {
    alphabet: Alphabet,
    order: usize,
    transitions: Vec<f64>,
}

impl HigherOrderChain {
    pub fn new(alphabet: Alphabet, order: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_row_tolerance(alphabet, order, rows, Tolerances::DEFAULT.row)
    }

    pub fn with_row_tolerance(
        alphabet: Alphabet,
        order: usize,
        rows: Vec<Vec<f64>>,
        row_tol: f64,
    ) -> Result<Self> {
        let report = validate_chain(&alphabet, order, &rows, row_tol);
        if !report.is_ok() {
            return Err(Error::InvalidChain(report));
        }
        let transitions = rows.into_iter().flatten().collect();
        Ok(Self { alphabet, order, transitions })
    }

    /// Divides every row by its sum before validating.
    pub fn renormalized(alphabet: Alphabet, order: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|row| {
                let sum: f64 = row.iter().sum();
                if sum > 0.0 && row.iter().all(|v| *v >= 0.0) {
                    row.into_iter().map(|v| v / sum).collect()
                } else {
                    row
                }
            })
            .collect();
        Self::new(alphabet, order, rows)
    }

    pub(crate) fn from_flat(alphabet: Alphabet, order: usize, transitions: Vec<f64>) -> Self {
        debug_assert_eq!(transitions.len(), alphabet.len().pow(order as u32 + 1));
        Self { alphabet, order, transitions }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_symbols(&self) -> usize {
        self.alphabet.len()
    }

    pub fn num_contexts(&self) -> usize {
        self.transitions.len() / self.alphabet.len()
    }

    pub fn row(&self, context: usize) -> &[f64] {
        let n = self.alphabet.len();
        &self.transitions[context * n..(context + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.transitions.chunks(self.alphabet.len())
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn prob(&self, context: usize, symbol: usize) -> f64 {
        self.transitions[context * self.alphabet.len() + symbol]
    }

    /// Lifted state reached from `context` by emitting `symbol`.
    pub fn shift(&self, context: usize, symbol: usize) -> usize {
        let n = self.alphabet.len();
        (context * n) % self.num_contexts() + symbol
    }

    pub fn validate(&self, row_tol: f64) -> ValidationReport {
        validate_chain(&self.alphabet, self.order, &self.to_rows(), row_tol)
    }

    /// Extends a joint table over words of length `m >= order` by one symbol.
    pub(crate) fn extend_joint(&self, mass: &[f64]) -> Vec<f64> {
        let n = self.alphabet.len();
        let contexts = self.num_contexts();
        let mut out = vec![0.0; mass.len() * n];
        for (word, &m) in mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let row = self.row(word % contexts);
            for (z, &q) in row.iter().enumerate() {
                out[word * n + z] = m * q;
            }
        }
        out
    }

    /// One step of the lifted chain applied to a distribution over contexts.
    pub(crate) fn step_lifted(&self, dist: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; dist.len()];
        for (c, &m) in dist.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for (z, &q) in self.row(c).iter().enumerate() {
                out[self.shift(c, z)] += m * q;
            }
        }
        out
    }

    /// Positive-transition successor lists of the lifted chain.
    pub(crate) fn lifted_successors(&self, zero_tol: f64) -> Vec<Vec<usize>> {
        (0..self.num_contexts())
            .map(|c| {
                let mut succ: Vec<usize> = self
                    .row(c)
                    .iter()
                    .enumerate()
                    .filter(|(_, q)| **q > zero_tol)
                    .map(|(z, _)| self.shift(c, z))
                    .collect();
                succ.sort_unstable();
                succ.dedup();
                succ
            })
            .collect()
    }

    /// Smallest `j <= order` such that every row depends only on the last
    /// `j` context symbols (within `tol`). A chain of effective order `j` is
    /// Markov of order `j`; `0` means i.i.d.
    pub fn effective_order(&self, tol: f64) -> usize {
        let n = self.alphabet.len();
        let contexts = self.num_contexts();
        for j in 0..self.order {
            let suffixes = n.pow(j as u32);
            let consistent = (0..contexts).all(|c| {
                let reference = self.row(c % suffixes);
                self.row(c).iter().zip(reference).all(|(a, b)| (a - b).abs() <= tol)
            });
            if consistent {
                return j;
            }
        }
        self.order
    }
}

/// Doob lift: the first-order chain on `Z^k` whose state is the window of
/// the last `k` symbols. Order-1 input is returned unchanged.
pub fn lift(chain: &HigherOrderChain) -> Result<HigherOrderChain> {
    if chain.order == 1 {
        return Ok(chain.clone());
    }
    let states = chain.num_contexts();
    table_size(states, 2)?;
    let alphabet = chain.alphabet.product(chain.order)?;
    let mut transitions = vec![0.0; states * states];
    for c in 0..states {
        for (z, &q) in chain.row(c).iter().enumerate() {
            transitions[c * states + chain.shift(c, z)] = q;
        }
    }
    Ok(HigherOrderChain::from_flat(alphabet, 1, transitions))
}

/// `Q^(n)`: row `c` is the law of `Z_{k+n-1}` given the context `c`.
pub fn n_step_matrix(chain: &HigherOrderChain, n: usize) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::ZeroSteps);
    }
    let size = chain.num_symbols();
    let contexts = chain.num_contexts();
    let mut out = Vec::with_capacity(contexts);
    for c in 0..contexts {
        let mut dist = vec![0.0; contexts];
        dist[c] = 1.0;
        for _ in 0..n {
            dist = chain.step_lifted(&dist);
        }
        let mut row = vec![0.0; size];
        for (t, m) in dist.iter().enumerate() {
            row[t % size] += m;
        }
        out.push(row);
    }
    Ok(out)
}

/// Stationary finite-dimensional marginals of a chain started from an
/// invariant distribution on contexts.
#[derive(Debug, Clone)]
pub struct ChainOracle {
    chain: HigherOrderChain,
    start: JointDistribution,
    horizon_cap: usize,
}

impl ChainOracle {
    pub fn chain(&self) -> &HigherOrderChain {
        &self.chain
    }

    pub fn start(&self) -> &JointDistribution {
        &self.start
    }
}

/// Builds the stationary process of `chain` started at `start`.
pub fn chain_oracle(
    chain: &HigherOrderChain,
    start: &JointDistribution,
    tol: &Tolerances,
) -> Result<ChainOracle> {
    if start.arity() != chain.order() || start.alphabet().len() != chain.num_symbols() {
        return Err(Error::DimensionMismatch(format!(
            "start has arity {}, chain has order {}",
            start.arity(),
            chain.order()
        )));
    }
    let residual = invariant::invariance_residual(chain, start)?;
    if residual > tol.row {
        return Err(Error::NotInvariant { residual });
    }
    let horizon_cap = max_arity(chain.num_symbols(), 1);
    Ok(ChainOracle { chain: chain.clone(), start: start.clone(), horizon_cap })
}

/// Largest `n` with `size^n * factor` within [`TABLE_BUDGET`].
pub(crate) fn max_arity(size: usize, factor: usize) -> usize {
    if size <= 1 {
        return 64;
    }
    let mut n = 0;
    let mut acc = factor as u128;
    while acc * size as u128 <= TABLE_BUDGET as u128 {
        acc *= size as u128;
        n += 1;
    }
    n
}

impl MarginalOracle for ChainOracle {
    fn alphabet(&self) -> &Alphabet {
        self.chain.alphabet()
    }

    fn horizon_cap(&self) -> usize {
        self.horizon_cap
    }

    fn marginal(&self, n: usize) -> Result<JointDistribution> {
        if n == 0 || n > self.horizon_cap {
            return Err(Error::HorizonExceeded { requested: n, cap: self.horizon_cap });
        }
        let k = self.chain.order();
        if n <= k {
            return self.start.prefix_marginal(n);
        }
        let mut mass = self.start.mass().to_vec();
        for _ in k..n {
            mass = self.chain.extend_joint(&mass);
        }
        Ok(JointDistribution::from_parts(self.chain.alphabet().clone(), n, mass))
    }
}
