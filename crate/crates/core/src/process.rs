//! Stationary processes described by their finite-dimensional marginals,
//! lumpings of Markov chains, and the k-th order Markov approximation.

use std::fmt;

use crate::chain::{
    decode_indices, max_arity, table_size, Alphabet, HigherOrderChain, JointDistribution,
    Tolerances,
};
use crate::classify::single_recurrent_class;
use crate::error::{Error, Result};
use crate::invariant::invariance_residual;

/// A stationary process on a finite alphabet, queried through its marginals
/// `p(w_0 .. w_{n-1})`.
///
/// Implementations must be consistent (dropping the last coordinate of
/// `marginal(n + 1)` gives `marginal(n)`) and stationary (so does dropping
/// the first).
pub trait MarginalOracle: Send + Sync {
    fn alphabet(&self) -> &Alphabet;

    /// Largest arity `marginal` answers.
    fn horizon_cap(&self) -> usize;

    fn marginal(&self, n: usize) -> Result<JointDistribution>;
}

impl<O: MarginalOracle + ?Sized> MarginalOracle for &O {
    fn alphabet(&self) -> &Alphabet {
        (**self).alphabet()
    }

    fn horizon_cap(&self) -> usize {
        (**self).horizon_cap()
    }

    fn marginal(&self, n: usize) -> Result<JointDistribution> {
        (**self).marginal(n)
    }
}

impl<O: MarginalOracle + ?Sized> MarginalOracle for Box<O> {
    fn alphabet(&self) -> &Alphabet {
        (**self).alphabet()
    }

    fn horizon_cap(&self) -> usize {
        (**self).horizon_cap()
    }

    fn marginal(&self, n: usize) -> Result<JointDistribution> {
        (**self).marginal(n)
    }
}

fn check_arity(n: usize, cap: usize) -> Result<()> {
    if n == 0 || n > cap {
        return Err(Error::HorizonExceeded { requested: n, cap });
    }
    Ok(())
}

/// A surjective map between alphabets, applied coordinate-wise to words.
#[derive(Debug, Clone, PartialEq)]
pub struct LumpingFunction {
    domain: Alphabet,
    codomain: Alphabet,
    map: Vec<usize>,
    preimages: Vec<Vec<usize>>,
}

impl LumpingFunction {
    pub fn new(domain: Alphabet, codomain: Alphabet, map: Vec<usize>) -> Result<Self> {
        if map.len() != domain.len() {
            return Err(Error::InvalidLumping(format!(
                "map has {} entries for {} domain symbols",
                map.len(),
                domain.len()
            )));
        }
        if codomain.len() < 2 {
            return Err(Error::InvalidLumping("codomain needs at least 2 symbols".into()));
        }
        if codomain.len() > domain.len() {
            return Err(Error::InvalidLumping("codomain larger than domain".into()));
        }
        let mut preimages = vec![Vec::new(); codomain.len()];
        for (x, &y) in map.iter().enumerate() {
            if y >= codomain.len() {
                return Err(Error::InvalidLumping(format!("image index {y} out of range")));
            }
            preimages[y].push(x);
        }
        if let Some(y) = preimages.iter().position(Vec::is_empty) {
            return Err(Error::InvalidLumping(format!(
                "not surjective: `{}` has no preimage",
                codomain.symbol_at(y)
            )));
        }
        Ok(Self { domain, codomain, map, preimages })
    }

    /// Builds a lumping from `(domain label, codomain label)` pairs covering
    /// every domain symbol exactly once.
    pub fn from_pairs<S: AsRef<str>>(
        domain: Alphabet,
        codomain: Alphabet,
        pairs: &[(S, S)],
    ) -> Result<Self> {
        let mut map = vec![usize::MAX; domain.len()];
        for (x, y) in pairs {
            let xi = domain.index_of(x.as_ref())?;
            if map[xi] != usize::MAX {
                return Err(Error::InvalidLumping(format!("`{}` mapped twice", x.as_ref())));
            }
            map[xi] = codomain.index_of(y.as_ref())?;
        }
        if let Some(x) = map.iter().position(|&y| y == usize::MAX) {
            return Err(Error::InvalidLumping(format!(
                "`{}` has no image",
                domain.symbol_at(x)
            )));
        }
        Self::new(domain, codomain, map)
    }

    pub fn domain(&self) -> &Alphabet {
        &self.domain
    }

    pub fn codomain(&self) -> &Alphabet {
        &self.codomain
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn preimage(&self, y: usize) -> &[usize] {
        &self.preimages[y]
    }

    pub fn is_injective(&self) -> bool {
        self.codomain.len() == self.domain.len()
    }

    /// Image of a word index of length `arity`.
    pub fn apply_word(&self, arity: usize, word: usize) -> usize {
        let xs = decode_indices(self.domain.len(), arity, word);
        xs.iter().fold(0, |acc, &x| acc * self.codomain.len() + self.map[x])
    }
}

/// The process `Y_n = g(X_n)` for a stationary first-order chain `X`.
#[derive(Debug, Clone)]
pub struct LumpedOracle {
    chain: HigherOrderChain,
    pi: Vec<f64>,
    lumping: LumpingFunction,
    horizon_cap: usize,
}

/// Marginals of `g(X)` for `X` the first-order chain started at its unique
/// stationary distribution `pi`.
pub fn lumped_oracle(
    chain: &HigherOrderChain,
    pi: &JointDistribution,
    lumping: &LumpingFunction,
    tol: &Tolerances,
) -> Result<LumpedOracle> {
    if !single_recurrent_class(chain, tol)? {
        return Err(Error::Precondition(
            "chain must have a single recurrent class for a unique stationary start".into(),
        ));
    }
    if lumping.domain() != chain.alphabet() {
        return Err(Error::DimensionMismatch("lumping domain differs from the chain alphabet".into()));
    }
    let residual = invariance_residual(chain, pi)?;
    if residual > tol.row {
        return Err(Error::NotInvariant { residual });
    }
    let horizon_cap = max_arity(lumping.codomain().len(), chain.num_symbols());
    Ok(LumpedOracle {
        chain: chain.clone(),
        pi: pi.mass().to_vec(),
        lumping: lumping.clone(),
        horizon_cap,
    })
}

impl LumpedOracle {
    /// Forward masses `alpha[w][x]`: probability of emitting the `Y`-word `w`
    /// with `X` ending in `x`.
    fn forward(&self, n: usize) -> Vec<f64> {
        let nx = self.chain.num_symbols();
        let ny = self.lumping.codomain().len();
        let mut alpha = vec![0.0; ny * nx];
        for (x, &p) in self.pi.iter().enumerate() {
            alpha[self.lumping.apply(x) * nx + x] = p;
        }
        for _ in 1..n {
            let words = alpha.len() / nx;
            let mut next = vec![0.0; words * ny * nx];
            for w in 0..words {
                let here = &alpha[w * nx..(w + 1) * nx];
                if here.iter().all(|m| *m == 0.0) {
                    continue;
                }
                for (x, &m) in here.iter().enumerate() {
                    if m == 0.0 {
                        continue;
                    }
                    for (x2, &p) in self.chain.row(x).iter().enumerate() {
                        let y2 = self.lumping.apply(x2);
                        next[(w * ny + y2) * nx + x2] += m * p;
                    }
                }
            }
            alpha = next;
        }
        alpha
    }

    pub fn lumping(&self) -> &LumpingFunction {
        &self.lumping
    }
}

impl MarginalOracle for LumpedOracle {
    fn alphabet(&self) -> &Alphabet {
        self.lumping.codomain()
    }

    fn horizon_cap(&self) -> usize {
        self.horizon_cap
    }

    fn marginal(&self, n: usize) -> Result<JointDistribution> {
        check_arity(n, self.horizon_cap)?;
        let nx = self.chain.num_symbols();
        let mass = self.forward(n).chunks(nx).map(|c| c.iter().sum()).collect();
        Ok(JointDistribution::from_parts(self.lumping.codomain().clone(), n, mass))
    }
}

/// The image `g(W)` of an arbitrary stationary process, by preimage summation.
#[derive(Debug, Clone)]
pub struct ProjectedOracle<O> {
    inner: O,
    lumping: LumpingFunction,
}

pub fn project_oracle<O: MarginalOracle>(inner: O, lumping: &LumpingFunction) -> Result<ProjectedOracle<O>> {
    if inner.alphabet() != lumping.domain() {
        return Err(Error::DimensionMismatch("lumping domain differs from the process alphabet".into()));
    }
    Ok(ProjectedOracle { inner, lumping: lumping.clone() })
}

impl<O: MarginalOracle> MarginalOracle for ProjectedOracle<O> {
    fn alphabet(&self) -> &Alphabet {
        self.lumping.codomain()
    }

    fn horizon_cap(&self) -> usize {
        self.inner.horizon_cap()
    }

    fn marginal(&self, n: usize) -> Result<JointDistribution> {
        let px = self.inner.marginal(n)?;
        let mut mass = vec![0.0; table_size(self.lumping.codomain().len(), n)?];
        for (word, &m) in px.mass().iter().enumerate() {
            mass[self.lumping.apply_word(n, word)] += m;
        }
        Ok(JointDistribution::from_parts(self.lumping.codomain().clone(), n, mass))
    }
}

/// A memoryless process with a fixed single-letter law.
#[derive(Debug, Clone)]
pub struct IidOracle {
    single: JointDistribution,
    horizon_cap: usize,
}

impl IidOracle {
    pub fn new(single: JointDistribution) -> Result<Self> {
        if single.arity() != 1 {
            return Err(Error::DimensionMismatch("i.i.d. law must have arity 1".into()));
        }
        let horizon_cap = max_arity(single.alphabet().len(), 1);
        Ok(Self { single, horizon_cap })
    }
}

impl MarginalOracle for IidOracle {
    fn alphabet(&self) -> &Alphabet {
        self.single.alphabet()
    }

    fn horizon_cap(&self) -> usize {
        self.horizon_cap
    }

    fn marginal(&self, n: usize) -> Result<JointDistribution> {
        check_arity(n, self.horizon_cap)?;
        JointDistribution::iid_power(&self.single, n)
    }
}

/// k-th order Markov approximation: on contexts of positive probability the
/// rows are the conditional laws of the next symbol; elsewhere they are the
/// strictly positive `fill` (uniform when `None`).
pub fn markov_approximation<O: MarginalOracle + ?Sized>(
    oracle: &O,
    k: usize,
    fill: Option<&JointDistribution>,
    tol: &Tolerances,
) -> Result<HigherOrderChain> {
    if k == 0 {
        return Err(Error::Precondition("approximation order must be at least 1".into()));
    }
    if oracle.horizon_cap() < k + 1 {
        return Err(Error::HorizonExceeded { requested: k + 1, cap: oracle.horizon_cap() });
    }
    let alphabet = oracle.alphabet().clone();
    let n = alphabet.len();
    let fill = match fill {
        Some(f) => {
            if f.arity() != 1 || f.alphabet().len() != n {
                return Err(Error::DimensionMismatch("fill must be a single-letter law on the alphabet".into()));
            }
            if let Some((index, &value)) = f.mass().iter().enumerate().find(|(_, v)| **v <= 0.0) {
                return Err(Error::NonPositiveFill { index, value });
            }
            f.mass().to_vec()
        }
        None => vec![1.0 / n as f64; n],
    };
    let joint = oracle.marginal(k + 1)?;
    let mut transitions = Vec::with_capacity(joint.mass().len());
    for block in joint.mass().chunks(n) {
        let context_mass: f64 = block.iter().sum();
        if context_mass > tol.zero {
            transitions.extend(block.iter().map(|m| m / context_mass));
        } else {
            transitions.extend_from_slice(&fill);
        }
    }
    Ok(HigherOrderChain::from_flat(alphabet, k, transitions))
}

/// Successive joint tables of a model chain from arity `k` up to `horizon`,
/// with transition entries at or below `zero_tol` treated as exact zeros.
fn model_tables(
    model: &HigherOrderChain,
    start: &JointDistribution,
    horizon: usize,
    zero_tol: f64,
) -> Vec<Vec<f64>> {
    let clamped = HigherOrderChain::from_flat(
        model.alphabet().clone(),
        model.order(),
        model
            .rows()
            .flatten()
            .map(|&q| if q <= zero_tol { 0.0 } else { q })
            .collect(),
    );
    let mut tables = Vec::new();
    let mut mass: Vec<f64> = start
        .mass()
        .iter()
        .map(|&m| if m <= zero_tol { 0.0 } else { m })
        .collect();
    tables.push(mass.clone());
    for _ in model.order()..horizon {
        mass = clamped.extend_joint(&mass);
        tables.push(mass.clone());
    }
    tables
}

fn resolve_start<O: MarginalOracle + ?Sized>(
    oracle: &O,
    model: &HigherOrderChain,
    model_start: Option<&JointDistribution>,
    horizon: usize,
) -> Result<JointDistribution> {
    let k = model.order();
    if model.num_symbols() != oracle.alphabet().len() {
        return Err(Error::DimensionMismatch("model and process alphabets differ".into()));
    }
    if horizon > oracle.horizon_cap() {
        return Err(Error::HorizonExceeded { requested: horizon, cap: oracle.horizon_cap() });
    }
    table_size(model.num_symbols(), horizon)?;
    let start = match model_start {
        Some(s) => s.clone(),
        None => oracle.marginal(k)?,
    };
    if start.arity() != k || start.alphabet().len() != model.num_symbols() {
        return Err(Error::DimensionMismatch("model start must have arity equal to the model order".into()));
    }
    Ok(start)
}

/// Normalised divergence at one arity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub n: usize,
    /// `KL(p_W^n || p_M^n)` in nats.
    pub divergence: f64,
    /// `divergence / n`.
    pub rate: f64,
    /// `KL_n - KL_{n-1}`.
    pub increment: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyRateEstimate {
    pub points: Vec<RatePoint>,
}

impl EntropyRateEstimate {
    pub fn max_rate(&self) -> f64 {
        self.points.iter().map(|p| p.rate).fold(0.0, f64::max)
    }
}

/// Finite-horizon estimates of the relative entropy rate between a process
/// and a k-th order model, for `n = k + 1 ..= horizon`. The model start
/// defaults to the process's own arity-k marginal.
pub fn relative_entropy_rate<O: MarginalOracle + ?Sized>(
    oracle: &O,
    model: &HigherOrderChain,
    model_start: Option<&JointDistribution>,
    horizon: usize,
    tol: &Tolerances,
) -> Result<EntropyRateEstimate> {
    let k = model.order();
    if horizon <= k {
        return Err(Error::Precondition(format!(
            "horizon {horizon} must exceed the model order {k}"
        )));
    }
    let start = resolve_start(oracle, model, model_start, horizon)?;
    let tables = model_tables(model, &start, horizon, tol.zero);
    let mut previous = None;
    let mut points = Vec::new();
    for (offset, q) in tables.iter().enumerate() {
        let n = k + offset;
        let p = oracle.marginal(n)?;
        let mut divergence = 0.0;
        for (word, (&pw, &qw)) in p.mass().iter().zip(q).enumerate() {
            if pw <= tol.zero {
                continue;
            }
            if qw == 0.0 {
                return Err(Error::InfiniteDivergence {
                    n,
                    sequence: p.alphabet().format_word(n, word),
                });
            }
            divergence += pw * (pw / qw).ln();
        }
        if let Some(prev) = previous {
            points.push(RatePoint {
                n,
                divergence,
                rate: divergence / n as f64,
                increment: divergence - prev,
            });
        }
        previous = Some(divergence);
    }
    Ok(EntropyRateEstimate { points })
}

/// A sequence of positive process probability that the model rules out.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityWitness {
    pub n: usize,
    pub word: Vec<usize>,
    pub label: String,
}

impl fmt::Display for ContinuityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at n = {}", self.label, self.n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbsoluteContinuity {
    pub holds: bool,
    pub witness: Option<ContinuityWitness>,
}

/// Checks, for all arities up to `horizon`, that a word whose context has
/// positive process probability and which the model assigns zero
/// conditional probability also has zero process probability.
pub fn absolute_continuity_check<O: MarginalOracle + ?Sized>(
    oracle: &O,
    model: &HigherOrderChain,
    model_start: Option<&JointDistribution>,
    horizon: usize,
    tol: &Tolerances,
) -> Result<AbsoluteContinuity> {
    let k = model.order();
    if horizon <= k {
        return Ok(AbsoluteContinuity { holds: true, witness: None });
    }
    let start = resolve_start(oracle, model, model_start, horizon)?;
    let tables = model_tables(model, &start, horizon, tol.zero);
    let size = model.num_symbols();
    for (offset, q) in tables.iter().enumerate().skip(1) {
        let n = k + offset;
        let p = oracle.marginal(n)?;
        for (word, (&pw, &qw)) in p.mass().iter().zip(q).enumerate() {
            if pw > tol.zero && qw == 0.0 {
                return Ok(AbsoluteContinuity {
                    holds: false,
                    witness: Some(ContinuityWitness {
                        n,
                        word: decode_indices(size, n, word),
                        label: p.alphabet().format_word(n, word),
                    }),
                });
            }
        }
    }
    Ok(AbsoluteContinuity { holds: true, witness: None })
}
