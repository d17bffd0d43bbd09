//! Analysis of finite-alphabet higher-order Markov chains.
//!
//! * [`chain`]: alphabets, joint distributions, k-th order chains, the Doob
//!   lift and n-step matrices.
//! * [`classify`]: accessibility, recurrent classes and regularity.
//! * [`invariant`]: stationary distributions and invariant sets.
//! * [`process`]: stationary processes given by marginals, lumpings, the
//!   k-th order Markov approximation and divergence rates.
//! * [`verify`]: executable checks of uniqueness of the invariant
//!   distribution for approximations of lumped chains.

pub mod chain;
pub mod classify;
pub mod corpus;
pub mod error;
pub mod invariant;
mod linalg;
pub mod process;
pub mod verify;

pub use chain::{
    chain_oracle, decode_context, encode_context, lift, n_step_matrix, validate_chain, Alphabet,
    ChainOracle, HigherOrderChain, JointDistribution, Tolerances, ValidationReport, Violation,
};
pub use classify::{
    accessible, classify_first_order, classify_higher_order, classify_lift, is_regular,
    single_recurrent_class, ClassDecomposition, Regularity,
};
pub use error::{Error, Result};
pub use invariant::{
    invariant_set, is_invariant, pair_marginal_consistency, stationary_first_order, PairMarginals,
};
pub use process::{
    absolute_continuity_check, lumped_oracle, markov_approximation, project_oracle,
    relative_entropy_rate, EntropyRateEstimate, IidOracle, LumpedOracle, LumpingFunction,
    MarginalOracle,
};
pub use verify::{
    canonical_examples, generate_instance, proof_structure_check, reduce_higher_order_lumping,
    verify_commutation, verify_main_theorem, Instance, ProofStructure, TheoremReport,
};
