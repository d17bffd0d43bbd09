//! Command-line front end for `hmc-core`: model files and report output.
//!
//! Reports are `key value` lines. Numbers use [`model::format_number`].
//! Exit codes: 0 success, 1 analysis error, 2 usage or parse error.

pub mod model;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hmc_core::classify::{default_regularity_bound, format_state_set};
use hmc_core::*;
use thiserror::Error;

use model::{
    format_number, load_chain, load_distribution, load_lumping, load_model, serialize_chain,
    serialize_lumping, LoadOptions, Model, ModelError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ANALYSIS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hmc", version, about = "Analysis of higher-order Markov chains and their approximations")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Probabilities at or below this are treated as zero.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub zero_tol: f64,
    /// Allowed deviation of a row sum from 1.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub row_tol: f64,
    /// Divide every row of a loaded chain by its sum.
    #[arg(long, global = true)]
    pub renormalize: bool,
}

#[derive(Debug, Args)]
pub struct ChainArg {
    #[arg(long, value_name = "FILE")]
    pub chain: PathBuf,
}

#[derive(Debug, Args)]
pub struct ProcessArgs {
    /// Chain file. Without `--lumping` the process is this chain started
    /// at its unique invariant distribution.
    #[arg(long, value_name = "FILE")]
    pub chain: PathBuf,
    /// Lumping applied to the (first-order) chain.
    #[arg(long, value_name = "FILE")]
    pub lumping: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model file and report its shape.
    Validate {
        #[arg(value_name = "FILE")]
        file: PathBuf,
    },
    /// Write the first-order lift of a chain.
    Lift {
        #[command(flatten)]
        input: ChainArg,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Recurrent classes and transient states.
    Classify {
        #[command(flatten)]
        input: ChainArg,
        /// Classify the states of the lift instead of the symbols.
        #[arg(long)]
        lift: bool,
    },
    /// Search for an entrywise positive n-step matrix.
    Regular {
        #[command(flatten)]
        input: ChainArg,
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// The unique stationary (invariant) distribution.
    Stationary {
        #[command(flatten)]
        input: ChainArg,
    },
    /// Extreme points of the set of invariant distributions.
    InvariantSet {
        #[command(flatten)]
        input: ChainArg,
    },
    /// Write the k-th order Markov approximation of a process.
    Approximate {
        #[command(flatten)]
        process: ProcessArgs,
        #[arg(long)]
        k: usize,
        /// `uniform` or a distribution file.
        #[arg(long, default_value = "uniform")]
        fill: String,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Finite-horizon relative entropy rate between a process and a model.
    Klrate {
        #[command(flatten)]
        process: ProcessArgs,
        /// Model chain; defaults to the order-k approximation.
        #[arg(long, value_name = "FILE", conflicts_with = "k")]
        model: Option<PathBuf>,
        #[arg(long, required_unless_present = "model")]
        k: Option<usize>,
        /// Largest arity; defaults to model order + 6.
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Run the uniqueness check on a given or generated instance.
    VerifyTheorem(VerifyTheoremArgs),
    /// Compare the approximation of g(X) with that of g(M).
    VerifyCommutation {
        #[command(flatten)]
        process: ProcessArgs,
        /// Lumping g applied to the process.
        #[arg(long = "outer", value_name = "FILE")]
        outer: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Run the reference examples.
    Examples {
        /// Also write the example models into this directory.
        #[arg(long, value_name = "DIR")]
        write: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct VerifyTheoremArgs {
    #[arg(long, value_name = "FILE", requires_all = ["lumping", "k"], conflicts_with_all = ["seed", "nx", "ny", "trials", "transient"])]
    pub chain: Option<PathBuf>,
    #[arg(long, value_name = "FILE", requires = "chain")]
    pub lumping: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long, requires = "nx")]
    pub ny: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long, requires = "nx")]
    pub transient: Option<usize>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Analysis(#[from] hmc_core::Error),
    #[error("{0}")]
    Failed(String),
    #[error("write failed: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Model(ModelError::Invalid(_)) => EXIT_ANALYSIS,
            CliError::Model(_) => EXIT_USAGE,
            CliError::Analysis(_) | CliError::Failed(_) | CliError::Io(_) => EXIT_ANALYSIS,
        }
    }
}

type Outcome = std::result::Result<(), CliError>;

/// Parses `args` (including the program name), runs the command and
/// returns the exit code. Reports go to `out`, diagnostics to `err`.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match run(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

struct Context {
    tol: Tolerances,
    load: LoadOptions,
}

impl Context {
    fn chain(&self, path: &Path) -> std::result::Result<HigherOrderChain, CliError> {
        Ok(load_chain(path, &self.load)?)
    }

    fn lumping(&self, path: &Path) -> std::result::Result<LumpingFunction, CliError> {
        Ok(load_lumping(path, &self.load)?)
    }

    /// The stationary process described by `args`.
    fn process(&self, args: &ProcessArgs) -> std::result::Result<Box<dyn MarginalOracle>, CliError> {
        let chain = self.chain(&args.chain)?;
        match &args.lumping {
            Some(path) => {
                let g = self.lumping(path)?;
                if chain.order() != 1 {
                    return Err(CliError::Usage("--lumping requires a first-order chain".into()));
                }
                let pi = stationary_first_order(&chain, &self.tol)?;
                Ok(Box::new(lumped_oracle(&chain, &pi, &g, &self.tol)?))
            }
            None => {
                let mu = unique_invariant(&chain, &self.tol)?;
                Ok(Box::new(chain_oracle(&chain, &mu, &self.tol)?))
            }
        }
    }
}

fn unique_invariant(chain: &HigherOrderChain, tol: &Tolerances) -> std::result::Result<JointDistribution, CliError> {
    if chain.order() == 1 {
        return Ok(stationary_first_order(chain, tol)?);
    }
    let mut points = invariant_set(chain, tol)?;
    if points.len() != 1 {
        let classes = classify_lift(chain, tol);
        let lifted = chain.alphabet().product(chain.order())?;
        let sets: Vec<String> = classes.recurrent_classes.iter().map(|c| format_state_set(&lifted, c)).collect();
        return Err(hmc_core::Error::NotUnique { count: points.len(), classes: sets.join(" ") }.into());
    }
    Ok(points.remove(0))
}

fn emit(out: &mut dyn Write, text: &str, path: Option<&Path>) -> Outcome {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_distribution(out: &mut dyn Write, mu: &JointDistribution, prefix: &str) -> Outcome {
    writeln!(out, "{prefix}arity {}", mu.arity())?;
    for (i, v) in mu.mass().iter().enumerate() {
        writeln!(out, "{prefix}p {} {}", mu.alphabet().format_word(mu.arity(), i), format_number(*v))?;
    }
    Ok(())
}

fn write_classes(out: &mut dyn Write, alphabet: &Alphabet, classes: &ClassDecomposition) -> Outcome {
    writeln!(out, "recurrent_classes {}", classes.num_classes())?;
    for (i, c) in classes.recurrent_classes.iter().enumerate() {
        writeln!(out, "class {} {}", i + 1, format_state_set(alphabet, c))?;
    }
    writeln!(out, "transient {}", format_state_set(alphabet, &classes.transient))?;
    Ok(())
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Outcome {
    let g = &cli.global;
    if !(g.zero_tol >= 0.0 && g.row_tol >= 0.0) {
        return Err(CliError::Usage("tolerances must be nonnegative".into()));
    }
    let ctx = Context {
        tol: Tolerances { zero: g.zero_tol, row: g.row_tol },
        load: LoadOptions { row_tol: g.row_tol, renormalize: g.renormalize },
    };
    match &cli.command {
        Command::Validate { file } => validate(&ctx, file, out),
        Command::Lift { input, out: path } => {
            let lifted = lift(&ctx.chain(&input.chain)?)?;
            emit(out, &serialize_chain(&lifted), path.as_deref())
        }
        Command::Classify { input, lift: on_lift } => {
            let chain = ctx.chain(&input.chain)?;
            if *on_lift {
                let lifted = lift(&chain)?;
                writeln!(out, "states {}", lifted.num_symbols())?;
                write_classes(out, lifted.alphabet(), &classify_first_order(&lifted, &ctx.tol)?)
            } else {
                writeln!(out, "states {}", chain.num_symbols())?;
                write_classes(out, chain.alphabet(), &classify_higher_order(&chain, &ctx.tol))
            }
        }
        Command::Regular { input, nmax } => {
            let chain = ctx.chain(&input.chain)?;
            let bound = nmax.unwrap_or_else(|| default_regularity_bound(&chain));
            match is_regular(&chain, bound, &ctx.tol) {
                Regularity::Regular { witness } => {
                    writeln!(out, "regular true\nwitness {witness}")?;
                }
                Regularity::Never { detected_at, cycle_length } => {
                    writeln!(out, "regular false\ndetected_at {detected_at}\ncycle_length {cycle_length}")?;
                }
                Regularity::NotWithinBound { searched } => {
                    writeln!(out, "regular unknown\nsearched {searched}")?;
                }
            }
            Ok(())
        }
        Command::Stationary { input } => {
            let chain = ctx.chain(&input.chain)?;
            let mu = unique_invariant(&chain, &ctx.tol)?;
            write_distribution(out, &mu, "")
        }
        Command::InvariantSet { input } => {
            let chain = ctx.chain(&input.chain)?;
            let points = invariant_set(&chain, &ctx.tol)?;
            writeln!(out, "points {}", points.len())?;
            for (i, mu) in points.iter().enumerate() {
                writeln!(out, "point {}", i + 1)?;
                writeln!(out, "residual {}", format_number(invariant::invariance_residual(&chain, mu)?))?;
                write_distribution(out, mu, "")?;
            }
            Ok(())
        }
        Command::Approximate { process, k, fill, out: path } => {
            let oracle = ctx.process(process)?;
            let fill = match fill.as_str() {
                "uniform" => None,
                file => Some(load_distribution(Path::new(file), &ctx.load)?),
            };
            let z = markov_approximation(&*oracle, *k, fill.as_ref(), &ctx.tol)?;
            emit(out, &serialize_chain(&z), path.as_deref())
        }
        Command::Klrate { process, model, k, horizon } => {
            let oracle = ctx.process(process)?;
            let model = match (model, k) {
                (Some(path), _) => ctx.chain(path)?,
                (None, Some(k)) => markov_approximation(&*oracle, *k, None, &ctx.tol)?,
                (None, None) => return Err(CliError::Usage("either --model or --k is required".into())),
            };
            let horizon = horizon.unwrap_or(model.order() + 6);
            let continuity = absolute_continuity_check(&*oracle, &model, None, horizon, &ctx.tol)?;
            writeln!(out, "absolutely_continuous {}", continuity.holds)?;
            if let Some(w) = &continuity.witness {
                writeln!(out, "witness {w}")?;
            }
            let estimate = relative_entropy_rate(&*oracle, &model, None, horizon, &ctx.tol)?;
            writeln!(out, "columns n divergence rate increment")?;
            for p in &estimate.points {
                writeln!(
                    out,
                    "point {} {} {} {}",
                    p.n,
                    format_number(p.divergence),
                    format_number(p.rate),
                    format_number(p.increment)
                )?;
            }
            writeln!(out, "max_rate {}", format_number(estimate.max_rate()))?;
            Ok(())
        }
        Command::VerifyTheorem(args) => verify_theorem(&ctx, args, out),
        Command::VerifyCommutation { process, outer, k } => {
            let oracle = ctx.process(process)?;
            let g = ctx.lumping(outer)?;
            let report = verify_commutation(&*oracle, &g, *k, &ctx.tol)?;
            writeln!(out, "equal {}", report.equal)?;
            writeln!(out, "max_discrepancy {}", format_number(report.max_discrepancy))?;
            if report.equal {
                Ok(())
            } else {
                Err(CliError::Failed("approximations of g(X) and g(M) differ".into()))
            }
        }
        Command::Examples { write } => examples(&ctx, write.as_deref(), out),
    }
}

fn validate(ctx: &Context, file: &Path, out: &mut dyn Write) -> Outcome {
    match load_model(file, &ctx.load) {
        Ok(model) => {
            writeln!(out, "kind {}", model.kind())?;
            match &model {
                Model::Chain(c) => {
                    writeln!(out, "alphabet {}", c.alphabet().symbols().join(" "))?;
                    writeln!(out, "order {}", c.order())?;
                    writeln!(out, "contexts {}", c.num_contexts())?;
                }
                Model::Lumping(g) => {
                    writeln!(out, "domain {}", g.domain().symbols().join(" "))?;
                    writeln!(out, "codomain {}", g.codomain().symbols().join(" "))?;
                }
                Model::Distribution(d) => {
                    writeln!(out, "alphabet {}", d.alphabet().symbols().join(" "))?;
                }
            }
            writeln!(out, "status ok")?;
            Ok(())
        }
        Err(ModelError::Invalid(hmc_core::Error::InvalidChain(report))) => {
            writeln!(out, "status invalid")?;
            for v in &report.violations {
                writeln!(out, "violation {v}")?;
            }
            Err(CliError::Failed(format!("{} violation(s)", report.violations.len())))
        }
        Err(e) => Err(e.into()),
    }
}

fn usage(msg: &str) -> CliError {
    CliError::Usage(msg.into())
}

fn verify_theorem(ctx: &Context, args: &VerifyTheoremArgs, out: &mut dyn Write) -> Outcome {
    let instances: Vec<(Option<u64>, HigherOrderChain, LumpingFunction, usize)> = match &args.chain {
        Some(chain) => {
            let lumping = args.lumping.as_ref().ok_or_else(|| usage("--chain requires --lumping"))?;
            let k = args.k.ok_or_else(|| usage("--chain requires --k"))?;
            vec![(None, ctx.chain(chain)?, ctx.lumping(lumping)?, k)]
        }
        None => {
            let seed = args.seed.unwrap_or(0);
            (seed..seed.saturating_add(args.trials))
                .map(|s| {
                    let inst = match args.nx {
                        Some(nx) => generate_instance(
                            s,
                            nx,
                            args.ny.unwrap_or(2),
                            args.transient.unwrap_or(0),
                            args.k.unwrap_or(1),
                        )?,
                        None if args.k.is_some() => {
                            return Err(usage("--k with generated instances requires --nx"));
                        }
                        None => verify::sweep_instance(s)?,
                    };
                    Ok((Some(s), inst.chain, inst.lumping, inst.k))
                })
                .collect::<std::result::Result<_, CliError>>()?
        }
    };
    let mut failures = 0;
    for (i, (seed, x, g, k)) in instances.iter().enumerate() {
        let report = verify_main_theorem(x, g, *k, &ctx.tol)?;
        let proof = proof_structure_check(&report.approximation, &report.s, &ctx.tol)?;
        let passed = report.unique && report.mu_matches_lumped_marginal && report.support_equals_s && proof.all();
        if !passed {
            failures += 1;
        }
        let contexts = g.codomain().product(*k)?;
        writeln!(out, "trial {}", i + 1)?;
        if let Some(s) = seed {
            writeln!(out, "seed {s}")?;
        }
        writeln!(out, "nx {}\nny {}\nk {k}", x.num_symbols(), g.codomain().len())?;
        writeln!(out, "unique {}", report.unique)?;
        writeln!(out, "recurrent_classes {}", report.num_recurrent_classes_of_lift)?;
        writeln!(out, "mu_matches_lumped_marginal {}", report.mu_matches_lumped_marginal)?;
        writeln!(out, "support_equals_s {}", report.support_equals_s)?;
        writeln!(out, "s {}", format_state_set(&contexts, &report.s))?;
        writeln!(out, "s_communicates {}", proof.s_communicates)?;
        writeln!(out, "s_closed {}", proof.s_closed)?;
        writeln!(out, "complement_escapes {}", proof.complement_escapes)?;
        writeln!(out, "max_escape_steps {}", proof.max_escape_steps)?;
    }
    writeln!(out, "passed {}/{}", instances.len() - failures, instances.len())?;
    if failures == 0 {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{failures} instance(s) failed the uniqueness check")))
    }
}

fn examples(ctx: &Context, dir: Option<&Path>, out: &mut dyn Write) -> Outcome {
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
        let chains = [
            ("example1.chain", corpus::example1_chain()),
            ("example2.chain", corpus::example2_chain()),
            ("example3.chain", corpus::example3_chain()),
            ("identity2.chain", corpus::identity2()),
            ("cycle2.chain", corpus::cycle2()),
        ];
        for (name, chain) in &chains {
            std::fs::write(dir.join(name), serialize_chain(chain))?;
        }
        std::fs::write(dir.join("example3.lumping"), serialize_lumping(&corpus::example3_lumping()))?;
    }
    let report = canonical_examples(&ctx.tol)?;
    for block in &report.blocks {
        writeln!(out, "example {}", block.title)?;
        for c in &block.checks {
            writeln!(out, "check {} {} {}", if c.passed { "pass" } else { "fail" }, c.name, c.detail)?;
        }
    }
    writeln!(out, "all_passed {}", report.all_passed())?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::Failed("some example checks failed".into()))
    }
}
