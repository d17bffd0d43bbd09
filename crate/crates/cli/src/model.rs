//! Line-oriented text format for chains, lumpings and single-symbol
//! distributions.
//!
//! ```text
//! format_version 1
//! kind chain
//! alphabet 1 2
//! order 1
//! row 0.5 0.5   # 1
//! row 1 0       # 2
//! ```
//!
//! A lumping lists `domain`, `codomain` and one `map x y` line per domain
//! symbol. A distribution lists `alphabet` and one `mass` line. Everything
//! after `#` on a line is ignored.

use std::fmt::Write as _;
use std::path::Path;

use hmc_core::{Alphabet, HigherOrderChain, JointDistribution, LumpingFunction, Tolerances};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("line {line}, field `{field}`: {message}")]
    Parse { line: usize, field: String, message: String },

    #[error("unsupported format_version {0} (expected {FORMAT_VERSION})")]
    UnsupportedVersion(u32),

    #[error("expected a {expected} file, found kind `{found}`")]
    WrongKind { expected: &'static str, found: &'static str },

    #[error(transparent)]
    Invalid(#[from] hmc_core::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Chain(HigherOrderChain),
    Lumping(LumpingFunction),
    Distribution(JointDistribution),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Chain(_) => "chain",
            Model::Lumping(_) => "lumping",
            Model::Distribution(_) => "distribution",
        }
    }
}

/// How loaded chains are checked.
#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    pub row_tol: f64,
    pub renormalize: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self { row_tol: Tolerances::DEFAULT.row, renormalize: false }
    }
}

/// Decimal rendering with 17 significant digits, trailing zeros removed.
/// Parsing the result recovers `value` exactly.
pub fn format_number(value: f64) -> String {
    if value == 0.0 {
        return if value.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let sci = format!("{value:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let digits = digits.trim_end_matches('0');
    if !(-7..=20).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        let frac = if tail.is_empty() { String::new() } else { format!(".{tail}") };
        return format!("{sign}{head}{frac}e{exp}");
    }
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        let (int, frac) = digits.split_at(point as usize);
        format!("{int}.{frac}")
    };
    format!("{sign}{body}")
}

pub fn serialize_chain(chain: &HigherOrderChain) -> String {
    let mut out = String::new();
    let a = chain.alphabet();
    writeln!(out, "format_version {FORMAT_VERSION}").unwrap();
    writeln!(out, "kind chain").unwrap();
    writeln!(out, "alphabet {}", a.symbols().join(" ")).unwrap();
    writeln!(out, "order {}", chain.order()).unwrap();
    for (ctx, row) in chain.rows().enumerate() {
        let values: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
        writeln!(out, "row {}  # {}", values.join(" "), a.format_word(chain.order(), ctx)).unwrap();
    }
    out
}

pub fn serialize_lumping(g: &LumpingFunction) -> String {
    let mut out = String::new();
    writeln!(out, "format_version {FORMAT_VERSION}").unwrap();
    writeln!(out, "kind lumping").unwrap();
    writeln!(out, "domain {}", g.domain().symbols().join(" ")).unwrap();
    writeln!(out, "codomain {}", g.codomain().symbols().join(" ")).unwrap();
    for (x, &y) in g.map().iter().enumerate() {
        writeln!(out, "map {} {}", g.domain().symbol_at(x), g.codomain().symbol_at(y)).unwrap();
    }
    out
}

pub fn serialize_distribution(d: &JointDistribution) -> String {
    let mut out = String::new();
    writeln!(out, "format_version {FORMAT_VERSION}").unwrap();
    writeln!(out, "kind distribution").unwrap();
    writeln!(out, "alphabet {}", d.alphabet().symbols().join(" ")).unwrap();
    let values: Vec<String> = d.mass().iter().map(|v| format_number(*v)).collect();
    writeln!(out, "mass {}", values.join(" ")).unwrap();
    out
}

pub fn serialize(model: &Model) -> String {
    match model {
        Model::Chain(c) => serialize_chain(c),
        Model::Lumping(g) => serialize_lumping(g),
        Model::Distribution(d) => serialize_distribution(d),
    }
}

struct Directive<'a> {
    line: usize,
    key: &'a str,
    args: Vec<&'a str>,
}

fn parse_error(line: usize, field: &str, message: impl Into<String>) -> ModelError {
    ModelError::Parse { line, field: field.to_string(), message: message.into() }
}

fn directives(text: &str) -> Vec<Directive<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let content = raw.split('#').next().unwrap_or("");
            let mut words = content.split_whitespace();
            let key = words.next()?;
            Some(Directive { line: i + 1, key, args: words.collect() })
        })
        .collect()
}

fn single<'a>(d: &Directive<'a>) -> Result<&'a str, ModelError> {
    match d.args.as_slice() {
        [one] => Ok(one),
        _ => Err(parse_error(d.line, d.key, format!("expected one value, found {}", d.args.len()))),
    }
}

fn parse_alphabet(d: &Directive<'_>) -> Result<Alphabet, ModelError> {
    Alphabet::new(d.args.iter().copied()).map_err(|e| parse_error(d.line, d.key, e.to_string()))
}

fn parse_numbers(d: &Directive<'_>) -> Result<Vec<f64>, ModelError> {
    d.args
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_error(d.line, d.key, format!("value {} `{s}` is not a finite number", i + 1)))
        })
        .collect()
}

#[derive(Default)]
struct Fields<'a> {
    alphabet: Option<(usize, Alphabet)>,
    domain: Option<(usize, Alphabet)>,
    codomain: Option<(usize, Alphabet)>,
    order: Option<(usize, usize)>,
    rows: Vec<(usize, Vec<f64>)>,
    mass: Option<(usize, Vec<f64>)>,
    maps: Vec<(usize, &'a str, &'a str)>,
}

fn set_once<T>(slot: &mut Option<(usize, T)>, d: &Directive<'_>, value: T) -> Result<(), ModelError> {
    if let Some((first, _)) = slot {
        return Err(parse_error(d.line, d.key, format!("duplicate, first given on line {first}")));
    }
    *slot = Some((d.line, value));
    Ok(())
}

fn missing(field: &str, kind: &str) -> ModelError {
    parse_error(0, field, format!("required for kind {kind}"))
}

/// Parses and validates a model from text.
pub fn parse_model(text: &str, options: &LoadOptions) -> Result<Model, ModelError> {
    let ds = directives(text);
    let mut iter = ds.iter();
    let version = iter.next().ok_or_else(|| parse_error(1, "format_version", "empty file"))?;
    if version.key != "format_version" {
        return Err(parse_error(version.line, version.key, "first directive must be format_version"));
    }
    let v: u32 = single(version)?
        .parse()
        .map_err(|_| parse_error(version.line, "format_version", "not an integer"))?;
    if v != FORMAT_VERSION {
        return Err(ModelError::UnsupportedVersion(v));
    }
    let kind_line = iter.next().ok_or_else(|| parse_error(version.line + 1, "kind", "missing"))?;
    if kind_line.key != "kind" {
        return Err(parse_error(kind_line.line, kind_line.key, "second directive must be kind"));
    }
    let kind = single(kind_line)?;

    let mut f = Fields::default();
    for d in iter {
        match d.key {
            "alphabet" => set_once(&mut f.alphabet, d, parse_alphabet(d)?)?,
            "domain" => set_once(&mut f.domain, d, parse_alphabet(d)?)?,
            "codomain" => set_once(&mut f.codomain, d, parse_alphabet(d)?)?,
            "order" => {
                let k = single(d)?
                    .parse::<usize>()
                    .ok()
                    .filter(|k| *k >= 1)
                    .ok_or_else(|| parse_error(d.line, "order", "expected a positive integer"))?;
                set_once(&mut f.order, d, k)?;
            }
            "row" => f.rows.push((d.line, parse_numbers(d)?)),
            "mass" => set_once(&mut f.mass, d, parse_numbers(d)?)?,
            "map" => match d.args.as_slice() {
                [x, y] => f.maps.push((d.line, x, y)),
                _ => return Err(parse_error(d.line, "map", "expected `map <from> <to>`")),
            },
            other => return Err(parse_error(d.line, other, "unknown field")),
        }
    }

    match kind {
        "chain" => build_chain(f, options),
        "lumping" => build_lumping(f),
        "distribution" => build_distribution(f),
        other => Err(parse_error(kind_line.line, "kind", format!("unknown kind `{other}`"))),
    }
}

fn build_chain(f: Fields<'_>, options: &LoadOptions) -> Result<Model, ModelError> {
    let (_, alphabet) = f.alphabet.ok_or_else(|| missing("alphabet", "chain"))?;
    let (order_line, order) = f.order.ok_or_else(|| missing("order", "chain"))?;
    let contexts = hmc_core::chain::table_size(alphabet.len(), order)?;
    if f.rows.len() != contexts {
        let line = f.rows.last().map_or(order_line, |r| r.0);
        return Err(parse_error(line, "row", format!("expected {contexts} rows, found {}", f.rows.len())));
    }
    for (line, row) in &f.rows {
        if row.len() != alphabet.len() {
            return Err(parse_error(*line, "row", format!("expected {} values, found {}", alphabet.len(), row.len())));
        }
    }
    let rows = f.rows.into_iter().map(|(_, r)| r).collect();
    let chain = if options.renormalize {
        HigherOrderChain::renormalized(alphabet, order, rows)?
    } else {
        HigherOrderChain::with_row_tolerance(alphabet, order, rows, options.row_tol)?
    };
    Ok(Model::Chain(chain))
}

fn build_lumping(f: Fields<'_>) -> Result<Model, ModelError> {
    let (_, domain) = f.domain.ok_or_else(|| missing("domain", "lumping"))?;
    let (_, codomain) = f.codomain.ok_or_else(|| missing("codomain", "lumping"))?;
    let mut map = vec![None; domain.len()];
    for (line, x, y) in &f.maps {
        let xi = domain.index_of(x).map_err(|e| parse_error(*line, "map", e.to_string()))?;
        let yi = codomain.index_of(y).map_err(|e| parse_error(*line, "map", e.to_string()))?;
        if map[xi].replace(yi).is_some() {
            return Err(parse_error(*line, "map", format!("`{x}` mapped twice")));
        }
    }
    let map = map
        .into_iter()
        .enumerate()
        .map(|(x, y)| y.ok_or_else(|| missing("map", &format!("lumping (no image for `{}`)", domain.symbol_at(x)))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Model::Lumping(LumpingFunction::new(domain, codomain, map)?))
}

fn build_distribution(f: Fields<'_>) -> Result<Model, ModelError> {
    let (_, alphabet) = f.alphabet.ok_or_else(|| missing("alphabet", "distribution"))?;
    let (line, mass) = f.mass.ok_or_else(|| missing("mass", "distribution"))?;
    if mass.len() != alphabet.len() {
        return Err(parse_error(line, "mass", format!("expected {} values, found {}", alphabet.len(), mass.len())));
    }
    Ok(Model::Distribution(JointDistribution::new(alphabet, 1, mass)?))
}

/// Reads, parses and validates a model file.
pub fn load_model(path: &Path, options: &LoadOptions) -> Result<Model, ModelError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ModelError::Io { path: path.display().to_string(), source })?;
    parse_model(&text, options)
}

pub fn load_chain(path: &Path, options: &LoadOptions) -> Result<HigherOrderChain, ModelError> {
    match load_model(path, options)? {
        Model::Chain(c) => Ok(c),
        other => Err(ModelError::WrongKind { expected: "chain", found: other.kind() }),
    }
}

pub fn load_lumping(path: &Path, options: &LoadOptions) -> Result<LumpingFunction, ModelError> {
    match load_model(path, options)? {
        Model::Lumping(g) => Ok(g),
        other => Err(ModelError::WrongKind { expected: "lumping", found: other.kind() }),
    }
}

pub fn load_distribution(path: &Path, options: &LoadOptions) -> Result<JointDistribution, ModelError> {
    match load_model(path, options)? {
        Model::Distribution(d) => Ok(d),
        other => Err(ModelError::WrongKind { expected: "distribution", found: other.kind() }),
    }
}
