use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lambdagen::boltzmann::{DEFAULT_TOLERANCE, DEFAULT_TRUNCATION};
use lambdagen::{Format, IndexWeights, SizeModel};

#[derive(Parser, Debug)]
#[command(name = "lambdagen", version, about = "Uniform random generation of lambda terms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Number of m-open terms of a given size.
    Count(CountArgs),
    /// Random terms, trees or combinators.
    Sample(SampleArgs),
    /// Weights matching index frequency targets.
    Tune(TuneArgs),
    /// Principal type of a closed term read from stdin.
    Typecheck(TypecheckArgs),
}

#[derive(Args, Debug)]
pub struct CountArgs {
    /// natural, constant[:VAR] or unary:ABS,APP,ZERO,SUCC
    #[arg(long, default_value = "natural", value_parser = parse_model)]
    pub model: SizeModel,
    #[arg(long, default_value_t = 0)]
    pub openness: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub size: usize,
    /// Truncation level; defaults to the exact count.
    #[arg(long)]
    pub truncation: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// m-open terms of exact size
    Recursive,
    /// closed terms of approximate size
    Boltzmann,
    /// plain terms of approximate size
    Plain,
    /// binary trees with n internal nodes
    Remy,
    /// SK-combinators with n applications
    Sk,
    /// simply-typeable closed terms
    Typed,
    /// closed terms under tuned index weights
    Tuned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TypedBase {
    Recursive,
    Boltzmann,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Seed {
    Fixed(u64),
    Random,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long, allow_hyphen_values = true)]
    pub size: Option<usize>,
    #[arg(long, default_value = "natural", value_parser = parse_model)]
    pub model: SizeModel,
    /// Openness of recursive samples.
    #[arg(long, default_value_t = 0)]
    pub openness: usize,
    /// Relative half-width of the size window.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE, value_parser = parse_tolerance)]
    pub tolerance: f64,
    /// Truncation level (recursive default: exact).
    #[arg(long)]
    pub truncation: Option<usize>,
    #[arg(long)]
    pub max_attempts: Option<u64>,
    /// Integer seed or `random`.
    #[arg(long, default_value = "0", value_parser = parse_seed)]
    pub seed: Seed,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,
    #[arg(long, default_value = "debruijn", value_parser = parse_format)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Append a JSON summary line.
    #[arg(long)]
    pub stats: bool,
    /// Base sampler of the typed method.
    #[arg(long, value_enum, default_value = "recursive")]
    pub base: TypedBase,
    /// Print the principal type next to each typed sample.
    #[arg(long)]
    pub with_type: bool,
    /// Tuning profile of the tuned method.
    #[arg(long, conflicts_with = "targets")]
    pub profile: Option<PathBuf>,
    /// Targets to tune for before sampling.
    #[arg(long)]
    pub targets: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TuneArgs {
    #[arg(long)]
    pub targets: PathBuf,
    /// Overrides the size given in the targets file.
    #[arg(long, allow_hyphen_values = true)]
    pub size: Option<usize>,
    #[arg(long, default_value = "natural", value_parser = parse_model)]
    pub model: SizeModel,
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    pub truncation: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TypecheckArgs {
    #[arg(long, default_value = "debruijn", value_parser = parse_format)]
    pub format: Format,
}

fn parse_weights(s: &str, n: usize) -> Result<Vec<usize>, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != n {
        return Err(format!("expected {n} comma-separated weights, got `{s}`"));
    }
    parts
        .iter()
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("weight `{p}`: {e}")))
        .collect()
}

pub fn parse_model(s: &str) -> Result<SizeModel, String> {
    let model = match s.split_once(':') {
        None if s == "natural" => Ok(SizeModel::natural()),
        None if s == "constant" => SizeModel::constant(1),
        Some(("constant", w)) => SizeModel::constant(parse_weights(w, 1)?[0]),
        Some(("unary", w)) => {
            let w = parse_weights(w, 4)?;
            SizeModel::new(w[0], w[1], IndexWeights::Unary { zero: w[2], succ: w[3] })
        }
        _ => return Err(format!("unknown model `{s}` (natural, constant[:VAR] or unary:ABS,APP,ZERO,SUCC)")),
    };
    model.map_err(|e| e.to_string())
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(e) if (0.0..1.0).contains(&e) => Ok(e),
        Ok(e) => Err(format!("{e} is outside [0, 1)")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_seed(s: &str) -> Result<Seed, String> {
    if s == "random" {
        return Ok(Seed::Random);
    }
    s.parse().map(Seed::Fixed).map_err(|_| format!("`{s}` is neither an integer nor `random`"))
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}
