mod args;
mod sample;

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use lambdagen::counting::build_count_table;
use lambdagen::format::parse;
use lambdagen::tuner::{tune, TargetFile};
use lambdagen::typing::infer;
use lambdagen::Error;
use serde::de::DeserializeOwned;

use args::{Cli, Command, CountArgs, Seed, TuneArgs, TypecheckArgs};

const EXIT_UNTYPEABLE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_FAILURE: u8 = 3;

/// An error with its exit code; the message goes to stderr.
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn usage(message: String) -> Failure {
        Failure { code: EXIT_USAGE, message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::NotTypeable => EXIT_UNTYPEABLE,
            Error::InvalidModel(_)
            | Error::InvalidParameter(_)
            | Error::DegenerateTarget(_)
            | Error::TruncationExceeded { .. }
            | Error::SizeOutOfRange { .. }
            | Error::SizeGuardExceeded { .. }
            | Error::OpenTermRejected
            | Error::Unsupported(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Failure { code, message: format!("{}: {e}", e.name()) }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure { code: EXIT_FAILURE, message: format!("io: {e}") }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn count(args: &CountArgs) -> Result<(), Failure> {
    let truncation = args.truncation.unwrap_or(args.openness + args.size);
    if args.openness > truncation {
        return Err(Error::TruncationExceeded { openness: args.openness, truncation }.into());
    }
    let table = build_count_table(args.model, truncation, args.size);
    println!("{}", table.count(args.openness, args.size));
    Ok(())
}

fn tune_command(args: &TuneArgs) -> Result<(), Failure> {
    let file: TargetFile = read_json(&args.targets)?;
    let n = args
        .size
        .or(file.n)
        .ok_or_else(|| Failure::usage("--size is required when the targets file has no `n`".into()))?;
    let profile = tune(&file.targets, n, &args.model, args.truncation)?;
    let mut out = open_output(args.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &profile).map_err(io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn typecheck(args: &TypecheckArgs) -> Result<(), Failure> {
    let mut text = String::new();
    io::stdin().read_to_string(&mut text)?;
    let term = parse(text.trim(), args.format).map_err(|e| Failure::usage(e.to_string()))?;
    match infer(&term) {
        Ok(ty) => {
            println!("{ty}");
            Ok(())
        }
        Err(Error::NotTypeable) => {
            println!("untypeable");
            Err(Failure { code: EXIT_UNTYPEABLE, message: String::new() })
        }
        Err(e) => Err(e.into()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Count(args) => count(&args),
        Command::Tune(args) => tune_command(&args),
        Command::Typecheck(args) => typecheck(&args),
        Command::Sample(args) => {
            let seed = match args.seed {
                Seed::Fixed(s) => s,
                Seed::Random => {
                    let s = rand::random();
                    eprintln!("seed: {s}");
                    s
                }
            };
            let mut out = open_output(args.output.as_deref())?;
            sample::run(&args, seed, &mut out)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
