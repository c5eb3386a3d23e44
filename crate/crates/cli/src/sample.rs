use std::io::Write;
use std::sync::mpsc::{sync_channel, Receiver};
use std::sync::Arc;

use lambdagen::boltzmann::{calibrate, BoltzmannOracle, ClosedSampler, SamplerConfig, SamplerStats, DEFAULT_MAX_ATTEMPTS};
use lambdagen::counting::{build_count_table, CountTable, Level};
use lambdagen::format::render_into;
use lambdagen::remy::{remy_tree, sk_combinator};
use lambdagen::rng::{instance, SamplerRng};
use lambdagen::tuner::{tune, TargetFile, TuningProfile};
use lambdagen::typing::{SimpleType, TypedMethod, TypedSampler};
use lambdagen::{Error, Format, SizeModel, Term};
use serde::Serialize;

use crate::args::{Method, SampleArgs, TypedBase};
use crate::{read_json, Failure};

const TUNED_MAX_ATTEMPTS: u64 = 1_000_000_000;
const CHANNEL_DEPTH: usize = 256;

/// Everything shared by the parallel instances of one run.
enum Plan {
    Recursive { table: Arc<CountTable>, openness: usize, size: usize },
    Closed(ClosedSampler),
    Plain { oracle: Arc<BoltzmannOracle>, window: (usize, usize) },
    Remy(usize),
    Sk(usize),
    Typed { size: usize, base: TypedBase, config: SamplerConfig },
}

struct Item {
    text: String,
    size: usize,
}

#[derive(Default, Serialize)]
struct Summary {
    method: String,
    count: u64,
    min_size: Option<usize>,
    max_size: Option<usize>,
    mean_size: f64,
    attempts: u64,
    acceptance_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    ceiling_aborts: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    undersized: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    open_rejections: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    open_rate: Option<f64>,
}

struct Tally {
    attempts: u64,
    closed: Option<SamplerStats>,
}

enum Message {
    Item(Item),
    Done(Tally),
    Failed(Error),
}

struct Worker {
    rng: SamplerRng,
    model: SizeModel,
    format: Format,
    with_type: bool,
    kind: WorkerKind,
    attempts: u64,
    max_attempts: u64,
}

enum WorkerKind {
    Recursive { table: Arc<CountTable>, openness: usize, size: usize },
    Closed(ClosedSampler),
    Plain { oracle: Arc<BoltzmannOracle>, window: (usize, usize) },
    Remy(usize),
    Sk(usize),
    Typed(Box<TypedSampler>),
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

impl Worker {
    fn render(&self, t: &Term, ty: Option<&SimpleType>) -> String {
        let mut text = String::new();
        match (ty, self.format) {
            (Some(ty), Format::Json) => {
                text.push_str("{\"term\":");
                render_into(t, self.format, &mut text);
                text.push_str(",\"type\":");
                text.push_str(&json_string(&ty.to_string()));
                text.push('}');
            }
            (Some(ty), _) => {
                render_into(t, self.format, &mut text);
                text.push_str(" : ");
                text.push_str(&ty.to_string());
            }
            (None, _) => render_into(t, self.format, &mut text),
        }
        text
    }

    fn text(&self, s: String) -> String {
        match self.format {
            Format::Json => json_string(&s),
            _ => s,
        }
    }

    fn next(&mut self) -> Result<Item, Error> {
        match &mut self.kind {
            WorkerKind::Recursive { table, openness, size } => {
                let (m, n) = (*openness, *size);
                let mut sampler = lambdagen::recursive::RecursiveSampler::new(table.clone(), &mut self.rng);
                for _ in 0..self.max_attempts {
                    self.attempts += 1;
                    let t = sampler.gen(m, n)?;
                    // a truncated class may hold terms of larger openness
                    if t.is_m_open(m) {
                        return Ok(Item { text: self.render(&t, None), size: n });
                    }
                }
                Err(Error::AttemptsExhausted(self.max_attempts))
            }
            WorkerKind::Closed(sampler) => {
                let t = sampler.sample(&mut self.rng)?;
                Ok(Item { text: self.render(&t, None), size: self.model.size(&t) })
            }
            WorkerKind::Plain { oracle, window } => {
                let (lower, ceiling) = *window;
                for _ in 0..self.max_attempts {
                    self.attempts += 1;
                    match oracle.generate(Level::Plain, ceiling, &mut self.rng) {
                        Ok(d) if d.size >= lower => {
                            let t = d.term();
                            return Ok(Item { text: self.render(&t, None), size: d.size });
                        }
                        _ => {}
                    }
                }
                Err(Error::AttemptsExhausted(self.max_attempts))
            }
            WorkerKind::Remy(n) => {
                let n = *n;
                self.attempts += 1;
                let tree = remy_tree(n, &mut self.rng);
                Ok(Item { text: self.text(tree.to_string()), size: n })
            }
            WorkerKind::Sk(n) => {
                let n = *n;
                self.attempts += 1;
                let c = sk_combinator(n, &mut self.rng);
                Ok(Item { text: self.text(c.to_string()), size: n })
            }
            WorkerKind::Typed(sampler) => {
                let (t, ty) = sampler.sample(&mut self.rng)?;
                let size = self.model.size(&t);
                Ok(Item { text: self.render(&t, self.with_type.then_some(&ty)), size })
            }
        }
    }

    fn tally(&self) -> Tally {
        match &self.kind {
            WorkerKind::Closed(s) => Tally { attempts: s.stats().attempts, closed: Some(*s.stats()) },
            WorkerKind::Typed(s) => Tally { attempts: s.attempts(), closed: None },
            _ => Tally { attempts: self.attempts, closed: None },
        }
    }

    fn run(mut self, count: u64, mut emit: impl FnMut(Message) -> bool) {
        for _ in 0..count {
            let message = match self.next() {
                Ok(item) => Message::Item(item),
                Err(e) => {
                    emit(Message::Failed(e));
                    return;
                }
            };
            if !emit(message) {
                return;
            }
        }
        emit(Message::Done(self.tally()));
    }
}

fn precision_override() -> Result<Option<f64>, Failure> {
    match std::env::var("LAMBDAGEN_PRECISION") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(p) if p > 0.0 && p.is_finite() => Ok(Some(p)),
            _ => Err(Failure::usage(format!("LAMBDAGEN_PRECISION: `{v}` is not a positive number"))),
        },
    }
}

fn require_size(args: &SampleArgs) -> Result<usize, Failure> {
    args.size.ok_or_else(|| Failure::usage(format!("--size is required for method {:?}", args.method)))
}

fn plan(args: &SampleArgs) -> Result<Plan, Failure> {
    let precision = precision_override()?;
    let max_attempts = args.max_attempts.unwrap_or(DEFAULT_MAX_ATTEMPTS);
    let closed_config = |size: usize| {
        let mut config = SamplerConfig {
            tolerance: args.tolerance,
            truncation: args.truncation.unwrap_or(SamplerConfig::new(size).truncation),
            max_attempts,
            ..SamplerConfig::new(size)
        };
        if let Some(p) = precision {
            config.precision = p;
        }
        config
    };
    Ok(match args.method {
        Method::Recursive => {
            let n = require_size(args)?;
            let truncation = args.truncation.unwrap_or(args.openness + n);
            let table = build_count_table(args.model, truncation, n);
            Plan::Recursive { table: Arc::new(table), openness: args.openness, size: n }
        }
        Method::Boltzmann => Plan::Closed(ClosedSampler::new(args.model, closed_config(require_size(args)?))?),
        Method::Plain => {
            if !args.model.has_plain_class() {
                return Err(Error::Unsupported("the model has no plain class".into()).into());
            }
            let config = closed_config(require_size(args)?);
            config.validate()?;
            let x = calibrate(config.size, &args.model, config.truncation, Level::Plain, &[], config.precision)?;
            let oracle = BoltzmannOracle::precise(args.model, config.truncation, x, &[])?;
            Plan::Plain { oracle: Arc::new(oracle), window: config.window() }
        }
        Method::Remy => Plan::Remy(require_size(args)?),
        Method::Sk => Plan::Sk(require_size(args)?),
        Method::Typed => {
            let n = require_size(args)?;
            Plan::Typed { size: n, base: args.base, config: closed_config(n) }
        }
        Method::Tuned => {
            let profile = tuned_profile(args)?;
            let mut config = SamplerConfig {
                tolerance: args.tolerance,
                truncation: profile.truncation,
                max_attempts: args.max_attempts.unwrap_or(TUNED_MAX_ATTEMPTS),
                ..SamplerConfig::new(profile.size)
            };
            if let Some(p) = precision {
                config.precision = p;
            }
            config.validate()?;
            Plan::Closed(ClosedSampler::from_oracle(Arc::new(profile.oracle()?), config))
        }
    })
}

fn tuned_profile(args: &SampleArgs) -> Result<TuningProfile, Failure> {
    if let Some(path) = &args.profile {
        return read_json(path);
    }
    let Some(path) = &args.targets else {
        return Err(Failure::usage("method tuned needs --profile or --targets".into()));
    };
    let file: TargetFile = read_json(path)?;
    let n = args.size.or(file.n).ok_or_else(|| Failure::usage("--size is required".into()))?;
    let truncation = args.truncation.unwrap_or(SamplerConfig::new(n).truncation);
    Ok(tune(&file.targets, n, &args.model, truncation)?)
}

impl Plan {
    fn worker(&self, args: &SampleArgs, rng: SamplerRng) -> Result<Worker, Error> {
        let max_attempts = args.max_attempts.unwrap_or(DEFAULT_MAX_ATTEMPTS);
        let kind = match self {
            Plan::Recursive { table, openness, size } => {
                WorkerKind::Recursive { table: table.clone(), openness: *openness, size: *size }
            }
            Plan::Closed(sampler) => WorkerKind::Closed(ClosedSampler::from_oracle(sampler.oracle().clone(), *sampler.config())),
            Plan::Plain { oracle, window } => WorkerKind::Plain { oracle: oracle.clone(), window: *window },
            Plan::Remy(n) => WorkerKind::Remy(*n),
            Plan::Sk(n) => WorkerKind::Sk(*n),
            Plan::Typed { size, base, config } => WorkerKind::Typed(Box::new(match base {
                TypedBase::Recursive => TypedSampler::new(*size, args.model, TypedMethod::Recursive, max_attempts)?,
                TypedBase::Boltzmann => TypedSampler::boltzmann(args.model, *config, max_attempts)?,
            })),
        };
        Ok(Worker {
            rng,
            model: args.model,
            format: args.format,
            with_type: args.with_type,
            kind,
            attempts: 0,
            max_attempts,
        })
    }
}

/// Streams `args.count` samples to `out`, instance by instance.
pub fn run(args: &SampleArgs, seed: u64, out: &mut dyn Write) -> Result<(), Failure> {
    let plan = plan(args)?;
    let jobs = args.jobs.min(args.count.max(1));
    let share = |i: u64| args.count / jobs + u64::from(i < args.count % jobs);
    let mut workers = Vec::new();
    for i in 0..jobs {
        workers.push(plan.worker(args, instance(seed, i as usize))?);
    }

    let json = args.format == Format::Json;
    let mut summary = Summary { method: format!("{:?}", args.method).to_lowercase(), ..Summary::default() };
    let mut closed: Option<SamplerStats> = None;
    let mut size_sum = 0f64;
    let mut first = true;
    if json {
        out.write_all(b"[")?;
    }
    let mut consume = |message: Message, out: &mut dyn Write| -> Result<(), Failure> {
        match message {
            Message::Item(item) => {
                if json {
                    out.write_all(if first { b"\n" } else { b",\n" })?;
                }
                first = false;
                out.write_all(item.text.as_bytes())?;
                if !json {
                    out.write_all(b"\n")?;
                }
                summary.count += 1;
                summary.min_size = Some(summary.min_size.map_or(item.size, |m| m.min(item.size)));
                summary.max_size = Some(summary.max_size.map_or(item.size, |m| m.max(item.size)));
                size_sum += item.size as f64;
                Ok(())
            }
            Message::Done(tally) => {
                summary.attempts += tally.attempts;
                if let Some(stats) = tally.closed {
                    closed.get_or_insert_with(SamplerStats::default).merge(&stats);
                }
                Ok(())
            }
            Message::Failed(e) => Err(e.into()),
        }
    };

    if jobs == 1 {
        let worker = workers.pop().expect("one worker");
        let mut result = Ok(());
        worker.run(args.count, |m| {
            result = consume(m, out);
            result.is_ok()
        });
        result?;
    } else {
        std::thread::scope(|scope| -> Result<(), Failure> {
            let mut receivers: Vec<Receiver<Message>> = Vec::new();
            for (i, worker) in workers.into_iter().enumerate() {
                let (tx, rx) = sync_channel(CHANNEL_DEPTH);
                receivers.push(rx);
                let count = share(i as u64);
                scope.spawn(move || worker.run(count, |m| tx.send(m).is_ok()));
            }
            let mut receivers = receivers.into_iter();
            for rx in receivers.by_ref() {
                for message in rx.iter() {
                    consume(message, out)?;
                }
            }
            Ok(())
        })?;
    }

    if json {
        out.write_all(if first { b"]\n" } else { b"\n]\n" })?;
    }
    if args.stats {
        if summary.count > 0 {
            summary.mean_size = size_sum / summary.count as f64;
        }
        if summary.attempts > 0 {
            summary.acceptance_rate = summary.count as f64 / summary.attempts as f64;
        }
        if let Some(s) = closed {
            summary.ceiling_aborts = Some(s.ceiling_aborts);
            summary.undersized = Some(s.undersized);
            summary.open_rejections = Some(s.open_rejections);
            summary.open_rate = Some(s.open_rate());
        }
        serde_json::to_writer(&mut *out, &summary).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
