use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use super::calibrate::{calibrate, CALIBRATION_TOLERANCE};
use super::oracle::{BoltzmannOracle, Scratch};
use crate::counting::Level;
use crate::error::{Error, Result};
use crate::model::SizeModel;
use crate::term::Term;

pub const DEFAULT_TOLERANCE: f64 = 0.1;
pub const DEFAULT_TRUNCATION: usize = 20;
pub const DEFAULT_MAX_ATTEMPTS: u64 = 1_000_000;

/// Target size, admissible window and effort bound of a sampler.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplerConfig {
    pub size: usize,
    /// Relative half-width `ε ∈ [0, 1)` of the size window.
    pub tolerance: f64,
    pub truncation: usize,
    pub max_attempts: u64,
    /// Relative accuracy of the calibrated mean size.
    pub precision: f64,
}

impl SamplerConfig {
    pub fn new(size: usize) -> Self {
        SamplerConfig {
            size,
            tolerance: DEFAULT_TOLERANCE,
            truncation: DEFAULT_TRUNCATION,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            precision: CALIBRATION_TOLERANCE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::DegenerateTarget(0));
        }
        if !(0.0..1.0).contains(&self.tolerance) {
            return Err(Error::InvalidParameter(format!("tolerance {} outside [0, 1)", self.tolerance)));
        }
        if !(self.precision > 0.0 && self.precision.is_finite()) {
            return Err(Error::InvalidParameter(format!("calibration precision {}", self.precision)));
        }
        Ok(())
    }

    /// `[⌈(1-ε)n⌉, ⌊(1+ε)n⌋]`; the upper end doubles as the abort ceiling.
    pub fn window(&self) -> (usize, usize) {
        let n = self.size as f64;
        (((1.0 - self.tolerance) * n).ceil() as usize, ((1.0 + self.tolerance) * n).floor() as usize)
    }
}

/// Rejection counters of a sampler.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SamplerStats {
    pub attempts: u64,
    pub accepted: u64,
    /// Runs cut short past the window ceiling.
    pub ceiling_aborts: u64,
    /// Completed runs below the window.
    pub undersized: u64,
    /// Runs inside the window that were not closed.
    pub open_rejections: u64,
}

impl SamplerStats {
    pub fn merge(&mut self, other: &SamplerStats) {
        self.attempts += other.attempts;
        self.accepted += other.accepted;
        self.ceiling_aborts += other.ceiling_aborts;
        self.undersized += other.undersized;
        self.open_rejections += other.open_rejections;
    }

    /// Share of window survivors rejected for not being closed.
    pub fn open_rate(&self) -> f64 {
        let survivors = self.open_rejections + self.accepted;
        if survivors == 0 {
            0.0
        } else {
            self.open_rejections as f64 / survivors as f64
        }
    }
}

/// Outcome of one generation run of a [`ClosedSampler`].
#[derive(Clone, Debug)]
pub enum Attempt {
    Accepted(Term),
    CeilingAbort,
    Undersized(usize),
    Open(usize),
}

/// Closed terms of approximate size by Boltzmann generation through the
/// open levels of the truncated system, with rejection of open and
/// out-of-window outcomes.
#[derive(Clone, Debug)]
pub struct ClosedSampler {
    oracle: Arc<BoltzmannOracle>,
    config: SamplerConfig,
    stats: SamplerStats,
    scratch: Scratch,
}

impl ClosedSampler {
    /// Calibrates `x` so that the expected size is the configured one.
    pub fn new(model: SizeModel, config: SamplerConfig) -> Result<Self> {
        config.validate()?;
        let x = calibrate(config.size, &model, config.truncation, Level::Open(0), &[], config.precision)?;
        let oracle = BoltzmannOracle::precise(model, config.truncation, x, &[])?;
        Ok(ClosedSampler::from_oracle(Arc::new(oracle), config))
    }

    pub fn from_oracle(oracle: Arc<BoltzmannOracle>, config: SamplerConfig) -> Self {
        ClosedSampler {
            oracle,
            config,
            stats: SamplerStats::default(),
            scratch: Scratch::default(),
        }
    }

    pub fn oracle(&self) -> &Arc<BoltzmannOracle> {
        &self.oracle
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    pub fn stats(&self) -> &SamplerStats {
        &self.stats
    }

    pub fn attempt<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Attempt {
        let (lower, ceiling) = self.config.window();
        self.stats.attempts += 1;
        let outcome = match self.oracle.generate_into(Level::Open(0), ceiling, rng, &mut self.scratch) {
            Err(_) => Attempt::CeilingAbort,
            Ok((size, _)) if size < lower => Attempt::Undersized(size),
            Ok((size, false)) => Attempt::Open(size),
            Ok(_) => Attempt::Accepted(Term::from_preorder(&self.scratch.ops).expect("generation emits a complete preorder")),
        };
        match outcome {
            Attempt::Accepted(_) => self.stats.accepted += 1,
            Attempt::CeilingAbort => self.stats.ceiling_aborts += 1,
            Attempt::Undersized(_) => self.stats.undersized += 1,
            Attempt::Open(_) => self.stats.open_rejections += 1,
        }
        outcome
    }

    /// Draws until a closed term lands in the window, giving up after
    /// `max_attempts` rejections.
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Term> {
        for _ in 0..self.config.max_attempts {
            if let Attempt::Accepted(t) = self.attempt(rng) {
                return Ok(t);
            }
        }
        Err(Error::AttemptsExhausted(self.config.max_attempts))
    }
}

pub fn sample_closed<R: Rng + ?Sized>(
    n: usize,
    tolerance: f64,
    truncation: usize,
    model: SizeModel,
    rng: &mut R,
    max_attempts: u64,
) -> Result<Term> {
    let config = SamplerConfig { tolerance, truncation, max_attempts, ..SamplerConfig::new(n) };
    ClosedSampler::new(model, config)?.sample(rng)
}
