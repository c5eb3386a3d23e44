//! Tuning the frequencies of chosen De Bruijn indices.
//!
//! Marking index `i` with a weight `u_i` turns the closed-term generating
//! function into `L(x, u)`. For fixed weights `x` is calibrated so that the
//! expected size is `n`; the share of the expected size taken by index `i`
//! is then `|i| u_i ∂L/∂u_i / (x ∂L/∂x)`. The log-weights are solved for by
//! damped Newton steps on the differences between these shares and their
//! targets, with backtracking on the squared residual.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::boltzmann::{calibrate, BoltzmannOracle, CALIBRATION_TOLERANCE, ClosedSampler, SamplerConfig};
use crate::counting::{evaluate_system, Level};
use crate::error::{Error, Result};
use crate::jet::{div, Jet, Real};
use crate::model::SizeModel;
use crate::term::Term;

const MAX_ITERATIONS: usize = 100;
const MAX_BACKTRACKS: usize = 60;
/// Absolute accuracy of the matched size fractions.
const FRACTION_TOLERANCE: f64 = 1e-6;
/// Relative accuracy of the expected size at fixed weights.
const SIZE_TOLERANCE: f64 = 1e-9;
const JACOBIAN_STEP: f64 = 1e-5;
/// Largest change of a log-weight in one Newton step.
const MAX_STEP: f64 = 1.0;
/// Weights outside `e^±50` count as collapsed to zero or diverged.
const MAX_LOG_WEIGHT: f64 = 50.0;

/// Requested share of the expected term size taken by one index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexTarget {
    pub index: u64,
    pub fraction: f64,
}

/// `{"n": 10000, "targets": [{"index": 0, "fraction": 0.08}, …]}`; the size
/// may be left to the caller.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub targets: Vec<IndexTarget>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexWeight {
    pub index: u64,
    pub weight: f64,
}

/// Solved marking weights together with the moments they achieve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuningProfile {
    pub model: SizeModel,
    pub truncation: usize,
    pub size: usize,
    pub x: f64,
    /// Low-order part of `x`: the calibrated parameter is the double-double
    /// `x + x_low`.
    #[serde(default)]
    pub x_low: f64,
    pub targets: Vec<IndexTarget>,
    pub weights: Vec<IndexWeight>,
    pub expected_size: f64,
    /// Expected size shares of the marked indices at the solution.
    pub expected_fractions: Vec<IndexTarget>,
    pub iterations: usize,
}

impl TuningProfile {
    pub fn marks(&self) -> Vec<(u64, f64)> {
        self.weights.iter().map(|w| (w.index, w.weight)).collect()
    }

    pub fn x_precise(&self) -> TwoFloat {
        TwoFloat::new_add(self.x, self.x_low)
    }

    pub fn oracle(&self) -> Result<BoltzmannOracle> {
        BoltzmannOracle::precise(self.model, self.truncation, self.x_precise(), &self.marks())
    }
}

/// Expected size and expected size shares of `indices` under the marked
/// closed-term law at `x`.
pub fn expected_fractions(
    model: &SizeModel,
    truncation: usize,
    x: impl Into<TwoFloat>,
    marks: &[(u64, f64)],
    indices: &[u64],
) -> Result<(f64, Vec<f64>)> {
    // variables: x, then one per requested index (evaluated at its weight)
    let dim = 1 + indices.len();
    let x = x.into();
    let jx = Jet::variable(x, 0, dim);
    let mut jets: Vec<(u64, Jet<TwoFloat>)> = indices
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let u = marks.iter().find(|(j, _)| *j == k).map_or(1.0, |m| m.1);
            (k, Jet::variable(TwoFloat::from(u), i + 1, dim))
        })
        .collect();
    jets.extend(
        marks
            .iter()
            .filter(|(k, _)| !indices.contains(k))
            .map(|&(k, u)| (k, Jet::constant(TwoFloat::from(u), dim))),
    );
    let sys = evaluate_system(model, truncation, &jx, &jets)?;
    let l = &sys.levels[0];
    let size = x * l.g[0];
    let fractions = indices
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let weighted = jets[i].1.v * l.g[i + 1] * model.index_size(k) as f64;
            div(weighted, size).to_f64()
        })
        .collect();
    Ok((div(size, l.v).to_f64(), fractions))
}

struct Problem<'a> {
    model: &'a SizeModel,
    truncation: usize,
    size: usize,
    /// (index, target fraction) of the free marks
    free: Vec<(u64, f64)>,
    /// indices pinned to weight zero
    zero: Vec<u64>,
}

/// Calibrated `x` at fixed weights and the fraction residuals there.
struct Point {
    x: TwoFloat,
    residual: DVector<f64>,
}

impl Point {
    fn norm(&self) -> f64 {
        self.residual.norm_squared() / 2.0
    }
}

impl Problem<'_> {
    fn marks(&self, phi: &DVector<f64>) -> Vec<(u64, f64)> {
        let free = self.free.iter().zip(phi.iter()).map(|(&(k, _), p)| (k, p.exp()));
        free.chain(self.zero.iter().map(|&k| (k, 0.0))).collect()
    }

    fn evaluate(&self, phi: &DVector<f64>) -> Result<Point> {
        let marks = self.marks(phi);
        let x = calibrate(self.size, self.model, self.truncation, Level::Open(0), &marks, SIZE_TOLERANCE)?;
        let indices: Vec<u64> = self.free.iter().map(|f| f.0).collect();
        let (_, fractions) = expected_fractions(self.model, self.truncation, x, &marks, &indices)?;
        let residual = DVector::from_iterator(
            fractions.len(),
            fractions.iter().zip(&self.free).map(|(f, (_, t))| f - t),
        );
        if residual.iter().any(|r| !r.is_finite()) {
            return Err(Error::NoConvergence("non-finite fractions".into()));
        }
        Ok(Point { x, residual })
    }

    /// Central differences of the residuals in the log-weights.
    fn jacobian(&self, phi: &DVector<f64>) -> Result<DMatrix<f64>> {
        let k = phi.len();
        let mut jac = DMatrix::zeros(k, k);
        for j in 0..k {
            let mut shifted = phi.clone();
            shifted[j] += JACOBIAN_STEP;
            let up = self.evaluate(&shifted)?.residual;
            shifted[j] -= 2.0 * JACOBIAN_STEP;
            let down = self.evaluate(&shifted)?.residual;
            jac.set_column(j, &((up - down) / (2.0 * JACOBIAN_STEP)));
        }
        Ok(jac)
    }

    fn converged(&self, point: &Point) -> bool {
        point.residual.amax() <= FRACTION_TOLERANCE
    }
}

/// Least-squares solution of `J d = -r` with tiny singular values cut off.
fn newton_step(jacobian: &DMatrix<f64>, residual: &DVector<f64>) -> Result<DVector<f64>> {
    if jacobian.iter().any(|v| !v.is_finite()) {
        return Err(Error::Infeasible("fraction sensitivities are not finite".into()));
    }
    let svd = jacobian.clone().svd(true, true);
    let cutoff = svd.singular_values.max() * 1e-12;
    svd.solve(&-residual, cutoff)
        .map_err(|e| Error::Infeasible(format!("fraction sensitivities are degenerate: {e}")))
}

/// Weights making each target index take its requested share of the
/// expected size, with the expected size itself equal to `n`.
pub fn tune(targets: &[IndexTarget], n: usize, model: &SizeModel, truncation: usize) -> Result<TuningProfile> {
    for (i, t) in targets.iter().enumerate() {
        if !(t.fraction >= 0.0 && t.fraction.is_finite()) {
            return Err(Error::InvalidParameter(format!("fraction {} of index {}", t.fraction, t.index)));
        }
        if targets[..i].iter().any(|s| s.index == t.index) {
            return Err(Error::InvalidParameter(format!("index {} targeted twice", t.index)));
        }
        if t.fraction > 0.0 && model.index_size(t.index) == 0 {
            return Err(Error::Infeasible(format!("index {} has size zero", t.index)));
        }
    }
    let total: f64 = targets.iter().map(|t| t.fraction).sum();
    if total >= 1.0 - 1e-12 {
        return Err(Error::Infeasible(format!("target fractions add up to {total}")));
    }

    let profile = |x: TwoFloat, weights: Vec<IndexWeight>, iterations| -> Result<TuningProfile> {
        let marks: Vec<(u64, f64)> = weights.iter().map(|w| (w.index, w.weight)).collect();
        let indices: Vec<u64> = targets.iter().map(|t| t.index).collect();
        let (expected_size, fractions) = expected_fractions(model, truncation, x, &marks, &indices)?;
        Ok(TuningProfile {
            model: *model,
            truncation,
            size: n,
            x: x.hi(),
            x_low: x.lo(),
            targets: targets.to_vec(),
            weights,
            expected_size,
            expected_fractions: indices
                .iter()
                .zip(fractions)
                .map(|(&index, fraction)| IndexTarget { index, fraction })
                .collect(),
            iterations,
        })
    };
    if targets.is_empty() {
        let x = calibrate(n, model, truncation, Level::Open(0), &[], CALIBRATION_TOLERANCE)?;
        return profile(x, Vec::new(), 0);
    }

    let problem = Problem {
        model,
        truncation,
        size: n,
        free: targets.iter().filter(|t| t.fraction > 0.0).map(|t| (t.index, t.fraction)).collect(),
        zero: targets.iter().filter(|t| t.fraction == 0.0).map(|t| t.index).collect(),
    };

    let mut phi = DVector::zeros(problem.free.len());
    let mut current = problem.evaluate(&phi)?;
    for iteration in 0..MAX_ITERATIONS {
        if problem.converged(&current) {
            let mut weights: Vec<IndexWeight> = problem
                .marks(&phi)
                .into_iter()
                .map(|(index, weight)| IndexWeight { index, weight })
                .collect();
            weights.sort_by_key(|w| w.index);
            return profile(current.x, weights, iteration);
        }
        let mut step = newton_step(&problem.jacobian(&phi)?, &current.residual)?;
        let longest = step.amax();
        if longest > MAX_STEP {
            step *= MAX_STEP / longest;
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let candidate = &phi + &step * alpha;
            if let Ok(next) = problem.evaluate(&candidate) {
                if next.norm() <= (1.0 - 1e-4 * alpha) * current.norm() || problem.converged(&next) {
                    accepted = Some((candidate, next));
                    break;
                }
            }
            alpha /= 2.0;
        }
        let Some((candidate, next)) = accepted else {
            return Err(Error::Infeasible("no step brings the fractions closer to the targets".into()));
        };
        if candidate.iter().any(|p| p.abs() > MAX_LOG_WEIGHT) {
            return Err(Error::Infeasible("a marking weight degenerated".into()));
        }
        phi = candidate;
        current = next;
    }
    Err(Error::Infeasible(format!("no convergence within {MAX_ITERATIONS} Newton steps")))
}

/// A closed term in the size window drawn from the tuned law.
pub fn sample_tuned<R: Rng + ?Sized>(
    profile: &TuningProfile,
    tolerance: f64,
    rng: &mut R,
    max_attempts: u64,
) -> Result<Term> {
    tuned_sampler(profile, tolerance, max_attempts)?.sample(rng)
}

/// A reusable sampler for the tuned law.
pub fn tuned_sampler(profile: &TuningProfile, tolerance: f64, max_attempts: u64) -> Result<ClosedSampler> {
    let config = SamplerConfig {
        tolerance,
        truncation: profile.truncation,
        max_attempts,
        ..SamplerConfig::new(profile.size)
    };
    config.validate()?;
    Ok(ClosedSampler::from_oracle(Arc::new(profile.oracle()?), config))
}
