use twofloat::TwoFloat;

use crate::counting::{evaluate_system, singularity_precise, Level};
use crate::error::{Error, Result};
use crate::jet::{div, Jet, Real};
use crate::model::SizeModel;

/// Relative tolerance of [`calibrate_terms`].
pub const CALIBRATION_TOLERANCE: f64 = 1e-6;

const MAX_BISECTIONS: usize = 2000;

/// Expected size `x A'(x) / A(x)` of the Boltzmann law of a class of the
/// truncated system, with `A'` computed exactly by forward differentiation.
pub fn mean_size(model: &SizeModel, truncation: usize, level: Level, x: f64, marks: &[(u64, f64)]) -> Result<f64> {
    mean_size_precise(model, truncation, level, TwoFloat::from(x), marks)
}

/// [`mean_size`] at a double-double point, evaluated in double-double.
pub fn mean_size_precise(
    model: &SizeModel,
    truncation: usize,
    level: Level,
    x: TwoFloat,
    marks: &[(u64, f64)],
) -> Result<f64> {
    let jx = Jet::variable(x, 0, 1);
    let marks: Vec<(u64, Jet<TwoFloat>)> = marks.iter().map(|&(k, u)| (k, Jet::constant(TwoFloat::from(u), 1))).collect();
    let sys = evaluate_system(model, truncation, &jx, &marks)?;
    let a = match level {
        Level::Open(m) => &sys.levels[m],
        Level::Plain => sys
            .plain
            .as_ref()
            .ok_or_else(|| Error::Unsupported("this size model has no plain class".into()))?,
    };
    Ok(div(x * a.g[0], a.v).to_f64())
}

/// `x` at which closed terms (truncation `N`) have expected size `n`,
/// rounded to the nearest double.
pub fn calibrate_terms(n: usize, model: &SizeModel, truncation: usize) -> Result<f64> {
    calibrate(n, model, truncation, Level::Open(0), &[], CALIBRATION_TOLERANCE).map(|x| x.to_f64())
}

/// Bisection on `(0, ρ)` for `mean_size(x) = n` within relative `tolerance`,
/// in double-double precision: close to `ρ` the expected size changes by
/// more than the tolerance between neighbouring doubles.
/// The mean grows with `x` from the smallest size of the class to infinity
/// at the singularity.
pub fn calibrate(
    n: usize,
    model: &SizeModel,
    truncation: usize,
    level: Level,
    marks: &[(u64, f64)],
    tolerance: f64,
) -> Result<TwoFloat> {
    if n == 0 {
        return Err(Error::DegenerateTarget(0));
    }
    if level == Level::Open(0) && n <= model.min_closed_size() {
        return Err(Error::NoConvergence(format!(
            "expected size stays above {} for every x",
            model.min_closed_size()
        )));
    }
    let target = n as f64;
    let (mut lo, mut hi) = (TwoFloat::from(0.0), singularity_precise(model, truncation, marks));
    let mut best: Option<(f64, f64)> = None;
    for _ in 0..MAX_BISECTIONS {
        let mid = (lo + hi) * 0.5;
        if mid <= lo || mid >= hi {
            break;
        }
        match mean_size_precise(model, truncation, level, mid, marks) {
            // underflow at tiny x
            Ok(mean) if mean.is_nan() => lo = mid,
            Ok(mean) => {
                let error = (mean - target).abs() / target;
                if error <= tolerance {
                    return Ok(mid);
                }
                if best.is_none_or(|(_, e)| error < e) {
                    best = Some((mid.hi(), error));
                }
                if mean < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Err(_) => hi = mid,
        }
    }
    Err(Error::NoConvergence(match best {
        Some((x, e)) => format!("closest mean size is off by {e:.3e} (relative) at x = {x}"),
        None => "no admissible x".into(),
    }))
}
