use crate::error::{Error, Result};
use twofloat::TwoFloat;

use crate::jet::{Jet, Real};
use crate::model::{IndexWeights, SizeModel};

/// Values of the truncated system at a real point `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct GfValues {
    pub x: f64,
    /// `levels[m] = L_{m,N}(x)` for `m = 0..=N`.
    pub levels: Vec<f64>,
    /// `L(x)`, absent when the model has no plain class.
    pub plain: Option<f64>,
    /// Estimated relative error of the values.
    pub precision: f64,
}

/// Jet-valued solution of the system; see [`evaluate_system`].
#[derive(Clone, Debug)]
pub(crate) struct SystemValues<T = f64> {
    pub levels: Vec<Jet<T>>,
    pub plain: Option<Jet<T>>,
    /// Smallest normalised square root of a discriminant met on the way.
    pub min_sqrt_disc: f64,
}

/// Solves the truncated system at `x`, bottom-up: the plain (or top) level
/// first, then levels `N, N-1, …, 0`, each as the root of its quadratic that
/// vanishes with `x`.
///
/// `marks` multiplies the weight of selected indices by extra parameters
/// (all `1` for the plain uniform law). Derivatives propagate through the
/// jets, so seeding `x` and the marks as variables yields gradients of
/// every level.
pub(crate) fn evaluate_system<T: Real>(
    model: &SizeModel,
    truncation: usize,
    x: &Jet<T>,
    marks: &[(u64, Jet<T>)],
) -> Result<SystemValues<T>> {
    let beyond = || Error::SingularityExceeded { x: x.v.to_f64() };
    if !(x.v.to_f64() > 0.0 && x.v.to_f64().is_finite()) {
        return Err(beyond());
    }
    let dim = x.dim();
    let xa = x.powi(model.abs_weight() as u32);
    let xb = x.powi(model.app_weight() as u32);
    let monomial = |k: u64| x.powi(model.index_size(k) as u32);
    let weight = |k: u64| {
        let base = monomial(k);
        match marks.iter().find(|(i, _)| *i == k) {
            Some((_, u)) => &base * u,
            None => base,
        }
    };

    let mut level_indices = Vec::with_capacity(truncation + 1);
    let mut acc = Jet::constant(T::from_f64(0.0), dim);
    for m in 0..=truncation {
        level_indices.push(acc.clone());
        acc = &acc + &weight(m as u64);
    }

    let mut min_sqrt_disc = f64::INFINITY;
    // root of z^b L^2 + (z^a - 1) L + I = 0
    let mut solve_top = |indices: &Jet<T>| -> Result<Jet<T>> {
        let gap = xa.scale(-1.0).add_const(1.0);
        if gap.v.to_f64() <= 0.0 {
            return Err(beyond());
        }
        let disc = &(&gap * &gap) - &(&xb * indices).scale(4.0);
        if !(disc.v.to_f64() > 0.0) {
            return Err(beyond());
        }
        let root = disc.sqrt();
        min_sqrt_disc = min_sqrt_disc.min(root.v.to_f64() / gap.v.to_f64());
        Ok(&indices.scale(2.0) / &(&gap + &root))
    };

    let (has_plain, top) = match model.index_weights() {
        IndexWeights::Unary { succ, .. } => {
            let q = x.powi(succ as u32);
            if q.v.to_f64() >= 1.0 {
                return Err(beyond());
            }
            // Σ_k x^{|k|} = x^{|0|} / (1 - x^succ), then reweight marked indices
            let mut total = &monomial(0) / &q.scale(-1.0).add_const(1.0);
            for (k, u) in marks {
                total = &total + &(&monomial(*k) * &u.add_const(-1.0));
            }
            (true, solve_top(&total)?)
        }
        IndexWeights::Constant { .. } => (false, solve_top(&level_indices[truncation])?),
    };

    let mut levels = vec![Jet::constant(T::from_f64(0.0), dim); truncation + 1];
    let mut below = top.clone();
    for m in (0..=truncation).rev() {
        if m == truncation && !has_plain {
            levels[m] = top.clone();
            continue;
        }
        let c = &(&xa * &below) + &level_indices[m];
        let disc = (&xb * &c).scale(-4.0).add_const(1.0);
        if !(disc.v.to_f64() > 0.0) {
            return Err(beyond());
        }
        let root = disc.sqrt();
        min_sqrt_disc = min_sqrt_disc.min(root.v.to_f64());
        let value = &c.scale(2.0) / &root.add_const(1.0);
        levels[m] = value.clone();
        below = value;
    }

    Ok(SystemValues {
        levels,
        plain: has_plain.then_some(top),
        min_sqrt_disc,
    })
}

pub(crate) fn evaluate_f64(model: &SizeModel, truncation: usize, x: f64, marks: &[(u64, f64)]) -> Result<SystemValues> {
    let marks: Vec<(u64, Jet)> = marks.iter().map(|&(k, u)| (k, Jet::constant(u, 0))).collect();
    evaluate_system(model, truncation, &Jet::constant(x, 0), &marks)
}

/// The system in double-double precision, for points too close to the
/// singularity for doubles to tell apart.
pub(crate) fn evaluate_precise(
    model: &SizeModel,
    truncation: usize,
    x: TwoFloat,
    marks: &[(u64, f64)],
) -> Result<SystemValues<TwoFloat>> {
    let marks: Vec<(u64, Jet<TwoFloat>)> =
        marks.iter().map(|&(k, u)| (k, Jet::constant(TwoFloat::from(u), 0))).collect();
    evaluate_system(model, truncation, &Jet::constant(x, 0), &marks)
}

/// Evaluates `L_{m,N}(x)` for all `m ≤ N` and `L(x)`.
pub fn gf_eval(model: &SizeModel, truncation: usize, x: f64) -> Result<GfValues> {
    let sys = evaluate_f64(model, truncation, x, &[])?;
    Ok(GfValues {
        x,
        levels: sys.levels.iter().map(|j| j.v).collect(),
        plain: sys.plain.as_ref().map(|j| j.v),
        precision: precision_estimate(truncation, sys.min_sqrt_disc),
    })
}

pub(crate) fn precision_estimate(truncation: usize, min_sqrt_disc: f64) -> f64 {
    f64::EPSILON * (truncation as f64 + 4.0) * (1.0 + 1.0 / min_sqrt_disc)
}

/// Dominant singularity of the truncated system: the supremum of the `x`
/// at which every discriminant stays positive.
pub fn singularity(model: &SizeModel, truncation: usize) -> f64 {
    singularity_with(model, truncation, &[])
}

pub(crate) fn singularity_with(model: &SizeModel, truncation: usize, marks: &[(u64, f64)]) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return lo;
        }
        if evaluate_f64(model, truncation, mid, marks).is_ok() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// [`singularity_with`] to double-double precision.
pub(crate) fn singularity_precise(model: &SizeModel, truncation: usize, marks: &[(u64, f64)]) -> TwoFloat {
    let start = singularity_with(model, truncation, marks);
    let mut step = start * f64::EPSILON;
    let (mut lo, mut hi) = (TwoFloat::from(start), TwoFloat::from(start));
    while lo > 0.0 && evaluate_precise(model, truncation, lo, marks).is_err() {
        (lo, step) = (lo - step, 2.0 * step);
    }
    while evaluate_precise(model, truncation, hi, marks).is_ok() {
        (hi, step) = (hi + step, 2.0 * step);
    }
    loop {
        let mid = (lo + hi) * 0.5;
        if mid <= lo || mid >= hi {
            return lo;
        }
        if evaluate_precise(model, truncation, mid, marks).is_ok() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::build_count_table;
    use num_traits::ToPrimitive;

    #[test]
    fn matches_truncated_power_sums() {
        let model = SizeModel::natural();
        let x = 0.05;
        let table = build_count_table(model, 20, 40);
        let gf = gf_eval(&model, 20, x).unwrap();
        let sum = |f: &dyn Fn(usize) -> f64| (0..=40).map(|n| f(n) * x.powi(n as i32)).sum::<f64>();
        let plain = sum(&|n| table.plain(n).unwrap().to_f64().unwrap());
        assert!((gf.plain.unwrap() - plain).abs() < 1e-6 * plain);
        assert!((gf.plain.unwrap() - (x + 2.0 * x * x + 4.0 * x.powi(3))).abs() < 1e-4);
        for m in [0, 1, 2, 5, 20] {
            let s = sum(&|n| table.count(m, n).to_f64().unwrap());
            assert!((gf.levels[m] - s).abs() <= 1e-6 * s, "level {m}: {} vs {s}", gf.levels[m]);
        }
    }

    #[test]
    fn partial_sums_increase_towards_value() {
        let model = SizeModel::natural();
        let x = 0.25;
        let table = build_count_table(model, 20, 200);
        let gf = gf_eval(&model, 20, x).unwrap();
        let mut previous_gap = f64::INFINITY;
        for k in [20, 50, 100, 200] {
            let partial: f64 = (0..=k).map(|n| table.count(0, n).to_f64().unwrap() * x.powi(n as i32)).sum();
            let gap = gf.levels[0] - partial;
            assert!(gap >= -1e-12 && gap < previous_gap, "K = {k}: gap {gap}");
            previous_gap = gap;
        }
        assert!(previous_gap < 1e-4 * gf.levels[0]);
    }

    #[test]
    fn values_are_ordered() {
        let model = SizeModel::natural();
        for x in [1e-6, 0.1, 0.2, 0.29] {
            let gf = gf_eval(&model, 20, x).unwrap();
            for m in 0..20 {
                assert!(gf.levels[m] > 0.0 && gf.levels[m] <= gf.levels[m + 1]);
            }
            assert!(gf.levels[20] <= gf.plain.unwrap() * (1.0 + 1e-14), "x = {x}: {} > {}", gf.levels[20], gf.plain.unwrap());
        }
        let tiny = gf_eval(&model, 20, 1e-9).unwrap();
        assert!(tiny.plain.unwrap() < 2e-9 && tiny.levels[0] < 1e-15);
    }

    #[test]
    fn singularity_is_the_feasibility_edge() {
        let model = SizeModel::natural();
        let rho = singularity(&model, 20);
        // plain natural terms: the root of (1-x)^2 (1-x) = 4x^2 near 0.2956
        assert!((rho - 0.295_597_742_522_084_8).abs() < 1e-12, "rho = {rho}");
        assert!(gf_eval(&model, 20, rho * (1.0 - 1e-9)).is_ok());
        assert!(matches!(gf_eval(&model, 20, rho * (1.0 + 1e-9)), Err(Error::SingularityExceeded { .. })));
        assert!(gf_eval(&model, 20, 0.5).is_err());
        assert!(gf_eval(&model, 20, 0.0).is_err());
    }

    #[test]
    fn precise_singularity_is_the_cubic_root() {
        let model = SizeModel::natural();
        let rho = singularity_precise(&model, 20, &[]);
        let one = TwoFloat::from(1.0);
        let f = |x: TwoFloat| (one - x) * (one - x) * (one - x) - x * x * 4.0;
        let slope = 3.0 * (1.0 - rho.hi()).powi(2) + 8.0 * rho.hi();
        assert!((f(rho).hi() / slope).abs() < 1e-29, "{rho:?}");
        assert!((rho.hi() - singularity(&model, 20)).abs() < 1e-15);
    }

    #[test]
    fn constant_model_has_no_plain_value() {
        let model = SizeModel::constant(1).unwrap();
        let gf = gf_eval(&model, 5, 0.1).unwrap();
        assert!(gf.plain.is_none());
        let table = build_count_table(model, 5, 30);
        let s: f64 = (0..=30).map(|n| table.count(0, n).to_f64().unwrap() * 0.1f64.powi(n as i32)).sum();
        assert!((gf.levels[0] - s).abs() < 1e-9 * s);
    }
}
