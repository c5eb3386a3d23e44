use rand::Rng;

use twofloat::TwoFloat;

use crate::counting::{evaluate_precise, precision_estimate, GfValues, Level};
use crate::error::{Error, Result};
use crate::jet::{div, Real};
use crate::model::{IndexWeights, SizeModel};
use crate::term::{Op, Term};

/// Branching probabilities of one class at the oracle's `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchTable {
    /// Probability of `Index k` for each listed `k`.
    pub indices: Vec<f64>,
    /// Probability of an index past the listed ones (plain class only).
    /// Such an index is `indices.len()` plus a geometric offset.
    pub tail: f64,
    pub abs: f64,
    pub app: f64,
}

impl BranchTable {
    pub fn total(&self) -> f64 {
        self.indices.iter().sum::<f64>() + self.tail + self.abs + self.app
    }
}

/// Real-valued generating functions of the truncated system at a fixed
/// `x`, turned into branching probabilities for every class.
#[derive(Clone, Debug)]
pub struct BoltzmannOracle {
    model: SizeModel,
    truncation: usize,
    x: TwoFloat,
    marks: Vec<(u64, f64)>,
    gf: GfValues,
    levels: Vec<BranchTable>,
    plain: Option<BranchTable>,
    /// `ln x^succ`, the log-ratio of the geometric index tail.
    tail_log_ratio: f64,
}

impl BoltzmannOracle {
    pub fn new(model: SizeModel, truncation: usize, x: f64) -> Result<Self> {
        BoltzmannOracle::with_marks(model, truncation, x, &[])
    }

    /// Oracle of the weighted law where every occurrence of `Index k`
    /// additionally carries the factor `u` for each mark `(k, u)`.
    pub fn with_marks(model: SizeModel, truncation: usize, x: f64, marks: &[(u64, f64)]) -> Result<Self> {
        BoltzmannOracle::precise(model, truncation, TwoFloat::from(x), marks)
    }

    /// [`BoltzmannOracle::with_marks`] at a double-double `x`; the system
    /// is solved in double-double before rounding the probabilities.
    pub fn precise(model: SizeModel, truncation: usize, x: TwoFloat, marks: &[(u64, f64)]) -> Result<Self> {
        if let Some(&(k, u)) = marks.iter().find(|(_, u)| !(*u >= 0.0 && u.is_finite())) {
            return Err(Error::InvalidParameter(format!("weight {u} of index {k}")));
        }
        let sys = evaluate_precise(&model, truncation, x, marks)?;
        let weight = |k: u64| {
            let w = Real::powi(x, model.index_size(k) as u32);
            marks.iter().find(|(i, _)| *i == k).map_or(w, |(_, u)| w * *u)
        };
        let (xa, xb) = (Real::powi(x, model.abs_weight() as u32), Real::powi(x, model.app_weight() as u32));
        let value = |level: Level| match level {
            Level::Open(m) => sys.levels[m].v,
            Level::Plain => sys.plain.as_ref().unwrap().v,
        };
        let ratio = |a: TwoFloat, b: TwoFloat| div(a, b).to_f64();

        let levels = (0..=truncation)
            .map(|m| {
                let lm = sys.levels[m].v;
                BranchTable {
                    indices: (0..m as u64).map(|k| ratio(weight(k), lm)).collect(),
                    tail: 0.0,
                    abs: ratio(xa * value(Level::Open(m).under_binder(truncation, &model)), lm),
                    app: (xb * lm).to_f64(),
                }
            })
            .collect();

        let (plain, tail_log_ratio) = match model.index_weights() {
            IndexWeights::Unary { succ, .. } => {
                let l = value(Level::Plain);
                let listed = marks.iter().map(|(k, _)| k + 1).max().unwrap_or(0);
                let q = Real::powi(x, succ as u32);
                let table = BranchTable {
                    indices: (0..listed).map(|k| ratio(weight(k), l)).collect(),
                    tail: ratio(Real::powi(x, model.index_size(listed) as u32), (1.0 - q) * l),
                    abs: xa.to_f64(),
                    app: (xb * l).to_f64(),
                };
                (Some(table), q.to_f64().ln())
            }
            IndexWeights::Constant { .. } => (None, f64::NEG_INFINITY),
        };

        let gf = GfValues {
            x: x.to_f64(),
            levels: sys.levels.iter().map(|j| j.v.to_f64()).collect(),
            plain: sys.plain.as_ref().map(|j| j.v.to_f64()),
            precision: precision_estimate(truncation, sys.min_sqrt_disc),
        };
        Ok(BoltzmannOracle {
            model,
            truncation,
            x,
            marks: marks.to_vec(),
            gf,
            levels,
            plain,
            tail_log_ratio,
        })
    }

    pub fn model(&self) -> &SizeModel {
        &self.model
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn x(&self) -> f64 {
        self.x.to_f64()
    }

    pub fn x_precise(&self) -> TwoFloat {
        self.x
    }

    pub fn marks(&self) -> &[(u64, f64)] {
        &self.marks
    }

    pub fn gf(&self) -> &GfValues {
        &self.gf
    }

    /// Panics for `Level::Plain` under a model without plain class.
    pub fn branches(&self, level: Level) -> &BranchTable {
        match level {
            Level::Open(m) => &self.levels[m],
            Level::Plain => self.plain.as_ref().expect("model has no plain class"),
        }
    }

    /// One Boltzmann draw from `start`, aborted with
    /// [`Error::AbortCeiling`] as soon as the size passes `ceiling`.
    pub fn generate<R: Rng + ?Sized>(&self, start: Level, ceiling: usize, rng: &mut R) -> Result<Draw> {
        let mut scratch = Scratch::default();
        let (size, closed) = self.generate_into(start, ceiling, rng, &mut scratch)?;
        Ok(Draw { ops: scratch.ops, size, closed })
    }

    /// [`BoltzmannOracle::generate`] into reusable buffers, returning the
    /// size and closedness; the preorder is left in `scratch.ops`.
    pub(crate) fn generate_into<R: Rng + ?Sized>(
        &self,
        start: Level,
        ceiling: usize,
        rng: &mut R,
        scratch: &mut Scratch,
    ) -> Result<(usize, bool)> {
        if start == Level::Plain && self.plain.is_none() {
            return Err(Error::Unsupported("this size model has no plain class".into()));
        }
        if let Level::Open(m) = start {
            if m > self.truncation {
                return Err(Error::TruncationExceeded { openness: m, truncation: self.truncation });
            }
        }
        let Scratch { ops, pending } = scratch;
        ops.clear();
        pending.clear();
        let mut size = 0usize;
        let mut closed = true;
        // (class, number of indices bound at this point)
        pending.push((start, start.index_bound().unwrap_or(0)));
        while let Some((level, bound)) = pending.pop() {
            let op = self.branch(level, rng);
            size = size.saturating_add(self.model.op_size(op));
            if size > ceiling {
                return Err(Error::AbortCeiling(ceiling));
            }
            ops.push(op);
            match op {
                Op::Index(k) => closed &= k < bound as u64,
                Op::Abs => pending.push((level.under_binder(self.truncation, &self.model), bound + 1)),
                Op::App => {
                    pending.push((level, bound));
                    pending.push((level, bound));
                }
            }
        }
        Ok((size, closed))
    }

    /// A plain term from the Boltzmann law at `x`.
    pub fn sample_plain<R: Rng + ?Sized>(&self, ceiling: usize, rng: &mut R) -> Result<Term> {
        Ok(self.generate(Level::Plain, ceiling, rng)?.term())
    }

    fn branch<R: Rng + ?Sized>(&self, level: Level, rng: &mut R) -> Op {
        let table = self.branches(level);
        let mut r: f64 = rng.gen();
        if r < table.app {
            return Op::App;
        }
        r -= table.app;
        if r < table.abs {
            return Op::Abs;
        }
        r -= table.abs;
        for (k, p) in table.indices.iter().enumerate() {
            if r < *p {
                return Op::Index(k as u64);
            }
            r -= p;
        }
        if table.tail > 0.0 {
            let u = 1.0 - rng.gen::<f64>();
            let offset = (u.ln() / self.tail_log_ratio).floor() as u64;
            return Op::Index(table.indices.len() as u64 + offset);
        }
        // rounding slack past the last branch
        match table.indices.len() {
            0 => Op::App,
            len => Op::Index(len as u64 - 1),
        }
    }
}

/// Buffers reused across generation runs.
#[derive(Clone, Debug, Default)]
pub(crate) struct Scratch {
    pub ops: Vec<Op>,
    pending: Vec<(Level, usize)>,
}

/// Outcome of a single generation run.
#[derive(Clone, Debug)]
pub struct Draw {
    /// Constructors in preorder.
    pub ops: Vec<Op>,
    pub size: usize,
    /// Whether no index escapes the binders above it plus the starting
    /// openness.
    pub closed: bool,
}

impl Draw {
    pub fn term(&self) -> Term {
        Term::from_preorder(&self.ops).expect("generation emits a complete preorder")
    }
}
