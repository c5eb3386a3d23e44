//! Exact-size uniform sampling by the recursive method, and the exhaustive
//! enumerator used to check it.
//!
//! A context of free indices `{0, …, m-1}` is represented by its openness
//! level `m`; going under a binder lifts it to `m + 1`.

use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use num_bigint::{BigUint, RandBigInt};
use num_traits::Zero;
use rand::Rng;

use crate::counting::{CountTable, Level};
use crate::error::{Error, Result};
use crate::model::SizeModel;
use crate::rng::{seeded, SamplerRng};
use crate::term::{Op, Term};

/// Largest size [`enumerate`] accepts.
pub const ENUMERATION_GUARD: usize = 20;

/// Uniform sampler for terms of a fixed size, driven by a shared
/// [`CountTable`].
pub struct RecursiveSampler<R = SamplerRng> {
    table: Arc<CountTable>,
    rng: R,
}

impl RecursiveSampler<SamplerRng> {
    pub fn seeded(table: Arc<CountTable>, seed: u64) -> Self {
        RecursiveSampler::new(table, seeded(seed))
    }
}

impl<R: Rng> RecursiveSampler<R> {
    pub fn new(table: Arc<CountTable>, rng: R) -> Self {
        RecursiveSampler { table, rng }
    }

    pub fn table(&self) -> &CountTable {
        &self.table
    }

    /// A uniformly random `m`-open term of size exactly `n` (within the
    /// truncated class of the table).
    pub fn gen(&mut self, m: usize, n: usize) -> Result<Term> {
        let truncation = self.table.truncation();
        if m > truncation {
            return Err(Error::TruncationExceeded { openness: m, truncation });
        }
        self.gen_level(Level::Open(m), n)
    }

    /// Same as [`gen`](Self::gen) for an arbitrary class of the table.
    pub fn gen_level(&mut self, level: Level, n: usize) -> Result<Term> {
        let table = &*self.table;
        if n > table.max_size() {
            return Err(Error::SizeOutOfRange { size: n, max_size: table.max_size() });
        }
        if level == Level::Plain && !table.model().has_plain_class() {
            return Err(Error::Unsupported("this size model has no plain class".into()));
        }
        if table.level(level, n).is_zero() {
            let openness = level.index_bound().unwrap_or(usize::MAX);
            return Err(Error::EmptySizeClass { openness, size: n });
        }
        let model = *table.model();
        let (a, b) = (model.abs_weight(), model.app_weight());
        let truncation = table.truncation();

        let mut ops = Vec::new();
        let mut pending = vec![(level, n)];
        while let Some((level, n)) = pending.pop() {
            let mut r = self.rng.gen_biguint_below(table.level(level, n));

            let indices = BigUint::from(model.indices_of_size(n, level.index_bound()));
            if r < indices {
                let k = model.nth_index_of_size(n, usize::try_from(&r).unwrap());
                ops.push(Op::Index(k));
                continue;
            }
            r -= indices;

            if n >= a {
                let body = level.under_binder(truncation, &model);
                let c = table.level(body, n - a);
                if r < *c {
                    ops.push(Op::Abs);
                    pending.push((body, n - a));
                    continue;
                }
                r -= c;
            }

            // application: left size i with probability ∝ T(i) T(n - b - i)
            let rest = n - b;
            let mut split = None;
            for i in 0..=rest {
                let c = table.level(level, i) * table.level(level, rest - i);
                if r < c {
                    split = Some(i);
                    break;
                }
                r -= c;
            }
            let i = split.expect("branch weights add up to the class size");
            ops.push(Op::App);
            pending.push((level, rest - i));
            pending.push((level, i));
        }
        Ok(Term::from_preorder(&ops).expect("sampler emits a complete preorder"))
    }
}

/// All `m`-open terms of size exactly `n`, without duplicates: indices
/// first, then abstractions, then applications by increasing left size.
pub fn enumerate(model: &SizeModel, m: usize, n: usize) -> Result<Vec<Term>> {
    enumerate_with_guard(model, m, n, ENUMERATION_GUARD)
}

pub fn enumerate_with_guard(model: &SizeModel, m: usize, n: usize, guard: usize) -> Result<Vec<Term>> {
    if n > guard {
        return Err(Error::SizeGuardExceeded { size: n, guard });
    }
    let mut memo = HashMap::new();
    Ok(enumerate_memo(model, m, n, &mut memo).as_ref().clone())
}

fn enumerate_memo(model: &SizeModel, m: usize, n: usize, memo: &mut HashMap<(usize, usize), Rc<Vec<Term>>>) -> Rc<Vec<Term>> {
    if let Some(done) = memo.get(&(m, n)) {
        return done.clone();
    }
    let mut out = Vec::new();
    for k in 0..m as u64 {
        if model.index_size(k) == n {
            out.push(Term::var(k));
        }
    }
    if n >= model.abs_weight() {
        for body in enumerate_memo(model, m + 1, n - model.abs_weight(), memo).iter() {
            out.push(Term::abs(body.clone()));
        }
    }
    if n >= model.app_weight() {
        let rest = n - model.app_weight();
        for i in 0..=rest {
            let left = enumerate_memo(model, m, i, memo);
            if left.is_empty() {
                continue;
            }
            let right = enumerate_memo(model, m, rest - i, memo);
            for l in left.iter() {
                for r in right.iter() {
                    out.push(Term::app(l.clone(), r.clone()));
                }
            }
        }
    }
    let out = Rc::new(out);
    memo.insert((m, n), out.clone());
    out
}
