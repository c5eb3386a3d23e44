use num_bigint::BigUint;
use num_traits::Zero;
use serde_json::json;

use crate::model::SizeModel;

/// A class of the truncated open-level system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    /// `m`-open terms (indices below `m` are free to use at the top).
    Open(usize),
    /// All terms, open or closed.
    Plain,
}

impl Level {
    /// The class of an abstraction body for a term of this class.
    pub fn under_binder(self, truncation: usize, model: &SizeModel) -> Level {
        match self {
            Level::Open(m) if m < truncation => Level::Open(m + 1),
            Level::Open(m) if !model.has_plain_class() => Level::Open(m),
            _ => Level::Plain,
        }
    }

    /// Number of available indices, `None` if unbounded.
    pub fn index_bound(self) -> Option<usize> {
        match self {
            Level::Open(m) => Some(m),
            Level::Plain => None,
        }
    }
}

/// Exact counts `|L_{m,N}(n)|` for `m ≤ N` and `|L(n)|`, for all
/// `n ≤ max_size`.
#[derive(Clone, Debug)]
pub struct CountTable {
    model: SizeModel,
    truncation: usize,
    max_size: usize,
    counts: Vec<Vec<BigUint>>,
    plain: Option<Vec<BigUint>>,
    ops: u64,
}

pub fn build_count_table(model: SizeModel, truncation: usize, max_size: usize) -> CountTable {
    let (a, b) = (model.abs_weight(), model.app_weight());
    let mut counts = vec![Vec::with_capacity(max_size + 1); truncation + 1];
    let mut plain: Option<Vec<BigUint>> = model.has_plain_class().then(|| Vec::with_capacity(max_size + 1));
    let mut ops = 0u64;

    // Σ_{i+j = n-b} row[i] * row[j], over the already computed prefix of `row`.
    let convolve = |row: &[BigUint], n: usize, ops: &mut u64| -> BigUint {
        let mut acc = BigUint::zero();
        if n >= b {
            let rest = n - b;
            for i in 0..=rest {
                let (l, r) = (&row[i], &row[rest - i]);
                if !l.is_zero() && !r.is_zero() {
                    acc += l * r;
                }
                *ops += 2;
            }
        }
        acc
    };

    for n in 0..=max_size {
        if let Some(plain) = plain.as_mut() {
            let mut c = BigUint::from(model.indices_of_size(n, None));
            if n >= a {
                c += &plain[n - a];
                ops += 1;
            }
            c += convolve(plain, n, &mut ops);
            plain.push(c);
        }
        for m in (0..=truncation).rev() {
            let mut c = BigUint::from(model.indices_of_size(n, Some(m)));
            if n >= a {
                let below = match Level::Open(m).under_binder(truncation, &model) {
                    Level::Open(k) => &counts[k][n - a],
                    Level::Plain => &plain.as_ref().unwrap()[n - a],
                };
                c += below;
                ops += 1;
            }
            c += convolve(&counts[m], n, &mut ops);
            counts[m].push(c);
        }
    }

    CountTable {
        model,
        truncation,
        max_size,
        counts,
        plain,
        ops,
    }
}

impl CountTable {
    pub fn model(&self) -> &SizeModel {
        &self.model
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    /// `|L_{m,N}(n)|`. Panics if `m > N` or `n > max_size`.
    pub fn count(&self, m: usize, n: usize) -> &BigUint {
        &self.counts[m][n]
    }

    /// `|L(n)|`, or `None` when the model has no finite plain class.
    pub fn plain(&self, n: usize) -> Option<&BigUint> {
        self.plain.as_ref().map(|p| &p[n])
    }

    pub fn level(&self, level: Level, n: usize) -> &BigUint {
        match level {
            Level::Open(m) => self.count(m, n),
            Level::Plain => self.plain(n).expect("model has no plain class"),
        }
    }

    /// Big-integer additions and multiplications performed while building.
    pub fn arithmetic_ops(&self) -> u64 {
        self.ops
    }

    /// Whether `count(m, n)` equals the number of genuinely `m`-open terms,
    /// i.e. no term of that size can reach the truncation level.
    pub fn is_exact(&self, m: usize, n: usize) -> bool {
        m <= self.truncation && (self.truncation + 1 - m) * self.model.abs_weight() > n
    }

    /// `{"model", "N", "max_size", "counts", "plain"}` with counts as
    /// decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = |row: &Vec<BigUint>| row.iter().map(|c| c.to_string()).collect::<Vec<_>>();
        json!({
            "model": self.model,
            "N": self.truncation,
            "max_size": self.max_size,
            "counts": self.counts.iter().map(rows).collect::<Vec<_>>(),
            "plain": self.plain.as_ref().map(rows),
        })
    }
}
