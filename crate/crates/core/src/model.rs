//! Size models: constructor weights defining the size of a term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::term::{Op, Term};

/// How De Bruijn indices are weighted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexWeights {
    /// Index `k` is `S^k 0` and weighs `zero + k * succ`.
    Unary { zero: usize, succ: usize },
    /// Every index weighs `var`, whatever its value.
    Constant { var: usize },
}

/// Weights of abstractions, applications and indices.
///
/// Abstraction, application and successor weights must be at least one so
/// that every size class is finite; a zero of weight `0` is allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSizeModel", into = "RawSizeModel")]
pub struct SizeModel {
    abs: usize,
    app: usize,
    index: IndexWeights,
}

#[derive(Serialize, Deserialize)]
struct RawSizeModel {
    abs: usize,
    app: usize,
    index: IndexWeights,
}

impl TryFrom<RawSizeModel> for SizeModel {
    type Error = Error;

    fn try_from(raw: RawSizeModel) -> Result<Self> {
        SizeModel::new(raw.abs, raw.app, raw.index)
    }
}

impl From<SizeModel> for RawSizeModel {
    fn from(m: SizeModel) -> Self {
        RawSizeModel {
            abs: m.abs,
            app: m.app,
            index: m.index,
        }
    }
}

impl Default for SizeModel {
    fn default() -> Self {
        SizeModel::natural()
    }
}

impl SizeModel {
    pub fn new(abs: usize, app: usize, index: IndexWeights) -> Result<Self> {
        if abs == 0 {
            return Err(Error::InvalidModel("abstraction weight must be at least 1".into()));
        }
        if app == 0 {
            return Err(Error::InvalidModel("application weight must be at least 1".into()));
        }
        match index {
            IndexWeights::Unary { succ: 0, .. } => {
                return Err(Error::InvalidModel("successor weight must be at least 1".into()))
            }
            IndexWeights::Constant { var: 0 } => {
                return Err(Error::InvalidModel("variable weight must be at least 1".into()))
            }
            _ => {}
        }
        Ok(SizeModel { abs, app, index })
    }

    /// Every constructor, successor and zero included, weighs one.
    pub fn natural() -> Self {
        SizeModel {
            abs: 1,
            app: 1,
            index: IndexWeights::Unary { zero: 1, succ: 1 },
        }
    }

    /// Abstractions and applications weigh one, every variable weighs `var`.
    pub fn constant(var: usize) -> Result<Self> {
        SizeModel::new(1, 1, IndexWeights::Constant { var })
    }

    pub fn abs_weight(&self) -> usize {
        self.abs
    }

    pub fn app_weight(&self) -> usize {
        self.app
    }

    pub fn index_weights(&self) -> IndexWeights {
        self.index
    }

    /// Whether the class of all (open or closed) terms is finite per size.
    pub fn has_plain_class(&self) -> bool {
        matches!(self.index, IndexWeights::Unary { .. })
    }

    pub fn index_size(&self, k: u64) -> usize {
        match self.index {
            IndexWeights::Unary { zero, succ } => {
                zero.saturating_add((k as usize).saturating_mul(succ))
            }
            IndexWeights::Constant { var } => var,
        }
    }

    /// Number of indices `k < bound` whose size is exactly `n`.
    /// `bound = None` means no bound (the plain class).
    pub fn indices_of_size(&self, n: usize, bound: Option<usize>) -> usize {
        match self.index {
            IndexWeights::Unary { zero, succ } => {
                if n < zero || !(n - zero).is_multiple_of(succ) {
                    return 0;
                }
                let k = (n - zero) / succ;
                match bound {
                    Some(b) if k >= b => 0,
                    _ => 1,
                }
            }
            IndexWeights::Constant { var } => match bound {
                _ if n != var => 0,
                Some(b) => b,
                None => usize::MAX,
            },
        }
    }

    /// The `r`-th (0-based, ascending) index `k < bound` of size `n`.
    pub fn nth_index_of_size(&self, n: usize, r: usize) -> u64 {
        match self.index {
            IndexWeights::Unary { zero, succ } => {
                debug_assert_eq!(r, 0);
                ((n - zero) / succ) as u64
            }
            IndexWeights::Constant { .. } => r as u64,
        }
    }

    pub fn op_size(&self, op: Op) -> usize {
        match op {
            Op::Index(k) => self.index_size(k),
            Op::Abs => self.abs,
            Op::App => self.app,
        }
    }

    pub fn size(&self, t: &Term) -> usize {
        let mut total = 0;
        let mut stack = vec![t];
        while let Some(t) = stack.pop() {
            match t {
                Term::Index(k) => total += self.index_size(*k),
                Term::Abs(body) => {
                    total += self.abs;
                    stack.push(body);
                }
                Term::App(l, r) => {
                    total += self.app;
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        total
    }

    /// Smallest size of any closed term.
    pub fn min_closed_size(&self) -> usize {
        self.abs + self.index_size(0)
    }
}
