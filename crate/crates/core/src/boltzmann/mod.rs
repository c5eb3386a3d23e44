//! Approximate-size Boltzmann samplers.
//!
//! Under the Boltzmann law at `x` an object `α` of a class `A` is drawn
//! with probability `x^|α| / A(x)`, so all objects of equal size are
//! equally likely while the size itself fluctuates around
//! `x A'(x) / A(x)`. Samplers here calibrate `x` to a target mean and
//! reject outcomes outside a window `[(1-ε)n, (1+ε)n]`, aborting a run as
//! soon as it passes the upper end.

mod binary;
mod calibrate;
mod closed;
mod oracle;

pub use binary::{binary_tree_mean, calibrate_binary_tree, BinaryTreeSampler};
pub use calibrate::{calibrate, calibrate_terms, mean_size, mean_size_precise, CALIBRATION_TOLERANCE};
pub use closed::{
    sample_closed, Attempt, ClosedSampler, SamplerConfig, SamplerStats, DEFAULT_MAX_ATTEMPTS, DEFAULT_TOLERANCE,
    DEFAULT_TRUNCATION,
};
pub use oracle::{BoltzmannOracle, BranchTable, Draw};
pub use twofloat::TwoFloat;
