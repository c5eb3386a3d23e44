//! Uniform random generation of λ-terms in De Bruijn notation.
//!
//! * [`counting`]: exact term counts, Catalan numbers, generating-function
//!   evaluation of the truncated open-level system.
//! * [`recursive`]: exact-size uniform sampler and exhaustive enumerator.
//! * [`remy`]: Rémy's linear-time binary trees and SK-combinators.
//! * [`boltzmann`]: approximate-size samplers for binary trees, plain and
//!   closed terms.
//! * [`tuner`]: index-frequency tuning of the closed-term sampler.
//! * [`typing`]: principal simple types and typed rejection sampling.

pub mod boltzmann;
pub mod counting;
pub mod error;
pub mod format;
mod jet;
pub mod model;
pub mod recursive;
pub mod remy;
pub mod rng;
pub mod term;
#[cfg(test)]
mod testing;
pub mod tree;
pub mod tuner;
pub mod typing;

pub use error::{Error, Result};
pub use format::{Format, ParseError};
pub use model::{IndexWeights, SizeModel};
pub use term::{Op, Term};
pub use tree::{BinaryTree, Combinator};
pub use typing::{infer, SimpleType};
