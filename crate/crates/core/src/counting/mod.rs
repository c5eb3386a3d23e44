//! Exact and real-valued counting of λ-terms by size and openness.
//!
//! For openness levels `0..=N` the truncated system reads, coefficient-wise,
//!
//! ```text
//! L_m   = z^b L_m^2 + z^a L_{m+1} + Σ_{k<m} z^{|k|}     (m < N)
//! L_N   = z^b L_N^2 + z^a L       + Σ_{k<N} z^{|k|}
//! L     = z^b L^2   + z^a L       + Σ_{k≥0} z^{|k|}
//! ```
//!
//! where `a`, `b` and `|k|` come from the [`SizeModel`](crate::SizeModel).
//! The plain class `L` only exists when indices are weighted in unary; under
//! constant variable weights level `N` falls back on itself instead, which
//! restricts terms to indices below `N`.

mod catalan;
mod gf;
mod table;

pub use catalan::{catalan, catalan_convolution, catalan_convolution_table, catalan_counted, pointing_check, Series};
pub use gf::{gf_eval, singularity, GfValues};
pub(crate) use gf::{evaluate_precise, evaluate_system, precision_estimate, singularity_precise};
pub use table::{build_count_table, CountTable, Level};
