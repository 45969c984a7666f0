//! Dense linear-algebra kernels.

pub mod leading_block;
pub mod lu;
pub mod matrix;
pub mod minors;
pub mod qr;

pub use leading_block::{leading_block_coeffs, LeadingBlock};
pub use lu::{det, Lu};
pub use matrix::Matrix;
pub use minors::{
    antidiag_k, binomial, compound, compound_with_cap, consecutive_minors,
    consecutive_minors_upto, forward_difference, hadamard_scale, lex_tuples, minor, variation,
    IndexTuple, MinorSequence, COMPOUND_CAP,
};
pub use qr::{rank_estimate, ColPivQr, DEFAULT_RANK_TOL};
