//! Certificates for basis pursuit failure on structured matrices.

pub mod certify;
pub mod error;
pub mod generators;
pub mod io;
pub mod linalg;
pub mod solvers;
pub mod structure;

pub use error::{Error, Result};
pub use linalg::Matrix;
