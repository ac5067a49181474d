// NaN-rejecting `!(x > 0.0)` checks and index loops over paired axes are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod correspondence;
pub mod error;
pub mod hilbert;
pub mod models;
pub mod quasidist;
pub mod transform;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
