//! Bracketing covers, bracketing-number bounds and star-discrepancy tools for
//! the unit cube.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cover;
pub mod discrepancy;
mod error;
pub mod exactmath;
pub mod probbounds;
pub mod sampling;
pub mod special;

pub use error::{Error, Result};
