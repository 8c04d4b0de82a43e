// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod bounds;
pub mod config;
pub mod error;
pub mod fuchsian;
pub mod hplane;
pub mod ingest;
pub mod modforms;
mod par;
pub mod product;

pub use error::{Error, ErrorClass, Result};
