// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acoustics;
pub mod cli;
pub mod error;
pub mod forms;
pub mod linalg;
pub mod mesh;
pub mod mms;
pub mod quadrature;
pub mod space;
pub mod transport;

pub use error::{Error, Result};
