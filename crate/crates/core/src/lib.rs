//! Numerical toolkit for L² bounds on the deformation cost of drilling short geodesics.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chart_file;
pub mod epstein;
pub mod error;
pub mod holomorphic;
pub mod laminations;
pub mod model_deformation;
pub mod quadrature;
pub mod report;
pub mod schwarzian;
pub mod sl2;
pub mod tube_trig;

pub use error::{Error, Result};
