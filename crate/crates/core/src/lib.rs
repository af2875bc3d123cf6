#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ambient;
pub mod chart;
pub mod error;
pub mod expr;
pub mod jet;
pub mod linalg;
pub mod models;
pub mod quadrature;
pub mod series;
pub mod variational;
pub mod weighted;

pub use error::{Error, Result};
pub use jet::{AnalyticFn, Jet};
