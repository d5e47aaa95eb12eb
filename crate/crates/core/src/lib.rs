//! Concentration of empirical graph-statistic distributions under dependent
//! edges: statistics, random graph models, exact dependence coefficients and
//! finite-sample bounds.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod graph;
pub mod harness;
pub mod models;
pub mod oracle;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
