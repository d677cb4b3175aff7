//! Command-line front end for simulating and analysing Itô multifractional
//! stable motion.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod run;

pub use config::{validate_config, Command, RunConfig};
pub use run::{run, RunError};
