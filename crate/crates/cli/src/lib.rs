//! Batch front-end: configuration files in, CSV tables and a report out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod run;

pub use config::RunConfig;
pub use run::{run, Command, Outcome, Overrides};
