//! Std companion to `hvcheck-core`: threaded point counts with checkpoints,
//! the eigenvalue data source, verification pipelines and the command line.

pub mod cli;
pub mod datasource;
pub mod engine;
pub mod report;
pub mod sweep;
pub mod verify;

pub use hvcheck_core as core;
