//! Experiment harness, file formats and CLI on top of `knnlab-core`.

pub mod cli;
pub mod config;
pub mod harness;
pub mod output;
pub mod stats;
