//! Batch front end: transcribe motifs, fit, evaluate and generate planted data.

pub mod commands;
pub mod config;

pub use config::RunConfig;
