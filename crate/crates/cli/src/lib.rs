//! Library half of the `edgeflow` command-line tool.

pub mod acceptance;
pub mod config;
pub mod emit;
pub mod run;
