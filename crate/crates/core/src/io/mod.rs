//! Configuration, command orchestration and file output.

pub mod cli;
pub mod config;
pub mod output;
pub mod run;
pub mod validate;
