//! Configuration, record layouts and subcommand bodies of the `nlbox` binary.

pub mod commands;
pub mod config;
pub mod records;
