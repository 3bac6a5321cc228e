//! Run harness for the focusing NLS experiments: configuration, run
//! directories, the ground-state cache, the λ-sweep and the self-test
//! suites. The binary in `main.rs` is a thin clap layer over [`commands`].

pub mod commands;
pub mod config;
pub mod failure;
pub mod gscache;
pub mod initial;
pub mod rundir;
pub mod selftest;

pub use config::RunConfig;
pub use failure::Failure;
