//! Command-line driver for opcalc: JSON I/O and batch verification.

pub mod commands;
pub mod schema;

pub use commands::{run, Status};
