//! Library half of the `fidopt` command-line tool. The binary is a thin
//! argument parser over [`commands`]; everything here is callable directly,
//! which is how the acceptance suite drives it.

pub mod commands;
pub mod error;
pub mod oracle;
pub mod sample;
pub mod wire;
