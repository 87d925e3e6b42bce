//! Library surface of the `repoforge` binary: argument definitions,
//! command implementations, and deterministic rendering. Kept as a library
//! so integration tests can exercise commands without spawning processes.

pub mod commands;
pub mod gitlog;
pub mod render;

pub use commands::{exit_code_for, Cli, Command};
pub use render::OutputFormat;
