//! File formats and the `hygame` command line.

mod commands;
pub mod format;
pub mod strategy_file;

pub use commands::run_command;
pub use format::{emit_game, parse_game, ParseError};
