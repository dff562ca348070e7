//! Textual front ends: the session command language and the minified
//! one-token-per-gate circuit notation.

pub mod command;
pub mod minified;

pub use command::{parse_command, render_command, split_message_groups, Command, RetrieveKind};
pub use minified::{parse_minified, MinifiedCircuit};
