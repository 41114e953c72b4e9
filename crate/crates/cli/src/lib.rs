//! Building blocks of the `ghz-forge` command-line tool.

pub mod input;
pub mod sweep;
pub mod verify;
