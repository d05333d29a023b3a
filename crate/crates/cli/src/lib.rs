//! Library surface of the CLI: JSON schemas and command implementations,
//! shared by the `qunital` binary and its integration tests.

pub mod commands;
pub mod schema;
