//! File formats, experiment runner and command-line plumbing around
//! [`qgraph_core`].
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`format`] | graph and S-matrix JSON, spectrum JSON lines, CSV with provenance comments |
//! | [`config`] | flat `key = value` experiment specs, validation, spec hash |
//! | [`experiment`] | the six experiment kinds, parallel over `(size, seed)` cells |
//! | [`fit`] | least-squares fit of the mean-entropy model |
//! | [`commands`] | single-artifact operations behind the CLI subcommands |

pub mod commands;
pub mod config;
mod error;
pub mod experiment;
pub mod fit;
pub mod format;

pub use error::{Error, Result};
