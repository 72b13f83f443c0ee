//! File formats, result envelopes, DOT export and the command-line front
//! end for `cmh-core`.

pub mod cli;
pub mod commands;
pub mod dot;
pub mod envelope;
pub mod error;
pub mod format;
pub mod scalar_json;

pub use commands::{run, Command, Options, Outcome};
pub use envelope::ResultEnvelope;
pub use error::{CliError, CliResult};
