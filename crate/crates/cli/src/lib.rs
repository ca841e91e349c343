//! Batch front-end for the push-out machinery: file ingestion, command
//! dispatch and certificate emission.

pub mod commands;
pub mod error;
pub mod files;
pub mod report;

pub use commands::{Common, DriveFlags, Format, Outcome};
pub use error::{exit, CliError};
