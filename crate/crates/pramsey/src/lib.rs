//! File formats, canonical JSON and run manifests for `pramsey-core`.

pub mod commands;
pub mod error;
pub mod io;

pub use error::{CliError, CliResult};
pub use io::{canonical_json, digest, write_atomic, RunManifest};
