//! File formats, command-line interface and experiment drivers for the
//! boundary trend filtering sampler in `btf-core`.

pub mod cli;
pub mod drivers;
pub mod error;
pub mod io;

pub use error::{CliError, Result};
