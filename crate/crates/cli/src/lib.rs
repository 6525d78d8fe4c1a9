//! Batch front-end for `rabi-core`: JSON configuration in, CSV and JSON
//! files out.

pub mod config;
pub mod output;
pub mod run;

pub use config::{parse_config, ConfigError, Mode, RunConfig};
pub use run::{execute, load_config, RunError, RunOptions};
