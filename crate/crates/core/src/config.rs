use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Engine version stamp written into cache records and report headers.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Smallest memory budget the engines accept.
pub const MIN_MEMORY_BUDGET: u64 = 64 * 1024 * 1024;

/// Default memory budget: 4 GiB.
pub const DEFAULT_MEMORY_BUDGET: u64 = 4 * 1024 * 1024 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(OutputFormat::Table),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Config(format!(
                "unknown output format {other:?} (expected table, json, or csv)"
            ))),
        }
    }
}

/// Run-wide knobs shared by the engines and the CLI.
///
/// `memory_budget` bounds the visited bitset plus frontier storage of a single
/// enumeration; `worker_count` shards neighbor expansion (results are
/// identical to single-worker execution by contract).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub memory_budget: u64,
    pub worker_count: usize,
    pub output_format: OutputFormat,
    pub cache_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            memory_budget: DEFAULT_MEMORY_BUDGET,
            worker_count: 1,
            output_format: OutputFormat::Table,
            cache_dir: None,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.worker_count < 1 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        if self.memory_budget < MIN_MEMORY_BUDGET {
            return Err(Error::Config(format!(
                "memory budget must be at least {MIN_MEMORY_BUDGET} bytes"
            )));
        }
        Ok(())
    }
}
