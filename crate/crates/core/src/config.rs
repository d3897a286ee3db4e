//! Run configuration, read from TOML.
//!
//! Lookup order: an explicit path, then the `BSD2_CONFIG` environment
//! variable, then built-in defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descent::DescentSettings;
use crate::lvalue::NumericSettings;

pub const CONFIG_ENV: &str = "BSD2_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub numeric: NumericSettings,
    /// Sieve bound used when none is given on the command line.
    pub point_count_bound: u64,
    /// Largest level for which modular symbol spaces are built.
    pub modsym_level_cap: u64,
    pub descent: DescentSettings,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            numeric: NumericSettings::default(),
            point_count_bound: 2000,
            modsym_level_cap: 200,
            descent: DescentSettings::default(),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str, path: &Path) -> Result<Config, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn read(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Config::from_toml(&text, path)
    }

    /// Resolves the configuration and the file it came from, if any.
    pub fn load(explicit: Option<&Path>) -> Result<(Config, Option<PathBuf>), ConfigError> {
        let path = explicit
            .map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
        match path {
            Some(p) => Ok((Config::read(&p)?, Some(p))),
            None => Ok((Config::default(), None)),
        }
    }
}
