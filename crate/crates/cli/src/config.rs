//! Config file loading.
//!
//! The file is TOML with an optional top-level `seed` and a `[tolerances]`
//! table whose keys mirror `qbounds::Tolerances`; missing keys keep their
//! defaults. The path comes from `--config`, else `$QBOUNDS_CONFIG`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qbounds::Tolerances;

use crate::CliError;

pub const CONFIG_ENV: &str = "QBOUNDS_CONFIG";

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("bad config: {e}")))
    }

    fn read(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Config::parse(&text)
    }

    /// Resolves the explicit path, then the environment variable, then
    /// the built-in defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Config, CliError> {
        let from_env = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
        match explicit.map(Path::to_path_buf).or(from_env) {
            Some(p) => Config::read(&p),
            None => Ok(Config::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_tables_keep_defaults() {
        let c = Config::parse("seed = 5\n[tolerances]\npsd = 1e-8\n").unwrap();
        assert_eq!(c.seed, Some(5));
        assert_eq!(c.tolerances.psd, 1e-8);
        assert_eq!(c.tolerances.lp_gap, Tolerances::default().lp_gap);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::parse("sead = 5").is_err());
    }
}
