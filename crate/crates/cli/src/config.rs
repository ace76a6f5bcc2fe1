use std::fs;
use std::path::{Path, PathBuf};

use cyclic_chern::bismut::BchOptions;
use cyclic_chern::suites::SuiteConfig;
use serde::Deserialize;

use crate::CliError;

/// Keys accepted in a `--config` TOML file. Every key mirrors a flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub suite: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub truncate: Option<usize>,
    pub tolerance: Option<f64>,
    pub rk4_step: Option<f64>,
    pub quad_order: Option<usize>,
    pub seminorm_base: Option<f64>,
    #[serde(rename = "in")]
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub map: Option<String>,
    pub parity: Option<String>,
    pub mode: Option<String>,
    pub degree: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Flag values after merging: a flag given on the command line wins over
/// the same key in the config file.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub suites: Vec<String>,
    pub seed: Option<u64>,
    pub truncate: Option<usize>,
    pub tolerance: Option<f64>,
    pub rk4_step: Option<f64>,
    pub quad_order: Option<usize>,
    pub seminorm_base: Option<f64>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub map: Option<String>,
    pub parity: Option<String>,
    pub mode: Option<String>,
    pub degree: Option<usize>,
}

impl RunConfig {
    pub fn merge(flags: RunConfig, file: FileConfig) -> RunConfig {
        RunConfig {
            suites: if flags.suites.is_empty() { file.suite.unwrap_or_default() } else { flags.suites },
            seed: flags.seed.or(file.seed),
            truncate: flags.truncate.or(file.truncate),
            tolerance: flags.tolerance.or(file.tolerance),
            rk4_step: flags.rk4_step.or(file.rk4_step),
            quad_order: flags.quad_order.or(file.quad_order),
            seminorm_base: flags.seminorm_base.or(file.seminorm_base),
            input: flags.input.or(file.input),
            out: flags.out.or(file.out),
            plot: flags.plot.or(file.plot),
            map: flags.map.or(file.map),
            parity: flags.parity.or(file.parity),
            mode: flags.mode.or(file.mode),
            degree: flags.degree.or(file.degree),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x.is_finite() && x > 0.0) => Err(CliError::Config(format!("{name} must be positive, got {x}"))),
            _ => Ok(()),
        };
        positive("tolerance", self.tolerance)?;
        positive("rk4-step", self.rk4_step)?;
        if matches!(self.rk4_step, Some(h) if h > 1.0) {
            return Err(CliError::Config("rk4-step must be at most 1".into()));
        }
        if self.quad_order == Some(0) {
            return Err(CliError::Config("quad-order must be positive".into()));
        }
        if matches!(self.seminorm_base, Some(c) if !(c.is_finite() && c >= 1.0)) {
            return Err(CliError::Config("seminorm-base must be at least 1".into()));
        }
        Ok(())
    }

    pub fn bch_options(&self) -> BchOptions {
        let d = BchOptions::default();
        BchOptions {
            rk4_step: self.rk4_step.unwrap_or(d.rk4_step),
            quad_order: self.quad_order.unwrap_or(d.quad_order),
            max_order: None,
        }
    }

    pub fn suite_config(&self) -> SuiteConfig {
        let d = SuiteConfig::default();
        SuiteConfig {
            seed: self.seed.unwrap_or(d.seed),
            truncate: self.truncate.unwrap_or(d.truncate),
            tolerance: self.tolerance.unwrap_or(d.tolerance),
            bch: self.bch_options(),
            seminorm_base: self.seminorm_base.unwrap_or(d.seminorm_base),
            ..d
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file: FileConfig = toml::from_str("seed = 3\ntruncate = 2\nsuite = [\"chen\"]").unwrap();
        let flags = RunConfig {
            seed: Some(9),
            ..Default::default()
        };
        let merged = RunConfig::merge(flags, file);
        assert_eq!(merged.seed, Some(9));
        assert_eq!(merged.truncate, Some(2));
        assert_eq!(merged.suites, vec!["chen".to_string()]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("sead = 3").is_err());
    }

    #[test]
    fn non_positive_step_is_rejected() {
        let cfg = RunConfig {
            rk4_step: Some(0.0),
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
