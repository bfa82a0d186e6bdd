//! Run configuration, read from a TOML file of flat dotted keys such as
//! `snake.alpha = 0.3` or `suite.snrs = [2, 3, 5, 10, 100]`. Every key is
//! optional.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::RegionMap;
use crate::snake::SnakeConfig;
use crate::synth::{
    default_peaks, PeakSpec, SyntheticSpec, DEFAULT_SBRS, DEFAULT_SLOPES, DEFAULT_SNRS,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub slopes: Vec<f64>,
    pub sbrs: Vec<f64>,
    pub snrs: Vec<f64>,
    pub base_seed: u64,
    pub n_channels: usize,
    pub blur_sigma: f64,
    pub peaks: Vec<PeakSpec>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let template = SyntheticSpec::default();
        Self {
            slopes: DEFAULT_SLOPES.to_vec(),
            sbrs: DEFAULT_SBRS.to_vec(),
            snrs: DEFAULT_SNRS.to_vec(),
            base_seed: 20210,
            n_channels: template.n_channels,
            blur_sigma: template.blur_sigma,
            peaks: default_peaks(),
        }
    }
}

impl SuiteConfig {
    /// Grid, blur and peaks shared by every spectrum of the suite.
    pub fn template(&self) -> SyntheticSpec {
        SyntheticSpec {
            n_channels: self.n_channels,
            blur_sigma: self.blur_sigma,
            peaks: self.peaks.clone(),
            ..SyntheticSpec::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlotConfig {
    /// Write an SVG next to the corrected spectrum.
    pub svg: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub snake: SnakeConfig,
    pub regions: RegionMap,
    pub suite: SuiteConfig,
    pub plot: PlotConfig,
    /// Fallback input path when none is given on the command line.
    pub input: Option<PathBuf>,
    /// Fallback output prefix or directory.
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn validate(&self) -> Result<()> {
        self.snake.validate()?;
        self.regions.validate()?;
        for path in [&self.input, &self.output].into_iter().flatten() {
            if path.as_os_str().is_empty() {
                return Err(Error::Config("empty path".into()));
            }
        }
        Ok(())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("run configuration is always serializable")
    }
}
