//! JSON experiment configuration.
//!
//! Every section is optional except `seed`. Unknown keys are rejected at
//! every level. Relative paths (dataset files, `output_dir`) are resolved
//! against the directory holding the config file.
//!
//! ```json
//! {
//!   "seed": 7,
//!   "output_dir": "results",
//!   "threads": 1,
//!   "dataset": {
//!     "kind": "idx",
//!     "images": "../data/mnist/train-images-idx3-ubyte.gz",
//!     "labels": "../data/mnist/train-labels-idx1-ubyte.gz"
//!   },
//!   "subset_size": 5000,
//!   "lambda": 0.01,
//!   "network": { "input": 400, "hidden": 25, "output": 10 },
//!   "awdo": { "population_n": 25, "max_iterations": 10000 },
//!   "gd": { "max_iterations": 400, "initial_step": 3.0 },
//!   "bench": { "dimension": 10 }
//! }
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use awdo::{AwdoConfig, GdConfig, NetworkShape};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_threads")]
    pub threads: usize,
    #[serde(default)]
    pub dataset: Option<DatasetSource>,
    #[serde(default = "default_subset_size")]
    pub subset_size: usize,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub network: NetworkSection,
    #[serde(default)]
    pub awdo: AwdoSection,
    #[serde(default)]
    pub gd: GdSection,
    #[serde(default)]
    pub bench: BenchSection,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_threads() -> usize {
    1
}

fn default_subset_size() -> usize {
    5000
}

fn default_lambda() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSource {
    /// MNIST IDX files, plain or gzip.
    Idx { images: PathBuf, labels: PathBuf },
    /// Clustered synthetic data with `subset_size` examples.
    Synthetic { separability: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub input: usize,
    pub hidden: usize,
    pub output: usize,
}

impl Default for NetworkSection {
    fn default() -> Self {
        let s = NetworkShape::default();
        Self {
            input: s.input,
            hidden: s.hidden,
            output: s.output,
        }
    }
}

impl NetworkSection {
    pub fn shape(&self) -> Result<NetworkShape, CliError> {
        NetworkShape::new(self.input, self.hidden, self.output)
            .map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AwdoSection {
    pub population_n: usize,
    pub max_iterations: usize,
    pub pressure_target: Option<f64>,
    pub init_lo: f64,
    pub init_hi: f64,
    pub cmaes_mean0: [f64; 4],
    pub cmaes_sigma0: f64,
}

impl Default for AwdoSection {
    fn default() -> Self {
        Self {
            population_n: 25,
            max_iterations: 10_000,
            pressure_target: None,
            init_lo: -0.12,
            init_hi: 0.12,
            cmaes_mean0: [0.5; 4],
            cmaes_sigma0: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GdSection {
    pub max_iterations: usize,
    pub initial_step: f64,
    pub armijo_beta: f64,
    pub armijo_c: f64,
    pub init_lo: f64,
    pub init_hi: f64,
}

impl Default for GdSection {
    fn default() -> Self {
        let d = GdConfig::<f64>::default();
        Self {
            max_iterations: d.max_iterations,
            initial_step: d.initial_step,
            armijo_beta: d.armijo_beta,
            armijo_c: d.armijo_c,
            init_lo: -0.12,
            init_hi: 0.12,
        }
    }
}

/// Settings for the `bench` command. The AWDO run itself takes its
/// population, iteration budget, target and tuner settings from `awdo`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    pub dimension: usize,
    pub init_lo: f64,
    pub init_hi: f64,
    /// Step size of the CMA-ES optimizer when it is benchmarked directly.
    pub cmaes_sigma0: f64,
}

impl Default for BenchSection {
    fn default() -> Self {
        Self {
            dimension: 10,
            init_lo: -1.0,
            init_hi: 1.0,
            cmaes_sigma0: 0.3,
        }
    }
}

impl ExperimentConfig {
    /// Parses a config document; relative paths are kept as written.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Loads a config file and resolves relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut config: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        config.resolve_paths(base);
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.output_dir);
        if let Some(DatasetSource::Idx { images, labels }) = &mut self.dataset {
            fix(images);
            fix(labels);
        }
    }

    pub fn awdo_config(&self) -> AwdoConfig<f64> {
        let a = &self.awdo;
        AwdoConfig {
            population_n: a.population_n,
            max_iterations: a.max_iterations,
            pressure_target: a.pressure_target,
            seed: self.seed,
            init_lo: a.init_lo,
            init_hi: a.init_hi,
            cmaes_mean0: a.cmaes_mean0,
            cmaes_sigma0: a.cmaes_sigma0,
        }
    }

    pub fn gd_config(&self) -> GdConfig<f64> {
        let g = &self.gd;
        GdConfig {
            max_iterations: g.max_iterations,
            initial_step: g.initial_step,
            armijo_beta: g.armijo_beta,
            armijo_c: g.armijo_c,
            lambda: self.lambda,
            seed: self.seed,
        }
    }
}
