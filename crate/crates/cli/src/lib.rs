//! Experiment driver for the `awdo` library: optimizer benchmarks, network
//! training runs with CSV histories, and hidden-layer weight rendering.

use std::path::{Path, PathBuf};

use awdo::{AwdoError, CmaesError, GdError, IdxError, NetError, WdoError};
use thiserror::Error;

pub mod commands;
pub mod config;
pub mod files;

pub use config::{DatasetSource, ExperimentConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2 for usage, config and data problems; 3 for numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 3,
            CliError::Config(_) | CliError::Data(_) | CliError::Io { .. } => 2,
        }
    }
}

impl From<IdxError> for CliError {
    fn from(e: IdxError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<NetError> for CliError {
    fn from(e: NetError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<GdError> for CliError {
    fn from(e: GdError) -> Self {
        match e {
            GdError::NonFiniteCost { .. } => CliError::Numerical(e.to_string()),
            GdError::NoIterations | GdError::InvalidParameter { .. } => {
                CliError::Config(e.to_string())
            }
            GdError::Objective(_) | GdError::Net(_) => CliError::Data(e.to_string()),
        }
    }
}

impl From<AwdoError> for CliError {
    fn from(e: AwdoError) -> Self {
        match &e {
            AwdoError::PopulationTooSmall(_) | AwdoError::NoIterations => {
                CliError::Config(e.to_string())
            }
            AwdoError::DimensionMismatch { .. } => CliError::Data(e.to_string()),
            AwdoError::Kernel(
                WdoError::InvalidInitRange { .. } | WdoError::InvalidPopulation { .. },
            ) => CliError::Config(e.to_string()),
            AwdoError::Tuner(
                CmaesError::InvalidSigma(_)
                | CmaesError::LambdaTooSmall(_)
                | CmaesError::ZeroDimension
                | CmaesError::MeanLength { .. }
                | CmaesError::NonFiniteMean,
            ) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<CmaesError> for CliError {
    fn from(e: CmaesError) -> Self {
        AwdoError::Tuner(e).into()
    }
}
