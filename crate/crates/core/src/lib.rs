//! Wind Driven Optimization (WDO) and its adaptive variant (AWDO), where a
//! CMA-ES tuner re-samples the four WDO coefficients for every parcel at
//! every iteration.
//!
//! The crate also carries everything needed to use AWDO as a derivative-free
//! trainer for a three layer sigmoid network: the network itself, a steepest
//! descent baseline, MNIST IDX ingestion and a few analytic benchmark
//! objectives.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`). The type
//! aliases at the crate root pin the `f64` instantiations used by the CLI.
//!
//! ```
//! use awdo::{awdo_run, AwdoConfig, BenchObjective, BenchPressure};
//!
//! let sphere = BenchPressure::new(BenchObjective::Sphere, 4);
//! let config = AwdoConfig { max_iterations: 50, ..AwdoConfig::<f64>::new(10, 3) };
//! let outcome = awdo_run(&sphere, 4, &config).unwrap();
//! assert!(outcome.best_pressure <= outcome.history.records()[0].best_pressure);
//! ```

pub mod adaptive;
pub mod bench;
pub mod cmaes;
pub mod eigen;
pub mod gd;
pub mod mnist;
pub mod nn;
pub mod scalar;
pub mod wdo;

pub use adaptive::{
    awdo_run, awdo_run_observed, map_candidate_to_coefficients, AwdoConfig, AwdoError, AwdoOutcome,
    IterationRecord, IterationView, RunHistory,
};
pub use bench::{BenchObjective, BenchPressure};
pub use cmaes::{Cmaes, CmaesConfig, CmaesError};
pub use eigen::{sym_eigen, EigenError, SymEigen};
pub use gd::{gd_train, steepest_descent, Differentiable, GdConfig, GdError, GdOutcome, GdRecord};
pub use mnist::{IdxError, RawMnist};
pub use nn::{Dataset, NetError, NetPressure, NetworkParams, NetworkShape};
pub use scalar::Scalar;
pub use wdo::{
    BestTracker, FnPressure, Parcel, Position, PressureError, PressureFunction, Velocity,
    WdoCoefficients, WdoError,
};

pub type Parcel64 = Parcel<f64>;
pub type Parcel32 = Parcel<f32>;
pub type WdoCoefficients64 = WdoCoefficients<f64>;
pub type Cmaes64 = Cmaes<f64>;
pub type AwdoConfig64 = AwdoConfig<f64>;
pub type AwdoOutcome64 = AwdoOutcome<f64>;
pub type NetworkParams64 = NetworkParams<f64>;
pub type NetworkParams32 = NetworkParams<f32>;
pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type GdConfig64 = GdConfig<f64>;
