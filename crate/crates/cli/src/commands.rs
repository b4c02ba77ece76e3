//! The four subcommands. Each `run_*` function returns the in-memory result;
//! each `cmd_*` function also writes the output files.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use awdo::nn::init_params;
use awdo::{
    awdo_run_observed, gd_train, mnist, BenchObjective, BenchPressure, Cmaes, CmaesConfig, Dataset,
    GdRecord, NetError, NetPressure, NetworkParams, NetworkShape, RawMnist,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{DatasetSource, ExperimentConfig};
use crate::files::{self, Csv};
use crate::CliError;

// Streams of the config seed used outside the optimizer itself.
const DATA_STREAM: u64 = 10;
const GD_INIT_STREAM: u64 = 11;
const BENCH_STREAM: u64 = 12;

pub const BENCH_HEADER: [&str; 4] = ["iteration", "evaluations", "best_pressure", "mean_pressure"];
pub const GD_HEADER: [&str; 3] = ["iteration", "cost", "train_accuracy"];
pub const AWDO_HEADER: [&str; 4] = [
    "iteration",
    "evaluations",
    "best_pressure",
    "train_accuracy_of_best",
];

pub const GD_PARAMS_FILE: &str = "gd_params.bin";
pub const AWDO_PARAMS_FILE: &str = "awdo_params.bin";
pub const GD_HISTORY_FILE: &str = "gd_history.csv";
pub const AWDO_HISTORY_FILE: &str = "awdo_history.csv";

fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `job` on a rayon pool of `threads` workers. Results do not depend on
/// the thread count.
pub fn with_threads<R: Send>(
    threads: usize,
    job: impl FnOnce() -> R + Send,
) -> Result<R, CliError> {
    if threads == 0 {
        return Err(CliError::Config("threads must be >= 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {threads} worker threads: {e}")))?;
    Ok(pool.install(job))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimizer {
    Awdo,
    Cmaes,
}

impl Optimizer {
    pub fn name(self) -> &'static str {
        match self {
            Optimizer::Awdo => "awdo",
            Optimizer::Cmaes => "cmaes",
        }
    }
}

impl fmt::Display for Optimizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Optimizer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "awdo" => Ok(Optimizer::Awdo),
            "cmaes" => Ok(Optimizer::Cmaes),
            _ => Err(format!("unknown optimizer '{s}'; available: awdo, cmaes")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub iteration: usize,
    pub evaluations: usize,
    pub best_pressure: f64,
    pub mean_pressure: f64,
}

pub fn run_bench(
    objective: BenchObjective,
    optimizer: Optimizer,
    config: &ExperimentConfig,
) -> Result<Vec<BenchRow>, CliError> {
    let dim = config.bench.dimension;
    if dim == 0 {
        return Err(CliError::Config("bench.dimension must be >= 1".into()));
    }
    let f = BenchPressure::new(objective, dim);
    with_threads(config.threads, || match optimizer {
        Optimizer::Awdo => bench_awdo(&f, config),
        Optimizer::Cmaes => bench_cmaes(&f, config),
    })?
}

fn bench_awdo(f: &BenchPressure, config: &ExperimentConfig) -> Result<Vec<BenchRow>, CliError> {
    let awdo_config = awdo::AwdoConfig {
        init_lo: config.bench.init_lo,
        init_hi: config.bench.init_hi,
        ..config.awdo_config()
    };
    let outcome = awdo::awdo_run(f, f.dim, &awdo_config)?;
    Ok(outcome
        .history
        .records()
        .iter()
        .map(|r| BenchRow {
            iteration: r.iteration,
            evaluations: r.evaluations,
            best_pressure: r.best_pressure,
            mean_pressure: r.mean_pressure,
        })
        .collect())
}

/// Plain CMA-ES with `awdo.population_n` offspring per generation, started
/// from a uniform point in the bench init range.
fn bench_cmaes(f: &BenchPressure, config: &ExperimentConfig) -> Result<Vec<BenchRow>, CliError> {
    let b = &config.bench;
    if !(b.init_lo.is_finite() && b.init_hi.is_finite()) || b.init_lo >= b.init_hi {
        return Err(CliError::Config(format!(
            "bench init range [{}, {}] is empty",
            b.init_lo, b.init_hi
        )));
    }
    let mut rng = seeded(config.seed, BENCH_STREAM);
    let mean0: Vec<f64> = (0..f.dim)
        .map(|_| rng.random_range(b.init_lo..=b.init_hi))
        .collect();
    let lambda = config.awdo.population_n;
    let mut es = Cmaes::new(&CmaesConfig::new(mean0, b.cmaes_sigma0, lambda))?;
    let mut rows = Vec::new();
    for generation in 1..=config.awdo.max_iterations {
        let candidates = es.ask(&mut rng);
        let fitness: Vec<f64> = candidates
            .par_iter()
            .map(|x| f.objective.evaluate(x))
            .collect();
        es.tell(&candidates, &fitness)?;
        let best = es.best().map(|(_, v)| v).expect("told at least once");
        rows.push(BenchRow {
            iteration: generation,
            evaluations: generation * lambda,
            best_pressure: best,
            mean_pressure: fitness.iter().sum::<f64>() / lambda as f64,
        });
        if config.awdo.pressure_target.is_some_and(|t| best <= t) {
            break;
        }
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> Vec<u8> {
    let mut csv = Csv::new(&BENCH_HEADER);
    for r in rows {
        csv.row(&[
            &r.iteration,
            &r.evaluations,
            &r.best_pressure,
            &r.mean_pressure,
        ]);
    }
    csv.into_bytes()
}

pub fn cmd_bench(
    objective: &str,
    optimizer: &str,
    config: &ExperimentConfig,
) -> Result<PathBuf, CliError> {
    let objective: BenchObjective = objective.parse().map_err(CliError::Config)?;
    let optimizer: Optimizer = optimizer.parse().map_err(CliError::Config)?;
    let rows = run_bench(objective, optimizer, config)?;
    let path = config
        .output_dir
        .join(format!("bench_{objective}_{optimizer}.csv"));
    files::write_file(&path, &bench_csv(&rows))?;
    Ok(path)
}

/// Loads or generates the training set named by the config.
pub fn load_dataset(
    config: &ExperimentConfig,
    shape: NetworkShape,
) -> Result<Dataset<f64>, CliError> {
    match &config.dataset {
        None => Err(CliError::Data("no dataset configured".into())),
        Some(DatasetSource::Idx { images, labels }) => {
            let raw = RawMnist::load(images, labels)?;
            Ok(mnist::to_dataset(&raw, config.subset_size)?)
        }
        Some(DatasetSource::Synthetic { separability }) => {
            let mut rng = seeded(config.seed, DATA_STREAM);
            Ok(mnist::synthetic_dataset(
                config.subset_size,
                shape,
                *separability,
                &mut rng,
            )?)
        }
    }
}

fn check_data_shape(data: &Dataset<f64>, shape: NetworkShape) -> Result<(), CliError> {
    if data.input_size() != shape.input || data.classes() != shape.output {
        return Err(NetError::ShapeMismatch {
            what: "dataset",
            expected: (shape.input, shape.output),
            actual: (data.input_size(), data.classes()),
        }
        .into());
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct GdRun {
    pub history: Vec<GdRecord<f64>>,
    pub params: NetworkParams<f64>,
}

pub fn run_gd(config: &ExperimentConfig, data: &Dataset<f64>) -> Result<GdRun, CliError> {
    let shape = config.network.shape()?;
    check_data_shape(data, shape)?;
    let mut rng = seeded(config.seed, GD_INIT_STREAM);
    let params0 = init_params(shape, config.gd.init_lo, config.gd.init_hi, &mut rng)?;
    let outcome = with_threads(config.threads, || {
        gd_train(&params0, data, &config.gd_config())
    })??;
    Ok(GdRun {
        history: outcome.history,
        params: outcome.params,
    })
}

pub fn gd_csv(history: &[GdRecord<f64>]) -> Vec<u8> {
    let mut csv = Csv::new(&GD_HEADER);
    for r in history {
        csv.row(&[&r.iteration, &r.cost, &r.accuracy]);
    }
    csv.into_bytes()
}

pub fn cmd_train_gd(config: &ExperimentConfig) -> Result<GdRun, CliError> {
    let shape = config.network.shape()?;
    let data = load_dataset(config, shape)?;
    let run = run_gd(config, &data)?;
    files::write_file(
        &config.output_dir.join(GD_HISTORY_FILE),
        &gd_csv(&run.history),
    )?;
    files::write_file(
        &config.output_dir.join(GD_PARAMS_FILE),
        &files::encode_params(&run.params.flatten()),
    )?;
    Ok(run)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwdoRow {
    pub iteration: usize,
    pub evaluations: usize,
    pub best_pressure: f64,
    pub train_accuracy_of_best: f64,
}

#[derive(Debug, Clone)]
pub struct AwdoRun {
    pub history: Vec<AwdoRow>,
    pub params: NetworkParams<f64>,
}

/// Searches the flattened weights directly as parcel positions, so every
/// weight stays in `[-1, 1]`.
pub fn run_awdo(config: &ExperimentConfig, data: &Dataset<f64>) -> Result<AwdoRun, CliError> {
    let shape = config.network.shape()?;
    let pressure = NetPressure::new(data, shape, config.lambda)?;
    let mut history = Vec::new();
    let mut failure = None;
    let mut accuracy = f64::NAN;
    let outcome = with_threads(config.threads, || {
        awdo_run_observed(
            &pressure,
            shape.param_count(),
            &config.awdo_config(),
            |view| {
                if view.improved {
                    match pressure.accuracy(&view.best.position) {
                        Ok(a) => accuracy = a,
                        Err(e) => {
                            failure.get_or_insert(e);
                        }
                    }
                }
                history.push(AwdoRow {
                    iteration: view.record.iteration,
                    evaluations: view.record.evaluations,
                    best_pressure: view.record.best_pressure,
                    train_accuracy_of_best: accuracy,
                });
            },
        )
    })??;
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(AwdoRun {
        history,
        params: NetworkParams::unflatten(&outcome.best_position, shape)?,
    })
}

pub fn awdo_csv(history: &[AwdoRow]) -> Vec<u8> {
    let mut csv = Csv::new(&AWDO_HEADER);
    for r in history {
        csv.row(&[
            &r.iteration,
            &r.evaluations,
            &r.best_pressure,
            &r.train_accuracy_of_best,
        ]);
    }
    csv.into_bytes()
}

pub fn cmd_train_awdo(config: &ExperimentConfig) -> Result<AwdoRun, CliError> {
    let shape = config.network.shape()?;
    let data = load_dataset(config, shape)?;
    let run = run_awdo(config, &data)?;
    files::write_file(
        &config.output_dir.join(AWDO_HISTORY_FILE),
        &awdo_csv(&run.history),
    )?;
    files::write_file(
        &config.output_dir.join(AWDO_PARAMS_FILE),
        &files::encode_params(&run.params.flatten()),
    )?;
    Ok(run)
}

pub fn cmd_render_weights(
    params_path: &Path,
    shape: NetworkShape,
    out: &Path,
) -> Result<(), CliError> {
    let bytes = fs::read(params_path).map_err(|e| CliError::io(params_path, e))?;
    let flat = files::decode_params(&bytes)?;
    let params = NetworkParams::unflatten(&flat, shape)?;
    files::write_file(out, &files::render_hidden_weights(&params)?)
}
