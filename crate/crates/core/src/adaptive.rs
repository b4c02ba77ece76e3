//! Adaptive WDO: a CMA-ES tuner proposes one coefficient vector per parcel
//! per iteration and learns from the pressure each parcel reaches after the
//! move.
//!
//! Iteration 0 evaluates the initial population. Every later iteration `t`:
//!
//! 1. asks CMA-ES for `population_n` raw 4-vectors,
//! 2. clamps candidate `k` into coefficient bounds and hands it to parcel `k`,
//! 3. runs one [`wdo_step`],
//! 4. tells CMA-ES the post-move pressure of parcel `k` as the fitness of
//!    candidate `k`,
//! 5. appends a history record.
//!
//! The run stops after `max_iterations` or as soon as the best pressure is at
//! or below `pressure_target`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cmaes::{Cmaes, CmaesConfig, CmaesError};
use crate::scalar::{clamp, Scalar};
use crate::wdo::{
    evaluate_population, init_population, rank_population, wdo_step, BestTracker, Position,
    PressureFunction, WdoCoefficients, WdoError, ALPHA_MAX, C_MAX, G_MAX, RT_MAX,
};

const INIT_STREAM: u64 = 0;
const TUNER_STREAM: u64 = 1;
const KERNEL_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AwdoError {
    #[error("population_n must be >= 2, got {0}")]
    PopulationTooSmall(usize),
    #[error("max_iterations must be >= 1")]
    NoIterations,
    #[error("pressure function has dimension {function}, run requested {requested}")]
    DimensionMismatch { function: usize, requested: usize },
    #[error("candidate has non-finite entry {value} at {index}")]
    NonFiniteCandidate { index: usize, value: f64 },
    #[error(transparent)]
    Kernel(#[from] WdoError),
    #[error(transparent)]
    Tuner(#[from] CmaesError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AwdoConfig<T> {
    /// Parcel count; also the CMA-ES population size.
    pub population_n: usize,
    pub max_iterations: usize,
    pub pressure_target: Option<T>,
    pub seed: u64,
    pub init_lo: T,
    pub init_hi: T,
    pub cmaes_mean0: [T; 4],
    pub cmaes_sigma0: T,
}

impl<T: Scalar> AwdoConfig<T> {
    /// Defaults: init range `[-1, 1]`, tuner mean `0.5` per coefficient,
    /// tuner step size `0.3`, no pressure target.
    pub fn new(population_n: usize, seed: u64) -> Self {
        Self {
            population_n,
            max_iterations: 1000,
            pressure_target: None,
            seed,
            init_lo: -T::one(),
            init_hi: T::one(),
            cmaes_mean0: [T::lit(0.5); 4],
            cmaes_sigma0: T::lit(0.3),
        }
    }

    pub fn validate(&self) -> Result<(), AwdoError> {
        if self.population_n < 2 {
            return Err(AwdoError::PopulationTooSmall(self.population_n));
        }
        if self.max_iterations < 1 {
            return Err(AwdoError::NoIterations);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord<T> {
    pub iteration: usize,
    /// Evaluations spent on moves, i.e. `iteration * population_n`. The
    /// initial population's evaluations are not included.
    pub evaluations: usize,
    pub best_pressure: T,
    pub mean_pressure: T,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunHistory<T> {
    records: Vec<IterationRecord<T>>,
}

impl<T: Scalar> RunHistory<T> {
    pub fn records(&self) -> &[IterationRecord<T>] {
        &self.records
    }

    pub fn last(&self) -> Option<&IterationRecord<T>> {
        self.records.last()
    }

    fn push(&mut self, record: IterationRecord<T>) {
        self.records.push(record);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AwdoOutcome<T> {
    pub best_position: Vec<T>,
    pub best_pressure: T,
    pub history: RunHistory<T>,
    /// Total pressure evaluations including the initial population.
    pub total_evaluations: usize,
}

/// What an observer sees after each iteration.
pub struct IterationView<'a, T> {
    pub record: &'a IterationRecord<T>,
    /// Coefficients consumed by the step; empty at iteration 0.
    pub coefficients: &'a [WdoCoefficients<T>],
    pub best: &'a BestTracker<T>,
    /// Whether the best position changed during this iteration.
    pub improved: bool,
}

/// Clamps a raw tuner candidate into the coefficient box.
pub fn map_candidate_to_coefficients<T: Scalar>(
    raw: &[T; 4],
) -> Result<WdoCoefficients<T>, AwdoError> {
    if let Some(index) = raw.iter().position(|v| !v.is_finite()) {
        return Err(AwdoError::NonFiniteCandidate {
            index,
            value: raw[index].as_f64(),
        });
    }
    let z = T::zero();
    Ok(WdoCoefficients {
        alpha: clamp(raw[0], z, T::lit(ALPHA_MAX)),
        g: clamp(raw[1], z, T::lit(G_MAX)),
        rt: clamp(raw[2], z, T::lit(RT_MAX)),
        c: clamp(raw[3], z, T::lit(C_MAX)),
    })
}

pub fn awdo_run<T: Scalar, F: PressureFunction<T> + ?Sized>(
    f: &F,
    dim: usize,
    config: &AwdoConfig<T>,
) -> Result<AwdoOutcome<T>, AwdoError> {
    awdo_run_observed(f, dim, config, |_| {})
}

/// [`awdo_run`] with a callback after every iteration, including 0.
pub fn awdo_run_observed<T, F, O>(
    f: &F,
    dim: usize,
    config: &AwdoConfig<T>,
    mut observer: O,
) -> Result<AwdoOutcome<T>, AwdoError>
where
    T: Scalar,
    F: PressureFunction<T> + ?Sized,
    O: FnMut(&IterationView<'_, T>),
{
    config.validate()?;
    if f.dimension() != dim {
        return Err(AwdoError::DimensionMismatch {
            function: f.dimension(),
            requested: dim,
        });
    }
    let n = config.population_n;
    let stream = |id| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(id);
        rng
    };
    let mut init_rng = stream(INIT_STREAM);
    let mut tuner_rng = stream(TUNER_STREAM);
    let mut kernel_rng = stream(KERNEL_STREAM);

    let mut parcels = init_population(dim, n, config.init_lo, config.init_hi, &mut init_rng)?;
    evaluate_population(&mut parcels, f)?;
    rank_population(&mut parcels)?;
    let mut best = BestTracker::from_population(&parcels)?;
    let mut tuner = Cmaes::new(&CmaesConfig::new(
        config.cmaes_mean0.to_vec(),
        config.cmaes_sigma0,
        n,
    ))?;

    let mean_pressure = |parcels: &[crate::wdo::Parcel<T>]| {
        let total: T = parcels
            .iter()
            .map(|p| p.pressure.unwrap_or_else(T::nan))
            .sum();
        total / T::lit(parcels.len() as f64)
    };
    let reached =
        |best: &BestTracker<T>| config.pressure_target.is_some_and(|t| best.pressure <= t);

    let mut history = RunHistory::default();
    let record = IterationRecord {
        iteration: 0,
        evaluations: 0,
        best_pressure: best.pressure,
        mean_pressure: mean_pressure(&parcels),
    };
    history.push(record);
    observer(&IterationView {
        record: &record,
        coefficients: &[],
        best: &best,
        improved: true,
    });

    let mut iteration = 0;
    while iteration < config.max_iterations && !reached(&best) {
        iteration += 1;
        let candidates = tuner.ask(&mut tuner_rng);
        let coefficients = candidates
            .iter()
            .map(|c| map_candidate_to_coefficients(&[c[0], c[1], c[2], c[3]]))
            .collect::<Result<Vec<_>, _>>()?;
        let before = best.pressure;
        wdo_step(&mut parcels, &coefficients, f, &mut best, &mut kernel_rng)?;
        let fitness: Vec<T> = parcels
            .iter()
            .map(|p| p.pressure.expect("evaluated"))
            .collect();
        tuner.tell(&candidates, &fitness)?;

        let record = IterationRecord {
            iteration,
            evaluations: iteration * n,
            best_pressure: best.pressure,
            mean_pressure: mean_pressure(&parcels),
        };
        history.push(record);
        observer(&IterationView {
            record: &record,
            coefficients: &coefficients,
            best: &best,
            improved: best.pressure < before,
        });
    }

    Ok(AwdoOutcome {
        best_position: Position::into_inner(best.position),
        best_pressure: best.pressure,
        history,
        total_evaluations: (iteration + 1) * n,
    })
}
