//! Classical WDO population update.
//!
//! Each parcel carries a position in `[-1, 1]^D` and a velocity in
//! `[-0.3, 0.3]^D`. One step ranks the population by pressure (lower is
//! better), updates every velocity with friction, gravitation toward the
//! origin, attraction toward the best position seen so far and a Coriolis
//! term borrowed from another dimension, then moves each parcel by its new
//! velocity (unit time step). Both bounds are enforced by clamping.
//!
//! Pressure evaluation of distinct parcels runs on the rayon pool. Every
//! parcel gets its own random stream, drawn up front from the caller's
//! stream, so the result does not depend on the number of threads.

use std::ops::Deref;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::scalar::{clamp, Scalar};

/// Half-width of the position domain.
pub const POSITION_LIMIT: f64 = 1.0;
/// Maximum absolute velocity per coordinate.
pub const VELOCITY_LIMIT: f64 = 0.3;

pub const ALPHA_MAX: f64 = 1.0;
pub const G_MAX: f64 = 1.0;
pub const RT_MAX: f64 = 5.0;
pub const C_MAX: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct PressureError(pub String);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WdoError {
    #[error("invalid init range [{lo}, {hi}]: need lo < hi inside [-1, 1]")]
    InvalidInitRange { lo: f64, hi: f64 },
    #[error("invalid population: dimension {dim}, size {size} (need dimension >= 1, size >= 2)")]
    InvalidPopulation { dim: usize, size: usize },
    #[error("parcel {index} has not been evaluated")]
    Unevaluated { index: usize },
    #[error("parcel {index} has non-finite pressure {value}")]
    NonFinitePressure { index: usize, value: f64 },
    #[error("parcel {index} has no rank")]
    Unranked { index: usize },
    #[error("expected {expected} coefficient sets, got {actual}")]
    CoefficientCount { expected: usize, actual: usize },
    #[error("coefficient {name} = {value} outside [0, {max}]")]
    CoefficientOutOfRange {
        name: &'static str,
        value: f64,
        max: f64,
    },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("pressure evaluation failed for parcel {index}: {source}")]
    Pressure {
        index: usize,
        #[source]
        source: PressureError,
    },
    #[error("empty population")]
    EmptyPopulation,
}

/// Objective seen by the optimizer. Lower pressure is better.
pub trait PressureFunction<T>: Sync {
    fn dimension(&self) -> usize;

    fn pressure(&self, position: &[T]) -> Result<T, PressureError>;
}

/// Adapts a closure into a [`PressureFunction`].
pub struct FnPressure<F> {
    dim: usize,
    f: F,
}

impl<F> FnPressure<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<T, F> PressureFunction<T> for FnPressure<F>
where
    F: Fn(&[T]) -> T + Sync,
{
    fn dimension(&self) -> usize {
        self.dim
    }

    fn pressure(&self, position: &[T]) -> Result<T, PressureError> {
        Ok((self.f)(position))
    }
}

/// Coordinates of a parcel, each in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Position<T>(Vec<T>);

impl<T: Scalar> Position<T> {
    /// Builds a position, clamping every coordinate into the domain.
    pub fn clamped(coords: Vec<T>) -> Self {
        let lim = T::lit(POSITION_LIMIT);
        Self(coords.into_iter().map(|v| clamp(v, -lim, lim)).collect())
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

impl<T> Deref for Position<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.0
    }
}

/// Velocity of a parcel, each coordinate in `[-0.3, 0.3]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Velocity<T>(Vec<T>);

impl<T: Scalar> Velocity<T> {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![T::zero(); dim])
    }

    /// Builds a velocity, clamping every coordinate to the speed limit.
    pub fn clamped(coords: Vec<T>) -> Self {
        let lim = T::lit(VELOCITY_LIMIT);
        Self(coords.into_iter().map(|v| clamp(v, -lim, lim)).collect())
    }
}

impl<T> Deref for Velocity<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parcel<T> {
    pub position: Position<T>,
    pub velocity: Velocity<T>,
    /// `None` until the parcel has been evaluated.
    pub pressure: Option<T>,
    /// 1 is the lowest pressure in the population; 0 means not ranked yet.
    pub rank: usize,
}

impl<T: Scalar> Parcel<T> {
    pub fn at_rest(position: Position<T>) -> Self {
        let dim = position.len();
        Self {
            position,
            velocity: Velocity::zeros(dim),
            pressure: None,
            rank: 0,
        }
    }

    pub fn dimension(&self) -> usize {
        self.position.len()
    }
}

/// Friction, gravitation, RT product and Coriolis coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WdoCoefficients<T> {
    pub alpha: T,
    pub g: T,
    pub rt: T,
    pub c: T,
}

impl<T: Scalar> WdoCoefficients<T> {
    pub fn new(alpha: T, g: T, rt: T, c: T) -> Result<Self, WdoError> {
        let coeffs = Self { alpha, g, rt, c };
        coeffs.validate()?;
        Ok(coeffs)
    }

    pub fn validate(&self) -> Result<(), WdoError> {
        for (name, value, max) in [
            ("alpha", self.alpha, ALPHA_MAX),
            ("g", self.g, G_MAX),
            ("rt", self.rt, RT_MAX),
            ("c", self.c, C_MAX),
        ] {
            let v = value.as_f64();
            if !(v.is_finite() && (0.0..=max).contains(&v)) {
                return Err(WdoError::CoefficientOutOfRange {
                    name,
                    value: v,
                    max,
                });
            }
        }
        Ok(())
    }
}

/// Best position seen so far in a run.
#[derive(Debug, Clone, PartialEq)]
pub struct BestTracker<T> {
    pub position: Position<T>,
    pub pressure: T,
}

impl<T: Scalar> BestTracker<T> {
    /// Picks the lowest-pressure parcel (earliest index on ties).
    pub fn from_population(parcels: &[Parcel<T>]) -> Result<Self, WdoError> {
        let (index, pressure) = best_index(parcels)?;
        Ok(Self {
            position: parcels[index].position.clone(),
            pressure,
        })
    }

    /// Records `pressure` at `position` if it is strictly better. Returns
    /// whether the tracker changed.
    pub fn observe(&mut self, position: &Position<T>, pressure: T) -> bool {
        if pressure < self.pressure {
            self.pressure = pressure;
            self.position = position.clone();
            true
        } else {
            false
        }
    }
}

fn checked_pressure<T: Scalar>(index: usize, parcel: &Parcel<T>) -> Result<T, WdoError> {
    match parcel.pressure {
        None => Err(WdoError::Unevaluated { index }),
        Some(p) if !p.is_finite() => Err(WdoError::NonFinitePressure {
            index,
            value: p.as_f64(),
        }),
        Some(p) => Ok(p),
    }
}

fn best_index<T: Scalar>(parcels: &[Parcel<T>]) -> Result<(usize, T), WdoError> {
    let mut best: Option<(usize, T)> = None;
    for (i, parcel) in parcels.iter().enumerate() {
        let p = checked_pressure(i, parcel)?;
        if best.is_none_or(|(_, b)| p < b) {
            best = Some((i, p));
        }
    }
    best.ok_or(WdoError::EmptyPopulation)
}

/// Creates `size` parcels at rest with coordinates uniform in `[lo, hi]`.
pub fn init_population<T: Scalar, R: Rng + ?Sized>(
    dim: usize,
    size: usize,
    lo: T,
    hi: T,
    rng: &mut R,
) -> Result<Vec<Parcel<T>>, WdoError> {
    if dim < 1 || size < 2 {
        return Err(WdoError::InvalidPopulation { dim, size });
    }
    let lim = T::lit(POSITION_LIMIT);
    if !(lo < hi && lo >= -lim && hi <= lim) {
        return Err(WdoError::InvalidInitRange {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    Ok((0..size)
        .map(|_| {
            let coords = (0..dim).map(|_| rng.random_range(lo..=hi)).collect();
            Parcel::at_rest(Position(coords))
        })
        .collect())
}

/// Assigns ranks 1..N by ascending pressure; ties keep list order.
pub fn rank_population<T: Scalar>(parcels: &mut [Parcel<T>]) -> Result<(), WdoError> {
    let pressures = parcels
        .iter()
        .enumerate()
        .map(|(i, p)| checked_pressure(i, p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut order: Vec<usize> = (0..parcels.len()).collect();
    // all finite, so partial_cmp never fails; sort_by is stable
    order.sort_by(|&a, &b| pressures[a].partial_cmp(&pressures[b]).unwrap());
    for (rank0, &i) in order.iter().enumerate() {
        parcels[i].rank = rank0 + 1;
    }
    Ok(())
}

/// For every dimension `d`, draws the dimension whose velocity feeds the
/// Coriolis term: uniform over all dimensions except `d`. `None` when the
/// problem is one-dimensional.
pub fn draw_other_dimensions<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Option<usize>> {
    (0..dim)
        .map(|d| {
            if dim < 2 {
                None
            } else {
                let k = rng.random_range(0..dim - 1);
                Some(if k >= d { k + 1 } else { k })
            }
        })
        .collect()
}

/// Velocity update before the speed limit is applied.
pub fn unclamped_velocity<T: Scalar>(
    parcel: &Parcel<T>,
    coeffs: &WdoCoefficients<T>,
    best: &Position<T>,
    other_dims: &[Option<usize>],
) -> Vec<T> {
    let rank = T::lit(parcel.rank as f64);
    let attraction = (T::one() - T::one() / rank).abs() * coeffs.rt;
    let coriolis = coeffs.c / rank;
    let u = &parcel.velocity;
    let x = &parcel.position;
    (0..parcel.dimension())
        .map(|d| {
            let borrowed = other_dims[d].map_or(T::zero(), |od| u[od]);
            (T::one() - coeffs.alpha) * u[d] - coeffs.g * x[d]
                + attraction * (best[d] - x[d])
                + coriolis * borrowed
        })
        .collect()
}

/// New velocity for a ranked parcel.
pub fn update_velocity<T: Scalar, R: Rng + ?Sized>(
    parcel: &Parcel<T>,
    coeffs: &WdoCoefficients<T>,
    best: &BestTracker<T>,
    rng: &mut R,
) -> Velocity<T> {
    debug_assert!(parcel.rank >= 1);
    let other = draw_other_dimensions(parcel.dimension(), rng);
    Velocity::clamped(unclamped_velocity(parcel, coeffs, &best.position, &other))
}

/// Moves a parcel by one unit time step.
pub fn update_position<T: Scalar>(parcel: &Parcel<T>, velocity: &Velocity<T>) -> Position<T> {
    Position::clamped(
        parcel
            .position
            .iter()
            .zip(velocity.iter())
            .map(|(&x, &u)| x + u)
            .collect(),
    )
}

/// Evaluates every parcel, runs concurrently on the rayon pool.
pub fn evaluate_population<T: Scalar, F: PressureFunction<T> + ?Sized>(
    parcels: &mut [Parcel<T>],
    f: &F,
) -> Result<(), WdoError> {
    let pressures: Vec<Result<T, PressureError>> = parcels
        .par_iter()
        .map(|p| f.pressure(&p.position))
        .collect();
    for (index, (parcel, pressure)) in parcels.iter_mut().zip(pressures).enumerate() {
        let p = pressure.map_err(|source| WdoError::Pressure { index, source })?;
        if !p.is_finite() {
            return Err(WdoError::NonFinitePressure {
                index,
                value: p.as_f64(),
            });
        }
        parcel.pressure = Some(p);
    }
    Ok(())
}

type Moved<T> = (Velocity<T>, Position<T>, Result<T, PressureError>);

/// One WDO iteration over a ranked population.
///
/// Parcel `k` moves with `coeffs[k]`. All velocities read the pre-step state
/// and the shared best position. After the move every parcel is evaluated,
/// `best` absorbs any improvement and the population is re-ranked.
pub fn wdo_step<T: Scalar, F: PressureFunction<T> + ?Sized, R: Rng + ?Sized>(
    parcels: &mut [Parcel<T>],
    coeffs: &[WdoCoefficients<T>],
    f: &F,
    best: &mut BestTracker<T>,
    rng: &mut R,
) -> Result<(), WdoError> {
    if coeffs.len() != parcels.len() {
        return Err(WdoError::CoefficientCount {
            expected: parcels.len(),
            actual: coeffs.len(),
        });
    }
    let dim = f.dimension();
    for (index, parcel) in parcels.iter().enumerate() {
        if parcel.dimension() != dim {
            return Err(WdoError::DimensionMismatch {
                expected: dim,
                actual: parcel.dimension(),
            });
        }
        if parcel.rank == 0 {
            return Err(WdoError::Unranked { index });
        }
    }
    let seeds: Vec<u64> = parcels.iter().map(|_| rng.random()).collect();

    let best_ref = &*best;
    let moved: Vec<Moved<T>> = parcels
        .par_iter()
        .zip(coeffs.par_iter())
        .zip(seeds.par_iter())
        .map(|((parcel, c), &seed)| {
            let mut stream = ChaCha8Rng::seed_from_u64(seed);
            let velocity = update_velocity(parcel, c, best_ref, &mut stream);
            let position = update_position(parcel, &velocity);
            let pressure = f.pressure(&position);
            (velocity, position, pressure)
        })
        .collect();

    for (index, (parcel, (velocity, position, pressure))) in
        parcels.iter_mut().zip(moved).enumerate()
    {
        let p = pressure.map_err(|source| WdoError::Pressure { index, source })?;
        if !p.is_finite() {
            return Err(WdoError::NonFinitePressure {
                index,
                value: p.as_f64(),
            });
        }
        parcel.velocity = velocity;
        parcel.position = position;
        parcel.pressure = Some(p);
    }
    let (i, p) = best_index(parcels)?;
    best.observe(&parcels[i].position, p);
    rank_population(parcels)
}
