//! Full-batch steepest descent with Armijo backtracking.
//!
//! Each iteration tries `initial_step`, then keeps multiplying the step by
//! `armijo_beta` until `f(x - s g) <= f(x) - armijo_c * s * |g|^2`. After
//! [`MAX_HALVINGS`] reductions the smallest step is taken anyway and the
//! iteration is flagged.

use thiserror::Error;

use crate::nn::{self, Dataset, NetError, NetworkParams, NetworkShape};
use crate::scalar::Scalar;

pub const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GdError {
    #[error("max_iterations must be >= 1")]
    NoIterations,
    #[error("invalid {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("non-finite cost {value} at iteration {iteration}")]
    NonFiniteCost { iteration: usize, value: f64 },
    #[error("objective failed: {0}")]
    Objective(String),
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GdConfig<T> {
    pub max_iterations: usize,
    pub initial_step: T,
    pub armijo_beta: T,
    pub armijo_c: T,
    pub lambda: T,
    pub seed: u64,
}

impl<T: Scalar> Default for GdConfig<T> {
    fn default() -> Self {
        Self {
            max_iterations: 400,
            initial_step: T::one(),
            armijo_beta: T::lit(0.5),
            armijo_c: T::lit(1e-4),
            lambda: T::lit(0.01),
            seed: 0,
        }
    }
}

impl<T: Scalar> GdConfig<T> {
    pub fn validate(&self) -> Result<(), GdError> {
        if self.max_iterations < 1 {
            return Err(GdError::NoIterations);
        }
        let bad = |name, value: T| GdError::InvalidParameter {
            name,
            value: value.as_f64(),
        };
        let unit = |v: T| v > T::zero() && v < T::one();
        if !(self.initial_step.is_finite() && self.initial_step > T::zero()) {
            return Err(bad("initial_step", self.initial_step));
        }
        if !unit(self.armijo_beta) {
            return Err(bad("armijo_beta", self.armijo_beta));
        }
        if !unit(self.armijo_c) {
            return Err(bad("armijo_c", self.armijo_c));
        }
        if !(self.lambda.is_finite() && self.lambda >= T::zero()) {
            return Err(bad("lambda", self.lambda));
        }
        Ok(())
    }
}

/// A smooth objective over a flat parameter vector.
pub trait Differentiable<T> {
    fn value(&self, x: &[T]) -> Result<T, GdError>;

    fn value_and_gradient(&self, x: &[T]) -> Result<(T, Vec<T>), GdError>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord<T> {
    pub iteration: usize,
    pub cost: T,
    pub step: T,
    /// The line search ran out of halvings.
    pub hit_cap: bool,
}

/// Minimizes `objective` from `x0`. `observe` sees the parameters after
/// every iteration (and once for the start point with iteration 0).
pub fn steepest_descent<T, D, O>(
    objective: &D,
    x0: Vec<T>,
    config: &GdConfig<T>,
    mut observe: O,
) -> Result<(Vec<T>, Vec<StepRecord<T>>), GdError>
where
    T: Scalar,
    D: Differentiable<T> + ?Sized,
    O: FnMut(&StepRecord<T>, &[T]) -> Result<(), GdError>,
{
    config.validate()?;
    let mut x = x0;
    let mut records = Vec::with_capacity(config.max_iterations + 1);
    let (mut fx, mut grad) = objective.value_and_gradient(&x)?;
    if !fx.is_finite() {
        return Err(GdError::NonFiniteCost {
            iteration: 0,
            value: fx.as_f64(),
        });
    }
    let start = StepRecord {
        iteration: 0,
        cost: fx,
        step: T::zero(),
        hit_cap: false,
    };
    observe(&start, &x)?;
    records.push(start);

    let mut trial = x.clone();
    for iteration in 1..=config.max_iterations {
        let g2: T = grad.iter().map(|&g| g * g).sum();
        let mut step = config.initial_step;
        let mut halvings = 0;
        let (f_new, hit_cap) = loop {
            for ((t, &xi), &gi) in trial.iter_mut().zip(&x).zip(&grad) {
                *t = xi - step * gi;
            }
            let f_trial = objective.value(&trial)?;
            if f_trial.is_finite() && f_trial <= fx - config.armijo_c * step * g2 {
                break (f_trial, false);
            }
            if halvings == MAX_HALVINGS {
                break (f_trial, true);
            }
            step = step * config.armijo_beta;
            halvings += 1;
        };
        if !f_new.is_finite() {
            return Err(GdError::NonFiniteCost {
                iteration,
                value: f_new.as_f64(),
            });
        }
        std::mem::swap(&mut x, &mut trial);
        let (f_x, g) = objective.value_and_gradient(&x)?;
        fx = f_x;
        grad = g;
        let record = StepRecord {
            iteration,
            cost: fx,
            step,
            hit_cap,
        };
        observe(&record, &x)?;
        records.push(record);
    }
    Ok((x, records))
}

/// The regularized network cost as a [`Differentiable`] objective.
pub struct NetObjective<'a, T> {
    pub data: &'a Dataset<T>,
    pub shape: NetworkShape,
    pub lambda: T,
}

impl<T: Scalar> Differentiable<T> for NetObjective<'_, T> {
    fn value(&self, x: &[T]) -> Result<T, GdError> {
        let params = NetworkParams::unflatten(x, self.shape)?;
        Ok(nn::cost(&params, self.data, self.lambda)?)
    }

    fn value_and_gradient(&self, x: &[T]) -> Result<(T, Vec<T>), GdError> {
        Ok(nn::flat_cost_and_gradient(
            x,
            self.shape,
            self.data,
            self.lambda,
        )?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdRecord<T> {
    pub iteration: usize,
    pub cost: T,
    pub accuracy: f64,
    pub hit_cap: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GdOutcome<T> {
    pub params: NetworkParams<T>,
    /// Iteration 0 holds the starting point.
    pub history: Vec<GdRecord<T>>,
}

/// Trains the network by steepest descent, recording cost and training
/// accuracy after every iteration.
pub fn gd_train<T: Scalar>(
    params0: &NetworkParams<T>,
    data: &Dataset<T>,
    config: &GdConfig<T>,
) -> Result<GdOutcome<T>, GdError> {
    let shape = params0.shape();
    let objective = NetObjective {
        data,
        shape,
        lambda: config.lambda,
    };
    let mut history = Vec::with_capacity(config.max_iterations + 1);
    let (flat, _) = steepest_descent(&objective, params0.flatten(), config, |rec, x| {
        let params = NetworkParams::unflatten(x, shape)?;
        let accuracy = nn::dataset_accuracy(&params, data)?;
        history.push(GdRecord {
            iteration: rec.iteration,
            cost: rec.cost,
            accuracy,
            hit_cap: rec.hit_cap,
        });
        Ok(())
    })?;
    Ok(GdOutcome {
        params: NetworkParams::unflatten(&flat, shape)?,
        history,
    })
}
