//! Analytic test objectives.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::scalar::Scalar;
use crate::wdo::{PressureError, PressureFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchObjective {
    Sphere,
    Rosenbrock,
    Rastrigin,
}

impl BenchObjective {
    pub const ALL: [BenchObjective; 3] = [
        BenchObjective::Sphere,
        BenchObjective::Rosenbrock,
        BenchObjective::Rastrigin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchObjective::Sphere => "sphere",
            BenchObjective::Rosenbrock => "rosenbrock",
            BenchObjective::Rastrigin => "rastrigin",
        }
    }

    pub fn registered_names() -> Vec<&'static str> {
        Self::ALL.iter().map(|o| o.name()).collect()
    }

    pub fn evaluate<T: Scalar>(self, x: &[T]) -> T {
        match self {
            BenchObjective::Sphere => sphere(x),
            BenchObjective::Rosenbrock => rosenbrock(x),
            BenchObjective::Rastrigin => rastrigin(x),
        }
    }

    /// Global minimizer and minimum value in `dim` dimensions.
    pub fn known_minimum<T: Scalar>(self, dim: usize) -> (Vec<T>, T) {
        match self {
            BenchObjective::Sphere | BenchObjective::Rastrigin => (vec![T::zero(); dim], T::zero()),
            BenchObjective::Rosenbrock => (vec![T::one(); dim], T::zero()),
        }
    }
}

impl fmt::Display for BenchObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchObjective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| {
                format!(
                    "unknown objective '{s}'; registered: {}",
                    Self::registered_names().join(", ")
                )
            })
    }
}

pub fn sphere<T: Scalar>(x: &[T]) -> T {
    x.iter().map(|&v| v * v).sum()
}

pub fn rosenbrock<T: Scalar>(x: &[T]) -> T {
    let hundred = T::lit(100.0);
    x.windows(2)
        .map(|w| {
            let a = w[1] - w[0] * w[0];
            let b = T::one() - w[0];
            hundred * a * a + b * b
        })
        .sum()
}

pub fn rastrigin<T: Scalar>(x: &[T]) -> T {
    let ten = T::lit(10.0);
    let tau = T::lit(2.0 * PI);
    ten * T::lit(x.len() as f64) + x.iter().map(|&v| v * v - ten * (tau * v).cos()).sum::<T>()
}

/// A benchmark objective bound to a dimension.
#[derive(Debug, Clone, Copy)]
pub struct BenchPressure {
    pub objective: BenchObjective,
    pub dim: usize,
}

impl BenchPressure {
    pub fn new(objective: BenchObjective, dim: usize) -> Self {
        Self { objective, dim }
    }
}

impl<T: Scalar> PressureFunction<T> for BenchPressure {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn pressure(&self, position: &[T]) -> Result<T, PressureError> {
        Ok(self.objective.evaluate(position))
    }
}
