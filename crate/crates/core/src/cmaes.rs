//! A small (mu/mu_w, lambda) CMA-ES with an ask/tell interface.
//!
//! Strategy constants follow the usual tutorial defaults, with `n` the search
//! dimension, `mu = floor(lambda / 2)` and `mu_eff = 1 / sum(w_i^2)`:
//!
//! ```text
//! w_i     ∝ ln(mu + 1/2) - ln(i),  i = 1..mu, normalized to sum 1
//! c_sigma = (mu_eff + 2) / (n + mu_eff + 5)
//! d_sigma = 1 + 2 max(0, sqrt((mu_eff - 1) / (n + 1)) - 1) + c_sigma
//! c_c     = (4 + mu_eff / n) / (n + 4 + 2 mu_eff / n)
//! c_1     = 2 / ((n + 1.3)^2 + mu_eff)
//! c_mu    = min(1 - c_1, 2 (mu_eff - 2 + 1 / mu_eff) / ((n + 2)^2 + mu_eff))
//! E|N(0,I)| ≈ sqrt(n) (1 - 1 / (4n) + 1 / (21 n^2))
//! ```
//!
//! Each `tell` performs weighted recombination of the `mu` best candidates,
//! cumulative step-size adaptation, the rank-one and rank-mu covariance
//! updates (with the usual `h_sigma` stall guard) and a fresh
//! eigendecomposition of `C`. There are no restarts, no negative weights and
//! no bound handling. Lower fitness is better.

use ndarray::{Array1, Array2, Zip};
use rand::Rng;
use thiserror::Error;

use crate::eigen::{sym_eigen, EigenError};
use crate::scalar::Scalar;

/// Eigenvalues of `C` are never allowed below this.
pub const EIGENVALUE_FLOOR: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CmaesError {
    #[error("search dimension must be >= 1")]
    ZeroDimension,
    #[error("lambda must be >= 2, got {0}")]
    LambdaTooSmall(usize),
    #[error("initial mean has length {actual}, expected {expected}")]
    MeanLength { expected: usize, actual: usize },
    #[error("sigma0 must be finite and > 0, got {0}")]
    InvalidSigma(f64),
    #[error("initial mean has non-finite entries")]
    NonFiniteMean,
    #[error("tell called without a preceding ask")]
    NoPendingAsk,
    #[error("expected {expected} candidates and fitnesses, got {candidates} and {fitnesses}")]
    LengthMismatch {
        expected: usize,
        candidates: usize,
        fitnesses: usize,
    },
    #[error("candidate {index} differs from the last ask output")]
    CandidateMismatch { index: usize },
    #[error("fitness of candidate {index} is not finite: {value}")]
    NonFiniteFitness { index: usize, value: f64 },
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmaesConfig<T> {
    pub lambda: usize,
    pub mean0: Vec<T>,
    pub sigma0: T,
}

impl<T: Scalar> CmaesConfig<T> {
    pub fn new(mean0: Vec<T>, sigma0: T, lambda: usize) -> Self {
        Self {
            lambda,
            mean0,
            sigma0,
        }
    }

    /// Search dimension.
    pub fn n(&self) -> usize {
        self.mean0.len()
    }

    pub fn validate(&self) -> Result<(), CmaesError> {
        if self.mean0.is_empty() {
            return Err(CmaesError::ZeroDimension);
        }
        if self.lambda < 2 {
            return Err(CmaesError::LambdaTooSmall(self.lambda));
        }
        if !(self.sigma0.is_finite() && self.sigma0 > T::zero()) {
            return Err(CmaesError::InvalidSigma(self.sigma0.as_f64()));
        }
        if self.mean0.iter().any(|v| !v.is_finite()) {
            return Err(CmaesError::NonFiniteMean);
        }
        Ok(())
    }
}

/// Strategy constants derived from `n` and `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct CmaesParams<T> {
    pub n: usize,
    pub lambda: usize,
    pub mu: usize,
    pub weights: Vec<T>,
    pub mu_eff: T,
    pub c_sigma: T,
    pub d_sigma: T,
    pub c_c: T,
    pub c_1: T,
    pub c_mu: T,
    pub chi_n: T,
}

impl<T: Scalar> CmaesParams<T> {
    pub fn new(n: usize, lambda: usize) -> Self {
        let mu = lambda / 2;
        let raw: Vec<f64> = (1..=mu)
            .map(|i| (mu as f64 + 0.5).ln() - (i as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let nf = n as f64;

        let c_sigma = (mu_eff + 2.0) / (nf + mu_eff + 5.0);
        let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / nf) / (nf + 4.0 + 2.0 * mu_eff / nf);
        let c_1 = 2.0 / ((nf + 1.3).powi(2) + mu_eff);
        let c_mu =
            (1.0 - c_1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nf + 2.0).powi(2) + mu_eff));
        let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));

        Self {
            n,
            lambda,
            mu,
            weights: weights.into_iter().map(T::lit).collect(),
            mu_eff: T::lit(mu_eff),
            c_sigma: T::lit(c_sigma),
            d_sigma: T::lit(d_sigma),
            c_c: T::lit(c_c),
            c_1: T::lit(c_1),
            c_mu: T::lit(c_mu),
            chi_n: T::lit(chi_n),
        }
    }
}

/// Evolving CMA-ES state.
#[derive(Debug, Clone, PartialEq)]
pub struct Cmaes<T> {
    params: CmaesParams<T>,
    mean: Array1<T>,
    sigma: T,
    cov: Array2<T>,
    p_sigma: Array1<T>,
    p_c: Array1<T>,
    /// Columns are eigenvectors of `cov`.
    basis: Array2<T>,
    /// Square roots of the eigenvalues of `cov`.
    scales: Array1<T>,
    generation: usize,
    pending: Option<Vec<Vec<T>>>,
    best: Option<(Vec<T>, T)>,
    floored_eigenvalues: usize,
}

impl<T: Scalar> Cmaes<T> {
    pub fn new(config: &CmaesConfig<T>) -> Result<Self, CmaesError> {
        config.validate()?;
        let n = config.n();
        Ok(Self {
            params: CmaesParams::new(n, config.lambda),
            mean: Array1::from(config.mean0.clone()),
            sigma: config.sigma0,
            cov: Array2::eye(n),
            p_sigma: Array1::zeros(n),
            p_c: Array1::zeros(n),
            basis: Array2::eye(n),
            scales: Array1::ones(n),
            generation: 0,
            pending: None,
            best: None,
            floored_eigenvalues: 0,
        })
    }

    pub fn params(&self) -> &CmaesParams<T> {
        &self.params
    }

    pub fn mean(&self) -> &[T] {
        self.mean.as_slice().expect("contiguous")
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn covariance(&self) -> &Array2<T> {
        &self.cov
    }

    pub fn eigenbasis(&self) -> &Array2<T> {
        &self.basis
    }

    /// Square roots of the eigenvalues of the covariance.
    pub fn axis_scales(&self) -> &[T] {
        self.scales.as_slice().expect("contiguous")
    }

    pub fn evolution_paths(&self) -> (&[T], &[T]) {
        (
            self.p_sigma.as_slice().unwrap(),
            self.p_c.as_slice().unwrap(),
        )
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn lambda(&self) -> usize {
        self.params.lambda
    }

    /// Best candidate and fitness over all tells so far.
    pub fn best(&self) -> Option<(&[T], T)> {
        self.best.as_ref().map(|(x, f)| (x.as_slice(), *f))
    }

    /// How many eigenvalues had to be raised to [`EIGENVALUE_FLOOR`].
    pub fn floored_eigenvalues(&self) -> usize {
        self.floored_eigenvalues
    }

    /// Overrides the step size. Used by tests that probe limit behavior.
    pub fn set_sigma(&mut self, sigma: T) {
        self.sigma = sigma;
    }

    /// Samples `lambda` candidates `mean + sigma * B * diag(d) * z`.
    pub fn ask<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<Vec<T>> {
        let n = self.params.n;
        let candidates: Vec<Vec<T>> = (0..self.params.lambda)
            .map(|_| {
                let z: Array1<T> = (0..n).map(|_| T::standard_normal(rng)).collect();
                let scaled = &z * &self.scales;
                let y = self.basis.dot(&scaled);
                (&self.mean + &(y * self.sigma)).to_vec()
            })
            .collect();
        self.pending = Some(candidates.clone());
        candidates
    }

    /// Updates the distribution from the fitness of the last `ask` output.
    pub fn tell(&mut self, candidates: &[Vec<T>], fitnesses: &[T]) -> Result<(), CmaesError> {
        let pending = self.pending.as_ref().ok_or(CmaesError::NoPendingAsk)?;
        let lambda = self.params.lambda;
        if candidates.len() != lambda || fitnesses.len() != lambda {
            return Err(CmaesError::LengthMismatch {
                expected: lambda,
                candidates: candidates.len(),
                fitnesses: fitnesses.len(),
            });
        }
        if let Some(index) = candidates.iter().zip(pending).position(|(a, b)| a != b) {
            return Err(CmaesError::CandidateMismatch { index });
        }
        if let Some(index) = fitnesses.iter().position(|f| !f.is_finite()) {
            return Err(CmaesError::NonFiniteFitness {
                index,
                value: fitnesses[index].as_f64(),
            });
        }
        self.pending = None;

        let mut order: Vec<usize> = (0..lambda).collect();
        order.sort_by(|&a, &b| fitnesses[a].partial_cmp(&fitnesses[b]).unwrap());
        let top = order[0];
        if self.best.as_ref().is_none_or(|(_, f)| fitnesses[top] < *f) {
            self.best = Some((candidates[top].clone(), fitnesses[top]));
        }

        let p = &self.params;
        let n = p.n;
        let one = T::one();
        let two = T::lit(2.0);

        let old_mean = self.mean.clone();
        let steps: Vec<Array1<T>> = order[..p.mu]
            .iter()
            .map(|&k| (&Array1::from(candidates[k].clone()) - &old_mean) / self.sigma)
            .collect();
        let mut y_w = Array1::<T>::zeros(n);
        for (w, y) in p.weights.iter().zip(&steps) {
            y_w.scaled_add(*w, y);
        }
        self.mean = &old_mean + &(&y_w * self.sigma);

        // C^{-1/2} y_w = B diag(1/d) B^T y_w
        let rotated = self.basis.t().dot(&y_w);
        let whitened = self.basis.dot(&(&rotated / &self.scales));
        let cs = p.c_sigma;
        self.p_sigma =
            &self.p_sigma * (one - cs) + &(whitened * (cs * (two - cs) * p.mu_eff).sqrt());

        let ps_norm = self.p_sigma.dot(&self.p_sigma).sqrt();
        let gens = T::lit(2.0 * (self.generation + 1) as f64);
        let ps_expected = (one - (one - cs).powf(gens)).sqrt() * p.chi_n;
        let h_sigma = ps_norm / ps_expected < T::lit(1.4) + two / T::lit(n as f64 + 1.0);
        let hs = if h_sigma { one } else { T::zero() };

        let cc = p.c_c;
        self.p_c = &self.p_c * (one - cc) + &(&y_w * (hs * (cc * (two - cc) * p.mu_eff).sqrt()));

        let delta_h = (one - hs) * cc * (two - cc);
        let mut rank_mu = Array2::<T>::zeros((n, n));
        for (w, y) in p.weights.iter().zip(&steps) {
            Zip::indexed(&mut rank_mu).for_each(|(i, j), r| *r = *r + *w * y[i] * y[j]);
        }
        let pc = &self.p_c;
        let decay = one - p.c_1 - p.c_mu;
        let cov = &self.cov;
        let mut next = Array2::<T>::zeros((n, n));
        Zip::indexed(&mut next).for_each(|(i, j), c| {
            *c = decay * cov[[i, j]]
                + p.c_1 * (pc[i] * pc[j] + delta_h * cov[[i, j]])
                + p.c_mu * rank_mu[[i, j]];
        });
        self.cov = next;

        self.sigma = self.sigma * ((cs / p.d_sigma) * (ps_norm / p.chi_n - one)).exp();
        self.generation += 1;
        self.refresh_eigen()
    }

    fn refresh_eigen(&mut self) -> Result<(), CmaesError> {
        let n = self.params.n;
        for i in 0..n {
            for j in i + 1..n {
                let avg = (self.cov[[i, j]] + self.cov[[j, i]]) * T::lit(0.5);
                self.cov[[i, j]] = avg;
                self.cov[[j, i]] = avg;
            }
        }
        let eig = sym_eigen(&self.cov)?;
        let floor = T::lit(EIGENVALUE_FLOOR);
        let mut floored = false;
        let values: Vec<T> = eig
            .values
            .iter()
            .map(|&v| {
                if v < floor {
                    self.floored_eigenvalues += 1;
                    floored = true;
                    floor
                } else {
                    v
                }
            })
            .collect();
        self.basis = eig.vectors;
        self.scales = values.iter().map(|v| v.sqrt()).collect();
        if floored {
            self.cov = reconstruct(&self.basis, &values);
        }
        Ok(())
    }
}

/// `B diag(values) B^T`.
pub fn reconstruct<T: Scalar>(basis: &Array2<T>, values: &[T]) -> Array2<T> {
    let scaled = basis * &Array1::from(values.to_vec());
    let mut out = scaled.dot(&basis.t());
    let n = out.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let avg = (out[[i, j]] + out[[j, i]]) * T::lit(0.5);
            out[[i, j]] = avg;
            out[[j, i]] = avg;
        }
    }
    out
}
