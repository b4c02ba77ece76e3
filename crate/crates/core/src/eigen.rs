//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use ndarray::Array2;
use thiserror::Error;

use crate::scalar::Scalar;

/// Absolute asymmetry tolerated on input, relative to the largest entry
/// (or 1, whichever is larger).
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {gap}")]
    Asymmetric { i: usize, j: usize, gap: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
}

/// Eigenvalues in ascending order; column `k` of `vectors` pairs with
/// `values[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen<T> {
    pub values: Vec<T>,
    pub vectors: Array2<T>,
}

pub fn sym_eigen<T: Scalar>(m: &Array2<T>) -> Result<SymEigen<T>, EigenError> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(EigenError::NotSquare { rows, cols });
    }
    let n = rows;
    if m.iter().any(|v| !v.is_finite()) {
        return Err(EigenError::NonFinite);
    }
    let scale = m.iter().fold(1.0f64, |acc, v| acc.max(v.abs().as_f64()));
    for i in 0..n {
        for j in i + 1..n {
            let gap = (m[[i, j]] - m[[j, i]]).abs().as_f64();
            if gap > SYMMETRY_TOLERANCE * scale {
                return Err(EigenError::Asymmetric { i, j, gap });
            }
        }
    }

    let mut a = m.clone();
    // work on the exactly symmetric part
    for i in 0..n {
        for j in i + 1..n {
            let avg = (a[[i, j]] + a[[j, i]]) * T::lit(0.5);
            a[[i, j]] = avg;
            a[[j, i]] = avg;
        }
    }
    let mut v = Array2::<T>::eye(n);

    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[[i, j]] * a[[i, j]])
            .sum();
        let diag: T = (0..n).map(|i| a[[i, i]] * a[[i, i]]).sum();
        if off <= T::epsilon() * T::epsilon() * diag || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[[p, q]];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[i, i]].partial_cmp(&a[[j, j]]).unwrap());
    let values = order.iter().map(|&i| a[[i, i]]).collect();
    let mut vectors = Array2::<T>::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        vectors.column_mut(dst).assign(&v.column(src));
    }
    Ok(SymEigen { values, vectors })
}
