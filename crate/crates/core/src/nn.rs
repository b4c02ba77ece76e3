//! Three layer sigmoid network (`input -> hidden -> output`) with a
//! regularized cross-entropy cost.
//!
//! Weights are stored with the bias in column 0: `theta1` is
//! `hidden x (input + 1)` and `theta2` is `output x (hidden + 1)`. The cost
//! over `m` examples with one-hot targets `y` and outputs `h` is
//!
//! ```text
//! J = (1/m) Σ_i Σ_k [ -y_ik ln(h_ik) - (1 - y_ik) ln(1 - h_ik) ]
//!     + (λ / 2m) (Σ theta1[:, 1..]^2 + Σ theta2[:, 1..]^2)
//! ```
//!
//! Bias columns are not regularized. Log arguments are floored at
//! [`LOG_FLOOR`] so the cost stays finite when activations saturate.

use ndarray::{concatenate, s, Array2, ArrayView2, Axis, Zip};
use rand::Rng;
use thiserror::Error;

use crate::scalar::Scalar;
use crate::wdo::{PressureError, PressureFunction};

pub const LOG_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetError {
    #[error("layer sizes must be >= 1, got {input}-{hidden}-{output}")]
    InvalidShape {
        input: usize,
        hidden: usize,
        output: usize,
    },
    #[error("{what} has shape {actual:?}, expected {expected:?}")]
    ShapeMismatch {
        what: &'static str,
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("parameter vector has length {actual}, expected {expected}")]
    WrongLength { expected: usize, actual: usize },
    #[error("invalid init range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("lambda must be finite and >= 0, got {0}")]
    InvalidLambda(f64),
    #[error("dataset must hold at least one example")]
    EmptyDataset,
    #[error("label {label} of example {index} is outside 0..{classes}")]
    LabelOutOfRange {
        index: usize,
        label: usize,
        classes: usize,
    },
    #[error("feature ({row}, {col}) = {value} is outside [0, 1]")]
    FeatureOutOfRange { row: usize, col: usize, value: f64 },
    #[error("{features} feature rows but {labels} labels")]
    LabelCount { features: usize, labels: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetworkShape {
    pub input: usize,
    pub hidden: usize,
    pub output: usize,
}

impl Default for NetworkShape {
    fn default() -> Self {
        Self {
            input: 400,
            hidden: 25,
            output: 10,
        }
    }
}

impl NetworkShape {
    pub fn new(input: usize, hidden: usize, output: usize) -> Result<Self, NetError> {
        let shape = Self {
            input,
            hidden,
            output,
        };
        shape.validate()?;
        Ok(shape)
    }

    pub fn validate(&self) -> Result<(), NetError> {
        if self.input == 0 || self.hidden == 0 || self.output == 0 {
            return Err(NetError::InvalidShape {
                input: self.input,
                hidden: self.hidden,
                output: self.output,
            });
        }
        Ok(())
    }

    pub fn theta1_dim(&self) -> (usize, usize) {
        (self.hidden, self.input + 1)
    }

    pub fn theta2_dim(&self) -> (usize, usize) {
        (self.output, self.hidden + 1)
    }

    /// Length of the flattened parameter vector.
    pub fn param_count(&self) -> usize {
        self.hidden * (self.input + 1) + self.output * (self.hidden + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams<T> {
    pub theta1: Array2<T>,
    pub theta2: Array2<T>,
}

impl<T: Scalar> NetworkParams<T> {
    pub fn zeros(shape: NetworkShape) -> Self {
        Self {
            theta1: Array2::zeros(shape.theta1_dim()),
            theta2: Array2::zeros(shape.theta2_dim()),
        }
    }

    pub fn shape(&self) -> NetworkShape {
        NetworkShape {
            input: self.theta1.ncols() - 1,
            hidden: self.theta1.nrows(),
            output: self.theta2.nrows(),
        }
    }

    fn views(&self) -> ParamViews<'_, T> {
        ParamViews {
            theta1: self.theta1.view(),
            theta2: self.theta2.view(),
        }
    }

    /// Row-major `theta1` followed by row-major `theta2`.
    pub fn flatten(&self) -> Vec<T> {
        self.theta1
            .iter()
            .chain(self.theta2.iter())
            .copied()
            .collect()
    }

    pub fn unflatten(flat: &[T], shape: NetworkShape) -> Result<Self, NetError> {
        let v = ParamViews::from_flat(flat, shape)?;
        Ok(Self {
            theta1: v.theta1.to_owned(),
            theta2: v.theta2.to_owned(),
        })
    }

    pub fn all_finite(&self) -> bool {
        self.theta1
            .iter()
            .chain(self.theta2.iter())
            .all(|v| v.is_finite())
    }
}

#[derive(Clone, Copy)]
struct ParamViews<'a, T> {
    theta1: ArrayView2<'a, T>,
    theta2: ArrayView2<'a, T>,
}

impl<'a, T: Scalar> ParamViews<'a, T> {
    fn from_flat(flat: &'a [T], shape: NetworkShape) -> Result<Self, NetError> {
        shape.validate()?;
        let expected = shape.param_count();
        if flat.len() != expected {
            return Err(NetError::WrongLength {
                expected,
                actual: flat.len(),
            });
        }
        let split = shape.hidden * (shape.input + 1);
        let theta1 = ArrayView2::from_shape(shape.theta1_dim(), &flat[..split]).expect("sized");
        let theta2 = ArrayView2::from_shape(shape.theta2_dim(), &flat[split..]).expect("sized");
        Ok(Self { theta1, theta2 })
    }

    fn check(&self, input: usize) -> Result<(), NetError> {
        let hidden = self.theta1.nrows();
        if self.theta1.ncols() != input + 1 {
            return Err(NetError::ShapeMismatch {
                what: "theta1",
                expected: (hidden, input + 1),
                actual: self.theta1.dim(),
            });
        }
        if self.theta2.ncols() != hidden + 1 {
            return Err(NetError::ShapeMismatch {
                what: "theta2",
                expected: (self.theta2.nrows(), hidden + 1),
                actual: self.theta2.dim(),
            });
        }
        Ok(())
    }

    fn penalty(&self) -> T {
        let sq = |m: &ArrayView2<'_, T>| m.slice(s![.., 1..]).iter().map(|&v| v * v).sum::<T>();
        sq(&self.theta1) + sq(&self.theta2)
    }
}

/// Training examples: features in `[0, 1]`, one-hot targets, integer labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    /// `m x (input + 1)` with a leading column of ones.
    x_aug: Array2<T>,
    y: Array2<T>,
    labels: Vec<usize>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(x: Array2<T>, labels: Vec<usize>, classes: usize) -> Result<Self, NetError> {
        let m = x.nrows();
        if m == 0 {
            return Err(NetError::EmptyDataset);
        }
        if labels.len() != m {
            return Err(NetError::LabelCount {
                features: m,
                labels: labels.len(),
            });
        }
        for ((row, col), &v) in x.indexed_iter() {
            if !(v >= T::zero() && v <= T::one()) {
                return Err(NetError::FeatureOutOfRange {
                    row,
                    col,
                    value: v.as_f64(),
                });
            }
        }
        let mut y = Array2::zeros((m, classes));
        for (index, &label) in labels.iter().enumerate() {
            if label >= classes {
                return Err(NetError::LabelOutOfRange {
                    index,
                    label,
                    classes,
                });
            }
            y[[index, label]] = T::one();
        }
        let x_aug = concatenate![Axis(1), Array2::ones((m, 1)), x];
        Ok(Self { x_aug, y, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn features(&self) -> ArrayView2<'_, T> {
        self.x_aug.slice(s![.., 1..])
    }

    pub fn targets(&self) -> &Array2<T> {
        &self.y
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn input_size(&self) -> usize {
        self.x_aug.ncols() - 1
    }

    pub fn classes(&self) -> usize {
        self.y.ncols()
    }

    /// First `m` examples.
    pub fn head(&self, m: usize) -> Self {
        let m = m.min(self.len()).max(1);
        Self {
            x_aug: self.x_aug.slice(s![..m, ..]).to_owned(),
            y: self.y.slice(s![..m, ..]).to_owned(),
            labels: self.labels[..m].to_vec(),
        }
    }
}

/// Numerically safe logistic function.
#[inline]
pub fn sigmoid<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

fn with_bias<T: Scalar>(a: &Array2<T>) -> Array2<T> {
    concatenate![Axis(1), Array2::ones((a.nrows(), 1)), a.view()]
}

struct Activations<T> {
    /// Hidden activations with the bias column.
    hidden_aug: Array2<T>,
    output: Array2<T>,
}

fn forward_aug<T: Scalar>(p: ParamViews<'_, T>, x_aug: ArrayView2<'_, T>) -> Activations<T> {
    let hidden = x_aug.dot(&p.theta1.t()).mapv_into(sigmoid);
    let hidden_aug = with_bias(&hidden);
    let output = hidden_aug.dot(&p.theta2.t()).mapv_into(sigmoid);
    Activations { hidden_aug, output }
}

fn cross_entropy<T: Scalar>(h: &Array2<T>, y: &Array2<T>) -> T {
    let floor = T::lit(LOG_FLOOR);
    let mut total = T::zero();
    Zip::from(h).and(y).for_each(|&h, &y| {
        total = total - y * h.max(floor).ln() - (T::one() - y) * (T::one() - h).max(floor).ln();
    });
    total
}

fn check_lambda<T: Scalar>(lambda: T) -> Result<(), NetError> {
    if !(lambda.is_finite() && lambda >= T::zero()) {
        return Err(NetError::InvalidLambda(lambda.as_f64()));
    }
    Ok(())
}

fn check_data<T: Scalar>(p: &ParamViews<'_, T>, data: &Dataset<T>) -> Result<(), NetError> {
    p.check(data.input_size())?;
    if p.theta2.nrows() != data.classes() {
        return Err(NetError::ShapeMismatch {
            what: "theta2",
            expected: (data.classes(), p.theta2.ncols()),
            actual: p.theta2.dim(),
        });
    }
    Ok(())
}

fn cost_views<T: Scalar>(
    p: ParamViews<'_, T>,
    data: &Dataset<T>,
    lambda: T,
) -> Result<(T, Array2<T>), NetError> {
    check_data(&p, data)?;
    check_lambda(lambda)?;
    let m = T::lit(data.len() as f64);
    let act = forward_aug(p, data.x_aug.view());
    let j = cross_entropy(&act.output, &data.y) / m + lambda / (T::lit(2.0) * m) * p.penalty();
    Ok((j, act.output))
}

/// Hidden and output activations for the rows of `x`.
pub fn forward<T: Scalar>(
    params: &NetworkParams<T>,
    x: ArrayView2<'_, T>,
) -> Result<(Array2<T>, Array2<T>), NetError> {
    let p = params.views();
    p.check(x.ncols())?;
    let x_aug = concatenate![Axis(1), Array2::ones((x.nrows(), 1)), x];
    let act = forward_aug(p, x_aug.view());
    let hidden = act.hidden_aug.slice(s![.., 1..]).to_owned();
    Ok((hidden, act.output))
}

pub fn cost<T: Scalar>(
    params: &NetworkParams<T>,
    data: &Dataset<T>,
    lambda: T,
) -> Result<T, NetError> {
    cost_views(params.views(), data, lambda).map(|(j, _)| j)
}

/// Cost together with the output activations it was computed from.
pub fn cost_with_outputs<T: Scalar>(
    params: &NetworkParams<T>,
    data: &Dataset<T>,
    lambda: T,
) -> Result<(T, Array2<T>), NetError> {
    cost_views(params.views(), data, lambda)
}

/// Cost and its exact gradient by backpropagation.
pub fn cost_and_gradient<T: Scalar>(
    params: &NetworkParams<T>,
    data: &Dataset<T>,
    lambda: T,
) -> Result<(T, NetworkParams<T>), NetError> {
    let p = params.views();
    check_data(&p, data)?;
    check_lambda(lambda)?;
    let m = T::lit(data.len() as f64);
    let act = forward_aug(p, data.x_aug.view());
    let j = cross_entropy(&act.output, &data.y) / m + lambda / (T::lit(2.0) * m) * p.penalty();

    let delta_out = &act.output - &data.y;
    let mut grad2 = delta_out.t().dot(&act.hidden_aug) / m;
    let hidden = act.hidden_aug.slice(s![.., 1..]);
    let mut delta_hidden = delta_out.dot(&p.theta2.slice(s![.., 1..]));
    Zip::from(&mut delta_hidden)
        .and(hidden)
        .for_each(|d, &a| *d = *d * a * (T::one() - a));
    let mut grad1 = delta_hidden.t().dot(&data.x_aug) / m;

    let reg = lambda / m;
    grad1
        .slice_mut(s![.., 1..])
        .scaled_add(reg, &p.theta1.slice(s![.., 1..]));
    grad2
        .slice_mut(s![.., 1..])
        .scaled_add(reg, &p.theta2.slice(s![.., 1..]));
    Ok((
        j,
        NetworkParams {
            theta1: grad1,
            theta2: grad2,
        },
    ))
}

pub fn gradient<T: Scalar>(
    params: &NetworkParams<T>,
    data: &Dataset<T>,
    lambda: T,
) -> Result<NetworkParams<T>, NetError> {
    cost_and_gradient(params, data, lambda).map(|(_, g)| g)
}

/// Row-wise argmax; ties go to the lowest index.
pub fn argmax_rows<T: Scalar>(h: &Array2<T>) -> Vec<usize> {
    h.rows()
        .into_iter()
        .map(|row| {
            let mut best = 0;
            for (k, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = k;
                }
            }
            best
        })
        .collect()
}

pub fn predict<T: Scalar>(
    params: &NetworkParams<T>,
    x: ArrayView2<'_, T>,
) -> Result<Vec<usize>, NetError> {
    let (_, h) = forward(params, x)?;
    Ok(argmax_rows(&h))
}

/// Fraction of exact matches.
pub fn accuracy(predicted: &[usize], truth: &[usize]) -> f64 {
    assert_eq!(
        predicted.len(),
        truth.len(),
        "prediction and truth lengths differ"
    );
    if truth.is_empty() {
        return 0.0;
    }
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}

/// Training-set accuracy of `params` on `data`.
pub fn dataset_accuracy<T: Scalar>(
    params: &NetworkParams<T>,
    data: &Dataset<T>,
) -> Result<f64, NetError> {
    let p = params.views();
    check_data(&p, data)?;
    let act = forward_aug(p, data.x_aug.view());
    Ok(accuracy(&argmax_rows(&act.output), &data.labels))
}

/// Every entry, biases included, uniform in `[lo, hi]`.
pub fn init_params<T: Scalar, R: Rng + ?Sized>(
    shape: NetworkShape,
    lo: T,
    hi: T,
    rng: &mut R,
) -> Result<NetworkParams<T>, NetError> {
    shape.validate()?;
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(NetError::InvalidRange {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    let flat: Vec<T> = (0..shape.param_count())
        .map(|_| rng.random_range(lo..=hi))
        .collect();
    NetworkParams::unflatten(&flat, shape)
}

/// Regularized cost over flattened parameters, as an optimizer objective.
pub struct NetPressure<'a, T> {
    data: &'a Dataset<T>,
    shape: NetworkShape,
    lambda: T,
}

impl<'a, T: Scalar> NetPressure<'a, T> {
    pub fn new(data: &'a Dataset<T>, shape: NetworkShape, lambda: T) -> Result<Self, NetError> {
        shape.validate()?;
        check_lambda(lambda)?;
        if shape.input != data.input_size() || shape.output != data.classes() {
            return Err(NetError::ShapeMismatch {
                what: "dataset",
                expected: (shape.input, shape.output),
                actual: (data.input_size(), data.classes()),
            });
        }
        Ok(Self {
            data,
            shape,
            lambda,
        })
    }

    pub fn shape(&self) -> NetworkShape {
        self.shape
    }

    pub fn accuracy(&self, flat: &[T]) -> Result<f64, NetError> {
        let p = ParamViews::from_flat(flat, self.shape)?;
        let act = forward_aug(p, self.data.x_aug.view());
        Ok(accuracy(&argmax_rows(&act.output), &self.data.labels))
    }
}

impl<T: Scalar> PressureFunction<T> for NetPressure<'_, T> {
    fn dimension(&self) -> usize {
        self.shape.param_count()
    }

    fn pressure(&self, position: &[T]) -> Result<T, PressureError> {
        let p = ParamViews::from_flat(position, self.shape)
            .map_err(|e| PressureError(e.to_string()))?;
        cost_views(p, self.data, self.lambda)
            .map(|(j, _)| j)
            .map_err(|e| PressureError(e.to_string()))
    }
}

/// Flattened gradient, matching [`NetworkParams::flatten`] order.
pub fn flat_cost_and_gradient<T: Scalar>(
    flat: &[T],
    shape: NetworkShape,
    data: &Dataset<T>,
    lambda: T,
) -> Result<(T, Vec<T>), NetError> {
    let params = NetworkParams::unflatten(flat, shape)?;
    let (j, g) = cost_and_gradient(&params, data, lambda)?;
    Ok((j, g.flatten()))
}

/// Zeroes the bias column of each matrix.
pub fn without_bias<T: Scalar>(params: &NetworkParams<T>) -> NetworkParams<T> {
    let mut out = params.clone();
    out.theta1.column_mut(0).fill(T::zero());
    out.theta2.column_mut(0).fill(T::zero());
    out
}

/// Sum of squared entries.
pub fn squared_norm<T: Scalar>(params: &NetworkParams<T>) -> T {
    params
        .theta1
        .iter()
        .chain(params.theta2.iter())
        .map(|&v| v * v)
        .sum()
}

#[cfg(test)]
mod tests {
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_data(m: usize, input: usize, classes: usize, seed: u64) -> Dataset<f64> {
        let mut r = rng(seed);
        let x = Array2::from_shape_fn((m, input), |_| r.random_range(0.0..=1.0));
        let labels = (0..m).map(|i| i % classes).collect();
        Dataset::new(x, labels, classes).unwrap()
    }

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0f64), 0.5);
        let s = sigmoid(1000.0f64);
        assert!(s.is_finite() && (s - 1.0).abs() < 1e-12);
        assert!(sigmoid(-1000.0f64) >= 0.0);
        assert!((sigmoid(3.0f64.ln()) - 0.75).abs() < 1e-15);
        assert!(sigmoid(-500.0f32).is_finite() && sigmoid(500.0f32).is_finite());
    }

    #[test]
    fn zero_params_output_half() {
        let shape = NetworkShape::new(4, 3, 5).unwrap();
        let data = random_data(7, 4, 5, 1);
        let (_, h) = forward(&NetworkParams::zeros(shape), data.features()).unwrap();
        assert_eq!(h.dim(), (7, 5));
        assert!(h.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn hand_forward_pass() {
        // 2-2-2 net, one example x = (1, 0.5)
        let params = NetworkParams {
            theta1: array![[0.1, 0.2, -0.3], [-0.2, 0.4, 0.6]],
            theta2: array![[0.3, -0.5, 0.2], [0.0, 0.7, -0.1]],
        };
        let x = array![[1.0, 0.5]];
        // z2 = (0.1 + 0.2 - 0.15, -0.2 + 0.4 + 0.3) = (0.15, 0.5)
        let a1 = [
            1.0 / (1.0 + (-0.15f64).exp()),
            1.0 / (1.0 + (-0.5f64).exp()),
        ];
        let z3 = [0.3 - 0.5 * a1[0] + 0.2 * a1[1], 0.7 * a1[0] - 0.1 * a1[1]];
        let h = [1.0 / (1.0 + (-z3[0]).exp()), 1.0 / (1.0 + (-z3[1]).exp())];
        let (hid, out) = forward(&params, x.view()).unwrap();
        for k in 0..2 {
            assert!((hid[[0, k]] - a1[k]).abs() < 1e-12);
            assert!((out[[0, k]] - h[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn forward_rejects_shape_mismatch() {
        let params = NetworkParams::<f64>::zeros(NetworkShape::new(3, 2, 2).unwrap());
        let x = Array2::<f64>::zeros((4, 5));
        assert!(matches!(
            forward(&params, x.view()),
            Err(NetError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn zero_params_cost_is_k_ln2() {
        let shape = NetworkShape::default();
        let data = random_data(13, 400, 10, 2);
        let j = cost(&NetworkParams::zeros(shape), &data, 0.0).unwrap();
        assert!((j - 10.0 * 2.0f64.ln()).abs() < 1e-9);
    }

    /// Params that map each one-hot input to the same one-hot output with
    /// saturated activations.
    fn perfect_fit(scale: f64) -> (NetworkParams<f64>, Dataset<f64>) {
        let x = Array2::<f64>::eye(3);
        let data = Dataset::new(x, vec![0, 1, 2], 3).unwrap();
        let mut theta1 = Array2::<f64>::zeros((3, 4));
        let mut theta2 = Array2::<f64>::zeros((3, 4));
        for k in 0..3 {
            theta1[[k, 0]] = -scale / 2.0;
            theta1[[k, k + 1]] = scale;
            theta2[[k, 0]] = -scale / 2.0;
            theta2[[k, k + 1]] = scale;
        }
        (NetworkParams { theta1, theta2 }, data)
    }

    #[test]
    fn perfect_fit_cost_and_gradient_vanish() {
        let (params, data) = perfect_fit(200.0);
        assert!(cost(&params, &data, 0.0).unwrap() < 1e-9);
        let g = gradient(&params, &data, 0.0).unwrap();
        assert!(squared_norm(&g).sqrt() <= 1e-6);
    }

    #[test]
    fn saturated_cost_stays_finite() {
        let (mut params, data) = perfect_fit(5000.0);
        params.theta2.mapv_inplace(|v| -v);
        let j = cost(&params, &data, 0.0).unwrap();
        assert!(j.is_finite() && j > 0.0);
    }

    #[test]
    fn regularization_difference() {
        let shape = NetworkShape::default();
        let data = random_data(20, 400, 10, 3);
        let params = init_params(shape, -0.12, 0.12, &mut rng(4)).unwrap();
        let j0 = cost(&params, &data, 0.0).unwrap();
        let j1 = cost(&params, &data, 0.01).unwrap();
        let penalty = squared_norm(&without_bias(&params));
        assert!(j1 >= j0);
        assert!(((j1 - j0) - 0.01 / 40.0 * penalty).abs() < 1e-12);
    }

    #[test]
    fn regularization_gradient_is_linear() {
        let shape = NetworkShape::new(3, 4, 2).unwrap();
        let data = random_data(6, 3, 2, 5);
        let params = init_params(shape, -1.0, 1.0, &mut rng(6)).unwrap();
        let g0 = gradient(&params, &data, 0.0).unwrap();
        let g1 = gradient(&params, &data, 1.0).unwrap();
        let want = without_bias(&params);
        for (d, w) in (&g1.theta1 - &g0.theta1).iter().zip(want.theta1.iter()) {
            assert!((d - w / 6.0).abs() < 1e-12);
        }
        for (d, w) in (&g1.theta2 - &g0.theta2).iter().zip(want.theta2.iter()) {
            assert!((d - w / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn flatten_length_and_errors() {
        let shape = NetworkShape::default();
        assert_eq!(shape.param_count(), 10285);
        let params = init_params(shape, -0.12, 0.12, &mut rng(8)).unwrap();
        let flat = params.flatten();
        assert_eq!(flat.len(), 10285);
        assert_eq!(NetworkParams::unflatten(&flat, shape).unwrap(), params);
        assert_eq!(
            NetworkParams::unflatten(&flat[..10284], shape).unwrap_err(),
            NetError::WrongLength {
                expected: 10285,
                actual: 10284
            }
        );
    }

    #[test]
    fn argmax_and_accuracy() {
        let h = array![[0.1, 0.9, 0.05], [0.3, 0.3, 0.1], [0.0, 0.2, 0.7]];
        assert_eq!(argmax_rows(&h), vec![1, 0, 2]);
        assert_eq!(accuracy(&[1, 0, 2], &[1, 0, 2]), 1.0);
        assert_eq!(accuracy(&[1, 0, 2], &[1, 1, 1]), 1.0 / 3.0);
    }

    #[test]
    fn accuracy_uses_argmax_not_threshold() {
        // all outputs below 0.5 but ordered correctly
        let mut params = NetworkParams::<f64>::zeros(NetworkShape::new(2, 1, 2).unwrap());
        params.theta2 = array![[-2.0, 0.0], [-3.0, 0.0]];
        let x = array![[0.2, 0.3]];
        let (_, h) = forward(&params, x.view()).unwrap();
        assert!(h.iter().all(|&v| v < 0.5));
        assert_eq!(predict(&params, x.view()).unwrap(), vec![0]);
        let mut doubled = params.clone();
        doubled.theta2 *= 2.0;
        let (_, h2) = forward(&doubled, x.view()).unwrap();
        assert_ne!(h, h2);
        assert_eq!(predict(&doubled, x.view()).unwrap(), vec![0]);
    }

    #[test]
    fn init_params_range_and_seed() {
        let shape = NetworkShape::default();
        let a = init_params(shape, -0.12, 0.12, &mut rng(1)).unwrap();
        let b = init_params(shape, -0.12, 0.12, &mut rng(1)).unwrap();
        assert_eq!(a, b);
        assert!(a.flatten().iter().all(|v| (-0.12..=0.12).contains(v)));
        assert!(matches!(
            init_params(shape, 0.1f64, 0.1, &mut rng(1)),
            Err(NetError::InvalidRange { .. })
        ));
    }

    #[test]
    fn pressure_matches_cost() {
        let shape = NetworkShape::new(5, 3, 4).unwrap();
        let data = random_data(9, 5, 4, 7);
        let params = init_params(shape, -0.5, 0.5, &mut rng(9)).unwrap();
        let f = NetPressure::new(&data, shape, 0.01).unwrap();
        assert_eq!(
            f.pressure(&params.flatten()).unwrap(),
            cost(&params, &data, 0.01).unwrap()
        );
        assert_eq!(f.dimension(), shape.param_count());
    }

    #[test]
    fn dataset_validation() {
        let x = array![[0.0, 1.0], [0.5, 0.5]];
        assert!(matches!(
            Dataset::new(x.clone(), vec![0, 3], 3),
            Err(NetError::LabelOutOfRange { index: 1, .. })
        ));
        assert!(matches!(
            Dataset::new(x.clone(), vec![0], 3),
            Err(NetError::LabelCount { .. })
        ));
        let bad = array![[0.0, 1.5]];
        assert!(matches!(
            Dataset::new(bad, vec![0], 3),
            Err(NetError::FeatureOutOfRange { .. })
        ));
        let d = Dataset::new(x, vec![2, 0], 3).unwrap();
        assert_eq!(d.targets(), &array![[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]);
    }

    #[test]
    fn works_in_f32() {
        let shape = NetworkShape::new(4, 3, 2).unwrap();
        let x = Array2::<f32>::from_elem((3, 4), 0.25);
        let data = Dataset::new(x, vec![0, 1, 0], 2).unwrap();
        let j = cost(&NetworkParams::zeros(shape), &data, 0.0f32).unwrap();
        assert!((j - 2.0 * 2.0f32.ln()).abs() < 1e-6);
    }
}
