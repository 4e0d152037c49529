//! Classical head: dense layers, randomized leaky ReLU, softmax
//! cross-entropy, and Adam.
//!
//! Everything operates on `f64` slices with explicit shape checks; there is
//! no autograd. Backward functions take exactly what forward consumed plus
//! the upstream gradient, and return exact analytic gradients.
//!
//! Determinism contract: [`DenseLayer::init`] draws weights row-major then
//! biases, and [`sample_slopes`] draws one slope per element regardless of
//! the element's sign, so RNG consumption depends only on shapes, never on
//! values.

use ndarray::{Array1, Array2};
use rand::Rng;

#[derive(Debug, thiserror::Error)]
pub enum NnError {
    #[error("{context}: expected length {expected}, got {got}")]
    ShapeMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("label {label} out of range for {classes} classes")]
    BadLabel { label: usize, classes: usize },
}

/// Fully connected affine layer, `y = W·x + b`, weights stored out×in.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    weights: Array2<f64>,
    bias: Array1<f64>,
}

/// Gradients from one dense backward pass.
#[derive(Debug, Clone)]
pub struct DenseGrads {
    pub dw: Array2<f64>,
    pub db: Array1<f64>,
    pub dx: Vec<f64>,
}

impl DenseLayer {
    pub fn new(weights: Array2<f64>, bias: Array1<f64>) -> Result<Self, NnError> {
        if weights.nrows() != bias.len() {
            return Err(NnError::ShapeMismatch {
                context: "dense bias",
                expected: weights.nrows(),
                got: bias.len(),
            });
        }
        Ok(Self { weights, bias })
    }

    /// Uniform init in ±1/√fan_in for both weights and biases; weights are
    /// drawn row-major first, then biases.
    pub fn init(rng: &mut impl Rng, out_dim: usize, in_dim: usize) -> Self {
        let bound = 1.0 / (in_dim as f64).sqrt();
        let weights =
            Array2::from_shape_fn((out_dim, in_dim), |_| rng.gen_range(-bound..bound));
        let bias = Array1::from_shape_fn(out_dim, |_| rng.gen_range(-bound..bound));
        Self { weights, bias }
    }

    pub fn n_in(&self) -> usize {
        self.weights.ncols()
    }

    pub fn n_out(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn bias(&self) -> &Array1<f64> {
        &self.bias
    }

    /// Total parameter count (weights then bias, the flat packing order).
    pub fn n_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    /// Serializes parameters into `out` (row-major weights, then bias).
    pub fn write_params(&self, out: &mut [f64]) -> Result<(), NnError> {
        self.check_flat(out.len())?;
        let nw = self.weights.len();
        for (dst, src) in out[..nw].iter_mut().zip(self.weights.iter()) {
            *dst = *src;
        }
        for (dst, src) in out[nw..].iter_mut().zip(self.bias.iter()) {
            *dst = *src;
        }
        Ok(())
    }

    /// Loads parameters from a flat slice (inverse of [`Self::write_params`]).
    pub fn read_params(&mut self, src: &[f64]) -> Result<(), NnError> {
        self.check_flat(src.len())?;
        let nw = self.weights.len();
        for (dst, s) in self.weights.iter_mut().zip(&src[..nw]) {
            *dst = *s;
        }
        for (dst, s) in self.bias.iter_mut().zip(&src[nw..]) {
            *dst = *s;
        }
        Ok(())
    }

    fn check_flat(&self, len: usize) -> Result<(), NnError> {
        if len != self.n_params() {
            return Err(NnError::ShapeMismatch {
                context: "dense flat params",
                expected: self.n_params(),
                got: len,
            });
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, NnError> {
        if x.len() != self.n_in() {
            return Err(NnError::ShapeMismatch {
                context: "dense input",
                expected: self.n_in(),
                got: x.len(),
            });
        }
        let mut y = self.bias.to_vec();
        for (o, yo) in y.iter_mut().enumerate() {
            let row = self.weights.row(o);
            *yo += row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>();
        }
        Ok(y)
    }

    /// Gradients of a scalar loss given `dy = ∂L/∂y`:
    /// `dW = dy·xᵀ`, `db = dy`, `dx = Wᵀ·dy`.
    pub fn backward(&self, x: &[f64], dy: &[f64]) -> Result<DenseGrads, NnError> {
        if x.len() != self.n_in() {
            return Err(NnError::ShapeMismatch {
                context: "dense input",
                expected: self.n_in(),
                got: x.len(),
            });
        }
        if dy.len() != self.n_out() {
            return Err(NnError::ShapeMismatch {
                context: "dense upstream",
                expected: self.n_out(),
                got: dy.len(),
            });
        }
        let dw = Array2::from_shape_fn((self.n_out(), self.n_in()), |(o, i)| dy[o] * x[i]);
        let db = Array1::from_vec(dy.to_vec());
        let mut dx = vec![0.0; self.n_in()];
        for (o, dyo) in dy.iter().enumerate() {
            for (i, dxi) in dx.iter_mut().enumerate() {
                *dxi += self.weights[[o, i]] * dyo;
            }
        }
        Ok(DenseGrads { dw, db, dx })
    }
}

/// RReLU negative-slope bounds, per the cited defaults.
pub const RRELU_LO: f64 = 1.0 / 8.0;
pub const RRELU_HI: f64 = 1.0 / 3.0;

/// Evaluation-mode slope: the midpoint of the training bounds.
pub const RRELU_EVAL_SLOPE: f64 = (RRELU_LO + RRELU_HI) / 2.0;

/// Draws one training slope per element from U[1/8, 1/3].
///
/// Slopes are drawn for every element, positive or negative, so RNG
/// consumption is a pure function of the length.
pub fn sample_slopes(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(RRELU_LO..RRELU_HI)).collect()
}

/// Constant eval-mode slopes.
pub fn eval_slopes(n: usize) -> Vec<f64> {
    vec![RRELU_EVAL_SLOPE; n]
}

/// Elementwise `x ≥ 0 → x`, else `slope·x`.
pub fn rrelu_forward(x: &[f64], slopes: &[f64]) -> Result<Vec<f64>, NnError> {
    check_len("rrelu slopes", x.len(), slopes.len())?;
    Ok(x.iter()
        .zip(slopes)
        .map(|(&v, &a)| if v >= 0.0 { v } else { a * v })
        .collect())
}

/// Backward through [`rrelu_forward`] with the same slopes.
pub fn rrelu_backward(x: &[f64], slopes: &[f64], dy: &[f64]) -> Result<Vec<f64>, NnError> {
    check_len("rrelu slopes", x.len(), slopes.len())?;
    check_len("rrelu upstream", x.len(), dy.len())?;
    Ok(x.iter()
        .zip(slopes)
        .zip(dy)
        .map(|((&v, &a), &d)| if v >= 0.0 { d } else { a * d })
        .collect())
}

fn check_len(context: &'static str, expected: usize, got: usize) -> Result<(), NnError> {
    if expected != got {
        return Err(NnError::ShapeMismatch {
            context,
            expected,
            got,
        });
    }
    Ok(())
}

/// Numerically stable softmax probabilities.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Cross-entropy of softmax(logits) against a class label.
/// Returns the loss and `∂loss/∂logits = softmax(logits) − onehot(label)`.
pub fn softmax_xent(logits: &[f64], label: usize) -> Result<(f64, Vec<f64>), NnError> {
    if label >= logits.len() {
        return Err(NnError::BadLabel {
            label,
            classes: logits.len(),
        });
    }
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = logits.iter().map(|l| l - m).collect();
    let lse = shifted.iter().map(|z| z.exp()).sum::<f64>().ln();
    let loss = lse - shifted[label];
    let mut dlogits: Vec<f64> = shifted.iter().map(|z| (z - lse).exp()).collect();
    dlogits[label] -= 1.0;
    Ok((loss, dlogits))
}

/// Adam with bias correction; defaults `β₁ = 0.9`, `β₂ = 0.999`,
/// `ε = 1e-8` added outside the square root.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    step: u64,
    lr: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
}

impl AdamState {
    pub fn new(n_params: usize, lr: f64) -> Self {
        Self::with_hyperparams(n_params, lr, 0.9, 0.999, 1e-8)
    }

    pub fn with_hyperparams(n_params: usize, lr: f64, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Self {
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            step: 0,
            lr,
            beta1,
            beta2,
            epsilon,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One in-place update of `params` from `grads`.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<(), NnError> {
        check_len("adam params", self.m.len(), params.len())?;
        check_len("adam grads", self.m.len(), grads.len())?;
        self.step += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let mhat = self.m[i] / bc1;
            let vhat = self.v[i] / bc2;
            params[i] -= self.lr * mhat / (vhat.sqrt() + self.epsilon);
        }
        Ok(())
    }
}
