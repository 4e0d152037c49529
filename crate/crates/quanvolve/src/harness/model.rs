//! The hybrid model: quantum convolution feeding a small dense head.
//!
//! Forward path per image: quantum convolution over 2x2 windows produces
//! a feature map of readout expectations, which is flattened and passed
//! through dense -> randomized-leaky-ReLU -> dense -> softmax/cross-
//! entropy. All trainable parameters, quantum angles and dense weights
//! alike, live in one flat vector so a single Adam state updates them
//! together.
//!
//! Flat layout: `[circuit angles | dense1 weights row-major | dense1
//! bias | dense2 weights | dense2 bias]`. Initialisation draws in that
//! same order, which is part of the reproducibility contract.

use std::f64::consts::PI;

use ndarray::Array2;
use rand::Rng;

use super::HarnessError;
use crate::colorspace::ImageTensor;
use crate::nn::{
    eval_slopes, rrelu_backward, rrelu_forward, softmax, softmax_xent, DenseLayer,
};
use crate::qconv;
use crate::qsim::CircuitTemplate;

/// Number of output classes; the head always ends in a 2-way softmax.
pub const N_CLASSES: usize = 2;

/// Everything computed during one training-mode forward pass, kept for
/// the backward pass.
#[derive(Debug, Clone)]
pub struct Forward {
    /// Flattened feature map (row-major window readouts).
    pub features: Vec<f64>,
    /// Hidden pre-activations.
    pub pre_hidden: Vec<f64>,
    /// Hidden activations after the leaky rectifier.
    pub hidden: Vec<f64>,
    /// Class logits.
    pub logits: Vec<f64>,
}

/// Per-sample training result: loss, hit, and the full flat gradient.
#[derive(Debug, Clone)]
pub struct SampleGrad {
    pub loss: f64,
    pub correct: bool,
    pub grad: Vec<f64>,
}

/// Quantum convolution plus dense head with a flat parameter vector.
///
/// The model itself is immutable during a batch; [`HybridModel::
/// load_params`] installs the current flat vector, after which forward
/// and backward methods take `&self` and can run on many images in
/// parallel.
#[derive(Debug, Clone)]
pub struct HybridModel {
    template: CircuitTemplate,
    stride: usize,
    out_h: usize,
    out_w: usize,
    qparams: Vec<f64>,
    dense1: DenseLayer,
    dense2: DenseLayer,
}

impl HybridModel {
    /// Builds the model for `in_h` x `in_w` inputs.
    pub fn new(
        template: CircuitTemplate,
        stride: usize,
        in_h: usize,
        in_w: usize,
        hidden_width: usize,
    ) -> Result<Self, HarnessError> {
        let k = qconv::KERNEL;
        if in_h < k || in_w < k {
            return Err(HarnessError::InputTooSmall { in_h, in_w });
        }
        let out_h = (in_h - k) / stride + 1;
        let out_w = (in_w - k) / stride + 1;
        let n_features = out_h * out_w;
        let dense1 = DenseLayer::new(
            Array2::zeros((hidden_width, n_features)),
            ndarray::Array1::zeros(hidden_width),
        )?;
        let dense2 = DenseLayer::new(
            Array2::zeros((N_CLASSES, hidden_width)),
            ndarray::Array1::zeros(N_CLASSES),
        )?;
        Ok(HybridModel {
            qparams: vec![0.0; template.n_trainable()],
            template,
            stride,
            out_h,
            out_w,
            dense1,
            dense2,
        })
    }

    pub fn template(&self) -> &CircuitTemplate {
        &self.template
    }

    /// Feature map height and width.
    pub fn feature_dims(&self) -> (usize, usize) {
        (self.out_h, self.out_w)
    }

    /// Flattened feature length, which is also the number of circuit
    /// evaluations per image forward pass (one per window).
    pub fn feature_len(&self) -> usize {
        self.out_h * self.out_w
    }

    pub fn hidden_width(&self) -> usize {
        self.dense1.n_out()
    }

    /// Total trainable parameter count across circuit and head.
    pub fn n_params(&self) -> usize {
        self.qparams.len() + self.dense1.n_params() + self.dense2.n_params()
    }

    /// Draws a fresh flat parameter vector: circuit angles uniform in
    /// [0, 2pi), then each dense layer's weights (row-major) and bias
    /// with the +/- 1/sqrt(fan_in) rule.
    pub fn init_params(&self, rng: &mut impl Rng) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.n_params());
        for _ in 0..self.qparams.len() {
            flat.push(rng.gen_range(0.0..2.0 * PI));
        }
        for layer in [&self.dense1, &self.dense2] {
            let drawn = DenseLayer::init(rng, layer.n_out(), layer.n_in());
            let at = flat.len();
            flat.resize(at + drawn.n_params(), 0.0);
            drawn
                .write_params(&mut flat[at..])
                .expect("freshly sized slice matches the layer");
        }
        flat
    }

    /// Installs a flat parameter vector into the model.
    pub fn load_params(&mut self, flat: &[f64]) -> Result<(), HarnessError> {
        let (nq, n1) = (self.qparams.len(), self.dense1.n_params());
        let expected = self.n_params();
        if flat.len() != expected {
            return Err(HarnessError::Nn(crate::nn::NnError::ShapeMismatch {
                context: "model flat params",
                expected,
                got: flat.len(),
            }));
        }
        self.qparams.copy_from_slice(&flat[..nq]);
        self.dense1.read_params(&flat[nq..nq + n1])?;
        self.dense2.read_params(&flat[nq + n1..])?;
        Ok(())
    }

    /// Forward pass with explicit activation slopes (training mode when
    /// sampled, evaluation mode via [`eval_slopes`]).
    pub fn forward(&self, image: &ImageTensor, slopes: &[f64]) -> Result<Forward, HarnessError> {
        let map = qconv::forward(image, &self.template, &self.qparams, self.stride)?;
        let features = map.flatten();
        let pre_hidden = self.dense1.forward(&features)?;
        let hidden = rrelu_forward(&pre_hidden, slopes)?;
        let logits = self.dense2.forward(&hidden)?;
        Ok(Forward {
            features,
            pre_hidden,
            hidden,
            logits,
        })
    }

    /// Loss, hit, and flat gradient for one labeled image.
    pub fn loss_grad(
        &self,
        image: &ImageTensor,
        label: usize,
        slopes: &[f64],
    ) -> Result<SampleGrad, HarnessError> {
        let fwd = self.forward(image, slopes)?;
        let (loss, dlogits) = softmax_xent(&fwd.logits, label)?;
        let correct = argmax(&fwd.logits) == label;

        let g2 = self.dense2.backward(&fwd.hidden, &dlogits)?;
        let dpre = rrelu_backward(&fwd.pre_hidden, slopes, &g2.dx)?;
        let g1 = self.dense1.backward(&fwd.features, &dpre)?;
        let upstream = Array2::from_shape_vec((self.out_h, self.out_w), g1.dx.clone())
            .expect("dense input length equals the feature map size");
        let dq = qconv::backward(image, &self.template, &self.qparams, &upstream, self.stride)?;

        let mut grad = Vec::with_capacity(self.n_params());
        grad.extend_from_slice(&dq);
        grad.extend(g1.dw.iter());
        grad.extend(g1.db.iter());
        grad.extend(g2.dw.iter());
        grad.extend(g2.db.iter());
        Ok(SampleGrad {
            loss,
            correct,
            grad,
        })
    }

    /// Evaluation-mode loss and hit (fixed midpoint slopes).
    pub fn eval_one(&self, image: &ImageTensor, label: usize) -> Result<(f64, bool), HarnessError> {
        let slopes = eval_slopes(self.hidden_width());
        let fwd = self.forward(image, &slopes)?;
        let (loss, _) = softmax_xent(&fwd.logits, label)?;
        Ok((loss, argmax(&fwd.logits) == label))
    }

    /// Evaluation-mode class probabilities.
    pub fn predict(&self, image: &ImageTensor) -> Result<Vec<f64>, HarnessError> {
        let slopes = eval_slopes(self.hidden_width());
        let fwd = self.forward(image, &slopes)?;
        Ok(softmax(&fwd.logits))
    }
}

/// Index of the largest logit, first winner on ties.
fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorspace::ColorSpace;
    use crate::nn::sample_slopes;
    use crate::seeds::{stream_rng, STREAM_INIT};
    use crate::templates::{build_template, ChannelMode, TemplateKind};
    use ndarray::Array3;

    fn toy_image(h: usize, w: usize, seed: u64) -> ImageTensor {
        let mut rng = stream_rng(seed, 77);
        ImageTensor::new(
            ColorSpace::Angles,
            Array3::from_shape_fn((h, w, 1), |_| rng.gen_range(-PI..PI)),
        )
    }

    fn toy_model(h: usize, w: usize, hidden: usize) -> (HybridModel, Vec<f64>) {
        let template = build_template(TemplateKind::C14, ChannelMode::Single);
        let mut model = HybridModel::new(template, 1, h, w, hidden).unwrap();
        let params = model.init_params(&mut stream_rng(3, STREAM_INIT));
        model.load_params(&params).unwrap();
        (model, params)
    }

    #[test]
    fn parameter_count_adds_up() {
        let (model, params) = toy_model(4, 4, 5);
        // 3x3 windows -> 9 features; C14 single has 16 angles.
        assert_eq!(model.feature_dims(), (3, 3));
        assert_eq!(model.n_params(), 16 + (5 * 9 + 5) + (2 * 5 + 2));
        assert_eq!(params.len(), model.n_params());
    }

    #[test]
    fn default_geometry_gives_81_windows() {
        let template = build_template(TemplateKind::U1Crx, ChannelMode::Single);
        let model = HybridModel::new(template, 1, 10, 10, 32).unwrap();
        assert_eq!(model.feature_dims(), (9, 9));
        assert_eq!(model.feature_len(), 81);
    }

    #[test]
    fn init_is_deterministic_and_in_range() {
        let (model, _) = toy_model(4, 4, 5);
        let a = model.init_params(&mut stream_rng(9, STREAM_INIT));
        let b = model.init_params(&mut stream_rng(9, STREAM_INIT));
        assert_eq!(a, b);
        for &q in &a[..16] {
            assert!((0.0..2.0 * PI).contains(&q));
        }
        let bound1 = 1.0 / (9.0f64).sqrt();
        for &w in &a[16..16 + 50] {
            assert!(w.abs() <= bound1);
        }
    }

    #[test]
    fn rejects_inputs_smaller_than_a_window() {
        let template = build_template(TemplateKind::C13, ChannelMode::Single);
        assert!(matches!(
            HybridModel::new(template, 1, 1, 4, 8),
            Err(HarnessError::InputTooSmall { .. })
        ));
    }

    #[test]
    fn load_params_rejects_wrong_length() {
        let (mut model, params) = toy_model(4, 4, 5);
        assert!(model.load_params(&params[..params.len() - 1]).is_err());
    }

    #[test]
    fn loss_decreases_along_negative_gradient() {
        let (mut model, mut params) = toy_model(4, 4, 5);
        let image = toy_image(4, 4, 1);
        let slopes = eval_slopes(5);
        let before = model.loss_grad(&image, 1, &slopes).unwrap();
        for (p, g) in params.iter_mut().zip(&before.grad) {
            *p -= 1e-3 * g;
        }
        model.load_params(&params).unwrap();
        let after = model.loss_grad(&image, 1, &slopes).unwrap();
        assert!(after.loss < before.loss);
    }

    #[test]
    fn full_gradient_matches_finite_differences() {
        let (mut model, params) = toy_model(4, 4, 4);
        let image = toy_image(4, 4, 2);
        let slopes = sample_slopes(&mut stream_rng(5, 99), 4);
        let label = 0;
        let analytic = model.loss_grad(&image, label, &slopes).unwrap();

        let h = 1e-5;
        for i in 0..params.len() {
            let mut bumped = params.clone();
            bumped[i] += h;
            model.load_params(&bumped).unwrap();
            let up = model.loss_grad(&image, label, &slopes).unwrap().loss;
            bumped[i] -= 2.0 * h;
            model.load_params(&bumped).unwrap();
            let down = model.loss_grad(&image, label, &slopes).unwrap().loss;
            let fd = (up - down) / (2.0 * h);
            let denom = analytic.grad[i].abs().max(fd.abs()).max(1e-6);
            assert!(
                (analytic.grad[i] - fd).abs() / denom < 1e-3,
                "param {i}: analytic {} vs fd {fd}",
                analytic.grad[i]
            );
        }
    }

    #[test]
    fn eval_probabilities_are_a_distribution() {
        let (model, _) = toy_model(4, 4, 5);
        let probs = model.predict(&toy_image(4, 4, 3)).unwrap();
        assert_eq!(probs.len(), N_CLASSES);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(probs.iter().all(|&p| p > 0.0));
    }
}
