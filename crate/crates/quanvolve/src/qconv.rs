//! Quantum convolution: slides a 2×2 window over an angle-encoded image,
//! evaluating the filter circuit once per window.
//!
//! Forward produces a [`FeatureMap`] of readout-wire ⟨Z⟩ values; backward
//! chains an upstream feature-map gradient into the circuit's trainable
//! parameters via the simulator's reverse-pass gradient, summing window
//! contributions in row-major order. Windows are independent pure-function
//! evaluations writing disjoint cells, so any evaluation order gives
//! bit-identical results; batch-level parallelism lives in the harness.

use std::f64::consts::PI;

use ndarray::Array2;

use crate::colorspace::{ColorSpace, ImageTensor};
use crate::qsim::{self, CircuitTemplate, SimError};

/// Kernel edge length; windows are always 2×2.
pub const KERNEL: usize = 2;

#[derive(Debug, thiserror::Error)]
pub enum QconvError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("image must be in angle space, got {0}")]
    NotAngles(ColorSpace),
    #[error("template consumes {expected} channels, image has {got}")]
    ChannelMismatch { expected: usize, got: usize },
    #[error("image {height}×{width} too small for a {KERNEL}×{KERNEL} window")]
    ImageTooSmall { height: usize, width: usize },
    #[error("stride must be at least 1")]
    ZeroStride,
    #[error("angle {value} at ({y}, {x}, {channel}) outside [−π, π]")]
    AngleOutOfRange {
        value: f64,
        y: usize,
        x: usize,
        channel: usize,
    },
    #[error("upstream gradient {got_h}×{got_w} does not match feature map {want_h}×{want_w}")]
    UpstreamShapeMismatch {
        got_h: usize,
        got_w: usize,
        want_h: usize,
        want_w: usize,
    },
}

/// Single-channel map of circuit readouts; every value is a ⟨Z⟩ in [−1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    values: Array2<f64>,
}

impl FeatureMap {
    pub fn height(&self) -> usize {
        self.values.nrows()
    }

    pub fn width(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    /// Row-major flattened copy, the layout the dense head consumes.
    pub fn flatten(&self) -> Vec<f64> {
        self.values.iter().copied().collect()
    }
}

struct Layout {
    channels: usize,
    out_h: usize,
    out_w: usize,
}

fn check_layout(
    image: &ImageTensor,
    template: &CircuitTemplate,
    stride: usize,
) -> Result<Layout, QconvError> {
    if image.space() != ColorSpace::Angles {
        return Err(QconvError::NotAngles(image.space()));
    }
    if stride == 0 {
        return Err(QconvError::ZeroStride);
    }
    let expected = template.n_encoding() / (KERNEL * KERNEL);
    if image.channels() != expected {
        return Err(QconvError::ChannelMismatch {
            expected,
            got: image.channels(),
        });
    }
    let (h, w) = (image.height(), image.width());
    if h < KERNEL || w < KERNEL {
        return Err(QconvError::ImageTooSmall {
            height: h,
            width: w,
        });
    }
    for ((y, x, c), &v) in image.values().indexed_iter() {
        if !(-PI - 1e-9..=PI + 1e-9).contains(&v) {
            return Err(QconvError::AngleOutOfRange {
                value: v,
                y,
                x,
                channel: c,
            });
        }
    }
    Ok(Layout {
        channels: expected,
        out_h: (h - KERNEL) / stride + 1,
        out_w: (w - KERNEL) / stride + 1,
    })
}

/// Window pixels in encoding-slot order: channel-major, then row-major
/// within the window (TL, TR, BL, BR).
fn window_encodings(
    image: &ImageTensor,
    channels: usize,
    y0: usize,
    x0: usize,
    out: &mut Vec<f64>,
) {
    out.clear();
    for c in 0..channels {
        for dy in 0..KERNEL {
            for dx in 0..KERNEL {
                out.push(image.get(y0 + dy, x0 + dx, c));
            }
        }
    }
}

/// Evaluates the filter circuit on every window.
pub fn forward(
    image: &ImageTensor,
    template: &CircuitTemplate,
    params: &[f64],
    stride: usize,
) -> Result<FeatureMap, QconvError> {
    let layout = check_layout(image, template, stride)?;
    let mut values = Array2::zeros((layout.out_h, layout.out_w));
    let mut enc = Vec::with_capacity(template.n_encoding());
    for i in 0..layout.out_h {
        for j in 0..layout.out_w {
            window_encodings(image, layout.channels, i * stride, j * stride, &mut enc);
            let state = qsim::run_circuit(template, params, &enc)?;
            values[[i, j]] = state.expectation_z(template.readout_wire())?;
        }
    }
    Ok(FeatureMap { values })
}

/// Chain rule over windows: `Σ_{ij} upstream[i][j] · ∂⟨Z⟩_{ij}/∂params`.
pub fn backward(
    image: &ImageTensor,
    template: &CircuitTemplate,
    params: &[f64],
    upstream: &Array2<f64>,
    stride: usize,
) -> Result<Vec<f64>, QconvError> {
    let layout = check_layout(image, template, stride)?;
    if upstream.nrows() != layout.out_h || upstream.ncols() != layout.out_w {
        return Err(QconvError::UpstreamShapeMismatch {
            got_h: upstream.nrows(),
            got_w: upstream.ncols(),
            want_h: layout.out_h,
            want_w: layout.out_w,
        });
    }
    let mut acc = vec![0.0; template.n_trainable()];
    let mut enc = Vec::with_capacity(template.n_encoding());
    for i in 0..layout.out_h {
        for j in 0..layout.out_w {
            let u = upstream[[i, j]];
            if u == 0.0 {
                continue;
            }
            window_encodings(image, layout.channels, i * stride, j * stride, &mut enc);
            let g = qsim::gradient(template, params, &enc, template.readout_wire())?;
            for (a, gi) in acc.iter_mut().zip(&g) {
                *a += u * gi;
            }
        }
    }
    Ok(acc)
}
