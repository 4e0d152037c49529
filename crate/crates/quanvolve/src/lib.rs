//! Hybrid quantum-classical convolutional networks over color-space images.
//!
//! The crate trains small image classifiers whose first layer is a
//! *quanvolution*: a parameterized quantum circuit slid across the image like
//! a convolution kernel, producing one Pauli-Z expectation value per window.
//! The feature map feeds a dense classical head trained jointly with the
//! circuit parameters.
//!
//! Modules, bottom up:
//!
//! - [`qsim`]: dense statevector simulator (1..=8 qubits) with exact
//!   reverse-pass gradients for every circuit parameter.
//! - [`templates`]: registry of filter circuit layouts (`U1`/`U2` ancilla
//!   filters and the `C13`/`C14`/`C18`/`C19` ring filters), each in a
//!   single-channel and a three-channel "overwrite" variant.
//! - [`qconv`]: slides a template over an angle-encoded image and
//!   backpropagates through every window.
//! - [`nn`]: the classical head: dense layers, randomized leaky ReLU,
//!   softmax cross-entropy, and Adam.
//! - [`colorspace`]: sRGB to CIELAB / YCbCr conversion, bilinear resize,
//!   and the angle encoding that maps channels into rotation angles.
//! - [`data`]: CIFAR-10 binary ingestion, deterministic subset splits, and
//!   a preprocessed-tensor cache format.
//! - [`harness`]: experiment configuration, training loop, grid sweeps,
//!   gradient checking, and the self-test suite behind the CLI.
//!
//! Determinism is a design requirement: every random draw flows from one
//! configured seed through named substreams, and all parallel reductions are
//! ordered, so repeated runs produce byte-identical metrics files.

pub mod colorspace;
pub mod data;
pub mod harness;
pub mod nn;
pub mod qconv;
pub mod qsim;
pub mod seeds;
pub mod templates;

pub use harness::ExperimentConfig;
pub use num_complex::Complex64;
pub use qsim::{CircuitTemplate, GateKind, GateOp, ParamSource, SimError, StateVector};
pub use templates::{ChannelMode, TemplateKind};
