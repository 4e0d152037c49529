//! Runtime numerical validation: gradient checks and simulator self-tests.
//!
//! These wrap the independent verification routines (dense-unitary
//! evolution, central finite differences) into reports the command-line
//! frontend can print and turn into exit codes. The tolerances here are
//! the project's acceptance thresholds; they are constants on purpose so
//! every caller checks against the same bar.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use rand::Rng;

use super::HarnessError;
use crate::qsim::{self, oracle};
use crate::seeds::{stream_rng, STREAM_CHECK};
use crate::templates::{build_template, list_templates, ChannelMode, TemplateKind};

/// Relative-error bound for analytic vs finite-difference gradients.
pub const GRAD_REL_TOL: f64 = 1e-4;
/// Denominator floor below which differences are measured absolutely.
pub const GRAD_ABS_FLOOR: f64 = 1e-6;
/// Central-difference step.
pub const FD_STEP: f64 = 1e-4;
/// Max amplitude difference allowed between fast and dense evolution.
pub const ORACLE_TOL: f64 = 1e-10;
/// Circuit count for the oracle-equivalence suite.
pub const ORACLE_CIRCUITS: usize = 200;
/// Largest random circuit the dense oracle is asked to check.
pub const ORACLE_MAX_QUBITS: usize = 5;
/// Deepest random circuit in the oracle suite.
pub const ORACLE_MAX_DEPTH: usize = 20;

/// Outcome of one template's gradient check.
#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub template: String,
    pub trials: usize,
    pub max_rel_error: f64,
    /// Parameter slot where the worst error occurred.
    pub worst_slot: usize,
    pub passed: bool,
}

impl fmt::Display for GradCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} over {} trials, max relative error {:.3e} (slot {})",
            if self.passed { "PASS" } else { "FAIL" },
            self.template,
            self.trials,
            self.max_rel_error,
            self.worst_slot
        )
    }
}

/// Compares analytic gradients against central finite differences for
/// one template over `trials` random draws (angles uniform in [0, 2pi),
/// encodings uniform in [-pi, pi)).
pub fn gradient_check(
    kind: TemplateKind,
    mode: ChannelMode,
    trials: usize,
    seed: u64,
) -> Result<GradCheckReport, HarnessError> {
    let template = build_template(kind, mode);
    let mut rng = stream_rng(seed, STREAM_CHECK);
    let mut max_rel_error = 0.0f64;
    let mut worst_slot = 0;
    for _ in 0..trials {
        let trainable: Vec<f64> = (0..template.n_trainable())
            .map(|_| rng.gen_range(0.0..2.0 * PI))
            .collect();
        let encodings: Vec<f64> = (0..template.n_encoding())
            .map(|_| rng.gen_range(-PI..PI))
            .collect();
        let wire = template.readout_wire();
        let analytic = qsim::gradient(&template, &trainable, &encodings, wire)?;
        let fd = oracle::fd_gradient(&template, &trainable, &encodings, wire, FD_STEP)?;
        for (slot, (&a, &f)) in analytic.iter().zip(&fd).enumerate() {
            let rel = (a - f).abs() / a.abs().max(f.abs()).max(GRAD_ABS_FLOOR);
            if rel > max_rel_error {
                max_rel_error = rel;
                worst_slot = slot;
            }
        }
    }
    Ok(GradCheckReport {
        template: format!("{}/{}", kind, mode),
        trials,
        max_rel_error,
        worst_slot,
        passed: max_rel_error < GRAD_REL_TOL,
    })
}

/// Outcome of the oracle-equivalence suite.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub circuits: usize,
    pub max_amplitude_diff: f64,
    pub elapsed_seconds: f64,
    pub passed: bool,
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} random circuits, max amplitude difference {:.3e} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.circuits,
            self.max_amplitude_diff,
            self.elapsed_seconds
        )
    }
}

/// Runs `circuits` random circuits through both the fast statevector
/// path and the dense-unitary oracle and reports the worst amplitude
/// disagreement. Circuit sizes are uniform in 1..=[`ORACLE_MAX_QUBITS`],
/// depths uniform in 1..=[`ORACLE_MAX_DEPTH`].
pub fn oracle_equivalence(circuits: usize, seed: u64) -> Result<OracleReport, HarnessError> {
    let started = Instant::now();
    let mut rng = stream_rng(seed, STREAM_CHECK);
    let mut max_amplitude_diff = 0.0f64;
    for _ in 0..circuits {
        let n = rng.gen_range(1..=ORACLE_MAX_QUBITS);
        let depth = rng.gen_range(1..=ORACLE_MAX_DEPTH);
        let template = oracle::random_circuit(&mut rng, n, depth);
        let fast = qsim::run_circuit(&template, &[], &[])?;
        let dense = oracle::dense_run(&template, &[], &[])?;
        for (a, b) in fast.amplitudes().iter().zip(&dense) {
            max_amplitude_diff = max_amplitude_diff.max((a - b).norm());
        }
    }
    Ok(OracleReport {
        circuits,
        max_amplitude_diff,
        elapsed_seconds: started.elapsed().as_secs_f64(),
        passed: max_amplitude_diff < ORACLE_TOL,
    })
}

/// Combined self-test: oracle equivalence plus a gradient check of every
/// registered template.
#[derive(Debug, Clone)]
pub struct SelfTestReport {
    pub oracle: OracleReport,
    pub gradients: Vec<GradCheckReport>,
    pub passed: bool,
}

impl fmt::Display for SelfTestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "oracle equivalence    {}", self.oracle)?;
        for g in &self.gradients {
            writeln!(f, "gradients             {g}")?;
        }
        write!(f, "self-test             {}", if self.passed { "PASS" } else { "FAIL" })
    }
}

/// Runs the full self-test with `grad_trials` draws per template.
pub fn self_test(grad_trials: usize, seed: u64) -> Result<SelfTestReport, HarnessError> {
    let oracle = oracle_equivalence(ORACLE_CIRCUITS, seed)?;
    let mut gradients = Vec::new();
    for (kind, mode) in list_templates() {
        gradients.push(gradient_check(kind, mode, grad_trials, seed)?);
    }
    let passed = oracle.passed && gradients.iter().all(|g| g.passed);
    Ok(SelfTestReport {
        oracle,
        gradients,
        passed,
    })
}
