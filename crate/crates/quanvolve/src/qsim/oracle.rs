//! Slow reference implementations used to validate the fast simulator.
//!
//! Everything here recomputes results through an independent route:
//! [`dense_unitary`] assembles the full `2^n × 2^n` circuit matrix by index
//! agreement and multiplies it out with `ndarray`, never touching the
//! bit-pair kernels; [`fd_gradient`] differentiates the readout numerically;
//! [`shift_rule_gradient`] evaluates the exact two-term shift rule for
//! single-qubit rotations and the four-term rule for controlled rotations.
//! Only tests and the diagnostic commands (`selftest`, `gradcheck`) may
//! call into this module; the training path never does.

use ndarray::Array2;
use num_complex::Complex64;

use super::circuit::CircuitTemplate;
use super::exec::run_circuit;
use super::gate::{target_block, GateOp, ParamSource};
use super::SimError;

/// Qubit bound for dense matrix assembly (`2^5 = 32`-dim matrices).
pub const MAX_ORACLE_QUBITS: usize = 5;

/// Full circuit unitary `U = U_L · … · U_1` as a dense matrix.
pub fn dense_unitary(
    template: &CircuitTemplate,
    trainable: &[f64],
    encodings: &[f64],
) -> Result<Array2<Complex64>, SimError> {
    let n = template.n_qubits();
    if n > MAX_ORACLE_QUBITS {
        return Err(SimError::OracleTooLarge(n));
    }
    let (values, spans) = template.resolve_values(trainable, encodings)?;
    let dim = 1usize << n;
    let mut u = Array2::<Complex64>::eye(dim);
    for (gate, &(off, len)) in template.gates().iter().zip(&spans) {
        let vals = &values[off as usize..(off + len) as usize];
        let g = full_gate_matrix(gate, vals, n)?;
        u = g.dot(&u);
    }
    Ok(u)
}

/// Runs a template through the dense route: assemble the unitary, multiply
/// it into `|0…0⟩`, return the amplitude column.
pub fn dense_run(
    template: &CircuitTemplate,
    trainable: &[f64],
    encodings: &[f64],
) -> Result<Vec<Complex64>, SimError> {
    let u = dense_unitary(template, trainable, encodings)?;
    Ok(u.column(0).to_vec())
}

/// Embeds one gate into the full space by index agreement: every matrix
/// entry is the local gate element on the gate's wires times a Kronecker
/// delta over all remaining bits.
pub fn full_gate_matrix(
    gate: &GateOp,
    values: &[f64],
    n_qubits: usize,
) -> Result<Array2<Complex64>, SimError> {
    if n_qubits > MAX_ORACLE_QUBITS {
        return Err(SimError::OracleTooLarge(n_qubits));
    }
    gate.validate(n_qubits)?;
    let expected = gate.kind().n_params();
    if values.len() != expected {
        return Err(SimError::ParamArityMismatch {
            kind: gate.kind(),
            expected,
            got: values.len(),
        });
    }
    let dim = 1usize << n_qubits;
    let bit = |idx: usize, wire: usize| (idx >> (n_qubits - 1 - wire)) & 1;
    let block = target_block(gate.kind(), values);
    let mut m = Array2::<Complex64>::zeros((dim, dim));
    match gate.control() {
        None => {
            let t = gate.target();
            let tmask = 1usize << (n_qubits - 1 - t);
            for r in 0..dim {
                for c in 0..dim {
                    if r & !tmask == c & !tmask {
                        m[[r, c]] = block[bit(r, t)][bit(c, t)];
                    }
                }
            }
        }
        Some(ctl) => {
            // 4×4 in |control,target⟩ basis: identity above, block below.
            let mut u4 = [[Complex64::ZERO; 4]; 4];
            u4[0][0] = Complex64::ONE;
            u4[1][1] = Complex64::ONE;
            for (r, row) in block.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    u4[2 + r][2 + c] = *v;
                }
            }
            let t = gate.target();
            let pair_mask = (1usize << (n_qubits - 1 - ctl)) | (1usize << (n_qubits - 1 - t));
            for r in 0..dim {
                for c in 0..dim {
                    if r & !pair_mask == c & !pair_mask {
                        let ri = bit(r, ctl) * 2 + bit(r, t);
                        let ci = bit(c, ctl) * 2 + bit(c, t);
                        m[[r, c]] = u4[ri][ci];
                    }
                }
            }
        }
    }
    Ok(m)
}

fn expectation(
    template: &CircuitTemplate,
    trainable: &[f64],
    encodings: &[f64],
    wire: usize,
) -> Result<f64, SimError> {
    run_circuit(template, trainable, encodings)?.expectation_z(wire)
}

/// Central finite differences of ⟨Z(`wire`)⟩ over the trainable vector.
pub fn fd_gradient(
    template: &CircuitTemplate,
    trainable: &[f64],
    encodings: &[f64],
    wire: usize,
    h: f64,
) -> Result<Vec<f64>, SimError> {
    let mut work = trainable.to_vec();
    let mut grad = vec![0.0; trainable.len()];
    for i in 0..trainable.len() {
        work[i] = trainable[i] + h;
        let plus = expectation(template, &work, encodings, wire)?;
        work[i] = trainable[i] - h;
        let minus = expectation(template, &work, encodings, wire)?;
        work[i] = trainable[i];
        grad[i] = (plus - minus) / (2.0 * h);
    }
    Ok(grad)
}

/// Exact shift-rule gradient.
///
/// Single-qubit rotations and the controlled phase carry only frequency-1
/// dependence, so the two-term rule `[E(θ+π/2) − E(θ−π/2)]/2` is exact.
/// Controlled rotations mix frequencies 1/2 and 1; the four-term rule
/// `c₊[E(θ+π/2) − E(θ−π/2)] − c₋[E(θ+3π/2) − E(θ−3π/2)]` with
/// `c± = (√2 ± 1)/(4√2)` is exact there. Shifts are applied per gate
/// occurrence, so slots referenced by several gates sum their terms.
pub fn shift_rule_gradient(
    template: &CircuitTemplate,
    trainable: &[f64],
    encodings: &[f64],
    wire: usize,
) -> Result<Vec<f64>, SimError> {
    use super::gate::GateKind;
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    let mut grad = vec![0.0; trainable.len()];
    for (gate_idx, gate) in template.gates().iter().enumerate() {
        for (param_idx, p) in gate.params().iter().enumerate() {
            let ParamSource::Trainable(slot) = *p else {
                continue;
            };
            let base = trainable[slot];
            let eval = |shift: f64| -> Result<f64, SimError> {
                let shifted = template.gates()[gate_idx]
                    .with_param_source(param_idx, ParamSource::Fixed(base + shift));
                let mut gates = template.gates().to_vec();
                gates[gate_idx] = shifted;
                let t = CircuitTemplate::new(
                    template.name(),
                    template.n_qubits(),
                    template.n_trainable(),
                    template.n_encoding(),
                    template.readout_wire(),
                    gates,
                )?;
                expectation(&t, trainable, encodings, wire)
            };
            let four_term = matches!(
                gate.kind(),
                GateKind::Crx | GateKind::Crz | GateKind::Crot
            );
            grad[slot] += if four_term {
                let cp = (SQRT_2 + 1.0) / (4.0 * SQRT_2);
                let cm = (SQRT_2 - 1.0) / (4.0 * SQRT_2);
                cp * (eval(FRAC_PI_2)? - eval(-FRAC_PI_2)?)
                    - cm * (eval(3.0 * FRAC_PI_2)? - eval(-3.0 * FRAC_PI_2)?)
            } else {
                (eval(FRAC_PI_2)? - eval(-FRAC_PI_2)?) / 2.0
            };
        }
    }
    Ok(grad)
}

/// Random fixed-angle circuit over the full gate set, for equivalence
/// sweeps. Single-qubit registers fall back to single-qubit kinds.
pub fn random_circuit(
    rng: &mut impl rand::Rng,
    n_qubits: usize,
    depth: usize,
) -> CircuitTemplate {
    use std::f64::consts::PI;
    let mut gates = Vec::with_capacity(depth);
    for _ in 0..depth {
        let fixed = ParamSource::Fixed(rng.gen_range(-PI..PI));
        let w = rng.gen_range(0..n_qubits);
        let kind = rng.gen_range(0..8);
        let gate = if kind < 4 || n_qubits == 1 {
            match kind % 4 {
                0 => GateOp::rx(w, fixed),
                1 => GateOp::ry(w, fixed),
                2 => GateOp::rz(w, fixed),
                _ => GateOp::h(w),
            }
        } else {
            let mut t = rng.gen_range(0..n_qubits);
            if t == w {
                t = (t + 1) % n_qubits;
            }
            match kind {
                4 => GateOp::crx(w, t, fixed),
                5 => GateOp::crz(w, t, fixed),
                6 => GateOp::cphase(w, t, fixed),
                _ => GateOp::crot(
                    w,
                    t,
                    [
                        fixed,
                        ParamSource::Fixed(rng.gen_range(-PI..PI)),
                        ParamSource::Fixed(rng.gen_range(-PI..PI)),
                    ],
                ),
            }
        };
        gates.push(gate);
    }
    CircuitTemplate::new("random", n_qubits, 0, 0, 0, gates)
        .expect("generated gates are always in range")
}
