use num_complex::Complex64;

use super::circuit::CircuitTemplate;
use super::gate::{target_block, Block, GateOp};
use super::state::{wire_mask, StateVector};
use super::SimError;

/// Applies a 2×2 block to `wire` over a raw amplitude buffer.
pub(crate) fn apply_block(amps: &mut [Complex64], n_qubits: usize, wire: usize, m: &Block) {
    let mask = wire_mask(n_qubits, wire).expect("validated wire");
    for i in 0..amps.len() {
        if i & mask == 0 {
            let j = i | mask;
            let a = amps[i];
            let b = amps[j];
            amps[i] = m[0][0] * a + m[0][1] * b;
            amps[j] = m[1][0] * a + m[1][1] * b;
        }
    }
}

/// Applies a 2×2 block to `target` only where `control` is `|1⟩`.
pub(crate) fn apply_controlled_block(
    amps: &mut [Complex64],
    n_qubits: usize,
    control: usize,
    target: usize,
    m: &Block,
) {
    let cmask = wire_mask(n_qubits, control).expect("validated wire");
    let tmask = wire_mask(n_qubits, target).expect("validated wire");
    for i in 0..amps.len() {
        if i & cmask != 0 && i & tmask == 0 {
            let j = i | tmask;
            let a = amps[i];
            let b = amps[j];
            amps[i] = m[0][0] * a + m[0][1] * b;
            amps[j] = m[1][0] * a + m[1][1] * b;
        }
    }
}

pub(crate) fn apply_resolved_gate(
    amps: &mut [Complex64],
    n_qubits: usize,
    gate: &GateOp,
    values: &[f64],
) {
    let block = target_block(gate.kind(), values);
    match gate.control() {
        Some(c) => apply_controlled_block(amps, n_qubits, c, gate.target(), &block),
        None => apply_block(amps, n_qubits, gate.target(), &block),
    }
}

/// Applies one gate to a state, returning the new state.
///
/// Angles in `values` are positional: they fill the gate's parameter list in
/// order regardless of source kind, so callers can probe a gate in isolation.
pub fn apply_gate(
    state: &StateVector,
    gate: &GateOp,
    values: &[f64],
) -> Result<StateVector, SimError> {
    let n = state.n_qubits();
    gate.validate(n)?;
    let expected = gate.kind().n_params();
    if values.len() != expected {
        return Err(SimError::ParamArityMismatch {
            kind: gate.kind(),
            expected,
            got: values.len(),
        });
    }
    let mut out = state.clone();
    apply_resolved_gate(out.amps_mut(), n, gate, values);
    Ok(out)
}

/// Runs a template from `|0…0⟩` with the given parameter vectors.
pub fn run_circuit(
    template: &CircuitTemplate,
    trainable: &[f64],
    encodings: &[f64],
) -> Result<StateVector, SimError> {
    let (values, spans) = template.resolve_values(trainable, encodings)?;
    let n = template.n_qubits();
    let mut state = StateVector::zero(n)?;
    let amps = state.amps_mut();
    for (gate, &(off, len)) in template.gates().iter().zip(&spans) {
        let vals = &values[off as usize..(off + len) as usize];
        apply_resolved_gate(amps, n, gate, vals);
    }
    Ok(state)
}

/// ⟨Z⟩ on one wire of a state. Convenience over [`StateVector::expectation_z`].
pub fn expectation_z(state: &StateVector, wire: usize) -> Result<f64, SimError> {
    state.expectation_z(wire)
}
