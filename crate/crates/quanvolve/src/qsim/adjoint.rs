use num_complex::Complex64;

use super::circuit::CircuitTemplate;
use super::gate::{dagger, target_block, target_block_derivative, GateOp, ParamSource};
use super::state::wire_mask;
use super::SimError;

/// Exact gradient of ⟨Z(`wire`)⟩ with respect to every trainable slot, via a
/// reverse pass over the circuit.
///
/// Cost is one forward run plus one backward sweep (two block applications
/// per gate), independent of the number of parameters. The reverse pass
/// maintains two states: `ket`, rewound to just before the current gate, and
/// `bra`, the readout observable propagated backward through the gates
/// already visited. Each trainable angle contributes
/// `2·Re⟨bra|∂U/∂θ|ket⟩`, accumulated into its slot (slots referenced by
/// several gates sum their contributions).
///
/// The derivative of a controlled gate is zero on the control-`|0⟩` subspace
/// and the block derivative where the control is `|1⟩`; it is *not* a
/// controlled gate itself, which is why the inner product below skips
/// control-clear basis pairs entirely.
pub fn gradient(
    template: &CircuitTemplate,
    trainable: &[f64],
    encodings: &[f64],
    wire: usize,
) -> Result<Vec<f64>, SimError> {
    let (values, spans) = template.resolve_values(trainable, encodings)?;
    let n = template.n_qubits();
    let zmask = wire_mask(n, wire)?;

    let mut ket = super::exec::run_circuit(template, trainable, encodings)?;
    let ket = ket.amps_mut();
    // bra = Z|ψ⟩: negate amplitudes where the readout wire is |1⟩.
    let mut bra: Vec<Complex64> = ket
        .iter()
        .enumerate()
        .map(|(i, a)| if i & zmask == 0 { *a } else { -*a })
        .collect();

    let mut grad = vec![0.0; template.n_trainable()];
    for (gate, &(off, len)) in template.gates().iter().zip(&spans).rev() {
        let vals = &values[off as usize..(off + len) as usize];
        let block = target_block(gate.kind(), vals);
        let adj = dagger(&block);
        // Rewind the ket to the state this gate saw on the forward pass.
        match gate.control() {
            Some(c) => super::exec::apply_controlled_block(ket, n, c, gate.target(), &adj),
            None => super::exec::apply_block(ket, n, gate.target(), &adj),
        }
        for (idx, p) in gate.params().iter().enumerate() {
            if let ParamSource::Trainable(slot) = *p {
                let d = target_block_derivative(gate.kind(), vals, idx);
                let inner = derivative_inner(&bra, ket, n, gate, &d);
                grad[slot] += 2.0 * inner.re;
            }
        }
        // Move the observable side down by the same gate: bra ← U†·bra.
        match gate.control() {
            Some(c) => super::exec::apply_controlled_block(&mut bra, n, c, gate.target(), &adj),
            None => super::exec::apply_block(&mut bra, n, gate.target(), &adj),
        }
    }
    Ok(grad)
}

/// ⟨bra|D|ket⟩ where `D` is the gate's parameter derivative: the 2×2 block
/// derivative on the target, masked to control-set indices for controlled
/// gates.
fn derivative_inner(
    bra: &[Complex64],
    ket: &[Complex64],
    n_qubits: usize,
    gate: &GateOp,
    d: &super::gate::Block,
) -> Complex64 {
    let tmask = wire_mask(n_qubits, gate.target()).expect("validated wire");
    let cmask = gate
        .control()
        .map(|c| wire_mask(n_qubits, c).expect("validated wire"))
        .unwrap_or(0);
    let mut acc = Complex64::ZERO;
    for i in 0..ket.len() {
        if i & tmask == 0 && i & cmask == cmask {
            let j = i | tmask;
            let a = ket[i];
            let b = ket[j];
            acc += bra[i].conj() * (d[0][0] * a + d[0][1] * b);
            acc += bra[j].conj() * (d[1][0] * a + d[1][1] * b);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::qsim::{oracle, GateOp, ParamSource};

    fn tr(i: usize) -> ParamSource {
        ParamSource::Trainable(i)
    }

    #[test]
    fn rx_gradient_is_minus_sine() {
        let t = CircuitTemplate::new("g", 1, 1, 0, 0, vec![GateOp::rx(0, tr(0))]).unwrap();
        for theta in [0.0, 0.31, 1.2, PI - 0.2, 4.4] {
            let g = gradient(&t, &[theta], &[], 0).unwrap();
            assert!((g[0] + theta.sin()).abs() < 1e-13, "theta={theta}");
        }
    }

    #[test]
    fn controlled_gradient_with_superposed_control() {
        // H(0); CRX(0→1, θ); ⟨Z(1)⟩ = (1 + cos θ)/2.
        let t = CircuitTemplate::new(
            "g",
            2,
            1,
            0,
            1,
            vec![GateOp::h(0), GateOp::crx(0, 1, tr(0))],
        )
        .unwrap();
        for theta in [0.2, 1.0, 2.6] {
            let g = gradient(&t, &[theta], &[], 1).unwrap();
            assert!((g[0] + theta.sin() / 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn reused_slot_accumulates() {
        // RX(θ) twice: ⟨Z⟩ = cos 2θ, gradient −2 sin 2θ.
        let t = CircuitTemplate::new(
            "g",
            1,
            1,
            0,
            0,
            vec![GateOp::rx(0, tr(0)), GateOp::rx(0, tr(0))],
        )
        .unwrap();
        let theta = 0.37;
        let g = gradient(&t, &[theta], &[], 0).unwrap();
        assert!((g[0] + 2.0 * (2.0 * theta).sin()).abs() < 1e-13);
    }

    #[test]
    fn matches_finite_differences_on_mixed_circuit() {
        let t = CircuitTemplate::new(
            "g",
            3,
            5,
            2,
            1,
            vec![
                GateOp::rx(0, ParamSource::Encoding(0)),
                GateOp::ry(1, tr(0)),
                GateOp::h(2),
                GateOp::crot(0, 1, [tr(1), tr(2), tr(3)]),
                GateOp::crz(1, 2, tr(4)),
                GateOp::rx(2, ParamSource::Encoding(1)),
                GateOp::cphase(2, 0, ParamSource::Fixed(PI)),
            ],
        )
        .unwrap();
        let params = [0.3, -1.1, 0.8, 2.2, -0.4];
        let enc = [0.9, -2.0];
        let exact = gradient(&t, &params, &enc, 1).unwrap();
        let fd = oracle::fd_gradient(&t, &params, &enc, 1, 1e-5).unwrap();
        for (a, b) in exact.iter().zip(&fd) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn gradient_length_matches_trainable_count() {
        let t = CircuitTemplate::new(
            "g",
            2,
            3,
            0,
            0,
            vec![GateOp::ry(0, tr(2))],
        )
        .unwrap();
        let g = gradient(&t, &[0.1, 0.2, 0.3], &[], 0).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[1], 0.0);
    }
}
