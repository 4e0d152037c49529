use num_complex::Complex64;

use super::{SimError, MAX_QUBITS};

/// Dense statevector over `n_qubits` qubits.
///
/// Amplitudes are indexed by computational basis state, with wire 0 as the
/// most significant bit: on three qubits, basis index `0b101` means wires 0
/// and 2 are `|1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// All-zeros basis state `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self, SimError> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(SimError::BadQubitCount(n_qubits));
        }
        let mut amps = vec![Complex64::ZERO; 1 << n_qubits];
        amps[0] = Complex64::ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Builds a state from raw amplitudes; the length must be a power of two
    /// within the supported range. No normalization is applied.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let n_qubits = amps.len().trailing_zeros() as usize;
        if !amps.len().is_power_of_two() || n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(SimError::BadQubitCount(n_qubits));
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Basis-index bit selecting `wire`; wire 0 maps to the top bit.
    pub(crate) fn wire_mask(&self, wire: usize) -> Result<usize, SimError> {
        wire_mask(self.n_qubits, wire)
    }

    /// L2 norm; 1 for any state produced by the unitary gate set.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨Z⟩ on one wire: P(wire = 0) − P(wire = 1).
    pub fn expectation_z(&self, wire: usize) -> Result<f64, SimError> {
        let mask = self.wire_mask(wire)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let p = a.norm_sqr();
                if i & mask == 0 {
                    p
                } else {
                    -p
                }
            })
            .sum())
    }
}

pub(crate) fn wire_mask(n_qubits: usize, wire: usize) -> Result<usize, SimError> {
    if wire >= n_qubits {
        return Err(SimError::WireOutOfRange { wire, n_qubits });
    }
    Ok(1 << (n_qubits - 1 - wire))
}
