use std::fmt;

use super::gate::{GateOp, ParamSource};
use super::{SimError, MAX_QUBITS};

/// Declarative circuit: an ordered gate list plus slot counts.
///
/// Templates are data, not closures, so they can be printed, diffed, and
/// executed by both the fast simulator and the dense-matrix oracle. Angles
/// referenced as [`ParamSource::Trainable`] or [`ParamSource::Encoding`] are
/// supplied at run time; validation guarantees every referenced slot is in
/// range, so execution cannot fail on a validated template.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitTemplate {
    name: String,
    n_qubits: usize,
    n_trainable: usize,
    n_encoding: usize,
    readout_wire: usize,
    gates: Vec<GateOp>,
}

impl CircuitTemplate {
    pub fn new(
        name: impl Into<String>,
        n_qubits: usize,
        n_trainable: usize,
        n_encoding: usize,
        readout_wire: usize,
        gates: Vec<GateOp>,
    ) -> Result<Self, SimError> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(SimError::BadQubitCount(n_qubits));
        }
        if readout_wire >= n_qubits {
            return Err(SimError::WireOutOfRange {
                wire: readout_wire,
                n_qubits,
            });
        }
        for gate in &gates {
            gate.validate(n_qubits)?;
            for p in gate.params() {
                match *p {
                    ParamSource::Trainable(i) if i >= n_trainable => {
                        return Err(SimError::SlotOutOfRange {
                            which: "trainable",
                            slot: i,
                            count: n_trainable,
                        });
                    }
                    ParamSource::Encoding(i) if i >= n_encoding => {
                        return Err(SimError::SlotOutOfRange {
                            which: "encoding",
                            slot: i,
                            count: n_encoding,
                        });
                    }
                    _ => {}
                }
            }
        }
        Ok(Self {
            name: name.into(),
            n_qubits,
            n_trainable,
            n_encoding,
            readout_wire,
            gates,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Length of the trainable parameter vector this template expects.
    pub fn n_trainable(&self) -> usize {
        self.n_trainable
    }

    /// Length of the per-call encoding vector this template expects.
    pub fn n_encoding(&self) -> usize {
        self.n_encoding
    }

    /// Wire whose ⟨Z⟩ is the circuit output.
    pub fn readout_wire(&self) -> usize {
        self.readout_wire
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    /// Trainable slots never referenced by any gate. Empty for every
    /// registry template; exposed so tests can assert that.
    pub fn unused_trainable_slots(&self) -> Vec<usize> {
        let mut used = vec![false; self.n_trainable];
        for gate in &self.gates {
            for p in gate.params() {
                if let ParamSource::Trainable(i) = *p {
                    used[i] = true;
                }
            }
        }
        used.iter()
            .enumerate()
            .filter(|(_, u)| !**u)
            .map(|(i, _)| i)
            .collect()
    }

    /// Resolves every gate's angles against concrete parameter vectors.
    /// Returns a flat value buffer plus one `(offset, len)` span per gate.
    pub(crate) fn resolve_values(
        &self,
        trainable: &[f64],
        encodings: &[f64],
    ) -> Result<(Vec<f64>, Vec<(u32, u32)>), SimError> {
        if trainable.len() != self.n_trainable {
            return Err(SimError::ValueCountMismatch {
                which: "trainable",
                expected: self.n_trainable,
                got: trainable.len(),
            });
        }
        if encodings.len() != self.n_encoding {
            return Err(SimError::ValueCountMismatch {
                which: "encoding",
                expected: self.n_encoding,
                got: encodings.len(),
            });
        }
        let total: usize = self.gates.iter().map(|g| g.params().len()).sum();
        let mut values = Vec::with_capacity(total);
        let mut spans = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let offset = values.len() as u32;
            for p in gate.params() {
                values.push(p.resolve(trainable, encodings)?);
            }
            spans.push((offset, gate.params().len() as u32));
        }
        Ok((values, spans))
    }
}

impl fmt::Display for CircuitTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "template {} qubits={} trainable={} encoding={} readout={}",
            self.name, self.n_qubits, self.n_trainable, self.n_encoding, self.readout_wire
        )?;
        for gate in &self.gates {
            writeln!(f, "  {gate}")?;
        }
        Ok(())
    }
}
