//! Dense statevector simulator with exact reverse-pass gradients.
//!
//! States hold all `2^n` complex amplitudes for `n` in `1..=8`. Wire 0 is the
//! most significant bit of the basis index, so `|10⟩` (wire 0 set) is
//! amplitude index 2 on two qubits.
//!
//! Circuits are declarative: a [`CircuitTemplate`] lists [`GateOp`]s whose
//! angles come from trainable-parameter slots, per-call encoding slots, or
//! fixed constants. [`run_circuit`] executes a template against concrete
//! values; [`gradient`] returns `d⟨Z⟩/dθ` for every trainable slot in one
//! forward plus one reverse pass.
//!
//! The [`oracle`] submodule carries deliberately slow reference
//! implementations (dense unitary assembly, finite differences,
//! parameter-shift) used to validate the fast paths in tests.

mod adjoint;
mod circuit;
mod exec;
mod gate;
mod state;

pub mod oracle;

pub use adjoint::gradient;
pub use circuit::CircuitTemplate;
pub use exec::{apply_gate, expectation_z, run_circuit};
pub use gate::{GateKind, GateOp, ParamSource};
pub use state::StateVector;

/// Largest qubit count the simulator accepts.
pub const MAX_QUBITS: usize = 8;

/// Errors from building or executing circuits.
#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("qubit count {0} outside supported range 1..={MAX_QUBITS}")]
    BadQubitCount(usize),
    #[error("wire {wire} out of range for {n_qubits} qubits")]
    WireOutOfRange { wire: usize, n_qubits: usize },
    #[error("control and target coincide on wire {0}")]
    DuplicateWires(usize),
    #[error("{kind:?} takes {expected} parameter(s), got {got}")]
    ParamArityMismatch {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("{which} slot {slot} out of range: template declares {count}")]
    SlotOutOfRange {
        which: &'static str,
        slot: usize,
        count: usize,
    },
    #[error("expected {expected} {which} values, got {got}")]
    ValueCountMismatch {
        which: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("dense-unitary oracle supports at most 5 qubits, got {0}")]
    OracleTooLarge(usize),
}
