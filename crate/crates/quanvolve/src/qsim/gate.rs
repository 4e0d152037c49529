use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use super::SimError;

/// Supported gate set.
///
/// Single-qubit rotations use the standard unitary conventions:
///
/// - `RX(θ) = [[cos θ/2, -i sin θ/2], [-i sin θ/2, cos θ/2]]`
/// - `RY(θ) = [[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]`
/// - `RZ(λ) = diag(e^{-iλ/2}, e^{iλ/2})`
/// - `H = (1/√2)[[1, 1], [1, -1]]`
///
/// Controlled gates apply their 2×2 block on the target when the control is
/// `|1⟩`. `CROT(φ, θ, ω)` controls `Rot = RZ(ω)·RY(θ)·RZ(φ)`; `CPHASE(φ)`
/// is `diag(1, 1, 1, e^{iφ})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    H,
    Crx,
    Crz,
    Crot,
    Cphase,
}

impl GateKind {
    /// Number of rotation angles the gate consumes.
    pub fn n_params(self) -> usize {
        match self {
            GateKind::H => 0,
            GateKind::Crot => 3,
            _ => 1,
        }
    }

    pub fn is_controlled(self) -> bool {
        matches!(
            self,
            GateKind::Crx | GateKind::Crz | GateKind::Crot | GateKind::Cphase
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::H => "H",
            GateKind::Crx => "CRX",
            GateKind::Crz => "CRZ",
            GateKind::Crot => "CROT",
            GateKind::Cphase => "CPHASE",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a gate angle comes from when a circuit runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamSource {
    /// Index into the trainable parameter vector.
    Trainable(usize),
    /// Index into the per-call encoding vector (pixel angles).
    Encoding(usize),
    /// Compile-time constant.
    Fixed(f64),
}

impl ParamSource {
    pub(crate) fn resolve(
        self,
        trainable: &[f64],
        encodings: &[f64],
    ) -> Result<f64, SimError> {
        match self {
            ParamSource::Trainable(i) => {
                trainable
                    .get(i)
                    .copied()
                    .ok_or(SimError::SlotOutOfRange {
                        which: "trainable",
                        slot: i,
                        count: trainable.len(),
                    })
            }
            ParamSource::Encoding(i) => {
                encodings
                    .get(i)
                    .copied()
                    .ok_or(SimError::SlotOutOfRange {
                        which: "encoding",
                        slot: i,
                        count: encodings.len(),
                    })
            }
            ParamSource::Fixed(v) => Ok(v),
        }
    }
}

impl fmt::Display for ParamSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamSource::Trainable(i) => write!(f, "t{i}"),
            ParamSource::Encoding(i) => write!(f, "x{i}"),
            ParamSource::Fixed(v) if *v == PI => f.write_str("pi"),
            ParamSource::Fixed(v) => write!(f, "{v}"),
        }
    }
}

/// One gate application inside a circuit template.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    kind: GateKind,
    control: Option<usize>,
    target: usize,
    params: Vec<ParamSource>,
}

impl GateOp {
    pub fn rx(wire: usize, angle: ParamSource) -> Self {
        Self::single(GateKind::Rx, wire, vec![angle])
    }

    pub fn ry(wire: usize, angle: ParamSource) -> Self {
        Self::single(GateKind::Ry, wire, vec![angle])
    }

    pub fn rz(wire: usize, angle: ParamSource) -> Self {
        Self::single(GateKind::Rz, wire, vec![angle])
    }

    pub fn h(wire: usize) -> Self {
        Self::single(GateKind::H, wire, Vec::new())
    }

    pub fn crx(control: usize, target: usize, angle: ParamSource) -> Self {
        Self::controlled(GateKind::Crx, control, target, vec![angle])
    }

    pub fn crz(control: usize, target: usize, angle: ParamSource) -> Self {
        Self::controlled(GateKind::Crz, control, target, vec![angle])
    }

    pub fn crot(control: usize, target: usize, angles: [ParamSource; 3]) -> Self {
        Self::controlled(GateKind::Crot, control, target, angles.to_vec())
    }

    pub fn cphase(control: usize, target: usize, angle: ParamSource) -> Self {
        Self::controlled(GateKind::Cphase, control, target, vec![angle])
    }

    fn single(kind: GateKind, wire: usize, params: Vec<ParamSource>) -> Self {
        Self {
            kind,
            control: None,
            target: wire,
            params,
        }
    }

    fn controlled(kind: GateKind, control: usize, target: usize, params: Vec<ParamSource>) -> Self {
        Self {
            kind,
            control: Some(control),
            target,
            params,
        }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn control(&self) -> Option<usize> {
        self.control
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn params(&self) -> &[ParamSource] {
        &self.params
    }

    /// Copy with one parameter source swapped; used by the shift-rule oracle
    /// to displace a single gate occurrence of a shared slot.
    pub(crate) fn with_param_source(&self, idx: usize, src: ParamSource) -> Self {
        let mut out = self.clone();
        out.params[idx] = src;
        out
    }

    /// Checks wire ranges and parameter arity against a qubit count.
    pub fn validate(&self, n_qubits: usize) -> Result<(), SimError> {
        let expected = self.kind.n_params();
        if self.params.len() != expected {
            return Err(SimError::ParamArityMismatch {
                kind: self.kind,
                expected,
                got: self.params.len(),
            });
        }
        if self.target >= n_qubits {
            return Err(SimError::WireOutOfRange {
                wire: self.target,
                n_qubits,
            });
        }
        if let Some(c) = self.control {
            if c >= n_qubits {
                return Err(SimError::WireOutOfRange { wire: c, n_qubits });
            }
            if c == self.target {
                return Err(SimError::DuplicateWires(c));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GateOp {
    /// Registry text form, e.g. `CRX(t4) 3->0` or `RX(x1) 2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if !self.params.is_empty() {
            write!(f, "(")?;
            for (i, p) in self.params.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        match self.control {
            Some(c) => write!(f, " {c}->{}", self.target),
            None => write!(f, " {}", self.target),
        }
    }
}

pub(crate) type Block = [[Complex64; 2]; 2];

/// 2×2 matrix acting on the target wire (the controlled block for
/// controlled kinds).
pub(crate) fn target_block(kind: GateKind, vals: &[f64]) -> Block {
    let re = Complex64::from;
    match kind {
        GateKind::Rx | GateKind::Crx => {
            let (s, c) = (vals[0] / 2.0).sin_cos();
            let ims = Complex64::new(0.0, -s);
            [[re(c), ims], [ims, re(c)]]
        }
        GateKind::Ry => {
            let (s, c) = (vals[0] / 2.0).sin_cos();
            [[re(c), re(-s)], [re(s), re(c)]]
        }
        GateKind::Rz | GateKind::Crz => {
            let half = Complex64::new(0.0, vals[0] / 2.0);
            [[(-half).exp(), Complex64::ZERO], [Complex64::ZERO, half.exp()]]
        }
        GateKind::H => {
            let h = re(std::f64::consts::FRAC_1_SQRT_2);
            [[h, h], [h, -h]]
        }
        GateKind::Crot => rot_block(vals[0], vals[1], vals[2]),
        GateKind::Cphase => [
            [Complex64::ONE, Complex64::ZERO],
            [Complex64::ZERO, Complex64::new(0.0, vals[0]).exp()],
        ],
    }
}

/// `Rot(φ, θ, ω) = RZ(ω)·RY(θ)·RZ(φ)`.
fn rot_block(phi: f64, theta: f64, omega: f64) -> Block {
    let (s, c) = (theta / 2.0).sin_cos();
    let ep = |x: f64| Complex64::new(0.0, x).exp();
    [
        [ep(-(phi + omega) / 2.0) * c, -ep((phi - omega) / 2.0) * s],
        [ep(-(phi - omega) / 2.0) * s, ep((phi + omega) / 2.0) * c],
    ]
}

/// Elementwise derivative of [`target_block`] with respect to parameter
/// `idx`. Not unitary; used only by the gradient passes.
pub(crate) fn target_block_derivative(kind: GateKind, vals: &[f64], idx: usize) -> Block {
    debug_assert!(idx < kind.n_params());
    let re = Complex64::from;
    match kind {
        GateKind::Rx | GateKind::Crx => {
            let (s, c) = (vals[0] / 2.0).sin_cos();
            let imc = Complex64::new(0.0, -c / 2.0);
            [[re(-s / 2.0), imc], [imc, re(-s / 2.0)]]
        }
        GateKind::Ry => {
            let (s, c) = (vals[0] / 2.0).sin_cos();
            [[re(-s / 2.0), re(-c / 2.0)], [re(c / 2.0), re(-s / 2.0)]]
        }
        GateKind::Rz | GateKind::Crz => {
            let half = Complex64::new(0.0, vals[0] / 2.0);
            let ih = Complex64::new(0.0, 0.5);
            [
                [-ih * (-half).exp(), Complex64::ZERO],
                [Complex64::ZERO, ih * half.exp()],
            ]
        }
        GateKind::H => unreachable!("H has no parameters"),
        GateKind::Crot => {
            let (phi, theta, omega) = (vals[0], vals[1], vals[2]);
            let u = rot_block(phi, theta, omega);
            let ih = Complex64::new(0.0, 0.5);
            match idx {
                // d/dφ scales columns: Rot·dRZ(φ)/dφ·RZ(φ)^† = Rot·(∓i/2 by column).
                0 => [[-ih * u[0][0], ih * u[0][1]], [-ih * u[1][0], ih * u[1][1]]],
                1 => {
                    let (s, c) = (theta / 2.0).sin_cos();
                    let ep = |x: f64| Complex64::new(0.0, x).exp();
                    [
                        [
                            ep(-(phi + omega) / 2.0) * (-s / 2.0),
                            -ep((phi - omega) / 2.0) * (c / 2.0),
                        ],
                        [
                            ep(-(phi - omega) / 2.0) * (c / 2.0),
                            ep((phi + omega) / 2.0) * (-s / 2.0),
                        ],
                    ]
                }
                // d/dω scales rows.
                _ => [[-ih * u[0][0], -ih * u[0][1]], [ih * u[1][0], ih * u[1][1]]],
            }
        }
        GateKind::Cphase => [
            [Complex64::ZERO, Complex64::ZERO],
            [
                Complex64::ZERO,
                Complex64::new(0.0, 1.0) * Complex64::new(0.0, vals[0]).exp(),
            ],
        ],
    }
}

/// Conjugate transpose of a 2×2 block.
pub(crate) fn dagger(m: &Block) -> Block {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}
