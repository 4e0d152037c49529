//! Registry of quantum filter circuit layouts.
//!
//! Eight filter kinds, each buildable in two channel modes:
//!
//! - **single**: one 2×2 window (4 encoding angles). `U1`/`U2` run on five
//!   qubits with wire 0 as an ancilla readout and wires 1..=4 as data;
//!   `C13`/`C14`/`C18`/`C19` run on four data qubits and read out wire 0.
//! - **channel_overwrite**: all three channel windows (12 encoding angles)
//!   processed by one five-qubit circuit. Per channel, the window is
//!   angle-encoded onto the data wires (re-rotating whatever state the
//!   previous channel left), the filter block runs with channel-private
//!   parameters, and a fixed-π controlled-phase fans each data wire into the
//!   ancilla; the ancilla is measured once at the end.
//!
//! The ancilla readout is an interference measurement: a Hadamard on the
//! ancilla brackets the circuit, so the phases kicked back by the CPHASE
//! fan-in rotate ⟨Z⟩ away from +1. Without the Hadamard pair the ancilla
//! would stay in `|0⟩` and the readout would be constant.
//!
//! Layouts are data, kept in this one file so they can be corrected in one
//! place; `U1`/`U2` chain structure, ring closure for `U2`, and the ring
//! orderings of the `C` circuits are all encoded in [`build_template_with`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::qsim::{CircuitTemplate, GateOp, ParamSource};

/// The eight filter circuit kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemplateKind {
    U1Crx,
    U1Crot,
    U2Crx,
    U2Crot,
    C13,
    C14,
    C18,
    C19,
}

impl TemplateKind {
    pub const ALL: [TemplateKind; 8] = [
        TemplateKind::U1Crx,
        TemplateKind::U1Crot,
        TemplateKind::U2Crx,
        TemplateKind::U2Crot,
        TemplateKind::C13,
        TemplateKind::C14,
        TemplateKind::C18,
        TemplateKind::C19,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TemplateKind::U1Crx => "U1_CRX",
            TemplateKind::U1Crot => "U1_CROT",
            TemplateKind::U2Crx => "U2_CRX",
            TemplateKind::U2Crot => "U2_CROT",
            TemplateKind::C13 => "C13",
            TemplateKind::C14 => "C14",
            TemplateKind::C18 => "C18",
            TemplateKind::C19 => "C19",
        }
    }

    fn is_ancilla_filter(self) -> bool {
        matches!(
            self,
            TemplateKind::U1Crx | TemplateKind::U1Crot | TemplateKind::U2Crx | TemplateKind::U2Crot
        )
    }
}

impl fmt::Display for TemplateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown template kind '{0}' (expected one of U1_CRX, U1_CROT, U2_CRX, U2_CROT, C13, C14, C18, C19)")]
pub struct UnknownTemplateKind(pub String);

impl FromStr for TemplateKind {
    type Err = UnknownTemplateKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .chars()
            .filter(|c| *c != '_' && *c != '-')
            .collect::<String>()
            .to_ascii_uppercase();
        match norm.as_str() {
            "U1CRX" => Ok(TemplateKind::U1Crx),
            "U1CROT" => Ok(TemplateKind::U1Crot),
            "U2CRX" => Ok(TemplateKind::U2Crx),
            "U2CROT" => Ok(TemplateKind::U2Crot),
            "C13" => Ok(TemplateKind::C13),
            "C14" => Ok(TemplateKind::C14),
            "C18" => Ok(TemplateKind::C18),
            "C19" => Ok(TemplateKind::C19),
            _ => Err(UnknownTemplateKind(s.to_string())),
        }
    }
}

/// How many channels one circuit consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelMode {
    /// One channel window per circuit evaluation (4 encoding slots).
    Single,
    /// All three channel windows in one evaluation (12 encoding slots).
    ChannelOverwrite,
}

impl ChannelMode {
    pub const ALL: [ChannelMode; 2] = [ChannelMode::Single, ChannelMode::ChannelOverwrite];

    pub fn name(self) -> &'static str {
        match self {
            ChannelMode::Single => "single",
            ChannelMode::ChannelOverwrite => "channel_overwrite",
        }
    }
}

impl fmt::Display for ChannelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown channel mode '{0}' (expected 'single' or 'channel_overwrite')")]
pub struct UnknownChannelMode(pub String);

impl FromStr for ChannelMode {
    type Err = UnknownChannelMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "single" => Ok(ChannelMode::Single),
            "channel_overwrite" => Ok(ChannelMode::ChannelOverwrite),
            _ => Err(UnknownChannelMode(s.to_string())),
        }
    }
}

/// Build-time switches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TemplateOptions {
    /// Give every CPHASE fan-in gate its own trainable angle instead of the
    /// fixed π.
    pub trainable_cphase: bool,
}

/// All 16 registered (kind, mode) combinations, in registry order.
pub fn list_templates() -> Vec<(TemplateKind, ChannelMode)> {
    let mut out = Vec::with_capacity(16);
    for mode in ChannelMode::ALL {
        for kind in TemplateKind::ALL {
            out.push((kind, mode));
        }
    }
    out
}

/// Builds a registered template with default options.
pub fn build_template(kind: TemplateKind, mode: ChannelMode) -> CircuitTemplate {
    build_template_with(kind, mode, TemplateOptions::default())
}

/// Builds a registered template.
pub fn build_template_with(
    kind: TemplateKind,
    mode: ChannelMode,
    opts: TemplateOptions,
) -> CircuitTemplate {
    let mut b = Builder::default();
    let name = format!("{kind}/{mode}");
    match mode {
        ChannelMode::Single => {
            if kind.is_ancilla_filter() {
                // 5 qubits: ancilla 0, data 1..=4.
                b.gates.push(GateOp::h(0));
                b.encode_window([1, 2, 3, 4], 0);
                push_filter_block(&mut b, kind, [1, 2, 3, 4]);
                b.fan_in([1, 2, 3, 4], 0, opts.trainable_cphase);
                b.gates.push(GateOp::h(0));
                b.finish(name, 5, 4, 0)
            } else {
                // 4 data qubits, readout wire 0, no ancilla.
                b.encode_window([0, 1, 2, 3], 0);
                push_filter_block(&mut b, kind, [0, 1, 2, 3]);
                b.finish(name, 4, 4, 0)
            }
        }
        ChannelMode::ChannelOverwrite => {
            b.gates.push(GateOp::h(0));
            for channel in 0..3 {
                b.encode_window([1, 2, 3, 4], 4 * channel);
                push_filter_block(&mut b, kind, [1, 2, 3, 4]);
                b.fan_in([1, 2, 3, 4], 0, opts.trainable_cphase);
            }
            b.gates.push(GateOp::h(0));
            b.finish(name, 5, 12, 0)
        }
    }
}

#[derive(Default)]
struct Builder {
    gates: Vec<GateOp>,
    next_slot: usize,
}

impl Builder {
    fn slot(&mut self) -> ParamSource {
        let s = ParamSource::Trainable(self.next_slot);
        self.next_slot += 1;
        s
    }

    fn slot3(&mut self) -> [ParamSource; 3] {
        [self.slot(), self.slot(), self.slot()]
    }

    /// Row-major window pixels (TL, TR, BL, BR) onto four data wires.
    fn encode_window(&mut self, wires: [usize; 4], first_slot: usize) {
        for (p, w) in wires.into_iter().enumerate() {
            self.gates
                .push(GateOp::rx(w, ParamSource::Encoding(first_slot + p)));
        }
    }

    /// CPHASE from each data wire into the ancilla.
    fn fan_in(&mut self, data: [usize; 4], ancilla: usize, trainable: bool) {
        for d in data {
            let angle = if trainable {
                self.slot()
            } else {
                ParamSource::Fixed(PI)
            };
            self.gates.push(GateOp::cphase(d, ancilla, angle));
        }
    }

    fn finish(
        self,
        name: String,
        n_qubits: usize,
        n_encoding: usize,
        readout: usize,
    ) -> CircuitTemplate {
        CircuitTemplate::new(name, n_qubits, self.next_slot, n_encoding, readout, self.gates)
            .expect("registry layouts are valid")
    }
}

/// The trainable heart of each filter, on four data wires.
fn push_filter_block(b: &mut Builder, kind: TemplateKind, w: [usize; 4]) {
    let crx = |b: &mut Builder, c: usize, t: usize| {
        let s = b.slot();
        b.gates.push(GateOp::crx(c, t, s));
    };
    let crz = |b: &mut Builder, c: usize, t: usize| {
        let s = b.slot();
        b.gates.push(GateOp::crz(c, t, s));
    };
    let crot = |b: &mut Builder, c: usize, t: usize| {
        let s = b.slot3();
        b.gates.push(GateOp::crot(c, t, s));
    };
    match kind {
        // Linear chain over the data wires; U2 closes it into a ring.
        TemplateKind::U1Crx | TemplateKind::U2Crx => {
            crx(b, w[0], w[1]);
            crx(b, w[1], w[2]);
            crx(b, w[2], w[3]);
            if kind == TemplateKind::U2Crx {
                crx(b, w[3], w[0]);
            }
        }
        TemplateKind::U1Crot | TemplateKind::U2Crot => {
            crot(b, w[0], w[1]);
            crot(b, w[1], w[2]);
            crot(b, w[2], w[3]);
            if kind == TemplateKind::U2Crot {
                crot(b, w[3], w[0]);
            }
        }
        // Two rotation layers with two controlled rings.
        TemplateKind::C13 | TemplateKind::C14 => {
            let cg = if kind == TemplateKind::C13 { crz } else { crx };
            for wire in w {
                let s = b.slot();
                b.gates.push(GateOp::ry(wire, s));
            }
            cg(b, w[3], w[0]);
            cg(b, w[0], w[1]);
            cg(b, w[1], w[2]);
            cg(b, w[2], w[3]);
            for wire in w {
                let s = b.slot();
                b.gates.push(GateOp::ry(wire, s));
            }
            cg(b, w[3], w[2]);
            cg(b, w[2], w[1]);
            cg(b, w[1], w[0]);
            cg(b, w[0], w[3]);
        }
        // RX + RZ layers with one controlled ring.
        TemplateKind::C18 | TemplateKind::C19 => {
            let cg = if kind == TemplateKind::C18 { crz } else { crx };
            for wire in w {
                let s = b.slot();
                b.gates.push(GateOp::rx(wire, s));
            }
            for wire in w {
                let s = b.slot();
                b.gates.push(GateOp::rz(wire, s));
            }
            cg(b, w[3], w[0]);
            cg(b, w[0], w[1]);
            cg(b, w[1], w[2]);
            cg(b, w[2], w[3]);
        }
    }
}
