use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::messages::ProtocolMessage;
use crate::circuits::{randomize_not_pairs, Circuit, Node};
use crate::encoding::{check_fidelity, measure_registers, measurement_plan, GateOtp, MeasurementPlan, PureState, Scheme};
use crate::error::{Error, Result};

/// Alice's side of a session: she holds the secret tables and hands out
/// encoded copies gate by gate.
#[derive(Debug, Clone)]
pub struct Alice {
    circuit: Circuit,
    scheme: Scheme,
    copies: usize,
    fidelity: f64,
    rng: ChaCha8Rng,
    slots: Vec<usize>,
    output_pads: Vec<bool>,
    current: usize,
    pads: Vec<bool>,
    lost: Vec<bool>,
    acked: Option<usize>,
    started: bool,
    finished: bool,
    aborted: Option<String>,
}

impl Alice {
    /// With `randomize`, NOT pairs are inserted before encoding and the
    /// resulting output pads are revealed at the end of the session.
    pub fn new(
        circuit: &Circuit,
        scheme: Scheme,
        copies: usize,
        fidelity: f64,
        randomize: bool,
        mut rng: ChaCha8Rng,
    ) -> Result<Self> {
        if copies == 0 {
            return Err(Error::invalid("copies per gate must be at least 1"));
        }
        check_fidelity(fidelity)?;
        let slots = circuit.slot_ids();
        for &s in &slots {
            let t = circuit.slot_table(s)?;
            scheme.photon_layout(t.k())?;
        }
        let (circuit, output_pads) = if randomize {
            let r = randomize_not_pairs(circuit, &mut rng)?;
            (r.circuit, r.output_pads)
        } else {
            (circuit.clone(), vec![false; circuit.output_ids().len()])
        };
        Ok(Self {
            circuit,
            scheme,
            copies,
            fidelity,
            rng,
            slots,
            output_pads,
            current: 0,
            pads: Vec::new(),
            lost: Vec::new(),
            acked: None,
            started: false,
            finished: false,
            aborted: None,
        })
    }

    pub fn is_finished(&self) -> bool {
        self.finished || self.aborted.is_some()
    }

    pub fn abort_reason(&self) -> Option<&str> {
        self.aborted.as_deref()
    }

    /// Program header followed by the first gate's copies.
    pub fn start(&mut self) -> Result<Vec<ProtocolMessage>> {
        if self.started {
            return Err(Error::Protocol("session already started".into()));
        }
        self.started = true;
        let mut out = vec![ProtocolMessage::ProgramHeader {
            circuit: self.circuit.redacted(),
            scheme: self.scheme,
            copies_per_gate: self.copies,
        }];
        out.extend(self.next_gate()?);
        Ok(out)
    }

    /// Reacts to one message from Bob. A protocol violation yields an
    /// `Abort` for Bob and ends Alice's side.
    pub fn handle(&mut self, msg: &ProtocolMessage) -> Result<Vec<ProtocolMessage>> {
        if self.is_finished() {
            return Ok(Vec::new());
        }
        match self.step(msg) {
            Ok(out) => Ok(out),
            Err(Error::Protocol(reason)) => {
                self.aborted = Some(reason.clone());
                Ok(vec![ProtocolMessage::abort(reason)])
            }
            Err(e) => Err(e),
        }
    }

    fn step(&mut self, msg: &ProtocolMessage) -> Result<Vec<ProtocolMessage>> {
        let gate = self.slots.get(self.current).copied();
        match *msg {
            ProtocolMessage::LossReport { gate_id, copy_id } => {
                self.check_copy(gate, gate_id, copy_id)?;
                if self.acked == Some(copy_id) {
                    return Err(Error::Protocol(format!("copy {copy_id} of gate {gate_id} both acked and lost")));
                }
                self.lost[copy_id] = true;
                Ok(Vec::new())
            }
            ProtocolMessage::ReceiveAck { gate_id, copy_id } => {
                self.check_copy(gate, gate_id, copy_id)?;
                if let Some(prev) = self.acked {
                    return Err(Error::Protocol(format!(
                        "second ack for gate {gate_id} (copy {copy_id} after copy {prev})"
                    )));
                }
                if self.lost[copy_id] {
                    return Err(Error::Protocol(format!("ack for copy {copy_id} of gate {gate_id} reported lost")));
                }
                self.acked = Some(copy_id);
                let mut out = vec![ProtocolMessage::PadReveal {
                    gate_id,
                    copy_id,
                    pad: self.pads[copy_id],
                }];
                self.current += 1;
                out.extend(self.next_gate()?);
                Ok(out)
            }
            ProtocolMessage::Abort { ref reason } => {
                self.aborted = Some(format!("peer aborted: {reason}"));
                Ok(Vec::new())
            }
            ref other => Err(Error::Protocol(format!("Alice cannot accept {}", other.kind()))),
        }
    }

    fn check_copy(&self, gate: Option<usize>, gate_id: usize, copy_id: usize) -> Result<()> {
        if gate != Some(gate_id) {
            return Err(Error::Protocol(format!("message for gate {gate_id}, but gate {gate:?} is open")));
        }
        if copy_id >= self.copies {
            return Err(Error::Protocol(format!("copy {copy_id} out of range (copies = {})", self.copies)));
        }
        Ok(())
    }

    fn next_gate(&mut self) -> Result<Vec<ProtocolMessage>> {
        self.acked = None;
        let Some(&gate_id) = self.slots.get(self.current) else {
            self.finished = true;
            return Ok(vec![ProtocolMessage::OutputPadReveal {
                pads: self.output_pads.clone(),
            }]);
        };
        let table = self.circuit.slot_table(gate_id)?.clone();
        self.pads.clear();
        self.lost = vec![false; self.copies];
        let mut out = Vec::with_capacity(self.copies);
        for copy_id in 0..self.copies {
            let pad = self.rng.random_bool(0.5);
            let mut otp = GateOtp::encode_padded(self.scheme, &table, pad, &mut self.rng)?;
            otp.apply_noise(self.fidelity, &mut self.rng)?;
            self.pads.push(pad);
            out.push(ProtocolMessage::StateOffer {
                gate_id,
                copy_id,
                photons: Some(otp.take_registers()?),
            });
        }
        Ok(out)
    }
}

/// One measurement Bob performed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementEntry {
    pub gate_id: usize,
    pub copy_id: usize,
    pub input_bits: Vec<bool>,
    pub plan: MeasurementPlan,
    pub outcomes: Vec<Option<bool>>,
    pub raw: bool,
    /// Raw bit with the revealed pad removed; `None` until the reveal.
    pub decoded: Option<bool>,
}

/// Bob's side: he evaluates the public wiring himself and measures exactly
/// one surviving copy per gate.
#[derive(Debug, Clone)]
pub struct Bob {
    inputs: Vec<bool>,
    rng: ChaCha8Rng,
    circuit: Option<Circuit>,
    scheme: Scheme,
    copies: usize,
    values: Vec<Option<bool>>,
    cursor: usize,
    gate: Option<(usize, Vec<bool>)>,
    received: Vec<Option<Vec<PureState>>>,
    pending: Option<usize>,
    measurements: Vec<MeasurementEntry>,
    outputs: Option<Vec<bool>>,
    aborted: Option<String>,
}

impl Bob {
    /// `inputs` follow the circuit's input order.
    pub fn new(inputs: Vec<bool>, rng: ChaCha8Rng) -> Self {
        Self {
            inputs,
            rng,
            circuit: None,
            scheme: Scheme::G1,
            copies: 0,
            values: Vec::new(),
            cursor: 0,
            gate: None,
            received: Vec::new(),
            pending: None,
            measurements: Vec::new(),
            outputs: None,
            aborted: None,
        }
    }

    pub fn is_finished(&self) -> bool {
        self.outputs.is_some() || self.aborted.is_some()
    }

    pub fn outputs(&self) -> Option<&[bool]> {
        self.outputs.as_deref()
    }

    pub fn abort_reason(&self) -> Option<&str> {
        self.aborted.as_deref()
    }

    pub fn measurements(&self) -> &[MeasurementEntry] {
        &self.measurements
    }

    pub fn handle(&mut self, msg: &ProtocolMessage) -> Result<Vec<ProtocolMessage>> {
        if self.is_finished() {
            return Ok(Vec::new());
        }
        match self.step(msg) {
            Ok(out) => Ok(out),
            Err(Error::Protocol(reason)) => {
                self.aborted = Some(reason.clone());
                Ok(vec![ProtocolMessage::abort(reason)])
            }
            Err(e) => Err(e),
        }
    }

    /// Local abort, e.g. after a transport failure.
    pub fn abort(&mut self, reason: impl Into<String>) {
        if self.aborted.is_none() && self.outputs.is_none() {
            self.aborted = Some(reason.into());
        }
    }

    fn step(&mut self, msg: &ProtocolMessage) -> Result<Vec<ProtocolMessage>> {
        match msg {
            ProtocolMessage::ProgramHeader {
                circuit,
                scheme,
                copies_per_gate,
            } => {
                if self.circuit.is_some() {
                    return Err(Error::Protocol("duplicate program header".into()));
                }
                if *copies_per_gate == 0 {
                    return Err(Error::Protocol("header announces zero copies per gate".into()));
                }
                let n_in = circuit.input_ids().len();
                if n_in != self.inputs.len() {
                    return Err(Error::Protocol(format!(
                        "program takes {n_in} inputs, Bob holds {}",
                        self.inputs.len()
                    )));
                }
                self.values = vec![None; circuit.len()];
                for (&id, &b) in circuit.input_ids().iter().zip(&self.inputs) {
                    self.values[id] = Some(b);
                }
                self.circuit = Some(circuit.clone());
                self.scheme = *scheme;
                self.copies = *copies_per_gate;
                self.advance()
            }
            ProtocolMessage::StateOffer {
                gate_id,
                copy_id,
                photons,
            } => {
                let (gate, bits) = self.open_gate(*gate_id)?;
                if self.pending.is_some() {
                    return Err(Error::Protocol(format!("offer for gate {gate} after it was acked")));
                }
                if *copy_id != self.received.len() || *copy_id >= self.copies {
                    return Err(Error::Protocol(format!(
                        "unexpected copy {copy_id} of gate {gate} (expected {})",
                        self.received.len()
                    )));
                }
                if let Some(p) = photons {
                    let layout: Vec<usize> = p.iter().map(PureState::num_qubits).collect();
                    if layout != self.scheme.photon_layout(bits.len() as u32)? {
                        return Err(Error::Protocol(format!("copy {copy_id} of gate {gate} has layout {layout:?}")));
                    }
                }
                self.received.push(photons.clone());
                if self.received.len() < self.copies {
                    return Ok(Vec::new());
                }
                self.close_gate(gate, bits)
            }
            ProtocolMessage::PadReveal { gate_id, copy_id, pad } => {
                let (gate, _) = self.open_gate(*gate_id)?;
                if self.pending != Some(*copy_id) {
                    return Err(Error::Protocol(format!(
                        "pad for copy {copy_id} of gate {gate}, acked {:?}",
                        self.pending
                    )));
                }
                let entry = self.measurements.last_mut().expect("acked copy was measured");
                let decoded = entry.raw ^ pad;
                entry.decoded = Some(decoded);
                self.values[gate] = Some(decoded);
                self.pending = None;
                self.gate = None;
                self.received.clear();
                self.cursor += 1;
                self.advance()
            }
            ProtocolMessage::OutputPadReveal { pads } => {
                let c = self.circuit.as_ref().ok_or_else(|| Error::Protocol("no program header".into()))?;
                if self.gate.is_some() || self.cursor < c.len() {
                    return Err(Error::Protocol("output pads revealed before all gates ran".into()));
                }
                let outs = c.output_ids();
                if pads.len() != outs.len() {
                    return Err(Error::Protocol(format!("{} output pads for {} outputs", pads.len(), outs.len())));
                }
                let values = outs
                    .iter()
                    .zip(pads)
                    .map(|(&o, &p)| self.values[o].expect("all nodes evaluated") ^ p)
                    .collect();
                self.outputs = Some(values);
                Ok(Vec::new())
            }
            ProtocolMessage::Abort { reason } => {
                self.aborted = Some(format!("peer aborted: {reason}"));
                Ok(Vec::new())
            }
            other => Err(Error::Protocol(format!("Bob cannot accept {}", other.kind()))),
        }
    }

    fn open_gate(&self, gate_id: usize) -> Result<(usize, Vec<bool>)> {
        match &self.gate {
            Some((g, bits)) if *g == gate_id => Ok((*g, bits.clone())),
            Some((g, _)) => Err(Error::Protocol(format!("message for gate {gate_id}, but gate {g} is open"))),
            None => Err(Error::Protocol(format!("message for gate {gate_id}, but no gate is open"))),
        }
    }

    /// All copies are in: report losses, ack the first survivor and measure
    /// it. Remaining survivors are discarded unmeasured.
    fn close_gate(&mut self, gate: usize, bits: Vec<bool>) -> Result<Vec<ProtocolMessage>> {
        let mut out: Vec<ProtocolMessage> = (0..self.copies)
            .filter(|&c| self.received[c].is_none())
            .map(|copy_id| ProtocolMessage::LossReport { gate_id: gate, copy_id })
            .collect();
        let Some(copy_id) = self.received.iter().position(Option::is_some) else {
            let reason = format!("all {} copies of gate {gate} lost", self.copies);
            self.aborted = Some(reason.clone());
            out.push(ProtocolMessage::abort(reason));
            return Ok(out);
        };
        let registers = self.received[copy_id].take().expect("survivor");
        let plan = measurement_plan(self.scheme, &bits)?;
        let outcomes = measure_registers(&registers, &plan, &mut self.rng)?;
        let raw = plan.parity(&outcomes);
        self.measurements.push(MeasurementEntry {
            gate_id: gate,
            copy_id,
            input_bits: bits,
            plan,
            outcomes,
            raw,
            decoded: None,
        });
        for r in self.received.iter_mut() {
            *r = None;
        }
        self.pending = Some(copy_id);
        out.push(ProtocolMessage::ReceiveAck { gate_id: gate, copy_id });
        Ok(out)
    }

    /// Evaluates public wiring until the next gate slot (or the end).
    fn advance(&mut self) -> Result<Vec<ProtocolMessage>> {
        let c = self.circuit.as_ref().expect("header received");
        let order = c.topological_order();
        while self.cursor < order.len() {
            let id = order[self.cursor];
            let ins: Vec<bool> = c
                .sources(id)
                .iter()
                .map(|&s| self.values[s].expect("topological order"))
                .collect();
            let v = match c.node(id) {
                Node::Input { .. } => self.values[id].expect("input set"),
                Node::Const { bit } => *bit,
                Node::OtpSlot { .. } => {
                    self.gate = Some((id, ins));
                    return Ok(Vec::new());
                }
                Node::Not => !ins[0],
                Node::Xor => ins[0] ^ ins[1],
                Node::Fanout | Node::Output { .. } => ins[0],
            };
            self.values[id] = Some(v);
            self.cursor += 1;
        }
        Ok(Vec::new())
    }
}
