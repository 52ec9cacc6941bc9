use std::collections::{HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::messages::ProtocolMessage;
use super::parties::{Alice, Bob, MeasurementEntry};
use crate::circuits::Circuit;
use crate::encoding::{check_fidelity, Scheme};
use crate::error::{Error, Result};

/// Independent random stream `stream` of the run seeded by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed of trial `index` within a batch seeded by `seed` (splitmix64 step),
/// so parallel trials are reproducible regardless of scheduling.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) const ALICE_STREAM: u64 = 0;
pub(crate) const BOB_STREAM: u64 = 1;
pub(crate) const CHANNEL_STREAM: u64 = 2;

/// Everything that determines a session besides the program and Bob's input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub scheme: Scheme,
    pub copies_per_gate: usize,
    pub loss: f64,
    pub fidelity: f64,
    pub randomize: bool,
    pub seed: u64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::LinearG2,
            copies_per_gate: 1,
            loss: 0.0,
            fidelity: 1.0,
            randomize: false,
            seed: 0,
        }
    }
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.copies_per_gate == 0 {
            return Err(Error::invalid("copies per gate must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.loss) {
            return Err(Error::invalid(format!("loss must lie in [0, 1), got {}", self.loss)));
        }
        check_fidelity(self.fidelity)
    }

    pub fn alice(&self, circuit: &Circuit) -> Result<Alice> {
        self.validate()?;
        Alice::new(
            circuit,
            self.scheme,
            self.copies_per_gate,
            self.fidelity,
            self.randomize,
            stream_rng(self.seed, ALICE_STREAM),
        )
    }

    pub fn bob(&self, inputs: Vec<bool>) -> Bob {
        Bob::new(inputs, stream_rng(self.seed, BOB_STREAM))
    }

    pub fn channel(&self) -> Result<LossyChannel> {
        LossyChannel::new(self.loss, stream_rng(self.seed, CHANNEL_STREAM))
    }
}

/// Drops each photon payload independently with probability `loss`; every
/// other message passes untouched.
#[derive(Debug, Clone)]
pub struct LossyChannel {
    loss: f64,
    rng: ChaCha8Rng,
}

impl LossyChannel {
    pub fn new(loss: f64, rng: ChaCha8Rng) -> Result<Self> {
        if !(0.0..1.0).contains(&loss) {
            return Err(Error::invalid(format!("loss must lie in [0, 1), got {loss}")));
        }
        Ok(Self { loss, rng })
    }

    pub fn transmit(&mut self, msg: ProtocolMessage) -> ProtocolMessage {
        match msg {
            ProtocolMessage::StateOffer {
                gate_id,
                copy_id,
                photons: Some(p),
            } => {
                let lost = self.loss > 0.0 && self.rng.random::<f64>() < self.loss;
                ProtocolMessage::StateOffer {
                    gate_id,
                    copy_id,
                    photons: (!lost).then_some(p),
                }
            }
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Alice,
    Bob,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub from: Party,
    pub message: ProtocolMessage,
}

/// The wire as seen by one endpoint (Bob's view for in-process runs):
/// offers after the channel, in delivery order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub config: SessionConfig,
    pub messages: Vec<TranscriptEntry>,
    pub measurements: Vec<MeasurementEntry>,
    pub outputs: Option<Vec<bool>>,
    pub abort_reason: Option<String>,
}

impl Transcript {
    pub fn new(config: SessionConfig) -> Self {
        Self {
            config,
            messages: Vec::new(),
            measurements: Vec::new(),
            outputs: None,
            abort_reason: None,
        }
    }

    pub(crate) fn record(&mut self, from: Party, message: &ProtocolMessage) {
        self.messages.push(TranscriptEntry {
            from,
            message: message.clone(),
        });
    }

    pub fn aborted(&self) -> bool {
        self.abort_reason.is_some()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcripts serialize")
    }

    /// Same messages, measurements, outputs and abort status, ignoring the
    /// recorded configuration.
    pub fn same_run(&self, other: &Transcript) -> bool {
        self.messages == other.messages
            && self.measurements == other.measurements
            && self.outputs == other.outputs
            && self.abort_reason.is_some() == other.abort_reason.is_some()
    }

    /// Checks the pad-reveal discipline: every pad reveal answers the one
    /// ack of its gate, no copy is acked or measured twice, no acked copy
    /// was reported lost, and Bob measured exactly the acked copies.
    pub fn check_discipline(&self) -> Result<()> {
        let mut acked: Vec<(usize, usize)> = Vec::new();
        let mut acked_gates = HashSet::new();
        let mut lost = HashSet::new();
        let mut revealed = HashSet::new();
        for e in &self.messages {
            match (e.from, &e.message) {
                (Party::Bob, ProtocolMessage::LossReport { gate_id, copy_id }) => {
                    lost.insert((*gate_id, *copy_id));
                }
                (Party::Bob, ProtocolMessage::ReceiveAck { gate_id, copy_id }) => {
                    if !acked_gates.insert(*gate_id) {
                        return Err(Error::Protocol(format!("gate {gate_id} acked twice")));
                    }
                    if lost.contains(&(*gate_id, *copy_id)) {
                        return Err(Error::Protocol(format!("acked copy {copy_id} of gate {gate_id} was lost")));
                    }
                    acked.push((*gate_id, *copy_id));
                }
                (Party::Alice, ProtocolMessage::PadReveal { gate_id, copy_id, .. }) => {
                    if !acked.contains(&(*gate_id, *copy_id)) {
                        return Err(Error::Protocol(format!(
                            "pad of copy {copy_id} of gate {gate_id} revealed without an ack"
                        )));
                    }
                    if !revealed.insert(*gate_id) {
                        return Err(Error::Protocol(format!("second pad revealed for gate {gate_id}")));
                    }
                }
                _ => {}
            }
        }
        let measured: Vec<(usize, usize)> = self.measurements.iter().map(|m| (m.gate_id, m.copy_id)).collect();
        if measured.len() != measured.iter().collect::<HashSet<_>>().len() {
            return Err(Error::Protocol("a copy was measured twice".into()));
        }
        if !measured.is_empty() && measured != acked {
            return Err(Error::Protocol(format!("measured {measured:?} but acked {acked:?}")));
        }
        Ok(())
    }
}

/// Runs a whole session in process: Alice's messages go through the lossy
/// channel, Bob's straight back, strictly in order.
pub fn run_session(circuit: &Circuit, bob_inputs: &[bool], config: &SessionConfig) -> Result<Transcript> {
    let mut alice = config.alice(circuit)?;
    let mut bob = config.bob(bob_inputs.to_vec());
    let mut channel = config.channel()?;
    let mut t = Transcript::new(*config);

    let mut queue: VecDeque<(Party, ProtocolMessage)> = VecDeque::new();
    queue.extend(alice.start()?.into_iter().map(|m| (Party::Alice, m)));
    while let Some((from, msg)) = queue.pop_front() {
        match from {
            Party::Alice => {
                let msg = channel.transmit(msg);
                t.record(Party::Alice, &msg);
                let replies = bob.handle(&msg)?;
                for r in replies {
                    t.record(Party::Bob, &r);
                    queue.push_back((Party::Bob, r));
                }
            }
            Party::Bob => {
                queue.extend(alice.handle(&msg)?.into_iter().map(|m| (Party::Alice, m)));
            }
        }
    }
    finish(&mut t, &bob, alice.abort_reason());
    Ok(t)
}

pub(crate) fn finish(t: &mut Transcript, bob: &Bob, alice_abort: Option<&str>) {
    t.measurements = bob.measurements().to_vec();
    t.outputs = bob.outputs().map(<[bool]>::to_vec);
    t.abort_reason = bob
        .abort_reason()
        .map(str::to_owned)
        .or_else(|| alice_abort.map(str::to_owned));
    if t.outputs.is_none() && t.abort_reason.is_none() {
        t.abort_reason = Some("session ended before outputs were revealed".into());
    }
}

/// Probability that at least one gate loses all of its copies.
pub fn abort_probability(gates: usize, copies: usize, loss: f64) -> f64 {
    1.0 - (1.0 - loss.powi(copies as i32)).powi(gates as i32)
}
