use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::circuits::{json_offset, Circuit};
use crate::encoding::{PureState, Scheme};
use crate::error::{Error, Result};

/// One frame of the Alice/Bob protocol. On the wire each message is a single
/// line of JSON tagged by `type`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProtocolMessage {
    /// Public program description: wiring plus slot arities, no tables.
    ProgramHeader {
        circuit: Circuit,
        scheme: Scheme,
        copies_per_gate: usize,
    },
    /// One encoded copy of a gate. `photons` is the simulated quantum
    /// payload and is `None` when the channel lost it.
    StateOffer {
        gate_id: usize,
        copy_id: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        photons: Option<Vec<PureState>>,
    },
    ReceiveAck {
        gate_id: usize,
        copy_id: usize,
    },
    LossReport {
        gate_id: usize,
        copy_id: usize,
    },
    PadReveal {
        gate_id: usize,
        copy_id: usize,
        #[serde(with = "bit")]
        pad: bool,
    },
    OutputPadReveal {
        #[serde(with = "bits")]
        pads: Vec<bool>,
    },
    Abort {
        reason: String,
    },
}

impl ProtocolMessage {
    pub fn kind(&self) -> &'static str {
        match self {
            ProtocolMessage::ProgramHeader { .. } => "program_header",
            ProtocolMessage::StateOffer { .. } => "state_offer",
            ProtocolMessage::ReceiveAck { .. } => "receive_ack",
            ProtocolMessage::LossReport { .. } => "loss_report",
            ProtocolMessage::PadReveal { .. } => "pad_reveal",
            ProtocolMessage::OutputPadReveal { .. } => "output_pad_reveal",
            ProtocolMessage::Abort { .. } => "abort",
        }
    }

    pub(crate) fn abort(reason: impl Into<String>) -> Self {
        ProtocolMessage::Abort { reason: reason.into() }
    }
}

mod bit {
    use super::*;

    pub fn serialize<S: Serializer>(b: &bool, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(*b as u8)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(serde::de::Error::custom(format!("bit must be 0 or 1, got {other}"))),
        }
    }
}

mod bits {
    use super::*;

    pub fn serialize<S: Serializer>(b: &[bool], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(b.iter().map(|&x| x as u8))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<bool>, D::Error> {
        Vec::<u8>::deserialize(d)?
            .into_iter()
            .map(|x| match x {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(serde::de::Error::custom(format!("bit must be 0 or 1, got {other}"))),
            })
            .collect()
    }
}

/// Single-line JSON frame terminated by `\n`.
pub fn encode_message(m: &ProtocolMessage) -> Vec<u8> {
    let mut out = serde_json::to_vec(m).expect("protocol messages serialize");
    out.push(b'\n');
    out
}

/// Parses one frame; a trailing newline is optional.
pub fn decode_message(bytes: &[u8]) -> Result<ProtocolMessage> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
        offset: e.valid_up_to(),
        message: "frame is not valid UTF-8".into(),
    })?;
    let line = text.strip_suffix('\n').unwrap_or(text);
    let line = line.strip_suffix('\r').unwrap_or(line);
    if line.contains('\n') {
        return Err(Error::Parse {
            offset: line.find('\n').unwrap_or(0),
            message: "frame spans more than one line".into(),
        });
    }
    serde_json::from_str(line).map_err(|e| Error::Parse {
        offset: json_offset(line, &e),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::compile_millionaires;
    use crate::encoding::G1Gate;

    fn corpus() -> Vec<ProtocolMessage> {
        vec![
            ProtocolMessage::ProgramHeader {
                circuit: compile_millionaires(&[true, false], 2).unwrap().redacted(),
                scheme: Scheme::LinearG2,
                copies_per_gate: 8,
            },
            ProtocolMessage::StateOffer {
                gate_id: 3,
                copy_id: 0,
                photons: Some(vec![G1Gate::Not.state()]),
            },
            ProtocolMessage::StateOffer {
                gate_id: 3,
                copy_id: 1,
                photons: None,
            },
            ProtocolMessage::ReceiveAck { gate_id: 3, copy_id: 0 },
            ProtocolMessage::LossReport { gate_id: 3, copy_id: 1 },
            ProtocolMessage::PadReveal {
                gate_id: 3,
                copy_id: 1,
                pad: true,
            },
            ProtocolMessage::OutputPadReveal { pads: vec![true, false] },
            ProtocolMessage::abort("all copies lost"),
        ]
    }

    #[test]
    fn frames_round_trip() {
        for m in corpus() {
            let b = encode_message(&m);
            assert_eq!(b.iter().filter(|&&c| c == b'\n').count(), 1);
            let back = decode_message(&b).unwrap();
            assert_eq!(back, m);
            assert_eq!(encode_message(&back), b);
        }
    }

    #[test]
    fn pad_reveal_format() {
        let m = ProtocolMessage::PadReveal {
            gate_id: 3,
            copy_id: 1,
            pad: true,
        };
        let s = String::from_utf8(encode_message(&m)).unwrap();
        assert_eq!(s, "{\"type\":\"pad_reveal\",\"gate_id\":3,\"copy_id\":1,\"pad\":1}\n");
    }

    #[test]
    fn malformed_frames_report_offsets() {
        let full = encode_message(&ProtocolMessage::ReceiveAck { gate_id: 1, copy_id: 2 });
        for cut in 1..full.len() - 2 {
            match decode_message(&full[..cut]) {
                Err(Error::Parse { offset, .. }) => assert!(offset <= cut),
                other => panic!("cut {cut}: {other:?}"),
            }
        }
        assert!(matches!(decode_message(b"{\"type\":\"teleport\"}"), Err(Error::Parse { .. })));
        assert!(matches!(
            decode_message(b"{\"type\":\"pad_reveal\",\"gate_id\":1,\"copy_id\":0,\"pad\":2}"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(decode_message(&[0xff, 0xfe]), Err(Error::Parse { offset: 0, .. })));
        assert!(decode_message(b"").is_err());
    }
}
