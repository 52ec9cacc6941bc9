//! The Alice/Bob protocol: Alice sends several encoded copies of each gate
//! over a lossy channel, Bob acknowledges and measures one survivor, and
//! Alice reveals only that copy's pad. Sessions run in process or over TCP
//! with newline-delimited JSON frames.

mod messages;
mod parties;
mod session;
mod transport;

pub use messages::{decode_message, encode_message, ProtocolMessage};
pub use parties::{Alice, Bob, MeasurementEntry};
pub use session::{
    abort_probability, derive_seed, run_session, stream_rng, LossyChannel, Party, SessionConfig, Transcript,
    TranscriptEntry,
};
pub use transport::{connect, run_alice, run_bob, serve, FramedStream};
