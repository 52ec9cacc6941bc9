use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};

use super::messages::{decode_message, encode_message, ProtocolMessage};
use super::parties::{Alice, Bob};
use super::session::{finish, LossyChannel, Party, SessionConfig, Transcript};
use crate::circuits::Circuit;
use crate::error::{Error, Result};

/// Newline-delimited JSON framing over any byte stream.
pub struct FramedStream<R, W> {
    reader: R,
    writer: W,
    line: Vec<u8>,
}

impl<R: BufRead, W: Write> FramedStream<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        Self {
            reader,
            writer,
            line: Vec::new(),
        }
    }

    pub fn send(&mut self, m: &ProtocolMessage) -> Result<()> {
        self.writer
            .write_all(&encode_message(m))
            .and_then(|_| self.writer.flush())
            .map_err(|e| Error::io("peer", e))
    }

    /// Next frame, or `None` on a clean end of stream.
    pub fn recv(&mut self) -> Result<Option<ProtocolMessage>> {
        self.line.clear();
        let n = self
            .reader
            .read_until(b'\n', &mut self.line)
            .map_err(|e| Error::io("peer", e))?;
        if n == 0 {
            return Ok(None);
        }
        decode_message(&self.line).map(Some)
    }
}

impl FramedStream<BufReader<TcpStream>, TcpStream> {
    pub fn tcp(stream: TcpStream) -> Result<Self> {
        let reader = BufReader::new(stream.try_clone().map_err(|e| Error::io("socket", e))?);
        Ok(Self::new(reader, stream))
    }
}

/// Bytes that cannot be parsed abort the session; the peer is told why.
fn recv_or_abort<R: BufRead, W: Write>(io: &mut FramedStream<R, W>) -> std::result::Result<ProtocolMessage, String> {
    match io.recv() {
        Ok(Some(m)) => Ok(m),
        Ok(None) => Err("connection closed mid-session".into()),
        Err(e @ Error::Parse { .. }) => {
            let reason = format!("malformed frame: {e}");
            let _ = io.send(&ProtocolMessage::abort(reason.clone()));
            Err(reason)
        }
        Err(e) => Err(e.to_string()),
    }
}

/// Alice's endpoint. The lossy channel is applied on her side before each
/// offer is written, so both endpoints see the same post-loss frames.
pub fn run_alice<R: BufRead, W: Write>(
    io: &mut FramedStream<R, W>,
    mut alice: Alice,
    mut channel: LossyChannel,
    config: SessionConfig,
) -> Result<Transcript> {
    let mut t = Transcript::new(config);
    let mut outbox = alice.start()?;
    loop {
        for m in outbox.drain(..) {
            let m = channel.transmit(m);
            t.record(Party::Alice, &m);
            io.send(&m)?;
        }
        if alice.is_finished() {
            break;
        }
        match recv_or_abort(io) {
            Ok(msg) => {
                t.record(Party::Bob, &msg);
                outbox = alice.handle(&msg)?;
            }
            Err(reason) => {
                t.abort_reason = Some(reason);
                break;
            }
        }
    }
    if t.abort_reason.is_none() {
        t.abort_reason = alice.abort_reason().map(str::to_owned);
    }
    Ok(t)
}

/// Bob's endpoint; returns his transcript with measurements and outputs.
pub fn run_bob<R: BufRead, W: Write>(
    io: &mut FramedStream<R, W>,
    mut bob: Bob,
    config: SessionConfig,
) -> Result<Transcript> {
    let mut t = Transcript::new(config);
    while !bob.is_finished() {
        match recv_or_abort(io) {
            Ok(msg) => {
                t.record(Party::Alice, &msg);
                if let ProtocolMessage::ProgramHeader {
                    scheme, copies_per_gate, ..
                } = &msg
                {
                    t.config.scheme = *scheme;
                    t.config.copies_per_gate = *copies_per_gate;
                }
                for r in bob.handle(&msg)? {
                    t.record(Party::Bob, &r);
                    io.send(&r)?;
                }
            }
            Err(reason) => bob.abort(reason),
        }
    }
    finish(&mut t, &bob, None);
    Ok(t)
}

/// Accepts one connection and plays Alice on it.
pub fn serve(listener: &TcpListener, circuit: &Circuit, config: &SessionConfig) -> Result<Transcript> {
    let alice = config.alice(circuit)?;
    let channel = config.channel()?;
    let (stream, _) = listener.accept().map_err(|e| Error::io("listener", e))?;
    let mut io = FramedStream::tcp(stream)?;
    run_alice(&mut io, alice, channel, *config)
}

/// Connects to a serving Alice and plays Bob. Only the seed of `config` is
/// used for Bob's measurements; scheme and copies come from the header.
pub fn connect(addr: impl ToSocketAddrs, bob_inputs: &[bool], config: &SessionConfig) -> Result<Transcript> {
    let stream = TcpStream::connect(addr).map_err(|e| Error::io("connect", e))?;
    let mut io = FramedStream::tcp(stream)?;
    run_bob(&mut io, config.bob(bob_inputs.to_vec()), *config)
}
