use std::net::{TcpListener, ToSocketAddrs};

use super::{bits_string, write_json, ExperimentConfig, Outcome, Report};
use crate::circuits::compile_millionaires;
use crate::encoding::Scheme;
use crate::error::{Error, Result};
use crate::runtime::{connect, serve, SessionConfig, Transcript};

fn session_config(cfg: &ExperimentConfig, randomize: bool) -> SessionConfig {
    SessionConfig {
        scheme: cfg.scheme.unwrap_or(Scheme::LinearG2),
        copies_per_gate: cfg.copies,
        loss: cfg.loss,
        fidelity: cfg.fidelity,
        randomize,
        seed: cfg.seed,
    }
}

fn finish(mut report: Report, t: &Transcript, cfg: &ExperimentConfig, name: &str) -> Result<Report> {
    report.files.push(write_json(cfg.out_dir()?, name, t)?);
    if let Some(reason) = &t.abort_reason {
        report.line(format!("session aborted: {reason}"));
        report.outcome = Outcome::Aborted(reason.clone());
    }
    Ok(report)
}

/// Plays Alice for one comparator session on `listener`; `on_ready` is
/// called with the bound address before blocking on the connection.
pub fn cmd_serve(
    cfg: &ExperimentConfig,
    listener: &TcpListener,
    alice: &[bool],
    randomize: bool,
    on_ready: impl FnOnce(&str),
) -> Result<Report> {
    cfg.validate()?;
    let circuit = compile_millionaires(alice, alice.len())?;
    let session = session_config(cfg, randomize);
    session.validate()?;
    let addr = listener
        .local_addr()
        .map_err(|e| Error::io("listener", e))?
        .to_string();
    on_ready(&addr);
    let t = serve(listener, &circuit, &session)?;
    let mut report = Report::new();
    report.line(format!(
        "served {} gates to a peer, {} frames exchanged",
        circuit.slot_ids().len(),
        t.messages.len()
    ));
    finish(report, &t, cfg, "alice_transcript.json")
}

/// Plays Bob against a serving Alice at `addr`.
pub fn cmd_connect(cfg: &ExperimentConfig, addr: impl ToSocketAddrs, bob: &[bool]) -> Result<Report> {
    cfg.validate()?;
    let t = connect(addr, bob, &session_config(cfg, false))?;
    let mut report = Report::new();
    if let Some(out) = &t.outputs {
        report.line(format!("output bits: {}", bits_string(out)));
    }
    finish(report, &t, cfg, "bob_transcript.json")
}
