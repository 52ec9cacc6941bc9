use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::{bits_string, write_json, CsvOut, ExperimentConfig, Report};
use crate::circuits::{compile_millionaires, predict_success};
use crate::encoding::{success_probability_with_fidelity, GateTable, Scheme};
use crate::error::{Error, Result};
use crate::runtime::{derive_seed, run_session, ProtocolMessage, SessionConfig, Transcript};
use crate::stats::proportion_stderr;

/// Aggregate of many independent comparator sessions for one input pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MillionairesStats {
    pub alice: String,
    pub bob: String,
    /// `[bob > alice]`.
    pub ideal: bool,
    pub predicted: f64,
    pub sessions: usize,
    pub completed: usize,
    pub correct: usize,
    pub aborts: usize,
    /// Gates for which Alice sent copies, over all sessions.
    pub gates_opened: usize,
    /// Gates whose copies were all lost.
    pub gate_aborts: usize,
}

impl MillionairesStats {
    pub fn empirical(&self) -> f64 {
        self.correct as f64 / self.completed.max(1) as f64
    }

    pub fn stderr(&self) -> f64 {
        proportion_stderr(self.predicted, self.completed.max(1) as u64)
    }

    pub fn gate_abort_rate(&self) -> f64 {
        self.gate_aborts as f64 / self.gates_opened.max(1) as f64
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    completed: usize,
    correct: usize,
    aborts: usize,
    gates_opened: usize,
    gate_aborts: usize,
}

impl Tally {
    fn of(t: &Transcript, ideal: bool) -> Self {
        let opened: BTreeSet<usize> = t
            .messages
            .iter()
            .filter_map(|e| match e.message {
                ProtocolMessage::StateOffer { gate_id, .. } => Some(gate_id),
                _ => None,
            })
            .collect();
        let lost_gate = t.aborted() && t.measurements.len() < opened.len();
        let correct = t.outputs.as_ref().is_some_and(|o| o[0] == ideal);
        Self {
            completed: t.outputs.is_some() as usize,
            correct: correct as usize,
            aborts: t.aborted() as usize,
            gates_opened: opened.len(),
            gate_aborts: lost_gate as usize,
        }
    }

    fn add(self, o: Self) -> Self {
        Self {
            completed: self.completed + o.completed,
            correct: self.correct + o.correct,
            aborts: self.aborts + o.aborts,
            gates_opened: self.gates_opened + o.gates_opened,
            gate_aborts: self.gate_aborts + o.gate_aborts,
        }
    }
}

/// Each of Alice's bits flipped in turn, most significant first.
pub fn deviations(alice: &[bool]) -> Vec<Vec<bool>> {
    (0..alice.len())
        .map(|i| {
            let mut b = alice.to_vec();
            b[i] = !b[i];
            b
        })
        .collect()
}

/// Per-line success of the comparator's AND/OR slots; exact when every
/// line has the same success probability (always at unit fidelity).
fn slot_line_success(scheme: Scheme, fidelity: f64) -> Result<f64> {
    let p = success_probability_with_fidelity(scheme, &GateTable::and(), fidelity)?;
    Ok(p.iter().sum::<f64>() / p.len() as f64)
}

/// Runs `sessions` protocol sessions; session `i` is seeded with
/// `derive_seed(base.seed, i)`.
pub fn millionaires_batch(
    alice: &[bool],
    bob: &[bool],
    base: &SessionConfig,
    sessions: usize,
) -> Result<MillionairesStats> {
    if alice.len() != bob.len() {
        return Err(Error::invalid(format!(
            "Alice has {} bits, Bob has {}",
            alice.len(),
            bob.len()
        )));
    }
    base.validate()?;
    let circuit = compile_millionaires(alice, alice.len())?;
    let ideal = circuit.ideal_eval(bob)?[0];
    let predicted = predict_success(&circuit, bob, slot_line_success(base.scheme, base.fidelity)?)?.per_output[0];
    let tally = (0..sessions)
        .into_par_iter()
        .map(|i| {
            let cfg = SessionConfig {
                seed: derive_seed(base.seed, i as u64),
                ..*base
            };
            run_session(&circuit, bob, &cfg).map(|t| Tally::of(&t, ideal))
        })
        .try_reduce(Tally::default, |a, b| Ok(a.add(b)))?;
    Ok(MillionairesStats {
        alice: bits_string(alice),
        bob: bits_string(bob),
        ideal,
        predicted,
        sessions,
        completed: tally.completed,
        correct: tally.correct,
        aborts: tally.aborts,
        gates_opened: tally.gates_opened,
        gate_aborts: tally.gate_aborts,
    })
}

/// Comparator sessions for each of Bob's inputs (by default the single-bit
/// deviations of Alice's number); writes `millionaires.csv` and the
/// transcript of the first session of the first pair.
pub fn cmd_millionaires(
    cfg: &ExperimentConfig,
    alice: &[bool],
    bobs: &[Vec<bool>],
    randomize: bool,
) -> Result<Report> {
    cfg.validate()?;
    let scheme = cfg.scheme.unwrap_or(Scheme::LinearG2);
    let session = |seed| SessionConfig {
        scheme,
        copies_per_gate: cfg.copies,
        loss: cfg.loss,
        fidelity: cfg.fidelity,
        randomize,
        seed,
    };
    let default_bobs;
    let bobs = if bobs.is_empty() {
        default_bobs = deviations(alice);
        &default_bobs
    } else {
        bobs
    };
    let stats: Vec<MillionairesStats> = bobs
        .iter()
        .enumerate()
        .map(|(j, bob)| millionaires_batch(alice, bob, &session(derive_seed(cfg.seed, j as u64)), cfg.trials))
        .collect::<Result<_>>()?;

    let dir = cfg.out_dir()?;
    let mut csv = CsvOut::create(
        dir,
        "millionaires.csv",
        &format!("{} randomize={randomize}", cfg.metadata("millionaires")),
        &[
            "alice",
            "bob",
            "ideal",
            "predicted",
            "sessions",
            "completed",
            "aborts",
            "empirical",
            "stderr",
            "z",
            "gate_abort_rate",
            "expected_gate_abort_rate",
        ],
    )?;
    let expected_gate_abort = cfg.loss.powi(cfg.copies as i32);
    let mut report = Report::new();
    for s in &stats {
        let z = (s.empirical() - s.predicted) / s.stderr();
        csv.row(&[
            s.alice.clone(),
            s.bob.clone(),
            (s.ideal as u8).to_string(),
            s.predicted.to_string(),
            s.sessions.to_string(),
            s.completed.to_string(),
            s.aborts.to_string(),
            s.empirical().to_string(),
            s.stderr().to_string(),
            z.to_string(),
            s.gate_abort_rate().to_string(),
            expected_gate_abort.to_string(),
        ])?;
        report.line(format!(
            "alice {} vs bob {}: predicted {:.5}, empirical {:.5} ± {:.5} over {} completed sessions ({} aborted)",
            s.alice,
            s.bob,
            s.predicted,
            s.empirical(),
            s.stderr(),
            s.completed,
            s.aborts
        ));
    }
    report.files.push(csv.finish()?);
    if let Some(bob) = bobs.first() {
        let circuit = compile_millionaires(alice, alice.len())?;
        let seed = derive_seed(derive_seed(cfg.seed, 0), 0);
        let t = run_session(&circuit, bob, &session(seed))?;
        report.files.push(write_json(dir, "millionaires_transcript.json", &t)?);
    }
    Ok(report)
}
