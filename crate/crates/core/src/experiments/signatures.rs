use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{read_file, write_json, CsvOut, ExperimentConfig, Outcome, Report};
use crate::encoding::{success_probability_with_fidelity, G1Gate, Scheme};
use crate::error::{Error, Result};
use crate::runtime::{derive_seed, stream_rng};
use crate::signature::{
    best_threshold, chi_square, dishonest_bound, hash_message, honest_pass_probability, match_histogram,
    threshold_sweep, verify, Aggregation, PrivateRecord, SignMode, SignatureBundle, SignatureRow,
    VerificationReport,
};
use crate::stats::proportion_stderr;

/// Minimum pooled expectation per bin for the χ² fit.
const CHI_SQUARE_MIN_EXPECTED: f64 = 5.0;

/// Signature file written by `sign` and read by `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureFile {
    pub big_t: usize,
    pub hash_bits: String,
    pub rows: Vec<SignatureRow>,
}

/// G1 per-line success at the given preparation fidelity.
fn line_success(fidelity: f64) -> Result<f64> {
    Ok(success_probability_with_fidelity(Scheme::G1, &G1Gate::Id.table(), fidelity)?[0])
}

/// The verifier's secret tables are regenerated from the key seed.
fn keyed_bundle(cfg: &ExperimentConfig, key: u64) -> Result<(SignatureBundle, PrivateRecord)> {
    SignatureBundle::generate(cfg.rows, cfg.big_t, &mut stream_rng(key, 0))
}

/// One full round: generate a bundle from `key`, sign `message` with
/// physical measurements, verify at the configured threshold.
pub fn sign_and_verify(
    cfg: &ExperimentConfig,
    key: u64,
    message: &[u8],
) -> Result<(Vec<SignatureRow>, VerificationReport)> {
    let (mut bundle, record) = keyed_bundle(cfg, key)?;
    let rows = bundle.sign(
        message,
        SignMode::Physical {
            fidelity: cfg.fidelity,
        },
        &mut stream_rng(key, 1),
    )?;
    let report = verify(&record, message, &rows, cfg.tau)?;
    Ok((rows, report))
}

/// Key of repetition `i`; repetition 0 uses the seed itself so that
/// `verify --seed` checks the written signature.
fn trial_key(seed: u64, i: usize) -> u64 {
    if i == 0 {
        seed
    } else {
        derive_seed(seed, i as u64)
    }
}

/// Signs the message `trials` times with fresh bundles; writes the first
/// signature to `signature.json` and per-repetition results to `sign.csv`.
pub fn cmd_sign(cfg: &ExperimentConfig, message_path: &Path) -> Result<Report> {
    cfg.validate()?;
    let message = read_file(message_path)?;
    let results: Vec<(Vec<SignatureRow>, VerificationReport)> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| sign_and_verify(cfg, trial_key(cfg.seed, i), &message))
        .collect::<Result<_>>()?;

    let dir = cfg.out_dir()?;
    let mut report = Report::new();
    let first = &results[0].0;
    let file = SignatureFile {
        big_t: cfg.big_t,
        hash_bits: super::bits_string(&hash_message(&message, cfg.rows)?),
        rows: first.clone(),
    };
    report.files.push(write_json(dir, "signature.json", &file)?);

    let mut csv = CsvOut::create(
        dir,
        "sign.csv",
        &cfg.metadata("sign"),
        &["trial", "min_matches", "mean_matches", "pass"],
    )?;
    for (i, (_, r)) in results.iter().enumerate() {
        let mean = r.match_counts.iter().sum::<usize>() as f64 / r.match_counts.len() as f64;
        csv.row(&[i.to_string(), r.min_matches().to_string(), mean.to_string(), (r.pass as u8).to_string()])?;
    }
    report.files.push(csv.finish()?);

    let p = line_success(cfg.fidelity)?;
    let exact = honest_pass_probability(cfg.big_t, cfg.tau, p, cfg.rows)?;
    let passes = results.iter().filter(|(_, r)| r.pass).count();
    let rate = passes as f64 / cfg.trials as f64;
    let se = proportion_stderr(exact, cfg.trials as u64);
    report.line(format!(
        "signed {} {} time(s): pass rate {rate:.4} vs exact {exact:.6} (stderr {se:.4}); first signature min row matches {}",
        message_path.display(),
        cfg.trials,
        results[0].1.min_matches()
    ));
    Ok(report)
}

/// Checks a signature file against the tables regenerated from `--seed`;
/// writes `verify.json`.
pub fn cmd_verify(cfg: &ExperimentConfig, message_path: &Path, signature_path: &Path) -> Result<Report> {
    cfg.validate()?;
    let message = read_file(message_path)?;
    let text = read_file(signature_path)?;
    let file: SignatureFile = serde_json::from_slice(&text).map_err(|e| Error::Parse {
        offset: crate::circuits::json_offset(&String::from_utf8_lossy(&text), &e),
        message: format!("{}: {e}", signature_path.display()),
    })?;
    if file.big_t != cfg.big_t || file.rows.iter().any(|r| r.outputs.len() != cfg.big_t) {
        return Err(Error::invalid(format!(
            "signature rows have length {}, expected T = {}",
            file.big_t, cfg.big_t
        )));
    }
    let (_, record) = keyed_bundle(cfg, cfg.seed)?;
    let v = verify(&record, &message, &file.rows, cfg.tau)?;
    let mut report = Report::new();
    report.files.push(write_json(cfg.out_dir()?, "verify.json", &v)?);
    report.line(format!(
        "{}: min row matches {} vs tau {} -> {}",
        signature_path.display(),
        v.min_matches(),
        v.tau,
        if v.pass { "VALID" } else { "INVALID" }
    ));
    if !v.pass {
        report.outcome = Outcome::Rejected;
    }
    Ok(report)
}

#[derive(Serialize)]
struct CurveSummary {
    aggregation: Aggregation,
    p: f64,
    argmax_tau: usize,
    honest_at_tau: f64,
    dishonest_at_tau: f64,
    chi_square: f64,
    dof: usize,
    rows_sampled: usize,
}

/// Threshold curves (`curves.csv`) and the empirical row-match histogram of
/// `trials` freshly signed bundles (`histogram.csv`).
pub fn cmd_sig_curves(cfg: &ExperimentConfig, single_row: bool) -> Result<Report> {
    cfg.validate()?;
    let p = line_success(cfg.fidelity)?;
    let aggregation = if single_row {
        Aggregation::SingleRow
    } else {
        Aggregation::AllRows
    };
    let sweep = threshold_sweep(cfg.big_t, cfg.rows, p, aggregation)?;
    let best = best_threshold(&sweep).expect("sweep is non-empty");
    let dir = cfg.out_dir()?;
    let meta = format!("{} aggregation={aggregation:?} p={p}", cfg.metadata("sig-curves"));
    let mut curves = CsvOut::create(dir, "curves.csv", &meta, &["tau", "honest", "dishonest", "difference"])?;
    for s in &sweep {
        curves.row(&[s.tau.to_string(), s.honest.to_string(), s.dishonest.to_string(), s.difference.to_string()])?;
    }

    let counts: Vec<usize> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| sign_and_verify(cfg, trial_key(cfg.seed, i), format!("histogram {i}").as_bytes()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flat_map(|(_, r)| r.match_counts)
        .collect();
    let bins = match_histogram(&counts, cfg.big_t, p)?;
    let (chi2, dof) = chi_square(&bins, CHI_SQUARE_MIN_EXPECTED);
    let mut hist = CsvOut::create(dir, "histogram.csv", &meta, &["bin_start", "count", "expected"])?;
    for b in &bins {
        hist.row(&[b.bin_start.to_string(), b.count.to_string(), b.expected.to_string()])?;
    }

    let mut report = Report::new();
    report.files.push(curves.finish()?);
    report.files.push(hist.finish()?);
    let summary = CurveSummary {
        aggregation,
        p,
        argmax_tau: best.tau,
        honest_at_tau: honest_pass_probability(cfg.big_t, cfg.tau, p, cfg.rows)?,
        dishonest_at_tau: dishonest_bound(cfg.big_t, cfg.tau, p, cfg.rows)?,
        chi_square: chi2,
        dof,
        rows_sampled: counts.len(),
    };
    report.files.push(write_json(dir, "sig_summary.json", &summary)?);
    report.line(format!(
        "difference maximised at tau = {} ({:?}); at tau = {}: honest {:.6}, dishonest bound {:.6}",
        best.tau, aggregation, cfg.tau, summary.honest_at_tau, summary.dishonest_at_tau
    ));
    report.line(format!(
        "histogram of {} rows vs Binomial({}, {p:.6}): chi2 = {chi2:.3} on {dof} dof",
        counts.len(),
        cfg.big_t
    ));
    Ok(report)
}
