use serde::Serialize;

use super::{write_json, CsvOut, ExperimentConfig, Report};
use crate::analysis::{
    certify_optimal, classical_pair_floor, classical_parity_floor, confusion_by_distance, gate_ensemble, jrf_iterate,
    pgm, quantum_line_and_parity, tradeoff_curve, two_copy_circuit, Certificate, ErrorMix,
};
use crate::encoding::G1Gate;
use crate::error::Result;

/// Tolerance of the optimality certificates.
pub const CERTIFICATE_TOL: f64 = 1e-8;
/// JRF iterations compared against the PGM.
const JRF_ITERATIONS: usize = 5;
/// Largest copy count used for k = 2 ensembles.
const MAX_K2_COPIES: usize = 3;

#[derive(Debug, Clone, Serialize)]
struct CertificationEntry {
    k: u32,
    copies: usize,
    dim: usize,
    states: usize,
    pgm_success: f64,
    jrf_success: f64,
    jrf_pgm_distance: f64,
    error_mix: ErrorMix,
    certificate: Certificate,
}

fn certification(k: u32, copies: usize) -> Result<CertificationEntry> {
    let states = gate_ensemble(k, copies)?;
    let n = states.len();
    let priors = vec![1.0 / n as f64; n];
    let p = pgm(&states, &priors)?;
    let j = jrf_iterate(&states, &priors, JRF_ITERATIONS)?;
    Ok(CertificationEntry {
        k,
        copies,
        dim: states[0].rows(),
        states: n,
        pgm_success: p.average_success(&states),
        jrf_success: j.average_success(&states),
        jrf_pgm_distance: p.distance(&j),
        error_mix: confusion_by_distance(&p, &states),
        certificate: certify_optimal(&p, &states, CERTIFICATE_TOL)?,
    })
}

/// Security tables: inequality violations for odd copy counts up to
/// `--copies` (default 5), quantum/classical tradeoff points, PGM
/// optimality certificates for k ≤ 2 and copies ≤ 3, and two-copy circuit
/// fidelities.
pub fn cmd_bounds(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let dir = cfg.out_dir()?;
    let meta = cfg.metadata("bounds");
    let odd: Vec<usize> = (1..=cfg.copies).step_by(2).collect();
    let mut report = Report::new();

    let mut viol = CsvOut::create(
        dir,
        "violations.csv",
        &meta,
        &["copies", "f1", "f2", "classical_floor", "violated", "f1_closed", "f2_closed"],
    )?;
    for &c in &odd {
        let lp = quantum_line_and_parity(c)?;
        viol.row(&[
            c.to_string(),
            lp.f1_numeric.to_string(),
            lp.f2_numeric.to_string(),
            classical_parity_floor(lp.f1_numeric).to_string(),
            lp.violates_classical().to_string(),
            lp.f1_closed.to_string(),
            lp.f2_closed.to_string(),
        ])?;
        report.line(format!(
            "c={c}: F1 = {:.4}, F2 = {:.4}, classical F2 >= {:.4} -> violated = {}",
            lp.f1_numeric,
            lp.f2_numeric,
            classical_parity_floor(lp.f1_numeric),
            lp.violates_classical()
        ));
    }
    report.files.push(viol.finish()?);

    let mut trade = CsvOut::create(
        dir,
        "tradeoff.csv",
        &meta,
        &["k", "copies", "p1", "p1_tilde", "classical_pair_floor"],
    )?;
    for k in [1u32, 2] {
        let cs: Vec<usize> = odd
            .iter()
            .copied()
            .filter(|&c| k == 1 || c <= MAX_K2_COPIES)
            .collect();
        for t in tradeoff_curve(k, &cs)? {
            trade.row(&[
                k.to_string(),
                t.copies.to_string(),
                t.p1.to_string(),
                t.p1_tilde.to_string(),
                classical_pair_floor(k, t.p1).to_string(),
            ])?;
        }
    }
    report.files.push(trade.finish()?);

    let entries: Vec<CertificationEntry> = [1u32, 2]
        .iter()
        .flat_map(|&k| (1..=MAX_K2_COPIES).map(move |c| (k, c)))
        .map(|(k, c)| certification(k, c))
        .collect::<Result<_>>()?;
    let all_optimal = entries.iter().all(|e| e.certificate.optimal);
    report.line(format!(
        "PGM certified optimal for {} of {} ensembles (k <= 2, copies <= {MAX_K2_COPIES}, tol {CERTIFICATE_TOL:e}): {all_optimal}",
        entries.iter().filter(|e| e.certificate.optimal).count(),
        entries.len()
    ));
    report.files.push(write_json(dir, "certification.json", &entries)?);

    let mut two = CsvOut::create(dir, "two_copy.csv", &meta, &["table", "fidelity", "oracle_calls"])?;
    let mut min_f = f64::INFINITY;
    for g in G1Gate::ALL {
        let (f, calls) = two_copy_circuit(&g.table())?;
        min_f = min_f.min(f);
        two.row(&[g.table().label(), f.to_string(), calls.to_string()])?;
    }
    report.files.push(two.finish()?);
    report.line(format!("two-copy circuit: minimum fidelity {min_f:.12} with one oracle call"));
    Ok(report)
}
