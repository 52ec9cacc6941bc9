use rayon::prelude::*;
use serde::Serialize;

use super::{bits_string, CsvOut, ExperimentConfig, Report};
use crate::encoding::{bits_of, success_probability_with_fidelity, GateOtp, GateTable, Scheme};
use crate::error::Result;
use crate::runtime::{derive_seed, stream_rng};
use crate::stats::proportion_stderr;

/// Monte Carlo estimate of one (scheme, table, input) success probability
/// next to its exact value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateCell {
    pub scheme: Scheme,
    pub table: GateTable,
    pub input: usize,
    pub trials: usize,
    pub successes: usize,
    pub empirical: f64,
    pub exact: f64,
    pub stderr: f64,
}

impl GateCell {
    /// Deviation from the exact value in units of its standard error.
    pub fn z(&self) -> f64 {
        if self.stderr == 0.0 {
            return if self.empirical == self.exact { 0.0 } else { f64::INFINITY };
        }
        (self.empirical - self.exact) / self.stderr
    }
}

/// Encodes `table` afresh for every trial, measures line `input` and counts
/// correct readings.
pub fn gate_cell(
    scheme: Scheme,
    table: &GateTable,
    input: usize,
    fidelity: f64,
    trials: usize,
    seed: u64,
) -> Result<GateCell> {
    let exact = success_probability_with_fidelity(scheme, table, fidelity)?[input];
    let bits = bits_of(input, table.k() as usize);
    let want = table.eval(input);
    let mut rng = stream_rng(seed, 0);
    let mut successes = 0;
    for _ in 0..trials {
        let mut otp = GateOtp::encode(scheme, table, &mut rng)?;
        otp.apply_noise(fidelity, &mut rng)?;
        if otp.evaluate(&bits, &mut rng)? == want {
            successes += 1;
        }
    }
    let empirical = successes as f64 / trials as f64;
    Ok(GateCell {
        scheme,
        table: table.clone(),
        input,
        trials,
        successes,
        empirical,
        exact,
        stderr: proportion_stderr(exact, trials as u64),
    })
}

/// Every G2 table × input under each scheme (linear and elliptical unless a
/// scheme is selected); writes `gates.csv`.
pub fn cmd_gates(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let schemes = match cfg.scheme {
        Some(s) => vec![s],
        None => vec![Scheme::LinearG2, Scheme::EllipticalG2],
    };
    let tables = GateTable::all(2)?;
    let jobs: Vec<(Scheme, &GateTable, usize)> = schemes
        .iter()
        .flat_map(|&s| tables.iter().flat_map(move |t| (0..4).map(move |i| (s, t, i))))
        .collect();
    let cells: Vec<GateCell> = jobs
        .par_iter()
        .enumerate()
        .map(|(n, &(s, t, i))| gate_cell(s, t, i, cfg.fidelity, cfg.trials, derive_seed(cfg.seed, n as u64)))
        .collect::<Result<_>>()?;

    let dir = cfg.out_dir()?;
    let mut csv = CsvOut::create(
        dir,
        "gates.csv",
        &cfg.metadata("gates"),
        &["scheme", "table", "input", "trials", "successes", "empirical", "exact", "stderr", "z"],
    )?;
    for c in &cells {
        csv.row(&[
            c.scheme.to_string(),
            c.table.label(),
            bits_string(&bits_of(c.input, 2)),
            c.trials.to_string(),
            c.successes.to_string(),
            c.empirical.to_string(),
            c.exact.to_string(),
            c.stderr.to_string(),
            c.z().to_string(),
        ])?;
    }
    let mut report = Report::new();
    report.files.push(csv.finish()?);
    for s in &schemes {
        let mine: Vec<&GateCell> = cells.iter().filter(|c| c.scheme == *s).collect();
        let mean = mine.iter().map(|c| c.empirical).sum::<f64>() / mine.len() as f64;
        let exact = mine.iter().map(|c| c.exact).sum::<f64>() / mine.len() as f64;
        let worst = mine.iter().map(|c| c.z().abs()).fold(0.0, f64::max);
        let outside = mine.iter().filter(|c| c.z().abs() > 3.0).count();
        report.line(format!(
            "{s}: mean empirical {mean:.5} vs exact {exact:.5} over {} cells; max |z| = {worst:.2}, {outside} beyond 3 sigma",
            mine.len()
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_match_exact_values() {
        for s in [Scheme::LinearG2, Scheme::EllipticalG2] {
            let c = gate_cell(s, &GateTable::and(), 3, 1.0, 4000, 1).unwrap();
            assert_eq!(c.exact, 0.75);
            assert!(c.z().abs() < 4.0, "{c:?}");
        }
        let noisy = gate_cell(Scheme::LinearG2, &GateTable::or(), 1, 0.9, 10, 1).unwrap();
        assert!(noisy.exact < 0.75);
    }
}
