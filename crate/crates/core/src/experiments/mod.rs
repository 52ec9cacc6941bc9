//! Batch experiments behind the `qotp` binary. Each command validates an
//! [`ExperimentConfig`], writes CSV/JSON files into the output directory and
//! returns a short [`Report`]. Trials fan out over rayon with one RNG stream
//! per (seed, trial index), so output files are byte-identical for a seed.

mod bounds;
mod gates;
mod millionaires;
mod network;
mod signatures;

use std::fmt::Display;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::encoding::{check_fidelity, Scheme};
use crate::error::{Error, Result};
use crate::signature::{DEFAULT_T, DEFAULT_TAU, DIGEST_BITS};

pub use bounds::cmd_bounds;
pub use gates::{cmd_gates, gate_cell, GateCell};
pub use millionaires::{cmd_millionaires, deviations, millionaires_batch, MillionairesStats};
pub use network::{cmd_connect, cmd_serve};
pub use signatures::{cmd_sig_curves, cmd_sign, cmd_verify, sign_and_verify, SignatureFile};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    /// `None` means the command's default scheme set.
    pub scheme: Option<Scheme>,
    pub fidelity: f64,
    pub loss: f64,
    pub copies: usize,
    pub rows: usize,
    pub big_t: usize,
    pub tau: usize,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 1,
            scheme: None,
            fidelity: 1.0,
            loss: 0.0,
            copies: 1,
            rows: DIGEST_BITS,
            big_t: DEFAULT_T,
            tau: DEFAULT_TAU,
            out: PathBuf::from("qotp-out"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        check_fidelity(self.fidelity)?;
        if !(0.0..1.0).contains(&self.loss) {
            return Err(Error::invalid(format!("loss must lie in [0, 1), got {}", self.loss)));
        }
        if self.copies == 0 {
            return Err(Error::invalid("copies must be at least 1"));
        }
        if self.rows == 0 || self.rows > DIGEST_BITS {
            return Err(Error::invalid(format!("rows must lie in 1..={DIGEST_BITS}, got {}", self.rows)));
        }
        if self.big_t == 0 || self.tau > self.big_t {
            return Err(Error::invalid(format!(
                "need T >= 1 and tau <= T, got T = {} tau = {}",
                self.big_t, self.tau
            )));
        }
        Ok(())
    }

    /// The `#` line that heads every CSV.
    pub fn metadata(&self, command: &str) -> String {
        let scheme = self.scheme.map_or("default".to_string(), |s| s.to_string());
        format!(
            "# qotp {command} seed={} trials={} scheme={scheme} fidelity={} loss={} copies={} rows={} big_t={} tau={}",
            self.seed, self.trials, self.fidelity, self.loss, self.copies, self.rows, self.big_t, self.tau
        )
    }

    fn out_dir(&self) -> Result<&Path> {
        fs::create_dir_all(&self.out).map_err(|e| Error::io(self.out.display().to_string(), e))?;
        Ok(&self.out)
    }
}

/// How a command ended, beyond plain success.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// A signature did not verify.
    Rejected,
    /// A protocol session aborted.
    Aborted(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub summary: Vec<String>,
    pub files: Vec<PathBuf>,
    pub outcome: Outcome,
}

impl Report {
    fn new() -> Self {
        Self {
            summary: Vec::new(),
            files: Vec::new(),
            outcome: Outcome::Ok,
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }
}

/// CSV file with a metadata comment line followed by a header row.
pub(crate) struct CsvOut {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl CsvOut {
    pub(crate) fn create(dir: &Path, name: &str, metadata: &str, header: &[&str]) -> Result<Self> {
        let path = dir.join(name);
        let err = |e: std::io::Error| Error::io(path.display().to_string(), e);
        let mut file = File::create(&path).map_err(err)?;
        writeln!(file, "{metadata}").map_err(err)?;
        let mut out = Self {
            writer: csv::Writer::from_writer(file),
            path,
        };
        out.row(header)?;
        Ok(out)
    }

    pub(crate) fn row<T: Display>(&mut self, fields: &[T]) -> Result<()> {
        let record: Vec<String> = fields.iter().map(ToString::to_string).collect();
        self.writer.write_record(&record).map_err(|e| self.csv_err(e))
    }

    pub(crate) fn finish(mut self) -> Result<PathBuf> {
        self.writer
            .flush()
            .map_err(|e| Error::io(self.path.display().to_string(), e))?;
        Ok(self.path)
    }

    fn csv_err(&self, e: csv::Error) -> Error {
        Error::io(self.path.display().to_string(), std::io::Error::other(e))
    }
}

pub(crate) fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    fs::write(&path, text + "\n").map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(path)
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))
}

pub(crate) fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}
