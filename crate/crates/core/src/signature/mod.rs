//! Delegated one-time signatures built from G1 gate programs.
//!
//! Alice hands Bob `rows × T` single-qubit OTPs with uniformly random tables.
//! To sign, Bob evaluates every OTP of row `r` on hash bit `r`; the verifier,
//! who knows the tables, counts matches per row and accepts when every row
//! has at least `τ` of them.

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha3::{Digest, Sha3_224};

use crate::encoding::{check_fidelity, GateOtp, GateTable, G1Gate, Scheme};
use crate::error::{Error, Result};
use crate::qmath::{eig_hermitian, ComplexMatrix};
use crate::stats::{binomial_cdf_le, binomial_pmf_table, binomial_tail_ge};

pub const DIGEST_BITS: usize = 224;
pub const DEFAULT_T: usize = 300;
pub const DEFAULT_TAU: usize = 234;
pub const HISTOGRAM_BIN_WIDTH: usize = 3;

/// Per-line success of a G1 program, ½ + 1/(2√2).
pub fn g1_line_success() -> f64 {
    0.5 + 0.5 * std::f64::consts::FRAC_1_SQRT_2
}

/// First `rows` bits of the SHA3-224 digest, most significant bit of each
/// byte first.
pub fn hash_message(message: &[u8], rows: usize) -> Result<Vec<bool>> {
    if rows > DIGEST_BITS {
        return Err(Error::invalid(format!("at most {DIGEST_BITS} hash bits available, asked for {rows}")));
    }
    let digest = Sha3_224::digest(message);
    Ok((0..rows).map(|i| digest[i / 8] >> (7 - i % 8) & 1 == 1).collect())
}

/// Alice's private knowledge: the table of every OTP.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrivateRecord {
    pub tables: Vec<Vec<G1Gate>>,
}

impl PrivateRecord {
    pub fn rows(&self) -> usize {
        self.tables.len()
    }

    pub fn row_len(&self) -> usize {
        self.tables.first().map_or(0, Vec::len)
    }
}

/// Bob's side: the encoded programs, usable once.
#[derive(Debug, Clone)]
pub struct SignatureBundle {
    otps: Vec<Vec<GateOtp>>,
    consumed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureRow {
    pub hash_bit: bool,
    pub outputs: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub match_counts: Vec<usize>,
    pub tau: usize,
    pub pass: bool,
}

impl VerificationReport {
    pub fn min_matches(&self) -> usize {
        self.match_counts.iter().copied().min().unwrap_or(0)
    }
}

/// How Bob's measurements behave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignMode {
    /// Born-rule measurement of states prepared with the given fidelity.
    Physical { fidelity: f64 },
    /// Noise-free override: every output equals the table's value.
    Ideal,
}

impl SignatureBundle {
    /// Draws `rows × t` uniformly random G1 tables and encodes them.
    pub fn generate<R: Rng + ?Sized>(rows: usize, t: usize, rng: &mut R) -> Result<(Self, PrivateRecord)> {
        if rows == 0 || rows > DIGEST_BITS || t == 0 {
            return Err(Error::invalid(format!("need 1..={DIGEST_BITS} rows and T >= 1, got {rows} x {t}")));
        }
        let mut tables = Vec::with_capacity(rows);
        let mut otps = Vec::with_capacity(rows);
        for _ in 0..rows {
            let row: Vec<G1Gate> = (0..t).map(|_| G1Gate::ALL[rng.random_range(0..4)]).collect();
            otps.push(
                row.iter()
                    .map(|g| GateOtp::encode(Scheme::G1, &g.table(), rng))
                    .collect::<Result<Vec<_>>>()?,
            );
            tables.push(row);
        }
        Ok((Self { otps, consumed: false }, PrivateRecord { tables }))
    }

    pub fn rows(&self) -> usize {
        self.otps.len()
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    pub fn sign<R: Rng + ?Sized>(&mut self, message: &[u8], mode: SignMode, rng: &mut R) -> Result<Vec<SignatureRow>> {
        if self.consumed {
            return Err(Error::AlreadyConsumed);
        }
        if let SignMode::Physical { fidelity } = mode {
            check_fidelity(fidelity)?;
        }
        let bits = hash_message(message, self.rows())?;
        self.consumed = true;
        bits.iter()
            .zip(&mut self.otps)
            .map(|(&b, row)| {
                let outputs = row
                    .iter_mut()
                    .map(|otp| match mode {
                        SignMode::Ideal => {
                            otp.take_registers()?;
                            otp.encoded_table().eval_bits(&[b])
                        }
                        SignMode::Physical { fidelity } => {
                            otp.apply_noise(fidelity, rng)?;
                            otp.evaluate(&[b], rng)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(SignatureRow { hash_bit: b, outputs })
            })
            .collect()
    }
}

/// Counts matches against the private record on the message's hash bits.
pub fn verify(record: &PrivateRecord, message: &[u8], rows: &[SignatureRow], tau: usize) -> Result<VerificationReport> {
    if rows.len() != record.rows() {
        return Err(Error::invalid(format!(
            "signature has {} rows, record has {}",
            rows.len(),
            record.rows()
        )));
    }
    let bits = hash_message(message, record.rows())?;
    let mut match_counts = Vec::with_capacity(rows.len());
    for ((row, tables), &b) in rows.iter().zip(&record.tables).zip(&bits) {
        if row.outputs.len() != tables.len() {
            return Err(Error::invalid(format!(
                "signature row has {} outputs, expected {}",
                row.outputs.len(),
                tables.len()
            )));
        }
        let input = b as usize;
        match_counts.push(
            row.outputs
                .iter()
                .zip(tables)
                .filter(|(&o, g)| o == g.table().eval(input))
                .count(),
        );
    }
    let pass = match_counts.iter().all(|&m| m >= tau);
    Ok(VerificationReport { match_counts, tau, pass })
}

fn check_tau(t: usize, tau: usize) -> Result<()> {
    if tau > t {
        return Err(Error::invalid(format!("threshold {tau} exceeds row length {t}")));
    }
    Ok(())
}

/// P(Binomial(T, p) ≥ τ)^rows.
pub fn honest_pass_probability(t: usize, tau: usize, p: f64, rows: usize) -> Result<f64> {
    check_tau(t, tau)?;
    Ok(binomial_tail_ge(t as u64, tau as u64, p)?.powi(rows as i32))
}

/// Probability that one row of a forged signature on a hash differing in a
/// single bit lands within distance h = 2T − 2τ: 2^{−T} Σ_{w≤h} C(T, w),
/// clamped to 1.
pub fn dishonest_row_bound(t: usize, tau: usize) -> Result<f64> {
    check_tau(t, tau)?;
    let h = 2 * (t - tau);
    Ok(binomial_cdf_le(t as u64, h.min(t) as u64, 0.5)?.min(1.0))
}

/// Upper bound on forging a second message whose hash differs in one bit:
/// honest success on the other rows times the single-row bound.
pub fn dishonest_bound(t: usize, tau: usize, p: f64, rows: usize) -> Result<f64> {
    if rows == 0 {
        return Err(Error::invalid("need at least one row"));
    }
    Ok(honest_pass_probability(t, tau, p, rows - 1)? * dishonest_row_bound(t, tau)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Every row must pass.
    AllRows,
    /// A single row in isolation.
    SingleRow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub tau: usize,
    pub honest: f64,
    pub dishonest: f64,
    pub difference: f64,
}

/// Both curves for τ from ⌈T/2⌉ to T.
pub fn threshold_sweep(t: usize, rows: usize, p: f64, aggregation: Aggregation) -> Result<Vec<SweepPoint>> {
    if t == 0 {
        return Err(Error::invalid("row length must be positive"));
    }
    (t.div_ceil(2)..=t)
        .map(|tau| {
            let (honest, dishonest) = match aggregation {
                Aggregation::AllRows => (
                    honest_pass_probability(t, tau, p, rows)?,
                    dishonest_bound(t, tau, p, rows)?,
                ),
                Aggregation::SingleRow => (
                    honest_pass_probability(t, tau, p, 1)?,
                    dishonest_row_bound(t, tau)?,
                ),
            };
            Ok(SweepPoint {
                tau,
                honest,
                dishonest,
                difference: honest - dishonest,
            })
        })
        .collect()
}

/// Point with the largest honest − dishonest gap.
pub fn best_threshold(sweep: &[SweepPoint]) -> Option<SweepPoint> {
    sweep
        .iter()
        .copied()
        .max_by(|a, b| a.difference.total_cmp(&b.difference))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_start: usize,
    pub count: usize,
    pub expected: f64,
}

/// Row-match histogram with bins of width 3 over 0..=T, alongside the
/// Binomial(T, p) expectation for the same number of rows.
pub fn match_histogram(match_counts: &[usize], t: usize, p: f64) -> Result<Vec<HistogramBin>> {
    let pmf = binomial_pmf_table(t as u64, p)?;
    let n = match_counts.len() as f64;
    let mut bins: Vec<HistogramBin> = (0..=t)
        .step_by(HISTOGRAM_BIN_WIDTH)
        .map(|start| HistogramBin {
            bin_start: start,
            count: 0,
            expected: n * pmf[start..(start + HISTOGRAM_BIN_WIDTH).min(t + 1)].iter().sum::<f64>(),
        })
        .collect();
    for &m in match_counts {
        if m > t {
            return Err(Error::invalid(format!("match count {m} exceeds T = {t}")));
        }
        bins[m / HISTOGRAM_BIN_WIDTH].count += 1;
    }
    Ok(bins)
}

/// Pearson χ² of a histogram against its expectation, pooling adjacent bins
/// until each pooled expectation is at least `min_expected`. Returns the
/// statistic and degrees of freedom (pooled bins − 1).
pub fn chi_square(bins: &[HistogramBin], min_expected: f64) -> (f64, usize) {
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for b in bins {
        obs += b.count as f64;
        exp += b.expected;
        if exp >= min_expected {
            pooled.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => pooled.push((obs, exp)),
        }
    }
    let stat = pooled.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    (stat, pooled.len().saturating_sub(1))
}

/// Σ_{x : H(x, y) ≤ h} |φ_x⟩⟨φ_x| over the 2T-bit strings x, where each bit
/// pair is encoded as one G1 state.
pub fn codeword_operator(t: usize, y: usize, h: usize) -> Result<ComplexMatrix> {
    if t == 0 || t > 5 {
        return Err(Error::invalid(format!("codeword operator supports 1 <= T <= 5, got {t}")));
    }
    let dim = 1usize << t;
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for x in 0..1usize << (2 * t) {
        if (x ^ y).count_ones() as usize > h {
            continue;
        }
        let mut state = crate::encoding::PureState::basis(1, 0);
        for pair in 0..t {
            let bits = x >> (2 * (t - 1 - pair)) & 0b11;
            let g = G1Gate::from_table(&GateTable::from_index(1, bits)?)?;
            state = state.kron(&g.state());
        }
        acc = &acc + &state.density();
    }
    Ok(acc)
}

/// (numeric top eigenvalue, Σ_{w≤h} C(T, w)).
pub fn codeword_top_eigenvalue(t: usize, h: usize) -> Result<(f64, f64)> {
    let eig = eig_hermitian(&codeword_operator(t, 0, h)?)?;
    let closed = (0..=h.min(t)).map(|w| crate::stats::ln_binomial(t as u64, w as u64).exp()).sum::<f64>();
    Ok((eig.values[0], closed.round()))
}
