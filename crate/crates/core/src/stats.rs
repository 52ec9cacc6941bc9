//! Exact binomial quantities and small statistical helpers.

use crate::error::{Error, Result};

/// ln(n!) by direct summation of logarithms.
pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// ln C(n, k).
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    assert!(k <= n, "k > n");
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::invalid(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Full probability mass function of Binomial(n, p).
pub fn binomial_pmf_table(n: u64, p: f64) -> Result<Vec<f64>> {
    check_p(p)?;
    if p == 0.0 || p == 1.0 {
        let hit = if p == 0.0 { 0 } else { n };
        return Ok((0..=n).map(|w| if w == hit { 1.0 } else { 0.0 }).collect());
    }
    // Ratio recurrence outward from the mode, then normalization: avoids the
    // absolute error of log-factorial sums, which the power in multi-row
    // probabilities would amplify.
    let n_us = n as usize;
    let mode = (((n + 1) as f64 * p).floor() as usize).min(n_us);
    let odds = p / (1.0 - p);
    let mut pmf = vec![0.0; n_us + 1];
    pmf[mode] = 1.0;
    for w in mode..n_us {
        pmf[w + 1] = pmf[w] * (n_us - w) as f64 / (w + 1) as f64 * odds;
    }
    for w in (0..mode).rev() {
        pmf[w] = pmf[w + 1] * (w + 1) as f64 / (n_us - w) as f64 / odds;
    }
    let total: f64 = pmf.iter().sum();
    Ok(pmf.into_iter().map(|x| x / total).collect())
}

pub fn binomial_pmf(n: u64, k: u64, p: f64) -> Result<f64> {
    if k > n {
        return Ok(0.0);
    }
    Ok(binomial_pmf_table(n, p)?[k as usize])
}

/// P(Binomial(n, p) ≥ k).
pub fn binomial_tail_ge(n: u64, k: u64, p: f64) -> Result<f64> {
    check_p(p)?;
    if k == 0 {
        return Ok(1.0);
    }
    if k > n {
        return Ok(0.0);
    }
    let pmf = binomial_pmf_table(n, p)?;
    Ok(pmf[k as usize..].iter().sum::<f64>().min(1.0))
}

/// P(Binomial(n, p) ≤ k).
pub fn binomial_cdf_le(n: u64, k: u64, p: f64) -> Result<f64> {
    check_p(p)?;
    if k >= n {
        return Ok(1.0);
    }
    let pmf = binomial_pmf_table(n, p)?;
    Ok(pmf[..=k as usize].iter().sum::<f64>().min(1.0))
}

/// Probability that a strict majority of `copies` independent trials, each
/// correct with probability `p`, is correct. `copies` must be odd.
pub fn majority_vote(copies: u64, p: f64) -> Result<f64> {
    if copies == 0 || copies.is_multiple_of(2) {
        return Err(Error::invalid(format!("majority vote needs an odd copy count, got {copies}")));
    }
    binomial_tail_ge(copies, copies / 2 + 1, p)
}

/// Standard error of a binomial proportion estimate.
pub fn proportion_stderr(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Two-proportion z statistic with pooled variance. Zero when both samples
/// are degenerate and equal.
pub fn two_proportion_z(successes_a: u64, n_a: u64, successes_b: u64, n_b: u64) -> f64 {
    let pa = successes_a as f64 / n_a as f64;
    let pb = successes_b as f64 / n_b as f64;
    let pooled = (successes_a + successes_b) as f64 / (n_a + n_b) as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / n_a as f64 + 1.0 / n_b as f64)).sqrt();
    if se == 0.0 {
        if pa == pb {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (pa - pb) / se
    }
}
