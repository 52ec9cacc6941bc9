use serde::{Deserialize, Serialize};

use super::{ensure_dim, ErrorMix};
use crate::encoding::{encode_general, ideal_line_success, GateTable, Scheme};
use crate::error::{Error, Result};
use crate::qmath::{eig_hermitian, inv_sqrt_on_support, operator_norm, support_projector, ComplexMatrix, SUPPORT_CUTOFF};
use crate::stats::{ln_binomial, majority_vote};

/// Measurement operators with the priors of the ensemble they discriminate.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    pub operators: Vec<ComplexMatrix>,
    pub priors: Vec<f64>,
}

impl Povm {
    /// Largest deviation of Σ M_x from the identity.
    pub fn completeness_error(&self) -> f64 {
        let dim = self.operators[0].rows();
        let sum = self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, m| &acc + m);
        sum.max_abs_diff(&ComplexMatrix::identity(dim))
    }

    /// Smallest eigenvalue over all operators.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let mut min = f64::INFINITY;
        for m in &self.operators {
            let e = eig_hermitian(&m.hermitian_part())?;
            min = min.min(*e.values.last().expect("non-empty"));
        }
        Ok(min)
    }

    /// tr(ρ_x M_x) for each x.
    pub fn success_per_state(&self, states: &[ComplexMatrix]) -> Vec<f64> {
        states
            .iter()
            .zip(&self.operators)
            .map(|(rho, m)| rho.trace_product(m).re)
            .collect()
    }

    /// Σ_x q_x tr(ρ_x M_x).
    pub fn average_success(&self, states: &[ComplexMatrix]) -> f64 {
        self.success_per_state(states)
            .iter()
            .zip(&self.priors)
            .map(|(s, q)| s * q)
            .sum()
    }

    /// Largest entry-wise distance between corresponding operators.
    pub fn distance(&self, other: &Povm) -> f64 {
        self.operators
            .iter()
            .zip(&other.operators)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

fn check_ensemble(states: &[ComplexMatrix], priors: &[f64]) -> Result<usize> {
    if states.is_empty() || states.len() != priors.len() {
        return Err(Error::invalid(format!(
            "{} states but {} priors",
            states.len(),
            priors.len()
        )));
    }
    let dim = states[0].rows();
    if states.iter().any(|s| !s.is_square() || s.rows() != dim) {
        return Err(Error::invalid("ensemble states have mismatched dimensions"));
    }
    if priors.iter().any(|&q| q < 0.0) || (priors.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("priors must be non-negative and sum to 1"));
    }
    Ok(dim)
}

/// Spreads I − Π over the operators so they sum to the identity.
fn complete(mut ops: Vec<ComplexMatrix>, sum_support: &ComplexMatrix) -> Result<Vec<ComplexMatrix>> {
    let dim = sum_support.rows();
    let kernel = &ComplexMatrix::identity(dim) - &support_projector(sum_support, SUPPORT_CUTOFF)?;
    let share = kernel.scale_real(1.0 / ops.len() as f64);
    for m in &mut ops {
        *m = &*m + &share;
    }
    Ok(ops)
}

/// Pretty-good measurement M_x = S^{-1/2} q_x ρ_x S^{-1/2}, S = Σ q_s ρ_s,
/// with the kernel of S shared uniformly.
pub fn pgm(states: &[ComplexMatrix], priors: &[f64]) -> Result<Povm> {
    let dim = check_ensemble(states, priors)?;
    let s = states
        .iter()
        .zip(priors)
        .fold(ComplexMatrix::zeros(dim, dim), |acc, (rho, &q)| &acc + &rho.scale_real(q));
    let r = inv_sqrt_on_support(&s, SUPPORT_CUTOFF)?;
    let ops = states
        .iter()
        .zip(priors)
        .map(|(rho, &q)| (&(&r * &rho.scale_real(q)) * &r).hermitian_part())
        .collect();
    Ok(Povm {
        operators: complete(ops, &s)?,
        priors: priors.to_vec(),
    })
}

/// Fixed-point iteration M_x ← R^{-1/2} q_x² ρ_x M_x ρ_x R^{-1/2} with
/// R = Σ q_s² ρ_s M_s ρ_s, starting from M_x = I/N.
pub fn jrf_iterate(states: &[ComplexMatrix], priors: &[f64], iterations: usize) -> Result<Povm> {
    let dim = check_ensemble(states, priors)?;
    if iterations == 0 {
        return Err(Error::invalid("need at least one iteration"));
    }
    let n = states.len();
    let mut ops = vec![ComplexMatrix::identity(dim).scale_real(1.0 / n as f64); n];
    for _ in 0..iterations {
        let terms: Vec<ComplexMatrix> = states
            .iter()
            .zip(priors)
            .zip(&ops)
            .map(|((rho, &q), m)| (&(rho * m) * rho).scale_real(q * q).hermitian_part())
            .collect();
        let r_sum = terms
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, t| &acc + t);
        let r = inv_sqrt_on_support(&r_sum, SUPPORT_CUTOFF)?;
        let next = terms.iter().map(|t| (&(&r * t) * &r).hermitian_part()).collect();
        ops = complete(next, &r_sum)?;
    }
    Ok(Povm {
        operators: ops,
        priors: priors.to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: String,
    pub x: usize,
    pub y: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub optimal: bool,
    pub tol: f64,
    /// max over pairs of ‖M_x(q_xρ_x − q_yρ_y)M_y‖.
    pub max_orthogonality: f64,
    /// min over y of λ_min(Γ − q_yρ_y).
    pub min_gamma_eigenvalue: f64,
    pub witness: Option<Violation>,
}

/// Checks the two optimality conditions for minimum-error discrimination:
/// M_x(q_xρ_x − q_yρ_y)M_y = 0 for all pairs, and Γ − q_yρ_y ⪰ 0 for all y
/// with Γ = Σ q_xρ_xM_x (which must be Hermitian).
pub fn certify_optimal(povm: &Povm, states: &[ComplexMatrix], tol: f64) -> Result<Certificate> {
    let dim = check_ensemble(states, &povm.priors)?;
    if povm.operators.len() != states.len() {
        return Err(Error::invalid("POVM and ensemble sizes differ"));
    }
    let q = &povm.priors;
    let m = &povm.operators;
    let weighted: Vec<ComplexMatrix> = states.iter().zip(q).map(|(r, &w)| r.scale_real(w)).collect();
    let mut witness = None;
    let mut max_orth: f64 = 0.0;
    for x in 0..states.len() {
        for y in x + 1..states.len() {
            let prod = &(&m[x] * &(&weighted[x] - &weighted[y])) * &m[y];
            let mut norm = prod.frobenius_norm();
            if norm > tol {
                norm = operator_norm(&prod)?;
            }
            if norm > max_orth {
                max_orth = norm;
            }
            if norm > tol && witness.is_none() {
                witness = Some(Violation {
                    condition: "orthogonality".into(),
                    x,
                    y,
                    value: norm,
                });
            }
        }
    }
    let gamma = weighted
        .iter()
        .zip(m)
        .fold(ComplexMatrix::zeros(dim, dim), |acc, (w, mx)| &acc + &(w * mx));
    let herm_err = gamma.hermiticity_error();
    if herm_err > tol && witness.is_none() {
        witness = Some(Violation {
            condition: "gamma_hermitian".into(),
            x: 0,
            y: 0,
            value: herm_err,
        });
    }
    let gamma = gamma.hermitian_part();
    let mut min_eig = f64::INFINITY;
    for (y, w) in weighted.iter().enumerate() {
        let e = eig_hermitian(&(&gamma - w))?;
        let low = *e.values.last().expect("non-empty");
        min_eig = min_eig.min(low);
        if low < -tol && witness.is_none() {
            witness = Some(Violation {
                condition: "global_positivity".into(),
                x: y,
                y,
                value: low,
            });
        }
    }
    Ok(Certificate {
        optimal: witness.is_none(),
        tol,
        max_orthogonality: max_orth,
        min_gamma_eigenvalue: min_eig,
        witness,
    })
}

/// ρ_G^{⊗copies} for every k-input table G, in label order, using the
/// general anti-commuting assignment.
pub fn gate_ensemble(k: u32, copies: usize) -> Result<Vec<ComplexMatrix>> {
    if !(1..=2).contains(&k) || copies == 0 {
        return Err(Error::invalid(format!("ensembles support k in 1..=2 and copies >= 1, got k={k}, c={copies}")));
    }
    let qubits = 1usize << (k - 1);
    ensure_dim(copies, qubits)?;
    let assignment = Scheme::General.assignment(k)?;
    GateTable::all(k)?
        .iter()
        .map(|t| Ok(encode_general(t, &assignment)?.tensor_power(copies)))
        .collect()
}

/// E_h: probability that PGM identification of a uniformly random k-input
/// table is wrong on exactly h lines.
pub fn hamming_error_distribution(k: u32, copies: usize) -> Result<ErrorMix> {
    let states = gate_ensemble(k, copies)?;
    let n = states.len();
    let priors = vec![1.0 / n as f64; n];
    let povm = pgm(&states, &priors)?;
    Ok(confusion_by_distance(&povm, &states))
}

/// Σ_x q_x Σ_{s : H(s,x) = h} tr(ρ_x M_s), with states indexed by table.
pub fn confusion_by_distance(povm: &Povm, states: &[ComplexMatrix]) -> ErrorMix {
    let lines = (states.len() as f64).log2().round() as usize;
    let mut e = vec![0.0; lines + 1];
    for (x, rho) in states.iter().enumerate() {
        for (s, m) in povm.operators.iter().enumerate() {
            let h = (x ^ s).count_ones() as usize;
            e[h] += povm.priors[x] * rho.trace_product(m).re;
        }
    }
    ErrorMix::new(e)
}

/// P̃_L = Σ_h C(2^k − h, L)/C(2^k, L) · E_h.
pub fn subset_success(mix: &ErrorMix, l: usize) -> Result<f64> {
    let lines = mix.e.len() - 1;
    if l == 0 || l > lines {
        return Err(Error::invalid(format!("subset size {l} outside 1..={lines}")));
    }
    let denom = ln_binomial(lines as u64, l as u64);
    Ok(mix
        .e
        .iter()
        .enumerate()
        .filter(|(h, _)| lines - h >= l)
        .map(|(h, &eh)| (ln_binomial((lines - h) as u64, l as u64) - denom).exp() * eh)
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub copies: usize,
    /// Single-line success after majority vote over the copies.
    pub p1: f64,
    /// Average per-line success of whole-table identification.
    pub p1_tilde: f64,
}

pub fn tradeoff_curve(k: u32, copies: &[usize]) -> Result<Vec<TradeoffPoint>> {
    copies
        .iter()
        .map(|&c| {
            let p1 = majority_vote(c as u64, ideal_line_success(k))?;
            let mix = hamming_error_distribution(k, c)?;
            Ok(TradeoffPoint {
                copies: c,
                p1,
                p1_tilde: subset_success(&mix, 1)?,
            })
        })
        .collect()
}
