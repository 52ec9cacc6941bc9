//! Security mathematics: classical bounds, multi-copy discrimination and
//! the single-query two-copy circuit.

mod bounds;
mod discrimination;
mod two_copy;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bounds::{classical_error_mix, classical_pair_floor, classical_parity_floor, quantum_line_and_parity, LineParity};
pub use discrimination::{
    certify_optimal, confusion_by_distance, gate_ensemble, hamming_error_distribution, jrf_iterate, pgm,
    subset_success, tradeoff_curve, Certificate, Povm, TradeoffPoint, Violation,
};
pub use two_copy::{two_copy_circuit, two_copy_from_single_query};

/// Largest matrix dimension the analysis routines will build.
pub const DIM_CAP: usize = 1024;

/// `e[h]`: probability that exactly `h` truth-table lines are wrong.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorMix {
    pub e: Vec<f64>,
}

impl ErrorMix {
    pub fn new(e: Vec<f64>) -> Self {
        Self { e }
    }

    pub fn total(&self) -> f64 {
        self.e.iter().sum()
    }

    /// All entries non-negative (to 1e-12) and summing to one.
    pub fn feasible(&self) -> bool {
        self.e.iter().all(|&x| x >= -1e-12) && (self.total() - 1.0).abs() <= 1e-12
    }
}

pub(crate) fn ensure_dim(copies: usize, qubits_per_copy: usize) -> Result<usize> {
    let qubits = copies.saturating_mul(qubits_per_copy);
    if qubits > DIM_CAP.trailing_zeros() as usize {
        return Err(Error::ResourceLimit {
            dim: 1usize.checked_shl(qubits as u32).unwrap_or(usize::MAX),
            cap: DIM_CAP,
        });
    }
    Ok(1 << qubits)
}
