use serde::{Deserialize, Serialize};

use super::{ensure_dim, ErrorMix};
use crate::encoding::{g1_state, GateTable};
use crate::error::{Error, Result};
use crate::qmath::{trace_norm, ComplexMatrix};

/// Error mix a classical programmer would need to hit single-line success
/// `f1` and parity success `f2` on a G1 table. Negative entries mean the pair
/// is classically unreachable.
pub fn classical_error_mix(f1: f64, f2: f64) -> ErrorMix {
    ErrorMix::new(vec![f1 + f2 / 2.0 - 0.5, 1.0 - f2, 0.5 - f1 + f2 / 2.0])
}

/// Smallest parity success compatible with single-line success `f1`.
pub fn classical_parity_floor(f1: f64) -> f64 {
    (2.0 * f1 - 1.0).abs()
}

/// Smallest classically achievable success on a pair of lines, given
/// single-line success `p1` on a k-input table.
pub fn classical_pair_floor(k: u32, p1: f64) -> f64 {
    let n = (1u64 << k) as f64;
    ((n * p1 * p1 - p1) / (n - 1.0)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineParity {
    pub copies: usize,
    pub f1_closed: f64,
    pub f2_closed: f64,
    pub f1_numeric: f64,
    pub f2_numeric: f64,
}

impl LineParity {
    /// Whether (F1, F2) breaks the classical bound F2 ≥ |2F1 − 1|.
    pub fn violates_classical(&self) -> bool {
        self.f2_numeric < classical_parity_floor(self.f1_numeric) - 1e-12
    }
}

/// Optimal quantum success for one line and for the parity of a G1 table
/// given `copies` copies, as ½ + ½‖Â‖₁. The closed forms hold for odd copy
/// counts.
pub fn quantum_line_and_parity(copies: usize) -> Result<LineParity> {
    if copies == 0 {
        return Err(Error::invalid("need at least one copy"));
    }
    ensure_dim(copies, 1)?;
    let powers: Vec<ComplexMatrix> = ["00", "01", "10", "11"]
        .iter()
        .map(|l| Ok(g1_state(&l.parse::<GateTable>()?)?.density().tensor_power(copies)))
        .collect::<Result<_>>()?;
    let combo = |signs: [f64; 4]| {
        powers
            .iter()
            .zip(signs)
            .fold(ComplexMatrix::zeros(powers[0].rows(), powers[0].cols()), |acc, (m, s)| {
                &acc + &m.scale_real(0.25 * s)
            })
    };
    let a1 = combo([1.0, 1.0, -1.0, -1.0]);
    let a2 = combo([1.0, -1.0, -1.0, 1.0]);
    let c = copies as i32;
    Ok(LineParity {
        copies,
        f1_closed: 0.5 + 0.5 * (1.0 - 2f64.powi(-c)).sqrt(),
        f2_closed: 0.5 + 0.5 * (1.0 - 2.0 * 2f64.powi(-c)).sqrt(),
        f1_numeric: 0.5 + 0.5 * trace_norm(&a1)?,
        f2_numeric: 0.5 + 0.5 * trace_norm(&a2)?,
    })
}
