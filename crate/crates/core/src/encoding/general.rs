use super::table::GateTable;
use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, PauliString, C64};

/// Map from gate input index to the observable Bob measures for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservableAssignment {
    observables: Vec<PauliString>,
}

impl ObservableAssignment {
    /// Validates that the strings share a qubit count, number a power of two
    /// and pairwise anti-commute.
    pub fn new(observables: Vec<PauliString>) -> Result<Self> {
        let n = observables.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::invalid(format!("assignment needs 2^k observables, got {n}")));
        }
        let qubits = observables[0].num_qubits();
        if observables.iter().any(|o| o.num_qubits() != qubits) {
            return Err(Error::invalid("observables act on different qubit counts"));
        }
        for i in 0..n {
            for j in i + 1..n {
                if !observables[i].anticommutes(&observables[j]) {
                    return Err(Error::invalid(format!(
                        "observables {} and {} do not anti-commute",
                        observables[i], observables[j]
                    )));
                }
            }
        }
        Ok(Self { observables })
    }

    pub fn parse(labels: &[&str]) -> Result<Self> {
        Self::new(labels.iter().map(|l| l.parse()).collect::<Result<Vec<_>>>()?)
    }

    pub fn k(&self) -> u32 {
        self.observables.len().trailing_zeros()
    }

    pub fn num_qubits(&self) -> usize {
        self.observables[0].num_qubits()
    }

    pub fn observable(&self, input: usize) -> &PauliString {
        &self.observables[input]
    }

    pub fn observables(&self) -> &[PauliString] {
        &self.observables
    }
}

/// Maximum-entropy encoding
/// ρ_G = (I + 2^{-k/2} Σᵢ (−1)^{G(i)} σᵢ) / tr(I).
pub fn encode_general(table: &GateTable, assignment: &ObservableAssignment) -> Result<ComplexMatrix> {
    if table.k() != assignment.k() {
        return Err(Error::invalid(format!(
            "table has k = {} but assignment covers k = {}",
            table.k(),
            assignment.k()
        )));
    }
    let dim = 1usize << assignment.num_qubits();
    let weight = 2f64.powf(-(table.k() as f64) / 2.0);
    let mut rho = ComplexMatrix::identity(dim);
    for (i, sigma) in assignment.observables().iter().enumerate() {
        let sign = if table.eval(i) { -weight } else { weight };
        rho = &rho + &sigma.materialize().scale_real(sign);
    }
    Ok(rho.scale(C64::new(1.0 / dim as f64, 0.0)))
}

/// Closed-form per-line success ½(1 + 2^{-k/2}).
pub fn ideal_line_success(k: u32) -> f64 {
    0.5 * (1.0 + 2f64.powf(-(k as f64) / 2.0))
}
