//! Pure single- and multi-qubit states, the four G1 conjugate-coding states,
//! the eight elliptical states, and the published G2 encoding tables.

use serde::{Deserialize, Serialize};

use super::table::GateTable;
use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, Pauli, C64, ZERO};

const NORM_TOL: f64 = 1e-12;

/// Unit-norm state vector; qubit 0 is the most significant index bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState")]
pub struct PureState {
    amplitudes: Vec<C64>,
}

#[derive(Deserialize)]
struct RawState {
    amplitudes: Vec<C64>,
}

impl TryFrom<RawState> for PureState {
    type Error = Error;

    fn try_from(r: RawState) -> Result<Self> {
        Self::new(r.amplitudes)
    }
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() || !amplitudes.len().is_power_of_two() {
            return Err(Error::invalid("state dimension must be a power of two"));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!("state has squared norm {norm}, expected 1")));
        }
        Ok(Self { amplitudes })
    }

    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid("cannot normalize a zero vector"));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn density(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Self { amplitudes }
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Real expectation value <ψ|O|ψ> of a Hermitian observable.
    pub fn expectation(&self, observable: &ComplexMatrix) -> f64 {
        observable.sandwich(&self.amplitudes, &self.amplitudes).re
    }

    /// (⟨X⟩, ⟨Y⟩, ⟨Z⟩) of a single-qubit state.
    pub fn bloch(&self) -> [f64; 3] {
        assert_eq!(self.dim(), 2, "Bloch vector needs a single qubit");
        let (a, b) = (self.amplitudes[0], self.amplitudes[1]);
        let ab = a.conj() * b;
        [2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()]
    }

    /// Applies a single-qubit Pauli to `qubit` in place.
    pub fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) {
        let n = self.num_qubits();
        assert!(qubit < n, "qubit index out of range");
        let bit = 1usize << (n - 1 - qubit);
        let i = C64::new(0.0, 1.0);
        for idx in 0..self.dim() {
            if idx & bit != 0 {
                continue;
            }
            let (a0, a1) = (self.amplitudes[idx], self.amplitudes[idx | bit]);
            let (b0, b1) = match pauli {
                Pauli::I => (a0, a1),
                Pauli::X => (a1, a0),
                Pauli::Y => (-i * a1, i * a0),
                Pauli::Z => (a0, -a1),
            };
            self.amplitudes[idx] = b0;
            self.amplitudes[idx | bit] = b1;
        }
    }
}

/// The four G1 gates, named by their truth tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum G1Gate {
    /// "00"
    Zero,
    /// "11"
    One,
    /// "01"
    Id,
    /// "10"
    Not,
}

impl G1Gate {
    pub const ALL: [G1Gate; 4] = [G1Gate::Zero, G1Gate::Id, G1Gate::Not, G1Gate::One];

    pub fn table(self) -> GateTable {
        let label = match self {
            G1Gate::Zero => "00",
            G1Gate::Id => "01",
            G1Gate::Not => "10",
            G1Gate::One => "11",
        };
        label.parse().expect("static label")
    }

    pub fn from_table(table: &GateTable) -> Result<Self> {
        if table.k() != 1 {
            return Err(Error::invalid(format!("G1 gate needs k = 1, got k = {}", table.k())));
        }
        Ok(match (table.eval(0), table.eval(1)) {
            (false, false) => G1Gate::Zero,
            (false, true) => G1Gate::Id,
            (true, false) => G1Gate::Not,
            (true, true) => G1Gate::One,
        })
    }

    /// (|0⟩ or |1⟩ per G(0)) + (|+⟩ or |−⟩ per G(1)), normalized by √(2+√2).
    pub fn state(self) -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let norm = (2.0 + 2f64.sqrt()).sqrt();
        let (z, x) = match self {
            G1Gate::Zero => ([1.0, 0.0], [h, h]),
            G1Gate::One => ([0.0, 1.0], [-h, h]),
            G1Gate::Id => ([1.0, 0.0], [h, -h]),
            G1Gate::Not => ([0.0, 1.0], [h, h]),
        };
        PureState::new(vec![
            C64::new((z[0] + x[0]) / norm, 0.0),
            C64::new((z[1] + x[1]) / norm, 0.0),
        ])
        .expect("G1 states are normalized")
    }
}

/// The G1 state encoding `table`.
pub fn g1_state(table: &GateTable) -> Result<PureState> {
    Ok(G1Gate::from_table(table)?.state())
}

/// Elliptical single-photon state Ψᵉ_index, `index` in 0..8.
pub fn elliptical_state(index: usize) -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let half = C64::new(0.5, 0.0);
    let amplitudes = match index {
        0 => [C64::new(0.5, -h), half],
        1 => [C64::new(-0.5, -h), half],
        2 => [half, C64::new(0.5, h)],
        3 => [half, C64::new(-0.5, h)],
        4 => [C64::new(0.5, h), half],
        5 => [C64::new(-0.5, h), half],
        6 => [half, C64::new(0.5, -h)],
        7 => [half, C64::new(-0.5, -h)],
        _ => panic!("elliptical state index {index} out of range"),
    };
    PureState::new(amplitudes.to_vec()).expect("elliptical states are normalized")
}

use G1Gate::{Id, Not, One, Zero};

/// Three-photon linear encodings, four equivalent rows per gate, indexed by
/// the gate label read as a binary number.
pub const LINEAR_TABLE: [[[G1Gate; 3]; 4]; 16] = [
    [[Zero, Zero, Zero], [Zero, One, Id], [One, Zero, Not], [One, One, One]],
    [[Zero, Id, Zero], [Zero, Not, Id], [One, Id, Not], [One, Not, One]],
    [[Zero, Not, Zero], [Zero, Id, Id], [One, Not, Not], [One, Id, One]],
    [[Zero, One, Zero], [Zero, Zero, Id], [One, One, Not], [One, Zero, One]],
    [[Id, Zero, Zero], [Id, One, Id], [Not, Zero, Not], [Not, One, One]],
    [[Id, Id, Zero], [Id, Not, Id], [Not, Id, Not], [Not, Not, One]],
    [[Id, Not, Zero], [Id, Id, Id], [Not, Not, Not], [Not, Id, One]],
    [[Id, One, Zero], [Id, Zero, Id], [Not, One, Not], [Not, Zero, One]],
    [[Not, Zero, Zero], [Not, One, Id], [Id, Zero, Not], [Id, One, One]],
    [[Not, Id, Zero], [Not, Not, Id], [Id, Id, Not], [Id, Not, One]],
    [[Not, Not, Zero], [Not, Id, Id], [Id, Not, Not], [Id, Id, One]],
    [[Not, One, Zero], [Not, Zero, Id], [Id, One, Not], [Id, Zero, One]],
    [[One, Zero, Zero], [One, One, Id], [Zero, Zero, Not], [Zero, One, One]],
    [[One, Id, Zero], [One, Not, Id], [Zero, Id, Not], [Zero, Not, One]],
    [[One, Not, Zero], [One, Id, Id], [Zero, Not, Not], [Zero, Id, One]],
    [[One, One, Zero], [One, Zero, Id], [Zero, One, Not], [Zero, Zero, One]],
];

/// Two-photon elliptical encodings: (G1 state, elliptical state index), two
/// rows per gate.
pub const ELLIPTICAL_TABLE: [[(G1Gate, usize); 2]; 16] = [
    [(Zero, 0), (One, 4)],
    [(Zero, 1), (One, 5)],
    [(Zero, 2), (One, 6)],
    [(Zero, 3), (One, 7)],
    [(Id, 0), (Not, 4)],
    [(Id, 1), (Not, 5)],
    [(Id, 2), (Not, 6)],
    [(Id, 3), (Not, 7)],
    [(Not, 0), (Id, 4)],
    [(Not, 1), (Id, 5)],
    [(Not, 2), (Id, 6)],
    [(Not, 3), (Id, 7)],
    [(One, 0), (Zero, 4)],
    [(One, 1), (Zero, 5)],
    [(One, 2), (Zero, 6)],
    [(One, 3), (Zero, 7)],
];

/// Product states of the linear encoding rows for a G2 table.
pub fn linear_rows(table: &GateTable) -> Result<Vec<Vec<PureState>>> {
    check_g2(table)?;
    Ok(LINEAR_TABLE[table.index()]
        .iter()
        .map(|row| row.iter().map(|g| g.state()).collect())
        .collect())
}

/// Product states of the elliptical encoding rows for a G2 table.
pub fn elliptical_rows(table: &GateTable) -> Result<Vec<Vec<PureState>>> {
    check_g2(table)?;
    Ok(ELLIPTICAL_TABLE[table.index()]
        .iter()
        .map(|&(g, e)| vec![g.state(), elliptical_state(e)])
        .collect())
}

fn check_g2(table: &GateTable) -> Result<()> {
    if table.k() != 2 {
        return Err(Error::invalid(format!("G2 encoding needs k = 2, got k = {}", table.k())));
    }
    Ok(())
}

/// Tensor product of per-qubit states.
pub fn product_state(factors: &[PureState]) -> PureState {
    let mut it = factors.iter();
    let first = it.next().expect("non-empty product").clone();
    it.fold(first, |acc, s| acc.kron(s))
}
