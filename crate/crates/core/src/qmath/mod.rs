//! Dense complex linear algebra and Pauli-string algebra.

mod eigen;
mod matrix;
mod pauli;

pub use eigen::{
    eig_hermitian, inv_sqrt_on_support, operator_norm, rank, support_projector, trace_norm,
    von_neumann_entropy, EigenDecomposition, HERMITIAN_TOL, SUPPORT_CUTOFF,
};
pub use matrix::{kron, ComplexMatrix, C64, I, ONE, ZERO};
pub use pauli::{anticommuting_family, Pauli, PauliString};

/// Trace distance ½‖A − B‖₁ between two Hermitian operators.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> crate::Result<f64> {
    Ok(0.5 * trace_norm(&(a - b))?)
}
