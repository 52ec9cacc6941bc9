//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, plus the
//! spectral functions built on it (trace norm, support-restricted inverse
//! square root, support projector, von Neumann entropy).

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Input must be Hermitian to within this absolute tolerance.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Default cutoff separating the support of a PSD operator from its kernel.
pub const SUPPORT_CUTOFF: f64 = 1e-10;

const OFF_DIAGONAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted descending with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector for `values[j]`.
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, j: usize) -> Vec<C64> {
        (0..self.dim()).map(|i| self.vectors[(i, j)]).collect()
    }

    /// Σ f(λ_j) |v_j><v_j|, skipping terms where `f` returns `None`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> Option<f64>) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (j, &lambda) in self.values.iter().enumerate() {
            let Some(w) = f(lambda) else { continue };
            for r in 0..n {
                let vr = self.vectors[(r, j)] * w;
                if vr == ZERO {
                    continue;
                }
                for c in 0..n {
                    out[(r, c)] += vr * self.vectors[(c, j)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.spectral_map(Some)
    }
}

/// Diagonalizes a Hermitian matrix.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::invalid(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let herr = m.hermiticity_error();
    if herr > HERMITIAN_TOL {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (max |M - M†| = {herr:e})"
        )));
    }
    Ok(jacobi(&m.hermitian_part()))
}

fn jacobi(m: &ComplexMatrix) -> EigenDecomposition {
    let n = m.rows();
    let mut a: Vec<C64> = m.as_slice().to_vec();
    let mut v = vec![ZERO; n * n];
    for i in 0..n {
        v[i * n + i] = C64::new(1.0, 0.0);
    }

    let scale = m.frobenius_norm();
    let target = OFF_DIAGONAL_TOL * scale.max(f64::MIN_POSITIVE);
    let negligible = 1e-20 * scale;

    for _sweep in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r <= negligible {
                    continue;
                }
                rotate(&mut a, &mut v, n, p, q, apq / r, r);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));

    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, new_col)] = v[r * n + old_col];
        }
    }
    EigenDecomposition { values, vectors }
}

/// One complex Jacobi rotation annihilating `a[p][q] = r·phase`.
///
/// U acts on the (p, q) plane as [[c, s], [-s·phase*, c·phase*]] (columns),
/// and the update is A ← U† A U, V ← V U.
fn rotate(a: &mut [C64], v: &mut [C64], n: usize, p: usize, q: usize, phase: C64, r: f64) {
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let pc = phase.conj();

    // A ← A U (columns p, q)
    for i in 0..n {
        let aip = a[i * n + p];
        let aiq = a[i * n + q];
        a[i * n + p] = aip * c - aiq * pc * s;
        a[i * n + q] = aip * s + aiq * pc * c;
    }
    // A ← U† A (rows p, q)
    for j in 0..n {
        let apj = a[p * n + j];
        let aqj = a[q * n + j];
        a[p * n + j] = apj * c - aqj * phase * s;
        a[q * n + j] = apj * s + aqj * phase * c;
    }
    a[p * n + q] = ZERO;
    a[q * n + p] = ZERO;
    a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
    a[q * n + q] = C64::new(a[q * n + q].re, 0.0);

    for i in 0..n {
        let vip = v[i * n + p];
        let viq = v[i * n + q];
        v[i * n + p] = vip * c - viq * pc * s;
        v[i * n + q] = vip * s + viq * pc * c;
    }
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(m)?.values.iter().map(|x| x.abs()).sum())
}

/// Σ_{a_j > cutoff} a_j^{-1/2} |a_j><a_j|.
pub fn inv_sqrt_on_support(m: &ComplexMatrix, cutoff: f64) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(m)?;
    check_psd(&eig, cutoff)?;
    Ok(eig.spectral_map(|a| (a > cutoff).then(|| a.sqrt().recip())))
}

/// Projector onto eigenvectors with eigenvalue above `cutoff`.
pub fn support_projector(m: &ComplexMatrix, cutoff: f64) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(m)?;
    check_psd(&eig, cutoff)?;
    Ok(eig.spectral_map(|a| (a > cutoff).then_some(1.0)))
}

/// Number of eigenvalues above `cutoff`.
pub fn rank(m: &ComplexMatrix, cutoff: f64) -> Result<usize> {
    Ok(eig_hermitian(m)?.values.iter().filter(|&&a| a > cutoff).count())
}

/// von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    let eig = eig_hermitian(rho)?;
    check_psd(&eig, SUPPORT_CUTOFF)?;
    Ok(eig
        .values
        .iter()
        .filter(|&&a| a > SUPPORT_CUTOFF)
        .map(|&a| -a * a.log2())
        .sum())
}

/// Largest singular value, via the spectrum of M†M.
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    let gram = &m.adjoint() * m;
    let eig = eig_hermitian(&gram.hermitian_part())?;
    Ok(eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt())
}

fn check_psd(eig: &EigenDecomposition, cutoff: f64) -> Result<()> {
    match eig.values.last() {
        Some(&min) if min < -cutoff => Err(Error::NotPsd { eigenvalue: min }),
        _ => Ok(()),
    }
}
