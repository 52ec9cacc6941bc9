use crate::encoding::{g1_state, GateTable, PureState};
use crate::error::{Error, Result};
use crate::qmath::{C64, ZERO};

// Qubit order in the register: two copy qubits, the oracle's query register
// and its target.
const C1: usize = 0;
const C2: usize = 1;
const Q: usize = 2;
const T: usize = 3;
const N: usize = 4;

fn mask(q: usize) -> usize {
    1 << (N - 1 - q)
}

fn apply_1q(psi: &mut [C64], q: usize, u: [[f64; 2]; 2]) {
    let b = mask(q);
    for i in 0..psi.len() {
        if i & b == 0 {
            let (a0, a1) = (psi[i], psi[i | b]);
            psi[i] = a0 * u[0][0] + a1 * u[0][1];
            psi[i | b] = a0 * u[1][0] + a1 * u[1][1];
        }
    }
}

fn hadamard(psi: &mut [C64], q: usize) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    apply_1q(psi, q, [[h, h], [h, -h]]);
}

fn cnot(psi: &mut [C64], control: usize, target: usize) {
    let (c, t) = (mask(control), mask(target));
    for i in 0..psi.len() {
        if i & c != 0 && i & t == 0 {
            psi.swap(i, i | t);
        }
    }
}

fn cz(psi: &mut [C64], a: usize, b: usize) {
    let m = mask(a) | mask(b);
    for (i, amp) in psi.iter_mut().enumerate() {
        if i & m == m {
            *amp = -*amp;
        }
    }
}

/// The only access to the gate: |x, y⟩ ↦ |x, y ⊕ G(x)⟩ on (Q, T).
fn oracle(psi: &mut [C64], table: &GateTable) {
    let (q, t) = (mask(Q), mask(T));
    for i in 0..psi.len() {
        if i & t == 0 && table.eval((i & q != 0) as usize) {
            psi.swap(i, i | t);
        }
    }
}

/// Runs the single-query two-copy circuit and returns
/// (fidelity with |ψ_G⟩⊗|ψ_G⟩, number of oracle calls).
///
/// Both copy qubits start in W|0⟩ = cos(π/8)|0⟩ + sin(π/8)|1⟩. A Bell
/// transform maps Φ⁺, Φ⁻, Ψ⁺ to |00⟩, |10⟩, |01⟩; the product state has no
/// singlet component, and (X^{a}Z^{b})^{⊗2} only puts the phases (−1)^a on
/// Φ⁻ and (−1)^b on Ψ⁺. The target is flipped to |−⟩ exactly when the
/// copy register is |10⟩ or |01⟩, so one phase-kickback query with the copy
/// register's second bit as input applies both phases at once.
pub fn two_copy_circuit(table: &GateTable) -> Result<(f64, usize)> {
    if table.k() != 1 {
        return Err(Error::invalid(format!("two-copy circuit needs a G1 table, got k = {}", table.k())));
    }
    let (c, s) = ((std::f64::consts::PI / 8.0).cos(), (std::f64::consts::PI / 8.0).sin());
    let w = [[c, s], [s, -c]];
    let mut psi = vec![ZERO; 1 << N];
    psi[0] = C64::new(1.0, 0.0);
    apply_1q(&mut psi, C1, w);
    apply_1q(&mut psi, C2, w);

    cnot(&mut psi, C1, C2);
    hadamard(&mut psi, C1);
    cnot(&mut psi, C2, Q);
    hadamard(&mut psi, T);
    cz(&mut psi, C1, T);
    cz(&mut psi, C2, T);
    oracle(&mut psi, table);
    let calls = 1;
    cz(&mut psi, C2, T);
    cz(&mut psi, C1, T);
    hadamard(&mut psi, T);
    cnot(&mut psi, C2, Q);
    hadamard(&mut psi, C1);
    cnot(&mut psi, C1, C2);

    let g = g1_state(table)?;
    let target = g.kron(&g).kron(&PureState::basis(4, 0));
    let overlap = target.inner(&PureState::new(psi)?);
    Ok((overlap.norm_sqr(), calls))
}

/// Fidelity of the single-query circuit's output with two copies of ψ_G.
pub fn two_copy_from_single_query(table: &GateTable) -> Result<f64> {
    Ok(two_copy_circuit(table)?.0)
}
