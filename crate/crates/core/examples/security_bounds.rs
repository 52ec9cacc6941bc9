//! Classical versus quantum: the error-mix model, the parity inequality
//! F2 ≥ |2F1 − 1| and its violation by the quantum encoding.

use qotp::analysis::{classical_error_mix, classical_pair_floor, classical_parity_floor, quantum_line_and_parity};

fn main() -> qotp::Result<()> {
    for c in [1, 3, 5] {
        let lp = quantum_line_and_parity(c)?;
        let mix = classical_error_mix(lp.f1_numeric, lp.f2_numeric);
        println!(
            "c={c}: F1 {:.4}, F2 {:.4}, classical floor {:.4}, violated {}, classical error mix {:?} (feasible {})",
            lp.f1_numeric,
            lp.f2_numeric,
            classical_parity_floor(lp.f1_numeric),
            lp.violates_classical(),
            mix.e.iter().map(|x| (x * 1e4).round() / 1e4).collect::<Vec<_>>(),
            mix.feasible()
        );
    }
    println!("classical pair floor at k=2, P1=0.75: {}", classical_pair_floor(2, 0.75));
    Ok(())
}
