//! A single oracle query suffices to prepare two copies of a G1 state, so
//! the encoding can leak more than one line to a coherent attacker.

use qotp::analysis::two_copy_circuit;
use qotp::encoding::G1Gate;

fn main() -> qotp::Result<()> {
    for g in G1Gate::ALL {
        let (fidelity, calls) = two_copy_circuit(&g.table())?;
        println!("{:?} ({}): fidelity {fidelity:.12} using {calls} oracle call", g, g.table());
    }
    Ok(())
}
