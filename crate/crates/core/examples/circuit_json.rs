//! Building a circuit by hand, its JSON form, exact success prediction and
//! NOT-pair randomization.

use qotp::circuits::{predict_success, randomize_not_pairs_with, Circuit, Edge, Node};
use qotp::encoding::GateTable;

fn main() -> qotp::Result<()> {
    // out = NOT(a AND b) XOR c
    let nodes = vec![
        Node::Input { label: "a".into() },
        Node::Input { label: "b".into() },
        Node::Input { label: "c".into() },
        Node::slot(GateTable::and()),
        Node::Not,
        Node::Xor,
        Node::Output { label: "out".into() },
    ];
    let e = |from, to, port| Edge { from, to, port };
    let edges = vec![e(0, 3, 0), e(1, 3, 1), e(3, 4, 0), e(4, 5, 0), e(2, 5, 1), e(5, 6, 0)];
    let c = Circuit::new(nodes, edges)?;

    let json = c.to_json();
    println!("{json}");
    assert_eq!(Circuit::from_json(&json)?, c);
    println!("public header form:\n{}", c.redacted().to_json());

    let inputs = [true, true, false];
    println!("ideal output {:?}", c.ideal_eval(&inputs)?);
    println!("P(correct) at per-line 0.75: {:?}", predict_success(&c, &inputs, 0.75)?.per_output);

    // Insert a NOT pair after every slot.
    let r = randomize_not_pairs_with(&c, || true)?;
    println!(
        "randomized: NOT pairs after slots {:?}, output pads {:?}, decoded ideal {:?}",
        r.inserted,
        r.output_pads,
        r.decode(&r.circuit.ideal_eval(&inputs)?)
    );
    Ok(())
}
