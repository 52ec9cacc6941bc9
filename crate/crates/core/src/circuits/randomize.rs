use rand::Rng;

use super::{Circuit, Node};
use crate::error::{Error, Result};

/// A randomized circuit and the pads that undo it on each output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Randomized {
    pub circuit: Circuit,
    /// XOR onto the randomized outputs (in output order) to recover the
    /// original function.
    pub output_pads: Vec<bool>,
    /// Slot ids, in topological order, after which a NOT pair was inserted.
    pub inserted: Vec<usize>,
}

impl Randomized {
    pub fn decode(&self, raw_outputs: &[bool]) -> Vec<bool> {
        raw_outputs.iter().zip(&self.output_pads).map(|(o, p)| o ^ p).collect()
    }
}

pub fn randomize_not_pairs<R: Rng + ?Sized>(c: &Circuit, rng: &mut R) -> Result<Randomized> {
    randomize_not_pairs_with(c, || rng.random_bool(0.5))
}

/// Inserts a NOT pair after each slot for which `draw` returns true: one NOT
/// is absorbed into the slot's table, the other is pushed forward through
/// NOT/XOR/fan-out wiring into the input lines of downstream slots (permuting
/// their rows) or, on reaching an output, recorded as that output's pad.
pub fn randomize_not_pairs_with(c: &Circuit, mut draw: impl FnMut() -> bool) -> Result<Randomized> {
    let mut flag = vec![false; c.len()];
    let mut out = c.clone();
    let mut inserted = Vec::new();
    for &id in c.topological_order() {
        let ins: Vec<bool> = c.sources(id).iter().map(|&s| flag[s]).collect();
        flag[id] = match c.node(id) {
            Node::Input { .. } | Node::Const { .. } => false,
            Node::OtpSlot { table: None, .. } => {
                return Err(Error::invalid(format!("slot {id} has no table to randomize")));
            }
            Node::OtpSlot { table: Some(t), .. } => {
                let mask = ins.iter().fold(0usize, |acc, &f| (acc << 1) | f as usize);
                let r = draw();
                let permuted = t.with_input_flips(mask).padded(r);
                out = out.with_slot_table(id, permuted);
                if r {
                    inserted.push(id);
                }
                r
            }
            Node::Not | Node::Fanout | Node::Output { .. } => ins[0],
            Node::Xor => ins[0] ^ ins[1],
        };
    }
    let output_pads = c.output_ids().iter().map(|&o| flag[o]).collect();
    Ok(Randomized {
        circuit: out,
        output_pads,
        inserted,
    })
}
