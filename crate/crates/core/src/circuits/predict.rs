use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Circuit, Node};
use crate::encoding::bits_of;
use crate::error::{Error, Result};

/// Probability, per output, that the noisy program agrees with the ideal one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessPrediction {
    pub per_output: Vec<f64>,
}

/// Exact success probability when every slot returns the correct line of its
/// table with probability `per_line_p` and the flipped bit otherwise.
///
/// Tracks P(wire = 1) through the DAG. Wires entering the same node must not
/// share a noisy slot ancestor, since their errors would then be correlated;
/// such topologies are rejected.
pub fn predict_success(c: &Circuit, inputs: &[bool], per_line_p: f64) -> Result<SuccessPrediction> {
    if !(0.0..=1.0).contains(&per_line_p) {
        return Err(Error::invalid(format!("per-line probability {per_line_p} outside [0, 1]")));
    }
    let ideal = c.ideal_eval(inputs)?;
    let input_ids = c.input_ids();
    let mut p_one = vec![0.0f64; c.len()];
    let mut ancestors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); c.len()];
    for (&id, &b) in input_ids.iter().zip(inputs) {
        p_one[id] = b as u8 as f64;
    }
    for &id in c.topological_order() {
        let src = c.sources(id);
        if src.len() > 1 {
            for i in 0..src.len() {
                for j in i + 1..src.len() {
                    if !ancestors[src[i]].is_disjoint(&ancestors[src[j]]) {
                        return Err(Error::UnsupportedTopology(format!(
                            "inputs of node {id} share a noisy slot ancestor"
                        )));
                    }
                }
            }
        }
        let mut anc: BTreeSet<usize> = src.iter().flat_map(|&s| ancestors[s].iter().copied()).collect();
        p_one[id] = match c.node(id) {
            Node::Input { .. } => p_one[id],
            Node::Const { bit } => *bit as u8 as f64,
            Node::Not => 1.0 - p_one[src[0]],
            Node::Fanout | Node::Output { .. } => p_one[src[0]],
            Node::Xor => {
                let (a, b) = (p_one[src[0]], p_one[src[1]]);
                a * (1.0 - b) + b * (1.0 - a)
            }
            Node::OtpSlot { .. } => {
                let table = c.slot_table(id)?;
                let k = src.len();
                let mut q = 0.0;
                for x in 0..1usize << k {
                    let bits = bits_of(x, k);
                    let weight: f64 = bits
                        .iter()
                        .zip(src)
                        .map(|(&b, &s)| if b { p_one[s] } else { 1.0 - p_one[s] })
                        .product();
                    if weight == 0.0 {
                        continue;
                    }
                    let out_one = if table.eval(x) { per_line_p } else { 1.0 - per_line_p };
                    q += weight * out_one;
                }
                anc.insert(id);
                q
            }
        };
        ancestors[id] = anc;
    }
    let per_output = c
        .output_ids()
        .iter()
        .zip(ideal)
        .map(|(&o, want)| if want { p_one[o] } else { 1.0 - p_one[o] })
        .collect();
    Ok(SuccessPrediction { per_output })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{compile_millionaires, parse_bits, randomize_not_pairs_with, Edge};
    use crate::encoding::GateTable;

    /// Independent oracle: sum over every pattern of slot errors.
    fn enumerate(c: &Circuit, inputs: &[bool], p: f64) -> f64 {
        let slots = c.slot_ids();
        let ideal = c.ideal_eval(inputs).unwrap();
        let mut total = 0.0;
        for pattern in 0..1usize << slots.len() {
            let flips = pattern.count_ones() as i32;
            let w = (1.0 - p).powi(flips) * p.powi(slots.len() as i32 - flips);
            let out = c
                .evaluate_with(inputs, |id, bits| {
                    let pos = slots.iter().position(|&s| s == id).unwrap();
                    Ok(c.slot_table(id)?.eval_bits(bits)? ^ (pattern >> pos & 1 == 1))
                })
                .unwrap();
            if out == ideal {
                total += w;
            }
        }
        total
    }

    #[test]
    fn millionaires_single_bit_deviations() {
        let alice = parse_bits("0101").unwrap();
        let c = compile_millionaires(&alice, 4).unwrap();
        let expected = [0.75, 0.625, 0.5625, 0.53125];
        for (bit, want) in expected.iter().enumerate() {
            let mut bob = alice.clone();
            bob[bit] = !bob[bit];
            let dp = predict_success(&c, &bob, 0.75).unwrap().per_output[0];
            assert!((dp - want).abs() < 1e-12, "bit {bit}: {dp}");
            assert!((dp - enumerate(&c, &bob, 0.75)).abs() < 1e-12);
        }
    }

    #[test]
    fn dp_matches_enumeration_exhaustively() {
        for a in 0..16 {
            let c = compile_millionaires(&bits_of(a, 4), 4).unwrap();
            for b in 0..16 {
                let bits = bits_of(b, 4);
                for p in [0.6, 0.75, 0.9] {
                    let dp = predict_success(&c, &bits, p).unwrap().per_output[0];
                    assert!((dp - enumerate(&c, &bits, p)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn noiseless_limit() {
        let c = compile_millionaires(&parse_bits("0101").unwrap(), 4).unwrap();
        for b in 0..16 {
            assert_eq!(predict_success(&c, &bits_of(b, 4), 1.0).unwrap().per_output, [1.0]);
        }
    }

    #[test]
    fn reconvergent_fanout_is_rejected() {
        let nodes = vec![
            Node::Input { label: "a".into() },
            Node::Input { label: "b".into() },
            Node::slot(GateTable::and()),
            Node::Fanout,
            Node::Xor,
            Node::Output { label: "y".into() },
        ];
        let e = |from, to, port| Edge { from, to, port };
        let edges = vec![e(0, 2, 0), e(1, 2, 1), e(2, 3, 0), e(3, 4, 0), e(3, 4, 1), e(4, 5, 0)];
        let c = Circuit::new(nodes, edges).unwrap();
        assert!(matches!(
            predict_success(&c, &[true, true], 0.75),
            Err(Error::UnsupportedTopology(_))
        ));
    }

    #[test]
    fn randomization_leaves_prediction_unchanged() {
        let c = compile_millionaires(&parse_bits("0110").unwrap(), 4).unwrap();
        for pattern in 0..16u32 {
            let mut i = 0;
            let r = randomize_not_pairs_with(&c, || {
                i += 1;
                pattern >> (i - 1) & 1 == 1
            })
            .unwrap();
            for b in 0..16 {
                let bits = bits_of(b, 4);
                let before = predict_success(&c, &bits, 0.75).unwrap().per_output[0];
                let after = predict_success(&r.circuit, &bits, 0.75).unwrap().per_output[0];
                assert!((before - after).abs() < 1e-12);
            }
        }
    }
}
