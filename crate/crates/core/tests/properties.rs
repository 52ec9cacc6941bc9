use proptest::prelude::*;

use qotp::circuits::{compile_millionaires, predict_success, randomize_not_pairs_with, Circuit};
use qotp::encoding::{bits_of, encode_general, success_probability_with_fidelity, GateTable, Scheme};
use qotp::qmath::{
    anticommuting_family, inv_sqrt_on_support, kron, support_projector, trace_norm, ComplexMatrix, C64,
    SUPPORT_CUTOFF,
};
use qotp::runtime::{decode_message, encode_message, ProtocolMessage};
use qotp::stats::{binomial_cdf_le, binomial_tail_ge};

fn matrix(dim: usize, entries: &[(f64, f64)]) -> ComplexMatrix {
    let data = entries.iter().take(dim * dim).map(|&(re, im)| C64::new(re, im)).collect();
    ComplexMatrix::from_vec(dim, dim, data).unwrap()
}

fn hermitian(dim: usize, entries: &[(f64, f64)]) -> ComplexMatrix {
    let a = matrix(dim, entries);
    (&a + &a.adjoint()).scale_real(0.5)
}

/// Product of single-qubit SU(2) rotations.
fn unitary(angles: &[(f64, f64, f64)]) -> ComplexMatrix {
    let factors: Vec<ComplexMatrix> = angles
        .iter()
        .map(|&(a, b, c)| {
            let (ca, sa) = (a.cos(), a.sin());
            ComplexMatrix::from_rows(&[
                &[C64::from_polar(ca, b), -C64::from_polar(sa, -c)],
                &[C64::from_polar(sa, c), C64::from_polar(ca, -b)],
            ])
        })
        .collect();
    kron(&factors).unwrap()
}

fn entries() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 64)
}

fn draws(mask: u64) -> impl FnMut() -> bool {
    let mut i = 0;
    move || {
        i += 1;
        mask >> ((i - 1) % 64) & 1 == 1
    }
}

proptest! {
    #[test]
    fn anticommuting_families(k in 1u32..=4, xz in any::<bool>(), i in 0usize..16, j in 0usize..16) {
        let fam = anticommuting_family(k, xz).unwrap();
        prop_assert_eq!(fam.len(), 1 << k);
        let (i, j) = (i % fam.len(), j % fam.len());
        prop_assert_eq!(fam[i].anticommutes(&fam[j]), i != j);
        if xz {
            prop_assert!(fam[i].letters().iter().all(|p| p.as_char() != 'Y'));
        }
    }

    #[test]
    fn trace_norm_is_unitarily_invariant(
        n in 1usize..=3,
        e in entries(),
        angles in prop::collection::vec((0.0..3.2f64, 0.0..6.3f64, 0.0..6.3f64), 3),
    ) {
        let h = hermitian(1 << n, &e);
        let u = unitary(&angles[..n]);
        let rotated = &(&u * &h) * &u.adjoint();
        prop_assert!((trace_norm(&rotated).unwrap() - trace_norm(&h).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn inv_sqrt_whitens_onto_support(dim in 2usize..=6, rank in 1usize..=6, e in entries()) {
        let rank = rank.min(dim);
        let mut b = matrix(dim, &e);
        // Keep only `rank` columns so that B B† has that rank.
        let data: Vec<C64> = (0..dim * dim)
            .map(|x| if x % dim < rank { b.as_slice()[x] } else { C64::new(0.0, 0.0) })
            .collect();
        b = ComplexMatrix::from_vec(dim, dim, data).unwrap();
        let m = &b * &b.adjoint();
        let x = inv_sqrt_on_support(&m, SUPPORT_CUTOFF).unwrap();
        let whitened = &(&x * &m) * &x;
        let p = support_projector(&m, SUPPORT_CUTOFF).unwrap();
        prop_assert!(whitened.max_abs_diff(&p) < 1e-6, "{}", whitened.max_abs_diff(&p));
        prop_assert!((&p * &p).max_abs_diff(&p) < 1e-9);
    }

    #[test]
    fn general_encoding_biases_each_observable(k in 1u32..=3, index in any::<usize>(), input in any::<usize>()) {
        let table = GateTable::from_index(k, index % (1 << (1usize << k))).unwrap();
        let input = input % table.lines();
        let assignment = Scheme::General.assignment(k).unwrap();
        let rho = encode_general(&table, &assignment).unwrap();
        let sign = if table.eval(input) { -1.0 } else { 1.0 };
        let got = rho.trace_product(&assignment.observable(input).materialize()).re;
        prop_assert!((got - sign * 2f64.powf(-(k as f64) / 2.0)).abs() < 1e-12);
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn randomization_preserves_success(n in 1usize..=6, a in any::<u64>(), b in any::<u64>(), mask in any::<u64>(), p in 0.5..1.0f64) {
        let alice = bits_of(a as usize % (1 << n), n);
        let bob = bits_of(b as usize % (1 << n), n);
        let c = compile_millionaires(&alice, n).unwrap();
        let r = randomize_not_pairs_with(&c, draws(mask)).unwrap();
        prop_assert_eq!(r.decode(&r.circuit.ideal_eval(&bob).unwrap()), c.ideal_eval(&bob).unwrap());
        let before = predict_success(&c, &bob, p).unwrap().per_output[0];
        let after = predict_success(&r.circuit, &bob, p).unwrap().per_output[0];
        prop_assert!((before - after).abs() < 1e-12);
        let round = Circuit::from_json(&r.circuit.to_json()).unwrap();
        prop_assert_eq!(round, r.circuit);
    }

    #[test]
    fn messages_round_trip(gate in 0usize..1000, copy in 0usize..64, pad in any::<bool>(), pads in prop::collection::vec(any::<bool>(), 0..8), reason in "[ -~]{0,40}") {
        let msgs = [
            ProtocolMessage::ReceiveAck { gate_id: gate, copy_id: copy },
            ProtocolMessage::LossReport { gate_id: gate, copy_id: copy },
            ProtocolMessage::PadReveal { gate_id: gate, copy_id: copy, pad },
            ProtocolMessage::OutputPadReveal { pads },
            ProtocolMessage::Abort { reason },
        ];
        for m in msgs {
            let bytes = encode_message(&m);
            prop_assert_eq!(bytes.iter().filter(|&&b| b == b'\n').count(), 1);
            prop_assert_eq!(decode_message(&bytes).unwrap(), m);
        }
    }

    #[test]
    fn decoding_arbitrary_bytes_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        let _ = decode_message(&bytes);
    }

    #[test]
    fn binomial_tails_are_complementary(n in 1u64..400, k in 0u64..400, p in 0.0..1.0f64) {
        let k = k % (n + 1);
        let total = binomial_cdf_le(n, k, p).unwrap() + if k < n { binomial_tail_ge(n, k + 1, p).unwrap() } else { 0.0 };
        prop_assert!((total - 1.0).abs() < 1e-9, "{total}");
    }

    #[test]
    fn noise_only_lowers_success(f in 0.05..1.0f64, index in 0usize..16, linear in any::<bool>()) {
        let scheme = if linear { Scheme::LinearG2 } else { Scheme::EllipticalG2 };
        let table = GateTable::from_index(2, index).unwrap();
        let noisy = success_probability_with_fidelity(scheme, &table, f).unwrap();
        for s in noisy {
            prop_assert!((0.5..=0.75 + 1e-12).contains(&s));
        }
    }
}
