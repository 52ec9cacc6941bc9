//! Two-input gates under the linear (three-photon) and elliptical
//! (two-photon) encodings, plus the general maximum-entropy encoding for
//! larger arities.

use qotp::encoding::{encode_general, ideal_line_success, mixture_density, GateOtp, GateTable, Scheme};
use qotp::qmath::{rank, trace_distance, von_neumann_entropy, SUPPORT_CUTOFF};
use qotp::runtime::stream_rng;

fn main() -> qotp::Result<()> {
    let and = GateTable::and();
    for scheme in [Scheme::LinearG2, Scheme::EllipticalG2] {
        let a = scheme.assignment(2)?;
        let observables: Vec<String> = a.observables().iter().map(ToString::to_string).collect();
        println!("{scheme}: photons {:?}, observables {observables:?}", scheme.photon_layout(2)?);

        // The representative mixture is exactly the max-entropy state.
        let d = trace_distance(&mixture_density(scheme, &and)?, &encode_general(&and, &a)?)?;
        println!("  mixture vs max-entropy state: trace distance {d:.1e}");

        let mut rng = stream_rng(7, 0);
        let trials = 20_000;
        for input in 0..4usize {
            let bits = [input & 2 != 0, input & 1 != 0];
            let mut hits = 0;
            for _ in 0..trials {
                let mut otp = GateOtp::encode(scheme, &and, &mut rng)?;
                hits += (otp.evaluate(&bits, &mut rng)? == and.eval(input)) as usize;
            }
            println!("  AND({}{}) correct {:.4}", bits[0] as u8, bits[1] as u8, hits as f64 / trials as f64);
        }
    }

    for k in 1..=3 {
        let table = GateTable::from_index(k, 1)?;
        let rho = encode_general(&table, &Scheme::General.assignment(k)?)?;
        println!(
            "general k={k}: rank {}, entropy {:.6}, per-line success {}",
            rank(&rho, SUPPORT_CUTOFF)?,
            von_neumann_entropy(&rho)?,
            ideal_line_success(k)
        );
    }
    Ok(())
}
