//! The millionaires comparator: Alice's number is compiled into AND/OR gate
//! programs, Bob runs them on his bits; success drops with the significance
//! of the differing bit.

use qotp::circuits::{compile_millionaires, parse_bits, predict_success};
use qotp::encoding::Scheme;
use qotp::experiments::{deviations, millionaires_batch};
use qotp::runtime::SessionConfig;

fn main() -> qotp::Result<()> {
    let alice = parse_bits("0101")?;
    let circuit = compile_millionaires(&alice, 4)?;
    let base = SessionConfig {
        scheme: Scheme::EllipticalG2,
        seed: 2024,
        ..Default::default()
    };
    for bob in deviations(&alice) {
        let predicted = predict_success(&circuit, &bob, 0.75)?.per_output[0];
        let s = millionaires_batch(&alice, &bob, &base, 20_000)?;
        println!(
            "bob {}: bob > alice = {}, predicted {predicted:.5}, empirical {:.5} ± {:.5}",
            s.bob,
            s.ideal,
            s.empirical(),
            s.stderr()
        );
    }
    Ok(())
}
