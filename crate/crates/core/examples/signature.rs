//! Delegated one-time signatures: bundle, sign, verify, and the exact
//! honest/dishonest analysis behind the default T = 300, τ = 234.

use qotp::runtime::stream_rng;
use qotp::signature::{
    best_threshold, dishonest_bound, g1_line_success, honest_pass_probability, threshold_sweep, verify, Aggregation,
    SignMode, SignatureBundle, DEFAULT_T, DEFAULT_TAU, DIGEST_BITS,
};

fn main() -> qotp::Result<()> {
    let mut rng = stream_rng(99, 0);
    let (mut bundle, record) = SignatureBundle::generate(DIGEST_BITS, DEFAULT_T, &mut rng)?;
    let msg = b"pay 10 coins to Bob";
    let sig = bundle.sign(msg, SignMode::Physical { fidelity: 1.0 }, &mut rng)?;
    let report = verify(&record, msg, &sig, DEFAULT_TAU)?;
    println!("valid: {}, weakest row matched {} of {DEFAULT_T}", report.pass, report.min_matches());
    let forged = verify(&record, b"pay 99 coins to Bob", &sig, DEFAULT_TAU)?;
    println!("same rows on another message: valid {}, weakest row {}", forged.pass, forged.min_matches());

    let p = g1_line_success();
    println!(
        "exact: honest pass {:.6}, dishonest bound {:.6}",
        honest_pass_probability(DEFAULT_T, DEFAULT_TAU, p, DIGEST_BITS)?,
        dishonest_bound(DEFAULT_T, DEFAULT_TAU, p, DIGEST_BITS)?
    );
    for agg in [Aggregation::AllRows, Aggregation::SingleRow] {
        let best = best_threshold(&threshold_sweep(DEFAULT_T, DIGEST_BITS, p, agg)?).expect("non-empty");
        println!("{agg:?}: best tau {} (honest {:.4}, dishonest {:.2e})", best.tau, best.honest, best.dishonest);
    }
    Ok(())
}
