//! Single-input gate programs: the four conjugate-coding states, a one-shot
//! evaluation, and the per-line success rate ½ + 1/(2√2).

use qotp::encoding::{success_probability, G1Gate, GateOtp, Scheme};
use qotp::runtime::stream_rng;
use qotp::Error;

fn main() -> qotp::Result<()> {
    let mut rng = stream_rng(1, 0);
    for g in G1Gate::ALL {
        let [x, y, z] = g.state().bloch();
        println!(
            "{:<4} table {}  bloch ({x:+.4}, {y:+.4}, {z:+.4})  exact per-line success {:?}",
            format!("{g:?}"),
            g.table(),
            success_probability(Scheme::G1, &g.table())?
        );
    }

    // A program answers exactly one query.
    let mut otp = GateOtp::encode(Scheme::G1, &G1Gate::Not.table(), &mut rng)?;
    println!("NOT(1) read as {}", otp.evaluate(&[true], &mut rng)? as u8);
    assert!(matches!(otp.evaluate(&[false], &mut rng), Err(Error::AlreadyConsumed)));

    let trials = 100_000;
    let mut hits = 0;
    for _ in 0..trials {
        let mut otp = GateOtp::encode(Scheme::G1, &G1Gate::Id.table(), &mut rng)?;
        hits += (!otp.evaluate(&[false], &mut rng)?) as usize;
    }
    println!("identity gate, input 0: {:.4} empirical over {trials} fresh programs", hits as f64 / trials as f64);
    Ok(())
}
