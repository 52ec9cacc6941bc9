//! Whole-table identification: pretty-good measurement, JRF iteration,
//! optimality certificates and the Hamming-error distribution.

use qotp::analysis::{
    certify_optimal, confusion_by_distance, gate_ensemble, jrf_iterate, pgm, subset_success, tradeoff_curve,
};

fn main() -> qotp::Result<()> {
    for (k, copies) in [(1, 1), (1, 3), (2, 1), (2, 2)] {
        let states = gate_ensemble(k, copies)?;
        let n = states.len();
        let priors = vec![1.0 / n as f64; n];
        let m = pgm(&states, &priors)?;
        let jrf = jrf_iterate(&states, &priors, 5)?;
        let cert = certify_optimal(&m, &states, 1e-8)?;
        let mix = confusion_by_distance(&m, &states);
        println!(
            "k={k} c={copies}: PGM success {:.6}, |JRF - PGM| {:.1e}, optimal {}, E_h {:?}, P1~ {:.4}",
            m.average_success(&states),
            m.distance(&jrf),
            cert.optimal,
            mix.e.iter().map(|x| (x * 1e6).round() / 1e6).collect::<Vec<_>>(),
            subset_success(&mix, 1)?
        );
    }
    for t in tradeoff_curve(1, &[1, 3, 5])? {
        println!("G1 with {} copies: majority-vote P1 {:.5}, identification P1~ {:.5}", t.copies, t.p1, t.p1_tilde);
    }
    Ok(())
}
