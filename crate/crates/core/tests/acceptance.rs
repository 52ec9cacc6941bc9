//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Tolerances and sample sizes are pinned below.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::process::ExitCode;
use std::thread;

use qotp::analysis::{
    certify_optimal, classical_pair_floor, classical_parity_floor, gate_ensemble, hamming_error_distribution,
    jrf_iterate, pgm, quantum_line_and_parity, subset_success, two_copy_circuit,
};
use qotp::circuits::{compile_millionaires, parse_bits, predict_success, randomize_not_pairs_with, Circuit};
use qotp::encoding::{
    encode_general, g1_state, mixture_density, success_probability, G1Gate, GateTable, Scheme,
};
use qotp::experiments::{deviations, gate_cell, millionaires_batch, sign_and_verify, ExperimentConfig};
use qotp::qmath::{rank, trace_distance, von_neumann_entropy, ComplexMatrix, SUPPORT_CUTOFF};
use qotp::runtime::{connect, decode_message, derive_seed, run_session, serve, ProtocolMessage, SessionConfig};
use qotp::signature::{
    best_threshold, chi_square, codeword_top_eigenvalue, dishonest_bound, g1_line_success, honest_pass_probability,
    match_histogram, threshold_sweep, Aggregation, DEFAULT_T, DEFAULT_TAU, DIGEST_BITS,
};
use qotp::stats::{proportion_stderr, two_proportion_z};
use qotp::Result;
use statrs::distribution::{ChiSquared, ContinuousCDF};

const SEED: u64 = 20_240_229;
const EXACT_TOL: f64 = 1e-12;
const MC_TRIALS: usize = 100_000;
const MC_ABS_TOL: f64 = 0.01;
const SIGMAS: f64 = 3.0;
const ENTROPY_TOL: f64 = 1e-9;
const IDEMPOTENCE_TOL: f64 = 1e-10;
const CLOSED_FORM_TOL: f64 = 1e-9;
const JRF_TOL: f64 = 1e-9;
const JRF_ITERATIONS: usize = 5;
const CERTIFICATE_TOL: f64 = 1e-8;
const SESSIONS: usize = 100_000;
const HONEST_TARGET: f64 = 0.975;
const HONEST_TOL: f64 = 0.001;
const DISHONEST_MAX: f64 = 0.022;
const CHI_SQUARE_LEVEL: f64 = 0.01;
const CHI_SQUARE_MIN_EXPECTED: f64 = 5.0;
const HISTOGRAM_BUNDLES: usize = 10;
const TWO_COPY_TOL: f64 = 1e-9;
const ALICE: &str = "0101";

/// Sub-checks of one criterion: (passed, description).
#[derive(Default)]
struct Checks(Vec<(bool, String)>);

impl Checks {
    fn check(&mut self, ok: bool, detail: impl Into<String>) {
        self.0.push((ok, detail.into()));
    }

    fn near(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        self.check((got - want).abs() <= tol, format!("{what} = {got:.12} vs {want} (tol {tol:e})"));
    }
}

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

fn c1_g1_line() -> Result<Checks> {
    let mut c = Checks::default();
    let p = 0.5 + 1.0 / (2.0 * 2f64.sqrt());
    let mut worst_exact: f64 = 0.0;
    let mut worst_mc: f64 = 0.0;
    for (n, g) in G1Gate::ALL.iter().enumerate() {
        let t = g.table();
        for (input, &s) in success_probability(Scheme::G1, &t)?.iter().enumerate() {
            worst_exact = worst_exact.max((s - p).abs());
            let cell = gate_cell(Scheme::G1, &t, input, 1.0, MC_TRIALS, derive_seed(SEED, (2 * n + input) as u64))?;
            worst_mc = worst_mc.max((cell.empirical - p).abs());
        }
    }
    c.check(worst_exact <= EXACT_TOL, format!("exact max |P - 0.853553| = {worst_exact:.1e}"));
    c.check(worst_mc <= MC_ABS_TOL, format!("Monte Carlo max deviation {worst_mc:.4} over 8 cells x {MC_TRIALS}"));
    Ok(c)
}

fn c2_g2_line() -> Result<Checks> {
    let mut c = Checks::default();
    let mut n = 0u64;
    for scheme in [Scheme::LinearG2, Scheme::EllipticalG2] {
        let mut worst_exact: f64 = 0.0;
        let mut worst_mc: f64 = 0.0;
        for t in GateTable::all(2)? {
            for (input, &s) in success_probability(scheme, &t)?.iter().enumerate() {
                worst_exact = worst_exact.max((s - 0.75).abs());
                let cell = gate_cell(scheme, &t, input, 1.0, MC_TRIALS, derive_seed(SEED, n))?;
                worst_mc = worst_mc.max((cell.empirical - 0.75).abs());
                n += 1;
            }
        }
        c.check(worst_exact <= EXACT_TOL, format!("{scheme} exact max |P - 0.75| = {worst_exact:.1e}"));
        c.check(worst_mc <= MC_ABS_TOL, format!("{scheme} Monte Carlo max deviation {worst_mc:.4} over 64 cells"));
    }
    Ok(c)
}

fn c3_encoding_equivalence() -> Result<Checks> {
    let mut c = Checks::default();
    for scheme in [Scheme::LinearG2, Scheme::EllipticalG2] {
        let assignment = scheme.assignment(2)?;
        let mut worst: f64 = 0.0;
        for t in GateTable::all(2)? {
            worst = worst.max(trace_distance(&mixture_density(scheme, &t)?, &encode_general(&t, &assignment)?)?);
        }
        c.check(worst <= EXACT_TOL, format!("{scheme} mixture vs max-entropy state: {worst:.1e}"));
    }
    for k in 1..=3u32 {
        let assignment = Scheme::General.assignment(k)?;
        let want_rank = 1usize << (k - 1);
        let xi = 2f64.powi(1 - k as i32);
        let (mut ranks, mut worst_s, mut worst_sq) = (Vec::new(), 0f64, 0f64);
        for t in GateTable::all(k)? {
            let rho = encode_general(&t, &assignment)?;
            let r = rank(&rho, SUPPORT_CUTOFF)?;
            if !ranks.contains(&r) {
                ranks.push(r);
            }
            worst_s = worst_s.max((von_neumann_entropy(&rho)? - (k - 1) as f64).abs());
            worst_sq = worst_sq.max((&rho * &rho).max_abs_diff(&rho.scale_real(xi)));
        }
        c.check(ranks == [want_rank], format!("k={k} rank {ranks:?} vs {want_rank}"));
        c.check(worst_s <= ENTROPY_TOL, format!("k={k} |S - {}| = {worst_s:.3}", k - 1));
        c.check(worst_sq <= IDEMPOTENCE_TOL, format!("k={k} |rho^2 - {xi} rho| = {worst_sq:.3e}"));
    }
    Ok(c)
}

fn c4_parity_hiding() -> Result<Checks> {
    let mut c = Checks::default();
    let rho = |l: &str| -> Result<ComplexMatrix> { Ok(g1_state(&l.parse::<GateTable>()?)?.density()) };
    let even = (&rho("00")? + &rho("11")?).scale_real(0.5);
    let odd = (&rho("01")? + &rho("10")?).scale_real(0.5);
    let d = trace_distance(&even, &odd)?;
    c.check(d <= EXACT_TOL, format!("even/odd mixture distance {d:.1e}"));
    let one = quantum_line_and_parity(1)?;
    c.near("F2(c=1)", one.f2_numeric, 0.5, EXACT_TOL);
    c.near("classical floor at F1", classical_parity_floor(one.f1_numeric), 1.0 / 2f64.sqrt(), EXACT_TOL);
    for copies in [1, 3, 5] {
        let lp = quantum_line_and_parity(copies)?;
        let gap = (lp.f1_closed - lp.f1_numeric).abs().max((lp.f2_closed - lp.f2_numeric).abs());
        c.check(
            lp.violates_classical() && gap <= CLOSED_FORM_TOL,
            format!(
                "c={copies}: F1 {:.6} F2 {:.6} floor {:.6}, closed-form gap {gap:.1e}",
                lp.f1_numeric,
                lp.f2_numeric,
                classical_parity_floor(lp.f1_numeric)
            ),
        );
    }
    Ok(c)
}

fn c5_discrimination() -> Result<Checks> {
    let mut c = Checks::default();
    for (k, want) in [(1u32, 0.5), (2, 0.125)] {
        let states = gate_ensemble(k, 1)?;
        let p = pgm(&states, &uniform(states.len()))?.average_success(&states);
        c.near(&format!("PGM success k={k}"), p, want, EXACT_TOL);
    }
    let mix = hamming_error_distribution(2, 1)?;
    let want = [0.125, 0.375, 0.375, 0.125, 0.0];
    let worst = mix.e.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    c.check(mix.e.len() == 5 && worst <= EXACT_TOL, format!("E_h {:?} (max dev {worst:.1e})", rounded(&mix.e)));
    c.near("P1~ (G2)", subset_success(&mix, 1)?, 0.625, EXACT_TOL);
    c.near("P2~ (G2)", subset_success(&mix, 2)?, 0.375, EXACT_TOL);
    c.near("P1~ (G1)", subset_success(&hamming_error_distribution(1, 1)?, 1)?, 0.75, EXACT_TOL);
    let (mut worst_jrf, mut certified, mut total) = (0f64, 0, 0);
    for k in [1u32, 2] {
        for copies in 1..=3 {
            let states = gate_ensemble(k, copies)?;
            let priors = uniform(states.len());
            let p = pgm(&states, &priors)?;
            worst_jrf = worst_jrf.max(p.distance(&jrf_iterate(&states, &priors, JRF_ITERATIONS)?));
            certified += certify_optimal(&p, &states, CERTIFICATE_TOL)?.optimal as usize;
            total += 1;
        }
    }
    c.check(worst_jrf <= JRF_TOL, format!("JRF vs PGM max distance {worst_jrf:.1e}"));
    c.check(certified == total, format!("certified {certified}/{total} at tol {CERTIFICATE_TOL:e}"));
    Ok(c)
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1e9).round() / 1e9).collect()
}

fn c6_pair_floor() -> Result<Checks> {
    let mut c = Checks::default();
    let floor = classical_pair_floor(2, 0.75);
    c.near("classical pair floor (k=2, P1=0.75)", floor, 0.5, EXACT_TOL);
    let quantum = subset_success(&hamming_error_distribution(2, 1)?, 2)?;
    c.check(quantum < floor, format!("quantum P2~ {quantum} below the floor"));
    Ok(c)
}

/// Independent oracle: sum over every slot error pattern.
fn enumerate_success(circuit: &Circuit, bob: &[bool], p: f64) -> Result<f64> {
    let slots = circuit.slot_ids();
    let ideal = circuit.ideal_eval(bob)?;
    let mut total = 0.0;
    for mask in 0..1usize << slots.len() {
        let weight: f64 = (0..slots.len()).map(|i| if mask >> i & 1 == 1 { 1.0 - p } else { p }).product();
        let out = circuit.evaluate_with(bob, |id, bits| {
            let i = slots.iter().position(|&s| s == id).expect("slot id");
            Ok(circuit.slot_table(id)?.eval_bits(bits)? ^ (mask >> i & 1 == 1))
        })?;
        if out == ideal {
            total += weight;
        }
    }
    Ok(total)
}

fn c7_millionaires() -> Result<Checks> {
    let mut c = Checks::default();
    let alice = parse_bits(ALICE)?;
    let circuit = compile_millionaires(&alice, alice.len())?;
    let want = [0.75, 0.625, 0.5625, 0.53125];
    let mut preds = Vec::new();
    for (j, (bob, w)) in deviations(&alice).iter().zip(want).enumerate() {
        let dp = predict_success(&circuit, bob, 0.75)?.per_output[0];
        let oracle = enumerate_success(&circuit, bob, 0.75)?;
        let base = SessionConfig {
            seed: derive_seed(SEED, j as u64),
            ..Default::default()
        };
        let s = millionaires_batch(&alice, bob, &base, SESSIONS)?;
        let z = (s.empirical() - dp) / s.stderr();
        c.check(
            (dp - w).abs() <= EXACT_TOL && (oracle - w).abs() <= EXACT_TOL && z.abs() <= SIGMAS && s.completed == SESSIONS,
            format!("bit {j}: DP {dp} enum {oracle} MC {:.4} (z {z:+.2})", s.empirical()),
        );
        preds.push(dp);
    }
    c.check(preds.windows(2).all(|w| w[0] > w[1]), "strictly decreasing MSB to LSB");
    Ok(c)
}

fn c8_randomization() -> Result<Checks> {
    let mut c = Checks::default();
    let (mut cases, mut worst, mut decoded_ok) = (0usize, 0f64, true);
    for n in 1..=4usize {
        for a in 0..1usize << n {
            let alice = qotp::encoding::bits_of(a, n);
            let circuit = compile_millionaires(&alice, n)?;
            for mask in 0..1usize << n {
                let mut i = 0;
                let r = randomize_not_pairs_with(&circuit, || {
                    i += 1;
                    mask >> (i - 1) & 1 == 1
                })?;
                for b in 0..1usize << n {
                    let bob = qotp::encoding::bits_of(b, n);
                    decoded_ok &= r.decode(&r.circuit.ideal_eval(&bob)?) == circuit.ideal_eval(&bob)?;
                    for p in [0.75, g1_line_success(), 0.6] {
                        let orig = predict_success(&circuit, &bob, p)?.per_output[0];
                        let rand = predict_success(&r.circuit, &bob, p)?.per_output[0];
                        worst = worst.max((orig - rand).abs());
                    }
                    cases += 1;
                }
            }
        }
    }
    c.check(decoded_ok, format!("pads recover the ideal outputs in all {cases} cases"));
    c.check(worst <= EXACT_TOL, format!("max DP difference {worst:.1e}"));
    Ok(c)
}

fn c9_loss() -> Result<Checks> {
    let mut c = Checks::default();
    let alice = parse_bits(ALICE)?;
    let bob = parse_bits("0111")?;
    let run = |loss: f64, stream: u64| {
        let base = SessionConfig {
            loss,
            copies_per_gate: 8,
            seed: derive_seed(SEED, stream),
            ..Default::default()
        };
        millionaires_batch(&alice, &bob, &base, SESSIONS)
    };
    let lossy = run(0.5, 100)?;
    let clean = run(0.0, 101)?;
    let z = two_proportion_z(
        lossy.correct as u64,
        lossy.completed as u64,
        clean.correct as u64,
        clean.completed as u64,
    );
    c.check(
        z.abs() <= SIGMAS,
        format!("success {:.4} vs {:.4} (z {z:+.2})", lossy.empirical(), clean.empirical()),
    );
    let q = 0.5f64.powi(8);
    let sigma = proportion_stderr(q, lossy.gates_opened as u64);
    let rate = lossy.gate_abort_rate();
    c.check(
        (rate - q).abs() <= SIGMAS * sigma,
        format!("gate abort rate {rate:.5} vs {q:.5} (sigma {sigma:.1e}, {} gates)", lossy.gates_opened),
    );
    Ok(c)
}

fn c10_signature() -> Result<Checks> {
    let mut c = Checks::default();
    let p = g1_line_success();
    let honest = honest_pass_probability(DEFAULT_T, DEFAULT_TAU, p, DIGEST_BITS)?;
    c.near("honest pass probability", honest, HONEST_TARGET, HONEST_TOL);
    let dishonest = dishonest_bound(DEFAULT_T, DEFAULT_TAU, p, DIGEST_BITS)?;
    c.check(dishonest <= DISHONEST_MAX, format!("dishonest bound {dishonest:.6} <= {DISHONEST_MAX}"));
    let best = best_threshold(&threshold_sweep(DEFAULT_T, DIGEST_BITS, p, Aggregation::AllRows)?).expect("non-empty");
    c.check((230..=240).contains(&best.tau), format!("sweep argmax tau = {}", best.tau));

    let cfg = ExperimentConfig::default();
    let mut counts = Vec::new();
    for i in 0..HISTOGRAM_BUNDLES {
        let (_, report) = sign_and_verify(&cfg, derive_seed(SEED, i as u64), format!("acceptance {i}").as_bytes())?;
        counts.extend(report.match_counts);
    }
    let bins = match_histogram(&counts, DEFAULT_T, p)?;
    let (chi2, dof) = chi_square(&bins, CHI_SQUARE_MIN_EXPECTED);
    let critical = ChiSquared::new(dof as f64)
        .expect("positive dof")
        .inverse_cdf(1.0 - CHI_SQUARE_LEVEL);
    c.check(
        chi2 <= critical,
        format!("chi2 {chi2:.2} on {dof} dof <= {critical:.2} ({} rows)", counts.len()),
    );

    let mut worst: f64 = 0.0;
    for t in 1..=4 {
        for h in 0..=t {
            let (numeric, closed) = codeword_top_eigenvalue(t, h)?;
            worst = worst.max((numeric - closed).abs());
        }
    }
    c.check(worst <= CLOSED_FORM_TOL, format!("top eigenvalue lemma T<=4, max gap {worst:.1e}"));
    Ok(c)
}

fn c11_two_copy() -> Result<Checks> {
    let mut c = Checks::default();
    for g in G1Gate::ALL {
        let (f, calls) = two_copy_circuit(&g.table())?;
        c.check(
            f >= 1.0 - TWO_COPY_TOL && calls == 1,
            format!("{}: fidelity {f:.12}, {calls} call", g.table().label()),
        );
    }
    Ok(c)
}

fn c12_wire() -> Result<Checks> {
    let mut c = Checks::default();
    let alice = parse_bits(ALICE)?;
    let bob = parse_bits("1100")?;
    let circuit = compile_millionaires(&alice, alice.len())?;
    let cfg = SessionConfig {
        loss: 0.3,
        copies_per_gate: 3,
        randomize: true,
        seed: SEED,
        ..Default::default()
    };
    let local = run_session(&circuit, &bob, &cfg)?;
    let listener = TcpListener::bind("127.0.0.1:0").map_err(|e| qotp::Error::io("bind", e))?;
    let addr = listener.local_addr().map_err(|e| qotp::Error::io("bind", e))?;
    let server = {
        let circuit = circuit.clone();
        thread::spawn(move || serve(&listener, &circuit, &cfg))
    };
    let remote_bob = connect(addr, &bob, &cfg)?;
    let remote_alice = server.join().expect("server thread")?;
    c.check(
        remote_bob.same_run(&local) && remote_alice.messages == local.messages,
        format!("loopback transcript equals in-process ({} frames)", local.messages.len()),
    );
    c.check(
        remote_bob.check_discipline().is_ok() && remote_bob.outputs.is_some(),
        "loopback session completes with pad discipline",
    );

    // Bob receives garbage from a fake Alice.
    let listener = TcpListener::bind("127.0.0.1:0").map_err(|e| qotp::Error::io("bind", e))?;
    let addr = listener.local_addr().map_err(|e| qotp::Error::io("bind", e))?;
    let fake_alice = thread::spawn(move || -> Option<ProtocolMessage> {
        let (mut s, _) = listener.accept().ok()?;
        s.write_all(b"{\"type\":\"program_header\",\"circ\n").ok()?;
        let mut line = String::new();
        BufReader::new(s).read_line(&mut line).ok()?;
        decode_message(line.as_bytes()).ok()
    });
    let t = connect(addr, &bob, &cfg)?;
    let reply = fake_alice.join().expect("fake alice thread");
    c.check(
        t.abort_reason.as_deref().is_some_and(|r| r.starts_with("malformed frame"))
            && matches!(reply, Some(ProtocolMessage::Abort { .. })),
        format!("Bob aborts on a malformed frame: {:?}", t.abort_reason.unwrap_or_default()),
    );

    // Alice receives garbage from a fake Bob.
    let listener = TcpListener::bind("127.0.0.1:0").map_err(|e| qotp::Error::io("bind", e))?;
    let addr = listener.local_addr().map_err(|e| qotp::Error::io("bind", e))?;
    let server = {
        let circuit = circuit.clone();
        thread::spawn(move || serve(&listener, &circuit, &cfg))
    };
    let mut s = TcpStream::connect(addr).map_err(|e| qotp::Error::io("connect", e))?;
    s.write_all(b"\xff\xfe not json\n").map_err(|e| qotp::Error::io("write", e))?;
    let t = server.join().expect("server thread")?;
    c.check(
        t.abort_reason.as_deref().is_some_and(|r| r.starts_with("malformed frame")),
        format!("Alice aborts on a malformed frame: {:?}", t.abort_reason.unwrap_or_default()),
    );
    Ok(c)
}

type Criterion = (u8, &'static str, fn() -> Result<Checks>);

const CRITERIA: [Criterion; 12] = [
    (1, "G1 per-line success", c1_g1_line),
    (2, "G2 per-line success", c2_g2_line),
    (3, "encoding equivalence", c3_encoding_equivalence),
    (4, "parity hiding", c4_parity_hiding),
    (5, "discrimination suite", c5_discrimination),
    (6, "classical pair floor", c6_pair_floor),
    (7, "millionaires", c7_millionaires),
    (8, "randomization invariance", c8_randomization),
    (9, "loss resilience", c9_loss),
    (10, "signature", c10_signature),
    (11, "two-copy circuit", c11_two_copy),
    (12, "wire protocol", c12_wire),
];

fn main() -> ExitCode {
    let mut failed = 0;
    for (n, name, run) in CRITERIA {
        let (ok, detail) = match run() {
            Ok(Checks(checks)) => {
                let ok = checks.iter().all(|(ok, _)| *ok);
                let detail = checks
                    .iter()
                    .map(|(ok, d)| if *ok { d.clone() } else { format!("FAILED {d}") })
                    .collect::<Vec<_>>()
                    .join("; ");
                (ok, detail)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        failed += !ok as usize;
        println!("{} criterion {n} ({name}): {detail}", if ok { "PASS" } else { "FAIL" });
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
