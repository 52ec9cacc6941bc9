use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::thread;

use qotp::experiments::SignatureFile;

fn qotp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qotp"))
        .args(args)
        .output()
        .expect("spawn qotp")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn out(dir: &Path) -> &str {
    dir.to_str().unwrap()
}

#[test]
fn gates_csv_is_deterministic_with_metadata_and_header() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = qotp(&["gates", "--trials", "300", "--seed", "11", "--scheme", "elliptical", "--out", out(d.path())]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let first = std::fs::read_to_string(a.path().join("gates.csv")).unwrap();
    assert_eq!(first, std::fs::read_to_string(b.path().join("gates.csv")).unwrap());
    let lines: Vec<&str> = first.lines().collect();
    assert!(lines[0].starts_with("# qotp gates seed=11 trials=300 scheme=elliptical"));
    assert_eq!(lines[1], "scheme,table,input,trials,successes,empirical,exact,stderr,z");
    assert_eq!(lines.len(), 2 + 64);
}

#[test]
fn invalid_configuration_exits_2() {
    let d = tempfile::tempdir().unwrap();
    for args in [
        vec!["gates", "--fidelity", "1.5"],
        vec!["millionaires", "--loss", "1.0"],
        vec!["millionaires", "--alice", "01x1"],
        vec!["millionaires", "--alice", "0101", "--bob", "011"],
        vec!["sig-curves", "--tau", "400"],
        vec!["gates", "--trials", "0"],
    ] {
        let mut args = args;
        args.extend(["--out", out(d.path())]);
        assert_eq!(code(&qotp(&args)), 2, "{args:?}");
    }
}

#[test]
fn resource_limit_exits_4() {
    let d = tempfile::tempdir().unwrap();
    let o = qotp(&["bounds", "--copies", "11", "--out", out(d.path())]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn malformed_peer_exits_3() {
    let d = tempfile::tempdir().unwrap();
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    let fake = thread::spawn(move || {
        let (mut s, _) = listener.accept().unwrap();
        s.write_all(b"{\"type\":\"state_offer\"\n").unwrap();
        let mut line = String::new();
        BufReader::new(s).read_line(&mut line).unwrap();
        line
    });
    let o = qotp(&["connect", "--addr", &addr, "--bob", "0110", "--out", out(d.path())]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fake.join().unwrap().contains("\"type\":\"abort\""));
    assert!(d.path().join("bob_transcript.json").exists());
}

#[test]
fn serve_and_connect_complete_a_session() {
    let d = tempfile::tempdir().unwrap();
    let mut server = Command::new(env!("CARGO_BIN_EXE_qotp"))
        .args(["serve", "--listen", "127.0.0.1:0", "--alice", "0101", "--seed", "5", "--out", out(d.path())])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stdout = BufReader::new(server.stdout.take().unwrap());
    let mut line = String::new();
    stdout.read_line(&mut line).unwrap();
    let addr = line.trim().strip_prefix("listening on ").expect("address line").to_string();
    let o = qotp(&["connect", "--addr", &addr, "--bob", "0111", "--seed", "6", "--out", out(d.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("output bits:"));
    assert!(server.wait().unwrap().success());
    assert!(d.path().join("alice_transcript.json").exists());
}

#[test]
fn sign_verify_round_trip_and_tamper_detection() {
    let d = tempfile::tempdir().unwrap();
    let msg = d.path().join("msg.txt");
    std::fs::write(&msg, "pay 10 coins to carol").unwrap();
    let msg = msg.to_str().unwrap();
    let o = qotp(&["sign", "--seed", "42", "--message", msg, "--out", out(d.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let sig = d.path().join("signature.json");
    let sig_s = sig.to_str().unwrap();

    let verify = |seed: &str, message: &str, signature: &str| {
        code(&qotp(&["verify", "--seed", seed, "--message", message, "--signature", signature, "--out", out(d.path())]))
    };
    assert_eq!(verify("42", msg, sig_s), 0);
    assert_eq!(verify("43", msg, sig_s), 1);

    let other = d.path().join("other.txt");
    std::fs::write(&other, "pay 99 coins to mallory").unwrap();
    assert_eq!(verify("42", other.to_str().unwrap(), sig_s), 1);

    let mut file: SignatureFile = serde_json::from_str(&std::fs::read_to_string(&sig).unwrap()).unwrap();
    for b in file.rows[0].outputs.iter_mut().take(80) {
        *b = !*b;
    }
    let tampered = d.path().join("tampered.json");
    std::fs::write(&tampered, serde_json::to_string(&file).unwrap()).unwrap();
    assert_eq!(verify("42", msg, tampered.to_str().unwrap()), 1);

    std::fs::write(&tampered, "{\"big_t\": 300,").unwrap();
    assert_eq!(verify("42", msg, tampered.to_str().unwrap()), 2);
}

#[test]
fn millionaires_and_bounds_write_outputs() {
    let d = tempfile::tempdir().unwrap();
    let o = qotp(&["millionaires", "--trials", "200", "--out", out(d.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(d.path().join("millionaires.csv")).unwrap();
    assert!(csv.starts_with("# qotp millionaires"));
    assert_eq!(csv.lines().count(), 2 + 4);
    assert!(d.path().join("millionaires_transcript.json").exists());

    let o = qotp(&["bounds", "--out", out(d.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["violations.csv", "tradeoff.csv", "certification.json", "two_copy.csv"] {
        assert!(d.path().join(f).exists(), "{f}");
    }
}
