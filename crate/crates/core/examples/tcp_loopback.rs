//! Alice and Bob as separate endpoints over TCP with newline-delimited JSON
//! frames; the result matches the in-process run with the same seed.

use std::net::TcpListener;

use qotp::circuits::{compile_millionaires, parse_bits};
use qotp::runtime::{connect, run_session, serve, SessionConfig};

fn main() -> qotp::Result<()> {
    let circuit = compile_millionaires(&parse_bits("1011")?, 4)?;
    let bob = parse_bits("1100")?;
    let cfg = SessionConfig {
        copies_per_gate: 4,
        loss: 0.3,
        seed: 5,
        ..Default::default()
    };
    let listener = TcpListener::bind("127.0.0.1:0").map_err(|e| qotp::Error::Io {
        path: "127.0.0.1:0".into(),
        source: e,
    })?;
    let addr = listener.local_addr().expect("bound");
    let server = {
        let circuit = circuit.clone();
        std::thread::spawn(move || serve(&listener, &circuit, &cfg))
    };
    let remote = connect(addr, &bob, &cfg)?;
    let alice_view = server.join().expect("server thread")?;
    let local = run_session(&circuit, &bob, &cfg)?;
    println!("frames: {} over TCP, {} in process", remote.messages.len(), local.messages.len());
    println!("outputs: {:?} over TCP, {:?} in process", remote.outputs, local.outputs);
    println!("same run: {}, Alice saw the same wire: {}", remote.same_run(&local), alice_view.messages == local.messages);
    Ok(())
}
