//! One protocol session over a lossy channel: several padded copies per
//! gate, Bob acknowledges one survivor, Alice reveals only that pad.

use qotp::circuits::{compile_millionaires, parse_bits};
use qotp::encoding::Scheme;
use qotp::runtime::{abort_probability, run_session, Party, ProtocolMessage, SessionConfig};

fn main() -> qotp::Result<()> {
    let circuit = compile_millionaires(&parse_bits("0110")?, 4)?;
    let cfg = SessionConfig {
        scheme: Scheme::LinearG2,
        copies_per_gate: 8,
        loss: 0.5,
        randomize: true,
        seed: 17,
        ..Default::default()
    };
    let t = run_session(&circuit, &parse_bits("1000")?, &cfg)?;
    t.check_discipline()?;
    for e in &t.messages {
        let who = match e.from {
            Party::Alice => "A->B",
            Party::Bob => "B->A",
        };
        match &e.message {
            ProtocolMessage::StateOffer { gate_id, copy_id, photons } => {
                println!("{who} offer gate {gate_id} copy {copy_id}{}", if photons.is_none() { " (lost)" } else { "" })
            }
            other => println!("{who} {}", serde_json::to_string(other).unwrap_or_default().chars().take(90).collect::<String>()),
        }
    }
    println!("outputs {:?}, abort {:?}", t.outputs, t.abort_reason);
    println!(
        "session abort probability with 8 copies at loss 0.5: {:.5}",
        abort_probability(4, 8, 0.5)
    );
    Ok(())
}
