use std::io::Write;
use std::net::TcpListener;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qotp::circuits::parse_bits;
use qotp::encoding::Scheme;
use qotp::experiments::{self, ExperimentConfig, Outcome, Report};
use qotp::{Error, Result};

#[derive(Parser)]
#[command(name = "qotp", version, about = "Probabilistic quantum one-time program experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-gate success of every G2 table under the linear and elliptical encodings.
    Gates(Common),
    /// Comparator sessions for Alice's number against single-bit deviations.
    Millionaires {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "0101")]
        alice: String,
        /// Bob's number; repeat for several. Defaults to each one-bit deviation of Alice's.
        #[arg(long)]
        bob: Vec<String>,
        /// Insert random NOT pairs and reveal output pads.
        #[arg(long)]
        randomize: bool,
    },
    /// Sign a message file with a fresh signature bundle keyed by --seed.
    Sign {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        message: PathBuf,
    },
    /// Verify a signature file against the bundle keyed by --seed.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        message: PathBuf,
        #[arg(long)]
        signature: PathBuf,
    },
    /// Honest/dishonest threshold curves and the row-match histogram.
    SigCurves {
        #[command(flatten)]
        common: Common,
        /// Single-row curves instead of all-rows aggregation.
        #[arg(long)]
        single_row: bool,
    },
    /// Inequality violations, tradeoff points, PGM certificates, two-copy circuit.
    Bounds(Common),
    /// Serve one comparator session over TCP as Alice.
    Serve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "127.0.0.1:7878")]
        listen: String,
        #[arg(long, default_value = "0101")]
        alice: String,
        #[arg(long)]
        randomize: bool,
    },
    /// Connect to a serving Alice and run the session as Bob.
    Connect {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "127.0.0.1:7878")]
        addr: String,
        #[arg(long)]
        bob: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Linear,
    Elliptical,
    General,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Linear => Scheme::LinearG2,
            SchemeArg::Elliptical => Scheme::EllipticalG2,
            SchemeArg::General => Scheme::General,
        }
    }
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Repetitions (command-specific default).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Preparation fidelity in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    fidelity: f64,
    /// Channel loss probability in [0, 1).
    #[arg(long, default_value_t = 0.0)]
    loss: f64,
    /// Copies per gate (default 8 when lossy, else 1; bounds: largest odd copy count, default 5).
    #[arg(long)]
    copies: Option<usize>,
    #[arg(long, default_value_t = qotp::signature::DIGEST_BITS)]
    rows: usize,
    #[arg(long = "big-t", default_value_t = qotp::signature::DEFAULT_T)]
    big_t: usize,
    #[arg(long, default_value_t = qotp::signature::DEFAULT_TAU)]
    tau: usize,
    #[arg(long, default_value = "qotp-out")]
    out: PathBuf,
}

impl Common {
    fn config(&self, default_trials: usize, default_copies: Option<usize>) -> ExperimentConfig {
        let lossy_default = if self.loss > 0.0 { 8 } else { 1 };
        ExperimentConfig {
            seed: self.seed,
            trials: self.trials.unwrap_or(default_trials),
            scheme: self.scheme.map(Into::into),
            fidelity: self.fidelity,
            loss: self.loss,
            copies: self.copies.or(default_copies).unwrap_or(lossy_default),
            rows: self.rows,
            big_t: self.big_t,
            tau: self.tau,
            out: self.out.clone(),
        }
    }
}

fn run(command: Command) -> Result<Report> {
    match command {
        Command::Gates(c) => experiments::cmd_gates(&c.config(100_000, None)),
        Command::Millionaires {
            common,
            alice,
            bob,
            randomize,
        } => {
            let bobs = bob.iter().map(|b| parse_bits(b)).collect::<Result<Vec<_>>>()?;
            experiments::cmd_millionaires(&common.config(100_000, None), &parse_bits(&alice)?, &bobs, randomize)
        }
        Command::Sign { common, message } => experiments::cmd_sign(&common.config(1, None), &message),
        Command::Verify {
            common,
            message,
            signature,
        } => experiments::cmd_verify(&common.config(1, None), &message, &signature),
        Command::SigCurves { common, single_row } => experiments::cmd_sig_curves(&common.config(1, None), single_row),
        Command::Bounds(c) => experiments::cmd_bounds(&c.config(1, Some(5))),
        Command::Serve {
            common,
            listen,
            alice,
            randomize,
        } => {
            let cfg = common.config(1, None);
            cfg.validate()?;
            let alice = parse_bits(&alice)?;
            let listener = TcpListener::bind(&listen).map_err(|e| Error::Io {
                path: listen.clone(),
                source: e,
            })?;
            experiments::cmd_serve(&cfg, &listener, &alice, randomize, |addr| {
                println!("listening on {addr}");
                let _ = std::io::stdout().flush();
            })
        }
        Command::Connect { common, addr, bob } => {
            experiments::cmd_connect(&common.config(1, None), addr.as_str(), &parse_bits(&bob)?)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) | Error::Parse { .. } | Error::UnsupportedTopology(_) => 2,
        Error::Protocol(_) => 3,
        Error::ResourceLimit { .. } => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            for line in &report.summary {
                println!("{line}");
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            match report.outcome {
                Outcome::Ok => ExitCode::SUCCESS,
                Outcome::Rejected => ExitCode::from(1),
                Outcome::Aborted(_) => ExitCode::from(3),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
