use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use otcert::cli::{read_spec, run, Command, Options};

/// Certified construction and checks of OT manifold data.
///
/// Exit codes: 0 all checks pass, 1 a check failed, 2 inconclusive, 3 input error.
#[derive(Parser, Debug)]
#[command(name = "otcert", version)]
struct Args {
    command: Command,
    /// JSON spec file.
    spec: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Working precision in bits [default: spec policy, else 128].
    #[arg(long)]
    bits: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Write the certificate here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Coefficient box for the unit search.
    #[arg(long, default_value_t = 5)]
    bound: u32,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let opts = Options {
        seed: args.seed,
        bits: args.bits,
        trials: args.trials,
        bound: args.bound,
    };
    let cert = read_spec(&args.spec).and_then(|spec| run(args.command, &spec, &opts));
    match cert {
        Ok(c) => {
            let text = c.to_json();
            match &args.out {
                Some(p) => {
                    if let Err(e) = std::fs::write(p, text) {
                        eprintln!("error: {}: {e}", p.display());
                        return ExitCode::from(3);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(c.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
