use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use modheat::cli::{self, Command, RunConfig};

/// Fractional Hermite heat flow, Gabor analysis and quantization toolkit.
#[derive(Parser, Debug)]
#[command(name = "modheat", version)]
struct Args {
    /// propagate, solve, stft, modnorm, wigner, gabor-matrix, seminorm,
    /// decay-fit, verify, time-search, or list-suites
    command: String,
    /// Parameter object or full run config (JSON)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    symbol: Option<String>,
    /// Number of ray directions for gabor-matrix
    #[arg(long)]
    rays: Option<usize>,
    /// Print the run summary as JSON on stdout
    #[arg(long)]
    json: bool,
}

// A closed stdout (e.g. piped into `head`) is not an error worth a panic.
fn say(line: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn build_config(args: &Args) -> modheat::Result<RunConfig> {
    let command = Command::parse(&args.command)?;
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path, Some(command))?,
        None => RunConfig::new(command),
    };
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let overrides = [
        ("suite", args.suite.clone().map(serde_json::Value::from)),
        ("tau", args.tau.map(serde_json::Value::from)),
        ("beta", args.beta.map(serde_json::Value::from)),
        ("symbol", args.symbol.clone().map(serde_json::Value::from)),
        ("rays", args.rays.map(serde_json::Value::from)),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set_param(key, v)?;
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Err(e) = cli::init_threads_from_env() {
        eprintln!("error: {e}");
        return ExitCode::from(cli::exit_code(&e) as u8);
    }
    if args.command == "list-suites" {
        if args.json {
            say(&serde_json::to_string_pretty(cli::list_suites()).expect("registry serializes"));
        } else {
            for s in cli::list_suites() {
                say(&format!("{:<20} {}", s.name, s.description));
            }
        }
        return ExitCode::SUCCESS;
    }
    let outcome = build_config(&args).and_then(|cfg| cli::run(&cfg));
    match outcome {
        Ok(o) => {
            if args.json {
                say(&serde_json::to_string_pretty(&o.summary).expect("summary serializes"));
            } else {
                for f in &o.files {
                    say(&format!("wrote {}", f.display()));
                }
            }
            ExitCode::from(o.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
