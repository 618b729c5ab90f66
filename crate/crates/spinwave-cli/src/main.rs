//! Batch front-end: run the verification suites and experiments from the
//! command line or a TOML config, emit CSV and a summary, exit nonzero on
//! any failed assertion. `RAYON_NUM_THREADS` controls the worker count.

mod config;
mod suites;

use clap::{Parser, Subcommand};
use config::RunConfig;
use suites::SuiteOutcome;

#[derive(Parser)]
#[command(
    name = "spinwave",
    about = "verification suites and peeling experiments for spinor wave fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact operator identities (annihilation, commutation, Laplacian
    /// decompositions, irreducible decomposition)
    VerifyIdentities(CommonArgs),
    /// Symbol-sequence exactness and curl-symbol hermiticity
    VerifySymbols(CommonArgs),
    /// Exact 3+1 splitting of the potential representation
    VerifySplitting(CommonArgs),
    /// Sphere-integral closed forms against quadrature
    WaveCheck(CommonArgs),
    /// Potential-data construction round trip on periodic grids
    HertzRoundtrip(CommonArgs),
    /// Evolve, sample and fit peeling exponents
    Peel(CommonArgs),
    /// Run a suite described by a TOML config file
    Run {
        #[arg(long)]
        config: String,
    },
}

#[derive(clap::Args, Clone)]
struct CommonArgs {
    /// largest spin to exercise (half-integers allowed)
    #[arg(long, default_value_t = 4.0)]
    spin_max: f64,
    /// weights delta (peel); must be non-integer
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    weights: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    degree: usize,
    #[arg(long, default_value_t = 64)]
    grid_n: usize,
    #[arg(long, default_value_t = 16.0)]
    half_len: f64,
    #[arg(long, default_value_t = 0.2)]
    tolerance: f64,
    /// output directory for CSV artifacts
    #[arg(long)]
    out: Option<String>,
}

impl CommonArgs {
    fn to_config(&self, command: &str) -> RunConfig {
        let max2 = (2.0 * self.spin_max).round().clamp(1.0, 8.0) as usize;
        let spins: Vec<f64> = (1..=max2).map(|t| t as f64 / 2.0).collect();
        RunConfig {
            command: command.into(),
            spins,
            weights: self.weights.clone(),
            trials: self.trials,
            seed: self.seed,
            degree: self.degree,
            grid_n: self.grid_n,
            half_len: self.half_len,
            quad_theta: 64,
            quad_phi: 128,
            tolerance: self.tolerance,
            out_dir: self.out.clone(),
        }
    }
}

fn dispatch(cfg: &RunConfig) -> Result<SuiteOutcome, String> {
    match cfg.command.as_str() {
        "verify-identities" => Ok(suites::verify_identities(cfg)),
        "verify-symbols" => Ok(suites::verify_symbols(cfg)),
        "verify-splitting" => Ok(suites::verify_splitting_suite(cfg)),
        "wave-check" => Ok(suites::wave_check(cfg)),
        "hertz-roundtrip" => Ok(suites::hertz_roundtrip(cfg)),
        "peel" => {
            cfg.validated_weights()?;
            Ok(suites::peel(cfg))
        }
        other => Err(format!(
            "unknown command '{}' (expected verify-identities | verify-symbols | verify-splitting | wave-check | hertz-roundtrip | peel)",
            other
        )),
    }
}

fn main() {
    let cli = Cli::parse();
    let cfg = match &cli.command {
        Command::VerifyIdentities(a) => a.to_config("verify-identities"),
        Command::VerifySymbols(a) => a.to_config("verify-symbols"),
        Command::VerifySplitting(a) => a.to_config("verify-splitting"),
        Command::WaveCheck(a) => a.to_config("wave-check"),
        Command::HertzRoundtrip(a) => a.to_config("hertz-roundtrip"),
        Command::Peel(a) => a.to_config("peel"),
        Command::Run { config } => {
            let text = match std::fs::read_to_string(config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("cannot read config {}: {}", config, e);
                    std::process::exit(2);
                }
            };
            match RunConfig::parse(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{}", e);
                    std::process::exit(2);
                }
            }
        }
    };
    match dispatch(&cfg) {
        Ok(outcome) => {
            println!(
                "summary: {} checks, {} failures",
                outcome.checks,
                outcome.failures.len()
            );
            if !outcome.ok() {
                for f in outcome.failures.iter().take(10) {
                    eprintln!("FAIL: {}", f);
                }
                std::process::exit(1);
            }
        }
        Err(e) => {
            eprintln!("{}", e);
            std::process::exit(2);
        }
    }
}
