use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ksreg::cli::{cmd_bench, cmd_orbit, cmd_table, cmd_verify, Format, Outcome, RunConfig, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "ksreg", version, about = "Kustaanheimo-Stiefel regularization toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-10, allow_negative_numbers = true)]
    tolerance: f64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long = "t-max", default_value_t = 2.0 * std::f64::consts::PI)]
    t_max: f64,
    /// Output file (verify, bench, table) or directory (orbit).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: Format,
}

impl Common {
    fn config(self) -> RunConfig {
        RunConfig {
            seed: self.seed,
            tolerance: self.tolerance,
            samples: self.samples,
            t_max: self.t_max,
            out: self.out,
            format: self.format,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every residual suite and report pass/fail.
    Verify(Common),
    /// Integrate one seed through the oscillator, ks image and Kepler flows.
    Orbit {
        #[command(flatten)]
        common: Common,
        /// `q1,q2,q3,q4,p1,p2,p3,p4` or a preset: circular, collision, near:<|L|>.
        #[arg(long, default_value = "circular")]
        state: String,
    },
    /// Raw Kepler vs regularized integration on near-collision seeds.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1e-1,1e-2,1e-3,1e-4")]
        grid: String,
    },
    /// Regenerate the induced vector-field table.
    Table(Common),
}

fn emit(outcome: Outcome, out: Option<&PathBuf>) -> ExitCode {
    match out {
        Some(path) if !outcome.artifact.is_empty() => {
            if let Err(e) = std::fs::write(path, &outcome.artifact) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE as u8);
            }
            println!("{}", outcome.summary);
        }
        _ => {
            print!("{}", outcome.artifact);
            eprintln!("{}", outcome.summary);
        }
    }
    ExitCode::from(outcome.exit_code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify(c) => {
            let cfg = c.config();
            emit(cmd_verify(&cfg), cfg.out.as_ref())
        }
        Command::Orbit { common, state } => {
            let outcome = cmd_orbit(&common.config(), &state);
            println!("{}", outcome.summary);
            ExitCode::from(outcome.exit_code as u8)
        }
        Command::Bench { common, grid } => {
            let cfg = common.config();
            emit(cmd_bench(&cfg, &grid), cfg.out.as_ref())
        }
        Command::Table(c) => {
            let cfg = c.config();
            emit(cmd_table(&cfg), cfg.out.as_ref())
        }
    }
}
