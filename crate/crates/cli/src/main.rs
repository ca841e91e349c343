use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nondiv_cli::commands::{cmd_delta, cmd_drive, cmd_oracle, cmd_sample, cmd_shortvec};
use nondiv_cli::{CliError, Common, DriveFlags, Format, Outcome};

#[derive(Parser)]
#[command(name = "nondiv", version, about = "Exact δ_M certificates and push-out trajectories")]
struct Cli {
    /// Scenario file (blocks, generators of M, configuration)
    #[arg(long, global = true)]
    scenario: Option<String>,
    /// Lattice file (basis columns and determinant)
    #[arg(long, global = true)]
    lattice: Option<String>,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    output: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Seed for a random lattice when --lattice is absent
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cap on enumerated vectors
    #[arg(long, global = true, env = "NONDIV_VECTOR_BUDGET")]
    vector_budget: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Compute δ_M with its minimising subspace
    Delta,
    /// Iterate push-out steps until δ_M reaches η₀
    Drive {
        #[arg(long)]
        max_steps: Option<usize>,
        /// Override η₀ (a rational p/q in (0, 1))
        #[arg(long)]
        eta0: Option<String>,
    },
    /// Compare δ_M against the brute-force oracle
    Oracle {
        #[arg(long, default_value_t = 2)]
        hnf_bound: i64,
    },
    /// List shortest lattice vectors
    Shortvec {
        /// Squared length bound (p/q); defaults to the minimum
        #[arg(long)]
        bound: Option<String>,
    },
    /// Emit a seeded random lattice file
    Sample {
        #[arg(long)]
        dimension: usize,
    },
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let common = Common {
        scenario: cli.scenario.clone(),
        lattice: cli.lattice.clone(),
        seed: cli.seed,
        vector_budget: cli.vector_budget,
        format: match cli.format {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        },
    };
    match &cli.command {
        Command::Delta => cmd_delta(&common),
        Command::Drive { max_steps, eta0 } => {
            cmd_drive(&common, &DriveFlags { max_steps: *max_steps, eta0: eta0.clone() })
        }
        Command::Oracle { hnf_bound } => cmd_oracle(&common, *hnf_bound),
        Command::Shortvec { bound } => cmd_shortvec(&common, bound.as_deref()),
        Command::Sample { dimension } => cmd_sample(*dimension, cli.seed.unwrap_or(0)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(out) => {
            if let Some(note) = &out.note {
                eprintln!("{note}");
            }
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &out.text) {
                        eprintln!("error: {path}: {e}");
                        return ExitCode::from(1);
                    }
                }
                None => print!("{}", out.text),
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
