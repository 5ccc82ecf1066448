use clap::{Parser, Subcommand};
use fidopt_cli::commands::{
    cmd_analyze, cmd_construct, cmd_oracle, cmd_random, cmd_sample, cmd_verify, CommonArgs,
    Method, OracleMode,
};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

/// Fidelity-optimal quantum measurements: analysis, construction,
/// verification, random instances, sampling, and brute-force oracles.
#[derive(Parser)]
#[command(name = "fidopt", version, about)]
struct Cli {
    /// Tolerance profile: strict | default | loose
    /// (falls back to the FIDOPT_TOL_PROFILE environment variable).
    #[arg(long, global = true)]
    tol_profile: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Divergences, dichotomy classification, and the pencil eigensystem.
    Analyze {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// For pure qubit pairs: write an arc sweep CSV
        /// (lambda, x, y, z, kappa) to this path.
        #[arg(long)]
        arc_sweep: Option<PathBuf>,
        #[arg(long, default_value_t = 128)]
        arc_samples: usize,
    },
    /// Build a measurement: m-rho-sigma | m-sigma-rho | mix:<p> |
    /// t-optimal:zero | t-optimal:lambda:<x>.
    Construct {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        method: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a measurement: exit 0 if optimal, 1 if valid but suboptimal.
    Verify {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        povm: PathBuf,
        /// fidelity | trace
        #[arg(long)]
        criterion: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a seeded random instance pair.
    Random {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        rank_rho: usize,
        #[arg(long)]
        rank_sigma: usize,
        #[arg(long)]
        seed: u64,
        /// generic | commuting-supports | commuting-states | pure-sigma |
        /// singular-sum
        #[arg(long)]
        structure: String,
        #[arg(long)]
        out_rho: PathBuf,
        #[arg(long)]
        out_sigma: PathBuf,
    },
    /// Monte-Carlo sampling of measurement outcomes (CSV report).
    Sample {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        povm: PathBuf,
        #[arg(long)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force oracle: qubit-grid:<n> | random-povm:<k>.
    Oracle {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let profile = cli.tol_profile.clone();
    let run = || -> fidopt_cli::error::CliResult<i32> {
        match cli.command {
            Command::Analyze {
                rho,
                sigma,
                out,
                arc_sweep,
                arc_samples,
            } => cmd_analyze(
                &CommonArgs {
                    rho,
                    sigma,
                    out,
                    profile,
                },
                arc_sweep.as_deref(),
                arc_samples,
            ),
            Command::Construct {
                rho,
                sigma,
                method,
                out,
            } => {
                let method = Method::from_str(&method)?;
                cmd_construct(
                    &CommonArgs {
                        rho,
                        sigma,
                        out,
                        profile,
                    },
                    &method,
                )
            }
            Command::Verify {
                rho,
                sigma,
                povm,
                criterion,
                out,
            } => cmd_verify(
                &CommonArgs {
                    rho,
                    sigma,
                    out,
                    profile,
                },
                &povm,
                &criterion,
            ),
            Command::Random {
                dim,
                rank_rho,
                rank_sigma,
                seed,
                structure,
                out_rho,
                out_sigma,
            } => cmd_random(
                dim,
                rank_rho,
                rank_sigma,
                seed,
                &structure,
                &out_rho,
                &out_sigma,
                profile.as_deref(),
            ),
            Command::Sample {
                rho,
                sigma,
                povm,
                shots,
                seed,
                out,
            } => cmd_sample(
                &CommonArgs {
                    rho,
                    sigma,
                    out,
                    profile,
                },
                &povm,
                shots,
                seed,
            ),
            Command::Oracle {
                rho,
                sigma,
                mode,
                seed,
                out,
            } => {
                let mode = OracleMode::from_str(&mode)?;
                cmd_oracle(
                    &CommonArgs {
                        rho,
                        sigma,
                        out,
                        profile,
                    },
                    &mode,
                    seed,
                )
            }
        }
    };
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
