use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zitter_cli::presets::{preset, PRESET_NAMES};
use zitter_cli::{run, CliError, ConfigSource, RunOptions};

#[derive(Parser)]
#[command(
    name = "zitter",
    version,
    about = "Zitterbewegung of a Dirac electron in a magnetic field"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write CSV, SVG and a markdown report.
    Run {
        /// TOML configuration file.
        config: Option<PathBuf>,
        /// Built-in scenario instead of a file (fig1, fig2a, fig2b, fig2c).
        #[arg(long, conflicts_with = "config")]
        scenario: Option<String>,
        /// Compare against the truncated-matrix evolution.
        #[arg(long)]
        check_oracle: bool,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads (overrides numerics.threads).
        #[arg(long)]
        threads: Option<usize>,
        /// Also write the Landau-level coefficient table.
        #[arg(long)]
        dump_decomposition: bool,
    },
    /// List the built-in scenarios or print one of them.
    Presets { name: Option<String> },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            scenario,
            check_oracle,
            out,
            threads,
            dump_decomposition,
        } => {
            let source = match (config, scenario) {
                (Some(path), None) => ConfigSource::from_path(&path)?,
                (None, Some(name)) => ConfigSource::preset(&name)?,
                _ => {
                    return Err(CliError::Config(
                        "give a configuration file or --scenario".into(),
                    ))
                }
            };
            if threads == Some(0) {
                return Err(CliError::Config("--threads must be at least 1".into()));
            }
            let opts = RunOptions {
                out_dir: out,
                check_oracle,
                dump_decomposition,
                threads,
            };
            let result = run(&source, &opts);
            let outcome = match result {
                Ok(o) => o,
                Err(e @ CliError::OracleMismatch { .. }) => {
                    eprintln!("outputs written to {}", opts.out_dir.display());
                    return Err(e);
                }
                Err(e) => return Err(e),
            };
            let prov = &outcome.trajectory.provenance;
            println!(
                "{}: N_max {} tail {:.3e} k_z nodes {} samples {}",
                outcome.scenario.name,
                prov.n_max,
                prov.tail_mass,
                prov.kz_nodes,
                outcome.trajectory.len()
            );
            if let Some(o) = &outcome.oracle {
                println!(
                    "oracle: PASS max deviation {:.3e} L (tolerance {:.3e} L)",
                    o.deviation, o.tolerance
                );
            }
            println!("outputs written to {}", opts.out_dir.display());
            Ok(())
        }
        Command::Presets { name: None } => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            Ok(())
        }
        Command::Presets { name: Some(name) } => {
            print!("{}", preset(&name)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
