//! `isonet` — generate and verify discrete isothermic nets and their Darboux
//! transforms.
//!
//! Exit codes: 0 all checks pass, 1 verification failure or runtime error,
//! 2 usage or parse error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use isonet::circle::CircleSpec;
use isonet::gallery::resonance_limit;
use isonet_cli::config::JobConfig;
use isonet_cli::error::CliError;
use isonet_cli::mesh::QuadMesh;
use isonet_cli::pipeline::{print_reports, reports_to_json, run_job, verify_mesh};

#[derive(Parser)]
#[command(
    name = "isonet",
    version,
    about = "discrete isothermic nets and Darboux transforms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct VerifyInput {
    /// Job config to rebuild and verify.
    #[arg(long, value_name = "PATH", conflicts_with = "mesh")]
    config: Option<PathBuf>,
    /// OBJ quad mesh to verify (cross-ratio realness per face).
    #[arg(long, value_name = "PATH")]
    mesh: Option<PathBuf>,
    /// Tolerance for mesh-file checks.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Build the configured family, write meshes and a report.
    Generate {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
    },
    /// Re-run all verification checks without writing meshes.
    Verify {
        #[command(flatten)]
        input: VerifyInput,
        /// Emit the report as JSON instead of the text table.
        #[arg(long)]
        json: bool,
    },
    /// Print the verification report as JSON.
    Report {
        #[command(flatten)]
        input: VerifyInput,
        /// Accepted for symmetry with `verify`; JSON is already the default.
        #[arg(long, default_value_t = true)]
        json: bool,
    },
    /// Print a resonance value and its continuum limit.
    Resonance {
        /// Subdivision count of the circle.
        #[arg(long = "M")]
        subdivisions: u32,
        /// Cover count.
        #[arg(long)]
        rho: u32,
        /// Resonance mode.
        #[arg(long)]
        k: u32,
        /// Polarisation scale (arc-length for the unit circle when 1).
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
    },
}

fn verify_command(input: &VerifyInput, json: bool) -> Result<bool, CliError> {
    let reports = match (&input.config, &input.mesh) {
        (Some(path), None) => run_job(&JobConfig::load(path)?, false)?.reports,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            vec![verify_mesh(&QuadMesh::parse_obj(&text)?, input.tol)]
        }
        _ => {
            return Err(CliError::Config(
                "exactly one of --config or --mesh is required".into(),
            ))
        }
    };
    if json {
        println!("{}", reports_to_json(&reports)?);
    } else {
        print_reports(&reports);
    }
    Ok(reports.iter().all(|r| r.pass))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Generate { config } => {
            let job = JobConfig::load(&config)?;
            let output = run_job(&job, true)?;
            for note in &output.notes {
                println!("note: {note}");
            }
            print_reports(&output.reports);
            for path in &output.written {
                println!("wrote {}", path.display());
            }
            Ok(output.all_pass())
        }
        Command::Verify { input, json } => verify_command(&input, json),
        Command::Report { input, json } => verify_command(&input, json),
        Command::Resonance {
            subdivisions,
            rho,
            k,
            alpha,
        } => {
            let spec = CircleSpec::new(1.0, subdivisions, rho, alpha).map_err(CliError::Core)?;
            let nu = spec.resonance_nu(k).map_err(CliError::Core)?;
            let limit = resonance_limit(k, rho) / alpha;
            println!("nu = {nu}");
            println!("continuum limit = {limit}");
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code() as u8)
        }
    }
}
