//! `schrodg`: convergence, conditioning and basis studies for the space-time
//! Trefftz DG discretization of the free Schrödinger equation.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use schrodg::experiments::{run, write_outputs, Experiment, ExperimentConfig, ExperimentOutput, SpaceFamily};
use schrodg::spaces::SeedChoice;
use schrodg::Error;

const EXIT_FAILED_CHECK: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExperimentArg {
    ConvH,
    ConvP,
    Conditioning,
    Singular,
    VerifyBasis,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpaceArg {
    Trefftz,
    QuasiTrefftz,
    Full,
    Planewave,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SeedArg {
    A,
    B,
}

#[derive(Debug, Parser)]
#[command(name = "schrodg", version, about = "Space-time Trefftz DG experiments for i∂ψ/∂t + ½Δψ = 0")]
struct Cli {
    experiment: ExperimentArg,
    /// Degree parameter; the largest degree for conv-p.
    #[arg(long)]
    p: Option<u32>,
    #[arg(long, value_enum, default_value = "trefftz")]
    space: SpaceArg,
    /// Number of mesh levels j = 0, 1, ...
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    kappa: f64,
    #[arg(long, value_enum, default_value = "b")]
    seed_choice: SeedArg,
    /// Output directory for CSV tables and summary.json; CSV goes to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Gauss-Legendre node count for every integral.
    #[arg(long)]
    quad_n: Option<usize>,
    /// Solve the coupled global system instead of marching slab by slab.
    #[arg(long)]
    global_oracle: bool,
    /// Use psi0 = g_D = 1 instead of the exponential solution.
    #[arg(long)]
    constant_data: bool,
    /// Space dimension for verify-basis (default: 1, 2 and 3).
    #[arg(long)]
    dim: Option<usize>,
}

fn config_from(cli: Cli) -> ExperimentConfig {
    let experiment = match cli.experiment {
        ExperimentArg::ConvH => Experiment::ConvH,
        ExperimentArg::ConvP => Experiment::ConvP,
        ExperimentArg::Conditioning => Experiment::Conditioning,
        ExperimentArg::Singular => Experiment::Singular,
        ExperimentArg::VerifyBasis => Experiment::VerifyBasis,
    };
    let mut c = ExperimentConfig::new(experiment);
    c.space = match cli.space {
        SpaceArg::Trefftz => SpaceFamily::Trefftz,
        SpaceArg::QuasiTrefftz => SpaceFamily::QuasiTrefftz,
        SpaceArg::Full => SpaceFamily::Full,
        SpaceArg::Planewave => SpaceFamily::Planewave,
    };
    c.seed_choice = match cli.seed_choice {
        SeedArg::A => SeedChoice::A,
        SeedArg::B => SeedChoice::B,
    };
    if let Some(p) = cli.p {
        c.p = p;
    }
    if let Some(l) = cli.levels {
        c.levels = l;
    }
    c.kappa = cli.kappa;
    c.out = cli.out;
    c.quad_n = cli.quad_n;
    c.global_oracle = cli.global_oracle;
    c.constant_data = cli.constant_data;
    c.dim = cli.dim;
    c
}

fn exit_code(e: &Error) -> u8 {
    match e {
        _ if e.is_solver_failure() => EXIT_SOLVER,
        Error::AtLevel { source, .. } => exit_code(source),
        Error::Io(_) | Error::Json(_) => EXIT_FAILED_CHECK,
        _ => EXIT_CONFIG,
    }
}

fn print_tables(output: &ExperimentOutput) -> std::io::Result<()> {
    let mut out = std::io::stdout().lock();
    if output.tables.is_empty() {
        let json = serde_json::to_string_pretty(&output.summary).expect("summary serializes");
        return writeln!(out, "{json}");
    }
    let many = output.tables.len() > 1;
    for (stem, table) in &output.tables {
        if many {
            writeln!(out, "# {stem}")?;
        }
        write!(out, "{}", table.to_csv())?;
    }
    out.flush()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let config = config_from(cli);
    let output = match run(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    match &config.out {
        Some(dir) => match write_outputs(dir, &output) {
            Ok(paths) => {
                for p in paths {
                    eprintln!("wrote {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(exit_code(&e));
            }
        },
        None => {
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = print_tables(&output);
        }
    }
    if output.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("basis verification failed");
        ExitCode::from(EXIT_FAILED_CHECK)
    }
}
