use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qcomplexity::dmrg::DmrgConfig;
use qcomplexity::models::SpinConvention;
use qcomplexity::pipeline::{run_point, AnalysisOptions, BasisChoice, ComplexityReport};
use qcomplexity::sweep::{render, run_sweep, ModelSpec, OutputFormat, SweepConfig};
use qcomplexity::validate::{run_validation, ValidateOptions};
use qcomplexity::Exec;

const EXIT_FAILURES: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "qcomplexity", version, about = "Complexity of measurement sequences on quantum chains")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter grid from a config file.
    Sweep(SweepArgs),
    /// Run a single parameter point and print one report row.
    Point(PointArgs),
    /// Golden processes and DMRG-vs-exact equivalence checks.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `[output] path`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads (0 = all cores). Overrides `[output] jobs`.
    #[arg(long, env = "QCOMPLEXITY_JOBS")]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Ising,
    Bosehubbard,
}

#[derive(Args)]
struct PointArgs {
    #[arg(long, value_enum)]
    model: Model,
    /// B/J (ising) or U/J (bosehubbard).
    #[arg(long)]
    coupling: f64,
    /// Measurement angle in radians (ising).
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[arg(long = "L", default_value_t = 3)]
    order: usize,
    #[arg(long = "N", default_value_t = 32)]
    n: usize,
    #[arg(long, default_value_t = 32)]
    chi: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use Pauli matrices instead of spin-1/2 operators (ising).
    #[arg(long)]
    pauli: bool,
    /// Largest occupation per site (bosehubbard).
    #[arg(long, default_value_t = 3)]
    n_max: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct ValidateArgs {
    /// Small oracle grid.
    #[arg(long)]
    quick: bool,
    /// Causal-state merge tolerance (total variation).
    #[arg(long)]
    merge_tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Command::Sweep(a) => sweep(a),
        Command::Point(a) => point(a),
        Command::Validate(a) => validate(a),
    }
}

fn sweep(a: SweepArgs) -> ExitCode {
    let mut cfg = match SweepConfig::from_file(&a.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(p) = a.out {
        cfg.output.path = Some(p);
    }
    if let Some(f) = a.format {
        cfg.output.format = output_format(f);
    }
    if let Some(j) = a.jobs {
        cfg.output.jobs = j;
    }
    match run_sweep(&cfg, Exec::Parallel) {
        Ok(s) => {
            eprintln!("{} rows, {} failures", s.rows, s.failures);
            if s.failures > 0 {
                ExitCode::from(EXIT_FAILURES)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e @ qcomplexity::Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILURES)
        }
    }
}

fn point(a: PointArgs) -> ExitCode {
    let (spec, basis) = match a.model {
        Model::Ising => (
            ModelSpec::Ising {
                j: 1.0,
                n: a.n,
                convention: if a.pauli {
                    SpinConvention::Pauli
                } else {
                    SpinConvention::SpinHalf
                },
                symmetry_break_h: None,
            },
            BasisChoice::Theta(a.theta),
        ),
        Model::Bosehubbard => (
            ModelSpec::BoseHubbard {
                j: 1.0,
                n: a.n,
                n_max: a.n_max,
                nu: 1.0,
                penalty_weight: None,
            },
            BasisChoice::Number,
        ),
    };
    let dmrg = DmrgConfig {
        seed: a.seed,
        ..DmrgConfig::with_chi(a.chi)
    };
    if let Err(e) = dmrg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let opts = AnalysisOptions::default();
    let row = spec
        .at(a.coupling)
        .and_then(|m| run_point(&m, a.coupling, &basis, a.order, &dmrg, &opts));
    let row = match row {
        Ok(r) => r,
        Err(e) => {
            let name = match a.model {
                Model::Ising => "ising",
                Model::Bosehubbard => "bosehubbard",
            };
            ComplexityReport::failed(name, a.n, a.coupling, &basis, a.order, a.chi, &e.to_string())
        }
    };
    print!("{}", render(std::slice::from_ref(&row), output_format(a.format), false));
    if row.is_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURES)
    }
}

fn validate(a: ValidateArgs) -> ExitCode {
    let mut opts = ValidateOptions {
        quick: a.quick,
        ..Default::default()
    };
    if let Some(t) = a.merge_tol {
        if !(t >= 0.0) {
            eprintln!("error: merge tolerance must be >= 0");
            return ExitCode::from(EXIT_CONFIG);
        }
        opts.analysis.merge_tol = t;
    }
    let report = run_validation(&opts);
    print!("{}", report.to_text());
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURES)
    }
}

fn output_format(f: Format) -> OutputFormat {
    match f {
        Format::Csv => OutputFormat::Csv,
        Format::Jsonl => OutputFormat::Jsonl,
    }
}
