use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use statecert::kernel::{DEFAULT_POINTS, DEFAULT_X_RANGE};
use statecert_cli::error::{CliError, Result};
use statecert_cli::render::render_text;
use statecert_cli::run::{self, GridArgs, Kind, RunConfig, RunReport, EXIT_INPUT_ERROR};

/// Certify density matrices, L2 kernels and Wigner functions as quantum states.
///
/// Exit codes: 0 certified, 1 rejected, 2 inconclusive or conflicting
/// criteria, 3 input or usage error.
#[derive(Debug, Parser)]
#[command(name = "statecert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run positivity criteria on an input.
    Check(CheckArgs),
    /// Write a sample input.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Render a JSON report written by `check --json`.
    Report {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Input file (not used with `--kind mixture`).
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Kind::Matrix)]
    kind: Kind,
    /// Comma-separated criteria, e.g. `pure,binomial` or `BINOMIAL_SUMS`.
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<String>,
    /// Fock-state weights for `--kind mixture`, e.g. `2/3,2/3,-1/3`.
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    #[arg(long)]
    tol_herm: Option<f64>,
    #[arg(long)]
    tol_sum: Option<f64>,
    #[arg(long)]
    tol_series: Option<f64>,
    #[arg(long)]
    max_terms: Option<usize>,
    #[arg(long)]
    divergence: Option<f64>,
    /// Last binomial sum index on the operator side.
    #[arg(long)]
    n_max: Option<usize>,
    /// Last binomial sum index on the phase-space side.
    #[arg(long)]
    m_max: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Shorthand for `--format json`.
    #[arg(long)]
    json: bool,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Copy)]
struct GridFlags {
    /// Grid covers [-w, w] in both q and p.
    #[arg(long, default_value_t = GridArgs::default().half_width)]
    half_width: f64,
    #[arg(long, default_value_t = GridArgs::default().points)]
    points: usize,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
}

impl From<GridFlags> for GridArgs {
    fn from(g: GridFlags) -> Self {
        Self {
            half_width: g.half_width,
            points: g.points,
            hbar: g.hbar,
        }
    }
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// Wigner function of the n-th oscillator level (binary grid).
    Fock {
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[command(flatten)]
        grid: GridFlags,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Indefinite mixture with weights 2/3, 2/3, -1/3 (binary grid).
    Tatarskij {
        #[command(flatten)]
        grid: GridFlags,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Random density matrix (text).
    Density {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Oscillator kernel on a position grid (text).
    Kernel {
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        coeffs: Option<String>,
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_X_RANGE.0, allow_hyphen_values = true)]
        x_min: f64,
        #[arg(long, default_value_t = DEFAULT_X_RANGE.1)]
        x_max: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn emit(report: &RunReport, format: Format, output: Option<&Path>) -> Result<()> {
    let bytes = match format {
        Format::Text => render_text(report).into_bytes(),
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(report)?;
            v.push(b'\n');
            v
        }
        Format::Csv => {
            let mut v = Vec::new();
            run::write_csv(report, &mut v)?;
            v
        }
    };
    write_out(output, &bytes)
}

fn check(a: CheckArgs) -> Result<i32> {
    let mut cfg = RunConfig::new(a.kind);
    cfg.input = a.input;
    cfg.coeffs = a.coeffs;
    cfg.hbar = a.hbar;
    cfg.criteria = a.criteria;
    let t = &mut cfg.tolerances;
    if let Some(v) = a.tol_herm {
        t.hermiticity_tol = v;
    }
    if let Some(v) = a.tol_sum {
        t.sum_tol = v;
    }
    if let Some(v) = a.tol_series {
        t.series_tol = v;
    }
    if let Some(v) = a.max_terms {
        t.max_terms = v;
    }
    if let Some(v) = a.divergence {
        t.divergence_threshold = v;
    }
    if let Some(v) = a.n_max {
        cfg.n_max = v;
    }
    if let Some(v) = a.m_max {
        cfg.m_max = v;
    }
    let report = run::run_check(&cfg)?;
    let format = if a.json { Format::Json } else { a.format };
    emit(&report, format, a.output.as_deref())?;
    Ok(report.exit_code)
}

fn gen(what: GenCommand) -> Result<i32> {
    match what {
        GenCommand::Fock { n, grid, output } => write_out(Some(&output), &run::gen_fock(n, grid.into())?)?,
        GenCommand::Tatarskij { grid, output } => write_out(Some(&output), &run::gen_tatarskij(grid.into())?)?,
        GenCommand::Density { dim, seed, output } => {
            write_out(output.as_deref(), run::gen_density(dim, seed)?.as_bytes())?
        }
        GenCommand::Kernel {
            n,
            coeffs,
            points,
            x_min,
            x_max,
            hbar,
            output,
        } => write_out(
            output.as_deref(),
            run::gen_kernel(n, coeffs.as_deref(), points, x_min, x_max, hbar)?.as_bytes(),
        )?,
    }
    Ok(0)
}

fn report(file: &Path, format: Format) -> Result<i32> {
    let text = std::fs::read_to_string(file).map_err(|e| CliError::io(file, e))?;
    let r: RunReport = serde_json::from_str(&text)?;
    emit(&r, format, None)?;
    Ok(r.exit_code)
}

fn main() -> ExitCode {
    // clap's own usage errors would exit with 2, which means "inconclusive" here
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT_ERROR as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Check(a) => check(a),
        Command::Gen { what } => gen(what),
        Command::Report { file, format } => report(&file, format),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("statecert: {e}");
            ExitCode::from(EXIT_INPUT_ERROR as u8)
        }
    }
}
