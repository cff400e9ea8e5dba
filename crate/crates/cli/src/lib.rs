//! `weylquant` command-line front end.
//!
//! Every subcommand prints a human-readable report by default and a single
//! JSON document (with a `schema_version` field) under `--json`. Exit codes:
//! 0 on success, 1 on usage or input errors, 2 when a numeric contract
//! (grid resolution, normalization, stability) is violated.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod args;
mod commands;
pub mod error;
pub mod heatmap;

use args::StateSpec;
use error::{CliError, CliResult};
use weylquant::wavefunctions::GridSpec;

pub use heatmap::export_heatmap;

/// Version of every JSON document this tool writes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "weylquant", version, about = "Weyl quantization and Wigner phase-space tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Map a phase-space polynomial to its normal-ordered operator.
    Quantize(QuantizeArgs),
    /// Published rule assignments next to the placement variants.
    CompareRules(MonomialArgs),
    /// Operators from every placement of the coordinate powers.
    Placements(MonomialArgs),
    /// Wigner function of a state, with CSV and PGM exports.
    Wigner(WignerArgs),
    /// Energies and dispersions of oscillator eigenstates.
    OscillatorTable(TableArgs),
    /// Integrate the Liouville or Moyal equation with observable trackers.
    Evolve(EvolveArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Rule {
    Weyl,
    Symmetrize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Source {
    /// Closed form sampled on the grid.
    Analytic,
    /// FFT transform of the sampled wavefunction.
    Transform,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DynamicsArg {
    Liouville,
    Moyal,
}

#[derive(Debug, Args)]
struct QuantizeArgs {
    /// Polynomial in q, p, hbar, e.g. "q^2 p^2" or "1/2 p^2 + 1/4 q^4".
    #[arg(long)]
    expr: String,
    #[arg(long, value_enum, default_value_t = Rule::Weyl)]
    rule: Rule,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct MonomialArgs {
    /// A single monomial q^n p^m.
    #[arg(long, default_value = "q^2 p^2")]
    expr: String,
    #[arg(long)]
    json: bool,
}

fn grid_arg(s: &str) -> Result<GridSpec, String> {
    args::parse_grid(s).map_err(|e| e.to_string())
}

fn state_arg(s: &str) -> Result<StateSpec, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

#[derive(Debug, Args)]
struct WignerArgs {
    /// ho:<n> or gauss:<x0>,<k0>,<alpha>.
    #[arg(long, value_parser = state_arg)]
    state: StateSpec,
    /// Position grid nx,xmin,xmax (nx a power of two).
    #[arg(long, value_parser = grid_arg, default_value = "512,-12,12")]
    grid: GridSpec,
    #[arg(long, value_parser = positive, default_value = "1")]
    hbar: f64,
    #[arg(long, value_enum, default_value_t = Source::Transform)]
    source: Source,
    /// Directory for <stem>.csv, <stem>.pgm and <stem>.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, default_value_t = 7)]
    n_max: u32,
    #[arg(long, value_parser = grid_arg, default_value = "512,-12,12")]
    grid: GridSpec,
    #[arg(long, value_parser = positive, default_value = "1")]
    hbar: f64,
    #[arg(long, value_enum, default_value_t = Source::Analytic)]
    source: Source,
    /// CSV file to write instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    #[arg(long, value_enum, default_value_t = DynamicsArg::Moyal)]
    dynamics: DynamicsArg,
    /// harmonic, quartic or poly:<expr in q>.
    #[arg(long, default_value = "harmonic")]
    potential: String,
    #[arg(long, value_parser = positive, default_value = "1")]
    mass: f64,
    /// Initial Wigner function: ho:<n> or gauss:<x0>,<k0>,<alpha>.
    #[arg(long, value_parser = state_arg, default_value = "gauss:1,0,1")]
    state: StateSpec,
    /// Position axis nx,xmin,xmax.
    #[arg(long, value_parser = grid_arg, default_value = "64,-8,8")]
    grid: GridSpec,
    /// Momentum axis np,pmin,pmax; defaults to the position axis.
    #[arg(long, value_parser = grid_arg)]
    p_grid: Option<GridSpec>,
    #[arg(long, value_parser = positive, default_value = "1")]
    hbar: f64,
    /// Time step; defaults to 0.9 of the stability bound.
    #[arg(long, value_parser = positive)]
    dt: Option<f64>,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Comma-separated subset of norm,mean_E,mean_E2,delta_E,negativity_min.
    #[arg(long, default_value = "norm,mean_E,mean_E2,delta_E,negativity_min")]
    track: String,
    /// Export a heatmap every this many steps (needs --out).
    #[arg(long)]
    snapshot_every: Option<usize>,
    /// Directory for trackers.csv and snapshot heatmaps.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

/// Parse `args` (including the program name) and run, writing to the given
/// streams. Returns the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{text}");
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        1
                    } else {
                        0
                    }
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    let expr = match &cli.command {
        Command::Quantize(a) => Some(a.expr.clone()),
        Command::CompareRules(a) | Command::Placements(a) => Some(a.expr.clone()),
        _ => None,
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let (CliError::Core(weylquant::Error::Parse(pe)), Some(expr)) = (&e, expr) {
                let _ = writeln!(err, "  {expr}\n  {}^", " ".repeat(pe.offset.saturating_sub(1)));
            }
            e.exit_code()
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run_with(args, &mut out, &mut err);
    let _ = out.flush();
    code
}

fn dispatch(command: Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Quantize(a) => commands::quantize(&a.expr, matches!(a.rule, Rule::Symmetrize), a.json, out),
        Command::CompareRules(a) => commands::compare_rules(&a.expr, a.json, out),
        Command::Placements(a) => commands::placements(&a.expr, a.json, out),
        Command::Wigner(a) => commands::wigner(
            &commands::WignerRequest {
                state: a.state,
                grid: a.grid,
                hbar: a.hbar,
                analytic: matches!(a.source, Source::Analytic),
                out: a.out,
            },
            a.json,
            out,
        ),
        Command::OscillatorTable(a) => {
            commands::oscillator_table(a.n_max, &a.grid, a.hbar, matches!(a.source, Source::Analytic), a.out.as_deref(), a.json, out)
        }
        Command::Evolve(a) => {
            let request = commands::EvolveRequest {
                dynamics: match a.dynamics {
                    DynamicsArg::Liouville => weylquant::dynamics::Dynamics::Liouville,
                    DynamicsArg::Moyal => weylquant::dynamics::Dynamics::Moyal,
                },
                hamiltonian: args::parse_potential(&a.potential, a.mass)?,
                potential_label: a.potential,
                state: a.state,
                x_grid: a.grid,
                p_grid: a.p_grid.unwrap_or(a.grid),
                hbar: a.hbar,
                dt: a.dt,
                steps: a.steps,
                trackers: args::parse_trackers(&a.track)?,
                snapshot_every: a.snapshot_every,
                out: a.out,
            };
            commands::evolve(&request, a.json, out)
        }
    }
}
