//! `qgraph`: characteristic functions, spectra and two-port compositions of
//! Sturm-Liouville problems on compact metric graphs.
//!
//! Subcommands read JSON graph documents (see [`document`]) and write CSV to
//! standard output; `verify` writes a deterministic PASS/FAIL report.  Exit
//! codes: 0 success, 1 usage error, 2 input/validation error, 3 verification
//! failure.

mod commands;
mod document;
mod verify;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use qgraph_core::assembly::RootKind;

use commands::{CliError, ComposeMode, ZGrid, ZWindow};
use verify::{Identity, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "qgraph",
    version,
    about = "Characteristic functions and spectra of Sturm-Liouville problems on metric graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the characteristic function of a rooted graph as CSV
    Eval(EvalArgs),
    /// Locate zeros of the characteristic function in a spectral window
    Spectrum(SpectrumArgs),
    /// Tabulate the four two-port functions and the interior determinant
    TwoPort(TwoPortArgs),
    /// Evaluate the series/parallel connection formulas on operand two-ports
    Compose(ComposeArgs),
    /// Check a composition identity against direct assembly; PASS/FAIL report
    Verify(VerifyArgs),
}

/// Matching condition imposed at the root vertex.
#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    /// Continuity plus Kirchhoff flux balance at the root.
    Neumann,
    /// Continuity plus vanishing vertex value at the root.
    Dirichlet,
}

impl From<KindArg> for RootKind {
    fn from(k: KindArg) -> RootKind {
        match k {
            KindArg::Neumann => RootKind::GeneralizedNeumann,
            KindArg::Dirichlet => RootKind::GeneralizedDirichlet,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Series,
    Parallel,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum IdentityArg {
    /// Series join: characteristic function versus two-term cut formula
    #[value(name = "series-1.1")]
    SeriesCut,
    /// Series join: all four two-port functions versus composition rules
    #[value(name = "series-3.x")]
    SeriesTwoPort,
    /// Lagrange-type defect of a series composition (pointwise identity)
    #[value(name = "lagrange-3.5")]
    SeriesLagrange,
    /// Two-arm parallel join: Dirichlet-anchored function family
    #[value(name = "parallel-5.i")]
    ParallelFamily,
    /// Two-arm parallel join: cleared Neumann-Neumann numerator
    #[value(name = "parallel-theorem")]
    ParallelTheorem,
    /// m-arm parallel join: cleared port-system determinant
    #[value(name = "parallel-m")]
    ParallelM,
}

impl From<IdentityArg> for Identity {
    fn from(i: IdentityArg) -> Identity {
        match i {
            IdentityArg::SeriesCut => Identity::SeriesCut,
            IdentityArg::SeriesTwoPort => Identity::SeriesTwoPort,
            IdentityArg::SeriesLagrange => Identity::SeriesLagrange,
            IdentityArg::ParallelFamily => Identity::ParallelFamily,
            IdentityArg::ParallelTheorem => Identity::ParallelTheorem,
            IdentityArg::ParallelM => Identity::ParallelM,
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    /// Graph document to evaluate
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    /// Root vertex id
    #[arg(long, value_name = "V")]
    root: u32,
    /// Condition imposed at the root
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Inclusive evaluation grid
    #[arg(long, value_name = "A:B:N", value_parser = commands::parse_zgrid, allow_hyphen_values = true)]
    z_range: ZGrid,
    /// Also write the parsed graph back in normalized form
    #[arg(long, value_name = "FILE")]
    dump_normalized: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Graph document to scan
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    /// Root vertex id
    #[arg(long, value_name = "V")]
    root: u32,
    /// Condition imposed at the root
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Scan window; omit N to size the grid from the graph's length
    #[arg(long, value_name = "A:B[:N]", value_parser = commands::parse_zwindow, allow_hyphen_values = true)]
    z_range: ZWindow,
    /// Bracket-width tolerance for refined roots
    #[arg(long, value_name = "T")]
    tol_z: Option<f64>,
    /// |phi| threshold for accepting touching (even-multiplicity) minima
    #[arg(long, value_name = "T")]
    tol_value: Option<f64>,
    /// Also write the parsed graph back in normalized form
    #[arg(long, value_name = "FILE")]
    dump_normalized: Option<PathBuf>,
}

#[derive(Args)]
struct TwoPortArgs {
    /// Graph document; must contain a "ports" section
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    /// Inclusive evaluation grid
    #[arg(long, value_name = "A:B:N", value_parser = commands::parse_zgrid, allow_hyphen_values = true)]
    z_range: ZGrid,
    /// Also write the parsed graph back in normalized form
    #[arg(long, value_name = "FILE")]
    dump_normalized: Option<PathBuf>,
}

#[derive(Args)]
struct ComposeArgs {
    /// Connection mode
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Operand graph documents (repeat the flag; each needs ports)
    #[arg(long = "graph", value_name = "FILE", required = true)]
    graph: Vec<PathBuf>,
    /// Inclusive evaluation grid
    #[arg(long, value_name = "A:B:N", value_parser = commands::parse_zgrid, allow_hyphen_values = true)]
    z_range: ZGrid,
    /// Also write the parsed graphs back in normalized form
    /// (first to FILE, i-th to FILE.i)
    #[arg(long, value_name = "FILE")]
    dump_normalized: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Identity to check
    #[arg(long, value_enum)]
    identity: IdentityArg,
    /// Operand graph documents (repeat the flag; each needs ports)
    #[arg(long = "graph", value_name = "FILE", required = true)]
    graph: Vec<PathBuf>,
    /// Evaluation grid for the comparison
    #[arg(long, value_name = "A:B:N", value_parser = commands::parse_zgrid, allow_hyphen_values = true)]
    z_range: ZGrid,
    /// Maximum tolerated relative deviation
    #[arg(long, value_name = "R", default_value_t = 1e-7)]
    rtol: f64,
    #[arg(long, hide = true)]
    corrupt_sign: bool,
    /// Also write the parsed graphs back in normalized form
    #[arg(long, value_name = "FILE")]
    dump_normalized: Option<PathBuf>,
}

fn run(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Eval(a) => {
            let docs = commands::load_documents(
                std::slice::from_ref(&a.graph),
                a.dump_normalized.as_deref(),
            )?;
            commands::eval(out, &docs[0], a.root, a.kind.into(), &a.z_range)
        }
        Command::Spectrum(a) => {
            let docs = commands::load_documents(
                std::slice::from_ref(&a.graph),
                a.dump_normalized.as_deref(),
            )?;
            commands::spectrum(
                out,
                &docs[0],
                a.root,
                a.kind.into(),
                &a.z_range,
                a.tol_z,
                a.tol_value,
            )
        }
        Command::TwoPort(a) => {
            let docs = commands::load_documents(
                std::slice::from_ref(&a.graph),
                a.dump_normalized.as_deref(),
            )?;
            commands::two_port_table(out, &docs[0], &a.graph, &a.z_range)
        }
        Command::Compose(a) => {
            let docs = commands::load_documents(&a.graph, a.dump_normalized.as_deref())?;
            let mode = match a.mode {
                ModeArg::Series => ComposeMode::Series,
                ModeArg::Parallel => ComposeMode::Parallel,
            };
            commands::compose(out, mode, &docs, &a.graph, &a.z_range)
        }
        Command::Verify(a) => {
            let docs = commands::load_documents(&a.graph, a.dump_normalized.as_deref())?;
            let opts = VerifyOptions {
                rtol: a.rtol,
                corrupt_sign: a.corrupt_sign,
            };
            verify::run(out, a.identity.into(), &docs, &a.graph, &a.z_range, &opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1u8,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli.command, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
