//! Subcommand implementations: graph loading, spectral-grid parsing, and the
//! CSV-producing evaluation commands.  Verification reports live in
//! [`crate::verify`].
//!
//! All numeric CSV output uses `{:.16e}` (17 significant digits, always a
//! `.` decimal separator), so files round-trip through `f64` parsing and are
//! independent of the process locale.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use qgraph_core::assembly::{phi, RootKind};
use qgraph_core::graph::{ValidatedGraph, VertexId};
use qgraph_core::solutions::SpectralPoint;
use qgraph_core::spectrum::{find_roots, MultiplicityFlag, ScanOptions};
use qgraph_core::two_port::{two_port, PortedGraph};
use qgraph_core::compose::{parallel_m_phi_nn, parallel_phi_nn, series_compose};

use crate::document::{emit_normalized, parse_graph_document, GraphDocument};

/// Crossover/quadrature tolerance handed to the fundamental-solution layer.
pub const SOLVER_TOL: f64 = 1e-10;

/// Failure modes of a subcommand, mapped to process exit codes by `main`.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable, unparsable or semantically invalid input: exit code 2.
    Input(String),
    /// A verification run completed and concluded FAIL: exit code 3.
    VerificationFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::VerificationFailed => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::VerificationFailed => write!(f, "verification failed"),
        }
    }
}

impl std::error::Error for CliError {}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// Inclusive evaluation grid `A:B:N`: N points from A to B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl ZGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n).map(|i| self.lo + step * i as f64).collect()
    }
}

/// Scan window `A:B` (grid density chosen from the graph) or `A:B:N`
/// (explicit grid).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZWindow {
    pub lo: f64,
    pub hi: f64,
    pub n: Option<usize>,
}

fn parse_bound(field: &str, what: &str) -> Result<f64, String> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| format!("{what} `{field}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("{what} must be finite"));
    }
    Ok(v)
}

fn parse_lo_hi(lo: &str, hi: &str) -> Result<(f64, f64), String> {
    let lo = parse_bound(lo, "lower bound")?;
    let hi = parse_bound(hi, "upper bound")?;
    if lo > hi {
        return Err(format!("empty range: {lo} > {hi}"));
    }
    Ok((lo, hi))
}

/// Parser for `--z-range A:B:N` (used as a clap value parser).
pub fn parse_zgrid(text: &str) -> Result<ZGrid, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(String::from("expected A:B:N (start, end, point count)"));
    }
    let (lo, hi) = parse_lo_hi(parts[0], parts[1])?;
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| format!("point count `{}` is not a positive integer", parts[2]))?;
    if n == 0 {
        return Err(String::from("point count must be at least 1"));
    }
    if n == 1 && lo != hi {
        return Err(String::from("a single-point grid needs A == B"));
    }
    Ok(ZGrid { lo, hi, n })
}

/// Parser for `--z-range A:B` or `A:B:N` (used as a clap value parser).
pub fn parse_zwindow(text: &str) -> Result<ZWindow, String> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.len() {
        2 => {
            let (lo, hi) = parse_lo_hi(parts[0], parts[1])?;
            Ok(ZWindow { lo, hi, n: None })
        }
        3 => {
            let g = parse_zgrid(text)?;
            if g.n < 2 {
                return Err(String::from("a scan grid needs at least 2 points"));
            }
            Ok(ZWindow {
                lo: g.lo,
                hi: g.hi,
                n: Some(g.n),
            })
        }
        _ => Err(String::from("expected A:B or A:B:N")),
    }
}

/// Load every `--graph` file; with `dump`, also write each document back in
/// normalized form (first file to `dump`, the i-th to `dump.i`).
pub fn load_documents(
    paths: &[PathBuf],
    dump: Option<&Path>,
) -> Result<Vec<GraphDocument>, CliError> {
    let mut docs = Vec::with_capacity(paths.len());
    for (i, path) in paths.iter().enumerate() {
        let text = fs::read_to_string(path)
            .map_err(|e| input(format!("{}: {e}", path.display())))?;
        let doc = parse_graph_document(&text)
            .map_err(|e| input(format!("{}: {e}", path.display())))?;
        if let Some(base) = dump {
            let target = if i == 0 {
                base.to_path_buf()
            } else {
                PathBuf::from(format!("{}.{}", base.display(), i + 1))
            };
            fs::write(&target, emit_normalized(&doc))
                .map_err(|e| input(format!("{}: {e}", target.display())))?;
        }
        docs.push(doc);
    }
    Ok(docs)
}

pub fn validated(doc: &GraphDocument) -> Result<ValidatedGraph, CliError> {
    doc.graph
        .clone()
        .validate()
        .map_err(|e| input(format!("invalid graph: {e}")))
}

/// Interpret a document as a two-port; requires the `ports` section.
pub fn ported(doc: &GraphDocument, origin: &Path) -> Result<PortedGraph, CliError> {
    let (v_in, v_out) = doc.ports.ok_or_else(|| {
        input(format!(
            "{}: this operation treats the graph as a two-port; add a \"ports\" section",
            origin.display()
        ))
    })?;
    PortedGraph::new(doc.graph.clone(), v_in, v_out)
        .map_err(|e| input(format!("{}: {e}", origin.display())))
}

fn write_row(out: &mut dyn Write, cols: &[f64]) -> Result<(), CliError> {
    let mut line = String::new();
    for (i, c) in cols.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        line.push_str(&format!("{c:.16e}"));
    }
    writeln!(out, "{line}").map_err(|e| input(format!("write error: {e}")))
}

fn write_header(out: &mut dyn Write, header: &str) -> Result<(), CliError> {
    writeln!(out, "{header}").map_err(|e| input(format!("write error: {e}")))
}

/// `eval`: tabulate the characteristic function of a rooted graph.
pub fn eval(
    out: &mut dyn Write,
    doc: &GraphDocument,
    root: u32,
    kind: RootKind,
    grid: &ZGrid,
) -> Result<(), CliError> {
    let vg = validated(doc)?;
    write_header(out, "z,phi")?;
    for z in grid.points() {
        let value = phi(&vg, VertexId(root), kind, SpectralPoint(z), SOLVER_TOL)
            .map_err(|e| input(format!("evaluation failed at z = {z}: {e}")))?;
        write_row(out, &[z, value])?;
    }
    Ok(())
}

/// `spectrum`: locate zeros of the characteristic function in a window.
pub fn spectrum(
    out: &mut dyn Write,
    doc: &GraphDocument,
    root: u32,
    kind: RootKind,
    window: &ZWindow,
    tol_z: Option<f64>,
    tol_value: Option<f64>,
) -> Result<(), CliError> {
    let vg = validated(doc)?;
    if vg.vertex(VertexId(root)).is_none() {
        return Err(input(format!("root vertex v{root} does not exist")));
    }
    let mut opts = match window.n {
        Some(n) => ScanOptions::new(window.lo, window.hi, n),
        None => ScanOptions::for_graph(&vg, window.lo, window.hi),
    };
    if let Some(t) = tol_z {
        opts.tol_z = t;
    }
    if let Some(t) = tol_value {
        opts.tol_value = t;
    }
    // Evaluation failures surface as NaN cells, which the scanner skips;
    // a hole in the grid must not abort the whole scan.
    let f = |z: f64| {
        phi(&vg, VertexId(root), kind, SpectralPoint(z), SOLVER_TOL).unwrap_or(f64::NAN)
    };
    let roots = find_roots(f, &opts);
    write_header(out, "z,multiplicity_flag,residual")?;
    for r in roots {
        let flag = match r.multiplicity_flag {
            MultiplicityFlag::Simple => "simple",
            MultiplicityFlag::EvenSuspected => "even_suspected",
        };
        writeln!(out, "{:.16e},{flag},{:.16e}", r.z, r.residual)
            .map_err(|e| input(format!("write error: {e}")))?;
    }
    Ok(())
}

/// `two-port`: tabulate the four port functions and the interior determinant.
pub fn two_port_table(
    out: &mut dyn Write,
    doc: &GraphDocument,
    origin: &Path,
    grid: &ZGrid,
) -> Result<(), CliError> {
    let pg = ported(doc, origin)?;
    write_header(out, "z,phi_dd,phi_dn,phi_nd,phi_nn,delta")?;
    for z in grid.points() {
        let tp = two_port(&pg, SpectralPoint(z), SOLVER_TOL)
            .map_err(|e| input(format!("evaluation failed at z = {z}: {e}")))?;
        write_row(out, &[z, tp.phi_dd, tp.phi_dn, tp.phi_nd, tp.phi_nn, tp.delta])?;
    }
    Ok(())
}

/// Connection mode of the `compose` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComposeMode {
    Series,
    Parallel,
}

/// `compose`: evaluate the series or parallel connection formulas on the
/// two-port data of the operand graphs (no joined graph is assembled).
pub fn compose(
    out: &mut dyn Write,
    mode: ComposeMode,
    docs: &[GraphDocument],
    origins: &[PathBuf],
    grid: &ZGrid,
) -> Result<(), CliError> {
    let ports: Vec<PortedGraph> = docs
        .iter()
        .zip(origins)
        .map(|(d, p)| ported(d, p))
        .collect::<Result<_, _>>()?;
    match mode {
        ComposeMode::Series => {
            if ports.len() != 2 {
                return Err(input(format!(
                    "series composition takes exactly two --graph arguments, got {}",
                    ports.len()
                )));
            }
            write_header(out, "z,phi_dd,phi_dn,phi_nd,phi_nn")?;
            for z in grid.points() {
                let zz = SpectralPoint(z);
                let tp1 = two_port(&ports[0], zz, SOLVER_TOL)
                    .map_err(|e| input(format!("evaluation failed at z = {z}: {e}")))?;
                let tp2 = two_port(&ports[1], zz, SOLVER_TOL)
                    .map_err(|e| input(format!("evaluation failed at z = {z}: {e}")))?;
                let tp = series_compose(&tp1, &tp2);
                write_row(out, &[z, tp.phi_dd, tp.phi_dn, tp.phi_nd, tp.phi_nn])?;
            }
        }
        ComposeMode::Parallel => {
            if ports.len() < 2 {
                return Err(input(
                    "parallel composition needs at least two --graph arguments",
                ));
            }
            write_header(out, "z,phi_nn")?;
            for z in grid.points() {
                let zz = SpectralPoint(z);
                let tps: Vec<_> = ports
                    .iter()
                    .map(|p| two_port(p, zz, SOLVER_TOL))
                    .collect::<Result<_, _>>()
                    .map_err(|e| input(format!("evaluation failed at z = {z}: {e}")))?;
                let value = if tps.len() == 2 {
                    parallel_phi_nn(&tps[0], &tps[1])
                } else {
                    parallel_m_phi_nn(&tps)
                        .map_err(|e| input(format!("composition failed at z = {z}: {e}")))?
                };
                write_row(out, &[z, value])?;
            }
        }
    }
    Ok(())
}
