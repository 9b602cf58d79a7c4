//! Numerical verification of the composition identities: each check compares
//! an algebraic formula built from operand two-port data against a direct
//! assembly on the joined graph, then tests that their pointwise ratio is
//! constant over the spectral grid (characteristic functions agree up to one
//! z-independent factor) or, where the identity is literally an equation,
//! that the two sides agree pointwise.
//!
//! Reports are deterministic: fixed line order, fixed float formatting, one
//! summary line per function, and a final `RESULT: PASS` / `RESULT: FAIL`.

use std::io::Write;
use std::path::PathBuf;

use qgraph_core::assembly::{assemble_with_overrides, phi, RootKind};
use qgraph_core::compose::{
    join_parallel, join_parallel_many, join_series, parallel_dirichlet_family, parallel_m_phi_nn,
    parallel_phi_nn, series_compose, series_lagrange_check, JoinProvenance,
};
use qgraph_core::solutions::SpectralPoint;
use qgraph_core::two_port::{two_port, PortedGraph, TwoPortValues};
use qgraph_core::graph::VertexId;

use crate::commands::{ported, CliError, ZGrid, SOLVER_TOL};
use crate::document::GraphDocument;

/// Which identity to verify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// Characteristic function of a series join versus the two-term sum of
    /// boundary characteristic functions of the operands.
    SeriesCut,
    /// All four two-port functions of a series join versus the composition
    /// rules applied to the operand two-port values.
    SeriesTwoPort,
    /// The Lagrange-type defect of a series composition versus the product
    /// of the operand defects (a pointwise identity).
    SeriesLagrange,
    /// The three Dirichlet-anchored functions of a two-arm parallel join
    /// versus their product/cross-sum formulas.
    ParallelFamily,
    /// The cleared Neumann-Neumann function of a two-arm parallel join
    /// versus direct assembly.
    ParallelTheorem,
    /// The m-arm cleared port-system determinant versus direct assembly on
    /// the m-arm parallel join.
    ParallelM,
}

impl Identity {
    /// Stable command-line token naming this identity.
    pub fn cli_name(&self) -> &'static str {
        match self {
            Identity::SeriesCut => "series-1.1",
            Identity::SeriesTwoPort => "series-3.x",
            Identity::SeriesLagrange => "lagrange-3.5",
            Identity::ParallelFamily => "parallel-5.i",
            Identity::ParallelTheorem => "parallel-theorem",
            Identity::ParallelM => "parallel-m",
        }
    }

    /// (min, max) operand count; `usize::MAX` means unbounded.
    fn arity(&self) -> (usize, usize) {
        match self {
            Identity::ParallelM => (2, usize::MAX),
            _ => (2, 2),
        }
    }
}

/// Knobs of a verification run.
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Maximum tolerated relative deviation (of ratios from their median,
    /// or of the two sides pointwise).
    pub rtol: f64,
    /// Deliberately flip one sign in the formula side.  Exists to prove the
    /// checks can fail; a healthy identity must then report FAIL.
    pub corrupt_sign: bool,
}

/// How a function's sample pairs are compared.
enum CheckKind {
    /// direct/formula must be z-independent.
    RatioConstancy,
    /// direct must equal formula point by point.
    Pointwise,
}

struct FunctionCheck {
    name: &'static str,
    kind: CheckKind,
    /// (direct, formula) per grid point.
    samples: Vec<(f64, f64)>,
}

struct Assessment {
    usable: usize,
    total: usize,
    median: f64,
    max_dev: f64,
}

fn median_of(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Relative magnitude below which a sample is too close to a zero of the
/// function for its ratio to be meaningful: rounding noise of order
/// `eps * max |f|` would otherwise masquerade as ratio drift.
const RATIO_FLOOR: f64 = 1e-6;

fn assess(check: &FunctionCheck) -> Assessment {
    let total = check.samples.len();
    let finite: Vec<(f64, f64)> = check
        .samples
        .iter()
        .copied()
        .filter(|(d, f)| d.is_finite() && f.is_finite())
        .collect();
    let dmax = finite.iter().fold(0.0f64, |m, (d, _)| m.max(d.abs()));
    let fmax = finite.iter().fold(0.0f64, |m, (_, f)| m.max(f.abs()));
    if fmax == 0.0 || dmax == 0.0 {
        return Assessment { usable: 0, total, median: f64::NAN, max_dev: f64::INFINITY };
    }
    match check.kind {
        CheckKind::RatioConstancy => {
            let ratios: Vec<f64> = finite
                .iter()
                .filter(|(d, f)| d.abs() > RATIO_FLOOR * dmax && f.abs() > RATIO_FLOOR * fmax)
                .map(|(d, f)| d / f)
                .collect();
            let usable = ratios.len();
            if usable < 3 {
                return Assessment { usable, total, median: f64::NAN, max_dev: f64::INFINITY };
            }
            let median = median_of(ratios.clone());
            if median == 0.0 || !median.is_finite() {
                return Assessment { usable, total, median, max_dev: f64::INFINITY };
            }
            let max_dev = ratios
                .iter()
                .fold(0.0f64, |m, r| m.max((r / median - 1.0).abs()));
            Assessment { usable, total, median, max_dev }
        }
        CheckKind::Pointwise => {
            // Compare where the reference side is resolvable at all.
            let kept: Vec<(f64, f64)> = finite
                .iter()
                .copied()
                .filter(|(d, _)| d.abs() > 1e-12 * dmax)
                .collect();
            let usable = kept.len();
            if usable < 3 {
                return Assessment { usable, total, median: f64::NAN, max_dev: f64::INFINITY };
            }
            let median = median_of(kept.iter().map(|(d, f)| f / d).collect());
            let max_dev = kept
                .iter()
                .fold(0.0f64, |m, (d, f)| m.max(((f - d) / d).abs()));
            Assessment { usable, total, median, max_dev }
        }
    }
}

fn eval_two_ports(
    ports: &[PortedGraph],
    z: f64,
) -> Option<Vec<TwoPortValues>> {
    ports
        .iter()
        .map(|p| two_port(p, SpectralPoint(z), SOLVER_TOL).ok())
        .collect()
}

fn nan_pair() -> (f64, f64) {
    (f64::NAN, f64::NAN)
}

fn build_checks(
    identity: Identity,
    ports: &[PortedGraph],
    grid: &ZGrid,
    corrupt: bool,
) -> Result<Vec<FunctionCheck>, CliError> {
    let zs = grid.points();
    let err = |e: qgraph_core::compose::ComposeError| CliError::Input(format!("join failed: {e}"));
    match identity {
        Identity::SeriesCut => {
            let joined = join_series(&ports[0], &ports[1]).map_err(err)?;
            let cut = match joined.provenance() {
                JoinProvenance::Series { cut, .. } => *cut,
                JoinProvenance::Parallel { .. } => unreachable!("series join"),
            };
            let sign = if corrupt { -1.0 } else { 1.0 };
            let boundary_phi = |pg: &PortedGraph, at: VertexId, kind: RootKind, z: f64| {
                phi(pg.graph(), at, kind, SpectralPoint(z), SOLVER_TOL).unwrap_or(f64::NAN)
            };
            let mut samples = Vec::with_capacity(zs.len());
            for &z in &zs {
                let direct = phi(
                    joined.graph(),
                    cut,
                    RootKind::GeneralizedNeumann,
                    SpectralPoint(z),
                    SOLVER_TOL,
                )
                .unwrap_or(f64::NAN);
                let n1 = boundary_phi(&ports[0], ports[0].v_out(), RootKind::GeneralizedNeumann, z);
                let d1 = boundary_phi(&ports[0], ports[0].v_out(), RootKind::GeneralizedDirichlet, z);
                let n2 = boundary_phi(&ports[1], ports[1].v_in(), RootKind::GeneralizedNeumann, z);
                let d2 = boundary_phi(&ports[1], ports[1].v_in(), RootKind::GeneralizedDirichlet, z);
                samples.push((direct, n1 * d2 + sign * d1 * n2));
            }
            Ok(vec![FunctionCheck {
                name: "phi_n",
                kind: CheckKind::RatioConstancy,
                samples,
            }])
        }
        Identity::SeriesTwoPort => {
            let joined = join_series(&ports[0], &ports[1]).map_err(err)?;
            let jp = PortedGraph::new(
                joined.graph().clone().into_graph(),
                joined.v_in(),
                joined.v_out(),
            )
            .map_err(|e| CliError::Input(format!("joined graph is not a two-port: {e}")))?;
            let mut checks: Vec<FunctionCheck> = ["phi_dd", "phi_dn", "phi_nd", "phi_nn"]
                .into_iter()
                .map(|name| FunctionCheck {
                    name,
                    kind: CheckKind::RatioConstancy,
                    samples: Vec::with_capacity(zs.len()),
                })
                .collect();
            for &z in &zs {
                let direct = two_port(&jp, SpectralPoint(z), SOLVER_TOL).ok();
                let formula = eval_two_ports(ports, z).map(|tps| {
                    let mut c = series_compose(&tps[0], &tps[1]);
                    if corrupt {
                        c.phi_dd =
                            tps[0].phi_dn * tps[1].phi_dd - tps[0].phi_dd * tps[1].phi_nd;
                    }
                    c
                });
                match (direct, formula) {
                    (Some(d), Some(f)) => {
                        checks[0].samples.push((d.phi_dd, f.phi_dd));
                        checks[1].samples.push((d.phi_dn, f.phi_dn));
                        checks[2].samples.push((d.phi_nd, f.phi_nd));
                        checks[3].samples.push((d.phi_nn, f.phi_nn));
                    }
                    _ => checks.iter_mut().for_each(|c| c.samples.push(nan_pair())),
                }
            }
            Ok(checks)
        }
        Identity::SeriesLagrange => {
            let mut samples = Vec::with_capacity(zs.len());
            for &z in &zs {
                match eval_two_ports(ports, z) {
                    Some(tps) => {
                        let (lhs, rhs) = series_lagrange_check(&tps[0], &tps[1]);
                        let rhs = if corrupt { -rhs } else { rhs };
                        samples.push((lhs, rhs));
                    }
                    None => samples.push(nan_pair()),
                }
            }
            Ok(vec![FunctionCheck {
                name: "defect",
                kind: CheckKind::Pointwise,
                samples,
            }])
        }
        Identity::ParallelFamily => {
            let joined = join_parallel(&ports[0], &ports[1]).map_err(err)?;
            let (fin, fout) = fused_ports(joined.provenance());
            let combos = [
                (RootKind::GeneralizedDirichlet, RootKind::GeneralizedDirichlet),
                (RootKind::GeneralizedDirichlet, RootKind::GeneralizedNeumann),
                (RootKind::GeneralizedNeumann, RootKind::GeneralizedDirichlet),
            ];
            let mut checks: Vec<FunctionCheck> = ["phi_dd", "phi_dn", "phi_nd"]
                .into_iter()
                .map(|name| FunctionCheck {
                    name,
                    kind: CheckKind::RatioConstancy,
                    samples: Vec::with_capacity(zs.len()),
                })
                .collect();
            for &z in &zs {
                let tps = eval_two_ports(ports, z);
                for (slot, (kin, kout)) in combos.iter().enumerate() {
                    let direct = assemble_with_overrides(
                        joined.graph(),
                        fin,
                        &[(fin, *kin), (fout, *kout)],
                        SpectralPoint(z),
                        SOLVER_TOL,
                    )
                    .map(|m| m.det())
                    .unwrap_or(f64::NAN);
                    let formula = match &tps {
                        Some(tps) => {
                            let (dd, dn, nd) = parallel_dirichlet_family(&tps[0], &tps[1]);
                            let dn = if corrupt {
                                tps[0].phi_dn * tps[1].phi_dd - tps[0].phi_dd * tps[1].phi_dn
                            } else {
                                dn
                            };
                            [dd, dn, nd][slot]
                        }
                        None => f64::NAN,
                    };
                    checks[slot].samples.push((direct, formula));
                }
            }
            Ok(checks)
        }
        Identity::ParallelTheorem => {
            let joined = join_parallel(&ports[0], &ports[1]).map_err(err)?;
            let (fin, _) = fused_ports(joined.provenance());
            let mut samples = Vec::with_capacity(zs.len());
            for &z in &zs {
                let direct = phi(
                    joined.graph(),
                    fin,
                    RootKind::GeneralizedNeumann,
                    SpectralPoint(z),
                    SOLVER_TOL,
                )
                .unwrap_or(f64::NAN);
                let formula = match eval_two_ports(ports, z) {
                    Some(tps) => {
                        if corrupt {
                            corrupted_parallel_nn(&tps[0], &tps[1])
                        } else {
                            parallel_phi_nn(&tps[0], &tps[1])
                        }
                    }
                    None => f64::NAN,
                };
                samples.push((direct, formula));
            }
            Ok(vec![FunctionCheck {
                name: "phi_nn",
                kind: CheckKind::RatioConstancy,
                samples,
            }])
        }
        Identity::ParallelM => {
            let arm_refs: Vec<&PortedGraph> = ports.iter().collect();
            let joined = join_parallel_many(&arm_refs).map_err(err)?;
            let (fin, _) = fused_ports(joined.provenance());
            let mut samples = Vec::with_capacity(zs.len());
            for &z in &zs {
                let direct = phi(
                    joined.graph(),
                    fin,
                    RootKind::GeneralizedNeumann,
                    SpectralPoint(z),
                    SOLVER_TOL,
                )
                .unwrap_or(f64::NAN);
                let formula = match eval_two_ports(ports, z) {
                    Some(mut tps) => {
                        // The interior determinant of the first arm is the
                        // one factor whose sign flip is never absorbed into
                        // a constant rescaling, even for identical arms.
                        if corrupt {
                            tps[0].delta = -tps[0].delta;
                        }
                        parallel_m_phi_nn(&tps).unwrap_or(f64::NAN)
                    }
                    None => f64::NAN,
                };
                samples.push((direct, formula));
            }
            Ok(vec![FunctionCheck {
                name: "phi_nn",
                kind: CheckKind::RatioConstancy,
                samples,
            }])
        }
    }
}

fn fused_ports(p: &JoinProvenance) -> (VertexId, VertexId) {
    match p {
        JoinProvenance::Parallel { fused_in, fused_out, .. } => (*fused_in, *fused_out),
        JoinProvenance::Series { .. } => unreachable!("parallel join"),
    }
}

/// One deliberately wrong sign in the cleared parallel numerator.
fn corrupted_parallel_nn(tp1: &TwoPortValues, tp2: &TwoPortValues) -> f64 {
    let w1 = tp1.phi_dd * tp1.phi_nn - tp1.phi_nd * tp1.phi_dn;
    let w2 = tp2.phi_dd * tp2.phi_nn - tp2.phi_nd * tp2.phi_dn;
    let cross = tp1.phi_dd * tp2.phi_nn
        + tp1.phi_nn * tp2.phi_dd
        + tp1.phi_nd * tp2.phi_dn
        - tp1.phi_dn * tp2.phi_nd;
    w1 * tp2.delta * tp2.delta + w2 * tp1.delta * tp1.delta + cross * tp1.delta * tp2.delta
}

/// Run one verification and write the report; `Err(VerificationFailed)`
/// signals a FAIL result (the report is still fully written).
pub fn run(
    out: &mut dyn Write,
    identity: Identity,
    docs: &[GraphDocument],
    origins: &[PathBuf],
    grid: &ZGrid,
    opts: &VerifyOptions,
) -> Result<(), CliError> {
    let (min, max) = identity.arity();
    if docs.len() < min || docs.len() > max {
        let want = if max == usize::MAX {
            format!("at least {min}")
        } else {
            format!("exactly {min}")
        };
        return Err(CliError::Input(format!(
            "identity {} takes {want} --graph arguments, got {}",
            identity.cli_name(),
            docs.len()
        )));
    }
    let ports: Vec<PortedGraph> = docs
        .iter()
        .zip(origins)
        .map(|(d, p)| ported(d, p))
        .collect::<Result<_, _>>()?;

    let checks = build_checks(identity, &ports, grid, opts.corrupt_sign)?;

    let mut w = |line: String| -> Result<(), CliError> {
        writeln!(out, "{line}").map_err(|e| CliError::Input(format!("write error: {e}")))
    };
    w(format!("identity: {}", identity.cli_name()))?;
    let names: Vec<String> = origins.iter().map(|p| p.display().to_string()).collect();
    w(format!("graphs: {}", names.join(", ")))?;
    w(format!("grid: {} points in [{}, {}]", grid.n, grid.lo, grid.hi))?;
    if opts.corrupt_sign {
        w(String::from("note: one formula sign deliberately corrupted"))?;
    }

    let mut pass = true;
    for check in &checks {
        let a = assess(check);
        if a.usable < 3 {
            pass = false;
            w(format!(
                "{}: usable {}/{} points, insufficient data",
                check.name, a.usable, a.total
            ))?;
            continue;
        }
        let ok = a.max_dev <= opts.rtol;
        pass &= ok;
        w(format!(
            "{}: usable {}/{} points, median ratio {:.10e}, max relative deviation {:.3e}",
            check.name, a.usable, a.total, a.median, a.max_dev
        ))?;
    }

    // The series two-port rules pin a single shared constant for all four
    // functions; check the medians agree with each other as well.
    if identity == Identity::SeriesTwoPort && pass {
        let medians: Vec<f64> = checks.iter().map(|c| assess(c).median).collect();
        let center = median_of(medians.clone());
        let shared_dev = medians
            .iter()
            .fold(0.0f64, |m, x| m.max((x / center - 1.0).abs()));
        pass &= shared_dev <= opts.rtol;
        w(format!("shared constant: max relative spread {shared_dev:.3e}"))?;
    }

    if pass {
        w(format!("RESULT: PASS (rtol {:.1e})", opts.rtol))?;
        Ok(())
    } else {
        w(format!("RESULT: FAIL (rtol {:.1e})", opts.rtol))?;
        Err(CliError::VerificationFailed)
    }
}
