//! Real-axis root location for characteristic functions: uniform grid scan,
//! bisection on sign changes, golden-section refinement of near-zero local
//! minima (suspected even-multiplicity roots), plus a Weyl-law counting
//! diagnostic.

use alloc::vec::Vec;

use crate::graph::ValidatedGraph;

/// How a root location was refined after the grid scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefinedBy {
    SignChangeBisection,
    MinimumRefinement,
}

/// Heuristic multiplicity classification.  `EvenSuspected` marks roots found
/// as touching minima of |f| (no sign change), the signature of a
/// double zero; it is a flag, not a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiplicityFlag {
    Simple,
    EvenSuspected,
}

/// A located zero of the scanned function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub z: f64,
    pub refined_by: RefinedBy,
    pub multiplicity_flag: MultiplicityFlag,
    /// |f| at the reported location.
    pub residual: f64,
}

/// Scan window and tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub z_lo: f64,
    pub z_hi: f64,
    pub grid_points: usize,
    /// Width tolerance of the refined bracket in z.
    pub tol_z: f64,
    /// |f| threshold below which a refined touching minimum counts as a root.
    pub tol_value: f64,
}

pub const DEFAULT_TOL_Z: f64 = 1e-10;
pub const DEFAULT_TOL_VALUE: f64 = 1e-9;

impl ScanOptions {
    pub fn new(z_lo: f64, z_hi: f64, grid_points: usize) -> Self {
        ScanOptions {
            z_lo,
            z_hi,
            grid_points: grid_points.max(2),
            tol_z: DEFAULT_TOL_Z,
            tol_value: DEFAULT_TOL_VALUE,
        }
    }

    /// Grid sized from the expected eigenvalue density of `graph`: about 40
    /// points per mean spacing predicted by the Weyl count, at least 64.
    pub fn for_graph(graph: &ValidatedGraph, z_lo: f64, z_hi: f64) -> Self {
        let lo = if z_lo > 0.0 { libm::sqrt(z_lo) } else { 0.0 };
        let hi = if z_hi > 0.0 { libm::sqrt(z_hi) } else { 0.0 };
        let expected = graph.total_length() * (hi - lo) / core::f64::consts::PI;
        let points = libm::ceil(40.0 * (expected + 1.0)) as usize;
        ScanOptions::new(z_lo, z_hi, points.clamp(64, 400_000))
    }
}

/// Leading-order expected number of eigenvalues at or below `z` for a graph
/// of total length L: L sqrt(z) / pi.
pub fn weyl_count_estimate(graph: &ValidatedGraph, z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    graph.total_length() * libm::sqrt(z) / core::f64::consts::PI
}

/// Slack of the Weyl sanity band: a found-count further than this from the
/// estimate suggests missed roots.
pub fn weyl_band_slack(graph: &ValidatedGraph) -> f64 {
    graph.vertices().len() as f64 + 2.0
}

/// Default lower end for spectral scans: Robin conditions and negative
/// potentials push eigenvalues below zero, but not far on the scale 1/L².
pub fn default_negative_floor(graph: &ValidatedGraph) -> f64 {
    let l = graph.total_length();
    -25.0 / (l * l)
}

fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Bisection on a sign-change bracket; returns (z, residual).
fn bisect<F: FnMut(f64) -> f64>(f: &mut F, mut a: f64, mut b: f64, mut fa: f64, opts: &ScanOptions) -> (f64, f64) {
    let mut mid = 0.5 * (a + b);
    let mut fm = f(mid);
    for _ in 0..240 {
        if fm == 0.0 {
            return (mid, 0.0);
        }
        if sign_of(fa) * sign_of(fm) < 0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
        mid = 0.5 * (a + b);
        fm = f(mid);
        let width = b - a;
        let floor = 4.0 * f64::EPSILON * libm::fabs(mid).max(1.0);
        if width <= opts.tol_z && (libm::fabs(fm) <= opts.tol_value || width <= floor) {
            break;
        }
        if width <= floor {
            break;
        }
    }
    (mid, libm::fabs(fm))
}

/// Golden-section minimization of |f| on [a, b]; returns (z, |f(z)|).
fn golden_min<F: FnMut(f64) -> f64>(f: &mut F, mut a: f64, mut b: f64, opts: &ScanOptions) -> (f64, f64) {
    let inv_phi = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = libm::fabs(f(c));
    let mut fd = libm::fabs(f(d));
    for _ in 0..200 {
        if b - a <= opts.tol_z {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = libm::fabs(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = libm::fabs(f(d));
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Scan [z_lo, z_hi] on a uniform grid and refine candidate zeros.
///
/// Sign changes are bisected to `tol_z` and flagged `Simple`.  Interior
/// local minima of |f| that dip below sqrt(tol_value) x (grid max of |f|)
/// without a sign change are refined by golden section and kept, flagged
/// `EvenSuspected`, when the refined |f| is below `tol_value`.  Results are
/// deduplicated within `tol_z` and sorted ascending.  Grid cells with
/// non-finite values are skipped.
pub fn find_roots<F: FnMut(f64) -> f64>(mut f: F, opts: &ScanOptions) -> Vec<Root> {
    let n = opts.grid_points.max(2);
    let h = (opts.z_hi - opts.z_lo) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| opts.z_lo + h * i as f64).collect();
    let values: Vec<f64> = grid.iter().map(|z| f(*z)).collect();

    let scale = values
        .iter()
        .filter(|v| v.is_finite())
        .fold(0.0f64, |acc, v| acc.max(libm::fabs(*v)));
    if scale == 0.0 {
        return Vec::new();
    }

    let mut roots: Vec<Root> = Vec::new();
    // Grid points landing exactly on zeros; the flanking intervals carry no
    // usable sign information, so mark them consumed.
    let mut consumed = alloc::vec![false; n.saturating_sub(1)];
    for i in 0..n {
        if values[i] == 0.0 {
            let left = if i > 0 { sign_of(values[i - 1]) } else { 0 };
            let right = if i + 1 < n { sign_of(values[i + 1]) } else { 0 };
            let flag = if left * right < 0 || left * right == 0 {
                MultiplicityFlag::Simple
            } else {
                MultiplicityFlag::EvenSuspected
            };
            roots.push(Root {
                z: grid[i],
                refined_by: RefinedBy::SignChangeBisection,
                multiplicity_flag: flag,
                residual: 0.0,
            });
            if i > 0 {
                consumed[i - 1] = true;
            }
            if i + 1 < n {
                consumed[i] = true;
            }
        }
    }

    for i in 0..n - 1 {
        if consumed[i] || !values[i].is_finite() || !values[i + 1].is_finite() {
            continue;
        }
        if sign_of(values[i]) * sign_of(values[i + 1]) < 0 {
            let (z, residual) = bisect(&mut f, grid[i], grid[i + 1], values[i], opts);
            roots.push(Root {
                z,
                refined_by: RefinedBy::SignChangeBisection,
                multiplicity_flag: MultiplicityFlag::Simple,
                residual,
            });
        }
    }

    let dip = libm::sqrt(opts.tol_value) * scale;
    for i in 1..n - 1 {
        let (prev, here, next) = (values[i - 1], values[i], values[i + 1]);
        if !prev.is_finite() || !here.is_finite() || !next.is_finite() {
            continue;
        }
        let (ap, ah, an) = (libm::fabs(prev), libm::fabs(here), libm::fabs(next));
        let local_min = ah < ap && ah <= an;
        let no_sign_change =
            sign_of(prev) * sign_of(here) > 0 && sign_of(here) * sign_of(next) > 0;
        if local_min && no_sign_change && ah < dip {
            let (z, residual) = golden_min(&mut f, grid[i - 1], grid[i + 1], opts);
            if residual < opts.tol_value {
                roots.push(Root {
                    z,
                    refined_by: RefinedBy::MinimumRefinement,
                    multiplicity_flag: MultiplicityFlag::EvenSuspected,
                    residual,
                });
            }
        }
    }

    roots.sort_by(|a, b| a.z.partial_cmp(&b.z).expect("finite root locations"));
    let mut deduped: Vec<Root> = Vec::new();
    for r in roots {
        match deduped.last_mut() {
            Some(last) if libm::fabs(last.z - r.z) <= opts.tol_z => {
                // Prefer the sign-certified location.
                let keep_new = match (last.refined_by, r.refined_by) {
                    (RefinedBy::MinimumRefinement, RefinedBy::SignChangeBisection) => true,
                    (RefinedBy::SignChangeBisection, RefinedBy::MinimumRefinement) => false,
                    _ => r.residual < last.residual,
                };
                if keep_new {
                    *last = r;
                }
            }
            _ => deduped.push(r),
        }
    }
    deduped
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{phi, RootKind};
    use crate::graph::{MetricGraph, PotentialSpec, VertexCondition, VertexId};
    use crate::solutions::SpectralPoint;

    const PI: f64 = core::f64::consts::PI;
    const TOL: f64 = 1e-10;

    fn circle(circumference: f64) -> ValidatedGraph {
        let half = circumference / 2.0;
        let mg = MetricGraph {
            vertices: alloc::vec![
                crate::graph::Vertex { id: VertexId(1), condition: VertexCondition::GeneralizedNeumann },
                crate::graph::Vertex { id: VertexId(2), condition: VertexCondition::GeneralizedNeumann },
            ],
            edges: alloc::vec![
                crate::graph::Edge {
                    id: crate::graph::EdgeId(1),
                    from: VertexId(1),
                    to: VertexId(2),
                    length: half,
                    potential: PotentialSpec::Zero,
                },
                crate::graph::Edge {
                    id: crate::graph::EdgeId(2),
                    from: VertexId(1),
                    to: VertexId(2),
                    length: half,
                    potential: PotentialSpec::Zero,
                },
            ],
        };
        mg.validate().unwrap()
    }

    fn interval_dd_phi(vg: &ValidatedGraph) -> impl FnMut(f64) -> f64 + '_ {
        move |z| phi(vg, VertexId(1), RootKind::GeneralizedDirichlet, SpectralPoint(z), TOL).unwrap()
    }

    #[test]
    fn interval_dirichlet_roots_are_k_pi_squared() {
        let vg = MetricGraph::interval(
            1.0,
            PotentialSpec::Zero,
            VertexCondition::Dirichlet,
            VertexCondition::Dirichlet,
        )
        .validate()
        .unwrap();
        let opts = ScanOptions::new(0.5, 100.0, 2000);
        let roots = find_roots(interval_dd_phi(&vg), &opts);
        assert_eq!(roots.len(), 3);
        for (k, r) in roots.iter().enumerate() {
            let expect = ((k + 1) as f64 * PI) * ((k + 1) as f64 * PI);
            assert!((r.z - expect).abs() < 1e-8, "root {k}: {} vs {expect}", r.z);
            assert_eq!(r.multiplicity_flag, MultiplicityFlag::Simple);
            assert_eq!(r.refined_by, RefinedBy::SignChangeBisection);
            assert!(r.residual <= opts.tol_value);
        }
    }

    #[test]
    fn no_roots_in_gap() {
        let vg = MetricGraph::interval(
            1.0,
            PotentialSpec::Zero,
            VertexCondition::Dirichlet,
            VertexCondition::Dirichlet,
        )
        .validate()
        .unwrap();
        let roots = find_roots(interval_dd_phi(&vg), &ScanOptions::new(1.0, 2.0, 200));
        assert!(roots.is_empty());
    }

    #[test]
    fn neumann_interval_includes_zero_eigenvalue() {
        let vg = MetricGraph::interval(
            1.0,
            PotentialSpec::Zero,
            VertexCondition::Neumann,
            VertexCondition::Neumann,
        )
        .validate()
        .unwrap();
        let f = |z: f64| {
            phi(&vg, VertexId(1), RootKind::GeneralizedNeumann, SpectralPoint(z), TOL).unwrap()
        };
        let roots = find_roots(f, &ScanOptions::new(-1.0, 100.0, 2500));
        assert_eq!(roots.len(), 4, "0, pi^2, 4pi^2, 9pi^2: got {roots:?}");
        assert!(roots[0].z.abs() < 1e-8);
        for (k, r) in roots.iter().enumerate().skip(1) {
            let expect = (k as f64 * PI) * (k as f64 * PI);
            assert!((r.z - expect).abs() < 1e-8);
        }
    }

    #[test]
    fn double_zeros_flagged_even_suspected() {
        // The cleared parallel numerator for equal unit edges.
        let f = |z: f64| {
            let lam = if z >= 0.0 { libm::sqrt(z) } else { 0.0 };
            if z >= 0.0 {
                -4.0 * libm::sin(lam) * libm::sin(lam)
            } else {
                let nu = libm::sqrt(-z);
                4.0 * libm::sinh(nu) * libm::sinh(nu)
            }
        };
        let roots = find_roots(f, &ScanOptions::new(0.5, 50.0, 4000));
        assert_eq!(roots.len(), 2, "{roots:?}");
        for (r, expect) in roots.iter().zip([PI * PI, 4.0 * PI * PI]) {
            assert!((r.z - expect).abs() < 1e-6, "{} vs {expect}", r.z);
            assert_eq!(r.multiplicity_flag, MultiplicityFlag::EvenSuspected);
            assert_eq!(r.refined_by, RefinedBy::MinimumRefinement);
            assert!(r.residual <= DEFAULT_TOL_VALUE);
        }
    }

    #[test]
    fn grid_refinement_preserves_simple_roots() {
        let vg = MetricGraph::interval(
            1.0,
            PotentialSpec::Zero,
            VertexCondition::Dirichlet,
            VertexCondition::Dirichlet,
        )
        .validate()
        .unwrap();
        let coarse = find_roots(interval_dd_phi(&vg), &ScanOptions::new(0.5, 100.0, 1000));
        let fine = find_roots(interval_dd_phi(&vg), &ScanOptions::new(0.5, 100.0, 2000));
        for r in &coarse {
            assert!(
                fine.iter().any(|s| (s.z - r.z).abs() <= 1e-8),
                "root {} lost on refinement",
                r.z
            );
        }
    }

    #[test]
    fn circle_count_sits_in_weyl_band() {
        let vg = circle(2.0);
        let f = |z: f64| {
            phi(&vg, VertexId(1), RootKind::GeneralizedNeumann, SpectralPoint(z), TOL).unwrap()
        };
        let z_hi = (5.0 * PI) * (5.0 * PI) + 5.0;
        // Touching (double) zeros only register when the grid resolves the
        // quadratic dip below sqrt(tol_value) x scale, which needs far more
        // than the default simple-root density.
        let opts = ScanOptions::new(-1.0, z_hi, 40_000);
        let roots = find_roots(f, &opts);
        let weighted: usize = roots
            .iter()
            .map(|r| match r.multiplicity_flag {
                MultiplicityFlag::Simple => 1,
                MultiplicityFlag::EvenSuspected => 2,
            })
            .sum();
        assert_eq!(weighted, 11, "z=0 plus five double eigenvalues: {roots:?}");
        let estimate = weyl_count_estimate(&vg, z_hi);
        assert!((weighted as f64 - estimate).abs() <= weyl_band_slack(&vg));
    }

    #[test]
    fn weyl_estimate_examples() {
        let interval = MetricGraph::interval(
            1.0,
            PotentialSpec::Zero,
            VertexCondition::Dirichlet,
            VertexCondition::Dirichlet,
        )
        .validate()
        .unwrap();
        assert!((weyl_count_estimate(&interval, (10.0 * PI) * (10.0 * PI)) - 10.0).abs() < 1e-12);
        let two_circle = circle(2.0);
        assert!((weyl_count_estimate(&two_circle, (5.0 * PI) * (5.0 * PI)) - 10.0).abs() < 1e-12);
        let star = MetricGraph::star(&[
            (1.0, PotentialSpec::Zero, VertexCondition::Dirichlet),
            (1.0, PotentialSpec::Zero, VertexCondition::Dirichlet),
            (1.0, PotentialSpec::Zero, VertexCondition::Dirichlet),
        ])
        .validate()
        .unwrap();
        assert!((weyl_count_estimate(&star, (4.0 * PI) * (4.0 * PI)) - 12.0).abs() < 1e-12);
        assert_eq!(weyl_count_estimate(&star, -3.0), 0.0);
    }

    #[test]
    fn for_graph_scales_grid_with_length_and_window() {
        let vg = MetricGraph::interval(
            1.0,
            PotentialSpec::Zero,
            VertexCondition::Dirichlet,
            VertexCondition::Dirichlet,
        )
        .validate()
        .unwrap();
        // Ten expected eigenvalues in [0, (10 pi)^2] at 40 points each.
        let opts = ScanOptions::for_graph(&vg, 0.0, (10.0 * PI) * (10.0 * PI));
        assert_eq!(opts.grid_points, 440);
        let narrow = ScanOptions::for_graph(&vg, 1.0, 2.0);
        assert_eq!(narrow.grid_points, 64, "floor keeps short windows sampled");
    }

    #[test]
    fn negative_floor_scales_with_length() {
        let vg = MetricGraph::interval(
            2.0,
            PotentialSpec::Zero,
            VertexCondition::Dirichlet,
            VertexCondition::Dirichlet,
        )
        .validate()
        .unwrap();
        assert!((default_negative_floor(&vg) + 25.0 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn exact_grid_zero_is_reported_once() {
        // f(z) = z(z - 1): grid includes z = 0 exactly.
        let f = |z: f64| z * (z - 1.0);
        let roots = find_roots(f, &ScanOptions::new(-2.0, 2.0, 401));
        assert_eq!(roots.len(), 2, "{roots:?}");
        assert!(roots[0].z.abs() <= 1e-12 && roots[0].residual == 0.0);
        assert!((roots[1].z - 1.0).abs() <= 1e-9);
    }
}
