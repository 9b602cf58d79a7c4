//! Two-port view of a graph: a distinguished pair of pendant ports
//! `v_in`/`v_out`, the four characteristic functions with Dirichlet or
//! Neumann conditions imposed at the ports, and the interior determinant
//! `delta` of the reduced condition system.
//!
//! Construction canonicalizes the graph: the edge at `v_in` becomes edge 1
//! oriented out of `v_in`, and the edge at `v_out` becomes edge `g`
//! oriented into `v_out`.  No other orientation is touched: the reduction
//! locates its rows by label, so it is well-defined for any interior
//! orientation, and keeping the input orientation preserves the exact
//! reduced-system values (e.g. the identity block of a three-edge path).
//!
//! The four determinants are sign-normalized so that `phi_xy / delta`
//! always equals endpoint data of the solution launched at `v_in`: for a
//! single edge the quadruple is exactly `(s, s', c, c')`, and composition
//! formulas can mix values from different graphs without per-shape sign
//! bookkeeping.  The normalization is a permutation parity: reordering
//! rows/columns of the assembled matrix into [kept; port-adjacent] block
//! form multiplies the determinant by a graph-dependent sign which is
//! computed combinatorially and divided back out.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::assembly::{
    assemble_with_overrides, AssembleError, CharMatrix, ColLabel, RootKind, RowLabel,
};
use crate::graph::{EdgeEnd, EdgeId, GraphError, MetricGraph, Slot, ValidatedGraph, VertexId};
use crate::linalg::Matrix;
use crate::solutions::{fundamental_pair, FundamentalPair, SpectralPoint};

/// Boundary condition imposed at a port (or, for [`endpoint_expansion`],
/// the launch data at `v_in`: Dirichlet starts `(y, y') = (0, 1)`, Neumann
/// `(1, 0)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortCondition {
    Dirichlet,
    Neumann,
}

/// Graph with canonicalized ports.
#[derive(Debug, Clone)]
pub struct PortedGraph {
    graph: ValidatedGraph,
    v_in: VertexId,
    v_out: VertexId,
}

/// The four port characteristic functions and the interior determinant,
/// all at one spectral point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPortValues {
    pub z: SpectralPoint,
    /// Dirichlet at `v_in`, Dirichlet at `v_out`.
    pub phi_dd: f64,
    /// Dirichlet at `v_in`, Neumann at `v_out`.
    pub phi_dn: f64,
    /// Neumann at `v_in`, Dirichlet at `v_out`.
    pub phi_nd: f64,
    /// Neumann at `v_in`, Neumann at `v_out`.
    pub phi_nn: f64,
    /// Interior determinant of the reduced system (1 for g <= 2).
    pub delta: f64,
}

/// Endpoint data at `v_out` of the interior solution launched at `v_in`,
/// together with the interior determinant scaling it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointExpansion {
    pub delta: f64,
    /// `y(l_g)` at `v_out`.
    pub value: f64,
    /// `y'(l_g)` at `v_out`.
    pub derivative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TwoPortError {
    Graph(GraphError),
    Assemble(AssembleError),
    /// A designated port has degree != 1.
    PortNotPendant(VertexId),
    /// `v_in == v_out`.
    PortsEqual,
    /// The reduced interior system is singular at this z (a zero of delta);
    /// the endpoint reconstruction is undefined there.
    DegenerateInterior,
}

impl fmt::Display for TwoPortError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TwoPortError::Graph(e) => write!(f, "{e}"),
            TwoPortError::Assemble(e) => write!(f, "{e}"),
            TwoPortError::PortNotPendant(v) => write!(f, "port {v} is not a pendant vertex"),
            TwoPortError::PortsEqual => write!(f, "v_in and v_out must be distinct"),
            TwoPortError::DegenerateInterior => {
                write!(f, "reduced interior system is singular at this spectral point")
            }
        }
    }
}

impl From<GraphError> for TwoPortError {
    fn from(e: GraphError) -> Self {
        TwoPortError::Graph(e)
    }
}

impl From<AssembleError> for TwoPortError {
    fn from(e: AssembleError) -> Self {
        TwoPortError::Assemble(e)
    }
}

impl PortedGraph {
    /// Validate and canonicalize: relabel the port edges to 1 and g, orient
    /// them out of `v_in` / into `v_out`, and orient the other edges at the
    /// inner vertex outward.
    pub fn new(graph: MetricGraph, v_in: VertexId, v_out: VertexId) -> Result<Self, TwoPortError> {
        let vg = graph.validate()?;
        if v_in == v_out {
            return Err(TwoPortError::PortsEqual);
        }
        for v in [v_in, v_out] {
            if vg.vertex(v).is_none() {
                return Err(TwoPortError::Graph(GraphError::UnknownVertex(v)));
            }
            if !vg.is_pendant(v) {
                return Err(TwoPortError::PortNotPendant(v));
            }
        }
        let e_in = vg.slots(v_in)[0].edge;
        let e_out = vg.slots(v_out)[0].edge;
        let g = vg.edge_count() as u32;

        let mut remap: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
        remap.insert(e_in, EdgeId(1));
        if e_out != e_in {
            remap.insert(e_out, EdgeId(g));
            let mut rest: Vec<EdgeId> = vg
                .edges()
                .iter()
                .map(|e| e.id)
                .filter(|id| *id != e_in && *id != e_out)
                .collect();
            rest.sort();
            for (i, id) in rest.into_iter().enumerate() {
                remap.insert(id, EdgeId(i as u32 + 2));
            }
        }

        let mut mg = vg.into_graph();
        for e in &mut mg.edges {
            e.id = remap[&e.id];
        }
        let find = |mg: &MetricGraph, id: EdgeId| mg.edges.iter().find(|e| e.id == id).cloned();

        let e1 = find(&mg, EdgeId(1)).expect("edge 1 exists");
        if e1.to == v_in {
            mg = mg.reverse_edge(EdgeId(1))?;
        }
        let eg = find(&mg, EdgeId(g)).expect("edge g exists");
        if eg.from == v_out {
            mg = mg.reverse_edge(EdgeId(g))?;
        }

        let graph = mg.validate()?;
        Ok(PortedGraph { graph, v_in, v_out })
    }

    pub fn graph(&self) -> &ValidatedGraph {
        &self.graph
    }

    pub fn v_in(&self) -> VertexId {
        self.v_in
    }

    pub fn v_out(&self) -> VertexId {
        self.v_out
    }

    /// The edge at `v_in` (always id 1 after canonicalization).
    pub fn in_edge(&self) -> EdgeId {
        EdgeId(1)
    }

    /// The edge at `v_out` (always id g).
    pub fn out_edge(&self) -> EdgeId {
        EdgeId(self.graph.edge_count() as u32)
    }

    /// The inner vertex `w`: far end of the out-edge (equals `v_in` for a
    /// single-edge graph).
    pub fn inner_vertex(&self) -> VertexId {
        self.graph.edge(self.out_edge()).from
    }

    fn assemble_ports(
        &self,
        at_in: PortCondition,
        at_out: PortCondition,
        z: SpectralPoint,
        tol: f64,
    ) -> Result<CharMatrix, TwoPortError> {
        let kind = |c: PortCondition| match c {
            PortCondition::Dirichlet => RootKind::GeneralizedDirichlet,
            PortCondition::Neumann => RootKind::GeneralizedNeumann,
        };
        Ok(assemble_with_overrides(
            &self.graph,
            self.v_in,
            &[(self.v_in, kind(at_in)), (self.v_out, kind(at_out))],
            z,
            tol,
        )?)
    }

    /// Canonical indices of the four port-adjacent rows
    /// `[r_in, r_cont_w, r_kirchhoff_w, r_out]` and columns
    /// `[B_1, A_1, B_g, A_g]`.  Requires g >= 2.
    fn reduction(&self, cm: &CharMatrix) -> ([usize; 4], [usize; 4]) {
        let g = self.graph.edge_count();
        let w = self.inner_vertex();
        let eg = self.out_edge();
        debug_assert_eq!(cm.row_labels[0], RowLabel::Boundary { vertex: self.v_in });
        let r_out = cm
            .find_row(&RowLabel::Boundary { vertex: self.v_out })
            .expect("out-port row");
        let r_kw = cm.find_row(&RowLabel::Kirchhoff { vertex: w }).expect("Kirchhoff row at w");
        let r_cw = cm
            .row_labels
            .iter()
            .position(|l| {
                matches!(l, RowLabel::Continuity { vertex, second, .. }
                    if *vertex == w && second.edge == eg)
            })
            .expect("continuity row at w touching edge g");
        debug_assert_eq!(cm.col_labels[0], ColLabel::CosCoeff(EdgeId(1)));
        ([0, r_cw, r_kw, r_out], [0, g, g - 1, 2 * g - 1])
    }

    /// Entries with the port-adjacent rows/columns removed, in canonical
    /// order.
    fn reduced_matrix(&self, cm: &CharMatrix, special_rows: &[usize; 4], special_cols: &[usize; 4]) -> Matrix {
        let n = cm.entries.n();
        let keep = |special: &[usize; 4]| -> Vec<usize> {
            (0..n).filter(|i| !special.contains(i)).collect()
        };
        let rows = keep(special_rows);
        let cols = keep(special_cols);
        let mut m = Matrix::zeros(rows.len());
        for (i, r) in rows.iter().enumerate() {
            for (j, c) in cols.iter().enumerate() {
                m.set(i, j, cm.entries.get(*r, *c));
            }
        }
        m
    }

    /// Sign of the permutation taking the canonical row/column order to the
    /// block order [kept...; the four special indices in list order].
    fn block_parity(n: usize, special: &[usize; 4]) -> f64 {
        let mut perm = Vec::with_capacity(n);
        let mut kept_rank = 0usize;
        for i in 0..n {
            if let Some(k) = special.iter().position(|s| *s == i) {
                perm.push(n - 4 + k);
            } else {
                perm.push(kept_rank);
                kept_rank += 1;
            }
        }
        let mut inversions = 0usize;
        for i in 0..n {
            for j in (i + 1)..n {
                if perm[i] > perm[j] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Evaluate the four port functions and the interior determinant.
pub fn two_port(pg: &PortedGraph, z: SpectralPoint, tol: f64) -> Result<TwoPortValues, TwoPortError> {
    use PortCondition::{Dirichlet as D, Neumann as N};
    let dd = pg.assemble_ports(D, D, z, tol)?;
    let dn = pg.assemble_ports(D, N, z, tol)?;
    let nd = pg.assemble_ports(N, D, z, tol)?;
    let nn = pg.assemble_ports(N, N, z, tol)?;

    let (eps, delta) = if pg.graph.edge_count() == 1 {
        (1.0, 1.0)
    } else {
        let (rows, cols) = pg.reduction(&dd);
        let n = dd.entries.n();
        let eps = PortedGraph::block_parity(n, &rows) * PortedGraph::block_parity(n, &cols);
        let delta = pg.reduced_matrix(&dd, &rows, &cols).det();
        (eps, delta)
    };

    Ok(TwoPortValues {
        z,
        phi_dd: eps * dd.det(),
        phi_dn: eps * dn.det(),
        phi_nd: -eps * nd.det(),
        phi_nn: -eps * nn.det(),
        delta,
    })
}

/// Interior determinant with explicit port conditions on the assembled
/// system.  The port-adjacent rows are removed before the determinant is
/// taken, so the result does not depend on `at_in`/`at_out`; the parameters
/// exist to make that invariance testable.
pub fn interior_determinant_with(
    pg: &PortedGraph,
    at_in: PortCondition,
    at_out: PortCondition,
    z: SpectralPoint,
    tol: f64,
) -> Result<f64, TwoPortError> {
    if pg.graph.edge_count() == 1 {
        return Ok(1.0);
    }
    let cm = pg.assemble_ports(at_in, at_out, z, tol)?;
    let (rows, cols) = pg.reduction(&cm);
    Ok(pg.reduced_matrix(&cm, &rows, &cols).det())
}

/// Interior determinant of the reduced condition system (1 when there is
/// nothing to reduce, i.e. g <= 2).
pub fn interior_determinant(pg: &PortedGraph, z: SpectralPoint, tol: f64) -> Result<f64, TwoPortError> {
    interior_determinant_with(pg, PortCondition::Dirichlet, PortCondition::Dirichlet, z, tol)
}

/// Solve the reduced interior system for the solution launched at `v_in`
/// with the given data and reconstruct its endpoint values at `v_out`.
///
/// `delta * value` and `delta * derivative` reproduce the assembled
/// `phi_xd` / `phi_xn` exactly; the acceptance tests use this as an
/// independent cofactor-route oracle.
pub fn endpoint_expansion(
    pg: &PortedGraph,
    data: PortCondition,
    z: SpectralPoint,
    tol: f64,
) -> Result<EndpointExpansion, TwoPortError> {
    let (b1, a1) = match data {
        PortCondition::Dirichlet => (0.0, 1.0),
        PortCondition::Neumann => (1.0, 0.0),
    };
    let g = pg.graph.edge_count();
    let pair_of = |id: EdgeId| -> Result<FundamentalPair, TwoPortError> {
        Ok(fundamental_pair(pg.graph.edge(id), z, tol).map_err(AssembleError::from)?)
    };

    if g == 1 {
        let p = pair_of(EdgeId(1))?;
        return Ok(EndpointExpansion {
            delta: 1.0,
            value: b1 * p.c + a1 * p.s,
            derivative: b1 * p.c_prime + a1 * p.s_prime,
        });
    }

    let cm = pg.assemble_ports(data, PortCondition::Dirichlet, z, tol)?;
    let (rows_sp, cols_sp) = pg.reduction(&cm);
    let m_red = pg.reduced_matrix(&cm, &rows_sp, &cols_sp);
    let delta = m_red.det();

    let kept_rows: Vec<usize> = (0..2 * g).filter(|i| !rows_sp.contains(i)).collect();
    let kept_cols: Vec<usize> = (0..2 * g).filter(|i| !cols_sp.contains(i)).collect();
    let col_rank: BTreeMap<usize, usize> =
        kept_cols.iter().enumerate().map(|(rank, col)| (*col, rank)).collect();

    // Move the edge-1 data terms to the right-hand side.
    let rhs: Vec<f64> = kept_rows
        .iter()
        .map(|r| -(cm.entries.get(*r, cols_sp[0]) * b1 + cm.entries.get(*r, cols_sp[1]) * a1))
        .collect();
    let x = m_red.solve(&rhs).ok_or(TwoPortError::DegenerateInterior)?;

    // Coefficient of the solution on a given column: launch data on edge 1,
    // solved interior unknowns elsewhere (edge g never appears in kept rows).
    let coeff = |col: usize| -> f64 {
        if col == cols_sp[0] {
            b1
        } else if col == cols_sp[1] {
            a1
        } else {
            x[col_rank[&col]]
        }
    };
    let b_col = |e: EdgeId| e.0 as usize - 1;
    let a_col = |e: EdgeId| g + e.0 as usize - 1;

    let w = pg.inner_vertex();
    let eg = pg.out_edge();
    let eg_slot = Slot { edge: eg, end: EdgeEnd::Start };

    // Value at w from any non-out-edge slot (they all agree by the kept
    // continuity rows).
    let slot0 = *pg
        .graph
        .slots(w)
        .iter()
        .find(|s| **s != eg_slot)
        .expect("w has degree >= 2 for g >= 2");
    let slot_value = |slot: Slot| -> Result<f64, TwoPortError> {
        Ok(match slot.end {
            EdgeEnd::Start => coeff(b_col(slot.edge)),
            EdgeEnd::End => {
                let p = pair_of(slot.edge)?;
                p.c * coeff(b_col(slot.edge)) + p.s * coeff(a_col(slot.edge))
            }
        })
    };
    let bg = slot_value(slot0)?;

    // Kirchhoff balance at w gives the out-edge derivative coefficient:
    // A_g = sum_incoming y'(l) - sum_other_outgoing y'(0).
    let mut ag = 0.0;
    for slot in pg.graph.slots(w) {
        if *slot == eg_slot {
            continue;
        }
        match slot.end {
            EdgeEnd::Start => ag -= coeff(a_col(slot.edge)),
            EdgeEnd::End => {
                let p = pair_of(slot.edge)?;
                ag += p.c_prime * coeff(b_col(slot.edge)) + p.s_prime * coeff(a_col(slot.edge));
            }
        }
    }

    let pg_pair = pair_of(eg)?;
    Ok(EndpointExpansion {
        delta,
        value: pg_pair.c * bg + pg_pair.s * ag,
        derivative: pg_pair.c_prime * bg + pg_pair.s_prime * ag,
    })
}

/// `phi_nd phi_dn - phi_nn phi_dd`; multiplicative under series connection
/// and identically +1 for a single edge.
pub fn lagrange_defect(tp: &TwoPortValues) -> f64 {
    tp.phi_nd * tp.phi_dn - tp.phi_nn * tp.phi_dd
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{PotentialSpec, VertexCondition};
    use crate::solutions::fundamental_pair_of;
    use proptest::prelude::*;

    const PI: f64 = core::f64::consts::PI;
    const TOL: f64 = 1e-10;

    fn unit_interval_pg() -> PortedGraph {
        let g = MetricGraph::interval(
            1.0,
            PotentialSpec::Zero,
            VertexCondition::Dirichlet,
            VertexCondition::Dirichlet,
        );
        PortedGraph::new(g, VertexId(1), VertexId(2)).unwrap()
    }

    fn unit_path_pg(n: usize) -> PortedGraph {
        let segs: Vec<(f64, PotentialSpec)> = (0..n).map(|_| (1.0, PotentialSpec::Zero)).collect();
        let g = MetricGraph::path(&segs, VertexCondition::Dirichlet, VertexCondition::Dirichlet);
        PortedGraph::new(g, VertexId(1), VertexId(n as u32 + 1)).unwrap()
    }

    /// 3-leg star: ports at the tips of legs 1 and 3, Robin on the spare leg.
    fn star_pg(beta: f64) -> PortedGraph {
        let g = MetricGraph::star(&[
            (1.0, PotentialSpec::Zero, VertexCondition::Dirichlet),
            (1.0, PotentialSpec::Zero, VertexCondition::Robin { beta }),
            (1.0, PotentialSpec::Zero, VertexCondition::Dirichlet),
        ]);
        PortedGraph::new(g, VertexId(2), VertexId(4)).unwrap()
    }

    #[test]
    fn ported_construction_canonicalizes() {
        let pg = star_pg(1.0);
        assert_eq!(pg.in_edge(), EdgeId(1));
        assert_eq!(pg.out_edge(), EdgeId(3));
        assert_eq!(pg.inner_vertex(), VertexId(1));
        let e1 = pg.graph().edge(EdgeId(1));
        assert_eq!(e1.from, pg.v_in());
        let e3 = pg.graph().edge(EdgeId(3));
        assert_eq!(e3.to, pg.v_out());
    }

    #[test]
    fn ported_rejects_interior_port() {
        let g = MetricGraph::path(
            &[(1.0, PotentialSpec::Zero), (1.0, PotentialSpec::Zero)],
            VertexCondition::Dirichlet,
            VertexCondition::Dirichlet,
        );
        assert_eq!(
            PortedGraph::new(g, VertexId(1), VertexId(2)).unwrap_err(),
            TwoPortError::PortNotPendant(VertexId(2))
        );
    }

    #[test]
    fn single_edge_values_at_pi_squared() {
        let tp = two_port(&unit_interval_pg(), SpectralPoint(PI * PI), TOL).unwrap();
        assert!(tp.phi_dd.abs() < 1e-14);
        assert!((tp.phi_dn + 1.0).abs() < 1e-14);
        assert!((tp.phi_nd + 1.0).abs() < 1e-14);
        assert!(tp.phi_nn.abs() < 1e-13);
        assert_eq!(tp.delta, 1.0);
    }

    #[test]
    fn single_edge_values_at_zero() {
        let tp = two_port(&unit_interval_pg(), SpectralPoint(0.0), TOL).unwrap();
        assert_eq!(
            (tp.phi_dd, tp.phi_dn, tp.phi_nd, tp.phi_nn, tp.delta),
            (1.0, 1.0, 1.0, 0.0, 1.0)
        );
    }

    #[test]
    fn two_path_matches_interval_of_length_two() {
        // A path of two unit edges is the interval [0, 2]; the normalized
        // two-port values must equal the single-interval quadruple.
        let pg = unit_path_pg(2);
        for z in [0.37, 2.0, (PI / 2.0) * (PI / 2.0), 11.4, -1.8] {
            let tp = two_port(&pg, SpectralPoint(z), TOL).unwrap();
            let p = fundamental_pair_of(&PotentialSpec::Zero, 2.0, SpectralPoint(z), TOL).unwrap();
            assert!((tp.phi_dd - p.s).abs() < 1e-12 * (1.0 + p.s.abs()), "z={z}");
            assert!((tp.phi_dn - p.s_prime).abs() < 1e-12 * (1.0 + p.s_prime.abs()));
            assert!((tp.phi_nd - p.c).abs() < 1e-12 * (1.0 + p.c.abs()));
            assert!((tp.phi_nn - p.c_prime).abs() < 1e-12 * (1.0 + p.c_prime.abs()));
            assert_eq!(tp.delta, 1.0);
        }
        let at_crit = two_port(&pg, SpectralPoint(PI * PI / 4.0), TOL).unwrap();
        assert!(at_crit.phi_dd.abs() < 1e-14, "sin(2 lambda)/lambda vanishes at lambda = pi/2");
    }

    #[test]
    fn three_path_matches_interval_of_length_three() {
        let pg = unit_path_pg(3);
        for z in [0.9, 4.0, -2.5] {
            let tp = two_port(&pg, SpectralPoint(z), TOL).unwrap();
            let p = fundamental_pair_of(&PotentialSpec::Zero, 3.0, SpectralPoint(z), TOL).unwrap();
            assert!((tp.phi_dd - p.s).abs() < 1e-11 * (1.0 + p.s.abs()), "z={z}");
            assert!((tp.phi_nn - p.c_prime).abs() < 1e-11 * (1.0 + p.c_prime.abs()));
        }
    }

    #[test]
    fn interior_determinant_of_paths() {
        // g <= 2: nothing to reduce.  3-path: identity block, +1.
        // 4-path: one pair transposition, -1.  Constant in z throughout.
        for (n, expect) in [(1, 1.0), (2, 1.0), (3, 1.0), (4, -1.0)] {
            let pg = unit_path_pg(n);
            for z in [0.3, 7.7, -4.0] {
                let d = interior_determinant(&pg, SpectralPoint(z), TOL).unwrap();
                assert!((d - expect).abs() < 1e-12, "n={n} z={z} delta={d}");
            }
        }
    }

    #[test]
    fn interior_determinant_of_star_is_spare_leg_function() {
        let beta = 0.8;
        let pg = star_pg(beta);
        for z in [0.5, 3.0, 9.1, -1.2] {
            let d = interior_determinant(&pg, SpectralPoint(z), TOL).unwrap();
            let p = fundamental_pair_of(&PotentialSpec::Zero, 1.0, SpectralPoint(z), TOL).unwrap();
            let expect = p.s_prime - beta * p.s;
            assert!((d - expect).abs() < 1e-12, "z={z}: {d} vs {expect}");
        }
    }

    #[test]
    fn interior_determinant_ignores_port_conditions() {
        use PortCondition::{Dirichlet as D, Neumann as N};
        let pg = star_pg(-0.6);
        let z = SpectralPoint(4.4);
        let base = interior_determinant_with(&pg, D, D, z, TOL).unwrap();
        for (ci, co) in [(D, N), (N, D), (N, N)] {
            let d = interior_determinant_with(&pg, ci, co, z, TOL).unwrap();
            assert_eq!(d, base);
        }
    }

    #[test]
    fn endpoint_expansion_reproduces_two_port() {
        // Cofactor route: delta * endpoint data == assembled phi, with
        // constant exactly +1, across shapes.
        let shapes: Vec<PortedGraph> = vec![
            unit_interval_pg(),
            unit_path_pg(2),
            unit_path_pg(3),
            unit_path_pg(4),
            star_pg(1.3),
            {
                let g = MetricGraph::star(&[
                    (0.7, PotentialSpec::Constant(2.0), VertexCondition::Dirichlet),
                    (1.1, PotentialSpec::Zero, VertexCondition::Robin { beta: -1.5 }),
                    (0.9, PotentialSpec::Constant(-3.0), VertexCondition::Neumann),
                    (1.3, PotentialSpec::Zero, VertexCondition::Dirichlet),
                ]);
                PortedGraph::new(g, VertexId(2), VertexId(5)).unwrap()
            },
        ];
        for (i, pg) in shapes.iter().enumerate() {
            for z in [0.63, 5.21, -2.4, 17.9] {
                let tp = two_port(pg, SpectralPoint(z), TOL).unwrap();
                let d = endpoint_expansion(pg, PortCondition::Dirichlet, SpectralPoint(z), TOL)
                    .unwrap();
                let n = endpoint_expansion(pg, PortCondition::Neumann, SpectralPoint(z), TOL)
                    .unwrap();
                let checks = [
                    (tp.phi_dd, d.delta * d.value),
                    (tp.phi_dn, d.delta * d.derivative),
                    (tp.phi_nd, n.delta * n.value),
                    (tp.phi_nn, n.delta * n.derivative),
                ];
                for (k, (lhs, rhs)) in checks.iter().enumerate() {
                    assert!(
                        (lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs().max(rhs.abs())),
                        "shape {i}, z={z}, fn {k}: {lhs} vs {rhs}"
                    );
                }
                assert!((tp.delta - d.delta).abs() <= 1e-12 * (1.0 + tp.delta.abs()));
            }
        }
    }

    #[test]
    fn defect_of_star_and_edge() {
        // Single edge: defect == Wronskian == 1 at every z.
        let pg = unit_interval_pg();
        for z in [0.0, 3.3, -2.0, PI * PI] {
            let tp = two_port(&pg, SpectralPoint(z), TOL).unwrap();
            assert!((lagrange_defect(&tp) - 1.0).abs() < 1e-12, "z={z}");
        }
        // Star: defect = delta^2 (port-map determinant is 1).
        let pg = star_pg(0.9);
        for z in [0.8, 6.0, -1.0] {
            let tp = two_port(&pg, SpectralPoint(z), TOL).unwrap();
            let defect = lagrange_defect(&tp);
            assert!(
                (defect - tp.delta * tp.delta).abs() < 1e-10 * (1.0 + defect.abs()),
                "z={z}: {defect} vs {}",
                tp.delta * tp.delta
            );
        }
    }

    proptest! {
        #[test]
        fn single_edge_interval_identity(
            q in -5.0f64..5.0,
            l in 0.3f64..2.0,
            z in -10.0f64..60.0,
        ) {
            // phi_dd phi_nn - phi_dn phi_nd = s c' - s' c = -1 on one edge.
            let g = MetricGraph::interval(
                l,
                PotentialSpec::Constant(q),
                VertexCondition::Dirichlet,
                VertexCondition::Dirichlet,
            );
            let pg = PortedGraph::new(g, VertexId(1), VertexId(2)).unwrap();
            let tp = two_port(&pg, SpectralPoint(z), TOL).unwrap();
            let combo = tp.phi_dd * tp.phi_nn - tp.phi_dn * tp.phi_nd;
            prop_assert!((combo + 1.0).abs() < 1e-9);
        }
    }
}
