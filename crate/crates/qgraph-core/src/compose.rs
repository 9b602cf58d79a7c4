//! Series and parallel composition of two-port values, plus graph-level
//! join constructors that build the composed graph for direct-assembly
//! cross-checks.
//!
//! The value-level composition rules operate on sign-normalized
//! [`TwoPortValues`] and hold with constant exactly 1 in the normalized
//! convention; against raw assembled determinants of the joined graph they
//! hold up to one global nonzero constant, which is how the verification
//! suite asserts them (ratio constancy over a z-grid).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{
    Edge, EdgeId, GraphError, MetricGraph, Vertex, VertexCondition, VertexId, ValidatedGraph,
};
use crate::linalg::Matrix;
use crate::two_port::{lagrange_defect, PortedGraph, TwoPortError, TwoPortValues};

#[derive(Debug, Clone, PartialEq)]
pub enum ComposeError {
    Graph(GraphError),
    TwoPort(TwoPortError),
    /// `parallel_d` was evaluated at a zero (or non-finite value) of a
    /// subgraph interior determinant; use [`parallel_phi_nn`], which clears
    /// the denominators.
    DeltaZero,
    /// `parallel_m_phi_nn` / `join_parallel_many` need at least two arms.
    MNotAtLeastTwo,
}

impl fmt::Display for ComposeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComposeError::Graph(e) => write!(f, "{e}"),
            ComposeError::TwoPort(e) => write!(f, "{e}"),
            ComposeError::DeltaZero => {
                write!(f, "interior determinant vanishes here; use the cleared parallel form")
            }
            ComposeError::MNotAtLeastTwo => {
                write!(f, "parallel connection needs at least two subgraphs")
            }
        }
    }
}

impl From<GraphError> for ComposeError {
    fn from(e: GraphError) -> Self {
        ComposeError::Graph(e)
    }
}

impl From<TwoPortError> for ComposeError {
    fn from(e: TwoPortError) -> Self {
        ComposeError::TwoPort(e)
    }
}

/// Which vertices of the operands were identified when building a joined
/// graph.  Ids on the left of each pair refer to the operand ported graphs
/// (in their canonical labeling), ids on the right to the joined graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JoinProvenance {
    /// `v_out` of the first operand was identified with `v_in` of the
    /// second; the merged vertex (the cut vertex) is interior.
    Series { left_out: VertexId, right_in: VertexId, cut: VertexId },
    /// All operand in-ports were identified into `fused_in` and all
    /// out-ports into `fused_out`.
    Parallel { in_ports: Vec<VertexId>, out_ports: Vec<VertexId>, fused_in: VertexId, fused_out: VertexId },
}

/// A composed graph together with its (possibly interior) port vertices and
/// a record of the identification performed.
#[derive(Debug, Clone)]
pub struct JoinedGraph {
    graph: ValidatedGraph,
    v_in: VertexId,
    v_out: VertexId,
    provenance: JoinProvenance,
}

impl JoinedGraph {
    pub fn graph(&self) -> &ValidatedGraph {
        &self.graph
    }

    /// In-port of the composition: the outer in-port for a series join, the
    /// fused (interior) in-vertex for a parallel join.
    pub fn v_in(&self) -> VertexId {
        self.v_in
    }

    pub fn v_out(&self) -> VertexId {
        self.v_out
    }

    pub fn provenance(&self) -> &JoinProvenance {
        &self.provenance
    }
}

/// Series composition of two-port values at the same spectral point.
///
/// The interior determinant of the composition is not synthesized: the
/// returned `delta` is NaN so that any accidental downstream use is
/// conspicuous.  When a composed two-port feeds another composition,
/// recompute the determinant from the joined graph.
pub fn series_compose(tp1: &TwoPortValues, tp2: &TwoPortValues) -> TwoPortValues {
    debug_assert_eq!(tp1.z, tp2.z, "series composition requires a common spectral point");
    TwoPortValues {
        z: tp1.z,
        phi_dd: tp1.phi_dn * tp2.phi_dd + tp1.phi_dd * tp2.phi_nd,
        phi_dn: tp1.phi_dn * tp2.phi_dn + tp1.phi_dd * tp2.phi_nn,
        phi_nd: tp1.phi_nn * tp2.phi_dd + tp1.phi_nd * tp2.phi_nd,
        phi_nn: tp1.phi_nn * tp2.phi_dn + tp1.phi_nd * tp2.phi_nn,
        delta: f64::NAN,
    }
}

/// Both sides of the Lagrange-type identity for the series connection:
/// the defect of the composition and the product of the operand defects.
pub fn series_lagrange_check(tp1: &TwoPortValues, tp2: &TwoPortValues) -> (f64, f64) {
    let lhs = lagrange_defect(&series_compose(tp1, tp2));
    let rhs = lagrange_defect(tp1) * lagrange_defect(tp2);
    (lhs, rhs)
}

/// The three parallel-connection functions with a Dirichlet condition at
/// the fused in-vertex: `(phi_dd, phi_dn, phi_nd)`.
pub fn parallel_dirichlet_family(tp1: &TwoPortValues, tp2: &TwoPortValues) -> (f64, f64, f64) {
    debug_assert_eq!(tp1.z, tp2.z);
    (
        tp1.phi_dd * tp2.phi_dd,
        tp1.phi_dn * tp2.phi_dd + tp1.phi_dd * tp2.phi_dn,
        tp1.phi_nd * tp2.phi_dd + tp1.phi_dd * tp2.phi_nd,
    )
}

/// Determinant of the two-arm port system in ratio form.  Has poles at
/// zeros of the interior determinants; [`parallel_phi_nn`] is the cleared
/// (entire) variant.
pub fn parallel_d(tp1: &TwoPortValues, tp2: &TwoPortValues) -> Result<f64, ComposeError> {
    debug_assert_eq!(tp1.z, tp2.z);
    for d in [tp1.delta, tp2.delta] {
        if d == 0.0 || !d.is_finite() {
            return Err(ComposeError::DeltaZero);
        }
    }
    let (d1, d2) = (tp1.delta, tp2.delta);
    Ok(
        (tp1.phi_dd / d1 + tp2.phi_dd / d2) * (tp1.phi_nn / d1 + tp2.phi_nn / d2)
            - (tp1.phi_dn / d1 - tp2.phi_dn / d2) * (tp1.phi_nd / d1 - tp2.phi_nd / d2),
    )
}

/// Cleared numerator of the parallel-connection Neumann-Neumann function:
/// `delta_1 delta_2 * D` expanded so no division occurs.  Proportional to
/// the joined graph's Neumann-Neumann characteristic function.
pub fn parallel_phi_nn(tp1: &TwoPortValues, tp2: &TwoPortValues) -> f64 {
    debug_assert_eq!(tp1.z, tp2.z);
    let w1 = tp1.phi_dd * tp1.phi_nn - tp1.phi_nd * tp1.phi_dn;
    let w2 = tp2.phi_dd * tp2.phi_nn - tp2.phi_nd * tp2.phi_dn;
    let cross = tp1.phi_dd * tp2.phi_nn
        + tp1.phi_nn * tp2.phi_dd
        + tp1.phi_nd * tp2.phi_dn
        + tp1.phi_dn * tp2.phi_nd;
    w1 * tp2.delta * tp2.delta + w2 * tp1.delta * tp1.delta + cross * tp1.delta * tp2.delta
}

/// m-arm parallel connection: determinant of the cleared 2m x 2m port
/// system (continuity and Kirchhoff rows at the two fused vertices, with
/// per-arm unknowns pre-scaled by the arm interior determinants so every
/// entry is entire).  For m = 2 this equals [`parallel_phi_nn`].
pub fn parallel_m_phi_nn(tps: &[TwoPortValues]) -> Result<f64, ComposeError> {
    let m = tps.len();
    if m < 2 {
        return Err(ComposeError::MNotAtLeastTwo);
    }
    debug_assert!(tps.iter().all(|t| t.z == tps[0].z));
    // Unknown layout: columns 0..m hold the scaled launch-derivative
    // coefficients S_{1,j}, columns m..2m the scaled launch-value
    // coefficients S_{2,j}.
    let n = 2 * m;
    let mut sys = Matrix::zeros(n);
    let mut row = 0;
    // Kirchhoff at the fused in-vertex: sum_j delta_j S_{1,j} = 0.
    for (j, tp) in tps.iter().enumerate() {
        sys.set(row, j, tp.delta);
    }
    row += 1;
    // Continuity at the fused in-vertex against arm 1.
    for (j, tp) in tps.iter().enumerate().skip(1) {
        sys.set(row, m, tps[0].delta);
        sys.set(row, m + j, -tp.delta);
        row += 1;
    }
    // Continuity at the fused out-vertex against arm 1 (interior
    // determinants cancel after the scaling, leaving bare port values).
    for (j, tp) in tps.iter().enumerate().skip(1) {
        sys.set(row, 0, tps[0].phi_dd);
        sys.set(row, m, tps[0].phi_nd);
        sys.set(row, j, -tp.phi_dd);
        sys.set(row, m + j, -tp.phi_nd);
        row += 1;
    }
    // Kirchhoff at the fused out-vertex.
    for (j, tp) in tps.iter().enumerate() {
        sys.set(row, j, tp.phi_dn);
        sys.set(row, m + j, tp.phi_nn);
    }
    debug_assert_eq!(row + 1, n);
    Ok(sys.det())
}

/// Remap helper: assigns fresh contiguous vertex ids.
struct VertexAllocator {
    next: u32,
    vertices: Vec<Vertex>,
}

impl VertexAllocator {
    fn new() -> Self {
        VertexAllocator { next: 1, vertices: Vec::new() }
    }

    fn fresh(&mut self, condition: VertexCondition) -> VertexId {
        let id = VertexId(self.next);
        self.next += 1;
        self.vertices.push(Vertex { id, condition });
        id
    }
}

/// Identify `v_out` of `g1` with `v_in` of `g2`; the cut vertex becomes an
/// interior Kirchhoff vertex.  Edges of `g1` keep ids 1..g1, edges of `g2`
/// are shifted by g1, so the result's port edges are again 1 and g1+g2.
pub fn join_series(g1: &PortedGraph, g2: &PortedGraph) -> Result<JoinedGraph, ComposeError> {
    let mut alloc = VertexAllocator::new();
    let mut map1: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for v in g1.graph().vertices() {
        let cond = if v.id == g1.v_out() {
            VertexCondition::GeneralizedNeumann
        } else {
            v.condition
        };
        map1.insert(v.id, alloc.fresh(cond));
    }
    let cut = map1[&g1.v_out()];
    let mut map2: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    map2.insert(g2.v_in(), cut);
    for v in g2.graph().vertices() {
        if v.id != g2.v_in() {
            map2.insert(v.id, alloc.fresh(v.condition));
        }
    }

    let g1_count = g1.graph().edge_count() as u32;
    let mut edges: Vec<Edge> = Vec::new();
    for e in g1.graph().edges() {
        edges.push(Edge { id: e.id, from: map1[&e.from], to: map1[&e.to], ..e.clone() });
    }
    for e in g2.graph().edges() {
        edges.push(Edge {
            id: EdgeId(e.id.0 + g1_count),
            from: map2[&e.from],
            to: map2[&e.to],
            ..e.clone()
        });
    }

    let graph = MetricGraph { vertices: alloc.vertices, edges }.validate()?;
    Ok(JoinedGraph {
        graph,
        v_in: map1[&g1.v_in()],
        v_out: map2[&g2.v_out()],
        provenance: JoinProvenance::Series {
            left_out: g1.v_out(),
            right_in: g2.v_in(),
            cut,
        },
    })
}

/// Identify all in-ports into one interior vertex and all out-ports into
/// another.  Arm edges are relabeled consecutively arm by arm.
pub fn join_parallel_many(arms: &[&PortedGraph]) -> Result<JoinedGraph, ComposeError> {
    if arms.len() < 2 {
        return Err(ComposeError::MNotAtLeastTwo);
    }
    let mut alloc = VertexAllocator::new();
    let fused_in = alloc.fresh(VertexCondition::GeneralizedNeumann);
    let fused_out = alloc.fresh(VertexCondition::GeneralizedNeumann);

    let mut edges: Vec<Edge> = Vec::new();
    let mut offset = 0u32;
    for arm in arms {
        let mut map: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        map.insert(arm.v_in(), fused_in);
        map.insert(arm.v_out(), fused_out);
        for v in arm.graph().vertices() {
            if v.id != arm.v_in() && v.id != arm.v_out() {
                map.insert(v.id, alloc.fresh(v.condition));
            }
        }
        for e in arm.graph().edges() {
            edges.push(Edge {
                id: EdgeId(e.id.0 + offset),
                from: map[&e.from],
                to: map[&e.to],
                ..e.clone()
            });
        }
        offset += arm.graph().edge_count() as u32;
    }

    let graph = MetricGraph { vertices: alloc.vertices, edges }.validate()?;
    Ok(JoinedGraph {
        graph,
        v_in: fused_in,
        v_out: fused_out,
        provenance: JoinProvenance::Parallel {
            in_ports: arms.iter().map(|a| a.v_in()).collect(),
            out_ports: arms.iter().map(|a| a.v_out()).collect(),
            fused_in,
            fused_out,
        },
    })
}

/// Two-arm parallel join.
pub fn join_parallel(g1: &PortedGraph, g2: &PortedGraph) -> Result<JoinedGraph, ComposeError> {
    join_parallel_many(&[g1, g2])
}
