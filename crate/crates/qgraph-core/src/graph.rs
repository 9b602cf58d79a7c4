//! Metric-graph data model: vertices with matching conditions, directed
//! edges with lengths and potentials, and structural validation.
//!
//! Edge direction fixes the local coordinate (`x = 0` at `from`, `x = length`
//! at `to`); it carries no physical meaning, and [`reverse_edge`] produces an
//! equivalent graph with the coordinate flipped.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Caller-assigned vertex identifier.  Unique within a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

/// Edge identifier.  A valid graph with `g` edges uses ids `1..=g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Condition imposed at a vertex.
///
/// Pendant (degree-1) vertices take `Dirichlet`, `Neumann` or `Robin`;
/// interior vertices take `GeneralizedNeumann` (continuity plus a Kirchhoff
/// balance of outgoing derivatives).  `Neumann` compares equal to
/// `Robin { beta: 0.0 }`.
#[derive(Debug, Clone, Copy)]
pub enum VertexCondition {
    /// `y = 0`.
    Dirichlet,
    /// `y' = 0` (derivative pointing into the edge).
    Neumann,
    /// `y' + beta * y = 0` with the derivative pointing into the edge.
    Robin { beta: f64 },
    /// Continuity across all incident edges plus Kirchhoff flux balance.
    GeneralizedNeumann,
}

impl VertexCondition {
    fn key(&self) -> (u8, f64) {
        match self {
            VertexCondition::Dirichlet => (0, 0.0),
            VertexCondition::Neumann => (2, 0.0),
            VertexCondition::Robin { beta } => (2, *beta),
            VertexCondition::GeneralizedNeumann => (3, 0.0),
        }
    }

    /// True for the conditions admissible at a pendant vertex.
    pub fn is_boundary(&self) -> bool {
        !matches!(self, VertexCondition::GeneralizedNeumann)
    }
}

impl PartialEq for VertexCondition {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

/// Potential `q(x)` on one edge, in local coordinates `[0, length]`.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    /// `q = 0` everywhere.
    Zero,
    /// `q = q0` everywhere.
    Constant(f64),
    /// Piecewise-constant: `values[i]` holds on the i-th subinterval cut by
    /// the strictly increasing interior `breakpoints`
    /// (`values.len() == breakpoints.len() + 1`).
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// Piecewise-linear interpolation through `(grid[i], values[i])` with
    /// strictly increasing `grid`; constant extrapolation outside the grid
    /// span.
    Sampled { grid: Vec<f64>, values: Vec<f64> },
}

impl PotentialSpec {
    /// The potential of the reversed edge: `q~(x) = q(length - x)`.
    pub fn reflected(&self, length: f64) -> PotentialSpec {
        match self {
            PotentialSpec::Zero => PotentialSpec::Zero,
            PotentialSpec::Constant(q) => PotentialSpec::Constant(*q),
            PotentialSpec::PiecewiseConstant { breakpoints, values } => {
                let breakpoints = breakpoints.iter().rev().map(|b| length - b).collect();
                let values = values.iter().rev().copied().collect();
                PotentialSpec::PiecewiseConstant { breakpoints, values }
            }
            PotentialSpec::Sampled { grid, values } => {
                let grid = grid.iter().rev().map(|x| length - x).collect();
                let values = values.iter().rev().copied().collect();
                PotentialSpec::Sampled { grid, values }
            }
        }
    }
}

/// Directed edge: local coordinate runs from `from` (x = 0) to `to`
/// (x = length).
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: EdgeId,
    pub from: VertexId,
    pub to: VertexId,
    pub length: f64,
    pub potential: PotentialSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: VertexId,
    pub condition: VertexCondition,
}

/// Raw metric graph, prior to validation.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

/// Which end of an edge a vertex sits at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeEnd {
    /// `x = 0` (the `from` end).
    Start,
    /// `x = length` (the `to` end).
    End,
}

/// One incidence of an edge at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Slot {
    pub edge: EdgeId,
    pub end: EdgeEnd,
}

/// Structural problems detected by [`MetricGraph::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum GraphError {
    /// The graph has no edges at all.
    Empty,
    /// The underlying graph is not connected.
    Disconnected,
    /// An edge has length <= 0 or a non-finite length.
    NonpositiveLength(EdgeId),
    /// An interior vertex carries a pendant-style condition; it needs the
    /// generalized Neumann matching condition.
    MissingBoundaryCondition(VertexId),
    /// A pendant vertex carries the generalized Neumann interior condition
    /// instead of a Dirichlet/Neumann/Robin boundary condition.
    InteriorConditionOnPendant(VertexId),
    /// A vertex or edge id occurs twice.
    DuplicateId(String),
    /// Edge ids do not form the contiguous range `1..=g`.
    NonContiguousEdgeIds,
    /// An edge endpoint references a vertex that does not exist.
    UnknownVertex(VertexId),
    /// An operation referenced an edge id that does not exist.
    UnknownEdge(EdgeId),
    /// A potential description is malformed (message says how).
    InvalidPotential(EdgeId, String),
    /// A Robin coefficient (or other parameter) is not finite.
    NonFiniteParameter(VertexId),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::Empty => write!(f, "graph has no edges"),
            GraphError::Disconnected => write!(f, "graph is not connected"),
            GraphError::NonpositiveLength(e) => {
                write!(f, "edge {e} must have a finite positive length")
            }
            GraphError::MissingBoundaryCondition(v) => write!(
                f,
                "interior vertex {v} must carry the generalized Neumann condition"
            ),
            GraphError::InteriorConditionOnPendant(v) => write!(
                f,
                "pendant vertex {v} needs a Dirichlet, Neumann or Robin boundary condition"
            ),
            GraphError::DuplicateId(which) => write!(f, "duplicate id: {which}"),
            GraphError::NonContiguousEdgeIds => {
                write!(f, "edge ids must be exactly 1..=g for g edges")
            }
            GraphError::UnknownVertex(v) => write!(f, "edge endpoint references unknown vertex {v}"),
            GraphError::UnknownEdge(e) => write!(f, "unknown edge {e}"),
            GraphError::InvalidPotential(e, msg) => write!(f, "invalid potential on edge {e}: {msg}"),
            GraphError::NonFiniteParameter(v) => {
                write!(f, "vertex {v} has a non-finite condition parameter")
            }
        }
    }
}

fn check_potential(edge: &Edge) -> Result<(), GraphError> {
    let bad = |msg: &str| GraphError::InvalidPotential(edge.id, String::from(msg));
    match &edge.potential {
        PotentialSpec::Zero => Ok(()),
        PotentialSpec::Constant(q) => {
            if q.is_finite() {
                Ok(())
            } else {
                Err(bad("constant value must be finite"))
            }
        }
        PotentialSpec::PiecewiseConstant { breakpoints, values } => {
            if values.len() != breakpoints.len() + 1 {
                return Err(bad("need exactly one more value than breakpoints"));
            }
            if !values.iter().all(|v| v.is_finite()) {
                return Err(bad("values must be finite"));
            }
            for (i, b) in breakpoints.iter().enumerate() {
                if !b.is_finite() || *b <= 0.0 || *b >= edge.length {
                    return Err(bad("breakpoints must lie strictly inside (0, length)"));
                }
                if i > 0 && breakpoints[i - 1] >= *b {
                    return Err(bad("breakpoints must be strictly increasing"));
                }
            }
            Ok(())
        }
        PotentialSpec::Sampled { grid, values } => {
            if grid.is_empty() {
                return Err(bad("sample grid must be non-empty"));
            }
            if values.len() != grid.len() {
                return Err(bad("need one value per grid node"));
            }
            if !values.iter().all(|v| v.is_finite()) {
                return Err(bad("values must be finite"));
            }
            for (i, x) in grid.iter().enumerate() {
                if !x.is_finite() || *x < 0.0 || *x > edge.length {
                    return Err(bad("grid nodes must lie in [0, length]"));
                }
                if i > 0 && grid[i - 1] >= *x {
                    return Err(bad("grid nodes must be strictly increasing"));
                }
            }
            Ok(())
        }
    }
}

impl MetricGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Self {
        MetricGraph { vertices, edges }
    }

    /// Single edge of the given length between pendant vertices `v1` (x = 0)
    /// and `v2` (x = length).
    pub fn interval(
        length: f64,
        potential: PotentialSpec,
        at_start: VertexCondition,
        at_end: VertexCondition,
    ) -> Self {
        MetricGraph {
            vertices: alloc::vec![
                Vertex { id: VertexId(1), condition: at_start },
                Vertex { id: VertexId(2), condition: at_end },
            ],
            edges: alloc::vec![Edge {
                id: EdgeId(1),
                from: VertexId(1),
                to: VertexId(2),
                length,
                potential,
            }],
        }
    }

    /// Path of consecutive edges; vertex `i+1` joins edge `i` to edge `i+1`.
    /// Interior vertices get the generalized Neumann condition.
    pub fn path(
        segments: &[(f64, PotentialSpec)],
        at_first: VertexCondition,
        at_last: VertexCondition,
    ) -> Self {
        let n = segments.len();
        assert!(n >= 1, "a path needs at least one segment");
        let mut vertices = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let condition = if i == 0 {
                at_first
            } else if i == n {
                at_last
            } else {
                VertexCondition::GeneralizedNeumann
            };
            vertices.push(Vertex { id: VertexId(i as u32 + 1), condition });
        }
        let edges = segments
            .iter()
            .enumerate()
            .map(|(i, (length, potential))| Edge {
                id: EdgeId(i as u32 + 1),
                from: VertexId(i as u32 + 1),
                to: VertexId(i as u32 + 2),
                length: *length,
                potential: potential.clone(),
            })
            .collect();
        MetricGraph { vertices, edges }
    }

    /// Star: all edges run from the common centre (vertex 1, generalized
    /// Neumann) to pendant tips (vertices 2..) with the given conditions.
    pub fn star(legs: &[(f64, PotentialSpec, VertexCondition)]) -> Self {
        let n = legs.len();
        assert!(n >= 1, "a star needs at least one leg");
        let mut vertices = Vec::with_capacity(n + 1);
        vertices.push(Vertex {
            id: VertexId(1),
            condition: VertexCondition::GeneralizedNeumann,
        });
        let mut edges = Vec::with_capacity(n);
        for (i, (length, potential, condition)) in legs.iter().enumerate() {
            let tip = VertexId(i as u32 + 2);
            vertices.push(Vertex { id: tip, condition: *condition });
            edges.push(Edge {
                id: EdgeId(i as u32 + 1),
                from: VertexId(1),
                to: tip,
                length: *length,
                potential: potential.clone(),
            });
        }
        MetricGraph { vertices, edges }
    }

    fn vertex_index(&self, v: VertexId) -> Option<usize> {
        self.vertices.iter().position(|vx| vx.id == v)
    }

    fn edge_index(&self, e: EdgeId) -> Option<usize> {
        self.edges.iter().position(|ed| ed.id == e)
    }

    /// Check structure and conditions, producing a [`ValidatedGraph`] with
    /// cached incidence data.
    pub fn validate(self) -> Result<ValidatedGraph, GraphError> {
        if self.edges.is_empty() {
            return Err(GraphError::Empty);
        }

        let mut seen_v = BTreeMap::new();
        for v in &self.vertices {
            if seen_v.insert(v.id, ()).is_some() {
                return Err(GraphError::DuplicateId(alloc::format!("{}", v.id)));
            }
            if let VertexCondition::Robin { beta } = v.condition {
                if !beta.is_finite() {
                    return Err(GraphError::NonFiniteParameter(v.id));
                }
            }
        }

        let g = self.edges.len() as u32;
        let mut seen_e = BTreeMap::new();
        for e in &self.edges {
            if seen_e.insert(e.id, ()).is_some() {
                return Err(GraphError::DuplicateId(alloc::format!("{}", e.id)));
            }
            if e.id.0 < 1 || e.id.0 > g {
                return Err(GraphError::NonContiguousEdgeIds);
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(GraphError::NonpositiveLength(e.id));
            }
            for v in [e.from, e.to] {
                if !seen_v.contains_key(&v) {
                    return Err(GraphError::UnknownVertex(v));
                }
            }
            check_potential(e)?;
        }

        // Incidence map: vertex -> slots sorted by (edge id, Start before End).
        let mut slots: BTreeMap<VertexId, Vec<Slot>> = BTreeMap::new();
        for v in &self.vertices {
            slots.insert(v.id, Vec::new());
        }
        for e in &self.edges {
            slots.get_mut(&e.from).unwrap().push(Slot { edge: e.id, end: EdgeEnd::Start });
            slots.get_mut(&e.to).unwrap().push(Slot { edge: e.id, end: EdgeEnd::End });
        }
        for list in slots.values_mut() {
            list.sort();
        }

        // Connectivity over the undirected support (isolated vertices count
        // as disconnected).
        let mut stack = alloc::vec![self.edges[0].from];
        let mut reached: BTreeMap<VertexId, ()> = BTreeMap::new();
        reached.insert(self.edges[0].from, ());
        while let Some(v) = stack.pop() {
            for slot in &slots[&v] {
                let e = &self.edges[self.edge_index(slot.edge).unwrap()];
                let other = if e.from == v { e.to } else { e.from };
                if reached.insert(other, ()).is_none() {
                    stack.push(other);
                }
            }
        }
        if reached.len() != self.vertices.len() {
            return Err(GraphError::Disconnected);
        }

        // Degree-appropriate conditions.  A loop edge contributes 2 to the
        // degree of its vertex.
        for v in &self.vertices {
            let degree = slots[&v.id].len();
            let boundary = v.condition.is_boundary();
            if degree == 1 && !boundary {
                return Err(GraphError::InteriorConditionOnPendant(v.id));
            }
            if degree > 1 && boundary {
                return Err(GraphError::MissingBoundaryCondition(v.id));
            }
        }

        let total_length = self.edges.iter().map(|e| e.length).sum();
        Ok(ValidatedGraph { graph: self, slots, total_length })
    }

    /// Reverse the local coordinate of one edge: swap its endpoints and
    /// reflect its potential.  The spectral problem is unchanged.
    pub fn reverse_edge(&self, id: EdgeId) -> Result<MetricGraph, GraphError> {
        let idx = self.edge_index(id).ok_or(GraphError::UnknownEdge(id))?;
        let mut out = self.clone();
        let e = &mut out.edges[idx];
        core::mem::swap(&mut e.from, &mut e.to);
        e.potential = e.potential.reflected(e.length);
        Ok(out)
    }

    /// Reverse edges as needed so that every edge incident to `root` points
    /// away from it (loops at `root` are left alone).
    pub fn normalize_root_orientation(&self, root: VertexId) -> Result<MetricGraph, GraphError> {
        self.vertex_index(root).ok_or(GraphError::UnknownVertex(root))?;
        let mut out = self.clone();
        for i in 0..out.edges.len() {
            let e = &out.edges[i];
            if e.to == root && e.from != root {
                out = out.reverse_edge(e.id)?;
            }
        }
        Ok(out)
    }
}

/// A structurally valid graph plus cached incidence data.
#[derive(Debug, Clone)]
pub struct ValidatedGraph {
    graph: MetricGraph,
    slots: BTreeMap<VertexId, Vec<Slot>>,
    total_length: f64,
}

impl ValidatedGraph {
    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.graph.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.graph.edges
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edges.len()
    }

    /// Sum of all edge lengths.
    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.graph.edges[self.graph.edge_index(id).expect("edge id of a validated graph")]
    }

    pub fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.graph.vertices.iter().find(|v| v.id == id)
    }

    /// Incidences at `v`, sorted by (edge id, Start before End).
    pub fn slots(&self, v: VertexId) -> &[Slot] {
        &self.slots[&v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.slots[&v].len()
    }

    pub fn is_pendant(&self, v: VertexId) -> bool {
        self.degree(v) == 1
    }

    /// Discard the cached data and return the plain graph.
    pub fn into_graph(self) -> MetricGraph {
        self.graph
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_interval() -> MetricGraph {
        MetricGraph::interval(
            1.0,
            PotentialSpec::Zero,
            VertexCondition::Dirichlet,
            VertexCondition::Dirichlet,
        )
    }

    #[test]
    fn neumann_equals_robin_zero() {
        assert_eq!(VertexCondition::Neumann, VertexCondition::Robin { beta: 0.0 });
        assert_ne!(VertexCondition::Neumann, VertexCondition::Robin { beta: 0.1 });
        assert_ne!(VertexCondition::Dirichlet, VertexCondition::Neumann);
    }

    #[test]
    fn single_edge_validates() {
        let vg = unit_interval().validate().unwrap();
        assert_eq!(vg.edge_count(), 1);
        assert_eq!(vg.total_length(), 1.0);
        assert!(vg.is_pendant(VertexId(1)));
        assert_eq!(
            vg.slots(VertexId(1)),
            &[Slot { edge: EdgeId(1), end: EdgeEnd::Start }]
        );
        assert_eq!(
            vg.slots(VertexId(2)),
            &[Slot { edge: EdgeId(1), end: EdgeEnd::End }]
        );
    }

    #[test]
    fn three_edge_path_with_robin_tip() {
        let g = MetricGraph::path(
            &[
                (1.0, PotentialSpec::Zero),
                (0.5, PotentialSpec::Constant(2.0)),
                (1.5, PotentialSpec::Zero),
            ],
            VertexCondition::Dirichlet,
            VertexCondition::Robin { beta: -1.0 },
        );
        let vg = g.validate().unwrap();
        assert_eq!(vg.total_length(), 3.0);
        assert_eq!(vg.degree(VertexId(2)), 2);
        assert_eq!(vg.degree(VertexId(3)), 2);
        assert_eq!(
            vg.vertex(VertexId(2)).unwrap().condition,
            VertexCondition::GeneralizedNeumann
        );
    }

    #[test]
    fn disconnected_rejected() {
        let mut g = unit_interval();
        g.vertices.push(Vertex { id: VertexId(3), condition: VertexCondition::Dirichlet });
        g.vertices.push(Vertex { id: VertexId(4), condition: VertexCondition::Dirichlet });
        g.edges.push(Edge {
            id: EdgeId(2),
            from: VertexId(3),
            to: VertexId(4),
            length: 1.0,
            potential: PotentialSpec::Zero,
        });
        assert_eq!(g.validate().unwrap_err(), GraphError::Disconnected);
    }

    #[test]
    fn duplicate_vertex_id_rejected() {
        let mut g = unit_interval();
        g.vertices.push(Vertex { id: VertexId(2), condition: VertexCondition::Dirichlet });
        assert!(matches!(g.validate().unwrap_err(), GraphError::DuplicateId(_)));
    }

    #[test]
    fn nonpositive_length_rejected() {
        let mut g = unit_interval();
        g.edges[0].length = 0.0;
        assert_eq!(g.validate().unwrap_err(), GraphError::NonpositiveLength(EdgeId(1)));
    }

    #[test]
    fn edge_ids_must_be_contiguous() {
        let mut g = unit_interval();
        g.edges[0].id = EdgeId(2);
        assert_eq!(g.validate().unwrap_err(), GraphError::NonContiguousEdgeIds);
    }

    #[test]
    fn interior_condition_on_pendant_rejected() {
        let mut g = unit_interval();
        g.vertices[1].condition = VertexCondition::GeneralizedNeumann;
        assert_eq!(
            g.validate().unwrap_err(),
            GraphError::InteriorConditionOnPendant(VertexId(2))
        );
    }

    #[test]
    fn boundary_condition_on_interior_rejected() {
        let mut g = MetricGraph::path(
            &[(1.0, PotentialSpec::Zero), (1.0, PotentialSpec::Zero)],
            VertexCondition::Dirichlet,
            VertexCondition::Dirichlet,
        );
        g.vertices[1].condition = VertexCondition::Robin { beta: 1.0 };
        assert_eq!(
            g.validate().unwrap_err(),
            GraphError::MissingBoundaryCondition(VertexId(2))
        );
    }

    #[test]
    fn loop_vertex_is_interior() {
        // Single loop: both ends of the edge at one vertex of degree 2.
        let g = MetricGraph {
            vertices: alloc::vec![Vertex {
                id: VertexId(1),
                condition: VertexCondition::GeneralizedNeumann,
            }],
            edges: alloc::vec![Edge {
                id: EdgeId(1),
                from: VertexId(1),
                to: VertexId(1),
                length: 2.0,
                potential: PotentialSpec::Zero,
            }],
        };
        let vg = g.validate().unwrap();
        assert_eq!(vg.degree(VertexId(1)), 2);
        assert_eq!(
            vg.slots(VertexId(1)),
            &[
                Slot { edge: EdgeId(1), end: EdgeEnd::Start },
                Slot { edge: EdgeId(1), end: EdgeEnd::End },
            ]
        );
    }

    #[test]
    fn reverse_edge_reflects_piecewise_potential() {
        let mut g = unit_interval();
        g.edges[0].length = 1.0;
        g.edges[0].potential = PotentialSpec::PiecewiseConstant {
            breakpoints: alloc::vec![0.25],
            values: alloc::vec![3.0, -1.0],
        };
        let r = g.reverse_edge(EdgeId(1)).unwrap();
        assert_eq!(r.edges[0].from, VertexId(2));
        assert_eq!(r.edges[0].to, VertexId(1));
        assert_eq!(
            r.edges[0].potential,
            PotentialSpec::PiecewiseConstant {
                breakpoints: alloc::vec![0.75],
                values: alloc::vec![-1.0, 3.0],
            }
        );
    }

    #[test]
    fn reverse_edge_is_involutive() {
        let g = MetricGraph::interval(
            2.0,
            PotentialSpec::Sampled {
                grid: alloc::vec![0.0, 0.5, 2.0],
                values: alloc::vec![1.0, -2.0, 4.0],
            },
            VertexCondition::Neumann,
            VertexCondition::Dirichlet,
        );
        let back = g.reverse_edge(EdgeId(1)).unwrap().reverse_edge(EdgeId(1)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn normalize_root_orientation_points_edges_outward() {
        // Star with edges deliberately pointing into the centre.
        let g = MetricGraph {
            vertices: alloc::vec![
                Vertex { id: VertexId(1), condition: VertexCondition::GeneralizedNeumann },
                Vertex { id: VertexId(2), condition: VertexCondition::Dirichlet },
                Vertex { id: VertexId(3), condition: VertexCondition::Dirichlet },
            ],
            edges: alloc::vec![
                Edge {
                    id: EdgeId(1),
                    from: VertexId(2),
                    to: VertexId(1),
                    length: 1.0,
                    potential: PotentialSpec::Zero,
                },
                Edge {
                    id: EdgeId(2),
                    from: VertexId(1),
                    to: VertexId(3),
                    length: 1.0,
                    potential: PotentialSpec::Zero,
                },
            ],
        };
        let n = g.normalize_root_orientation(VertexId(1)).unwrap();
        assert_eq!(n.edges[0].from, VertexId(1));
        assert_eq!(n.edges[0].to, VertexId(2));
        assert_eq!(n.edges[1].from, VertexId(1));
        // Idempotent.
        assert_eq!(n.normalize_root_orientation(VertexId(1)).unwrap(), n);
    }

    #[test]
    fn invalid_potentials_rejected() {
        let mut g = unit_interval();
        g.edges[0].potential = PotentialSpec::PiecewiseConstant {
            breakpoints: alloc::vec![0.5, 0.25],
            values: alloc::vec![1.0, 2.0, 3.0],
        };
        assert!(matches!(
            g.validate().unwrap_err(),
            GraphError::InvalidPotential(EdgeId(1), _)
        ));

        let mut g2 = unit_interval();
        g2.edges[0].potential = PotentialSpec::Sampled {
            grid: alloc::vec![0.0, 1.5],
            values: alloc::vec![1.0, 2.0],
        };
        assert!(matches!(
            g2.validate().unwrap_err(),
            GraphError::InvalidPotential(EdgeId(1), _)
        ));
    }
}
