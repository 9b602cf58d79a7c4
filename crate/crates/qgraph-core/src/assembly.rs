//! Assembly of the 2g x 2g characteristic matrix.
//!
//! On edge `j` the general solution is `y_j = B_j c_j + A_j s_j`; every
//! vertex condition becomes a linear row in the unknowns
//! `(B_1..B_g, A_1..A_g)`.  The determinant of the assembled matrix is the
//! characteristic function: its zeros in `z` are the eigenvalues.
//!
//! Row and column order is canonical so determinant signs are reproducible:
//! columns are `B_1..B_g` then `A_1..A_g`; rows are grouped by vertex with
//! the root block first and the rest in ascending vertex id.  Within a
//! vertex: continuity rows chaining the incident slots in (edge id, end)
//! order - each row is `value(next slot) - value(previous slot)` - followed
//! by the Kirchhoff (or value) row.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{EdgeEnd, EdgeId, GraphError, Slot, ValidatedGraph, VertexCondition, VertexId};
use crate::linalg::Matrix;
use crate::solutions::{fundamental_pair, FundamentalPair, SolutionError, SpectralPoint};

/// Condition imposed at the root (or at overridden port vertices).
///
/// At a pendant vertex these reduce to the ordinary Neumann/Dirichlet
/// boundary conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    /// Continuity plus Kirchhoff flux balance.
    GeneralizedNeumann,
    /// Continuity plus vanishing of the vertex value.
    GeneralizedDirichlet,
}

/// Which condition produced a row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RowLabel {
    /// Pendant boundary condition (Dirichlet/Neumann/Robin or a port
    /// override).
    Boundary { vertex: VertexId },
    /// Continuity between two incident slots of an interior vertex.
    Continuity { vertex: VertexId, first: Slot, second: Slot },
    /// Kirchhoff flux balance of an interior vertex.
    Kirchhoff { vertex: VertexId },
    /// Vertex-value row of a generalized Dirichlet condition.
    Value { vertex: VertexId },
}

/// Which unknown a column holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColLabel {
    /// Coefficient `B_j` of the cosine-type solution on edge j.
    CosCoeff(EdgeId),
    /// Coefficient `A_j` of the sine-type solution on edge j.
    SinCoeff(EdgeId),
}

/// Assembled characteristic matrix with row/column provenance.
#[derive(Debug, Clone)]
pub struct CharMatrix {
    pub entries: Matrix,
    pub row_labels: Vec<RowLabel>,
    pub col_labels: Vec<ColLabel>,
}

impl CharMatrix {
    pub fn det(&self) -> f64 {
        self.entries.det()
    }

    pub fn find_row(&self, label: &RowLabel) -> Option<usize> {
        self.row_labels.iter().position(|l| l == label)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AssembleError {
    Graph(GraphError),
    Solution(SolutionError),
    UnknownVertex(VertexId),
}

impl fmt::Display for AssembleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssembleError::Graph(e) => write!(f, "{e}"),
            AssembleError::Solution(e) => write!(f, "{e}"),
            AssembleError::UnknownVertex(v) => write!(f, "unknown vertex {v}"),
        }
    }
}

impl From<GraphError> for AssembleError {
    fn from(e: GraphError) -> Self {
        AssembleError::Graph(e)
    }
}

impl From<SolutionError> for AssembleError {
    fn from(e: SolutionError) -> Self {
        AssembleError::Solution(e)
    }
}

/// Assemble with the root condition replaced by `kind`.
///
/// The graph is first re-oriented so all edges at the root point away from
/// it, matching the canonical form the determinant identities are stated in.
pub fn assemble(
    graph: &ValidatedGraph,
    root: VertexId,
    kind: RootKind,
    z: SpectralPoint,
    tol: f64,
) -> Result<CharMatrix, AssembleError> {
    assemble_with_overrides(graph, root, &[(root, kind)], z, tol)
}

/// Assemble with conditions replaced at several vertices (the root and, for
/// two-port work, the ports).  The root block still comes first; it is
/// re-oriented to outgoing edges even when not overridden.
pub fn assemble_with_overrides(
    graph: &ValidatedGraph,
    root: VertexId,
    overrides: &[(VertexId, RootKind)],
    z: SpectralPoint,
    tol: f64,
) -> Result<CharMatrix, AssembleError> {
    if graph.vertex(root).is_none() {
        return Err(AssembleError::UnknownVertex(root));
    }
    for (v, _) in overrides {
        if graph.vertex(*v).is_none() {
            return Err(AssembleError::UnknownVertex(*v));
        }
    }
    let normalized = graph.graph().normalize_root_orientation(root)?.validate()?;
    let over: BTreeMap<VertexId, RootKind> = overrides.iter().copied().collect();

    let g = normalized.edge_count();
    let mut edge_ids: Vec<EdgeId> = normalized.edges().iter().map(|e| e.id).collect();
    edge_ids.sort();
    let col_of_b: BTreeMap<EdgeId, usize> =
        edge_ids.iter().enumerate().map(|(i, e)| (*e, i)).collect();

    let mut pairs: BTreeMap<EdgeId, FundamentalPair> = BTreeMap::new();
    for e in normalized.edges() {
        pairs.insert(e.id, fundamental_pair(e, z, tol)?);
    }

    let mut col_labels = Vec::with_capacity(2 * g);
    for e in &edge_ids {
        col_labels.push(ColLabel::CosCoeff(*e));
    }
    for e in &edge_ids {
        col_labels.push(ColLabel::SinCoeff(*e));
    }

    let mut vertex_order: Vec<VertexId> = normalized.vertices().iter().map(|v| v.id).collect();
    vertex_order.sort();
    vertex_order.retain(|v| *v != root);
    vertex_order.insert(0, root);

    let mut entries = Matrix::zeros(2 * g);
    let mut row_labels = Vec::with_capacity(2 * g);
    let mut row = 0usize;

    // Coefficients of the value / outgoing-flux of a slot, as (column, coeff).
    let value_coeffs = |slot: Slot| -> [(usize, f64); 2] {
        let b = col_of_b[&slot.edge];
        match slot.end {
            EdgeEnd::Start => [(b, 1.0), (g + b, 0.0)],
            EdgeEnd::End => {
                let p = pairs[&slot.edge];
                [(b, p.c), (g + b, p.s)]
            }
        }
    };
    // Contribution of a slot to the Kirchhoff balance
    // sum_outgoing y'(0) - sum_incoming y'(l).
    let flux_coeffs = |slot: Slot| -> [(usize, f64); 2] {
        let b = col_of_b[&slot.edge];
        match slot.end {
            EdgeEnd::Start => [(b, 0.0), (g + b, 1.0)],
            EdgeEnd::End => {
                let p = pairs[&slot.edge];
                [(b, -p.c_prime), (g + b, -p.s_prime)]
            }
        }
    };

    for v in vertex_order {
        let slots = normalized.slots(v);
        let stored = normalized.vertex(v).expect("validated vertex").condition;
        let effective: Option<RootKind> = over.get(&v).copied();

        let interior_kind = match effective {
            Some(k) if slots.len() > 1 => Some(k),
            None if stored == VertexCondition::GeneralizedNeumann => {
                Some(RootKind::GeneralizedNeumann)
            }
            _ => None,
        };

        if let Some(kind) = interior_kind {
            // d-1 continuity rows: value(next) - value(previous).
            for w in slots.windows(2) {
                for (col, coeff) in value_coeffs(w[1]) {
                    entries.set(row, col, entries.get(row, col) + coeff);
                }
                for (col, coeff) in value_coeffs(w[0]) {
                    entries.set(row, col, entries.get(row, col) - coeff);
                }
                row_labels.push(RowLabel::Continuity { vertex: v, first: w[0], second: w[1] });
                row += 1;
            }
            match kind {
                RootKind::GeneralizedNeumann => {
                    for slot in slots {
                        for (col, coeff) in flux_coeffs(*slot) {
                            entries.set(row, col, entries.get(row, col) + coeff);
                        }
                    }
                    row_labels.push(RowLabel::Kirchhoff { vertex: v });
                }
                RootKind::GeneralizedDirichlet => {
                    for (col, coeff) in value_coeffs(slots[0]) {
                        entries.set(row, col, entries.get(row, col) + coeff);
                    }
                    row_labels.push(RowLabel::Value { vertex: v });
                }
            }
            row += 1;
        } else {
            // Pendant boundary row.  Port overrides reduce to the plain
            // Dirichlet/Neumann condition here.
            let slot = slots[0];
            let beta = match effective {
                Some(RootKind::GeneralizedDirichlet) => None,
                Some(RootKind::GeneralizedNeumann) => Some(0.0),
                None => match stored {
                    VertexCondition::Dirichlet => None,
                    VertexCondition::Neumann => Some(0.0),
                    VertexCondition::Robin { beta } => Some(beta),
                    VertexCondition::GeneralizedNeumann => unreachable!("validated pendant"),
                },
            };
            match beta {
                None => {
                    for (col, coeff) in value_coeffs(slot) {
                        entries.set(row, col, entries.get(row, col) + coeff);
                    }
                }
                Some(beta) => {
                    // Robin couples beta to the derivative pointing into the
                    // edge: A + beta B at x=0, (c'-beta c)B + (s'-beta s)A
                    // at x=l.  beta = 0 is the plain Neumann row.
                    let b = col_of_b[&slot.edge];
                    match slot.end {
                        EdgeEnd::Start => {
                            entries.set(row, b, beta);
                            entries.set(row, g + b, 1.0);
                        }
                        EdgeEnd::End => {
                            let p = pairs[&slot.edge];
                            entries.set(row, b, p.c_prime - beta * p.c);
                            entries.set(row, g + b, p.s_prime - beta * p.s);
                        }
                    }
                }
            }
            row_labels.push(RowLabel::Boundary { vertex: v });
            row += 1;
        }
    }
    debug_assert_eq!(row, 2 * g, "handshake: rows must total 2g");

    for i in 0..2 * g {
        assert!(
            entries.row(i).iter().any(|x| *x != 0.0),
            "degenerate all-zero condition row (row {i})"
        );
    }

    Ok(CharMatrix { entries, row_labels, col_labels })
}

/// Characteristic function: determinant of the assembled matrix.
pub fn phi(
    graph: &ValidatedGraph,
    root: VertexId,
    kind: RootKind,
    z: SpectralPoint,
    tol: f64,
) -> Result<f64, AssembleError> {
    Ok(assemble(graph, root, kind, z, tol)?.det())
}
