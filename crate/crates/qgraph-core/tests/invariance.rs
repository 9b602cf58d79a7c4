//! Cross-module invariance checks: the located spectrum of a graph must not
//! depend on presentation choices (edge orientation, root placement) that
//! rescale the characteristic determinant without moving its zeros.

use qgraph_core::assembly::{phi, RootKind};
use qgraph_core::graph::{MetricGraph, PotentialSpec, VertexCondition, VertexId};
use qgraph_core::solutions::SpectralPoint;
use qgraph_core::spectrum::{find_roots, ScanOptions};

const TOL: f64 = 1e-10;

/// Star with mixed potentials, a Robin tip, and enough asymmetry to make
/// accidental agreement implausible.
fn lopsided_star() -> MetricGraph {
    MetricGraph::star(&[
        (0.9, PotentialSpec::Constant(1.2), VertexCondition::Dirichlet),
        (1.4, PotentialSpec::Zero, VertexCondition::Robin { beta: 0.8 }),
        (
            0.6,
            PotentialSpec::PiecewiseConstant {
                breakpoints: vec![0.3],
                values: vec![-2.0, 1.0],
            },
            VertexCondition::Neumann,
        ),
    ])
}

fn roots_of(graph: &MetricGraph, root: VertexId) -> Vec<f64> {
    let vg = graph.clone().validate().expect("valid graph");
    let f = |z: f64| phi(&vg, root, RootKind::GeneralizedNeumann, SpectralPoint(z), TOL).unwrap();
    let opts = ScanOptions::new(-4.0, 60.0, 6000);
    find_roots(f, &opts).into_iter().map(|r| r.z).collect()
}

fn assert_same_zero_set(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len(), "root counts differ: {a:?} vs {b:?}");
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() <= tol, "roots drifted: {x} vs {y}");
    }
}

#[test]
fn spectrum_invariant_under_edge_reversal() {
    let base = lopsided_star();
    let reference = roots_of(&base, VertexId(1));
    assert!(reference.len() >= 4, "expected several eigenvalues, got {reference:?}");
    for edge in 1..=3u32 {
        let reversed = base.reverse_edge(qgraph_core::graph::EdgeId(edge)).unwrap();
        let roots = roots_of(&reversed, VertexId(1));
        assert_same_zero_set(&reference, &roots, 1e-8);
    }
}

#[test]
fn spectrum_invariant_under_root_relocation() {
    // A 4-vertex path has two interior vertices to root at; pendants keep
    // their own conditions.
    let path = MetricGraph::path(
        &[
            (1.0, PotentialSpec::Constant(-1.0)),
            (0.7, PotentialSpec::Zero),
            (1.3, PotentialSpec::Constant(2.0)),
        ],
        VertexCondition::Robin { beta: -0.5 },
        VertexCondition::Dirichlet,
    );
    let at_v2 = roots_of(&path, VertexId(2));
    let at_v3 = roots_of(&path, VertexId(3));
    assert!(at_v2.len() >= 4);
    assert_same_zero_set(&at_v2, &at_v3, 1e-8);
}
