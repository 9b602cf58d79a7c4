//! Characteristic functions and spectra of Sturm-Liouville problems on
//! compact metric graphs.
//!
//! A metric graph is a combinatorial graph whose edges carry lengths; on each
//! edge `[0, l_j]` we consider `-y'' + q_j(x) y = z y` with matching
//! conditions at the vertices.  Everything here works in the real spectral
//! parameter `z = lambda^2`, which keeps all arithmetic real for self-adjoint
//! problems.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] - metric-graph data model and validation,
//! * [`solutions`] - fundamental solutions of the edge equation,
//! * [`assembly`] - the vertex-condition determinant (characteristic matrix),
//! * [`two_port`] - graphs with a distinguished input/output pendant pair,
//! * [`compose`] - series and parallel connection of two-ports,
//! * [`spectrum`] - root scanning for characteristic functions.
//!
//! The library is `no_std` + `alloc`; IO and file formats live in the
//! companion CLI crate.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod assembly;
pub mod compose;
pub mod graph;
pub mod linalg;
pub mod solutions;
pub mod spectrum;
pub mod two_port;

pub use graph::{Edge, EdgeEnd, EdgeId, MetricGraph, PotentialSpec, ValidatedGraph, Vertex, VertexCondition, VertexId};
pub use solutions::{FundamentalPair, SpectralPoint};
