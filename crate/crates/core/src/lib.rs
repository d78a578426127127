//! Exact distortion invariants of glued graph-of-geometrics 3-manifolds.
//!
//! Every computation in this crate is carried out in exact rational or integer
//! arithmetic. Real-valued quantities (roots of discriminants, the `sinh` factor
//! of the distortion budget) are never materialized internally; they are kept
//! as exact data and only printed through decimal enclosures.

#![allow(clippy::needless_range_loop)]

pub mod decomposition_graph;
pub mod error;
pub mod exact_lattice;
pub mod geometric_pieces;
pub mod gluing_engine;
pub mod rational;
pub mod samples;
pub mod schema;
pub mod seifert_arithmetic;
pub mod shearing_enumerator;
pub mod torus_mapping_class;

pub use decomposition_graph::{
    entire_double_cover, loopless_double_cover, select_component, CoverMap, DecompGraph, EdgeKind,
    EdgeOrigin, EdgeRecord, EndRef, VertexKind, VertexRecord,
};
pub use error::{Error, Result};
pub use exact_lattice::{discriminant, dominates, enumerate_small_sublattices, QForm, Sublattice};
pub use geometric_pieces::{HyperbolicPieceData, Piece, SeifertPieceData, SeifertTorus};
pub use gluing_engine::{
    build_qphi, distortion_report, edge_distortion, entire_cover, is_nondegenerate, loopless_cover,
    primary_distortion, vertex_distortion, DistortionReport, DistortionValue, Gluing, PreglueGraph,
};
pub use rational::Q;
pub use schema::ManifoldDocument;
pub use seifert_arithmetic::{DominationBudget, SeifertInvariants};
pub use shearing_enumerator::{enumerate_gluings, index_bound, FiberShearing};
pub use torus_mapping_class::{dehn_twist, double_coset_reps, DoubleCosetRep, TorusAuto};
