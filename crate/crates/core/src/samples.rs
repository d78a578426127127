//! Small hand-built instances used by tests, benchmarks and the CLI docs.

use std::collections::BTreeMap;

use crate::decomposition_graph::{
    DecompGraph, EdgeKind, EdgeRecord, EndRef, VertexKind, VertexRecord,
};
use crate::exact_lattice::{QForm, Sublattice};
use crate::geometric_pieces::{HyperbolicPieceData, Piece, SeifertPieceData, SeifertTorus};
use crate::gluing_engine::{Gluing, PreglueGraph};
use crate::torus_mapping_class::{Mat2, TorusAuto};

fn vertex(id: u32, kind: VertexKind) -> VertexRecord {
    VertexRecord { id, kind }
}

fn edge(id: u32, endpoints: &[u32]) -> EdgeRecord {
    EdgeRecord {
        id,
        kind: if endpoints.len() == 2 {
            EdgeKind::Entire
        } else {
            EdgeKind::Semi
        },
        endpoints: endpoints.to_vec(),
    }
}

/// One-cusped piece with the square cusp and boundary image spanned by `l`.
pub fn square_cusp_piece(l: [i64; 2]) -> Piece {
    Piece::Hyperbolic(HyperbolicPieceData {
        boundary_order: vec![0],
        cusp_forms: vec![QForm::identity(2)],
        del_h2_basis: Sublattice::new(2, vec![l.to_vec()]).expect("nonzero vector"),
    })
}

/// Seifert piece over a disk with cone points of orders 2 and 3.
pub fn one_ended_seifert_piece() -> Piece {
    Piece::Seifert(SeifertPieceData {
        base_orientable: true,
        genus: 0,
        cone_orders: vec![2, 3],
        tori: vec![SeifertTorus::new(0, [6, 0])],
    })
}

fn single_edge(left: Piece, right: Piece, phi: Mat2) -> (PreglueGraph, Gluing) {
    let graph = DecompGraph::new(
        vec![vertex(0, VertexKind::Entire), vertex(1, VertexKind::Entire)],
        vec![edge(0, &[0, 1])],
    )
    .expect("valid graph");
    let pieces = BTreeMap::from([(0, left), (1, right)]);
    let ends = BTreeMap::from([(EndRef::new(0, 0), 0), (EndRef::new(0, 1), 0)]);
    let pg = PreglueGraph::new(graph, pieces, ends).expect("valid preglue graph");
    let phi = TorusAuto::new(phi).expect("unimodular");
    let gluing = Gluing::from_edges(pg.graph(), &BTreeMap::from([(0, phi)]));
    (pg, gluing)
}

/// Two square-cusped pieces glued by `[[0,1],[1,k]]`, a swap followed by `k`
/// twists; the edge discriminant is `4 + k^2`.
pub fn square_cusp_edge(k: i64) -> (PreglueGraph, Gluing) {
    single_edge(
        square_cusp_piece([1, 0]),
        square_cusp_piece([0, 1]),
        [[0, 1], [1, k]],
    )
}

/// Two copies of [`one_ended_seifert_piece`] glued by `phi`.
pub fn seifert_pair(phi: Mat2) -> (PreglueGraph, Gluing) {
    single_edge(one_ended_seifert_piece(), one_ended_seifert_piece(), phi)
}

/// A single closed atoroidal piece.
pub fn closed_hyperbolic() -> PreglueGraph {
    let graph = DecompGraph::new(vec![vertex(0, VertexKind::Entire)], vec![]).expect("valid");
    let piece = Piece::Hyperbolic(HyperbolicPieceData {
        boundary_order: vec![],
        cusp_forms: vec![],
        del_h2_basis: Sublattice::zero(0),
    });
    PreglueGraph::new(graph, BTreeMap::from([(0, piece)]), BTreeMap::new()).expect("valid")
}

/// A two-ended Seifert vertex (genus 1, no cone points, `mu = x`) whose ends
/// are swapped against one-ended Seifert pieces, so both blocks are the
/// identity.
pub fn seifert_two_ended_identity_blocks() -> (PreglueGraph, Gluing) {
    let graph = DecompGraph::new(
        vec![
            vertex(0, VertexKind::Entire),
            vertex(1, VertexKind::Entire),
            vertex(2, VertexKind::Entire),
        ],
        vec![edge(0, &[0, 1]), edge(1, &[0, 2])],
    )
    .expect("valid");
    let middle = Piece::Seifert(SeifertPieceData {
        base_orientable: true,
        genus: 1,
        cone_orders: vec![],
        tori: vec![SeifertTorus::new(0, [1, 0]), SeifertTorus::new(1, [1, 0])],
    });
    let pieces = BTreeMap::from([
        (0, middle),
        (1, one_ended_seifert_piece()),
        (2, one_ended_seifert_piece()),
    ]);
    let ends = BTreeMap::from([
        (EndRef::new(0, 0), 0),
        (EndRef::new(0, 1), 0),
        (EndRef::new(1, 0), 1),
        (EndRef::new(1, 1), 0),
    ]);
    let pg = PreglueGraph::new(graph, pieces, ends).expect("valid");
    let swap = TorusAuto::new([[0, 1], [1, 0]]).expect("unimodular");
    let phi = Gluing::from_edges(pg.graph(), &BTreeMap::from([(0, swap), (1, swap)]));
    (pg, phi)
}

/// Seven vertices on a cycle with a chord, eight entire edges, a semi-edge at
/// vertex 0 and a two-valent semi-vertex 3.
pub fn seven_vertex_graph() -> DecompGraph {
    let vertices = (0..7)
        .map(|i| {
            vertex(
                i,
                if i == 3 {
                    VertexKind::Semi
                } else {
                    VertexKind::Entire
                },
            )
        })
        .collect();
    let mut edges: Vec<EdgeRecord> = (0..7).map(|i| edge(i, &[i, (i + 1) % 7])).collect();
    edges.push(edge(7, &[1, 5]));
    edges.push(edge(8, &[0]));
    DecompGraph::new(vertices, edges).expect("valid")
}

/// A semi vertex (Seifert over a Moebius band with one cone point) carrying a
/// semi-edge, glued along an entire edge to a square-cusped piece.
pub fn semi_vertex_instance() -> (PreglueGraph, Gluing) {
    let graph = DecompGraph::new(
        vec![vertex(0, VertexKind::Semi), vertex(1, VertexKind::Entire)],
        vec![edge(0, &[0, 1]), edge(1, &[0])],
    )
    .expect("valid");
    let semi = Piece::Seifert(SeifertPieceData {
        base_orientable: false,
        genus: 1,
        cone_orders: vec![2],
        tori: vec![SeifertTorus::new(0, [2, 1]), SeifertTorus::new(1, [2, 0])],
    });
    let pieces = BTreeMap::from([(0, semi), (1, square_cusp_piece([1, 0]))]);
    let ends = BTreeMap::from([
        (EndRef::new(0, 0), 0),
        (EndRef::new(0, 1), 0),
        (EndRef::new(1, 0), 1),
    ]);
    let pg = PreglueGraph::new(graph, pieces, ends).expect("valid");
    let to_cusp = TorusAuto::new([[1, 2], [1, 1]]).expect("unimodular");
    let involution = TorusAuto::new([[1, 1], [0, -1]]).expect("unimodular");
    let phi = Gluing::from_edges(pg.graph(), &BTreeMap::from([(0, to_cusp), (1, involution)]));
    (pg, phi)
}
