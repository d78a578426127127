//! Gluings of a preglue graph, the induced form `q_phi` on the boundary tori,
//! and edge, vertex and primary average distortions.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};

use crate::decomposition_graph::{
    entire_double_cover, loopless_double_cover, select_component, CoverMap, DecompGraph, EdgeKind,
    EndRef, VertexKind, VertexRecord,
};
use crate::error::{Error, Result};
use crate::exact_lattice::{discriminant, dominates, QForm, Sublattice};
use crate::geometric_pieces::Piece;
use crate::rational::{format_rational, pow, root_enclosure, DecimalEnclosure, Q};
use crate::torus_mapping_class::{pullback_form, TorusAuto};

/// A graph with a geometric piece at every vertex and a boundary torus at
/// every end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreglueGraph {
    graph: DecompGraph,
    pieces: BTreeMap<u32, Piece>,
    torus_of_end: BTreeMap<EndRef, u32>,
}

impl PreglueGraph {
    pub fn new(
        graph: DecompGraph,
        pieces: BTreeMap<u32, Piece>,
        torus_of_end: BTreeMap<EndRef, u32>,
    ) -> Result<Self> {
        for v in graph.vertices() {
            let path = format!("pieces[vertex {}]", v.id);
            let piece = pieces
                .get(&v.id)
                .ok_or_else(|| Error::validation(&path, "vertex has no piece"))?;
            piece.validate().map_err(|e| e.at(&path))?;
            if (v.kind == VertexKind::Semi) != piece.is_semi() {
                return Err(Error::validation(
                    path,
                    "a vertex is semi exactly when its piece is Seifert over a non-orientable base",
                ));
            }
            if graph.valence(v.id) != piece.torus_count() {
                return Err(Error::validation(
                    path,
                    format!(
                        "vertex has valence {} but its piece has {} boundary tori",
                        graph.valence(v.id),
                        piece.torus_count()
                    ),
                ));
            }
        }
        if let Some(extra) = pieces.keys().find(|v| graph.vertex(**v).is_none()) {
            return Err(Error::validation(
                format!("pieces[vertex {extra}]"),
                "piece for an unknown vertex",
            ));
        }
        let mut used: BTreeSet<(u32, u32)> = BTreeSet::new();
        for end in graph.ends() {
            let path = format!("ends[{end}]");
            let t = *torus_of_end
                .get(&end)
                .ok_or_else(|| Error::validation(&path, "end has no boundary torus"))?;
            let v = graph.vertex_of(end);
            if pieces[&v].torus_position(t).is_none() {
                return Err(Error::validation(
                    path,
                    format!("piece at vertex {v} has no boundary torus {t}"),
                ));
            }
            if !used.insert((v, t)) {
                return Err(Error::validation(
                    path,
                    format!("torus {t} of vertex {v} is assigned to two ends"),
                ));
            }
        }
        if let Some(extra) = torus_of_end.keys().find(|d| !graph.contains_end(**d)) {
            return Err(Error::validation(format!("ends[{extra}]"), "unknown end"));
        }
        Ok(PreglueGraph {
            graph,
            pieces,
            torus_of_end,
        })
    }

    pub fn graph(&self) -> &DecompGraph {
        &self.graph
    }

    pub fn pieces(&self) -> &BTreeMap<u32, Piece> {
        &self.pieces
    }

    pub fn piece(&self, v: u32) -> &Piece {
        &self.pieces[&v]
    }

    pub fn torus_of_end(&self, end: EndRef) -> u32 {
        self.torus_of_end[&end]
    }

    pub fn torus_assignment(&self) -> &BTreeMap<EndRef, u32> {
        &self.torus_of_end
    }

    pub fn piece_at_end(&self, end: EndRef) -> &Piece {
        self.piece(self.graph.vertex_of(end))
    }

    /// Boundary form of the torus at an end.
    pub fn end_form(&self, end: EndRef) -> QForm {
        let piece = self.piece_at_end(end);
        let idx = piece
            .torus_position(self.torus_of_end(end))
            .expect("validated assignment");
        piece.torus_form(idx)
    }

    /// Ends at `v`, in the boundary order of its piece.
    pub fn ordered_ends(&self, v: u32) -> Vec<EndRef> {
        let mut ends = self.graph.ends_at(v);
        let piece = self.piece(v);
        ends.sort_by_key(|&d| piece.torus_position(self.torus_of_end(d)));
        ends
    }

    pub fn is_seifert_end(&self, end: EndRef) -> bool {
        self.piece_at_end(end).is_seifert()
    }
}

/// Per-end gluing maps `phi_delta: T_delta -> T_(opposite)` in the declared bases.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Gluing {
    maps: BTreeMap<EndRef, TorusAuto>,
}

impl Gluing {
    pub fn new(maps: BTreeMap<EndRef, TorusAuto>) -> Self {
        Gluing { maps }
    }

    pub fn get(&self, end: EndRef) -> &TorusAuto {
        &self.maps[&end]
    }

    pub fn maps(&self) -> &BTreeMap<EndRef, TorusAuto> {
        &self.maps
    }

    /// Builds a gluing from one map per edge (taken at side 0).
    pub fn from_edges(g: &DecompGraph, per_edge: &BTreeMap<u32, TorusAuto>) -> Gluing {
        let mut maps = BTreeMap::new();
        for e in g.edges() {
            let phi = per_edge[&e.id];
            maps.insert(EndRef::new(e.id, 0), phi);
            if e.kind == EdgeKind::Entire {
                maps.insert(EndRef::new(e.id, 1), phi.inverse());
            }
        }
        Gluing { maps }
    }

    /// Checks orientation reversal and the law `phi_(opposite) = phi^-1`.
    pub fn validate(&self, pg: &PreglueGraph) -> Result<()> {
        let g = pg.graph();
        for end in g.ends() {
            let path = format!("gluing[{end}]");
            let phi = self
                .maps
                .get(&end)
                .ok_or_else(|| Error::validation(&path, "end has no gluing map"))?;
            if phi.det() != -1 {
                return Err(Error::validation(
                    path,
                    format!(
                        "gluing map at end {end} has determinant {}, expected -1",
                        phi.det()
                    ),
                ));
            }
        }
        for end in g.ends() {
            let opp = g.opposite(end);
            let phi = self.maps[&end];
            if self.maps[&opp] != phi.inverse() {
                let msg = if opp == end {
                    format!("gluing map at semi-edge end {end} is not an involution; phi_bar(delta) = phi_delta^(-1) requires phi^2 = I")
                } else {
                    format!(
                        "gluing maps at {end} and {opp} violate phi_bar(delta) = phi_delta^(-1)"
                    )
                };
                return Err(Error::validation(format!("gluing[{end}]"), msg));
            }
        }
        if let Some(extra) = self.maps.keys().find(|d| !g.contains_end(**d)) {
            return Err(Error::validation(format!("gluing[{extra}]"), "unknown end"));
        }
        Ok(())
    }
}

/// The nonnegative real `delta^(1/root)`, kept exact.
#[derive(Clone, Debug, Eq)]
pub struct DistortionValue {
    pub delta: Q,
    pub root: u32,
}

impl DistortionValue {
    pub fn new(delta: Q, root: u32) -> Self {
        assert!(root > 0 && !delta.is_negative());
        DistortionValue { delta, root }
    }

    pub fn zero() -> Self {
        DistortionValue {
            delta: Q::zero(),
            root: 2,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.delta.is_zero()
    }

    /// `C^root`, the discriminant threshold equivalent to `self < C`.
    pub fn threshold(c: &Q, root: u32) -> Q {
        pow(c, root)
    }

    pub fn less_than(&self, c: &Q) -> bool {
        self.delta < pow(c, self.root)
    }

    pub fn enclosure(&self, digits: u32) -> DecimalEnclosure {
        root_enclosure(&self.delta, self.root, digits)
    }
}

impl PartialEq for DistortionValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Ord for DistortionValue {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = num_integer::lcm(self.root, other.root);
        pow(&self.delta, l / self.root).cmp(&pow(&other.delta, l / other.root))
    }
}

impl PartialOrd for DistortionValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DistortionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else if self.delta.is_integer() {
            write!(f, "{}^(1/{})", self.delta.numer(), self.root)
        } else {
            write!(f, "({})^(1/{})", format_rational(&self.delta), self.root)
        }
    }
}

/// `q_v` on `T_delta` plus the pullback of the far form through `phi_delta`.
pub fn end_block(pg: &PreglueGraph, phi: &Gluing, end: EndRef) -> QForm {
    let far = pg.end_form(pg.graph().opposite(end));
    pg.end_form(end)
        .add(&pullback_form(&far, phi.get(end)).expect("rank 2"))
        .expect("rank 2")
}

/// `q_phi` on the direct sum of `H_1(T_delta)` over all ends, in end order.
pub fn build_qphi(pg: &PreglueGraph, phi: &Gluing) -> Result<QForm> {
    phi.validate(pg)?;
    let blocks: Vec<QForm> = pg
        .graph()
        .ends()
        .into_iter()
        .map(|d| end_block(pg, phi, d))
        .collect();
    Ok(QForm::direct_sum(&blocks))
}

/// No gluing map identifies the fibers of two Seifert tori. Cusp forms are
/// definite and Seifert forms have the fiber as kernel, so this is exactly
/// the condition that every block of `q_phi` is positive definite.
pub fn is_nondegenerate(pg: &PreglueGraph, phi: &Gluing) -> bool {
    fiber_matched_ends(pg, phi).is_empty()
}

/// Ends between two Seifert tori whose gluing sends the fiber to `+-` the fiber.
pub fn fiber_matched_ends(pg: &PreglueGraph, phi: &Gluing) -> Vec<EndRef> {
    let g = pg.graph();
    g.ends()
        .into_iter()
        .filter(|&d| {
            pg.is_seifert_end(d)
                && pg.is_seifert_end(g.opposite(d))
                && phi.get(d).matrix()[0][1] == 0
        })
        .collect()
}

pub fn edge_distortion(pg: &PreglueGraph, phi: &Gluing, e: u32) -> Result<DistortionValue> {
    let edge = pg
        .graph()
        .edge(e)
        .ok_or_else(|| Error::validation("edge", format!("unknown edge {e}")))?;
    let d0 = end_block(pg, phi, EndRef::new(e, 0)).determinant();
    if edge.kind == EdgeKind::Entire {
        let d1 = end_block(pg, phi, EndRef::new(e, 1)).determinant();
        assert_eq!(d0, d1, "edge discriminant depends on the end");
    }
    Ok(DistortionValue::new(d0, 4))
}

/// The form and lattice entering the distortion of a vertex: the boundary
/// image lattice of the piece (or of its double cover, for a semi vertex)
/// and the blocks of `q_phi` at its ends in boundary order.
#[derive(Clone, Debug)]
pub struct VertexData {
    pub piece: Piece,
    /// End of the base graph feeding each torus of `piece`, in order.
    pub ends: Vec<EndRef>,
    pub form: QForm,
    pub lattice: Sublattice,
    pub root: u32,
}

pub fn vertex_data(pg: &PreglueGraph, phi: &Gluing, v: u32) -> Result<VertexData> {
    let base = pg.piece(v);
    let ends = pg.ordered_ends(v);
    let (piece, ends) = if base.is_semi() {
        let cover = base.piece_double_cover()?;
        let doubled = ends.iter().flat_map(|&d| [d, d]).collect();
        (cover, doubled)
    } else {
        (base.clone(), ends)
    };
    let blocks: Vec<QForm> = ends.iter().map(|&d| end_block(pg, phi, d)).collect();
    let form = QForm::direct_sum(&blocks);
    let lattice = piece.del_h2_lattice()?;
    let root = 2 * ends.len() as u32;
    Ok(VertexData {
        piece,
        ends,
        form,
        lattice,
        root,
    })
}

pub fn vertex_distortion(pg: &PreglueGraph, phi: &Gluing, v: u32) -> Result<DistortionValue> {
    if pg.graph().vertex(v).is_none() {
        return Err(Error::validation("vertex", format!("unknown vertex {v}")));
    }
    if pg.piece(v).torus_count() == 0 {
        return Ok(DistortionValue::zero());
    }
    let data = vertex_data(pg, phi, v)?;
    Ok(DistortionValue::new(
        discriminant(&data.lattice, &data.form)?,
        data.root,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistortionReport {
    pub edges: Vec<(u32, DistortionValue)>,
    pub vertices: Vec<(u32, DistortionValue)>,
    pub primary: DistortionValue,
}

pub fn distortion_report(pg: &PreglueGraph, phi: &Gluing) -> Result<DistortionReport> {
    phi.validate(pg)?;
    let edges = pg
        .graph()
        .edges()
        .iter()
        .map(|e| Ok((e.id, edge_distortion(pg, phi, e.id)?)))
        .collect::<Result<Vec<_>>>()?;
    let vertices = pg
        .graph()
        .vertices()
        .iter()
        .map(|v| Ok((v.id, vertex_distortion(pg, phi, v.id)?)))
        .collect::<Result<Vec<_>>>()?;
    let primary = edges
        .iter()
        .chain(&vertices)
        .map(|(_, d)| d.clone())
        .max()
        .unwrap_or_else(DistortionValue::zero);
    Ok(DistortionReport {
        edges,
        vertices,
        primary,
    })
}

/// Maximum of all edge and vertex distortions; 0 for a single closed piece.
pub fn primary_distortion(pg: &PreglueGraph, phi: &Gluing) -> Result<DistortionValue> {
    Ok(distortion_report(pg, phi)?.primary)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtoroidalReport {
    pub vertex: DistortionValue,
    /// Product of the edge discriminants over the ends at the vertex.
    pub edge_product: Q,
    /// `D_v / (prod D_e)^(2/n_v)`, undefined when an edge distortion vanishes.
    pub ratio: Option<DistortionValue>,
    /// `q_phi >= q_J` on the boundary of the piece.
    pub dominates: bool,
    /// `disc(W, q_phi) >= disc(W, q_J)` on the boundary image lattice.
    pub discriminant_monotone: bool,
}

pub fn atoroidal_vertex_bound_check(
    pg: &PreglueGraph,
    phi: &Gluing,
    v: u32,
) -> Result<AtoroidalReport> {
    if pg.piece(v).is_seifert() {
        return Err(Error::Precondition(format!("vertex {v} is not atoroidal")));
    }
    let vertex = vertex_distortion(pg, phi, v)?;
    let data = vertex_data(pg, phi, v)?;
    let mut edge_product = Q::from_integer(1.into());
    for &d in &data.ends {
        edge_product *= edge_distortion(pg, phi, d.edge)?.delta;
    }
    let ratio = (!edge_product.is_zero() && !data.ends.is_empty())
        .then(|| DistortionValue::new(&vertex.delta / &edge_product, data.root));
    let qj = data.piece.boundary_form();
    let dominates = dominates(&data.form, &qj)?;
    let discriminant_monotone =
        discriminant(&data.lattice, &data.form)? >= discriminant(&data.lattice, &qj)?;
    Ok(AtoroidalReport {
        vertex,
        edge_product,
        ratio,
        dominates,
        discriminant_monotone,
    })
}

fn cover_preglue(
    pg: &PreglueGraph,
    phi: &Gluing,
    cover: DecompGraph,
    map: CoverMap,
    contract_semi: bool,
) -> Result<(PreglueGraph, Gluing, CoverMap)> {
    let base = pg.graph();
    // cover vertex -> surviving vertex after contracting seams
    let merged = |v: u32| -> u32 {
        let (b, _) = map.vertex_origin[&v];
        if contract_semi && pg.piece(b).is_semi() {
            v & !1
        } else {
            v
        }
    };
    let mut vertices = Vec::new();
    let mut pieces = BTreeMap::new();
    let mut vertex_origin = BTreeMap::new();
    for v in cover.vertices() {
        let (b, c) = map.vertex_origin[&v.id];
        if merged(v.id) != v.id {
            continue;
        }
        let piece = pg.piece(b);
        let piece = if contract_semi && piece.is_semi() {
            piece.piece_double_cover()?
        } else {
            piece.clone()
        };
        vertices.push(VertexRecord {
            id: v.id,
            kind: if piece.is_semi() {
                VertexKind::Semi
            } else {
                VertexKind::Entire
            },
        });
        pieces.insert(v.id, piece);
        vertex_origin.insert(v.id, (b, c));
    }
    let mut edges = Vec::new();
    let mut edge_origin = BTreeMap::new();
    let mut torus_of_end = BTreeMap::new();
    let mut maps = BTreeMap::new();
    let mut end_origin = BTreeMap::new();
    for e in cover.edges() {
        let origin = map.edge_origin[&e.id];
        if matches!(origin, crate::EdgeOrigin::Seam { .. }) {
            continue;
        }
        let mut rec = e.clone();
        rec.endpoints = e.endpoints.iter().map(|&v| merged(v)).collect();
        for s in 0..2u8 {
            let ce = EndRef::new(e.id, s);
            let be = map.end_origin[&ce];
            let (bv, copy) = map.vertex_origin[&e.endpoints[s as usize]];
            debug_assert_eq!(bv, base.vertex_of(be));
            let t = pg.torus_of_end(be);
            let t = if contract_semi && pg.piece(bv).is_semi() {
                2 * t + copy as u32
            } else {
                t
            };
            torus_of_end.insert(ce, t);
            maps.insert(ce, *phi.get(be));
            end_origin.insert(ce, be);
        }
        edge_origin.insert(e.id, origin);
        edges.push(rec);
    }
    let graph = DecompGraph::new(vertices, edges)?;
    let cover_map = CoverMap {
        vertex_origin,
        edge_origin,
        end_origin,
    };
    let cpg = PreglueGraph::new(graph, pieces, torus_of_end)?;
    Ok((cpg, Gluing::new(maps), cover_map))
}

fn restrict_to_component(
    pg: &PreglueGraph,
    phi: &Gluing,
    map: &CoverMap,
    component: Option<usize>,
) -> Result<(PreglueGraph, Gluing, CoverMap)> {
    let (g, m) = select_component(pg.graph(), map, component)?;
    let pieces = pg
        .pieces()
        .iter()
        .filter(|(v, _)| g.vertex(**v).is_some())
        .map(|(&v, p)| (v, p.clone()))
        .collect();
    let torus_of_end = pg
        .torus_assignment()
        .iter()
        .filter(|(d, _)| g.contains_end(**d))
        .map(|(&d, &t)| (d, t))
        .collect();
    let maps = phi
        .maps()
        .iter()
        .filter(|(d, _)| g.contains_end(**d))
        .map(|(&d, &a)| (d, a))
        .collect();
    Ok((
        PreglueGraph::new(g, pieces, torus_of_end)?,
        Gluing::new(maps),
        m,
    ))
}

/// Lift to a double cover without semi-edges or semi-vertices. A semi vertex
/// becomes a single vertex carrying the double cover of its piece; a
/// semi-edge becomes an entire edge between the two copies of its vertex.
pub fn entire_cover(
    pg: &PreglueGraph,
    phi: &Gluing,
    component: Option<usize>,
) -> Result<(PreglueGraph, Gluing, CoverMap)> {
    phi.validate(pg)?;
    let (cover, map) = entire_double_cover(pg.graph());
    let (cpg, cphi, cmap) = cover_preglue(pg, phi, cover, map, true)?;
    restrict_to_component(&cpg, &cphi, &cmap, component)
}

/// Lift of an entire preglue graph to a double cover without loops.
pub fn loopless_cover(
    pg: &PreglueGraph,
    phi: &Gluing,
    component: Option<usize>,
) -> Result<(PreglueGraph, Gluing, CoverMap)> {
    phi.validate(pg)?;
    let (cover, map) = loopless_double_cover(pg.graph())?;
    let (cpg, cphi, cmap) = cover_preglue(pg, phi, cover, map, false)?;
    restrict_to_component(&cpg, &cphi, &cmap, component)
}
