//! Graphs with semi-edges and semi-vertices, ends of edges, and the two double
//! covers that unfold semi-objects and loops.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Entire,
    Semi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Entire,
    Semi,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: u32,
    pub kind: VertexKind,
}

/// An entire edge has two endpoints (equal for a loop); a semi-edge has one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: u32,
    pub kind: EdgeKind,
    pub endpoints: Vec<u32>,
}

/// An end of an edge. Entire edges have sides 0 and 1, semi-edges only side 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EndRef {
    pub edge: u32,
    pub side: u8,
}

impl EndRef {
    pub fn new(edge: u32, side: u8) -> Self {
        EndRef { edge, side }
    }
}

impl fmt::Display for EndRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}.{}", self.edge, self.side)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompGraph {
    vertices: Vec<VertexRecord>,
    edges: Vec<EdgeRecord>,
    vertex_index: BTreeMap<u32, usize>,
    edge_index: BTreeMap<u32, usize>,
}

impl DecompGraph {
    /// Validates and sorts the records by id.
    pub fn new(mut vertices: Vec<VertexRecord>, mut edges: Vec<EdgeRecord>) -> Result<Self> {
        vertices.sort_by_key(|v| v.id);
        edges.sort_by_key(|e| e.id);
        let mut vertex_index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.id, i).is_some() {
                return Err(Error::validation(
                    format!("vertices[{i}].id"),
                    format!("duplicate vertex id {}", v.id),
                ));
            }
        }
        let mut edge_index = BTreeMap::new();
        for (i, e) in edges.iter().enumerate() {
            if edge_index.insert(e.id, i).is_some() {
                return Err(Error::validation(
                    format!("edges[{i}].id"),
                    format!("duplicate edge id {}", e.id),
                ));
            }
            let expected = match e.kind {
                EdgeKind::Entire => 2,
                EdgeKind::Semi => 1,
            };
            if e.endpoints.len() != expected {
                return Err(Error::validation(
                    format!("edges[{i}].endpoints"),
                    format!(
                        "edge {} of kind {:?} needs {expected} endpoint(s), got {}",
                        e.id,
                        e.kind,
                        e.endpoints.len()
                    ),
                ));
            }
            for (j, v) in e.endpoints.iter().enumerate() {
                if !vertex_index.contains_key(v) {
                    return Err(Error::validation(
                        format!("edges[{i}].endpoints[{j}]"),
                        format!("unknown vertex {v}"),
                    ));
                }
            }
        }
        Ok(DecompGraph {
            vertices,
            edges,
            vertex_index,
            edge_index,
        })
    }

    pub fn vertices(&self) -> &[VertexRecord] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn vertex(&self, id: u32) -> Option<&VertexRecord> {
        self.vertex_index.get(&id).map(|&i| &self.vertices[i])
    }

    pub fn edge(&self, id: u32) -> Option<&EdgeRecord> {
        self.edge_index.get(&id).map(|&i| &self.edges[i])
    }

    /// All ends, sorted.
    pub fn ends(&self) -> Vec<EndRef> {
        self.edges
            .iter()
            .flat_map(|e| (0..e.endpoints.len() as u8).map(move |s| EndRef::new(e.id, s)))
            .collect()
    }

    pub fn contains_end(&self, end: EndRef) -> bool {
        self.edge(end.edge)
            .is_some_and(|e| (end.side as usize) < e.endpoints.len())
    }

    /// The opposite end; fixes exactly the ends of semi-edges.
    pub fn opposite(&self, end: EndRef) -> EndRef {
        match self.edge(end.edge).map(|e| e.kind) {
            Some(EdgeKind::Entire) => EndRef::new(end.edge, 1 - end.side),
            _ => end,
        }
    }

    /// The vertex an end is attached to.
    pub fn vertex_of(&self, end: EndRef) -> u32 {
        self.edge(end.edge).expect("end of a known edge").endpoints[end.side as usize]
    }

    pub fn ends_at(&self, v: u32) -> Vec<EndRef> {
        self.ends()
            .into_iter()
            .filter(|&d| self.vertex_of(d) == v)
            .collect()
    }

    pub fn valence(&self, v: u32) -> usize {
        self.ends_at(v).len()
    }

    pub fn is_loop(&self, edge: u32) -> bool {
        self.edge(edge)
            .is_some_and(|e| e.kind == EdgeKind::Entire && e.endpoints[0] == e.endpoints[1])
    }

    pub fn is_entire(&self) -> bool {
        self.vertices.iter().all(|v| v.kind == VertexKind::Entire)
            && self.edges.iter().all(|e| e.kind == EdgeKind::Entire)
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(|e| self.is_loop(e.id))
    }

    /// Connected components as sorted vertex-id lists, ordered by smallest id.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let mut adj: BTreeMap<u32, Vec<u32>> =
            self.vertices.iter().map(|v| (v.id, vec![])).collect();
        for e in &self.edges {
            if let [a, b] = e.endpoints[..] {
                adj.get_mut(&a).expect("known").push(b);
                adj.get_mut(&b).expect("known").push(a);
            }
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in &self.vertices {
            if seen.contains(&v.id) {
                continue;
            }
            let mut comp = vec![];
            let mut stack = vec![v.id];
            seen.insert(v.id);
            while let Some(x) = stack.pop() {
                comp.push(x);
                for &y in &adj[&x] {
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    /// Subgraph spanned by a vertex set (edges with all endpoints inside).
    pub fn induced(&self, keep: &BTreeSet<u32>) -> DecompGraph {
        let vertices = self
            .vertices
            .iter()
            .filter(|v| keep.contains(&v.id))
            .cloned()
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| e.endpoints.iter().all(|v| keep.contains(v)))
            .cloned()
            .collect();
        DecompGraph::new(vertices, edges).expect("subgraph of a valid graph")
    }
}

/// Where an edge of a cover comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeOrigin {
    /// A lift of a base edge; semi-edges have a single lift with copy 0.
    Lift { edge: u32, copy: u8 },
    /// The edge joining the two copies of a semi-vertex.
    Seam { vertex: u32 },
}

/// Bookkeeping of a two-sheeted cover.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CoverMap {
    /// cover vertex -> (base vertex, copy)
    pub vertex_origin: BTreeMap<u32, (u32, u8)>,
    pub edge_origin: BTreeMap<u32, EdgeOrigin>,
    /// cover end -> base end; seam ends have no image.
    pub end_origin: BTreeMap<EndRef, EndRef>,
}

impl CoverMap {
    pub fn lift_of(&self, base_vertex: u32, copy: u8) -> Option<u32> {
        self.vertex_origin
            .iter()
            .find(|(_, &o)| o == (base_vertex, copy))
            .map(|(&v, _)| v)
    }

    fn restrict(&self, g: &DecompGraph) -> CoverMap {
        CoverMap {
            vertex_origin: self
                .vertex_origin
                .iter()
                .filter(|(v, _)| g.vertex(**v).is_some())
                .map(|(&k, &v)| (k, v))
                .collect(),
            edge_origin: self
                .edge_origin
                .iter()
                .filter(|(e, _)| g.edge(**e).is_some())
                .map(|(&k, &v)| (k, v))
                .collect(),
            end_origin: self
                .end_origin
                .iter()
                .filter(|(d, _)| g.contains_end(**d))
                .map(|(&k, &v)| (k, v))
                .collect(),
        }
    }
}

struct CoverBuilder<'a> {
    base: &'a DecompGraph,
    vertices: Vec<VertexRecord>,
    edges: Vec<EdgeRecord>,
    map: CoverMap,
}

impl<'a> CoverBuilder<'a> {
    fn new(base: &'a DecompGraph) -> Self {
        let mut map = CoverMap::default();
        let mut vertices = Vec::new();
        for (i, v) in base.vertices().iter().enumerate() {
            for c in 0..2u8 {
                let id = 2 * i as u32 + c as u32;
                vertices.push(VertexRecord {
                    id,
                    kind: VertexKind::Entire,
                });
                map.vertex_origin.insert(id, (v.id, c));
            }
        }
        CoverBuilder {
            base,
            vertices,
            edges: Vec::new(),
            map,
        }
    }

    fn lift(&self, v: u32, c: u8) -> u32 {
        2 * self.base.vertex_index[&v] as u32 + c as u32
    }

    /// Adds an entire edge between `(v0, c0)` and `(v1, c1)` whose ends map to
    /// `ends[0]`, `ends[1]` (if given).
    fn push(&mut self, a: (u32, u8), b: (u32, u8), origin: EdgeOrigin, ends: [Option<EndRef>; 2]) {
        let id = self.edges.len() as u32;
        self.edges.push(EdgeRecord {
            id,
            kind: EdgeKind::Entire,
            endpoints: vec![self.lift(a.0, a.1), self.lift(b.0, b.1)],
        });
        self.map.edge_origin.insert(id, origin);
        for (s, end) in ends.into_iter().enumerate() {
            if let Some(end) = end {
                self.map.end_origin.insert(EndRef::new(id, s as u8), end);
            }
        }
    }

    fn finish(self) -> (DecompGraph, CoverMap) {
        let g = DecompGraph::new(self.vertices, self.edges).expect("cover is well formed");
        (g, self.map)
    }
}

/// Unfolds semi-edges and semi-vertices.
///
/// Every vertex is doubled and every entire edge lifts to the two copies. A
/// semi-edge at `v` becomes one edge from copy 0 to copy 1 of `v`, and a
/// semi-vertex `v` gains a seam edge between its copies (the trace of the
/// cut along its Klein bottle). An entire input yields two disjoint copies.
pub fn entire_double_cover(g: &DecompGraph) -> (DecompGraph, CoverMap) {
    let mut b = CoverBuilder::new(g);
    for e in g.edges() {
        match e.kind {
            EdgeKind::Entire => {
                for c in 0..2u8 {
                    b.push(
                        (e.endpoints[0], c),
                        (e.endpoints[1], c),
                        EdgeOrigin::Lift {
                            edge: e.id,
                            copy: c,
                        },
                        [Some(EndRef::new(e.id, 0)), Some(EndRef::new(e.id, 1))],
                    );
                }
            }
            EdgeKind::Semi => {
                let v = e.endpoints[0];
                let end = Some(EndRef::new(e.id, 0));
                b.push(
                    (v, 0),
                    (v, 1),
                    EdgeOrigin::Lift {
                        edge: e.id,
                        copy: 0,
                    },
                    [end, end],
                );
            }
        }
    }
    for v in g.vertices() {
        if v.kind == VertexKind::Semi {
            b.push(
                (v.id, 0),
                (v.id, 1),
                EdgeOrigin::Seam { vertex: v.id },
                [None, None],
            );
        }
    }
    b.finish()
}

/// Unfolds loops of an entire graph: each loop lifts to two edges crossing
/// between the copies; every other edge lifts to both copies.
pub fn loopless_double_cover(g: &DecompGraph) -> Result<(DecompGraph, CoverMap)> {
    if !g.is_entire() {
        return Err(Error::Precondition(
            "loopless cover needs an entire graph".into(),
        ));
    }
    let mut b = CoverBuilder::new(g);
    for e in g.edges() {
        let ends = [Some(EndRef::new(e.id, 0)), Some(EndRef::new(e.id, 1))];
        let [u, w] = [e.endpoints[0], e.endpoints[1]];
        for c in 0..2u8 {
            let far = if u == w { 1 - c } else { c };
            b.push(
                (u, c),
                (w, far),
                EdgeOrigin::Lift {
                    edge: e.id,
                    copy: c,
                },
                ends,
            );
        }
    }
    Ok(b.finish())
}

/// The connected component with the given index (components ordered by their
/// smallest vertex id); `None` selects the one containing vertex 0, the copy-0
/// lift of the lowest base vertex.
pub fn select_component(
    cover: &DecompGraph,
    map: &CoverMap,
    component: Option<usize>,
) -> Result<(DecompGraph, CoverMap)> {
    let comps = cover.components();
    let idx = match component {
        Some(i) => i,
        None => comps.iter().position(|c| c.contains(&0)).unwrap_or(0),
    };
    let comp = comps.get(idx).ok_or_else(|| {
        Error::validation(
            "component",
            format!(
                "component {idx} does not exist ({} components)",
                comps.len()
            ),
        )
    })?;
    let keep: BTreeSet<u32> = comp.iter().copied().collect();
    let g = cover.induced(&keep);
    let m = map.restrict(&g);
    Ok((g, m))
}
