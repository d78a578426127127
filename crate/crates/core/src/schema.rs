//! JSON manifold documents: graph, pieces, end-to-torus assignment, optional
//! gluing and optional budget. Rationals travel as `"p/q"` strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::decomposition_graph::{DecompGraph, EdgeRecord, EndRef, VertexRecord};
use crate::error::{Error, Result};
use crate::exact_lattice::{QForm, Sublattice};
use crate::geometric_pieces::{HyperbolicPieceData, Piece, SeifertPieceData, SeifertTorus};
use crate::gluing_engine::{Gluing, PreglueGraph};
use crate::rational::{format_rational, parse_rational, Q};
use crate::seifert_arithmetic::DominationBudget;
use crate::torus_mapping_class::{Mat2, TorusAuto};

pub const SCHEMA_VERSION: u32 = 1;

/// A rational carried as a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Rat(Q);

impl Serialize for Rat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map(Rat).ok_or_else(|| {
            serde::de::Error::custom(format!("expected a rational \"p/q\", got {text:?}"))
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphWire {
    vertices: Vec<VertexRecord>,
    edges: Vec<EdgeRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TorusWire {
    id: u32,
    #[serde(default = "one")]
    divisibility: i64,
    mu: [i64; 2],
}

fn one() -> i64 {
    1
}

// Internally tagged enums buffer their content and lose inner field paths,
// so pieces are read as raw values first and dispatched on "type" by hand.
#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum PieceWire {
    Hyperbolic(HyperbolicWire),
    Seifert(SeifertWire),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HyperbolicWire {
    vertex: u32,
    boundary_order: Vec<u32>,
    cusp_forms: Vec<[[Rat; 2]; 2]>,
    del_h2_basis: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeifertWire {
    vertex: u32,
    base_orientable: bool,
    genus: u32,
    cone_orders: Vec<i64>,
    tori: Vec<TorusWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EndWire {
    edge: u32,
    side: u8,
    torus: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GluingWire {
    edge: u32,
    side: u8,
    matrix: Mat2,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BudgetWire {
    t: u64,
    h: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eps3: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sv_m: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h1_mod_d_order: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tor_m_order: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lens_order_cap: Option<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentWire<P> {
    schema_version: u32,
    graph: GraphWire,
    pieces: Vec<P>,
    ends: Vec<EndWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gluing: Option<Vec<GluingWire>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    budget: Option<BudgetWire>,
}

/// A validated manifold description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldDocument {
    pub preglue: PreglueGraph,
    pub gluing: Option<Gluing>,
    pub budget: Option<DominationBudget>,
}

impl ManifoldDocument {
    pub fn new(
        preglue: PreglueGraph,
        gluing: Option<Gluing>,
        budget: Option<DominationBudget>,
    ) -> Result<Self> {
        if let Some(phi) = &gluing {
            phi.validate(&preglue)?;
        }
        if let Some(b) = &budget {
            b.validate().map_err(|e| e.at("budget"))?;
        }
        Ok(ManifoldDocument {
            preglue,
            gluing,
            budget,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: DocumentWire<serde_json::Value> =
            serde_path_to_error::deserialize(de).map_err(|e| path_error("", e))?;
        let mut pieces = Vec::with_capacity(raw.pieces.len());
        for (i, value) in raw.pieces.iter().enumerate() {
            let prefix = format!("pieces[{i}]");
            let kind = value.get("type").and_then(|t| t.as_str());
            let mut value = value.clone();
            if let Some(obj) = value.as_object_mut() {
                obj.remove("type");
            }
            let piece = match kind {
                Some("hyperbolic") => PieceWire::Hyperbolic(
                    serde_path_to_error::deserialize(value).map_err(|e| path_error(&prefix, e))?,
                ),
                Some("seifert") => PieceWire::Seifert(
                    serde_path_to_error::deserialize(value).map_err(|e| path_error(&prefix, e))?,
                ),
                _ => {
                    return Err(Error::validation(
                        format!("{prefix}.type"),
                        "expected \"hyperbolic\" or \"seifert\"",
                    ))
                }
            };
            pieces.push(piece);
        }
        from_wire(DocumentWire {
            schema_version: raw.schema_version,
            graph: raw.graph,
            pieces,
            ends: raw.ends,
            gluing: raw.gluing,
            budget: raw.budget,
        })
    }

    /// Canonical pretty JSON, with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_wire()).expect("serializable");
        s.push('\n');
        s
    }

    /// The gluing, or a validation error when the document has none.
    pub fn require_gluing(&self) -> Result<&Gluing> {
        self.gluing
            .as_ref()
            .ok_or_else(|| Error::validation("gluing", "this command needs a gluing section"))
    }

    fn to_wire(&self) -> DocumentWire<PieceWire> {
        let pg = &self.preglue;
        let graph = GraphWire {
            vertices: pg.graph().vertices().to_vec(),
            edges: pg.graph().edges().to_vec(),
        };
        let pieces = pg
            .pieces()
            .iter()
            .map(|(&vertex, piece)| match piece {
                Piece::Hyperbolic(h) => PieceWire::Hyperbolic(HyperbolicWire {
                    vertex,
                    boundary_order: h.boundary_order.clone(),
                    cusp_forms: h
                        .cusp_forms
                        .iter()
                        .map(|q| {
                            [
                                [Rat(q.entry(0, 0).clone()), Rat(q.entry(0, 1).clone())],
                                [Rat(q.entry(1, 0).clone()), Rat(q.entry(1, 1).clone())],
                            ]
                        })
                        .collect(),
                    del_h2_basis: h.del_h2_basis.basis().to_vec(),
                }),
                Piece::Seifert(s) => PieceWire::Seifert(SeifertWire {
                    vertex,
                    base_orientable: s.base_orientable,
                    genus: s.genus,
                    cone_orders: s.cone_orders.clone(),
                    tori: s
                        .tori
                        .iter()
                        .map(|t| TorusWire {
                            id: t.id,
                            divisibility: t.divisibility,
                            mu: t.mu,
                        })
                        .collect(),
                }),
            })
            .collect();
        let ends = pg
            .torus_assignment()
            .iter()
            .map(|(end, &torus)| EndWire {
                edge: end.edge,
                side: end.side,
                torus,
            })
            .collect();
        let gluing = self.gluing.as_ref().map(|phi| {
            phi.maps()
                .iter()
                .map(|(end, m)| GluingWire {
                    edge: end.edge,
                    side: end.side,
                    matrix: *m.matrix(),
                })
                .collect()
        });
        let budget = self.budget.as_ref().map(|b| BudgetWire {
            t: b.t,
            h: b.h,
            eps3: Some(Rat(b.eps3.clone())),
            sv_m: b.sv_m.clone().map(Rat),
            d: b.d,
            h1_mod_d_order: b.h1_mod_d_order,
            tor_m_order: b.tor_m_order,
            lens_order_cap: b.lens_order_cap,
        });
        DocumentWire {
            schema_version: SCHEMA_VERSION,
            graph,
            pieces,
            ends,
            gluing,
            budget,
        }
    }
}

fn path_error<E: std::fmt::Display>(prefix: &str, e: serde_path_to_error::Error<E>) -> Error {
    let inner = e.path().to_string();
    let path = match (prefix.is_empty(), inner == ".") {
        (true, true) => String::new(),
        (true, false) => inner,
        (false, true) => prefix.to_string(),
        (false, false) if inner.starts_with('[') => format!("{prefix}{inner}"),
        (false, false) => format!("{prefix}.{inner}"),
    };
    Error::validation(path, e.into_inner().to_string())
}

fn from_wire(wire: DocumentWire<PieceWire>) -> Result<ManifoldDocument> {
    if wire.schema_version != SCHEMA_VERSION {
        return Err(Error::validation(
            "schema_version",
            format!(
                "unsupported schema version {}, expected {SCHEMA_VERSION}",
                wire.schema_version
            ),
        ));
    }
    let graph =
        DecompGraph::new(wire.graph.vertices, wire.graph.edges).map_err(|e| e.at("graph"))?;

    let mut pieces = BTreeMap::new();
    for (i, p) in wire.pieces.into_iter().enumerate() {
        let path = format!("pieces[{i}]");
        let (vertex, piece) = match p {
            PieceWire::Hyperbolic(HyperbolicWire {
                vertex,
                boundary_order,
                cusp_forms,
                del_h2_basis,
            }) => {
                let forms = cusp_forms
                    .into_iter()
                    .enumerate()
                    .map(|(j, [[a, b], [c, d]])| {
                        QForm::new(vec![vec![a.0, b.0], vec![c.0, d.0]])
                            .map_err(|e| e.at(&format!("{path}.cusp_forms[{j}]")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let ambient = 2 * boundary_order.len();
                let lattice = Sublattice::new(ambient, del_h2_basis)
                    .map_err(|e| e.at(&format!("{path}.del_h2_basis")))?;
                (
                    vertex,
                    Piece::Hyperbolic(HyperbolicPieceData {
                        boundary_order,
                        cusp_forms: forms,
                        del_h2_basis: lattice,
                    }),
                )
            }
            PieceWire::Seifert(SeifertWire {
                vertex,
                base_orientable,
                genus,
                cone_orders,
                tori,
            }) => (
                vertex,
                Piece::Seifert(SeifertPieceData {
                    base_orientable,
                    genus,
                    cone_orders,
                    tori: tori
                        .into_iter()
                        .map(|t| SeifertTorus {
                            id: t.id,
                            divisibility: t.divisibility,
                            mu: t.mu,
                        })
                        .collect(),
                }),
            ),
        };
        if pieces.insert(vertex, piece).is_some() {
            return Err(Error::validation(
                format!("{path}.vertex"),
                format!("second piece for vertex {vertex}"),
            ));
        }
    }

    let mut ends = BTreeMap::new();
    for (i, e) in wire.ends.into_iter().enumerate() {
        if ends.insert(EndRef::new(e.edge, e.side), e.torus).is_some() {
            return Err(Error::validation(
                format!("ends[{i}]"),
                format!("end e{}.{} listed twice", e.edge, e.side),
            ));
        }
    }
    let preglue = PreglueGraph::new(graph, pieces, ends)?;

    let gluing = match wire.gluing {
        None => None,
        Some(list) => {
            let mut maps = BTreeMap::new();
            for (i, g) in list.into_iter().enumerate() {
                let end = EndRef::new(g.edge, g.side);
                let phi = TorusAuto::new(g.matrix).map_err(|_| {
                    Error::validation(
                        format!("gluing[{end}]"),
                        format!(
                            "gluing map at end {end} has determinant {}, expected -1",
                            crate::torus_mapping_class::mat_det(&g.matrix)
                        ),
                    )
                })?;
                if maps.insert(end, phi).is_some() {
                    return Err(Error::validation(
                        format!("gluing[{i}]"),
                        format!("end {end} listed twice"),
                    ));
                }
            }
            Some(Gluing::new(maps))
        }
    };

    let budget = wire.budget.map(|b| DominationBudget {
        t: b.t,
        h: b.h,
        eps3: b
            .eps3
            .map(|r| r.0)
            .unwrap_or_else(|| DominationBudget::default().eps3),
        sv_m: b.sv_m.map(|r| r.0),
        d: b.d,
        h1_mod_d_order: b.h1_mod_d_order,
        tor_m_order: b.tor_m_order,
        lens_order_cap: b.lens_order_cap,
    });
    ManifoldDocument::new(preglue, gluing, budget)
}
