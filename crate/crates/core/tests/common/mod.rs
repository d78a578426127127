#![allow(clippy::needless_range_loop, dead_code)]

use std::collections::BTreeMap;

use glueprint_core::exact_lattice::{QForm, Sublattice};
use glueprint_core::rational::{qr, Q};
use glueprint_core::torus_mapping_class::{mat_mul, Mat2};
use glueprint_core::{
    DecompGraph, EdgeKind, EdgeRecord, EndRef, Gluing, HyperbolicPieceData, Piece, PreglueGraph,
    SeifertPieceData, SeifertTorus, TorusAuto, VertexKind, VertexRecord,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Shape {
    pub semi: bool,
    pub loops: bool,
    /// Chance (in percent) that a gluing identifies two fibers.
    pub fiber_match_pct: u32,
    /// Every vertex is Seifert.
    pub all_seifert: bool,
}

pub fn random_sl2(rng: &mut TestRng, steps: usize) -> Mat2 {
    let mut m = [[1, 0], [0, 1]];
    for _ in 0..steps {
        let k = rng.gen_range(-2..=2);
        let e = match rng.gen_range(0..3) {
            0 => [[1, k], [0, 1]],
            1 => [[1, 0], [k, 1]],
            _ => [[0, -1], [1, 0]],
        };
        m = mat_mul(&m, &e);
    }
    m
}

fn inverse_sl2(m: &Mat2) -> Mat2 {
    [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
}

/// A random map with determinant -1.
pub fn random_reversing(rng: &mut TestRng) -> Mat2 {
    let steps = rng.gen_range(0..=3);
    mat_mul(&[[0, 1], [1, 0]], &random_sl2(rng, steps))
}

/// A random involution with determinant -1.
pub fn random_reversing_involution(rng: &mut TestRng) -> Mat2 {
    let j = if rng.gen_bool(0.5) {
        [[1, 0], [0, -1]]
    } else {
        [[0, 1], [1, 0]]
    };
    let steps = rng.gen_range(0..=2);
    let p = random_sl2(rng, steps);
    mat_mul(&mat_mul(&p, &j), &inverse_sl2(&p))
}

fn cusp_form(rng: &mut TestRng) -> QForm {
    let choices: [[[Q; 2]; 2]; 4] = [
        [[qr(1, 1), qr(0, 1)], [qr(0, 1), qr(1, 1)]],
        [[qr(1, 1), qr(0, 1)], [qr(0, 1), qr(2, 1)]],
        [[qr(1, 1), qr(1, 2)], [qr(1, 2), qr(1, 1)]],
        [[qr(1, 1), qr(1, 2)], [qr(1, 2), qr(3, 1)]],
    ];
    let [[a, b], [c, d]] = choices.choose(rng).unwrap().clone();
    QForm::new(vec![vec![a, b], vec![c, d]]).unwrap()
}

fn hyperbolic_piece(rng: &mut TestRng, n: usize) -> Piece {
    let boundary_order: Vec<u32> = (0..n as u32).map(|i| 2 * i).collect();
    let cusp_forms = (0..n).map(|_| cusp_form(rng)).collect();
    let basis = loop {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..2 * n).map(|_| rng.gen_range(-2..=2)).collect())
            .collect();
        if let Ok(l) = Sublattice::new(2 * n, rows) {
            if l.rank() == n {
                break l;
            }
        }
    };
    Piece::Hyperbolic(HyperbolicPieceData {
        boundary_order,
        cusp_forms,
        del_h2_basis: basis,
    })
}

fn seifert_piece(rng: &mut TestRng, n: usize, semi: bool) -> Piece {
    let (base_orientable, genus, cone_orders) = if semi {
        (false, 1, vec![2])
    } else if rng.gen_bool(0.5) {
        (true, 0, vec![2, 3])
    } else {
        (true, 1, vec![])
    };
    let m = cone_orders
        .iter()
        .fold(1i64, |l, &a| num_integer::lcm(l, a));
    let tori = (0..n as u32)
        .map(|i| SeifertTorus {
            id: 2 * i,
            divisibility: rng.gen_range(1..=2),
            mu: [m, rng.gen_range(-3..=3)],
        })
        .collect();
    Piece::Seifert(SeifertPieceData {
        base_orientable,
        genus,
        cone_orders,
        tori,
    })
}

/// A connected random instance: a path through all vertices plus extra
/// edges, pieces matched to valences, and a random valid gluing.
pub fn random_instance(rng: &mut TestRng, shape: Shape) -> (PreglueGraph, Gluing) {
    let nv: u32 = rng.gen_range(if shape.loops || shape.semi { 1 } else { 2 }..=3);
    let mut endpoints: Vec<Vec<u32>> = (1..nv).map(|i| vec![i - 1, i]).collect();
    for _ in 0..rng.gen_range(0..=2) {
        let a = rng.gen_range(0..nv);
        let b = rng.gen_range(0..nv);
        if a != b || shape.loops {
            endpoints.push(vec![a, b]);
        }
    }
    if shape.loops && !endpoints.iter().any(|e| e[0] == e[1]) {
        let a = rng.gen_range(0..nv);
        endpoints.push(vec![a, a]);
    }
    if shape.semi {
        for _ in 0..rng.gen_range(1..=2) {
            endpoints.push(vec![rng.gen_range(0..nv)]);
        }
    }
    if endpoints.is_empty() {
        endpoints.push(vec![0]);
    }
    let edges: Vec<EdgeRecord> = endpoints
        .iter()
        .enumerate()
        .map(|(i, e)| EdgeRecord {
            id: i as u32,
            kind: if e.len() == 2 {
                EdgeKind::Entire
            } else {
                EdgeKind::Semi
            },
            endpoints: e.clone(),
        })
        .collect();
    let mut valence = vec![0usize; nv as usize];
    for e in &endpoints {
        for &v in e {
            valence[v as usize] += 1;
        }
    }

    let mut vertices = Vec::new();
    let mut pieces = BTreeMap::new();
    for v in 0..nv {
        let n = valence[v as usize];
        let seifert = shape.all_seifert || n == 0 || rng.gen_range(0..3) > 0;
        let semi = shape.semi && seifert && n > 0 && rng.gen_range(0..3) == 0;
        let piece = if seifert {
            seifert_piece(rng, n, semi)
        } else {
            hyperbolic_piece(rng, n)
        };
        vertices.push(VertexRecord {
            id: v,
            kind: if semi {
                VertexKind::Semi
            } else {
                VertexKind::Entire
            },
        });
        pieces.insert(v, piece);
    }
    let graph = DecompGraph::new(vertices, edges).unwrap();

    let mut torus_of_end = BTreeMap::new();
    for v in 0..nv {
        let mut ids = pieces[&v].torus_ids();
        ids.shuffle(rng);
        for (d, t) in graph.ends_at(v).into_iter().zip(ids) {
            torus_of_end.insert(d, t);
        }
    }
    let pg = PreglueGraph::new(graph, pieces, torus_of_end).unwrap();

    let mut per_edge = BTreeMap::new();
    for e in pg.graph().edges() {
        let m = if e.kind == EdgeKind::Semi {
            random_reversing_involution(rng)
        } else if rng.gen_range(0..100) < shape.fiber_match_pct {
            let c = rng.gen_range(-2..=2);
            if rng.gen_bool(0.5) {
                [[1, 0], [c, -1]]
            } else {
                [[-1, 0], [c, 1]]
            }
        } else {
            random_reversing(rng)
        };
        per_edge.insert(e.id, TorusAuto::new(m).unwrap());
    }
    let phi = Gluing::from_edges(pg.graph(), &per_edge);
    phi.validate(&pg).unwrap();
    (pg, phi)
}

/// Ends of a preglue graph at Seifert vertices, grouped by vertex.
pub fn seifert_ends(pg: &PreglueGraph) -> BTreeMap<u32, Vec<EndRef>> {
    pg.graph()
        .vertices()
        .iter()
        .filter(|v| pg.piece(v.id).is_seifert())
        .map(|v| (v.id, pg.graph().ends_at(v.id)))
        .filter(|(_, ends)| !ends.is_empty())
        .collect()
}

/// Diagonal of the Smith normal form of an integer matrix.
pub fn smith_diagonal(m: &[Vec<i128>]) -> Vec<i128> {
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            let q = a[i][t] / a[t][t];
            for j in t..cols {
                a[i][j] -= q * a[t][j];
            }
            clean &= a[i][t] == 0;
        }
        for j in t + 1..cols {
            let q = a[t][j] / a[t][t];
            for i in t..rows {
                a[i][j] -= q * a[i][t];
            }
            clean &= a[t][j] == 0;
        }
        if !clean {
            continue;
        }
        // the pivot must divide the rest of the block
        let mut bad = None;
        'scan: for i in t + 1..rows {
            for j in t + 1..cols {
                if a[i][j] % a[t][t] != 0 {
                    bad = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = bad {
            for j in t..cols {
                a[t][j] += a[i][j];
            }
            continue;
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// `H_1` of `(g; b0, b_i/a_i)` from the presentation with generators
/// `a_j, b_j` (abelianized away to a free part), `c_1..c_s` and the fiber `h`:
/// `a_i c_i + b_i h = 0` and `c_1 + ... + c_s - b0 h = 0`.
/// Returns `(free rank, torsion order)`.
pub fn seifert_homology(g: u32, b0: i64, pairs: &[(i64, i64)]) -> (usize, i128) {
    let s = pairs.len();
    let mut rel = Vec::new();
    for (i, &(a, b)) in pairs.iter().enumerate() {
        let mut r = vec![0i128; s + 1];
        r[i] = a as i128;
        r[s] = b as i128;
        rel.push(r);
    }
    let mut last = vec![1i128; s + 1];
    last[s] = -(b0 as i128);
    rel.push(last);
    let d = smith_diagonal(&rel);
    let free = 2 * g as usize + (s + 1 - d.len());
    let torsion = d.iter().product();
    (free, torsion)
}
