//! Fiber-shearings, the bound on their vertex indices under a distortion
//! budget, and enumeration of nondegenerate gluings below a budget.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::decomposition_graph::{EdgeKind, EndRef};
use crate::error::{Error, Result};
use crate::exact_lattice::{determinant, QForm};
use crate::geometric_pieces::{Piece, FIBER};
use crate::gluing_engine::{
    distortion_report, is_nondegenerate, vertex_data, DistortionReport, Gluing, PreglueGraph,
};
use crate::rational::{ceil_sqrt, pow, qi, to_i64, Q};
use crate::torus_mapping_class::{
    dehn_twist_power, mat_det, mat_mul, twist_coset_reps, TorusAuto, SWAP,
};

/// Default bound on the number of sweep cells.
pub const DEFAULT_CELL_CAP: u64 = 1_000_000;

/// Twist counts `k_delta` along the fiber at every end; zero at ends of
/// atoroidal pieces.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FiberShearing {
    twists: BTreeMap<EndRef, i64>,
}

impl FiberShearing {
    /// Missing ends are taken to be 0.
    pub fn new(pg: &PreglueGraph, twists: BTreeMap<EndRef, i64>) -> Result<Self> {
        for (&end, &k) in &twists {
            if !pg.graph().contains_end(end) {
                return Err(Error::validation(format!("shearing[{end}]"), "unknown end"));
            }
            if k != 0 && !pg.is_seifert_end(end) {
                return Err(Error::validation(
                    format!("shearing[{end}]"),
                    "ends of atoroidal pieces cannot be sheared",
                ));
            }
        }
        Ok(FiberShearing {
            twists: twists.into_iter().filter(|(_, k)| *k != 0).collect(),
        })
    }

    pub fn k(&self, end: EndRef) -> i64 {
        self.twists.get(&end).copied().unwrap_or(0)
    }

    pub fn twists(&self) -> &BTreeMap<EndRef, i64> {
        &self.twists
    }

    /// Pointwise sum; shearings along fibers commute.
    pub fn compose(&self, other: &FiberShearing) -> FiberShearing {
        let mut twists = self.twists.clone();
        for (&d, &k) in &other.twists {
            *twists.entry(d).or_insert(0) += k;
        }
        twists.retain(|_, k| *k != 0);
        FiberShearing { twists }
    }

    /// The shearing with the given index at each Seifert vertex, placed on
    /// the lowest end of that vertex.
    pub fn from_indices(pg: &PreglueGraph, indices: &BTreeMap<u32, i64>) -> Result<Self> {
        let mut twists = BTreeMap::new();
        for (&v, &k) in indices {
            if !pg.piece(v).is_seifert() {
                return Err(Error::UndefinedIndex(format!("vertex {v} is atoroidal")));
            }
            if k == 0 {
                continue;
            }
            let lowest =
                pg.graph().ends_at(v).into_iter().min().ok_or_else(|| {
                    Error::Precondition(format!("vertex {v} has no ends to shear"))
                })?;
            twists.insert(lowest, k);
        }
        Ok(FiberShearing { twists })
    }
}

fn fiber_twist(k: i64) -> TorusAuto {
    dehn_twist_power(FIBER, k).expect("fiber is primitive")
}

/// `(phi^tau)_delta = tau_(opposite)^-1 phi_delta tau_delta`.
pub fn apply_shearing(pg: &PreglueGraph, phi: &Gluing, tau: &FiberShearing) -> Gluing {
    let g = pg.graph();
    let maps = phi
        .maps()
        .iter()
        .map(|(&d, a)| {
            let near = fiber_twist(tau.k(d));
            let far = fiber_twist(-tau.k(g.opposite(d)));
            (d, far.compose(a).compose(&near))
        })
        .collect();
    Gluing::new(maps)
}

/// `k_v(tau)`, the sum of the twist counts over the ends at `v`.
pub fn shearing_index(pg: &PreglueGraph, tau: &FiberShearing, v: u32) -> Result<i64> {
    if !pg.piece(v).is_seifert() {
        return Err(Error::UndefinedIndex(format!("vertex {v} is atoroidal")));
    }
    Ok(pg.graph().ends_at(v).into_iter().map(|d| tau.k(d)).sum())
}

/// Index of every Seifert vertex.
pub fn index_vector(pg: &PreglueGraph, tau: &FiberShearing) -> BTreeMap<u32, i64> {
    pg.graph()
        .vertices()
        .iter()
        .filter(|v| pg.piece(v.id).is_seifert())
        .map(|v| (v.id, shearing_index(pg, tau, v.id).expect("Seifert vertex")))
        .collect()
}

/// Representative with the same index vector, all twisting at each Seifert
/// vertex concentrated on its lowest end.
pub fn canonical_shearing_form(pg: &PreglueGraph, tau: &FiberShearing) -> FiberShearing {
    FiberShearing::from_indices(pg, &index_vector(pg, tau)).expect("indices of Seifert vertices")
}

/// Smallest `K >= 1` such that every shearing with `|k_v(tau)| >= K` has
/// `D_v(phi^tau) >= c`.
///
/// Writing the sheared `mu_v` as `mu_v + m sum_i k_i lambda_i`, the distance
/// to the span of `L_v` is at least `sum_i q_i(mu_i + t_i lambda_i)` with
/// `sum_i t_i = m k_v`, and `q(a + b) >= q(b)/2 - q(a)` together with
/// Cauchy-Schwarz gives
/// `disc_v >= disc(L_v) (m^2 k_v^2 r / (2n) - n R)`, where `r` and `R` are the
/// smallest fiber value and the largest `mu` value over the blocks. For a
/// semi vertex the bound is taken on the double cover, where the index
/// doubles.
pub fn index_bound(pg: &PreglueGraph, phi: &Gluing, v: u32, c: &Q) -> Result<i64> {
    let Piece::Seifert(_) = pg.piece(v) else {
        return Err(Error::UndefinedIndex(format!("vertex {v} is atoroidal")));
    };
    if !c.is_positive() {
        return Err(Error::Precondition("budget must be positive".into()));
    }
    let data = vertex_data(pg, phi, v)?;
    let n = data.ends.len();
    if n == 0 {
        return Ok(1);
    }
    let Piece::Seifert(s) = &data.piece else {
        unreachable!("cover of a Seifert piece is Seifert")
    };
    let m = s.m();
    let block = |i: usize| data.form.block(2 * i, 2);
    let r = (0..n).map(|i| block(i).eval(&FIBER)).min().expect("n >= 1");
    let big_r = (0..n)
        .map(|i| block(i).eval(&s.tori[i].mu))
        .max()
        .expect("n >= 1");
    let l_rows = &data.lattice.basis()[..n - 1];
    let disc_l = determinant(&data.form.gram_on(l_rows));
    if r.is_zero() || disc_l.is_zero() {
        return Err(Error::Precondition(format!(
            "gluing is degenerate at vertex {v}"
        )));
    }
    let nq = qi(n as i64);
    let rhs = (pow(c, 2 * n as u32) / &disc_l + &nq * big_r) * qi(2) * &nq / (qi(m * m) * r);
    let k = to_i64(&ceil_sqrt(&rhs))
        .ok_or_else(|| Error::Unsupported("index bound overflows".into()))?
        .max(1);
    if pg.piece(v).is_semi() {
        Ok(((k + 1) / 2).max(1))
    } else {
        Ok(k)
    }
}

/// One nondegenerate gluing below the budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumeratedGluing {
    /// Class representative of `phi` at side 0 of every edge, before shearing.
    pub edge_classes: Vec<(u32, TorusAuto)>,
    /// Index at each Seifert vertex.
    pub indices: Vec<(u32, i64)>,
    pub gluing: Gluing,
    pub report: DistortionReport,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingEnumeration {
    pub gluings: Vec<EnumeratedGluing>,
    /// Number of classes per edge.
    pub edge_class_counts: Vec<(u32, usize)>,
    pub cells: u64,
}

/// Involutions `phi` with `det = -1` and `0 < disc(q + phi^T q phi) < bound`.
fn semi_edge_classes(q: &QForm, bound: &Q) -> Result<Vec<TorusAuto>> {
    let mut out = Vec::new();
    if q.kernel_rank() == 1 {
        // q = diag(d^2, 0) in (x, lambda); disc = d^4 b^2, classes under
        // conjugation by fiber twists: a mod |b|
        let d2 = q.gram()[0][0].clone();
        let mut b = 1i64;
        while &d2 * &d2 * qi(b * b) < *bound {
            for sb in [b, -b] {
                for a in 0..b {
                    if (a * a - 1).rem_euclid(b) == 0 {
                        let m = [[a, sb], [(1 - a * a) / sb, -a]];
                        out.push(TorusAuto::new(m)?);
                    }
                }
            }
            b += 1;
        }
    } else {
        // disc >= 2 det q + (det q / tr q)(q(phi e1) + q(phi e2))
        let g = q.gram();
        let det = q.determinant();
        let tr = &g[0][0] + &g[1][1];
        let s = (bound - qi(2) * &det) * tr / det;
        let vs = q.vectors_below(&s, false)?;
        for v in &vs {
            for w in &vs {
                let m = [[v[0], w[0]], [v[1], w[1]]];
                if mat_det(&m) == -1
                    && mat_mul(&m, &m) == [[1, 0], [0, 1]]
                    && q.eval(v) + q.eval(w) < s
                {
                    out.push(TorusAuto::new(m)?);
                }
            }
        }
    }
    let mut kept = Vec::new();
    for a in out {
        let block = q.add(&q.pullback_by(&a.rows())?)?;
        let disc = block.determinant();
        if disc.is_positive() && disc < *bound {
            kept.push(a);
        }
    }
    kept.sort();
    Ok(kept)
}

/// Classes of side-0 gluing maps of edge `e` with edge distortion below `c`,
/// modulo fiber twists at its ends.
pub fn edge_classes(pg: &PreglueGraph, e: u32, c: &Q) -> Result<Vec<TorusAuto>> {
    let g = pg.graph();
    let edge = g
        .edge(e)
        .ok_or_else(|| Error::validation("edge", format!("unknown edge {e}")))?;
    let bound = pow(c, 4);
    let near = pg.end_form(EndRef::new(e, 0));
    if edge.kind == EdgeKind::Semi {
        return semi_edge_classes(&near, &bound);
    }
    let far = pg.end_form(EndRef::new(e, 1));
    // phi = SWAP sigma with sigma in SL(2, Z); the far form seen through SWAP
    let swap = TorusAuto::new(SWAP)?;
    let far_swapped = far.pullback_by(&swap.rows())?;
    let reps = twist_coset_reps(&far_swapped, &near, &bound)?;
    let mut out: Vec<TorusAuto> = reps.into_iter().map(|r| swap.compose(&r.rep)).collect();
    out.sort();
    Ok(out)
}

fn sheared(
    pg: &PreglueGraph,
    per_edge: &BTreeMap<u32, TorusAuto>,
    indices: &BTreeMap<u32, i64>,
) -> Result<Gluing> {
    let base = Gluing::from_edges(pg.graph(), per_edge);
    let tau = FiberShearing::from_indices(pg, indices)?;
    Ok(apply_shearing(pg, &base, &tau))
}

/// Every nondegenerate gluing with primary distortion below `c`, up to
/// zero-index fiber-shearings: per edge one map per twist class, and per
/// Seifert vertex every index `|k_v| < index_bound`.
pub fn enumerate_gluings(pg: &PreglueGraph, c: &Q, cap: u64) -> Result<GluingEnumeration> {
    if !c.is_positive() {
        return Err(Error::Precondition("budget must be positive".into()));
    }
    let g = pg.graph();
    let mut classes: Vec<(u32, Vec<TorusAuto>)> = Vec::new();
    for e in g.edges() {
        classes.push((e.id, edge_classes(pg, e.id, c)?));
    }
    let edge_class_counts = classes.iter().map(|(e, cl)| (*e, cl.len())).collect();
    let seifert: Vec<u32> = g
        .vertices()
        .iter()
        .filter(|v| pg.piece(v.id).is_seifert() && pg.piece(v.id).torus_count() > 0)
        .map(|v| v.id)
        .collect();

    // phase 1: the class combinations and their index ranges, counted
    let mut cells: u64 = 0;
    let mut work: Vec<(BTreeMap<u32, TorusAuto>, Vec<i64>)> = Vec::new();
    let mut idx = vec![0usize; classes.len()];
    if classes.iter().all(|(_, cl)| !cl.is_empty()) {
        loop {
            let per_edge: BTreeMap<u32, TorusAuto> = classes
                .iter()
                .zip(&idx)
                .map(|((e, cl), &i)| (*e, cl[i]))
                .collect();
            let base = Gluing::from_edges(g, &per_edge);
            if is_nondegenerate(pg, &base) {
                let mut bounds = Vec::with_capacity(seifert.len());
                let mut size: u64 = 1;
                for &v in &seifert {
                    let k = index_bound(pg, &base, v, c)?;
                    bounds.push(k);
                    size = size.saturating_mul(2 * k as u64 - 1);
                }
                cells = cells.saturating_add(size);
                if cells > cap {
                    return Err(Error::Resource {
                        cap,
                        required: cells,
                    });
                }
                work.push((per_edge, bounds));
            }
            // advance the mixed-radix counter
            let mut pos = classes.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < classes[pos].1.len() {
                    break;
                }
                idx[pos] = 0;
            }
            if pos == 0 && idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }

    // phase 2: evaluate every cell
    let mut flat: Vec<(usize, Vec<i64>)> = Vec::new();
    for (w, (_, bounds)) in work.iter().enumerate() {
        let mut k: Vec<i64> = bounds.iter().map(|&b| -(b - 1)).collect();
        loop {
            flat.push((w, k.clone()));
            let mut pos = k.len();
            let mut done = true;
            while pos > 0 {
                pos -= 1;
                if k[pos] < bounds[pos] - 1 {
                    k[pos] += 1;
                    done = false;
                    break;
                }
                k[pos] = -(bounds[pos] - 1);
            }
            if done {
                break;
            }
        }
    }
    let evaluated: Vec<Option<EnumeratedGluing>> = flat
        .par_iter()
        .map(|(w, k)| -> Result<Option<EnumeratedGluing>> {
            let (per_edge, _) = &work[*w];
            let indices: BTreeMap<u32, i64> =
                seifert.iter().copied().zip(k.iter().copied()).collect();
            let gluing = sheared(pg, per_edge, &indices)?;
            let report = distortion_report(pg, &gluing)?;
            if !report.primary.less_than(c) {
                return Ok(None);
            }
            Ok(Some(EnumeratedGluing {
                edge_classes: per_edge.iter().map(|(&e, &a)| (e, a)).collect(),
                indices: indices.into_iter().collect(),
                gluing,
                report,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut gluings: Vec<EnumeratedGluing> = evaluated.into_iter().flatten().collect();
    gluings.sort_by(|a, b| (&a.edge_classes, &a.indices).cmp(&(&b.edge_classes, &b.indices)));
    Ok(GluingEnumeration {
        gluings,
        edge_class_counts,
        cells,
    })
}
