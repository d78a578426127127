//! Exhaustive and brute-force cross-checks of the enumerators.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use glueprint_core::exact_lattice::{QForm, Sublattice};
use glueprint_core::rational::{qi, qr, Q};
use glueprint_core::samples;
use glueprint_core::seifert_arithmetic::{chi, enumerate_targets};
use glueprint_core::torus_mapping_class::{
    coset_normal_form, double_coset_enumeration, mat_det, mat_mul, pullback_form, Mat2,
    StabilizerKind,
};
use glueprint_core::{
    enumerate_gluings, primary_distortion, DecompGraph, DominationBudget, EdgeKind, EdgeRecord,
    EndRef, Gluing, Piece, PreglueGraph, SeifertInvariants, TorusAuto, VertexKind, VertexRecord,
};
use num_traits::{Signed, Zero};
use rand::Rng;

fn sl2_box(r: i64) -> Vec<Mat2> {
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                for d in -r..=r {
                    if a * d - b * c == 1 {
                        out.push([[a, b], [c, d]]);
                    }
                }
            }
        }
    }
    out
}

fn delta(q: &QForm, qp: &QForm, s: &Mat2) -> Q {
    pullback_form(q, &TorusAuto::new(*s).unwrap())
        .unwrap()
        .add(qp)
        .unwrap()
        .determinant()
}

/// Union-find over an SL(2,Z) box under left/right multiplication by the
/// brute-force stabilizers; the library's normal form must be constant on
/// each component, separate components, and agree with the enumerator.
fn check_cosets(q: &QForm, qp: &QForm, c: &Q, kind: StabilizerKind, r: i64) {
    let all = sl2_box(r);
    let fixes = |f: &QForm, g: &Mat2| pullback_form(f, &TorusAuto::new(*g).unwrap()).unwrap() == *f;
    let twist_only = |f: &QForm, g: &Mat2| {
        // unipotent isometries: the twists along the kernel
        fixes(f, g) && g[0][0] + g[1][1] == 2
    };
    let keep = |f: &QForm, g: &Mat2| match kind {
        StabilizerKind::Full => fixes(f, g),
        StabilizerKind::Twist => twist_only(f, g),
    };
    let left: Vec<Mat2> = all.iter().copied().filter(|g| keep(q, g)).collect();
    let right: Vec<Mat2> = all.iter().copied().filter(|g| keep(qp, g)).collect();
    let members: Vec<Mat2> = all
        .iter()
        .copied()
        .filter(|s| {
            let d = delta(q, qp, s);
            d.is_positive() && d < *c
        })
        .collect();
    let pos: BTreeMap<Mat2, usize> = members.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, s) in members.iter().enumerate() {
        for g in &left {
            if let Some(&j) = pos.get(&mat_mul(g, s)) {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a] = b;
            }
        }
        for g in &right {
            if let Some(&j) = pos.get(&mat_mul(s, g)) {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut by_root: BTreeMap<usize, BTreeSet<Mat2>> = BTreeMap::new();
    for (i, s) in members.iter().enumerate() {
        let nf = coset_normal_form(q, qp, &TorusAuto::new(*s).unwrap(), kind).unwrap();
        by_root.entry(root(&mut parent, i)).or_default().insert(nf);
    }
    for nfs in by_root.values() {
        assert_eq!(nfs.len(), 1, "one class got two labels: {nfs:?}");
    }
    let brute: BTreeSet<Mat2> = by_root.values().flatten().copied().collect();
    assert_eq!(brute.len(), by_root.len(), "two components share a label");

    let found = double_coset_enumeration(q, qp, c, kind).unwrap();
    let labels: BTreeSet<Mat2> = found.reps.iter().map(|r| r.normal_form).collect();
    assert_eq!(labels.len(), found.reps.len());
    assert_eq!(labels, brute, "q={q:?} qp={qp:?} c={c} {kind:?}");
    for rep in &found.reps {
        assert_eq!(rep.delta, delta(q, qp, rep.rep.matrix()));
        assert_eq!(
            coset_normal_form(q, qp, &rep.rep, kind).unwrap(),
            rep.normal_form
        );
    }
}

fn rotated_degenerate(alpha: i64, u: Mat2) -> QForm {
    // diag(alpha, 0) in the basis given by the columns of u^-1
    let base = QForm::diag_int(&[alpha, 0]).unwrap();
    let inv = [[u[1][1], -u[0][1]], [-u[1][0], u[0][0]]];
    pullback_form(&base, &TorusAuto::new(inv).unwrap()).unwrap()
}

#[test]
fn cosets_of_fixed_pairs_match_brute_force() {
    let e1 = QForm::diag_int(&[1, 0]).unwrap();
    let e2 = QForm::diag_int(&[0, 1]).unwrap();
    let id = QForm::identity(2);
    let hex = QForm::new(vec![vec![qi(1), qr(1, 2)], vec![qr(1, 2), qi(1)]]).unwrap();
    let cases: Vec<(&QForm, &QForm, Q)> = vec![
        (&e1, &e2, qi(10)),
        (&e1, &e1, qi(17)),
        (&e1, &id, qi(6)),
        (&id, &e2, qi(6)),
        (&id, &id, qi(12)),
        (&hex, &id, qi(7)),
        (&hex, &hex, qi(6)),
    ];
    for (q, qp, c) in cases {
        check_cosets(q, qp, &c, StabilizerKind::Full, 6);
    }
}

#[test]
fn twist_classes_match_brute_force() {
    let e1 = QForm::diag_int(&[1, 0]).unwrap();
    let id = QForm::identity(2);
    check_cosets(&e1, &e1, &qi(10), StabilizerKind::Twist, 6);
    check_cosets(&e1, &id, &qi(5), StabilizerKind::Twist, 6);
    check_cosets(&id, &id, &qi(8), StabilizerKind::Twist, 5);
}

#[test]
fn cosets_of_random_degenerate_pairs_match_brute_force() {
    let mut rng = rng(41);
    for _ in 0..6 {
        let u = random_sl2(&mut rng, 2);
        let up = random_sl2(&mut rng, 2);
        if u.iter().chain(&up).flatten().any(|x| x.abs() > 2) {
            continue;
        }
        let q = rotated_degenerate(rng.gen_range(1..=2), u);
        let qp = rotated_degenerate(rng.gen_range(1..=2), up);
        check_cosets(&q, &qp, &qi(rng.gen_range(2..=12)), StabilizerKind::Full, 6);
    }
}

#[test]
fn zero_form_has_a_single_class() {
    let zero = QForm::zero(2);
    let id = QForm::identity(2);
    let found = double_coset_enumeration(&zero, &id, &qi(2), StabilizerKind::Full).unwrap();
    assert_eq!(found.reps.len(), 1);
    assert_eq!(found.reps[0].delta, qi(1));
    let none = double_coset_enumeration(&zero, &id, &qi(1), StabilizerKind::Full).unwrap();
    assert!(none.reps.is_empty());
}

fn sweep(pg: &PreglueGraph, c: &Q, small: i64, large: i64) -> BTreeSet<Mat2> {
    // first column up to `small`, second column up to `large`
    let mut out = BTreeSet::new();
    for a in -small..=small {
        for cc in -small..=small {
            for b in -large..=large {
                for d in -large..=large {
                    let m = [[a, b], [cc, d]];
                    if mat_det(&m) != -1 {
                        continue;
                    }
                    let phi = Gluing::from_edges(
                        pg.graph(),
                        &BTreeMap::from([(0, TorusAuto::new(m).unwrap())]),
                    );
                    let ok = glueprint_core::is_nondegenerate(pg, &phi)
                        && primary_distortion(pg, &phi).unwrap().less_than(c);
                    if ok {
                        out.insert(m);
                    }
                }
            }
        }
    }
    out
}

fn enumerated(pg: &PreglueGraph, c: &Q) -> BTreeSet<Mat2> {
    let found = enumerate_gluings(pg, c, 1_000_000).unwrap();
    let maps: BTreeSet<Mat2> = found
        .gluings
        .iter()
        .map(|g| *g.gluing.get(EndRef::new(0, 0)).matrix())
        .collect();
    assert_eq!(
        maps.len(),
        found.gluings.len(),
        "two cells gave the same gluing"
    );
    maps
}

#[test]
fn seifert_pair_matches_exhaustive_sweep() {
    let (pg, _) = samples::seifert_pair([[0, 1], [1, 0]]);
    for c in [qi(6), qi(7), qr(15, 2)] {
        let found = enumerated(&pg, &c);
        let swept = sweep(&pg, &c, 3, 60);
        assert_eq!(found, swept, "C = {c}");
    }
    assert_eq!(enumerated(&pg, &qi(7)).len(), 2);
}

fn seifert_cusp_edge() -> PreglueGraph {
    let graph = DecompGraph::new(
        vec![
            VertexRecord {
                id: 0,
                kind: VertexKind::Entire,
            },
            VertexRecord {
                id: 1,
                kind: VertexKind::Entire,
            },
        ],
        vec![EdgeRecord {
            id: 0,
            kind: EdgeKind::Entire,
            endpoints: vec![0, 1],
        }],
    )
    .unwrap();
    let pieces = BTreeMap::from([
        (0, samples::one_ended_seifert_piece()),
        (1, samples::square_cusp_piece([1, 0])),
    ]);
    let ends = BTreeMap::from([(EndRef::new(0, 0), 0), (EndRef::new(0, 1), 0)]);
    PreglueGraph::new(graph, pieces, ends).unwrap()
}

#[test]
fn seifert_cusp_edge_matches_exhaustive_sweep() {
    let pg = seifert_cusp_edge();
    for c in [qi(9), qi(10)] {
        let found = enumerated(&pg, &c);
        let swept = sweep(&pg, &c, 2, 101);
        assert_eq!(found, swept, "C = {c}");
        assert!(!found.is_empty());
    }
}

#[test]
fn torsion_order_matches_smith_normal_form() {
    let mut rng = rng(43);
    let mut checked = 0;
    while checked < 300 {
        let g = rng.gen_range(0..=3);
        let pairs: Vec<(i64, i64)> = (0..rng.gen_range(0..=5))
            .map(|_| {
                let a: i64 = rng.gen_range(2..=12);
                let b = loop {
                    let b: i64 = rng.gen_range(-30..=30);
                    if num_integer::gcd(a, b) == 1 {
                        break b;
                    }
                };
                (a, b)
            })
            .collect();
        let b0 = rng.gen_range(-5..=5);
        let inv = SeifertInvariants::normalize(g, b0, &pairs).unwrap();
        if inv.euler_number().is_zero() {
            assert!(inv.torsion_order().is_err());
            continue;
        }
        // the raw and the normalized data present the same group
        let raw = seifert_homology(g, b0, &pairs);
        let norm = seifert_homology(inv.g, inv.b0, &inv.pairs);
        assert_eq!(raw, norm);
        assert_eq!(norm.0, 2 * g as usize);
        assert_eq!(norm.1, inv.torsion_order().unwrap() as i128);
        checked += 1;
    }
}

fn all_normalized(g: u32, cones: &[i64], b0_range: i64) -> Vec<SeifertInvariants> {
    let mut out = Vec::new();
    let mut tuples: Vec<Vec<(i64, i64)>> = vec![vec![]];
    for &a in cones {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (1..a)
                    .filter(move |&b| num_integer::gcd(a, b) == 1)
                    .map(move |b| {
                        let mut t = t.clone();
                        t.push((a, b));
                        t
                    })
            })
            .collect();
    }
    for t in tuples {
        for b0 in -b0_range..=b0_range {
            out.push(SeifertInvariants {
                g,
                b0,
                pairs: t.clone(),
            });
        }
    }
    out
}

fn cone_lists(max_len: usize, max_a: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for c in &frontier {
            let start = c.last().copied().unwrap_or(2);
            for a in start..=max_a {
                let mut d: Vec<i64> = c.clone();
                d.push(a);
                next.push(d);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[test]
fn targets_are_complete_on_a_box() {
    let budget = DominationBudget {
        d: Some(1),
        h1_mod_d_order: Some(2),
        tor_m_order: Some(1),
        sv_m: Some(qi(3)),
        lens_order_cap: Some(4),
        ..Default::default()
    };
    let t = budget.torsion_bound().unwrap();
    let report = enumerate_targets(&budget, 1_000_000).unwrap();
    let zero: BTreeSet<_> = report
        .zero
        .candidates
        .iter()
        .map(|c| c.invariants.clone())
        .collect();
    let neg: BTreeSet<_> = report
        .negative
        .candidates
        .iter()
        .map(|c| c.invariants.clone())
        .collect();
    let floor = report.e_floor_coefficient.clone().unwrap();
    let mut seen_zero = 0;
    let mut seen_neg = 0;
    for g in 0..=2 {
        for cones in cone_lists(3, 8) {
            let x = chi(g, &cones);
            for inv in all_normalized(g, &cones, 6) {
                let e = inv.euler_number();
                if e.is_zero() || inv.torsion_order().unwrap() > t {
                    continue;
                }
                if x.is_zero() {
                    assert!(zero.contains(&inv), "missing {inv}");
                    seen_zero += 1;
                } else if x.is_negative() && e.abs() >= &floor * &x * &x {
                    assert!(neg.contains(&inv), "missing {inv}");
                    seen_neg += 1;
                }
            }
        }
    }
    assert!(seen_zero > 0 && seen_neg > 0);
    for c in report
        .zero
        .candidates
        .iter()
        .chain(&report.negative.candidates)
    {
        assert!(c.torsion <= t);
    }
}

#[test]
fn hyperbolic_vertex_is_zero_only_when_closed() {
    let pg = samples::closed_hyperbolic();
    let phi = Gluing::default();
    assert!(primary_distortion(&pg, &phi).unwrap().is_zero());
    let Piece::Hyperbolic(h) = pg.piece(0) else {
        panic!()
    };
    assert_eq!(h.del_h2_basis, Sublattice::zero(0));
}
