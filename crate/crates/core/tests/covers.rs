//! Counting checks on double covers of decomposition graphs.

mod common;

use std::collections::BTreeMap;

use common::*;
use glueprint_core::{
    entire_cover, entire_double_cover, loopless_cover, loopless_double_cover, samples,
    select_component, DecompGraph, EdgeKind, EdgeOrigin, EndRef, VertexKind,
};

fn counts(g: &DecompGraph) -> (usize, usize, usize) {
    let semi_edges = g
        .edges()
        .iter()
        .filter(|e| e.kind == EdgeKind::Semi)
        .count();
    let semi_vertices = g
        .vertices()
        .iter()
        .filter(|v| v.kind == VertexKind::Semi)
        .count();
    (g.edges().len() - semi_edges, semi_edges, semi_vertices)
}

#[test]
fn seven_vertex_cover() {
    let g = samples::seven_vertex_graph();
    let (cover, map) = entire_double_cover(&g);
    assert_eq!(cover.vertices().len(), 14);
    // 8 entire edges lift twice, one semi-edge once, one seam
    assert_eq!(cover.edges().len(), 18);
    assert!(cover.is_entire());
    assert_eq!(cover.components().len(), 1);
    let seams = map
        .edge_origin
        .values()
        .filter(|o| matches!(o, EdgeOrigin::Seam { vertex: 3 }))
        .count();
    assert_eq!(seams, 1);
}

#[test]
fn entire_cover_counts_on_random_graphs() {
    let mut rng = rng(51);
    for i in 0..200 {
        let shape = Shape {
            semi: i % 2 == 0,
            loops: i % 3 == 0,
            ..Default::default()
        };
        let (pg, _) = random_instance(&mut rng, shape);
        let g = pg.graph();
        let (entire, semi_e, semi_v) = counts(g);
        let (cover, map) = entire_double_cover(g);
        assert!(cover.is_entire());
        assert_eq!(cover.vertices().len(), 2 * g.vertices().len());
        assert_eq!(cover.edges().len(), 2 * entire + semi_e + semi_v);

        let mut preimages: BTreeMap<EndRef, usize> = BTreeMap::new();
        for e in map.end_origin.values() {
            *preimages.entry(*e).or_default() += 1;
        }
        for d in g.ends() {
            assert_eq!(preimages.get(&d), Some(&2), "end {d}");
        }
        for v in g.vertices() {
            let extra = usize::from(v.kind == VertexKind::Semi);
            for c in 0..2 {
                let lift = map.lift_of(v.id, c).unwrap();
                assert_eq!(cover.valence(lift), g.valence(v.id) + extra);
            }
        }
        let expect = if semi_e + semi_v > 0 { 1 } else { 2 };
        assert_eq!(cover.components().len(), expect);
    }
}

#[test]
fn loopless_cover_counts_on_random_graphs() {
    let mut rng = rng(52);
    for i in 0..200 {
        let shape = Shape {
            loops: i % 2 == 0,
            ..Default::default()
        };
        let (pg, _) = random_instance(&mut rng, shape);
        let g = pg.graph();
        let (cover, map) = loopless_double_cover(g).unwrap();
        assert!(!cover.has_loops());
        assert_eq!(cover.vertices().len(), 2 * g.vertices().len());
        assert_eq!(cover.edges().len(), 2 * g.edges().len());
        for v in g.vertices() {
            for c in 0..2 {
                assert_eq!(
                    cover.valence(map.lift_of(v.id, c).unwrap()),
                    g.valence(v.id)
                );
            }
        }
        let expect = if g.has_loops() { 1 } else { 2 };
        assert_eq!(cover.components().len(), expect);
    }
}

#[test]
fn loopless_cover_rejects_semi_edges() {
    assert!(loopless_double_cover(&samples::seven_vertex_graph()).is_err());
}

#[test]
fn component_selection() {
    let (pg, phi) = samples::seifert_pair([[0, 1], [1, 0]]);
    let (cover, map) = entire_double_cover(pg.graph());
    assert_eq!(cover.components().len(), 2);
    let (first, m0) = select_component(&cover, &map, None).unwrap();
    assert!(first.vertex(0).is_some());
    assert!(m0.vertex_origin.values().all(|&(_, c)| c == 0));
    let (second, m1) = select_component(&cover, &map, Some(1)).unwrap();
    assert_eq!(second.vertices().len(), 2);
    assert!(m1.vertex_origin.values().all(|&(_, c)| c == 1));
    assert!(select_component(&cover, &map, Some(2)).is_err());

    let (cpg, cphi, _) = entire_cover(&pg, &phi, Some(1)).unwrap();
    cphi.validate(&cpg).unwrap();
    assert_eq!(cpg.graph().edges().len(), 1);
}

#[test]
fn semi_vertex_contracts_in_preglue_cover() {
    let (pg, phi) = samples::semi_vertex_instance();
    let (cpg, cphi, map) = entire_cover(&pg, &phi, None).unwrap();
    cphi.validate(&cpg).unwrap();
    // the semi vertex becomes one vertex, the cusped piece two
    assert_eq!(cpg.graph().vertices().len(), 3);
    assert_eq!(cpg.graph().edges().len(), 3);
    assert!(cpg.graph().is_entire());
    assert!(cpg.pieces().values().all(|p| !p.is_semi()));
    assert_eq!(map.end_origin.len(), 6);
}

#[test]
fn preglue_covers_validate_on_random_instances() {
    let mut rng = rng(53);
    for i in 0..100 {
        let shape = Shape {
            semi: i % 2 == 0,
            loops: i % 3 == 0,
            ..Default::default()
        };
        let (pg, phi) = random_instance(&mut rng, shape);
        let (cpg, cphi, map) = entire_cover(&pg, &phi, None).unwrap();
        cphi.validate(&cpg).unwrap();
        assert!(cpg.graph().is_entire());
        for (ce, be) in &map.end_origin {
            assert_eq!(cphi.get(*ce), phi.get(*be));
        }
        if pg.graph().is_entire() {
            let (lpg, lphi, _) = loopless_cover(&pg, &phi, None).unwrap();
            lphi.validate(&lpg).unwrap();
            assert!(!lpg.graph().has_loops());
        }
    }
}
