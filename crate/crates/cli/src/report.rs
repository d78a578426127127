use std::fmt::Write as _;

use glueprint_core::gluing_engine::AtoroidalReport;
use glueprint_core::rational::format_rational;
use glueprint_core::seifert_arithmetic::{
    BudgetReport, CaseResult, SeifertCandidate, TargetReport,
};
use glueprint_core::shearing_enumerator::GluingEnumeration;
use glueprint_core::torus_mapping_class::Mat2;
use glueprint_core::{
    CoverMap, DistortionReport, DistortionValue, EdgeOrigin, EndRef, Gluing, SeifertInvariants, Q,
};
use serde_json::{json, Value};

pub const DIGITS: u32 = 12;

fn rat(x: &Q) -> Value {
    Value::String(format_rational(x))
}

fn matrix(m: &Mat2) -> Value {
    json!([[m[0][0], m[0][1]], [m[1][0], m[1][1]]])
}

fn mat_text(m: &Mat2) -> String {
    format!("[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
}

fn distortion(d: &DistortionValue) -> Value {
    let enc = d.enclosure(DIGITS);
    json!({
        "delta": rat(&d.delta),
        "root": d.root,
        "lo": enc.lo,
        "hi": enc.hi,
    })
}

fn distortion_text(d: &DistortionValue) -> String {
    if d.is_zero() {
        return "0".into();
    }
    format!("{d} in {}", d.enclosure(DIGITS))
}

pub fn distortion_json(r: &DistortionReport) -> Value {
    let edges: Vec<Value> = r
        .edges
        .iter()
        .map(|(e, d)| {
            let mut v = distortion(d);
            v["edge"] = json!(e);
            v
        })
        .collect();
    let vertices: Vec<Value> = r
        .vertices
        .iter()
        .map(|(id, d)| {
            let mut v = distortion(d);
            v["vertex"] = json!(id);
            v
        })
        .collect();
    json!({ "edges": edges, "vertices": vertices, "primary": distortion(&r.primary) })
}

pub fn distortion_lines(r: &DistortionReport, out: &mut String, indent: &str) {
    for (e, d) in &r.edges {
        let _ = writeln!(
            out,
            "{indent}edge {e}: delta = {}, D = {}",
            format_rational(&d.delta),
            distortion_text(d)
        );
    }
    for (v, d) in &r.vertices {
        let _ = writeln!(
            out,
            "{indent}vertex {v}: delta = {}, D = {}",
            format_rational(&d.delta),
            distortion_text(d)
        );
    }
    let _ = writeln!(out, "{indent}primary: {}", distortion_text(&r.primary));
}

fn gluing_json(phi: &Gluing) -> Value {
    phi.maps()
        .iter()
        .map(|(d, a)| json!({ "edge": d.edge, "side": d.side, "matrix": matrix(a.matrix()) }))
        .collect()
}

pub fn check_json(
    vertices: usize,
    edges: usize,
    fiber_matched: Option<&[EndRef]>,
    atoroidal: &[(u32, AtoroidalReport)],
) -> Value {
    let gluing = fiber_matched.map(|ends| {
        json!({
            "nondegenerate": ends.is_empty(),
            "fiber_matched_ends": ends.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        })
    });
    let atoroidal: Vec<Value> = atoroidal
        .iter()
        .map(|(v, a)| {
            json!({
                "vertex": v,
                "dominates": a.dominates,
                "discriminant_monotone": a.discriminant_monotone,
                "edge_product": rat(&a.edge_product),
            })
        })
        .collect();
    json!({
        "valid": true,
        "vertices": vertices,
        "edges": edges,
        "gluing": gluing,
        "atoroidal": atoroidal,
    })
}

pub fn check_text(
    vertices: usize,
    edges: usize,
    fiber_matched: Option<&[EndRef]>,
    atoroidal: &[(u32, AtoroidalReport)],
) -> String {
    let mut out = format!("valid: vertices {vertices}, edges {edges}\n");
    match fiber_matched {
        None => out.push_str("gluing: none\n"),
        Some([]) => out.push_str("gluing: nondegenerate\n"),
        Some(ends) => {
            let names: Vec<String> = ends.iter().map(|d| d.to_string()).collect();
            let _ = writeln!(
                out,
                "gluing: degenerate, fibers matched at {}",
                names.join(", ")
            );
        }
    }
    for (v, a) in atoroidal {
        let _ = writeln!(
            out,
            "vertex {v}: q_phi dominates q_J: {}, discriminant monotone: {}",
            a.dominates, a.discriminant_monotone
        );
    }
    out
}

pub fn enumeration_json(c: &Q, found: &GluingEnumeration) -> Value {
    let gluings: Vec<Value> = found
        .gluings
        .iter()
        .map(|g| {
            let mut v = distortion_json(&g.report);
            v["edge_classes"] = g
                .edge_classes
                .iter()
                .map(|(e, a)| json!({ "edge": e, "matrix": matrix(a.matrix()) }))
                .collect();
            v["indices"] = g
                .indices
                .iter()
                .map(|(id, k)| json!({ "vertex": id, "index": k }))
                .collect();
            v["gluing"] = gluing_json(&g.gluing);
            v
        })
        .collect();
    json!({
        "budget": rat(c),
        "cells": found.cells,
        "edge_class_counts": found
            .edge_class_counts
            .iter()
            .map(|(e, n)| json!({ "edge": e, "classes": n }))
            .collect::<Vec<_>>(),
        "count": found.gluings.len(),
        "gluings": gluings,
    })
}

pub fn enumeration_text(c: &Q, found: &GluingEnumeration) -> String {
    let mut out = format!(
        "{} gluings with primary distortion below {} ({} cells)\n",
        found.gluings.len(),
        format_rational(c),
        found.cells
    );
    for (e, n) in &found.edge_class_counts {
        let _ = writeln!(out, "edge {e}: {n} classes");
    }
    for (i, g) in found.gluings.iter().enumerate() {
        let _ = writeln!(out, "gluing {i}:");
        for (e, a) in &g.edge_classes {
            let _ = writeln!(out, "  class at edge {e}: {}", mat_text(a.matrix()));
        }
        if !g.indices.is_empty() {
            let idx: Vec<String> = g.indices.iter().map(|(v, k)| format!("v{v}={k}")).collect();
            let _ = writeln!(out, "  indices: {}", idx.join(" "));
        }
        for (d, a) in g.gluing.maps() {
            if d.side == 0 {
                let _ = writeln!(out, "  phi at {d}: {}", mat_text(a.matrix()));
            }
        }
        distortion_lines(&g.report, &mut out, "  ");
    }
    out
}

fn origin_json(map: &CoverMap) -> Value {
    let vertices: Vec<Value> = map
        .vertex_origin
        .iter()
        .map(|(v, (b, c))| json!({ "vertex": v, "base": b, "copy": c }))
        .collect();
    let edges: Vec<Value> = map
        .edge_origin
        .iter()
        .map(|(e, o)| match o {
            EdgeOrigin::Lift { edge, copy } => json!({ "edge": e, "base": edge, "copy": copy }),
            EdgeOrigin::Seam { vertex } => json!({ "edge": e, "seam": vertex }),
        })
        .collect();
    json!({ "vertices": vertices, "edges": edges })
}

pub struct CoverSummary<'a> {
    pub mode: &'a str,
    pub base: (usize, usize),
    pub cover: (usize, usize),
    pub components: usize,
    pub selected: usize,
    pub map: &'a CoverMap,
    pub document: Option<Value>,
}

pub fn cover_json(s: &CoverSummary) -> Value {
    json!({
        "mode": s.mode,
        "base": { "vertices": s.base.0, "edges": s.base.1 },
        "cover": { "vertices": s.cover.0, "edges": s.cover.1 },
        "components": s.components,
        "component": s.selected,
        "origin": origin_json(s.map),
        "document": s.document,
    })
}

pub fn cover_text(s: &CoverSummary) -> String {
    let mut out = format!(
        "{} double cover: vertices {}, edges {} (base: vertices {}, edges {})\n",
        s.mode, s.cover.0, s.cover.1, s.base.0, s.base.1
    );
    let _ = writeln!(
        out,
        "components: {} (selected {})",
        s.components, s.selected
    );
    for (v, (b, c)) in &s.map.vertex_origin {
        let _ = writeln!(out, "vertex {v} -> base {b} copy {c}");
    }
    for (e, o) in &s.map.edge_origin {
        match o {
            EdgeOrigin::Lift { edge, copy } => {
                let _ = writeln!(out, "edge {e} -> base {edge} copy {copy}");
            }
            EdgeOrigin::Seam { vertex } => {
                let _ = writeln!(out, "edge {e} -> seam of {vertex}");
            }
        }
    }
    out
}

pub fn seifert_json(raw: &str, inv: &SeifertInvariants, torsion: Option<u64>) -> Value {
    json!({
        "input": raw,
        "normalized": inv.to_string(),
        "g": inv.g,
        "b0": inv.b0,
        "pairs": inv.pairs.iter().map(|(a, b)| json!([b, a])).collect::<Vec<_>>(),
        "chi": rat(&inv.chi()),
        "euler": rat(&inv.euler_number()),
        "torsion_order": torsion,
        "h1_free_rank": torsion.map(|_| 2 * inv.g),
    })
}

pub fn seifert_text(inv: &SeifertInvariants, torsion: Option<u64>) -> String {
    let mut out = format!("normalized: {inv}\n");
    let _ = writeln!(out, "chi: {}", format_rational(&inv.chi()));
    let _ = writeln!(out, "e: {}", format_rational(&inv.euler_number()));
    match torsion {
        Some(t) => {
            let _ = writeln!(out, "|Tor H_1|: {t}");
            let _ = writeln!(out, "rank H_1: {}", 2 * inv.g);
        }
        None => out.push_str("|Tor H_1|: undefined (e = 0, H_1 has an extra free summand)\n"),
    }
    out
}

pub fn budget_json(r: &BudgetReport) -> Value {
    let enc = r.enclosure(DIGITS);
    json!({
        "pi_coefficient": rat(&r.pi_coefficient),
        "lo": enc.lo,
        "hi": enc.hi,
        "max_pieces": r.max_pieces,
        "max_tori": r.max_tori,
    })
}

pub fn budget_text(r: &BudgetReport) -> String {
    let mut out = format!("distortion budget: {}\n", r.enclosure(DIGITS));
    let _ = writeln!(
        out,
        "  = {} pi / sinh(eps3/2)",
        format_rational(&r.pi_coefficient)
    );
    let _ = writeln!(out, "max pieces: {}", r.max_pieces);
    let _ = writeln!(out, "max tori: {}", r.max_tori);
    out
}

fn candidate_json(c: &SeifertCandidate) -> Value {
    json!({
        "invariants": c.invariants.to_string(),
        "chi": rat(&c.chi),
        "euler": rat(&c.euler),
        "torsion_order": c.torsion,
    })
}

fn case_json(c: &CaseResult) -> Value {
    json!({
        "flags": c.flags.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "count": c.candidates.len(),
        "candidates": c.candidates.iter().map(candidate_json).collect::<Vec<_>>(),
    })
}

pub fn targets_json(r: &TargetReport) -> Value {
    json!({
        "torsion_bound": r.torsion_bound,
        "lens_orders": r.lens_orders,
        "positive": case_json(&r.positive),
        "zero": case_json(&r.zero),
        "negative": case_json(&r.negative),
        "e_floor_coefficient": r.e_floor_coefficient.as_ref().map(rat),
    })
}

fn case_text(name: &str, c: &CaseResult, out: &mut String) {
    let flags: Vec<String> = c.flags.iter().map(|f| f.to_string()).collect();
    let flags = if flags.is_empty() {
        String::new()
    } else {
        format!(" [{}]", flags.join(", "))
    };
    let _ = writeln!(out, "{name}: {} candidates{flags}", c.candidates.len());
    for s in &c.candidates {
        let _ = writeln!(
            out,
            "  {}  chi = {}, e = {}, |Tor H_1| = {}",
            s.invariants,
            format_rational(&s.chi),
            format_rational(&s.euler),
            s.torsion
        );
    }
}

pub fn targets_text(r: &TargetReport) -> String {
    let mut out = format!("torsion bound: {}\n", r.torsion_bound);
    let _ = writeln!(
        out,
        "lens spaces [COARSE]: |H_1| in 1..={}",
        r.lens_orders.last().copied().unwrap_or(0)
    );
    case_text("chi > 0", &r.positive, &mut out);
    case_text("chi = 0", &r.zero, &mut out);
    case_text("chi < 0", &r.negative, &mut out);
    if let Some(f) = &r.e_floor_coefficient {
        let _ = writeln!(out, "chi < 0: |e| >= {} chi^2", format_rational(f));
    }
    out
}
