//! Benchmark fixtures shared by the criterion harness.

use glueprint_core::exact_lattice::QForm;
use glueprint_core::rational::{qi, qr};
use glueprint_core::{samples, DominationBudget, Gluing, PreglueGraph, Q};

/// Degenerate and definite boundary forms, as met on Seifert and cusped ends.
pub fn form_pairs() -> Vec<(&'static str, QForm, QForm)> {
    let fiber = QForm::diag_int(&[1, 0]).unwrap();
    let other = QForm::diag_int(&[0, 1]).unwrap();
    let square = QForm::identity(2);
    let hex = QForm::new(vec![vec![qi(1), qr(1, 2)], vec![qr(1, 2), qi(1)]]).unwrap();
    vec![
        ("seifert-seifert", fiber.clone(), other),
        ("seifert-cusp", fiber, square.clone()),
        ("cusp-cusp", hex, square),
    ]
}

pub fn twist_edge() -> (PreglueGraph, Gluing) {
    samples::square_cusp_edge(3)
}

pub fn semi_vertex() -> (PreglueGraph, Gluing) {
    samples::semi_vertex_instance()
}

/// Preglue graphs with the budgets they are swept at.
pub fn sweeps() -> Vec<(&'static str, PreglueGraph, Q)> {
    vec![
        ("square-cusps", samples::square_cusp_edge(0).0, qi(2)),
        (
            "seifert-pair",
            samples::seifert_pair([[0, 1], [1, 0]]).0,
            qr(15, 2),
        ),
    ]
}

pub fn target_budget() -> DominationBudget {
    DominationBudget {
        d: Some(1),
        h1_mod_d_order: Some(2),
        tor_m_order: Some(3),
        sv_m: Some(qi(2)),
        lens_order_cap: Some(12),
        ..Default::default()
    }
}
