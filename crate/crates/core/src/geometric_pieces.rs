//! Geometric pieces: atoroidal (hyperbolic) and Seifert-fibered vertex data,
//! their boundary forms and the image of `H_2(J, dJ)` in the boundary.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_lattice::{QForm, Sublattice};
use crate::rational::{qi, qr, Q};

/// Atoroidal piece. Cusp shapes and the boundary image lattice are input data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperbolicPieceData {
    /// Torus ids, in the order of the direct-sum coordinates.
    pub boundary_order: Vec<u32>,
    pub cusp_forms: Vec<QForm>,
    pub del_h2_basis: Sublattice,
}

/// One boundary torus of a Seifert piece in its basis `(x, lambda)`, where
/// `lambda` is the ordinary fiber and `<x, lambda> = +1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeifertTorus {
    pub id: u32,
    /// Divisibility of the projected section class, at least 1.
    pub divisibility: i64,
    /// `mu` in the basis `(x, lambda)`; its first coordinate is `<mu, lambda>`.
    pub mu: [i64; 2],
}

impl SeifertTorus {
    pub fn new(id: u32, mu: [i64; 2]) -> Self {
        SeifertTorus {
            id,
            divisibility: 1,
            mu,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeifertPieceData {
    pub base_orientable: bool,
    /// Orientable genus, or number of crosscaps for a non-orientable base.
    pub genus: u32,
    pub cone_orders: Vec<i64>,
    pub tori: Vec<SeifertTorus>,
}

/// The fiber class in every Seifert torus basis.
pub const FIBER: [i64; 2] = [0, 1];

impl SeifertPieceData {
    /// Least common multiple of the cone orders (1 without cone points).
    pub fn m(&self) -> i64 {
        self.cone_orders
            .iter()
            .fold(1i64, |acc, &a| num_integer::lcm(acc, a))
    }

    /// Orbifold Euler characteristic of the base.
    pub fn chi_orb(&self) -> Q {
        let closed = if self.base_orientable {
            qi(2 - 2 * self.genus as i64)
        } else {
            qi(2 - self.genus as i64)
        };
        let cones: Q = self
            .cone_orders
            .iter()
            .map(|&a| Q::one() - qr(1, a))
            .fold(Q::zero(), |x, y| x + y);
        closed - qi(self.tori.len() as i64) - cones
    }

    pub fn validate(&self) -> Result<()> {
        for (i, &a) in self.cone_orders.iter().enumerate() {
            if a < 2 {
                return Err(Error::validation(
                    format!("cone_orders[{i}]"),
                    format!("cone order {a} is below 2"),
                ));
            }
        }
        if !self.base_orientable && self.genus == 0 {
            return Err(Error::validation(
                "genus",
                "a non-orientable base needs at least one crosscap",
            ));
        }
        let chi = self.chi_orb();
        if !chi.is_negative() {
            return Err(Error::validation(
                "cone_orders",
                format!(
                    "base orbifold has Euler characteristic {}, expected < 0",
                    crate::rational::format_rational(&chi)
                ),
            ));
        }
        let m = self.m();
        let mut ids = BTreeSet::new();
        for (i, t) in self.tori.iter().enumerate() {
            if !ids.insert(t.id) {
                return Err(Error::validation(
                    format!("tori[{i}].id"),
                    format!("duplicate torus id {}", t.id),
                ));
            }
            if t.divisibility < 1 {
                return Err(Error::validation(
                    format!("tori[{i}].divisibility"),
                    "divisibility must be positive",
                ));
            }
            if t.mu[0] != m {
                return Err(Error::validation(
                    format!("tori[{i}].mu"),
                    format!(
                        "<mu, lambda> = {} but the lcm of the cone orders is {m}",
                        t.mu[0]
                    ),
                ));
            }
        }
        Ok(())
    }

    /// `q(a x + b lambda) = (a d)^2`.
    pub fn torus_form(&self, idx: usize) -> QForm {
        let d = self.tori[idx].divisibility;
        QForm::diag_int(&[d * d, 0]).expect("diagonal form is PSD")
    }

    /// Lift to the fiber-centralizer double cover of a piece over a
    /// non-orientable base. Torus `t` lifts to ids `2t` and `2t + 1`.
    pub fn piece_double_cover(&self) -> Result<SeifertPieceData> {
        if self.base_orientable {
            return Err(Error::Precondition(
                "double cover is only taken over a non-orientable base".into(),
            ));
        }
        let cone_orders = self.cone_orders.iter().flat_map(|&a| [a, a]).collect();
        let tori = self
            .tori
            .iter()
            .flat_map(|t| {
                (0..2).map(move |c| SeifertTorus {
                    id: 2 * t.id + c,
                    ..t.clone()
                })
            })
            .collect();
        Ok(SeifertPieceData {
            base_orientable: true,
            genus: self.genus - 1,
            cone_orders,
            tori,
        })
    }

    /// Basis `{lambda_i - lambda_(i+1)} + {sum_i mu_i}` of the boundary image.
    pub fn del_h2_lattice(&self) -> Result<Sublattice> {
        if !self.base_orientable {
            return Err(Error::Precondition(
                "pass a non-orientable piece through its double cover first".into(),
            ));
        }
        let n = self.tori.len();
        if n == 0 {
            return Ok(Sublattice::zero(0));
        }
        let mut rows = Vec::with_capacity(n);
        for i in 0..n - 1 {
            let mut r = vec![0; 2 * n];
            r[2 * i + 1] = 1;
            r[2 * i + 3] = -1;
            rows.push(r);
        }
        let mut mu = vec![0; 2 * n];
        for (i, t) in self.tori.iter().enumerate() {
            mu[2 * i] = t.mu[0];
            mu[2 * i + 1] = t.mu[1];
        }
        rows.push(mu);
        Sublattice::new(2 * n, rows)
    }
}

impl HyperbolicPieceData {
    pub fn validate(&self) -> Result<()> {
        let n = self.boundary_order.len();
        if self.cusp_forms.len() != n {
            return Err(Error::validation(
                "cusp_forms",
                format!("{} cusp forms for {n} boundary tori", self.cusp_forms.len()),
            ));
        }
        let mut ids = BTreeSet::new();
        for (i, &t) in self.boundary_order.iter().enumerate() {
            if !ids.insert(t) {
                return Err(Error::validation(
                    format!("boundary_order[{i}]"),
                    format!("duplicate torus id {t}"),
                ));
            }
        }
        for (i, q) in self.cusp_forms.iter().enumerate() {
            let path = format!("cusp_forms[{i}]");
            if q.rank() != 2 {
                return Err(Error::validation(path, "cusp form must have rank 2"));
            }
            if !q.is_positive_definite() {
                return Err(Error::validation(
                    path,
                    "cusp form must be positive-definite",
                ));
            }
            let min = q.minimum()?;
            if !min.is_one() {
                return Err(Error::validation(
                    path,
                    format!(
                        "cusp form is not normalized: minimum is {}, expected 1",
                        crate::rational::format_rational(&min)
                    ),
                ));
            }
        }
        if self.del_h2_basis.ambient_rank() != 2 * n || self.del_h2_basis.rank() != n {
            return Err(Error::validation(
                "del_h2_basis",
                format!(
                    "expected {n} vectors in rank {}, got {} in rank {}",
                    2 * n,
                    self.del_h2_basis.rank(),
                    self.del_h2_basis.ambient_rank()
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Piece {
    Hyperbolic(HyperbolicPieceData),
    Seifert(SeifertPieceData),
}

impl Piece {
    pub fn validate(&self) -> Result<()> {
        match self {
            Piece::Hyperbolic(h) => h.validate(),
            Piece::Seifert(s) => s.validate(),
        }
    }

    pub fn is_seifert(&self) -> bool {
        matches!(self, Piece::Seifert(_))
    }

    /// Seifert piece over a non-orientable base.
    pub fn is_semi(&self) -> bool {
        matches!(self, Piece::Seifert(s) if !s.base_orientable)
    }

    /// Boundary torus ids in direct-sum order.
    pub fn torus_ids(&self) -> Vec<u32> {
        match self {
            Piece::Hyperbolic(h) => h.boundary_order.clone(),
            Piece::Seifert(s) => s.tori.iter().map(|t| t.id).collect(),
        }
    }

    pub fn torus_count(&self) -> usize {
        self.torus_ids().len()
    }

    pub fn torus_position(&self, id: u32) -> Option<usize> {
        self.torus_ids().iter().position(|&t| t == id)
    }

    pub fn torus_form(&self, idx: usize) -> QForm {
        match self {
            Piece::Hyperbolic(h) => h.cusp_forms[idx].clone(),
            Piece::Seifert(s) => s.torus_form(idx),
        }
    }

    /// Direct sum of the per-torus forms.
    pub fn boundary_form(&self) -> QForm {
        let blocks: Vec<QForm> = (0..self.torus_count())
            .map(|i| self.torus_form(i))
            .collect();
        QForm::direct_sum(&blocks)
    }

    pub fn del_h2_lattice(&self) -> Result<Sublattice> {
        match self {
            Piece::Hyperbolic(h) => Ok(h.del_h2_basis.clone()),
            Piece::Seifert(s) => s.del_h2_lattice(),
        }
    }

    pub fn piece_double_cover(&self) -> Result<Piece> {
        match self {
            Piece::Seifert(s) => Ok(Piece::Seifert(s.piece_double_cover()?)),
            Piece::Hyperbolic(_) => Err(Error::Precondition(
                "only Seifert pieces have a fiber-centralizer cover".into(),
            )),
        }
    }
}
