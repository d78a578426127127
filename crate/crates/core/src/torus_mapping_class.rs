//! Automorphisms of the rank-2 lattice `H_1(T^2)`: Dehn twists, stabilizers of
//! boundary forms and bounded double-coset enumeration.
//!
//! Matrices act on column vectors, so column `j` is the image of `e_j`. The
//! intersection pairing is `<u, v> = u0*v1 - u1*v0`, i.e. `<e1, e2> = +1`.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_lattice::QForm;
use crate::rational::{ext_gcd, gcd_i64, qi, Q};

/// Row-major 2x2 integer matrix.
pub type Mat2 = [[i64; 2]; 2];

pub const IDENTITY: Mat2 = [[1, 0], [0, 1]];
pub const NEG_IDENTITY: Mat2 = [[-1, 0], [0, -1]];
/// The orientation-reversing swap of the two basis vectors.
pub const SWAP: Mat2 = [[0, 1], [1, 0]];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat_det(a: &Mat2) -> i64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Inverse of a unimodular matrix.
pub fn mat_inv(a: &Mat2) -> Mat2 {
    let d = mat_det(a);
    debug_assert!(d == 1 || d == -1);
    [[d * a[1][1], -d * a[0][1]], [-d * a[1][0], d * a[0][0]]]
}

pub fn mat_neg(a: &Mat2) -> Mat2 {
    [[-a[0][0], -a[0][1]], [-a[1][0], -a[1][1]]]
}

pub fn mat_apply(a: &Mat2, v: [i64; 2]) -> [i64; 2] {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

pub fn intersection(u: [i64; 2], v: [i64; 2]) -> i64 {
    u[0] * v[1] - u[1] * v[0]
}

fn max_abs(a: &Mat2) -> i64 {
    a.iter().flatten().map(|x| x.abs()).max().unwrap_or(0)
}

/// Unimodular 2x2 integer matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Mat2", into = "Mat2")]
pub struct TorusAuto {
    matrix: Mat2,
}

impl TryFrom<Mat2> for TorusAuto {
    type Error = Error;
    fn try_from(m: Mat2) -> Result<Self> {
        TorusAuto::new(m)
    }
}

impl From<TorusAuto> for Mat2 {
    fn from(a: TorusAuto) -> Mat2 {
        a.matrix
    }
}

impl TorusAuto {
    pub fn new(matrix: Mat2) -> Result<Self> {
        let d = mat_det(&matrix);
        if d != 1 && d != -1 {
            return Err(Error::validation(
                "",
                format!("matrix has determinant {d}, expected +1 or -1"),
            ));
        }
        Ok(TorusAuto { matrix })
    }

    pub fn identity() -> Self {
        TorusAuto { matrix: IDENTITY }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn det(&self) -> i64 {
        mat_det(&self.matrix)
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &TorusAuto) -> TorusAuto {
        TorusAuto {
            matrix: mat_mul(&self.matrix, &other.matrix),
        }
    }

    pub fn inverse(&self) -> TorusAuto {
        TorusAuto {
            matrix: mat_inv(&self.matrix),
        }
    }

    pub fn neg(&self) -> TorusAuto {
        TorusAuto {
            matrix: mat_neg(&self.matrix),
        }
    }

    pub fn apply(&self, v: [i64; 2]) -> [i64; 2] {
        mat_apply(&self.matrix, v)
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.matrix.iter().map(|r| r.to_vec()).collect()
    }
}

impl fmt::Display for TorusAuto {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.matrix;
        write!(f, "[[{},{}],[{},{}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

fn check_primitive(gamma: [i64; 2]) -> Result<()> {
    if gcd_i64(gamma[0], gamma[1]) != 1 {
        return Err(Error::InvalidSlope(format!(
            "({}, {}) is not primitive",
            gamma[0], gamma[1]
        )));
    }
    Ok(())
}

/// `zeta -> zeta + k <zeta, gamma> gamma`.
pub fn dehn_twist_power(gamma: [i64; 2], k: i64) -> Result<TorusAuto> {
    check_primitive(gamma)?;
    let [g0, g1] = gamma;
    Ok(TorusAuto {
        matrix: [
            [1 + k * g0 * g1, -k * g0 * g0],
            [k * g1 * g1, 1 - k * g0 * g1],
        ],
    })
}

/// The Dehn twist `zeta -> zeta + <zeta, gamma> gamma` along a primitive slope.
pub fn dehn_twist(gamma: [i64; 2]) -> Result<TorusAuto> {
    dehn_twist_power(gamma, 1)
}

/// `M^T G M`.
pub fn pullback_form(q: &QForm, a: &TorusAuto) -> Result<QForm> {
    if q.rank() != 2 {
        return Err(Error::Dimension(format!(
            "torus forms have rank 2, got {}",
            q.rank()
        )));
    }
    q.pullback_by(&a.rows())
}

fn gram2(q: &QForm) -> Result<[[Q; 2]; 2]> {
    if q.rank() != 2 {
        return Err(Error::Dimension(format!(
            "torus forms have rank 2, got {}",
            q.rank()
        )));
    }
    let g = q.gram();
    Ok([
        [g[0][0].clone(), g[0][1].clone()],
        [g[1][0].clone(), g[1][1].clone()],
    ])
}

/// Primitive generator of the kernel of a rank-2 form with kernel rank 1,
/// sign-normalized so that its first nonzero coordinate is positive.
pub fn kernel_vector(q: &QForm) -> Result<[i64; 2]> {
    if q.kernel_rank() != 1 {
        return Err(Error::Precondition(format!(
            "kernel rank is {}, expected 1",
            q.kernel_rank()
        )));
    }
    let g = gram2(q)?;
    let (x, y) = if !g[0][0].is_zero() {
        (-g[0][1].clone(), g[0][0].clone())
    } else {
        (qi(1), qi(0))
    };
    let den = num_integer::lcm(x.denom().clone(), y.denom().clone());
    let xi = x.numer() * (&den / x.denom());
    let yi = y.numer() * (&den / y.denom());
    let g = num_integer::gcd(xi.clone(), yi.clone());
    let mut v = [
        i64::try_from(&(xi / &g))
            .map_err(|_| Error::Unsupported("kernel vector overflow".into()))?,
        i64::try_from(&(yi / &g))
            .map_err(|_| Error::Unsupported("kernel vector overflow".into()))?,
    ];
    if v[0] < 0 || (v[0] == 0 && v[1] < 0) {
        v = [-v[0], -v[1]];
    }
    Ok(v)
}

/// All integer matrices with determinant +-1 preserving a positive-definite
/// rank-2 form, sorted.
pub fn isometry_group(q: &QForm) -> Result<Vec<TorusAuto>> {
    let g = gram2(q)?;
    if !q.is_positive_definite() {
        return Err(Error::Unsupported(
            "isometry group of a degenerate form is infinite".into(),
        ));
    }
    let cap = g[0][0].clone().max(g[1][1].clone());
    let vs = q.vectors_below(&cap, true)?;
    let first: Vec<&Vec<i64>> = vs.iter().filter(|v| q.eval(v) == g[0][0]).collect();
    let second: Vec<&Vec<i64>> = vs.iter().filter(|v| q.eval(v) == g[1][1]).collect();
    let mut out = Vec::new();
    for v in &first {
        for w in &second {
            let m = [[v[0], w[0]], [v[1], w[1]]];
            let d = mat_det(&m);
            if (d == 1 || d == -1) && q.bilinear(v, w) == g[0][1] {
                out.push(TorusAuto { matrix: m });
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Orientation-preserving isometries of a positive-definite rank-2 form.
pub fn special_isometry_group(q: &QForm) -> Result<Vec<TorusAuto>> {
    Ok(isometry_group(q)?
        .into_iter()
        .filter(|a| a.det() == 1)
        .collect())
}

/// Generators of the stabilizer of `q` in SL(2, Z).
///
/// Kernel rank 1: `{-I, D_gamma}` with `gamma` spanning the kernel. Kernel rank
/// 0: the whole (finite) stabilizer. Use [`isometry_group`] for the group
/// including orientation-reversing isometries.
pub fn stabilizer_generators(q: &QForm) -> Result<Vec<TorusAuto>> {
    gram2(q)?;
    match q.kernel_rank() {
        0 => special_isometry_group(q),
        1 => {
            let gamma = kernel_vector(q)?;
            Ok(vec![
                TorusAuto {
                    matrix: NEG_IDENTITY,
                },
                dehn_twist(gamma)?,
            ])
        }
        _ => Err(Error::Unsupported(
            "the stabilizer of the zero form is all of SL(2, Z)".into(),
        )),
    }
}

/// Which stabilizer subgroups act on the two sides of a double coset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StabilizerKind {
    /// The full stabilizer in SL(2, Z).
    Full,
    /// Only the twists along the kernel direction (trivial for definite forms).
    Twist,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleCosetRep {
    pub rep: TorusAuto,
    pub delta: Q,
    /// Canonical class label in the reduced coordinates of the search.
    pub normal_form: Mat2,
}

/// Record of how a coset search was bounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchCertificate {
    pub case: &'static str,
    /// The quantity that is bounded, in the reduced coordinates.
    pub quantity: &'static str,
    pub bound: Q,
    pub candidates: u64,
}

impl fmt::Display for SearchCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} < {} ({} candidates)",
            self.case,
            self.quantity,
            crate::rational::format_rational(&self.bound),
            self.candidates
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetEnumeration {
    pub reps: Vec<DoubleCosetRep>,
    pub certificate: SearchCertificate,
}

/// A side of the coset problem after moving the kernel (if any) to `e2`.
#[derive(Clone, Debug)]
enum Side {
    Zero,
    /// `U^T q U = diag(alpha, 0)`, `U e2` spans the kernel.
    Degenerate {
        u: Mat2,
        alpha: Q,
    },
    Definite {
        gram: [[Q; 2]; 2],
        group: Vec<Mat2>,
    },
}

impl Side {
    fn new(q: &QForm, kind: StabilizerKind) -> Result<Side> {
        let g = gram2(q)?;
        match q.kernel_rank() {
            2 => Ok(Side::Zero),
            1 => {
                let gamma = kernel_vector(q)?;
                // U = [[x, g0], [y, g1]] with x*g1 - g0*y = 1
                let (one, x, y) = ext_gcd(gamma[1], -gamma[0]);
                debug_assert_eq!(one, 1);
                let u = [[x, gamma[0]], [y, gamma[1]]];
                let alpha = q.eval(&[x, y]);
                Ok(Side::Degenerate { u, alpha })
            }
            _ => {
                let group = match kind {
                    StabilizerKind::Full => special_isometry_group(q)?
                        .into_iter()
                        .map(|a| a.matrix)
                        .collect(),
                    StabilizerKind::Twist => vec![IDENTITY],
                };
                Ok(Side::Definite { gram: g, group })
            }
        }
    }

    fn u(&self) -> Mat2 {
        match self {
            Side::Degenerate { u, .. } => *u,
            _ => IDENTITY,
        }
    }
}

/// Left twist `row2 += k row1` normalizing `d` (or `c` when `b = 0`).
fn left_twist_nf(m: Mat2) -> Mat2 {
    let [[a, b], [c, d]] = m;
    if b != 0 {
        let d = d.rem_euclid(b.abs());
        [[a, b], [(a * d - 1) / b, d]]
    } else {
        [[a, 0], [c.rem_euclid(a.abs()), d]]
    }
}

/// Right twist `col1 += j col2` normalizing `a` (or `c` when `b = 0`).
fn right_twist_nf(m: Mat2) -> Mat2 {
    let [[a, b], [c, d]] = m;
    if b != 0 {
        let a = a.rem_euclid(b.abs());
        [[a, b], [(a * d - 1) / b, d]]
    } else {
        [[a, 0], [c.rem_euclid(d.abs()), d]]
    }
}

/// The search problem for one pair of forms.
struct CosetProblem {
    left: Side,
    right: Side,
    kind: StabilizerKind,
    q: QForm,
    qp: QForm,
}

impl CosetProblem {
    fn new(q: &QForm, qp: &QForm, kind: StabilizerKind) -> Result<Self> {
        let left = Side::new(q, kind)?;
        let right = Side::new(qp, kind)?;
        if matches!(left, Side::Zero) && matches!(right, Side::Zero) {
            return Err(Error::Unsupported(
                "double cosets of two zero forms are not enumerated".into(),
            ));
        }
        if kind == StabilizerKind::Twist
            && (matches!(left, Side::Zero) || matches!(right, Side::Zero))
        {
            return Err(Error::Unsupported(
                "twist classes are undefined for the zero form".into(),
            ));
        }
        Ok(CosetProblem {
            left,
            right,
            kind,
            q: q.clone(),
            qp: qp.clone(),
        })
    }

    fn signs(&self) -> &'static [i64] {
        match self.kind {
            StabilizerKind::Full => &[1, -1],
            StabilizerKind::Twist => &[1],
        }
    }

    fn to_reduced(&self, sigma: &Mat2) -> Mat2 {
        mat_mul(&mat_mul(&mat_inv(&self.left.u()), sigma), &self.right.u())
    }

    fn lift_reduced(&self, hat: &Mat2) -> Mat2 {
        mat_mul(&mat_mul(&self.left.u(), hat), &mat_inv(&self.right.u()))
    }

    /// Canonical label of the class of `sigma` (original coordinates).
    fn normal_form(&self, sigma: &Mat2) -> Mat2 {
        let hat = self.to_reduced(sigma);
        match (&self.left, &self.right) {
            (Side::Zero, _) | (_, Side::Zero) => IDENTITY,
            (Side::Degenerate { .. }, Side::Degenerate { .. }) => self
                .signs()
                .iter()
                .map(|&s| {
                    let m = if s == 1 { hat } else { mat_neg(&hat) };
                    left_twist_nf(right_twist_nf(m))
                })
                .min()
                .expect("nonempty"),
            (Side::Degenerate { .. }, Side::Definite { group, .. }) => {
                let mut best: Option<Mat2> = None;
                for &s in self.signs() {
                    for f in group {
                        let mut m = mat_mul(&hat, f);
                        if s == -1 {
                            m = mat_neg(&m);
                        }
                        let nf = left_twist_nf(m);
                        best = Some(best.map_or(nf, |b| b.min(nf)));
                    }
                }
                best.expect("nonempty")
            }
            (Side::Definite { group, .. }, Side::Degenerate { .. }) => {
                let mut best: Option<Mat2> = None;
                for &s in self.signs() {
                    for f in group {
                        let mut m = mat_mul(f, &hat);
                        if s == -1 {
                            m = mat_neg(&m);
                        }
                        let nf = right_twist_nf(m);
                        best = Some(best.map_or(nf, |b| b.min(nf)));
                    }
                }
                best.expect("nonempty")
            }
            (Side::Definite { group: gl, .. }, Side::Definite { group: gr, .. }) => {
                let mut best: Option<Mat2> = None;
                for f in gl {
                    for fp in gr {
                        let m = mat_mul(&mat_mul(f, &hat), fp);
                        best = Some(best.map_or(m, |b| b.min(m)));
                    }
                }
                best.expect("nonempty")
            }
        }
    }

    fn delta(&self, sigma: &Mat2) -> Q {
        let a = TorusAuto { matrix: *sigma };
        let pulled = pullback_form(&self.q, &a).expect("rank checked");
        pulled.add(&self.qp).expect("rank checked").determinant()
    }

    /// Candidate matrices (reduced coordinates) covering every class with
    /// `0 < delta < c`, plus the certificate describing the bound.
    fn candidates(&self, c: &Q) -> Result<(Vec<Mat2>, &'static str, &'static str, Q)> {
        let mut out = Vec::new();
        match (&self.left, &self.right) {
            (Side::Zero, Side::Definite { .. }) | (Side::Definite { .. }, Side::Zero) => {
                out.push(IDENTITY);
                Ok((out, "zero-form", "1 (single class)", c.clone()))
            }
            (Side::Zero, _) | (_, Side::Zero) => Ok((out, "zero-form", "0 (no class)", c.clone())),
            (Side::Degenerate { alpha, .. }, Side::Degenerate { alpha: alpha_p, .. }) => {
                // delta = alpha alpha' b^2
                let bound = c / (alpha * alpha_p);
                let mut b = 1i64;
                while qi(b * b) < bound {
                    let bs: &[i64] = if self.kind == StabilizerKind::Full {
                        &[1]
                    } else {
                        &[1, -1]
                    };
                    for &s in bs {
                        for a in 0..b {
                            if gcd_i64(a, b) != 1 {
                                continue;
                            }
                            let (_, inv, _) = ext_gcd(a, b);
                            let d = inv.rem_euclid(b);
                            let m = [[a, s * b], [(a * d - 1) / (s * b), d]];
                            out.push(left_twist_nf(right_twist_nf(m)));
                        }
                    }
                    b += 1;
                }
                Ok((out, "degenerate/degenerate", "b^2", bound))
            }
            (Side::Degenerate { alpha, .. }, Side::Definite { gram, .. }) => {
                // delta = det G' + alpha * adj(G')(r), r the first reduced row
                let det = &gram[0][0] * &gram[1][1] - &gram[0][1] * &gram[0][1];
                let bound = (c - &det) / alpha;
                let adj = QForm::new(vec![
                    vec![gram[1][1].clone(), -gram[0][1].clone()],
                    vec![-gram[0][1].clone(), gram[0][0].clone()],
                ])?;
                for r in adj.vectors_below(&bound, false)? {
                    let (g, x, y) = ext_gcd(r[0], r[1]);
                    if g != 1 {
                        continue;
                    }
                    out.push([[r[0], r[1]], [-y, x]]);
                }
                Ok((out, "degenerate/definite", "adj(G')(row 1)", bound))
            }
            (Side::Definite { gram, .. }, Side::Degenerate { alpha, .. }) => {
                // delta = det G + alpha' * G(column 2)
                let det = &gram[0][0] * &gram[1][1] - &gram[0][1] * &gram[0][1];
                let bound = (c - &det) / alpha;
                for col in self.q.vectors_below(&bound, false)? {
                    let (b, d) = (col[0], col[1]);
                    let (g, x, y) = ext_gcd(d, -b);
                    if g != 1 {
                        continue;
                    }
                    // a d - b c = 1 with a = x, c = y
                    out.push([[x, b], [y, d]]);
                }
                Ok((out, "definite/degenerate", "G(column 2)", bound))
            }
            (Side::Definite { gram, .. }, Side::Definite { gram: gp, .. }) => {
                // delta >= det G + det G' + (det G' / tr G') (G(col 1) + G(col 2))
                let det = &gram[0][0] * &gram[1][1] - &gram[0][1] * &gram[0][1];
                let detp = &gp[0][0] * &gp[1][1] - &gp[0][1] * &gp[0][1];
                let tr = &gp[0][0] + &gp[1][1];
                let bound = (c - &det - &detp) * tr / detp;
                let vs = self.q.vectors_below(&bound, false)?;
                let vals: Vec<Q> = vs.iter().map(|v| self.q.eval(v)).collect();
                for (i, v) in vs.iter().enumerate() {
                    for (j, w) in vs.iter().enumerate() {
                        if v[0] * w[1] - v[1] * w[0] == 1 && &vals[i] + &vals[j] < bound {
                            out.push([[v[0], w[0]], [v[1], w[1]]]);
                        }
                    }
                }
                Ok((out, "definite/definite", "G(column 1) + G(column 2)", bound))
            }
        }
    }

    /// Smallest member of the class under the key `(x < 0, |x|)` entrywise,
    /// searched in the box spanned by the reduced representative.
    fn display_rep(&self, nf: &Mat2) -> Mat2 {
        const BOX_CAP: i64 = 12;
        let fallback = self.lift_reduced(nf);
        let bx = max_abs(&fallback);
        if bx > BOX_CAP {
            return fallback;
        }
        let key = |m: &Mat2| {
            let mut k = [(false, 0i64); 4];
            for (i, x) in m.iter().flatten().enumerate() {
                k[i] = (*x < 0, x.abs());
            }
            k
        };
        let mut best = fallback;
        let mut best_key = key(&best);
        for a in -bx..=bx {
            for b in -bx..=bx {
                for c in -bx..=bx {
                    let ds: Vec<i64> = if a != 0 {
                        if (1 + b * c) % a == 0 {
                            vec![(1 + b * c) / a]
                        } else {
                            vec![]
                        }
                    } else if b * c == -1 {
                        (-bx..=bx).collect()
                    } else {
                        vec![]
                    };
                    for d in ds {
                        if d.abs() > bx {
                            continue;
                        }
                        let m = [[a, b], [c, d]];
                        let k = key(&m);
                        if k < best_key && self.normal_form(&m) == *nf {
                            best = m;
                            best_key = k;
                        }
                    }
                }
            }
        }
        best
    }
}

/// Classes `Gamma sigma Gamma'` in SL(2, Z) with `0 < disc(q sigma + q') < c`,
/// where `q sigma` is the pullback `sigma^T q sigma`.
pub fn double_coset_enumeration(
    q: &QForm,
    qp: &QForm,
    c: &Q,
    kind: StabilizerKind,
) -> Result<CosetEnumeration> {
    if !c.is_positive() {
        return Err(Error::Precondition("bound C must be positive".into()));
    }
    let problem = CosetProblem::new(q, qp, kind)?;
    let (cands, case, quantity, bound) = problem.candidates(c)?;
    let candidates = cands.len() as u64;
    let mut classes: BTreeSet<Mat2> = BTreeSet::new();
    for hat in cands {
        let sigma = problem.lift_reduced(&hat);
        let delta = problem.delta(&sigma);
        if delta.is_positive() && delta < *c {
            classes.insert(problem.normal_form(&sigma));
        }
    }
    let mut reps: Vec<DoubleCosetRep> = classes
        .into_iter()
        .map(|nf| {
            let rep = problem.display_rep(&nf);
            DoubleCosetRep {
                rep: TorusAuto { matrix: rep },
                delta: problem.delta(&rep),
                normal_form: nf,
            }
        })
        .collect();
    reps.sort_by(|x, y| (&x.delta, x.rep).cmp(&(&y.delta, y.rep)));
    Ok(CosetEnumeration {
        reps,
        certificate: SearchCertificate {
            case,
            quantity,
            bound,
            candidates,
        },
    })
}

/// One representative per double coset of the full SL(2, Z) stabilizers.
pub fn double_coset_reps(q: &QForm, qp: &QForm, c: &Q) -> Result<Vec<DoubleCosetRep>> {
    Ok(double_coset_enumeration(q, qp, c, StabilizerKind::Full)?.reps)
}

/// One representative per class modulo kernel twists only.
pub fn twist_coset_reps(q: &QForm, qp: &QForm, c: &Q) -> Result<Vec<DoubleCosetRep>> {
    Ok(double_coset_enumeration(q, qp, c, StabilizerKind::Twist)?.reps)
}

/// Class label of `sigma` for the given pair of forms; two matrices lie in the
/// same class iff their labels agree.
pub fn coset_normal_form(
    q: &QForm,
    qp: &QForm,
    sigma: &TorusAuto,
    kind: StabilizerKind,
) -> Result<Mat2> {
    if sigma.det() != 1 {
        return Err(Error::Precondition("coset classes live in SL(2, Z)".into()));
    }
    Ok(CosetProblem::new(q, qp, kind)?.normal_form(sigma.matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn form(rows: [[i64; 2]; 2]) -> QForm {
        QForm::from_int_rows(&[rows[0].to_vec(), rows[1].to_vec()]).unwrap()
    }

    #[test]
    fn twist_along_second_basis_vector() {
        let d = dehn_twist([0, 1]).unwrap();
        assert_eq!(d.apply([1, 0]), [1, 1]);
        assert_eq!(d.apply([0, 1]), [0, 1]);
        assert_eq!(*d.matrix(), [[1, 0], [1, 1]]);
        assert_eq!(d, dehn_twist([0, -1]).unwrap());
        assert!(matches!(dehn_twist([2, 4]), Err(Error::InvalidSlope(_))));
    }

    #[test]
    fn pullback_examples() {
        let id = QForm::identity(2);
        assert_eq!(pullback_form(&id, &TorusAuto::identity()).unwrap(), id);
        let swap = TorusAuto::new(SWAP).unwrap();
        assert_eq!(pullback_form(&id, &swap).unwrap(), id);
        let q = QForm::diag_int(&[1, 0]).unwrap();
        let t = TorusAuto::new([[1, 0], [5, 1]]).unwrap();
        assert_eq!(pullback_form(&q, &t).unwrap(), q);
    }

    #[test]
    fn stabilizers() {
        let q = QForm::diag_int(&[1, 0]).unwrap();
        let gens = stabilizer_generators(&q).unwrap();
        assert_eq!(gens[0].matrix(), &NEG_IDENTITY);
        assert_eq!(gens[1].matrix(), &[[1, 0], [1, 1]]);
        assert_eq!(isometry_group(&QForm::identity(2)).unwrap().len(), 8);
        assert_eq!(stabilizer_generators(&QForm::identity(2)).unwrap().len(), 4);
        let g = stabilizer_generators(&QForm::diag_int(&[2, 3]).unwrap()).unwrap();
        assert_eq!(
            g.iter().map(|a| *a.matrix()).collect::<Vec<_>>(),
            vec![NEG_IDENTITY, IDENTITY]
        );
        assert!(matches!(
            stabilizer_generators(&QForm::zero(2)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn kernel_vectors() {
        assert_eq!(kernel_vector(&form([[1, 1], [1, 1]])).unwrap(), [1, -1]);
        assert_eq!(kernel_vector(&form([[4, 2], [2, 1]])).unwrap(), [1, -2]);
        assert_eq!(kernel_vector(&form([[0, 0], [0, 3]])).unwrap(), [1, 0]);
    }

    #[test]
    fn degenerate_pair_reps() {
        let q = QForm::diag_int(&[1, 0]).unwrap();
        let qp = QForm::diag_int(&[0, 1]).unwrap();
        let reps = double_coset_reps(&q, &qp, &qi(5)).unwrap();
        assert_eq!(reps.len(), 2);
        assert_eq!(reps[0].rep.matrix(), &IDENTITY);
        assert_eq!(reps[0].delta, qi(1));
        assert_eq!(reps[1].rep.matrix(), &[[2, 1], [1, 1]]);
        assert_eq!(reps[1].delta, qi(4));
        assert!(double_coset_reps(&q, &qp, &qi(1)).unwrap().is_empty());
        assert!(matches!(
            double_coset_reps(&QForm::zero(2), &QForm::zero(2), &qi(3)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn twist_classes_split_signs() {
        let q = QForm::diag_int(&[1, 0]).unwrap();
        let qp = QForm::diag_int(&[0, 1]).unwrap();
        assert_eq!(twist_coset_reps(&q, &qp, &qi(5)).unwrap().len(), 4);
    }

    #[test]
    fn zero_form_single_class() {
        let reps = double_coset_reps(&QForm::zero(2), &QForm::identity(2), &qi(2)).unwrap();
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].delta, qi(1));
        assert!(
            double_coset_reps(&QForm::zero(2), &QForm::identity(2), &qi(1))
                .unwrap()
                .is_empty()
        );
    }

    fn sl2() -> impl Strategy<Value = Mat2> {
        (-4i64..=4, -4i64..=4).prop_filter_map("primitive", |(a, c)| {
            let (g, x, y) = ext_gcd(a, c);
            // a*x + c*y = 1 -> [[a, -y], [c, x]]
            (g == 1).then_some([[a, -y], [c, x]])
        })
    }

    fn word(gens: &[TorusAuto], idx: &[usize]) -> Mat2 {
        idx.iter().fold(IDENTITY, |acc, &i| {
            mat_mul(&acc, gens[i % gens.len()].matrix())
        })
    }

    proptest! {
        #[test]
        fn twist_powers_add(g0 in -5i64..=5, g1 in -5i64..=5, j in -6i64..=6, k in -6i64..=6) {
            prop_assume!(gcd_i64(g0, g1) == 1);
            let a = dehn_twist_power([g0, g1], j).unwrap();
            let b = dehn_twist_power([g0, g1], k).unwrap();
            prop_assert_eq!(a.compose(&b), dehn_twist_power([g0, g1], j + k).unwrap());
            prop_assert_eq!(a.compose(&b), b.compose(&a));
            let mut acc = TorusAuto::identity();
            let d = dehn_twist([g0, g1]).unwrap();
            for _ in 0..j.abs() {
                acc = acc.compose(&if j > 0 { d } else { d.inverse() });
            }
            prop_assert_eq!(acc, a);
        }

        #[test]
        fn delta_constant_on_double_cosets(
            sigma in sl2(),
            left in proptest::collection::vec(0usize..8, 0..4),
            right in proptest::collection::vec(0usize..8, 0..4),
            which in 0usize..4,
        ) {
            let forms = [
                form([[1, 0], [0, 0]]),
                form([[2, 1], [1, 3]]),
                form([[4, 2], [2, 1]]),
                QForm::identity(2),
            ];
            let q = &forms[which];
            let qp = &forms[(which + 1) % 4];
            let gl = stabilizer_generators(q).unwrap();
            let gr = stabilizer_generators(qp).unwrap();
            let moved = mat_mul(&mat_mul(&word(&gl, &left), &sigma), &word(&gr, &right));
            let p = CosetProblem::new(q, qp, StabilizerKind::Full).unwrap();
            prop_assert_eq!(p.delta(&sigma), p.delta(&moved));
            prop_assert_eq!(p.normal_form(&sigma), p.normal_form(&moved));
        }

        #[test]
        fn stabilizers_contain_minus_identity(a in 1i64..5, b in -3i64..=3, c in 1i64..5) {
            prop_assume!(a * c - b * b > 0);
            let q = form([[a, b], [b, c]]);
            let g = stabilizer_generators(&q).unwrap();
            prop_assert!(g.iter().any(|x| x.matrix() == &NEG_IDENTITY));
            for x in &g {
                prop_assert_eq!(&pullback_form(&q, x).unwrap(), &q);
            }
        }
    }
}
