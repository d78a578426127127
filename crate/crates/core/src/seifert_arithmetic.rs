//! Closed Seifert invariants over orientable bases, their homology, the
//! distortion budget and the candidate targets of a domination bound.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{gcd_i64, interval_enclosure, pow, qb, qi, qr, to_i64, DecimalEnclosure, Q};

/// Normalized `(g; b0, b1/a1, ..., bs/as)` with `0 < bi < ai` coprime.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeifertInvariants {
    pub g: u32,
    pub b0: i64,
    /// `(a_i, b_i)`.
    pub pairs: Vec<(i64, i64)>,
}

impl SeifertInvariants {
    /// Reduces every `b_i` into `[0, a_i)`, moving the excess into `b0` so that
    /// the Euler number is unchanged; pairs reducing to 0 are dropped.
    pub fn normalize(g: u32, b0: i64, raw: &[(i64, i64)]) -> Result<Self> {
        let mut b0 = b0;
        let mut pairs = Vec::with_capacity(raw.len());
        for (i, &(a, b)) in raw.iter().enumerate() {
            if a < 2 {
                return Err(Error::InvalidConeOrder(format!(
                    "pair {i}: cone order {a} is below 2"
                )));
            }
            if gcd_i64(a, b) != 1 {
                return Err(Error::InvalidConeOrder(format!(
                    "pair {i}: {b}/{a} is not in lowest terms"
                )));
            }
            b0 += b.div_euclid(a);
            let r = b.rem_euclid(a);
            if r != 0 {
                pairs.push((a, r));
            }
        }
        Ok(SeifertInvariants { g, b0, pairs })
    }

    pub fn cone_orders(&self) -> Vec<i64> {
        self.pairs.iter().map(|&(a, _)| a).collect()
    }

    pub fn chi(&self) -> Q {
        chi(self.g, &self.cone_orders())
    }

    /// `e = -b0 - sum b_i / a_i`.
    pub fn euler_number(&self) -> Q {
        self.pairs
            .iter()
            .fold(-qi(self.b0), |acc, &(a, b)| acc - qr(b, a))
    }

    pub fn cone_product(&self) -> i64 {
        self.pairs.iter().map(|&(a, _)| a).product()
    }

    /// `|Tor H_1| = |e| prod a_i`; needs `e != 0`.
    pub fn torsion_order(&self) -> Result<u64> {
        let e = self.euler_number();
        if e.is_zero() {
            return Err(Error::FormulaInapplicable(
                "torsion formula needs a nonzero Euler number".into(),
            ));
        }
        let t = e.abs() * qi(self.cone_product());
        assert!(t.is_integer(), "|e| prod a is an integer");
        u64::try_from(t.numer()).map_err(|_| Error::Unsupported("torsion order overflows".into()))
    }
}

impl fmt::Display for SeifertInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {}", self.g, self.b0)?;
        for (a, b) in &self.pairs {
            write!(f, ", {b}/{a}")?;
        }
        write!(f, ")")
    }
}

/// `chi = 2 - 2g - sum (1 - 1/a_i)` of a closed orientable base orbifold.
pub fn chi(g: u32, cone_orders: &[i64]) -> Q {
    cone_orders
        .iter()
        .fold(qi(2 - 2 * g as i64), |acc, &a| acc - (Q::one() - qr(1, a)))
}

/// `d |H_1(M; Z_d)| |Tor H_1(M)|`.
pub fn torsion_bound(d: u64, h1_mod_d_order: u64, tor_m_order: u64) -> Result<u64> {
    if d == 0 || h1_mod_d_order == 0 || tor_m_order == 0 {
        return Err(Error::Precondition(
            "degree and orders must be positive".into(),
        ));
    }
    d.checked_mul(h1_mod_d_order)
        .and_then(|x| x.checked_mul(tor_m_order))
        .ok_or_else(|| Error::Unsupported("torsion bound overflows".into()))
}

/// `|H_1(M; Z_d)|` for `H_1(M) = Z^rank + sum Z/t_i`.
pub fn h1_mod_d_order(d: u64, rank: u32, torsion: &[u64]) -> u64 {
    let free = d.pow(rank);
    torsion
        .iter()
        .fold(free, |acc, &t| acc * num_integer::gcd(t, d))
}

/// Coefficient of `pi` in `A(n) = 27^n (9n^2 + 4n) pi`.
pub fn area_constant(n: u64) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::Precondition("A(n) is defined for n >= 1".into()));
    }
    let n_big = BigInt::from(n);
    Ok(Pow::pow(BigInt::from(27), n)
        * (BigInt::from(9) * &n_big * &n_big + BigInt::from(4) * &n_big))
}

/// Rational enclosure of pi.
pub fn pi_bounds() -> (Q, Q) {
    let lo: BigInt = "31415926535897932384626433832795028"
        .parse()
        .expect("digits");
    let scale: BigInt = Pow::pow(BigInt::from(10), 34u32);
    let lo = Q::new(lo, scale.clone());
    let hi = &lo + Q::new(BigInt::one(), scale);
    (lo, hi)
}

/// Rational enclosure of `sinh(x)` for `x > 0` with relative width below
/// `10^-30`, from the Taylor series and a geometric tail bound.
pub fn sinh_bounds(x: &Q) -> (Q, Q) {
    assert!(x.is_positive());
    let x2 = x * x;
    let mut term = x.clone();
    let mut sum = Q::zero();
    let mut k: i64 = 0;
    let tol = Q::new(BigInt::one(), Pow::pow(BigInt::from(10), 30u32));
    loop {
        sum += &term;
        // next term and the ratio of all later consecutive terms
        let next = &term * &x2 / qi((2 * k + 2) * (2 * k + 3));
        let ratio = &x2 / qi((2 * k + 4) * (2 * k + 5));
        k += 1;
        if ratio < qr(1, 2) && next < &tol * &sum {
            let tail = &next / (Q::one() - ratio);
            return (sum.clone(), sum + tail);
        }
        term = next;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominationBudget {
    pub t: u64,
    pub h: u64,
    pub eps3: Q,
    pub sv_m: Option<Q>,
    pub d: Option<u64>,
    pub h1_mod_d_order: Option<u64>,
    pub tor_m_order: Option<u64>,
    pub lens_order_cap: Option<u64>,
}

impl Default for DominationBudget {
    fn default() -> Self {
        DominationBudget {
            t: 1,
            h: 1,
            eps3: qr(1, 10),
            sv_m: None,
            d: None,
            h1_mod_d_order: None,
            tor_m_order: None,
            lens_order_cap: None,
        }
    }
}

impl DominationBudget {
    pub fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::validation("t", "t must be at least 1"));
        }
        if !self.eps3.is_positive() {
            return Err(Error::validation("eps3", "eps3 must be positive"));
        }
        if let Some(sv) = &self.sv_m {
            if sv.is_negative() {
                return Err(Error::validation(
                    "sv_m",
                    "Seifert volume must be nonnegative",
                ));
            }
        }
        if self.d == Some(0) {
            return Err(Error::validation("d", "degree must be positive"));
        }
        Ok(())
    }

    /// Torsion bound of the targets, when degree and orders are given.
    pub fn torsion_bound(&self) -> Result<u64> {
        let d = self
            .d
            .ok_or_else(|| Error::Precondition("degree d is required".into()))?;
        let h1 = self
            .h1_mod_d_order
            .ok_or_else(|| Error::Precondition("h1_mod_d_order is required".into()))?;
        let tor = self
            .tor_m_order
            .ok_or_else(|| Error::Precondition("tor_m_order is required".into()))?;
        torsion_bound(d, h1, tor)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BudgetReport {
    /// Exact coefficient of `pi` in `A(2t) / 4`.
    pub pi_coefficient: Q,
    pub sinh_lo: Q,
    pub sinh_hi: Q,
    /// Enclosure of `A(2t) / (4 sinh(eps3 / 2))`.
    pub lo: Q,
    pub hi: Q,
    /// Bound on the number of geometric pieces of a dominated target.
    pub max_pieces: u64,
    /// Bound on the number of decomposition tori.
    pub max_tori: u64,
}

impl BudgetReport {
    pub fn enclosure(&self, digits: u32) -> DecimalEnclosure {
        interval_enclosure(&self.lo, &self.hi, digits)
    }

    pub fn relative_width(&self) -> Q {
        (&self.hi - &self.lo) / &self.lo
    }
}

/// `A(2t) / (4 sinh(eps3 / 2))` as an exact multiple of `pi` over an enclosed
/// `sinh`, together with the piece-count bounds `h + 1` and `h`.
pub fn distortion_budget(budget: &DominationBudget) -> Result<BudgetReport> {
    budget.validate()?;
    let two_t = budget
        .t
        .checked_mul(2)
        .ok_or_else(|| Error::Unsupported("t is too large".into()))?;
    let pi_coefficient = Q::from_integer(area_constant(two_t)?) / qi(4);
    let (sinh_lo, sinh_hi) = sinh_bounds(&(&budget.eps3 / qi(2)));
    let (pi_lo, pi_hi) = pi_bounds();
    let lo = &pi_coefficient * pi_lo / &sinh_hi;
    let hi = &pi_coefficient * pi_hi / &sinh_lo;
    Ok(BudgetReport {
        pi_coefficient,
        sinh_lo,
        sinh_hi,
        lo,
        hi,
        max_pieces: budget.h + 1,
        max_tori: budget.h,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SeifertCandidate {
    pub invariants: SeifertInvariants,
    pub chi: Q,
    pub euler: Q,
    pub torsion: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CaseFlag {
    /// Lens spaces are listed by torsion order only.
    Coarse,
    /// A required input is missing, so this case is not enumerated.
    UnboundedByInputs,
}

impl fmt::Display for CaseFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseFlag::Coarse => write!(f, "COARSE"),
            CaseFlag::UnboundedByInputs => write!(f, "UNBOUNDED-BY-INPUTS"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CaseResult {
    pub flags: Vec<CaseFlag>,
    pub candidates: Vec<SeifertCandidate>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetReport {
    pub torsion_bound: u64,
    /// `chi > 0`: lens spaces by order of `H_1`, 1 ..= T.
    pub lens_orders: Vec<u64>,
    /// `chi > 0`: platonic and prism candidates.
    pub positive: CaseResult,
    pub zero: CaseResult,
    pub negative: CaseResult,
    /// Lower bound `d chi^2 / sv_M` on `|e|` in the `chi < 0` case, per base.
    pub e_floor_coefficient: Option<Q>,
}

struct Collector {
    limit: u64,
    t: u64,
    out: Vec<SeifertCandidate>,
}

impl Collector {
    /// All normalized data over the base `(g, cones)` with `e != 0`,
    /// `|e| prod a <= T` and `|e| >= e_floor`.
    ///
    /// Writing `P = prod a` and `w_i = P / a_i`, `-e P = b0 P + sum b_i w_i`.
    /// The residues are chosen depth first; after step `i` the remaining terms
    /// are multiples of `G_i = gcd(P, w_j : j >= i)`, so the partial sum must lie
    /// within `T` of a multiple of `G_i`.
    fn base(&mut self, g: u32, cones: &[i64], e_floor: Option<&Q>) -> Result<()> {
        let p: i128 = cones.iter().map(|&a| a as i128).product();
        let w: Vec<i128> = cones.iter().map(|&a| p / a as i128).collect();
        let mut suffix_gcd = vec![p; cones.len() + 1];
        for i in (0..cones.len()).rev() {
            suffix_gcd[i] = num_integer::gcd(suffix_gcd[i + 1], w[i]);
        }
        let mut chosen = Vec::with_capacity(cones.len());
        self.descend(g, cones, &w, &suffix_gcd, p, 0, &mut chosen, e_floor)
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &mut self,
        g: u32,
        cones: &[i64],
        w: &[i128],
        suffix_gcd: &[i128],
        p: i128,
        partial: i128,
        chosen: &mut Vec<i64>,
        e_floor: Option<&Q>,
    ) -> Result<()> {
        let t = self.t as i128;
        let i = chosen.len();
        let modulus = suffix_gcd[i];
        let r = partial.rem_euclid(modulus);
        if r > t && modulus - r > t {
            return Ok(());
        }
        if i == cones.len() {
            return self.emit(g, cones, chosen, p, partial, e_floor);
        }
        for b in 1..cones[i] {
            if gcd_i64(cones[i], b) != 1 {
                continue;
            }
            chosen.push(b);
            let next = partial + b as i128 * w[i];
            self.descend(g, cones, w, suffix_gcd, p, next, chosen, e_floor)?;
            chosen.pop();
        }
        Ok(())
    }

    fn emit(
        &mut self,
        g: u32,
        cones: &[i64],
        chosen: &[i64],
        p: i128,
        s: i128,
        e_floor: Option<&Q>,
    ) -> Result<()> {
        let t = self.t as i128;
        let lo = (-t - s).div_euclid(p) + i128::from((-t - s).rem_euclid(p) != 0);
        let hi = (t - s).div_euclid(p);
        for b0 in lo..=hi {
            let n = b0 * p + s;
            if n == 0 {
                continue;
            }
            let inv = SeifertInvariants {
                g,
                b0: b0 as i64,
                pairs: cones.iter().copied().zip(chosen.iter().copied()).collect(),
            };
            let e = inv.euler_number();
            if let Some(f) = e_floor {
                if e.abs() < *f {
                    continue;
                }
            }
            let torsion = inv.torsion_order()?;
            debug_assert!(torsion <= self.t);
            if self.out.len() as u64 >= self.limit {
                return Err(Error::Resource {
                    cap: self.limit,
                    required: self.limit + 1,
                });
            }
            self.out.push(SeifertCandidate {
                chi: inv.chi(),
                euler: e,
                torsion,
                invariants: inv,
            });
        }
        Ok(())
    }
}

/// Cone multisets (nondecreasing) over genus `g` with `chi < 0`,
/// `chi^2 prod a <= x` and `prod a / lcm a <= t`.
fn hyperbolic_bases(g: u32, x: &Q, t: u64, out: &mut Vec<Vec<i64>>) {
    // 1764 = 42^2 bounds prod a through chi <= -1/42
    let cap = x * qi(1764);
    let mut cones = Vec::new();
    rec(g, &mut cones, 1, 1, x, &cap, t as i64, out);

    #[allow(clippy::too_many_arguments)]
    fn rec(
        g: u32,
        cones: &mut Vec<i64>,
        prod: i64,
        lcm: i64,
        x: &Q,
        cap: &Q,
        t: i64,
        out: &mut Vec<Vec<i64>>,
    ) {
        let c = chi(g, cones);
        if c.is_negative() {
            if &c * &c * qi(prod) > *x {
                return;
            }
            out.push(cones.clone());
        }
        // number of cones needed for chi < 0 once a is large
        let k_limit = if c >= Q::one() {
            to_i64(&(&c - Q::one()).floor().to_integer()).expect("small") + 1
        } else {
            0
        };
        let mut a = cones.last().copied().unwrap_or(2);
        loop {
            let p = prod * a;
            if qi(p) > *cap {
                break;
            }
            cones.push(a);
            let c2 = chi(g, cones);
            let mut next = a + 1;
            let mut descend = true;
            if c2.is_negative() {
                // chi^2 prod a only grows with a from here on
                if &c2 * &c2 * qi(p) > *x {
                    cones.pop();
                    break;
                }
            } else {
                // at least k_min = floor(c2) + 1 further cones b >= a are
                // needed; when k_min of them already force chi < 0 even at
                // b = a, chi ends at or below c2 - k_min (1 - 1/a)
                let k_min = c2.floor().to_integer() + 1;
                let step = Q::one() - qr(1, a);
                let k: BigInt = (&c2 / &step).floor().to_integer() + 1;
                if k == k_min {
                    let gap = qb(k.clone()) * &step - &c2;
                    let k = u32::try_from(&k).expect("small");
                    if &gap * &gap * qi(p) * pow(&qi(a), k) > *x {
                        descend = false;
                        // k stays at its limit, where the bound grows with a
                        if k_limit > 0 && i64::from(k) == k_limit {
                            cones.pop();
                            break;
                        }
                        if k_limit == 0 {
                            // skip to the first a with chi < 0 on its own
                            let first = (Q::one() / (Q::one() - &c)).floor().to_integer() + 1;
                            next = next.max(to_i64(&first).expect("small cone order"));
                        }
                    }
                }
            }
            // e lcm(a) is an integer, so |e| prod a >= prod a / lcm a, and
            // that ratio never drops as cones are added
            let l = num_integer::lcm(lcm, a);
            if descend && p / l <= t {
                rec(g, cones, p, l, x, cap, t, out);
            }
            cones.pop();
            a = next;
        }
    }
}

/// Candidate targets `(g; b0, b_i/a_i)` split by the sign of `chi`.
pub fn enumerate_targets(budget: &DominationBudget, limit: u64) -> Result<TargetReport> {
    budget.validate()?;
    let t = budget.torsion_bound()?;
    let d = budget.d.expect("checked by torsion_bound");
    let mut col = Collector {
        limit,
        t,
        out: Vec::new(),
    };

    // chi > 0
    let lens_orders: Vec<u64> = (1..=t).collect();
    let mut positive = CaseResult {
        flags: vec![CaseFlag::Coarse],
        candidates: vec![],
    };
    for q in [3, 4, 5] {
        col.base(0, &[2, 3, q], None)?;
    }
    match budget.lens_order_cap {
        Some(cap) => {
            // 4 |a3 b0 + a3 + b3| <= T and the lens quotient order
            // (2|x| for odd a3, |x| for even a3, x = a3 b0 + b3 - a3) <= cap
            // give 2 a3 <= T/4 + cap + 2 a3 ... so a3 <= T/8 + cap/2 + 1
            let a_max = (t / 8 + cap / 2 + 1) as i64;
            for a3 in 2..=a_max.max(2) {
                let start = col.out.len();
                col.base(0, &[2, 2, a3], None)?;
                let kept: Vec<SeifertCandidate> = col.out.split_off(start);
                for cand in kept {
                    let b3 = cand.invariants.pairs[2].1;
                    let x = a3 * cand.invariants.b0 + b3 - a3;
                    let lens = if a3 % 2 == 1 { 2 * x.abs() } else { x.abs() };
                    if lens as u64 <= cap {
                        col.out.push(cand);
                    }
                }
            }
        }
        None => positive.flags.push(CaseFlag::UnboundedByInputs),
    }
    positive.candidates = std::mem::take(&mut col.out);
    positive.candidates.sort();

    // chi = 0
    col.base(1, &[], None)?;
    for cones in [&[2, 3, 6][..], &[2, 4, 4], &[3, 3, 3], &[2, 2, 2, 2]] {
        col.base(0, cones, None)?;
    }
    let mut zero = CaseResult {
        flags: vec![],
        candidates: std::mem::take(&mut col.out),
    };
    zero.candidates.sort();

    // chi < 0
    let mut negative = CaseResult::default();
    let mut e_floor_coefficient = None;
    match &budget.sv_m {
        Some(sv) if sv.is_positive() => {
            let coeff = qi(d as i64) / sv;
            e_floor_coefficient = Some(coeff.clone());
            let x = qi(t as i64) * sv / qi(d as i64);
            let mut g = 0u32;
            loop {
                let closed = chi(g, &[]);
                if g >= 2 && &closed * &closed > x {
                    break;
                }
                let mut bases = Vec::new();
                hyperbolic_bases(g, &x, t, &mut bases);
                for cones in bases {
                    let c = chi(g, &cones);
                    let floor = &coeff * &c * &c;
                    col.base(g, &cones, Some(&floor))?;
                }
                g += 1;
            }
        }
        // SV(M) = 0 forces e = infinity: no chi < 0 target
        Some(_) => {}
        None => negative.flags.push(CaseFlag::UnboundedByInputs),
    }
    negative.candidates = std::mem::take(&mut col.out);
    negative.candidates.sort();

    Ok(TargetReport {
        torsion_bound: t,
        lens_orders,
        positive,
        zero,
        negative,
        e_floor_coefficient,
    })
}
