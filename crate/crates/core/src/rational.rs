//! Exact rational helpers and decimal enclosures for printing.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

pub type Q = BigRational;

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qb(n: BigInt) -> Q {
    Q::from_integer(n)
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`. Denominator must be nonzero.
pub fn parse_rational(text: &str) -> Option<Q> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Q::new(num, den))
}

/// Canonical `"p/q"` form, or `"p"` for integers.
pub fn format_rational(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn floor(x: &Q) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn ceil(x: &Q) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

pub fn pow(x: &Q, e: u32) -> Q {
    Pow::pow(x.clone(), e)
}

/// Smallest nonnegative integer `k` with `k^2 >= x`.
pub fn ceil_sqrt(x: &Q) -> BigInt {
    if !x.is_positive() {
        return BigInt::zero();
    }
    let c = ceil(x);
    let mut k = c.sqrt();
    while &k * &k < c {
        k += 1;
    }
    k
}

/// Integer `k` with `k <= x^(1/n) * 10^digits < k + 1`, for `x >= 0`.
pub fn scaled_root_floor(x: &Q, n: u32, digits: u32) -> BigInt {
    assert!(n >= 1);
    if x.is_zero() {
        return BigInt::zero();
    }
    let scale = Pow::pow(BigInt::from(10), (digits as u64) * (n as u64));
    let scaled = floor(&(x * qb(scale)));
    scaled.nth_root(n)
}

fn format_scaled(k: &BigInt, digits: u32) -> String {
    let neg = k.is_negative();
    let s = k.abs().to_string();
    let d = digits as usize;
    let padded = if s.len() <= d {
        format!("{}{}", "0".repeat(d + 1 - s.len()), s)
    } else {
        s
    };
    let (int, frac) = padded.split_at(padded.len() - d);
    let sign = if neg { "-" } else { "" };
    if d == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// A closed decimal interval `[lo, hi]` with `digits` fractional digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecimalEnclosure {
    pub lo: String,
    pub hi: String,
}

impl std::fmt::Display for DecimalEnclosure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

/// Decimal enclosure of `x^(1/n)`.
pub fn root_enclosure(x: &Q, n: u32, digits: u32) -> DecimalEnclosure {
    let k = scaled_root_floor(x, n, digits);
    let scale = Pow::pow(BigInt::from(10), (digits as u64) * (n as u64));
    let exact = qb(Pow::pow(k.clone(), n)) == x * qb(scale);
    let hi = if exact { k.clone() } else { &k + BigInt::one() };
    DecimalEnclosure {
        lo: format_scaled(&k, digits),
        hi: format_scaled(&hi, digits),
    }
}

/// Decimal enclosure of a rational interval `[lo, hi]`, rounded outward.
pub fn interval_enclosure(lo: &Q, hi: &Q, digits: u32) -> DecimalEnclosure {
    let scale = qb(Pow::pow(BigInt::from(10), digits as u64));
    DecimalEnclosure {
        lo: format_scaled(&floor(&(lo * &scale)), digits),
        hi: format_scaled(&ceil(&(hi * &scale)), digits),
    }
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a as i128, b as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let quot = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
        (old_t, t) = (t, old_t - quot * t);
    }
    if old_r < 0 {
        old_r = -old_r;
        old_s = -old_s;
        old_t = -old_t;
    }
    (old_r as i64, old_s as i64, old_t as i64)
}

pub fn to_i64(x: &BigInt) -> Option<i64> {
    i64::try_from(x).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "3", "-7", "1/2", "-31/30", "22/7"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(format_rational(&parse_rational("4/6").unwrap()), "2/3");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn floor_ceil_negative() {
        assert_eq!(floor(&qr(-3, 2)), BigInt::from(-2));
        assert_eq!(ceil(&qr(-3, 2)), BigInt::from(-1));
        assert_eq!(ceil(&qr(4, 2)), BigInt::from(2));
    }

    #[test]
    fn ceil_sqrt_small() {
        assert_eq!(ceil_sqrt(&qi(16)), BigInt::from(4));
        assert_eq!(ceil_sqrt(&qi(17)), BigInt::from(5));
        assert_eq!(ceil_sqrt(&qr(1, 4)), BigInt::from(1));
        assert_eq!(ceil_sqrt(&qi(0)), BigInt::from(0));
    }

    #[test]
    fn root_enclosures() {
        assert_eq!(root_enclosure(&qi(16), 4, 3).to_string(), "2.000");
        let e = root_enclosure(&qi(2), 2, 12);
        assert_eq!(e.lo, "1.414213562373");
        assert_eq!(e.hi, "1.414213562374");
        let e = root_enclosure(&qi(13), 4, 12);
        assert_eq!(e.lo, "1.898828922115");
    }

    #[test]
    fn ext_gcd_identity() {
        for (a, b) in [(3, 5), (-4, 6), (0, 7), (12, -18), (1, 0)] {
            let (g, x, y) = ext_gcd(a, b);
            assert_eq!(a * x + b * y, g);
            assert_eq!(g, gcd_i64(a, b));
        }
    }
}
