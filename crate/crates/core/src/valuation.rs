//! Exact p-adic valuations on Q ∪ {∞} and the weight-space distance.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{GhostError, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `twice / 2` without a gcd pass.
pub(crate) fn from_doubled(twice: i64) -> Rational {
    if twice % 2 == 0 {
        int(twice / 2)
    } else {
        Rational::new_raw(BigInt::from(twice), BigInt::from(2))
    }
}

/// Parses `"3"`, `"-7/2"` or `"inf"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    Rational::from_str(t)
        .ok()
        .filter(|_| !t.ends_with("/0"))
        .ok_or_else(|| GhostError::InvalidConfig(format!("not a rational number: {text:?}")))
}

pub fn floor_to_i64(r: &Rational) -> i64 {
    r.floor().to_integer().to_i64().expect("floor out of i64 range")
}

/// An element of Q ∪ {+∞}; `Finite < Infinity`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(Rational),
    Infinity,
}

impl Valuation {
    pub fn zero() -> Self {
        Valuation::Finite(Rational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Valuation::Finite(int(n))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinity)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Valuation::Finite(r) => Some(r),
            Valuation::Infinity => None,
        }
    }

    /// Multiplication by a nonnegative integer, with `0 · ∞ = 0` (empty product).
    pub fn scale(&self, m: u64) -> Valuation {
        match self {
            _ if m == 0 => Valuation::zero(),
            Valuation::Finite(r) => Valuation::Finite(r * Rational::from_integer(BigInt::from(m))),
            Valuation::Infinity => Valuation::Infinity,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "inf" | "infinity" | "∞" => Ok(Valuation::Infinity),
            t => parse_rational(t).map(Valuation::Finite),
        }
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinity) => Ordering::Less,
            (Valuation::Infinity, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinity, Valuation::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Valuation {
    type Output = Valuation;
    fn add(self, rhs: &Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinity,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        &self + &rhs
    }
}

impl From<Rational> for Valuation {
    fn from(r: Rational) -> Self {
        Valuation::Finite(r)
    }
}

impl From<i64> for Valuation {
    fn from(n: i64) -> Self {
        Valuation::from_int(n)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(r) => write!(f, "{r}"),
            Valuation::Infinity => f.write_str("inf"),
        }
    }
}

/// v_p of an integer; `v_p(0) = ∞`.
pub fn vp_int(n: &BigInt, p: u64) -> Valuation {
    if n.is_zero() {
        return Valuation::Infinity;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0i64;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Valuation::from_int(v);
        }
        n = q;
        v += 1;
    }
}

/// v_p of a nonzero machine integer.
pub fn vp_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// v_p of a rational, `v_p(num) - v_p(den)`.
pub fn vp_rational(x: &Rational, p: u64) -> Valuation {
    match (vp_int(x.numer(), p), vp_int(x.denom(), p)) {
        (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a - b),
        _ => Valuation::Infinity,
    }
}

/// `v(w_k - w_{k'}) = 1 + v_p(k - k')`, infinite on the diagonal.
pub fn weight_distance(k: u64, k2: u64, p: u64) -> Valuation {
    if k == k2 {
        Valuation::Infinity
    } else {
        Valuation::from_int(1 + vp_u64(k.abs_diff(k2), p) as i64)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Integer floor of log_p(n) for n ≥ 1.
pub fn ilog(n: u64, p: u64) -> u32 {
    n.max(1).ilog(p)
}

pub(crate) fn half() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2))
}

/// Rational `r + 1/2 · Z`: true iff `2r` is an integer.
pub fn in_half_integers(r: &Rational) -> bool {
    (r * int(2)).is_integer()
}
