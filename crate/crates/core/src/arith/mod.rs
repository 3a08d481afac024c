//! Exact arithmetic over ℚ: rationals, dense polynomials, resultants,
//! Sturm sequences, real-root isolation and irreducibility testing.

mod integer;
mod irreducible;
mod linalg;
pub mod modular;
mod poly;
mod roots;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use integer::{factor_integer, is_prime, primes_up_to, valuation};
pub use irreducible::is_irreducible_q;
pub use linalg::invert_matrix;
pub use poly::Poly;
pub use roots::{isolate_real_roots, refine_interval, sturm_count, SturmCount};

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Sign of a nonzero quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    pub fn of(x: &Rational) -> Option<Sign> {
        if x.is_zero() {
            None
        } else if x.is_positive() {
            Some(Sign::Positive)
        } else {
            Some(Sign::Negative)
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Positive => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Positive => Sign::Negative,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

/// Closed rational interval `[lo, hi]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Interval> {
        if lo > hi {
            return invalid(format!("interval with lo {lo} > hi {hi}"));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Rational) -> Interval {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn disjoint(&self, other: &Interval) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }

    /// Sign of every point in the interval, if it excludes zero.
    pub fn sign(&self) -> Option<Sign> {
        if self.lo.is_positive() {
            Some(Sign::Positive)
        } else if self.hi.is_negative() {
            Some(Sign::Negative)
        } else {
            None
        }
    }

    pub fn add_scalar(&self, c: &Rational) -> Interval {
        Interval {
            lo: &self.lo + c,
            hi: &self.hi + c,
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let cands = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Interval { lo, hi }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Resultant `lc(a)^deg(b) · ∏ b(rᵢ)` over the roots `rᵢ` of `a`, computed
/// by the Euclidean remainder recursion over ℚ.
pub fn resultant(a: &Poly, b: &Poly) -> Result<Rational> {
    if a.is_zero() && b.is_zero() {
        return invalid("resultant of two zero polynomials");
    }
    if a.is_zero() || b.is_zero() {
        // Res(0, c) = 1 for a nonzero constant c by the empty-product convention.
        let other = if a.is_zero() { b } else { a };
        return Ok(if other.deg() == 0 {
            Rational::one()
        } else {
            Rational::zero()
        });
    }
    let mut a = a.clone();
    let mut b = b.clone();
    let mut acc = Rational::one();
    loop {
        let (m, n) = (a.deg(), b.deg());
        if n == 0 {
            return Ok(acc * pow_rat(&b.lc(), m));
        }
        if m == 0 {
            return Ok(acc * pow_rat(&a.lc(), n));
        }
        let r = a.rem(&b)?;
        if r.is_zero() {
            return Ok(Rational::zero());
        }
        // Res(a, b) = (-1)^{mn} lc(b)^{m - deg r} Res(b, r)
        if (m * n) % 2 == 1 {
            acc = -acc;
        }
        acc *= pow_rat(&b.lc(), m - r.deg());
        a = b;
        b = r;
    }
}

/// `disc(p) = (-1)^{n(n-1)/2} Res(p, p') / lc(p)`.
pub fn poly_discriminant(p: &Poly) -> Result<Rational> {
    let n = match p.degree() {
        Some(n) if n >= 1 => n,
        _ => return invalid("discriminant of a constant polynomial"),
    };
    let r = resultant(p, &p.derivative())?;
    let sign = if (n * (n - 1) / 2) % 2 == 1 { -1 } else { 1 };
    Ok(r * int(sign) / p.lc())
}

pub(crate) fn pow_rat(x: &Rational, e: usize) -> Rational {
    num_traits::pow(x.clone(), e)
}

/// Is the rational a square of a rational?
pub fn is_rational_square(x: &Rational) -> bool {
    if x.is_negative() {
        return false;
    }
    let is_sq = |n: &BigInt| {
        let r = n.sqrt();
        &(&r * &r) == n
    };
    is_sq(x.numer()) && is_sq(x.denom())
}
