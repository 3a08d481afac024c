//! Number fields `ℚ[x]/(p)` with exact real places, their CM extensions, and
//! Galois-closure embedding checks.

mod automorphism;
mod closure;
mod cm;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{
    int, is_irreducible_q, isolate_real_roots, poly_discriminant, rat, refine_interval, resultant,
    Interval, Poly, Rational, Sign,
};
use crate::error::{invalid, Result};

pub use automorphism::{automorphism_count, AutomorphismCount, DEFAULT_PRECISION_CAP};
pub use closure::GaloisClosure;
pub use cm::{CmExtension, ExtElement};

/// Element of a number field in power-basis coordinates `1, α, …, α^{d-1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coords: Vec<Rational>,
}

impl FieldElement {
    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_integral_coords(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    /// Representative polynomial in α.
    pub fn to_poly(&self) -> Poly {
        Poly::new(self.coords.clone())
    }

    /// Largest absolute coordinate; used to order search candidates.
    pub fn height(&self) -> Rational {
        self.coords
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly().pretty("a"))
    }
}

/// A number field `ℚ[x]/(p)` with `p` monic irreducible.
///
/// Real places are numbered in ascending order of the real root they send α
/// to; the isolating intervals are cached at construction and never mutated.
#[derive(Clone, PartialEq, Eq)]
pub struct NumberField {
    min_poly: Poly,
    degree: usize,
    real_places: Vec<Interval>,
    disc: Rational,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({})", self.min_poly.pretty("x"))
    }
}

/// Initial width of the cached real-place intervals.
fn cached_width() -> Rational {
    rat(1, 1 << 20)
}

impl NumberField {
    pub fn new(p: Poly) -> Result<NumberField> {
        if p.deg() < 1 {
            return invalid("number field polynomial must be nonconstant");
        }
        if !p.is_monic() {
            return invalid(format!("minimal polynomial {} is not monic", p.pretty("x")));
        }
        if !is_irreducible_q(&p) {
            return invalid(format!(
                "minimal polynomial {} is reducible over Q",
                p.pretty("x")
            ));
        }
        let w = cached_width();
        let real_places = isolate_real_roots(&p)?
            .iter()
            .map(|iv| refine_interval(&p, iv, &w))
            .collect::<Result<Vec<_>>>()?;
        let disc = poly_discriminant(&p)?;
        Ok(NumberField {
            degree: p.deg(),
            min_poly: p,
            real_places,
            disc,
        })
    }

    pub fn min_poly(&self) -> &Poly {
        &self.min_poly
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn real_places(&self) -> &[Interval] {
        &self.real_places
    }

    pub fn num_real_places(&self) -> usize {
        self.real_places.len()
    }

    pub fn disc(&self) -> &Rational {
        &self.disc
    }

    pub fn is_totally_real(&self) -> bool {
        self.real_places.len() == self.degree
    }

    /// Element from power-basis coordinates; the length must equal the degree.
    pub fn element(&self, coords: Vec<Rational>) -> Result<FieldElement> {
        if coords.len() != self.degree {
            return invalid(format!(
                "element has {} coordinates, field degree is {}",
                coords.len(),
                self.degree
            ));
        }
        Ok(FieldElement { coords })
    }

    pub fn element_i64(&self, coords: &[i64]) -> Result<FieldElement> {
        self.element(coords.iter().map(|&c| int(c)).collect())
    }

    /// Reduce an arbitrary polynomial in α.
    pub fn from_poly(&self, p: &Poly) -> FieldElement {
        let r = p.rem(&self.min_poly).expect("nonzero modulus");
        let mut coords: Vec<Rational> = r.coeffs().to_vec();
        coords.resize(self.degree, Rational::zero());
        FieldElement { coords }
    }

    pub fn from_rational(&self, c: Rational) -> FieldElement {
        self.from_poly(&Poly::constant(c))
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coords: vec![Rational::zero(); self.degree],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(Rational::one())
    }

    /// The generator α (the class of x).
    pub fn alpha(&self) -> FieldElement {
        self.from_poly(&Poly::x())
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement {
            coords: a.coords.iter().map(|x| -x).collect(),
        }
    }

    pub fn scale(&self, a: &FieldElement, c: &Rational) -> FieldElement {
        FieldElement {
            coords: a.coords.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.from_poly(&(&a.to_poly() * &b.to_poly()))
    }

    pub fn pow(&self, a: &FieldElement, e: u32) -> FieldElement {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return invalid("inverse of zero");
        }
        let (g, s, _) = a.to_poly().ext_gcd(&self.min_poly);
        debug_assert!(g == Poly::one());
        Ok(self.from_poly(&s))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn product<'a>(&self, xs: impl IntoIterator<Item = &'a FieldElement>) -> FieldElement {
        xs.into_iter().fold(self.one(), |acc, x| self.mul(&acc, x))
    }

    /// `g(σ(α))` for the automorphism sending α to `image`.
    pub fn apply_automorphism(&self, g: &FieldElement, image: &FieldElement) -> FieldElement {
        self.from_poly(&g.to_poly().compose(&image.to_poly()))
    }

    /// Exact sign of `ν_j(g)` at the real place `place`.
    ///
    /// The place interval is bisected until the interval image of `g` excludes
    /// zero. This terminates because `ν_j(g) ≠ 0` for `g ≠ 0`.
    pub fn sign_at(&self, g: &FieldElement, place: usize) -> Result<Sign> {
        if g.is_zero() {
            return invalid("sign of zero is undefined");
        }
        let Some(iv) = self.real_places.get(place) else {
            return invalid(format!(
                "place index {place} out of range ({} real places)",
                self.real_places.len()
            ));
        };
        let gp = g.to_poly();
        if gp.is_constant() {
            return Ok(Sign::of(&gp.lc()).expect("nonzero"));
        }
        let mut iv = iv.clone();
        loop {
            if iv.lo == iv.hi {
                return Ok(Sign::of(&gp.eval(&iv.lo)).expect("nonzero at a root"));
            }
            if let Some(s) = gp.eval_interval(&iv).sign() {
                return Ok(s);
            }
            let w = iv.width() / int(4);
            iv = refine_interval(&self.min_poly, &iv, &w)?;
        }
    }

    /// Signs of `g` at every real place, in place order.
    pub fn signs(&self, g: &FieldElement) -> Result<Vec<Sign>> {
        (0..self.real_places.len())
            .map(|j| self.sign_at(g, j))
            .collect()
    }

    /// `N_{F/ℚ}(g) = Res(p, g)` (p monic).
    pub fn norm(&self, g: &FieldElement) -> Rational {
        if g.is_zero() {
            return Rational::zero();
        }
        resultant(&self.min_poly, &g.to_poly()).expect("nonzero inputs")
    }

    /// Trace of the multiplication-by-`g` matrix.
    pub fn trace(&self, g: &FieldElement) -> Rational {
        let mut t = Rational::zero();
        let mut basis = self.one();
        let alpha = self.alpha();
        for i in 0..self.degree {
            let col = self.mul(g, &basis);
            t += &col.coords[i];
            basis = self.mul(&basis, &alpha);
        }
        t
    }

    /// Unit test in the order `ℤ[α]`.
    pub fn is_unit(&self, g: &FieldElement) -> Result<bool> {
        if !g.is_integral_coords() {
            return invalid("unit test is defined on Z[alpha]; coordinates must be integers");
        }
        Ok(self.norm(g).abs().is_one())
    }

    /// Rational approximation of `ν_j(α)` with error below `width`.
    pub fn place_value(&self, place: usize, width: &Rational) -> Result<Interval> {
        let iv = self
            .real_places
            .get(place)
            .ok_or_else(|| crate::Error::InvalidInput(format!("no real place {place}")))?;
        refine_interval(&self.min_poly, iv, width)
    }

    /// `(l·g, l)` with `l` the least common denominator of the coordinates.
    pub fn clear_denominators(&self, g: &FieldElement) -> (FieldElement, BigInt) {
        let l = g.to_poly().denominator_lcm();
        let scaled = self.scale(g, &Rational::from_integer(l.clone()));
        (scaled, l)
    }
}
