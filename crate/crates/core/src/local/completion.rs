//! Truncated arithmetic in the completion `O_𝔭 = ℤ_ℓ[x]/(P)` of `ℤ[α]` at a
//! prime 𝔭 above ℓ, where `P` is the Hensel lift of the local factor `g^e`.
//!
//! Elements carry the number of ℓ-adic digits that are known; every division
//! by the uniformizer consumes one, and running out is reported as
//! `Inconclusive` rather than guessed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::modular::{factor_mod_p, hensel_lift, ModRing, ZmPoly};
use crate::arith::valuation;
use crate::error::{Error, Result};
use crate::field::{FieldElement, NumberField};

use super::FinitePlace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Local {
    c: ZmPoly,
    prec: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct Completion {
    pub ell: u64,
    pub f: u32,
    pub k: u32,
    big: ModRing,
    small: ModRing,
    modulus: ZmPoly,
    g: ZmPoly,
    pi: Local,
    lambda: Local,
}

fn exhausted() -> Error {
    Error::Inconclusive("local precision exhausted".into())
}

impl Completion {
    pub(crate) fn new(field: &NumberField, place: &FinitePlace, k: u32) -> Result<Completion> {
        let ell = place.rational_prime();
        let small = ModRing::of_u64(ell);
        let f_int = super::integer_min_poly(field)?;
        let g = small
            .from_poly(place.local_factor())
            .expect("integer local factor");
        let factors = factor_mod_p(ell, &f_int);
        let powers: Vec<ZmPoly> = factors
            .iter()
            .map(|(h, e)| {
                (0..*e).fold(vec![BigInt::one()], |acc, _| small.mul(&acc, h))
            })
            .collect();
        let idx = factors
            .iter()
            .position(|(h, _)| h == &g)
            .ok_or_else(|| Error::InvalidInput("place does not belong to this field".into()))?;
        let k = k.max(2);
        let lifts = hensel_lift(&f_int, &powers, ell, k);
        let big = ModRing::new(num_traits::pow(BigInt::from(ell), k as usize));
        let e = place.ramification_index();
        let mut comp = Completion {
            ell,
            f: place.residue_degree(),
            k,
            big,
            small,
            modulus: lifts[idx].clone(),
            g: g.clone(),
            pi: Local { c: vec![], prec: k },
            lambda: Local { c: vec![], prec: k },
        };
        if e == 1 {
            comp.pi = comp.constant(&BigInt::from(ell));
            comp.lambda = comp.constant(&BigInt::one());
        } else {
            // π = g(α); π^e = ℓ·ε with ε a unit, so ℓ/π = π^{e-1}/ε
            let pi = comp.elt(g);
            let pe = comp.pow(&pi, e);
            let eps = comp.div_ell(&pe)?;
            if comp.is_in_p(&eps)? {
                return Err(Error::UnsupportedPrime {
                    prime: ell,
                    reason: "local factor does not give a uniformizer".into(),
                });
            }
            let lambda = comp.mul(&comp.pow(&pi, e - 1), &comp.inv_unit(&eps)?);
            comp.pi = pi;
            comp.lambda = lambda;
        }
        Ok(comp)
    }

    fn elt(&self, c: ZmPoly) -> Local {
        Local {
            c: self.big.rem(&self.big.norm(c), &self.modulus),
            prec: self.k,
        }
    }

    pub(crate) fn constant(&self, c: &BigInt) -> Local {
        self.elt(vec![c.clone()])
    }

    pub(crate) fn one(&self) -> Local {
        self.constant(&BigInt::one())
    }

    /// `ℓ^{s}·u` with `s` even and minimal such that the product is ℓ-integral.
    pub(crate) fn embed(&self, u: &FieldElement) -> Result<(Local, u32)> {
        let (scaled, l) = {
            let p = u.to_poly();
            let l = p.denominator_lcm();
            (p.scale(&num_rational::BigRational::from_integer(l.clone())), l)
        };
        let t = valuation(&l, self.ell);
        let mut c = self
            .big
            .from_poly(&scaled)
            .expect("integer coefficients");
        let rest = &l / num_traits::pow(BigInt::from(self.ell), t as usize);
        let rest_inv = self.big.inv(&rest).expect("coprime to ell");
        let factor = rest_inv * num_traits::pow(BigInt::from(self.ell), t as usize);
        c = self.big.scale(&c, &factor);
        Ok((self.elt(c), 2 * t))
    }

    pub(crate) fn mul(&self, a: &Local, b: &Local) -> Local {
        Local {
            c: self.big.rem(&self.big.mul(&a.c, &b.c), &self.modulus),
            prec: a.prec.min(b.prec),
        }
    }

    pub(crate) fn sub(&self, a: &Local, b: &Local) -> Local {
        Local {
            c: self.big.sub(&a.c, &b.c),
            prec: a.prec.min(b.prec),
        }
    }

    pub(crate) fn add(&self, a: &Local, b: &Local) -> Local {
        Local {
            c: self.big.add(&a.c, &b.c),
            prec: a.prec.min(b.prec),
        }
    }

    pub(crate) fn pow(&self, a: &Local, n: u32) -> Local {
        (0..n).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    pub(crate) fn pi_pow(&self, n: u32) -> Local {
        self.pow(&self.pi, n)
    }

    /// Image in the residue field `F_ℓ[x]/(g)`.
    pub(crate) fn residue(&self, a: &Local) -> Result<ZmPoly> {
        if a.prec == 0 {
            return Err(exhausted());
        }
        Ok(self.small.rem(&self.small.norm(a.c.clone()), &self.g))
    }

    pub(crate) fn is_in_p(&self, a: &Local) -> Result<bool> {
        Ok(self.residue(a)?.is_empty())
    }

    fn div_ell(&self, a: &Local) -> Result<Local> {
        if a.prec <= 1 {
            return Err(exhausted());
        }
        let m = num_traits::pow(BigInt::from(self.ell), a.prec as usize);
        let ell = BigInt::from(self.ell);
        let mut c = Vec::with_capacity(a.c.len());
        for x in &a.c {
            let x = x.mod_floor(&m);
            let (q, r) = x.div_rem(&ell);
            if !r.is_zero() {
                return Err(Error::Inconclusive(
                    "element is not divisible by the rational prime".into(),
                ));
            }
            c.push(q);
        }
        Ok(Local {
            c: self.big.norm(c),
            prec: a.prec - 1,
        })
    }

    /// `a/π` for `a ∈ 𝔭`.
    pub(crate) fn div_pi(&self, a: &Local) -> Result<Local> {
        self.div_ell(&self.mul(a, &self.lambda))
    }

    /// `(v, a/π^v)` with the quotient a unit.
    pub(crate) fn valuation(&self, a: &Local) -> Result<(u32, Local)> {
        let mut a = a.clone();
        let mut v = 0;
        while self.is_in_p(&a)? {
            a = self.div_pi(&a)?;
            v += 1;
        }
        Ok((v, a))
    }

    pub(crate) fn inv_unit(&self, a: &Local) -> Result<Local> {
        let a_bar = self.small.norm(a.c.clone());
        let p_bar = self.small.norm(self.modulus.clone());
        let (g, s, _) = self.small.ext_gcd(&a_bar, &p_bar);
        if g.len() != 1 {
            return Err(Error::InvalidInput("inverse of a non-unit".into()));
        }
        let mut b = self.elt(s);
        let two = self.constant(&BigInt::from(2));
        let mut known = 1u32;
        while known < a.prec {
            let ab = self.mul(a, &b);
            b = self.mul(&b, &self.sub(&two, &ab));
            known *= 2;
        }
        b.prec = a.prec;
        Ok(b)
    }

    /// All residue-field representatives: polynomials of degree `< f` with
    /// coefficients in `[0, ℓ)`.
    pub(crate) fn residue_elements(&self) -> Vec<ZmPoly> {
        let mut out = vec![vec![]];
        for _ in 0..self.f {
            let mut next = Vec::with_capacity(out.len() * self.ell as usize);
            for v in &out {
                for c in 0..self.ell {
                    let mut w = v.clone();
                    w.push(BigInt::from(c));
                    next.push(w);
                }
            }
            out = next;
        }
        out.into_iter().map(|v| self.small.norm(v)).collect()
    }

    pub(crate) fn lift(&self, r: &ZmPoly) -> Local {
        self.elt(r.clone())
    }

    /// The first `n` π-adic digits.
    pub(crate) fn digits(&self, a: &Local, n: usize) -> Result<Vec<ZmPoly>> {
        let mut a = a.clone();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let r = self.residue(&a)?;
            if i + 1 < n {
                a = self.div_pi(&self.sub(&a, &self.lift(&r)))?;
            }
            out.push(r);
        }
        Ok(out)
    }

    pub(crate) fn from_digits(&self, ds: &[ZmPoly]) -> Local {
        let mut acc = self.elt(vec![]);
        let mut pw = self.one();
        for d in ds {
            acc = self.add(&acc, &self.mul(&self.lift(d), &pw));
            pw = self.mul(&pw, &self.pi);
        }
        acc
    }

    /// Is the nonzero residue a square in `F_q`?
    pub(crate) fn residue_is_square(&self, r: &ZmPoly) -> bool {
        if self.ell == 2 {
            return true;
        }
        let q = num_traits::pow(BigInt::from(self.ell), self.f as usize);
        let e = (q - 1u32) / 2u32;
        self.small.pow_mod(r, &e, &self.g) == vec![BigInt::one()]
    }

    /// Residue of `-1` as a residue-field element.
    pub(crate) fn residue_minus_one(&self) -> ZmPoly {
        self.small.norm(vec![BigInt::from(self.ell - 1)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Poly;
    use crate::local::factor_prime;

    fn cubic() -> NumberField {
        NumberField::new(Poly::from_i64s(&[1, -3, -1, 1])).unwrap()
    }

    #[test]
    fn dyadic_uniformizer_and_valuations() {
        let f = cubic();
        let places = factor_prime(&f, 2).unwrap();
        assert_eq!(places.len(), 1);
        let c = Completion::new(&f, &places[0], 12).unwrap();
        let two = c.constant(&BigInt::from(2));
        assert_eq!(c.valuation(&two).unwrap().0, 3);
        assert_eq!(c.valuation(&c.pi_pow(1)).unwrap().0, 1);
        let (a, s) = c.embed(&f.alpha()).unwrap();
        assert_eq!(s, 0);
        assert_eq!(c.valuation(&a).unwrap().0, 0);
        // α + 1 generates the prime above 2: N(α+1) = -p(-1) = -2
        let (b, _) = c.embed(&f.element_i64(&[1, 1, 0]).unwrap()).unwrap();
        assert_eq!(c.valuation(&b).unwrap().0, 1);
    }

    #[test]
    fn unit_inverse_and_digits_roundtrip() {
        let f = cubic();
        let places = factor_prime(&f, 5).unwrap();
        for pl in &places {
            let c = Completion::new(&f, pl, 6).unwrap();
            let (a, _) = c.embed(&f.element_i64(&[2, 1, 3]).unwrap()).unwrap();
            if c.is_in_p(&a).unwrap() {
                continue;
            }
            let inv = c.inv_unit(&a).unwrap();
            let prod = c.mul(&a, &inv);
            assert_eq!(c.sub(&prod, &c.one()).c, Vec::<BigInt>::new());
            let ds = c.digits(&a, 4).unwrap();
            let back = c.from_digits(&ds);
            let diff = c.sub(&a, &back);
            assert!(diff.c.is_empty() || c.valuation(&diff).unwrap().0 >= 4);
        }
    }

    #[test]
    fn zero_runs_out_of_precision() {
        let f = cubic();
        let places = factor_prime(&f, 3).unwrap();
        let c = Completion::new(&f, &places[0], 4).unwrap();
        assert!(matches!(
            c.valuation(&c.constant(&BigInt::zero())),
            Err(Error::Inconclusive(_))
        ));
    }
}
