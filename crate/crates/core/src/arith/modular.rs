//! Polynomials over `ℤ/mℤ`: factorization over prime fields and Hensel
//! lifting of coprime factorizations to prime-power moduli.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Poly;

/// Dense polynomial with coefficients reduced into `[0, m)`, constant first.
pub type ZmPoly = Vec<BigInt>;

/// Arithmetic in `(ℤ/mℤ)[x]`. Division requires an invertible leading
/// coefficient; gcds require `m` prime.
#[derive(Debug, Clone)]
pub struct ModRing {
    pub m: BigInt,
}

impl ModRing {
    pub fn new(m: BigInt) -> Self {
        ModRing { m }
    }

    pub fn of_u64(m: u64) -> Self {
        ModRing { m: m.into() }
    }

    pub fn reduce(&self, a: &BigInt) -> BigInt {
        a.mod_floor(&self.m)
    }

    pub fn norm(&self, mut v: ZmPoly) -> ZmPoly {
        for c in v.iter_mut() {
            *c = c.mod_floor(&self.m);
        }
        while v.last().map_or(false, Zero::is_zero) {
            v.pop();
        }
        v
    }

    /// Reduce an integer-coefficient rational polynomial. Denominators must be
    /// invertible modulo `m`.
    pub fn from_poly(&self, p: &Poly) -> Option<ZmPoly> {
        let mut out = Vec::with_capacity(p.coeffs().len());
        for c in p.coeffs() {
            let d = self.inv(c.denom())?;
            out.push((c.numer() * d).mod_floor(&self.m));
        }
        Some(self.norm(out))
    }

    /// Lift to ℚ using the symmetric residue system `(-m/2, m/2]`.
    pub fn to_poly_symmetric(&self, v: &ZmPoly) -> Poly {
        let half = &self.m / 2;
        Poly::from_ints(
            &v.iter()
                .map(|c| if c > &half { c - &self.m } else { c.clone() })
                .collect::<Vec<_>>(),
        )
    }

    pub fn to_poly(&self, v: &ZmPoly) -> Poly {
        Poly::from_ints(v)
    }

    pub fn inv(&self, a: &BigInt) -> Option<BigInt> {
        let a = a.mod_floor(&self.m);
        let g = a.extended_gcd(&self.m);
        if !g.gcd.is_one() {
            return None;
        }
        Some(g.x.mod_floor(&self.m))
    }

    pub fn add(&self, a: &ZmPoly, b: &ZmPoly) -> ZmPoly {
        let n = a.len().max(b.len());
        let z = BigInt::zero();
        self.norm(
            (0..n)
                .map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, a: &ZmPoly, b: &ZmPoly) -> ZmPoly {
        let n = a.len().max(b.len());
        let z = BigInt::zero();
        self.norm(
            (0..n)
                .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn mul(&self, a: &ZmPoly, b: &ZmPoly) -> ZmPoly {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        self.norm(out)
    }

    pub fn scale(&self, a: &ZmPoly, c: &BigInt) -> ZmPoly {
        self.norm(a.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self, a: &ZmPoly) -> Option<ZmPoly> {
        let lc = a.last()?;
        let inv = self.inv(lc)?;
        Some(self.scale(a, &inv))
    }

    /// Division with remainder; `None` if the divisor's leading coefficient is
    /// not a unit.
    pub fn div_rem(&self, a: &ZmPoly, b: &ZmPoly) -> Option<(ZmPoly, ZmPoly)> {
        let lc_inv = self.inv(b.last()?)?;
        let db = b.len() - 1;
        let mut r = a.clone();
        if r.len() <= db {
            return Some((vec![], self.norm(r)));
        }
        let mut q = vec![BigInt::zero(); r.len() - db];
        for i in (0..q.len()).rev() {
            let c = (&r[i + db] * &lc_inv).mod_floor(&self.m);
            if !c.is_zero() {
                for (j, bc) in b.iter().enumerate() {
                    r[i + j] = (&r[i + j] - &c * bc).mod_floor(&self.m);
                }
            }
            q[i] = c;
        }
        r.truncate(db);
        Some((self.norm(q), self.norm(r)))
    }

    pub fn rem(&self, a: &ZmPoly, b: &ZmPoly) -> ZmPoly {
        self.div_rem(a, b).expect("unit leading coefficient").1
    }

    pub fn pow_mod(&self, a: &ZmPoly, e: &BigInt, f: &ZmPoly) -> ZmPoly {
        let base = self.rem(a, f);
        let mut acc = self.rem(&vec![BigInt::one()], f);
        let bits = e.bits();
        for i in (0..bits).rev() {
            acc = self.rem(&self.mul(&acc, &acc), f);
            if e.bit(i) {
                acc = self.rem(&self.mul(&acc, &base), f);
            }
        }
        acc
    }

    pub fn derivative(&self, a: &ZmPoly) -> ZmPoly {
        self.norm(
            a.iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Monic gcd over a prime field.
    pub fn gcd(&self, a: &ZmPoly, b: &ZmPoly) -> ZmPoly {
        let (mut a, mut b) = (self.norm(a.clone()), self.norm(b.clone()));
        while !b.is_empty() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a).unwrap_or_default()
    }

    /// `(g, s, t)` with `s·a + t·b = g` monic, over a prime field.
    pub fn ext_gcd(&self, a: &ZmPoly, b: &ZmPoly) -> (ZmPoly, ZmPoly, ZmPoly) {
        let (mut r0, mut r1) = (self.norm(a.clone()), self.norm(b.clone()));
        let (mut s0, mut s1) = (vec![BigInt::one()], vec![]);
        let (mut t0, mut t1) = (vec![], vec![BigInt::one()]);
        while !r1.is_empty() {
            let (q, r) = self.div_rem(&r0, &r1).expect("field");
            r0 = std::mem::replace(&mut r1, r);
            let s = self.sub(&s0, &self.mul(&q, &s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = self.sub(&t0, &self.mul(&q, &t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.last().and_then(|lc| self.inv(lc)) {
            Some(inv) => (
                self.scale(&r0, &inv),
                self.scale(&s0, &inv),
                self.scale(&t0, &inv),
            ),
            None => (r0, s0, t0),
        }
    }
}

fn deg(a: &ZmPoly) -> usize {
    a.len().saturating_sub(1)
}

fn is_one(a: &ZmPoly) -> bool {
    a.len() == 1 && a[0].is_one()
}

/// Squarefree decomposition of a monic polynomial over `F_p`:
/// `f = ∏ gᵢ^{eᵢ}` with the `gᵢ` squarefree and pairwise coprime.
fn squarefree_decomposition(r: &ModRing, f: &ZmPoly) -> Vec<(ZmPoly, u32)> {
    let p = r.m.to_usize().unwrap_or(usize::MAX);
    let mut out = Vec::new();
    let c0 = r.gcd(f, &r.derivative(f));
    let mut w = r.div_rem(f, &c0).expect("monic").0;
    let mut c = c0;
    let mut i = 1;
    while !is_one(&w) && !w.is_empty() {
        let y = r.gcd(&w, &c);
        let z = r.div_rem(&w, &y).expect("monic").0;
        if deg(&z) > 0 {
            out.push((z, i));
        }
        i += 1;
        c = r.div_rem(&c, &y).expect("monic").0;
        w = y;
    }
    if deg(&c) > 0 {
        // c is a p-th power: c(x) = d(x)^p with d obtained coefficientwise
        let root: ZmPoly = c.iter().step_by(p).cloned().collect();
        for (g, e) in squarefree_decomposition(r, &root) {
            out.push((g, e * p as u32));
        }
    }
    out
}

/// Distinct-degree factorization of a monic squarefree polynomial over `F_p`.
fn distinct_degree(r: &ModRing, f: &ZmPoly) -> Vec<(ZmPoly, usize)> {
    let x = vec![BigInt::zero(), BigInt::one()];
    let mut out = Vec::new();
    let mut f = f.clone();
    let mut h = r.rem(&x, &f);
    let mut d = 1;
    while deg(&f) >= 2 * d {
        h = r.pow_mod(&h, &r.m, &f);
        let g = r.gcd(&r.sub(&h, &x), &f);
        if !is_one(&g) {
            f = r.div_rem(&f, &g).expect("monic").0;
            h = r.rem(&h, &f);
            out.push((g, d));
        }
        d += 1;
    }
    if deg(&f) > 0 {
        let n = deg(&f);
        out.push((f, n));
    }
    out
}

/// Split a product of distinct monic irreducibles of common degree `d`.
fn equal_degree(r: &ModRing, f: &ZmPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<ZmPoly> {
    let n = deg(f);
    if n == d {
        return vec![f.clone()];
    }
    let p = r.m.clone();
    loop {
        let a: ZmPoly = r.norm(
            (0..n)
                .map(|_| BigInt::from(rng.gen::<u64>()).mod_floor(&p))
                .collect(),
        );
        if deg(&a) == 0 {
            continue;
        }
        let candidate = if p == BigInt::from(2) {
            // absolute trace F_{2^d} → F_2
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..d {
                t = r.rem(&r.mul(&t, &t), f);
                acc = r.add(&acc, &t);
            }
            acc
        } else {
            let e = (num_traits::pow(p.clone(), d) - BigInt::one()) / 2;
            let b = r.pow_mod(&a, &e, f);
            r.sub(&b, &vec![BigInt::one()])
        };
        let g = r.gcd(&candidate, f);
        if deg(&g) > 0 && deg(&g) < n {
            let h = r.div_rem(f, &g).expect("monic").0;
            let mut out = equal_degree(r, &g, d, rng);
            out.extend(equal_degree(r, &h, d, rng));
            return out;
        }
    }
}

/// Complete factorization over `F_p` of a polynomial with nonzero leading
/// coefficient: monic irreducible factors with multiplicities, sorted by
/// (degree, coefficients).
pub fn factor_mod_p(p: u64, f: &ZmPoly) -> Vec<(ZmPoly, u32)> {
    let r = ModRing::of_u64(p);
    let f = r.monic(&r.norm(f.clone())).expect("nonzero polynomial");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ p);
    let mut out = Vec::new();
    for (g, e) in squarefree_decomposition(&r, &f) {
        for (h, d) in distinct_degree(&r, &g) {
            for irr in equal_degree(&r, &h, d, &mut rng) {
                out.push((irr, e));
            }
        }
    }
    out.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    out
}

/// Degrees of the irreducible factors of a squarefree polynomial mod `p`,
/// via distinct-degree factorization only.
pub fn degree_pattern_mod_p(p: u64, f: &ZmPoly) -> Vec<usize> {
    let r = ModRing::of_u64(p);
    let f = r.monic(&r.norm(f.clone())).expect("nonzero polynomial");
    let mut out = Vec::new();
    for (g, d) in distinct_degree(&r, &f) {
        out.extend(std::iter::repeat(d).take(deg(&g) / d));
    }
    out.sort();
    out
}

/// Lift `f ≡ lc(f)·∏ gᵢ (mod p)` to `(mod p^k)`.
///
/// The `gᵢ` must be monic and pairwise coprime mod `p`, and `lc(f)` a unit
/// mod `p`. Returns monic lifts `Gᵢ` with `f ≡ lc(f)·∏ Gᵢ (mod p^k)`.
pub fn hensel_lift(f: &[BigInt], factors: &[ZmPoly], p: u64, k: u32) -> Vec<ZmPoly> {
    let big = ModRing::new(num_traits::pow(BigInt::from(p), k as usize));
    let fk = big.norm(f.to_vec());
    lift_rec(&fk, factors, p, k, &big)
}

fn lift_rec(f: &ZmPoly, factors: &[ZmPoly], p: u64, k: u32, big: &ModRing) -> Vec<ZmPoly> {
    if factors.len() == 1 {
        return vec![big.monic(f).expect("unit leading coefficient")];
    }
    let small = ModRing::of_u64(p);
    let mid = factors.len() / 2;
    let prod = |fs: &[ZmPoly]| {
        fs.iter()
            .fold(vec![BigInt::one()], |acc, g| small.mul(&acc, g))
    };
    let a = prod(&factors[..mid]);
    let b_monic = prod(&factors[mid..]);
    let lc = f.last().expect("nonzero").clone();
    let b = small.scale(&b_monic, &lc);
    let (ga, hb) = lift_two(f, &a, &b, p, k);
    let mut out = lift_rec(&ga, &factors[..mid], p, k, big);
    out.extend(lift_rec(&hb, &factors[mid..], p, k, big));
    out
}

/// Linear Hensel lifting of `f ≡ g·h (mod p)` with `g` monic, to
/// `(mod p^k)`. The lifted `h` keeps the leading coefficient of `f`.
fn lift_two(f: &ZmPoly, g: &ZmPoly, h: &ZmPoly, p: u64, k: u32) -> (ZmPoly, ZmPoly) {
    let small = ModRing::of_u64(p);
    let big = ModRing::new(num_traits::pow(BigInt::from(p), k as usize));
    let (one, _, t) = small.ext_gcd(g, h);
    debug_assert!(is_one(&one), "factors must be coprime mod p");
    let mut g = g.clone();
    let mut h = h.clone();
    // pin the leading coefficient of h to lc(f) exactly
    if let (Some(hl), Some(fl)) = (h.last_mut(), f.last()) {
        *hl = fl.clone();
    }
    let pb = BigInt::from(p);
    let mut pj = pb.clone();
    for _ in 1..k {
        let gh = big.mul(&g, &h);
        let diff = big.sub(f, &gh);
        // diff ≡ 0 mod p^j; divide exactly
        let e: ZmPoly = small.norm(diff.iter().map(|c| c / &pj).collect());
        let a = small.rem(&small.mul(&t, &e), &g);
        let b = small
            .div_rem(&small.sub(&e, &small.mul(&a, &h)), &g)
            .expect("monic")
            .0;
        g = big.add(&g, &big.scale(&a, &pj));
        h = big.add(&h, &big.scale(&b, &pj));
        pj *= &pb;
    }
    (g, h)
}

/// Symmetric-range check used by factor recombination.
pub(crate) fn abs_max(v: &[BigInt]) -> BigInt {
    v.iter().map(|c| c.abs()).max().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(cs: &[i64]) -> ZmPoly {
        cs.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn product(r: &ModRing, fs: &[(ZmPoly, u32)]) -> ZmPoly {
        let mut acc = zp(&[1]);
        for (g, e) in fs {
            for _ in 0..*e {
                acc = r.mul(&acc, g);
            }
        }
        acc
    }

    #[test]
    fn factors_cubic_mod_small_primes() {
        let f = zp(&[1, -3, -1, 1]);
        let f5 = factor_mod_p(5, &f);
        assert_eq!(f5.len(), 2);
        assert_eq!(f5[0], (zp(&[2, 1]), 1));
        assert_eq!(f5[1], (zp(&[3, 2, 1]), 1));
        let f2 = factor_mod_p(2, &f);
        assert_eq!(f2, vec![(zp(&[1, 1]), 3)]);
        let f37 = factor_mod_p(37, &f);
        assert_eq!(f37.len(), 2);
        assert!(f37.iter().any(|(g, e)| *e == 2 && *g == zp(&[33, 1])));
        assert_eq!(factor_mod_p(7, &f), vec![(zp(&[1, 4, 6, 1]), 1)]);
    }

    #[test]
    fn factorization_reassembles() {
        for p in [2u64, 3, 5, 7, 11] {
            for f in [
                zp(&[1, 0, 0, 0, 1]),
                zp(&[-148, 0, 100, 0, -20, 0, 1]),
                zp(&[0, 0, 1, 1, 0, 1]),
                zp(&[1, 2, 1, 0, 0, 0, 0, 0, 1]),
            ] {
                let r = ModRing::of_u64(p);
                let fs = factor_mod_p(p, &f);
                let monic = r.monic(&r.norm(f.clone())).unwrap();
                assert_eq!(product(&r, &fs), monic, "p={p} f={f:?}");
                for (g, _) in &fs {
                    let pat = degree_pattern_mod_p(p, g);
                    assert_eq!(pat, vec![deg(g)], "factor {g:?} not irreducible mod {p}");
                }
            }
        }
    }

    #[test]
    fn hensel_lift_reproduces_product() {
        // x^2 + 1 mod 5 splits as (x+2)(x+3); lift to 5^6
        let f = zp(&[1, 0, 1]);
        let lifted = hensel_lift(&f, &[zp(&[2, 1]), zp(&[3, 1])], 5, 6);
        let big = ModRing::new(BigInt::from(15625));
        assert_eq!(big.mul(&lifted[0], &lifted[1]), big.norm(f));

        let q = zp(&[-148, 0, 100, 0, -20, 0, 1]);
        let fs: Vec<ZmPoly> = factor_mod_p(3, &q).into_iter().map(|x| x.0).collect();
        let lifted = hensel_lift(&q, &fs, 3, 10);
        let big = ModRing::new(num_traits::pow(BigInt::from(3), 10));
        let prod = lifted.iter().fold(zp(&[1]), |a, g| big.mul(&a, g));
        assert_eq!(prod, big.norm(q));
    }
}
