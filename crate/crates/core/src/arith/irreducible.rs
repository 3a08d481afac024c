use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::modular::{abs_max, degree_pattern_mod_p, factor_mod_p, hensel_lift, ModRing, ZmPoly};
use super::{is_prime, Poly, Rational};

/// Number of good primes whose degree patterns are intersected before the
/// exact recombination fallback runs.
const PATTERN_PRIMES: usize = 24;

/// Exact irreducibility over ℚ.
///
/// Constants are not irreducible. Squarefreeness, a rational root test and
/// factor-degree patterns modulo small primes settle most inputs; whatever is
/// left goes through Hensel lifting and exhaustive recombination of modular
/// factors, which is exact for every degree.
pub fn is_irreducible_q(p: &Poly) -> bool {
    let n = match p.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    if !p.is_squarefree() {
        return false;
    }
    let f = p.primitive_integer();
    if has_rational_root(&f) {
        return false;
    }

    let mut possible: BTreeSet<usize> = (0..=n).collect();
    let mut used = 0;
    let mut best: Option<(u64, usize)> = None;
    for ell in (2u64..).filter(|&l| is_prime(l)) {
        if used == PATTERN_PRIMES {
            break;
        }
        let Some(fp) = good_reduction(&f, ell) else {
            continue;
        };
        used += 1;
        let pattern = degree_pattern_mod_p(ell, &fp);
        if pattern.len() == 1 {
            return true;
        }
        possible = possible
            .intersection(&subset_sums(&pattern))
            .copied()
            .collect();
        if possible.iter().all(|&d| d == 0 || d == n) {
            return true;
        }
        if best.map_or(true, |(_, r)| pattern.len() < r) {
            best = Some((ell, pattern.len()));
        }
    }
    let (ell, _) = best.expect("some good prime exists");
    !has_factor_by_recombination(&f, ell)
}

fn good_reduction(f: &[BigInt], ell: u64) -> Option<ZmPoly> {
    let r = ModRing::of_u64(ell);
    let lc = f.last()?;
    if (lc % BigInt::from(ell)).is_zero() {
        return None;
    }
    let fp = r.norm(f.to_vec());
    let g = r.gcd(&fp, &r.derivative(&fp));
    (g.len() == 1).then_some(fp)
}

fn subset_sums(pattern: &[usize]) -> BTreeSet<usize> {
    let mut sums = BTreeSet::from([0usize]);
    for &d in pattern {
        let next: Vec<usize> = sums.iter().map(|s| s + d).collect();
        sums.extend(next);
    }
    sums
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let Some(small) = n.to_u64() else {
        return vec![];
    };
    let mut out = vec![];
    let mut d = 1u64;
    while d * d <= small {
        if small % d == 0 {
            out.push(BigInt::from(d));
            if d * d != small {
                out.push(BigInt::from(small / d));
            }
        }
        d += 1;
    }
    out
}

/// Rational root test on a primitive integer polynomial. Skipped (returns
/// false) when the extreme coefficients are too large to enumerate divisors;
/// the modular patterns catch linear factors anyway.
fn has_rational_root(f: &[BigInt]) -> bool {
    let a0 = &f[0];
    if a0.is_zero() {
        return true;
    }
    let an = f.last().unwrap();
    let limit = BigInt::from(1_000_000_000_000u64);
    if a0.abs() > limit || an.abs() > limit {
        return false;
    }
    let poly = Poly::from_ints(f);
    for num in divisors(a0) {
        for den in divisors(an) {
            for s in [1, -1] {
                let x = Rational::new(&num * s, den.clone());
                if poly.eval(&x).is_zero() {
                    return true;
                }
            }
        }
    }
    false
}

/// Zassenhaus recombination: lift the factorization mod `ell` past the
/// Mignotte-style coefficient bound and test every subset product.
fn has_factor_by_recombination(f: &[BigInt], ell: u64) -> bool {
    let n = f.len() - 1;
    let lc = f.last().unwrap().clone();
    let norm2_sq: BigInt = f.iter().map(|c| c * c).sum();
    let norm2 = norm2_sq.sqrt() + BigInt::one();
    // any factor g of f over ℤ has ‖g‖∞ ≤ 2^deg(g)·‖f‖₂; scaled by lc(f)
    let bound = (BigInt::one() << n) * norm2 * lc.abs() * BigInt::from(2);
    let mut k = 1u32;
    let mut modulus = BigInt::from(ell);
    while modulus <= bound {
        modulus *= ell;
        k += 1;
    }
    let factors: Vec<ZmPoly> = factor_mod_p(ell, &f.to_vec())
        .into_iter()
        .map(|(g, _)| g)
        .collect();
    let lifted = hensel_lift(f, &factors, ell, k);
    let ring = ModRing::new(modulus);
    let target = Poly::from_ints(f);
    let r = lifted.len();
    for size in 1..=r / 2 {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let mut g = vec![lc.clone()];
            for &i in &combo {
                g = ring.mul(&g, &lifted[i]);
            }
            let cand = ring.to_poly_symmetric(&g);
            let ints = cand.primitive_integer();
            if abs_max(&ints) <= bound {
                let prim = Poly::from_ints(&ints);
                if let Ok((_, rem)) = target.div_rem(&prim) {
                    if rem.is_zero() && !prim.is_constant() {
                        return true;
                    }
                }
            }
            if !next_combination(&mut combo, r) {
                break;
            }
        }
    }
    false
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
