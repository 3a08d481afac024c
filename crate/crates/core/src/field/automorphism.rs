use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::modular::ModRing;
use crate::arith::{invert_matrix, is_prime, refine_interval, Interval, Poly, Rational};

use super::{FieldElement, NumberField};

/// Default cap, in bits, on the root precision used to reconstruct
/// automorphisms.
pub const DEFAULT_PRECISION_CAP: u32 = 2048;

const START_PRECISION: u32 = 128;
/// Primes scanned for the modular upper bound.
const UPPER_BOUND_PRIME_LIMIT: u64 = 5000;
/// Largest degree for which permutations of the real roots are enumerated.
const MAX_RECONSTRUCTION_DEGREE: usize = 8;

/// `|Aut(F/ℚ)|`, either certified or bracketed.
///
/// `images` always holds the verified automorphisms as images of α, identity
/// first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AutomorphismCount {
    Exact {
        count: usize,
        images: Vec<FieldElement>,
    },
    Unknown {
        lower: usize,
        upper: usize,
        images: Vec<FieldElement>,
    },
}

impl AutomorphismCount {
    pub fn exact(&self) -> Option<usize> {
        match self {
            AutomorphismCount::Exact { count, .. } => Some(*count),
            AutomorphismCount::Unknown { .. } => None,
        }
    }

    pub fn images(&self) -> &[FieldElement] {
        match self {
            AutomorphismCount::Exact { images, .. } | AutomorphismCount::Unknown { images, .. } => {
                images
            }
        }
    }
}

/// Count the automorphisms of `F`.
///
/// Upper bound: for a prime ℓ not dividing the discriminant, distinct
/// automorphisms stay distinct modulo a degree-one prime above ℓ, so they
/// inject into the roots of `p` mod ℓ. Lower bound: automorphisms rebuilt
/// from approximate real roots and verified exactly by `p(g(α)) = 0`. The
/// automorphisms form a group whose order divides the degree, which often
/// pins the answer down between the two bounds.
pub fn automorphism_count(field: &NumberField, precision_cap: u32) -> AutomorphismCount {
    let d = field.degree();
    let alpha = field.alpha();
    if d == 1 {
        return AutomorphismCount::Exact {
            count: 1,
            images: vec![alpha],
        };
    }
    if d == 2 {
        // the other root is -α - a₁
        let a1 = field.min_poly().coeff(1);
        let other = field.from_poly(&Poly::new(vec![-a1, -Rational::one()]));
        return AutomorphismCount::Exact {
            count: 2,
            images: vec![alpha, other],
        };
    }

    let upper = modular_upper_bound(field.min_poly());
    let mut images = vec![alpha];
    if let Some(out) = settle(d, &images, upper) {
        return out;
    }
    let can_reconstruct = field.is_totally_real()
        && d <= MAX_RECONSTRUCTION_DEGREE
        && field.min_poly().has_integer_coeffs();
    if can_reconstruct {
        let denom = field.disc().abs().to_integer();
        let mut roots: Vec<Interval> = field.real_places().to_vec();
        let mut prec = START_PRECISION;
        while prec <= precision_cap.max(START_PRECISION) {
            let w = Rational::new(BigInt::one(), BigInt::one() << prec);
            roots = roots
                .iter()
                .map(|iv| refine_interval(field.min_poly(), iv, &w).expect("isolating interval"))
                .collect();
            for g in reconstruct(field, &roots, &denom) {
                if !images.contains(&g) {
                    images.push(g);
                }
            }
            if let Some(out) = settle(d, &images, upper) {
                return out;
            }
            if prec >= precision_cap {
                break;
            }
            prec = (prec * 2).min(precision_cap);
        }
    }
    AutomorphismCount::Unknown {
        lower: images.len(),
        upper,
        images,
    }
}

/// Conclusive iff `lower` is the only multiple of `lower` dividing `d` and at
/// most `upper`.
fn settle(d: usize, images: &[FieldElement], upper: usize) -> Option<AutomorphismCount> {
    let lower = images.len();
    let other = (lower + 1..=upper.min(d)).any(|m| d % m == 0 && m % lower == 0);
    (!other).then(|| AutomorphismCount::Exact {
        count: lower,
        images: images.to_vec(),
    })
}

fn modular_upper_bound(p: &Poly) -> usize {
    let f = p.primitive_integer();
    let lc = f.last().expect("nonconstant").clone();
    let disc = crate::arith::poly_discriminant(&Poly::from_ints(&f))
        .expect("nonconstant")
        .numer()
        .clone();
    let mut best = p.deg();
    for ell in (2..UPPER_BOUND_PRIME_LIMIT).filter(|&l| is_prime(l)) {
        let l = BigInt::from(ell);
        if (&disc % &l).is_zero() || (&lc % &l).is_zero() {
            continue;
        }
        let n = roots_mod_prime(&f, ell);
        if n > 0 && n < best {
            best = n;
            if best == 1 {
                break;
            }
        }
    }
    best
}

fn roots_mod_prime(f: &[BigInt], ell: u64) -> usize {
    let r = ModRing::of_u64(ell);
    let fp = r.norm(f.to_vec());
    let x = vec![BigInt::zero(), BigInt::one()];
    let xl = r.pow_mod(&x, &BigInt::from(ell), &fp);
    let h = r.sub(&xl, &x);
    let g = r.gcd(&fp, &h);
    g.len().saturating_sub(1)
}

/// Try every non-identity permutation of the roots; keep the candidates
/// that round to a verified automorphism.
fn reconstruct(field: &NumberField, roots: &[Interval], denom: &BigInt) -> Vec<FieldElement> {
    let d = roots.len();
    let mids: Vec<Rational> = roots.iter().map(Interval::midpoint).collect();
    let vander: Vec<Vec<Rational>> = mids
        .iter()
        .map(|r| {
            let mut row = Vec::with_capacity(d);
            let mut acc = Rational::one();
            for _ in 0..d {
                row.push(acc.clone());
                acc *= r;
            }
            row
        })
        .collect();
    let Some(vinv) = invert_matrix(&vander) else {
        return vec![];
    };
    let dq = Rational::from_integer(denom.clone());
    let p = field.min_poly();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..d).collect();
    // the identity is already known
    while next_permutation(&mut perm) {
        let coeffs: Vec<Rational> = vinv
            .iter()
            .map(|row| {
                let c: Rational = row.iter().zip(&perm).map(|(v, &j)| v * &mids[j]).sum();
                (c * &dq).round() / &dq
            })
            .collect();
        let g = Poly::new(coeffs);
        if g.deg() == 0 {
            continue;
        }
        if p.compose(&g).rem(p).expect("nonzero").is_zero() {
            out.push(field.from_poly(&g));
        }
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
