use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Trial division stops here; cofactors above `LIMIT²` without a small factor
/// are reported as inconclusive instead of being assumed prime.
const LIMIT: u64 = 2_000_000;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime(k)).collect()
}

/// Exponent of the prime `p` in the nonzero integer `n`.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    if n.is_zero() {
        return u32::MAX;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Prime factorization of `|n|` by trial division.
pub fn factor_integer(n: &BigInt) -> Result<Vec<(u64, u32)>> {
    if n.is_zero() {
        return Err(Error::InvalidInput("factorization of zero".into()));
    }
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut d: u64 = 2;
    while !n.is_one() {
        if let Some(small) = n.to_u64() {
            if is_prime(small) {
                out.push((small, 1));
                break;
            }
        }
        if d > LIMIT {
            return Err(Error::Inconclusive(format!(
                "cofactor {n} has no prime factor below {LIMIT}"
            )));
        }
        let bd = BigInt::from(d);
        let mut e = 0;
        loop {
            let (q, r) = n.div_rem(&bd);
            if !r.is_zero() {
                break;
            }
            n = q;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    out.sort();
    // merge in case the final prime cofactor repeats a trial divisor
    let mut merged: Vec<(u64, u32)> = Vec::new();
    for (p, e) in out {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let small: Vec<u64> = primes_up_to(30);
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn factorizations() {
        assert_eq!(
            factor_integer(&BigInt::from(148)).unwrap(),
            vec![(2, 2), (37, 1)]
        );
        assert_eq!(
            factor_integer(&BigInt::from(3_319_595_008u64)).unwrap(),
            vec![(2, 16), (37, 3)]
        );
        assert_eq!(factor_integer(&BigInt::from(-1)).unwrap(), vec![]);
        assert!(factor_integer(&BigInt::zero()).is_err());
        assert_eq!(valuation(&BigInt::from(148), 2), 2);
        assert_eq!(valuation(&BigInt::from(148), 3), 0);
    }
}
