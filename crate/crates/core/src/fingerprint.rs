//! Structural inputs of the covolume formula for `SU(h)`, compared item by
//! item. No volume is evaluated: equal inputs force equal covolumes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{factor_integer, Rational};
use crate::error::{Error, Result};
use crate::field::CmExtension;
use crate::hermitian::HermitianForm;
use crate::local::FinitePlace;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeFingerprint {
    pub base_field_poly: String,
    pub base_field_disc: String,
    pub relative_ext_id: String,
    pub group_dim: u64,
    pub quasi_split_form_id: String,
    pub exponents: Vec<u64>,
    pub tamagawa: u64,
    pub level_id: String,
}

/// `δ` rescaled by squares of rationals: integral with squarefree content.
///
/// Equal descriptors mean equal extensions; the converse can fail when two
/// generators differ by a nonrational square.
pub fn extension_id(ext: &CmExtension) -> Result<String> {
    let den = ext.delta().to_poly().denominator_lcm();
    let sq = Rational::from_integer(&den * &den);
    let ints: Vec<BigInt> = ext
        .delta()
        .coords()
        .iter()
        .map(|c| (c * &sq).to_integer())
        .collect();
    let content = ints.iter().fold(BigInt::from(0), |g, c| g.gcd(c));
    let mut square = BigInt::one();
    for (q, e) in factor_integer(&content.abs())? {
        square *= num_traits::pow(BigInt::from(q), (e / 2 * 2) as usize);
    }
    let canon: Vec<String> = ints.iter().map(|c| (c / &square).to_string()).collect();
    Ok(format!("delta=[{}]", canon.join(",")))
}

/// Content hash of a level given as the finite places where it is deeper
/// than the maximal compact; independent of the order of `places`.
pub fn level_id(places: &[FinitePlace]) -> String {
    let mut keys: Vec<String> = places
        .iter()
        .map(|p| format!("{}:{}", p.rational_prime(), p.local_factor().to_coeff_string()))
        .collect();
    keys.sort();
    keys.dedup();
    let mut h = Sha256::new();
    h.update(b"principal-congruence-level\n");
    for k in keys {
        h.update(k.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

pub fn fingerprint(h: &HermitianForm, level_id: &str) -> Result<VolumeFingerprint> {
    let r = h.rank();
    if r % 2 == 0 {
        return Err(Error::Unsupported(format!("even rank {r}")));
    }
    let field = h.ext().base();
    let ext_id = extension_id(h.ext())?;
    Ok(VolumeFingerprint {
        base_field_poly: field.min_poly().to_coeff_string(),
        base_field_disc: field.disc().to_string(),
        relative_ext_id: ext_id.clone(),
        group_dim: (r * r - 1) as u64,
        quasi_split_form_id: format!("quasi-split SU_{r} for E/F with E: {ext_id}"),
        exponents: (1..r as u64).collect(),
        tamagawa: 1,
        level_id: level_id.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintItem {
    pub item: String,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintComparison {
    pub items: Vec<FingerprintItem>,
    pub equal: bool,
}

impl FingerprintComparison {
    pub fn differing(&self) -> Vec<&str> {
        self.items
            .iter()
            .filter(|i| !i.equal)
            .map(|i| i.item.as_str())
            .collect()
    }
}

pub fn fingerprints_equal(a: &VolumeFingerprint, b: &VolumeFingerprint) -> FingerprintComparison {
    let items: Vec<FingerprintItem> = [
        (
            "base_field",
            a.base_field_poly == b.base_field_poly && a.base_field_disc == b.base_field_disc,
        ),
        ("quadratic_extension", a.relative_ext_id == b.relative_ext_id),
        ("group_dimension", a.group_dim == b.group_dim),
        ("quasi_split_form", a.quasi_split_form_id == b.quasi_split_form_id),
        ("exponents", a.exponents == b.exponents),
        ("tamagawa_number", a.tamagawa == b.tamagawa),
        ("euler_factor_level", a.level_id == b.level_id),
    ]
    .into_iter()
    .map(|(item, equal)| FingerprintItem {
        item: item.to_string(),
        equal,
    })
    .collect();
    let equal = items.iter().all(|i| i.equal);
    FingerprintComparison { items, equal }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Poly;
    use crate::field::NumberField;
    use crate::local::factor_prime;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn ext_over(p: &[i64], delta: &[i64]) -> Arc<CmExtension> {
        let f = Arc::new(NumberField::new(Poly::from_i64s(p)).unwrap());
        let d = f.element_i64(delta).unwrap();
        Arc::new(CmExtension::new(f, d).unwrap())
    }

    fn cubic() -> Arc<CmExtension> {
        ext_over(&[1, -3, -1, 1], &[-1, 0, 0])
    }

    fn diag(e: &Arc<CmExtension>, xs: &[[i64; 3]]) -> HermitianForm {
        let f = e.base();
        HermitianForm::new(e.clone(), xs.iter().map(|c| f.element_i64(c).unwrap()).collect()).unwrap()
    }

    fn level(e: &CmExtension) -> String {
        level_id(&factor_prime(e.base(), 7).unwrap())
    }

    #[test]
    fn rank_three() {
        let e = cubic();
        let k = level(&e);
        let h1 = diag(&e, &[[0, -1, 0], [0, -1, 0], [-1, 0, 0]]);
        let h2 = diag(&e, &[[2, 0, -1], [2, 0, -1], [-1, 0, 0]]);
        let a = fingerprint(&h1, &k).unwrap();
        let b = fingerprint(&h2, &k).unwrap();
        assert_eq!(a.group_dim, 8);
        assert_eq!(a.exponents, vec![1, 2]);
        assert_eq!(a.tamagawa, 1);
        assert_eq!(a.base_field_disc, "148");
        assert_eq!(a, b);
        assert!(fingerprints_equal(&a, &b).equal);
        let other = fingerprint(&h2, &level_id(&factor_prime(e.base(), 11).unwrap())).unwrap();
        let cmp = fingerprints_equal(&a, &other);
        assert!(!cmp.equal);
        assert_eq!(cmp.differing(), vec!["euler_factor_level"]);
    }

    #[test]
    fn rank_five_and_even() {
        let e = cubic();
        let h = diag(&e, &[[1, 0, 0]; 5]);
        let fp = fingerprint(&h, "k").unwrap();
        assert_eq!(fp.group_dim, 24);
        assert_eq!(fp.exponents, vec![1, 2, 3, 4]);
        assert!(matches!(
            fingerprint(&diag(&e, &[[1, 0, 0]; 2]), "k"),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn different_base_field() {
        let e = cubic();
        let g = ext_over(&[-1, -3, 0, 1], &[-1, 0, 0]);
        let a = fingerprint(&diag(&e, &[[1, 0, 0]; 3]), "k").unwrap();
        let b = fingerprint(&diag(&g, &[[1, 0, 0]; 3]), "k").unwrap();
        assert_eq!(fingerprints_equal(&a, &b).differing(), vec!["base_field"]);
    }

    #[test]
    fn extension_descriptor() {
        assert_eq!(extension_id(&ext_over(&[0, 1], &[-12])).unwrap(), "delta=[-3]");
        assert_eq!(
            extension_id(&ext_over(&[0, 1], &[-3])).unwrap(),
            extension_id(&ext_over(&[0, 1], &[-27])).unwrap()
        );
        let e = cubic();
        assert_eq!(extension_id(&e).unwrap(), "delta=[-1,0,0]");
    }

    #[test]
    fn level_is_order_free() {
        let f = cubic();
        let mut ps = factor_prime(f.base(), 5).unwrap();
        let a = level_id(&ps);
        ps.reverse();
        assert_eq!(a, level_id(&ps));
        assert_ne!(a, level_id(&ps[..1]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn order_independent(xs in prop::collection::vec([-3i64..=3, -3i64..=3, -3i64..=3]
            .prop_filter("nonzero", |c| c.iter().any(|&x| x != 0)), 3), p in Just(vec![0usize, 1, 2]).prop_shuffle()) {
            let e = cubic();
            let h = diag(&e, &xs);
            let k = level(&e);
            prop_assert_eq!(fingerprint(&h, &k).unwrap(), fingerprint(&h.permuted(&p).unwrap(), &k).unwrap());
        }
    }
}
