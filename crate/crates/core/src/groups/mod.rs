//! Orders of finite classical groups, an enumeration oracle for tiny cases,
//! and indices of principal congruence subgroups.

mod tables;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factor_integer, is_prime};
use crate::error::{invalid, Error, Result};
use crate::hermitian::HermitianForm;
use crate::local::{place_valuation, splitting_in_e, FinitePlace, SplittingType};

use tables::SmallField;

pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    SL,
    GL,
    SU,
    GU,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::SL => "SL",
            Family::GL => "GL",
            Family::SU => "SU",
            Family::GU => "GU",
        }
    }

    pub fn is_unitary(self) -> bool {
        matches!(self, Family::SU | Family::GU)
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        match s.to_ascii_uppercase().as_str() {
            "SL" => Ok(Family::SL),
            "GL" => Ok(Family::GL),
            "SU" => Ok(Family::SU),
            "GU" => Ok(Family::GU),
            _ => Err(Error::Parse(format!("unknown group family {s:?}"))),
        }
    }
}

/// `family_n(q)`. Unitary groups are taken with respect to `F_{q²}/F_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteGroupSpec {
    pub family: Family,
    pub n: usize,
    pub q: u64,
}

impl FiniteGroupSpec {
    pub fn new(family: Family, n: usize, q: u64) -> Result<FiniteGroupSpec> {
        if n == 0 {
            return invalid("matrix size must be positive");
        }
        if q < 2 {
            return invalid(format!("{q} is not a prime power"));
        }
        let f = factor_integer(&BigInt::from(q))?;
        if f.len() != 1 {
            return invalid(format!("{q} is not a prime power"));
        }
        Ok(FiniteGroupSpec { family, n, q })
    }
}

impl fmt::Display for FiniteGroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}(F_{})", self.family.as_str(), self.n, self.q)
    }
}

pub fn group_order(spec: &FiniteGroupSpec) -> BigInt {
    let q = BigInt::from(spec.q);
    let n = spec.n;
    let mut order: BigInt = Pow::pow(&q, (n * (n - 1) / 2) as u32);
    let unitary = spec.family.is_unitary();
    for i in 1..=n {
        let qi: BigInt = Pow::pow(&q, i as u32);
        order *= if unitary && i % 2 == 1 { qi + 1 } else { qi - 1 };
    }
    match spec.family {
        Family::GL | Family::GU => order,
        Family::SL => order / (&q - 1),
        Family::SU => order / (&q + 1),
    }
}

/// Counts group elements by testing every matrix over the coefficient field
/// (`F_q`, or `F_{q²}` for unitary families).
///
/// Supported coefficient fields are prime fields and `F₄`; unitary groups
/// are taken for the standard form `Σ x̄ᵢyᵢ`.
pub fn enumerate_group(spec: &FiniteGroupSpec, budget: u128) -> Result<u64> {
    let size = if spec.family.is_unitary() {
        spec.q * spec.q
    } else {
        spec.q
    };
    let field = match size {
        4 => SmallField::f4(),
        p if p <= 251 && is_prime(p) => SmallField::cyclic(p as usize),
        _ => {
            return Err(Error::Unsupported(format!(
                "no enumeration tables for a field of size {size}"
            )))
        }
    };
    let n = spec.n;
    let needed = (size as u128)
        .checked_pow((n * n) as u32)
        .unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let family = spec.family;
    let test = |m: &[u8]| -> bool {
        match family {
            Family::GL => field.det(m, n) != 0,
            Family::SL => field.det(m, n) == 1,
            Family::GU => field.is_unitary(m, n),
            Family::SU => field.is_unitary(m, n) && field.det(m, n) == 1,
        }
    };
    let first_rows = (size as u64).pow(n as u32);
    let count = (0..first_rows)
        .into_par_iter()
        .map(|r| {
            let mut m = vec![0u8; n * n];
            let mut x = r;
            for slot in m.iter_mut().take(n) {
                *slot = (x % size) as u8;
                x /= size;
            }
            count_completions(&mut m, n, size as u8, &test)
        })
        .sum();
    Ok(count)
}

/// Odometer over rows `1..n` with row 0 fixed.
fn count_completions(m: &mut [u8], n: usize, size: u8, test: &impl Fn(&[u8]) -> bool) -> u64 {
    let mut count = 0;
    loop {
        if test(m) {
            count += 1;
        }
        let mut i = n;
        loop {
            if i == m.len() {
                return count;
            }
            m[i] += 1;
            if m[i] < size {
                break;
            }
            m[i] = 0;
            i += 1;
        }
    }
}

/// `n × n` matrices over `ℤ/m` with determinant 1, counted directly.
pub fn enumerate_sl_mod(n: usize, m: u64, budget: u128) -> Result<u64> {
    if n == 0 || !(2..=255).contains(&m) {
        return invalid("need n ≥ 1 and 2 ≤ m ≤ 255");
    }
    let needed = (m as u128).checked_pow((n * n) as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let ring = SmallField::cyclic(m as usize);
    let first_rows = m.pow(n as u32);
    Ok((0..first_rows)
        .into_par_iter()
        .map(|r| {
            let mut mat = vec![0u8; n * n];
            let mut x = r;
            for slot in mat.iter_mut().take(n) {
                *slot = (x % m) as u8;
                x /= m;
            }
            count_completions(&mut mat, n, m as u8, &|a: &[u8]| ring.det(a, n) == 1)
        })
        .sum())
}

/// A principal congruence level at one place, for the group of `form`.
#[derive(Debug, Clone)]
pub struct CongruenceLevel<'a> {
    pub place: FinitePlace,
    pub form: &'a HermitianForm,
}

/// The finite group `SU(h̄)(O/𝔭)` at a place of good reduction: odd residue
/// characteristic, δ and every diagonal entry a unit.
pub fn reduction_group(level: &CongruenceLevel<'_>) -> Result<FiniteGroupSpec> {
    let v = &level.place;
    let ell = v.rational_prime();
    let bad = |reason: String| Error::UnsupportedPrime {
        prime: ell,
        reason,
    };
    if ell == 2 {
        return Err(bad("residue characteristic 2".into()));
    }
    let ext = level.form.ext();
    let field = ext.base();
    if place_valuation(field, v, ext.delta())? != 0 {
        return Err(bad(format!("delta is not a unit at {v}")));
    }
    for (i, a) in level.form.diag().iter().enumerate() {
        if place_valuation(field, v, a)? != 0 {
            return Err(bad(format!("diagonal entry {i} is not a unit at {v}")));
        }
    }
    let q = u64::try_from(v.residue_field_size())
        .map_err(|_| bad("residue field too large".into()))?;
    let family = match splitting_in_e(ext, v)? {
        SplittingType::Split => Family::SL,
        SplittingType::Inert => Family::SU,
        SplittingType::Ramified => return Err(bad("ramified in E".into())),
    };
    FiniteGroupSpec::new(family, level.form.rank(), q)
}

/// `[Λ : Λ(𝔭)]`, assuming reduction modulo 𝔭 is onto (strong approximation).
pub fn congruence_index(level: &CongruenceLevel<'_>) -> Result<BigInt> {
    Ok(group_order(&reduction_group(level)?))
}

/// Index for a level at several distinct places; the empty level has index 1.
pub fn joint_congruence_index(levels: &[CongruenceLevel<'_>]) -> Result<BigInt> {
    let mut out = BigInt::one();
    for (i, l) in levels.iter().enumerate() {
        if levels[..i].iter().any(|o| o.place == l.place) {
            return invalid(format!("place {} repeated in level", l.place));
        }
        out *= congruence_index(l)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Poly;
    use crate::field::{CmExtension, NumberField};
    use crate::local::factor_prime;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn spec(f: Family, n: usize, q: u64) -> FiniteGroupSpec {
        FiniteGroupSpec::new(f, n, q).unwrap()
    }

    #[test]
    fn orders() {
        assert_eq!(group_order(&spec(Family::SL, 3, 2)), BigInt::from(168));
        assert_eq!(group_order(&spec(Family::SU, 3, 2)), BigInt::from(216));
        assert_eq!(group_order(&spec(Family::GU, 3, 2)), BigInt::from(648));
        assert_eq!(group_order(&spec(Family::SL, 2, 3)), BigInt::from(24));
        assert_eq!(group_order(&spec(Family::GL, 2, 2)), BigInt::from(6));
        for q in [2, 3, 4, 5, 7, 9] {
            assert_eq!(group_order(&spec(Family::SL, 1, q)), BigInt::one());
        }
        assert!(FiniteGroupSpec::new(Family::SL, 2, 6).is_err());
        assert!(FiniteGroupSpec::new(Family::SL, 0, 2).is_err());
    }

    #[test]
    fn oracle_agrees() {
        let cases = [
            (Family::SL, 2, 2),
            (Family::SL, 2, 3),
            (Family::SL, 3, 2),
            (Family::SL, 3, 3),
            (Family::GL, 2, 2),
            (Family::GL, 2, 3),
            (Family::GL, 3, 2),
            (Family::SL, 2, 4),
            (Family::SU, 2, 2),
            (Family::GU, 2, 2),
            (Family::SU, 3, 2),
            (Family::GU, 3, 2),
        ];
        for (f, n, q) in cases {
            let s = spec(f, n, q);
            let counted = enumerate_group(&s, DEFAULT_ENUMERATION_BUDGET).unwrap();
            assert_eq!(BigInt::from(counted), group_order(&s), "{s}");
        }
    }

    #[test]
    fn lagrange_on_enumerated_counts() {
        let sl = enumerate_group(&spec(Family::SL, 3, 2), DEFAULT_ENUMERATION_BUDGET).unwrap();
        let gl = enumerate_group(&spec(Family::GL, 3, 3), DEFAULT_ENUMERATION_BUDGET).unwrap();
        let sl3 = enumerate_group(&spec(Family::SL, 3, 3), DEFAULT_ENUMERATION_BUDGET).unwrap();
        let su = enumerate_group(&spec(Family::SU, 3, 2), DEFAULT_ENUMERATION_BUDGET).unwrap();
        let gu = enumerate_group(&spec(Family::GU, 3, 2), DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(sl, 168);
        assert_eq!(gl % sl3, 0);
        assert_eq!(gu % su, 0);
    }

    #[test]
    fn budget_refusal() {
        assert_eq!(
            enumerate_group(&spec(Family::SL, 3, 2), 500),
            Err(Error::BudgetExceeded {
                needed: 512,
                budget: 500
            })
        );
        assert!(matches!(
            enumerate_group(&spec(Family::SL, 5, 3), DEFAULT_ENUMERATION_BUDGET),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(matches!(
            enumerate_group(&spec(Family::SL, 2, 9), DEFAULT_ENUMERATION_BUDGET),
            Err(Error::Unsupported(_))
        ));
    }

    fn rational_ext(delta: i64) -> Arc<CmExtension> {
        let f = Arc::new(NumberField::new(Poly::from_i64s(&[0, 1])).unwrap());
        let d = f.element_i64(&[delta]).unwrap();
        Arc::new(CmExtension::new(f, d).unwrap())
    }

    #[test]
    fn reduction_types() {
        let e = rational_ext(-1);
        let f = e.base();
        let h = HermitianForm::new(e.clone(), vec![f.one(); 3]).unwrap();
        let at = |ell| CongruenceLevel {
            place: factor_prime(f, ell).unwrap().remove(0),
            form: &h,
        };
        assert_eq!(reduction_group(&at(5)).unwrap(), spec(Family::SL, 3, 5));
        assert_eq!(reduction_group(&at(3)).unwrap(), spec(Family::SU, 3, 3));
        assert!(matches!(
            reduction_group(&at(2)),
            Err(Error::UnsupportedPrime { prime: 2, .. })
        ));
        let h5 = HermitianForm::new(e.clone(), vec![f.one(), f.one(), f.element_i64(&[5]).unwrap()]).unwrap();
        let lvl = CongruenceLevel {
            place: factor_prime(f, 5).unwrap().remove(0),
            form: &h5,
        };
        assert!(congruence_index(&lvl).is_err());
        assert_eq!(joint_congruence_index(&[]).unwrap(), BigInt::one());
        assert!(joint_congruence_index(&[at(5), at(5)]).is_err());
    }

    #[test]
    fn crt_against_direct_enumeration() {
        // 3 and 5 both split in Q(√-11)
        let e = rational_ext(-11);
        let f = e.base();
        let h = HermitianForm::new(e.clone(), vec![f.one(), f.one()]).unwrap();
        let levels: Vec<CongruenceLevel> = [3, 5]
            .iter()
            .map(|&ell| CongruenceLevel {
                place: factor_prime(f, ell).unwrap().remove(0),
                form: &h,
            })
            .collect();
        let joint = joint_congruence_index(&levels).unwrap();
        assert_eq!(
            &joint,
            &(congruence_index(&levels[0]).unwrap() * congruence_index(&levels[1]).unwrap())
        );
        let direct = enumerate_sl_mod(2, 15, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(BigInt::from(direct), joint);
        assert_eq!(direct, 2880);
    }

    proptest! {
        #[test]
        fn divisibility(n in 1usize..6, qi in 0usize..6) {
            let q = [2u64, 3, 4, 5, 7, 8][qi];
            let o = |f| group_order(&spec(f, n, q));
            let (sl, gl, su, gu) = (o(Family::SL), o(Family::GL), o(Family::SU), o(Family::GU));
            prop_assert_eq!(&gl % &sl, BigInt::from(0));
            prop_assert_eq!(&gu % &su, BigInt::from(0));
            prop_assert_eq!(gl / sl, BigInt::from(q - 1));
        }
    }
}
