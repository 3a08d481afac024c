//! Dyadic places, handled through square classes.
//!
//! With `e = v(2)` and `N = 2e + 1`, units congruent to 1 modulo
//! `4𝔭 = 𝔭^N` are squares (Hensel), so the class of a unit in `O*/O*²` is
//! determined by its residue modulo `𝔭^N`. Enumerating `(O/𝔭^N)*` gives the
//! squares there, and `F*/F*² ≅ ℤ/2 × O*/O*²` via `π^a u ↦ (a mod 2, [u])`.
//!
//! For a nonsplit `E_w = F_v(√δ)` the norm group has index 2 in `F*`. Norm
//! classes `[s² - δπ^{2j}]` are collected until they generate a subgroup of
//! index 2; that subgroup is then the whole norm group. If the enumeration
//! stops short, the answer is `Inconclusive`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::{Mutex, OnceLock};

use crate::arith::modular::ZmPoly;
use crate::error::{Error, Result};
use crate::field::{CmExtension, FieldElement};

use super::completion::{Completion, Local};
use super::{valuation_bound, FinitePlace, NormMethod, SplittingType};

/// Largest `|O/𝔭^N|` that is enumerated.
const ENUMERATION_LIMIT: u128 = 1 << 16;

type Key = Vec<ZmPoly>;
/// `(odd valuation, canonical unit key)`.
type Class = (bool, Key);

struct Dyadic {
    comp: Completion,
    n: usize,
    squares: Vec<Local>,
    square_keys: HashSet<Key>,
}

impl Dyadic {
    fn new(ext: &CmExtension, v: &FinitePlace, extra: u32) -> Result<Dyadic> {
        let e = v.ramification_index();
        let n = (2 * e + 1) as usize;
        let q = v.residue_field_size();
        if q.checked_pow(n as u32).map_or(true, |s| s > ENUMERATION_LIMIT) {
            return Err(Error::Inconclusive(format!(
                "dyadic residue ring of size {q}^{n} exceeds the enumeration limit"
            )));
        }
        let k = extra + 2 * n as u32 + 4;
        let comp = Completion::new(ext.base(), v, k)?;
        let mut square_keys = HashSet::new();
        let mut squares = Vec::new();
        for w in all_digit_vectors(&comp, n) {
            if w[0].is_empty() {
                continue;
            }
            let w = comp.from_digits(&w);
            let key = comp.digits(&comp.mul(&w, &w), n)?;
            if square_keys.insert(key.clone()) {
                squares.push(comp.from_digits(&key));
            }
        }
        Ok(Dyadic {
            comp,
            n,
            squares,
            square_keys,
        })
    }

    fn unit_key(&self, u: &Local) -> Result<Key> {
        let mut best: Option<Key> = None;
        for s in &self.squares {
            let key = self.comp.digits(&self.comp.mul(u, s), self.n)?;
            if best.as_ref().map_or(true, |b| &key < b) {
                best = Some(key);
            }
        }
        Ok(best.expect("1 is a square"))
    }

    fn class(&self, x: &Local) -> Result<Class> {
        let (v, u) = self.comp.valuation(x)?;
        Ok((v % 2 == 1, self.unit_key(&u)?))
    }

    fn class_mul(&self, a: &Class, b: &Class) -> Result<Class> {
        let u = self
            .comp
            .mul(&self.comp.from_digits(&a.1), &self.comp.from_digits(&b.1));
        Ok((a.0 != b.0, self.unit_key(&u)?))
    }

    fn identity(&self) -> Result<Class> {
        self.class(&self.comp.one())
    }

    /// Is the unit `u` a square modulo `4 = 𝔭^{2e}`?
    fn square_mod_four(&self, u: &Local) -> Result<bool> {
        let m = self.n - 1;
        let key = self.comp.digits(u, m)?;
        Ok(self.square_keys.iter().any(|s| s[..m] == key[..]))
    }
}

fn all_digit_vectors(comp: &Completion, n: usize) -> Vec<Key> {
    let res = comp.residue_elements();
    let mut out: Vec<Key> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * res.len());
        for v in &out {
            for r in &res {
                let mut w = v.clone();
                w.push(r.clone());
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Split iff δ is a square; for even `v(δ)` the extension is unramified iff
/// the unit part of δ is a square modulo 4.
pub(super) fn splitting(ext: &CmExtension, v: &FinitePlace) -> Result<SplittingType> {
    let bd = valuation_bound(ext.base(), ext.delta(), 2);
    let dy = Dyadic::new(ext, v, bd)?;
    let (dl, _) = dy.comp.embed(ext.delta())?;
    let (vd, d0) = dy.comp.valuation(&dl)?;
    if vd % 2 == 1 {
        return Ok(SplittingType::Ramified);
    }
    if dy.square_keys.contains(&dy.comp.digits(&d0, dy.n)?) {
        return Ok(SplittingType::Split);
    }
    Ok(if dy.square_mod_four(&d0)? {
        SplittingType::Inert
    } else {
        SplittingType::Ramified
    })
}

type CacheKey = (String, String, String);

fn norm_group_cache() -> &'static Mutex<HashMap<CacheKey, BTreeSet<Class>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, BTreeSet<Class>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn norm_group(ext: &CmExtension, v: &FinitePlace) -> Result<BTreeSet<Class>> {
    let key = (
        ext.base().min_poly().to_coeff_string(),
        ext.delta().to_poly().to_coeff_string(),
        v.to_string(),
    );
    if let Some(g) = norm_group_cache().lock().expect("cache").get(&key) {
        return Ok(g.clone());
    }
    let e = v.ramification_index();
    let d = e * v.residue_degree();
    let target = 1usize << (d + 1);
    // beyond v(δ) + 2j ≥ 2e + 1 the class of s² - δπ^{2j} is trivial or [s²]
    let jmax = e + 1;
    let bd = valuation_bound(ext.base(), ext.delta(), 2);
    let dy = Dyadic::new(ext, v, bd + 2 * jmax + 8)?;
    let (dl, _) = dy.comp.embed(ext.delta())?;
    let mut group = BTreeSet::from([dy.identity()?]);
    'outer: for j in 0..=jmax {
        let dpj = dy.comp.mul(&dl, &dy.comp.pi_pow(2 * j));
        for s in all_digit_vectors(&dy.comp, dy.n) {
            let s = dy.comp.from_digits(&s);
            let c = dy.comp.sub(&dy.comp.mul(&s, &s), &dpj);
            let Ok(cls) = dy.class(&c) else {
                continue;
            };
            if group.contains(&cls) {
                continue;
            }
            let mut grown = group.clone();
            for g in &group {
                grown.insert(dy.class_mul(g, &cls)?);
            }
            group = grown;
            if group.len() >= target {
                break 'outer;
            }
        }
    }
    if group.len() != target {
        return Err(Error::Inconclusive(format!(
            "dyadic norm classes generated a group of order {} instead of {target}",
            group.len()
        )));
    }
    norm_group_cache()
        .lock()
        .expect("cache")
        .insert(key, group.clone());
    Ok(group)
}

pub(super) fn norm_test(
    ext: &CmExtension,
    v: &FinitePlace,
    u: &FieldElement,
) -> Result<(bool, NormMethod)> {
    if splitting(ext, v)? == SplittingType::Split {
        return Ok((true, NormMethod::Split));
    }
    let group = norm_group(ext, v)?;
    let bu = valuation_bound(ext.base(), u, 2);
    let dy = Dyadic::new(ext, v, bu + 4)?;
    let (ul, _) = dy.comp.embed(u)?;
    let cls = dy.class(&ul)?;
    Ok((group.contains(&cls), NormMethod::DyadicHensel))
}
