//! Diagonal σ-hermitian forms over a CM extension: signatures, Landherr
//! invariants, group-level (non)isomorphism and the Galois-twist predicate.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{Rational, Sign};
use crate::error::{invalid, Error, Result};
use crate::field::{AutomorphismCount, CmExtension, FieldElement};
use crate::local::is_global_norm;

/// `diag(a₁, …, a_r)` with `aᵢ ∈ F*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermitianForm {
    ext: Arc<CmExtension>,
    diag: Vec<FieldElement>,
}

impl HermitianForm {
    pub fn new(ext: Arc<CmExtension>, diag: Vec<FieldElement>) -> Result<HermitianForm> {
        if diag.is_empty() {
            return invalid("hermitian form of rank 0");
        }
        let d = ext.base().degree();
        for (i, a) in diag.iter().enumerate() {
            if a.coords().len() != d {
                return invalid(format!("diagonal entry {i} is not an element of the base field"));
            }
            if a.is_zero() {
                return invalid(format!("diagonal entry {i} is zero"));
            }
        }
        Ok(HermitianForm { ext, diag })
    }

    pub fn ext(&self) -> &Arc<CmExtension> {
        &self.ext
    }

    pub fn diag(&self) -> &[FieldElement] {
        &self.diag
    }

    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    pub fn scaled(&self, lambda: &FieldElement) -> Result<HermitianForm> {
        let f = self.ext.base();
        HermitianForm::new(
            self.ext.clone(),
            self.diag.iter().map(|a| f.mul(lambda, a)).collect(),
        )
    }

    /// Entries reordered so that entry `i` of the result is entry `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<HermitianForm> {
        PlacePermutation::new(perm.to_vec())?;
        if perm.len() != self.rank() {
            return invalid("permutation size does not match the rank");
        }
        HermitianForm::new(
            self.ext.clone(),
            perm.iter().map(|&i| self.diag[i].clone()).collect(),
        )
    }

    /// `diag(σ(a₁), …)` for the field automorphism with `σ(α) = image`.
    pub fn galois_twist(&self, image: &FieldElement) -> Result<HermitianForm> {
        let f = self.ext.base();
        let delta = f.apply_automorphism(self.ext.delta(), image);
        if &delta != self.ext.delta() {
            return Err(Error::Unsupported(
                "automorphism moves delta; twisted form lives over another extension".into(),
            ));
        }
        HermitianForm::new(
            self.ext.clone(),
            self.diag
                .iter()
                .map(|a| f.apply_automorphism(a, image))
                .collect(),
        )
    }
}

/// `(pos, neg)` at each real place, in canonical place order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignaturePattern {
    pub per_place: Vec<(usize, usize)>,
}

impl SignaturePattern {
    pub fn indefinite_places(&self) -> Vec<usize> {
        self.per_place
            .iter()
            .enumerate()
            .filter(|(_, &(p, q))| p > 0 && q > 0)
            .map(|(j, _)| j)
            .collect()
    }

    /// `|pos - neg|` at each place; invariant under scaling.
    pub fn excess(&self) -> Vec<usize> {
        self.per_place.iter().map(|&(p, q)| p.abs_diff(q)).collect()
    }
}

impl fmt::Display for SignaturePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .per_place
            .iter()
            .map(|(p, q)| format!("({p},{q})"))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

pub fn signature_pattern(h: &HermitianForm) -> Result<SignaturePattern> {
    let f = h.ext.base();
    let mut per_place = vec![(0, 0); f.num_real_places()];
    for a in &h.diag {
        for (j, s) in f.signs(a)?.into_iter().enumerate() {
            match s {
                Sign::Positive => per_place[j].0 += 1,
                Sign::Negative => per_place[j].1 += 1,
            }
        }
    }
    Ok(SignaturePattern { per_place })
}

/// Landherr invariants: rank, discriminant representative, signatures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalInvariant {
    pub rank: usize,
    pub disc: FieldElement,
    pub signatures: SignaturePattern,
}

pub fn global_invariant(h: &HermitianForm) -> Result<GlobalInvariant> {
    Ok(GlobalInvariant {
        rank: h.rank(),
        disc: h.ext.base().product(&h.diag),
        signatures: signature_pattern(h)?,
    })
}

fn same_ext(h1: &HermitianForm, h2: &HermitianForm) -> Result<()> {
    if Arc::ptr_eq(&h1.ext, &h2.ext) || h1.ext == h2.ext {
        Ok(())
    } else {
        invalid("forms are defined over different extensions")
    }
}

/// Isometry of hermitian spaces. Undecided local norm tests surface as
/// `Inconclusive`.
pub fn forms_equivalent(h1: &HermitianForm, h2: &HermitianForm) -> Result<bool> {
    same_ext(h1, h2)?;
    if h1.rank() != h2.rank() {
        return Ok(false);
    }
    let g1 = global_invariant(h1)?;
    let g2 = global_invariant(h2)?;
    if g1.signatures != g2.signatures {
        return Ok(false);
    }
    let ratio = h1.ext.base().div(&g1.disc, &g2.disc)?;
    is_global_norm(&h1.ext, &ratio)
}

/// A permutation `j ↦ mapping[j]` of the real places.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlacePermutation {
    mapping: Vec<usize>,
}

impl PlacePermutation {
    pub fn new(mapping: Vec<usize>) -> Result<PlacePermutation> {
        let mut seen = vec![false; mapping.len()];
        for &m in &mapping {
            if m >= mapping.len() || std::mem::replace(&mut seen[m], true) {
                return invalid(format!("{mapping:?} is not a permutation"));
            }
        }
        Ok(PlacePermutation { mapping })
    }

    pub fn identity(n: usize) -> PlacePermutation {
        PlacePermutation {
            mapping: (0..n).collect(),
        }
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Result<PlacePermutation> {
        let mut m: Vec<usize> = (0..n).collect();
        if i >= n || j >= n {
            return invalid("transposition index out of range");
        }
        m.swap(i, j);
        Ok(PlacePermutation { mapping: m })
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn apply(&self, j: usize) -> usize {
        self.mapping[j]
    }

    pub fn inverse(&self) -> PlacePermutation {
        let mut m = vec![0; self.len()];
        for (j, &t) in self.mapping.iter().enumerate() {
            m[t] = j;
        }
        PlacePermutation { mapping: m }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PlacePermutation) -> Result<PlacePermutation> {
        if self.len() != other.len() {
            return invalid("composing permutations of different sizes");
        }
        Ok(PlacePermutation {
            mapping: other.mapping.iter().map(|&j| self.mapping[j]).collect(),
        })
    }
}

/// `out[j] = s[τ(j)]`.
pub fn twist_pattern(s: &SignaturePattern, tau: &PlacePermutation) -> Result<SignaturePattern> {
    if s.per_place.len() != tau.len() {
        return invalid(format!(
            "permutation of {} places applied to a pattern with {}",
            tau.len(),
            s.per_place.len()
        ));
    }
    Ok(SignaturePattern {
        per_place: (0..tau.len()).map(|j| s.per_place[tau.apply(j)]).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupVerdict {
    /// `λ·h₁ ≅ h₂`, hence `SU(h₁) ≅ SU(h₂)`.
    Isomorphic { lambda: FieldElement },
    /// `|pos - neg|` differs at this real place.
    NotIsomorphic { witness: usize },
    Unknown { reason: String },
}

impl GroupVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            GroupVerdict::Isomorphic { .. } => "ISOMORPHIC",
            GroupVerdict::NotIsomorphic { .. } => "NOT_ISOMORPHIC",
            GroupVerdict::Unknown { .. } => "UNKNOWN",
        }
    }
}

/// Candidate similitude factors: `±∏ gᵢ^{eᵢ}` with `Σ|eᵢ| ≤ bound`, in order of
/// total degree. The first entries are `1` and `-1`.
fn lambda_candidates(
    ext: &CmExtension,
    gens: &[FieldElement],
    bound: u32,
) -> Result<Vec<FieldElement>> {
    let f = ext.base();
    let inverses = gens.iter().map(|g| f.inv(g)).collect::<Result<Vec<_>>>()?;
    let mut layers: Vec<Vec<FieldElement>> = vec![vec![f.one()]];
    let mut seen: Vec<FieldElement> = vec![f.one()];
    for _ in 0..bound {
        let mut next = Vec::new();
        for x in layers.last().unwrap() {
            for g in gens.iter().chain(&inverses) {
                let y = f.mul(x, g);
                if !seen.contains(&y) {
                    seen.push(y.clone());
                    next.push(y);
                }
            }
        }
        layers.push(next);
    }
    let mut out = Vec::with_capacity(seen.len() * 2);
    for layer in layers {
        for x in layer {
            out.push(f.neg(&x));
            out.push(x);
        }
    }
    // ascending total degree, with 1 before -1 inside the first layer
    out.swap(0, 1);
    Ok(out)
}

/// Is `SU(h₁) ≅ SU(h₂)` as `F`-groups?
///
/// `NOT_ISOMORPHIC` comes only from a real place where `|pos - neg|` differs.
/// `ISOMORPHIC` comes from a similitude factor among products of `units` and
/// the diagonal entries. Anything else is `UNKNOWN`.
pub fn group_isomorphism_verdict(
    h1: &HermitianForm,
    h2: &HermitianForm,
    units: &[FieldElement],
    height_bound: u32,
) -> Result<GroupVerdict> {
    same_ext(h1, h2)?;
    if h1.rank() != h2.rank() {
        return invalid("group comparison needs forms of equal rank");
    }
    if h1.rank() % 2 == 0 {
        return Err(Error::Unsupported(format!(
            "even rank {} is out of scope",
            h1.rank()
        )));
    }
    let e1 = signature_pattern(h1)?.excess();
    let e2 = signature_pattern(h2)?.excess();
    if let Some(j) = (0..e1.len()).find(|&j| e1[j] != e2[j]) {
        return Ok(GroupVerdict::NotIsomorphic { witness: j });
    }
    let mut gens: Vec<FieldElement> = Vec::new();
    for g in units.iter().chain(h1.diag()).chain(h2.diag()) {
        if !g.is_zero() && !gens.contains(g) && g != &h1.ext.base().one() {
            gens.push(g.clone());
        }
    }
    let mut undecided = 0usize;
    for lambda in lambda_candidates(&h1.ext, &gens, height_bound)? {
        match forms_equivalent(&h1.scaled(&lambda)?, h2) {
            Ok(true) => return Ok(GroupVerdict::Isomorphic { lambda }),
            Ok(false) => {}
            Err(Error::Inconclusive(_)) => undecided += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(GroupVerdict::Unknown {
        reason: format!(
            "no similitude factor found within height {height_bound} ({undecided} candidates undecided)"
        ),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Unknown => "UNKNOWN",
        }
    }

    /// FAIL dominates UNKNOWN, which dominates PASS.
    pub fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut out = Verdict::Pass;
        for v in verdicts {
            match v {
                Verdict::Fail => return Verdict::Fail,
                Verdict::Unknown => out = Verdict::Unknown,
                Verdict::Pass => {}
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub name: &'static str,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedVerdict {
    pub components: Vec<Component>,
}

impl SeedVerdict {
    pub fn overall(&self) -> Verdict {
        Verdict::combine(self.components.iter().map(|c| c.verdict))
    }

    pub fn component(&self, name: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.name == name)
    }
}

pub const COMPONENT_STANDING: &str = "a_single_indefinite_place";
pub const COMPONENT_NONISO: &str = "b_not_isomorphic_to_twists";
pub const COMPONENT_TWIST: &str = "c_twist_match";
pub const COMPONENT_ODD_RANK: &str = "d_odd_rank";

/// One indefinite place with signature `(r-1, 1)` or `(1, r-1)`, definite
/// elsewhere.
fn standing_assumption(s: &SignaturePattern, rank: usize) -> bool {
    let ind = s.indefinite_places();
    ind.len() == 1 && {
        let (p, q) = s.per_place[ind[0]];
        p.min(q) == 1 && p + q == rank
    }
}

/// The computable hypotheses of the seed-pair construction.
pub fn seed_pair_check(
    h1: &HermitianForm,
    h2: &HermitianForm,
    tau: &PlacePermutation,
    automorphisms: &AutomorphismCount,
    units: &[FieldElement],
    height_bound: u32,
) -> Result<SeedVerdict> {
    same_ext(h1, h2)?;
    let s1 = signature_pattern(h1)?;
    let s2 = signature_pattern(h2)?;
    let mut components = Vec::new();

    let a_ok = standing_assumption(&s1, h1.rank()) && standing_assumption(&s2, h2.rank());
    components.push(Component {
        name: COMPONENT_STANDING,
        verdict: if a_ok { Verdict::Pass } else { Verdict::Fail },
        detail: format!("h1: {s1}; h2: {s2}"),
    });

    components.push(noniso_component(h1, h2, automorphisms, units, height_bound)?);

    let twisted = twist_pattern(&s1, tau)?;
    components.push(Component {
        name: COMPONENT_TWIST,
        verdict: if twisted == s2 { Verdict::Pass } else { Verdict::Fail },
        detail: format!("tau = {:?}; twisted h1: {twisted}", tau.mapping()),
    });

    let odd = h1.rank() % 2 == 1 && h1.rank() == h2.rank();
    components.push(Component {
        name: COMPONENT_ODD_RANK,
        verdict: if odd { Verdict::Pass } else { Verdict::Fail },
        detail: format!("rank {}", h1.rank()),
    });
    Ok(SeedVerdict { components })
}

fn noniso_component(
    h1: &HermitianForm,
    h2: &HermitianForm,
    automorphisms: &AutomorphismCount,
    units: &[FieldElement],
    height_bound: u32,
) -> Result<Component> {
    let mk = |verdict, detail| {
        Ok(Component {
            name: COMPONENT_NONISO,
            verdict,
            detail,
        })
    };
    if h1.rank() != h2.rank() || h1.rank() % 2 == 0 {
        return mk(Verdict::Fail, "ranks differ or are even".into());
    }
    let mut verdict = Verdict::Pass;
    let mut notes = Vec::new();
    if automorphisms.exact().is_none() {
        verdict = Verdict::Unknown;
        notes.push("automorphism group not determined".to_string());
    }
    for (i, image) in automorphisms.images().iter().enumerate() {
        let twisted = match h1.galois_twist(image) {
            Ok(t) => t,
            Err(e) => {
                verdict = Verdict::combine([verdict, Verdict::Unknown]);
                notes.push(format!("sigma_{i}: {e}"));
                continue;
            }
        };
        match group_isomorphism_verdict(&twisted, h2, units, height_bound)? {
            GroupVerdict::NotIsomorphic { witness } => {
                notes.push(format!("sigma_{i}: NOT_ISOMORPHIC at real place {witness}"))
            }
            GroupVerdict::Isomorphic { lambda } => {
                verdict = Verdict::Fail;
                notes.push(format!("sigma_{i}: ISOMORPHIC with lambda = {lambda:?}"));
            }
            GroupVerdict::Unknown { reason } => {
                verdict = Verdict::combine([verdict, Verdict::Unknown]);
                notes.push(format!("sigma_{i}: UNKNOWN ({reason})"));
            }
        }
    }
    mk(verdict, notes.join("; "))
}

/// Exact rational entries of a form, for serialization.
pub fn form_coordinates(h: &HermitianForm) -> Vec<Vec<Rational>> {
    h.diag.iter().map(|a| a.coords().to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Poly;
    use crate::field::{automorphism_count, NumberField, DEFAULT_PRECISION_CAP};
    use crate::local::norm_class_equal;
    use proptest::prelude::*;

    fn setup() -> Arc<CmExtension> {
        let f = Arc::new(NumberField::new(Poly::from_i64s(&[1, -3, -1, 1])).unwrap());
        let d = f.element_i64(&[-1, 0, 0]).unwrap();
        Arc::new(CmExtension::new(f, d).unwrap())
    }

    fn form(e: &Arc<CmExtension>, entries: &[[i64; 3]]) -> HermitianForm {
        let f = e.base();
        HermitianForm::new(
            e.clone(),
            entries.iter().map(|c| f.element_i64(c).unwrap()).collect(),
        )
        .unwrap()
    }

    fn h1(e: &Arc<CmExtension>) -> HermitianForm {
        form(e, &[[0, -1, 0], [0, -1, 0], [-1, 0, 0]])
    }

    fn h2(e: &Arc<CmExtension>) -> HermitianForm {
        form(e, &[[2, 0, -1], [2, 0, -1], [-1, 0, 0]])
    }

    fn units(e: &CmExtension) -> Vec<FieldElement> {
        let f = e.base();
        vec![
            f.alpha(),
            f.element_i64(&[-2, 0, 1]).unwrap(),
            f.element_i64(&[-1, 0, 0]).unwrap(),
        ]
    }

    #[test]
    fn worked_form_signatures() {
        let e = setup();
        let s1 = signature_pattern(&h1(&e)).unwrap();
        let s2 = signature_pattern(&h2(&e)).unwrap();
        assert_eq!(s1.per_place, vec![(2, 1), (0, 3), (0, 3)]);
        assert_eq!(s2.per_place, vec![(0, 3), (2, 1), (0, 3)]);
        let one = form(&e, &[[1, 0, 0]; 3]);
        assert_eq!(signature_pattern(&one).unwrap().per_place, vec![(3, 0); 3]);
    }

    #[test]
    fn invariants_and_equivalence() {
        let e = setup();
        let f = e.base();
        let m = form(&e, &[[-1, 0, 0]; 3]);
        let g = global_invariant(&m).unwrap();
        assert_eq!(g.rank, 3);
        assert_eq!(g.disc, f.element_i64(&[-1, 0, 0]).unwrap());
        assert_eq!(g.signatures.per_place, vec![(0, 3); 3]);
        let g1 = global_invariant(&h1(&e)).unwrap();
        // (-α)(-α)(-1) = -α²
        assert_eq!(g1.disc, f.element_i64(&[0, 0, -1]).unwrap());
        assert!(forms_equivalent(&h1(&e), &h1(&e)).unwrap());
        assert!(!forms_equivalent(&h1(&e), &h2(&e)).unwrap());
        let a = form(&e, &[[1, 1, 0], [3, 0, 0], [-1, 0, 0]]);
        let b = a.permuted(&[1, 0, 2]).unwrap();
        assert!(forms_equivalent(&a, &b).unwrap());
    }

    #[test]
    fn group_verdicts() {
        let e = setup();
        let u = units(&e);
        match group_isomorphism_verdict(&h1(&e), &h2(&e), &u, 2).unwrap() {
            GroupVerdict::NotIsomorphic { witness } => assert_eq!(witness, 0),
            v => panic!("{v:?}"),
        }
        let h = h1(&e);
        let minus = h.scaled(&e.base().element_i64(&[-1, 0, 0]).unwrap()).unwrap();
        assert_eq!(
            group_isomorphism_verdict(&h, &minus, &u, 1).unwrap(),
            GroupVerdict::Isomorphic {
                lambda: e.base().element_i64(&[-1, 0, 0]).unwrap()
            }
        );
        assert_eq!(
            group_isomorphism_verdict(&h, &h, &u, 1).unwrap(),
            GroupVerdict::Isomorphic { lambda: e.base().one() }
        );
        let even = form(&e, &[[1, 0, 0], [-1, 0, 0]]);
        assert!(matches!(
            group_isomorphism_verdict(&even, &even, &u, 1),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn twists() {
        let e = setup();
        let s1 = signature_pattern(&h1(&e)).unwrap();
        let s2 = signature_pattern(&h2(&e)).unwrap();
        let tau = PlacePermutation::transposition(3, 0, 1).unwrap();
        assert_eq!(twist_pattern(&s1, &tau).unwrap(), s2);
        assert_eq!(twist_pattern(&s1, &PlacePermutation::identity(3)).unwrap(), s1);
        let twice = twist_pattern(&twist_pattern(&s1, &tau).unwrap(), &tau).unwrap();
        assert_eq!(twice, s1);
        assert!(twist_pattern(&s1, &PlacePermutation::identity(2)).is_err());
        assert!(PlacePermutation::new(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn seed_checks() {
        let e = setup();
        let aut = automorphism_count(e.base(), DEFAULT_PRECISION_CAP);
        let u = units(&e);
        let tau = PlacePermutation::transposition(3, 0, 1).unwrap();
        let v = seed_pair_check(&h1(&e), &h2(&e), &tau, &aut, &u, 2).unwrap();
        assert_eq!(v.overall(), Verdict::Pass, "{v:?}");
        let same = seed_pair_check(&h1(&e), &h1(&e), &PlacePermutation::identity(3), &aut, &u, 2).unwrap();
        assert_eq!(same.overall(), Verdict::Fail);
        assert_eq!(same.component(COMPONENT_NONISO).unwrap().verdict, Verdict::Fail);
        assert_eq!(same.component(COMPONENT_STANDING).unwrap().verdict, Verdict::Pass);
        let one = form(&e, &[[1, 0, 0]; 3]);
        let bad = seed_pair_check(&h1(&e), &one, &tau, &aut, &u, 2).unwrap();
        assert_eq!(bad.component(COMPONENT_STANDING).unwrap().verdict, Verdict::Fail);
        assert_eq!(bad.overall(), Verdict::Fail);
    }

    #[test]
    fn verdict_precedence() {
        use Verdict::*;
        assert_eq!(Verdict::combine([Pass, Pass]), Pass);
        assert_eq!(Verdict::combine([Pass, Unknown]), Unknown);
        assert_eq!(Verdict::combine([Unknown, Fail]), Fail);
    }

    fn entry() -> impl Strategy<Value = [i64; 3]> {
        [-4i64..=4, -4i64..=4, -4i64..=4].prop_filter("nonzero", |c| c.iter().any(|&x| x != 0))
    }

    fn perm3() -> impl Strategy<Value = Vec<usize>> {
        Just(vec![0usize, 1, 2]).prop_shuffle()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn scaling_keeps_excess(a in entry(), b in entry(), c in entry(), l in entry()) {
            let e = setup();
            let h = form(&e, &[a, b, c]);
            let lambda = e.base().element_i64(&l).unwrap();
            let s = signature_pattern(&h).unwrap().excess();
            let t = signature_pattern(&h.scaled(&lambda).unwrap()).unwrap().excess();
            prop_assert_eq!(s, t);
        }

        #[test]
        fn permutation_equivariance(a in entry(), b in entry(), c in entry(), p in perm3()) {
            let e = setup();
            let h = form(&e, &[a, b, c]);
            prop_assert_eq!(signature_pattern(&h).unwrap(), signature_pattern(&h.permuted(&p).unwrap()).unwrap());
        }

        #[test]
        fn twist_is_an_action(p in perm3(), q in perm3(), a in entry(), b in entry(), c in entry()) {
            let e = setup();
            let s = signature_pattern(&form(&e, &[a, b, c])).unwrap();
            let t1 = PlacePermutation::new(p).unwrap();
            let t2 = PlacePermutation::new(q).unwrap();
            let lhs = twist_pattern(&twist_pattern(&s, &t1).unwrap(), &t2).unwrap();
            let rhs = twist_pattern(&s, &t1.compose(&t2).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn equivalence_relation(x in prop::collection::vec(entry(), 9), p in perm3()) {
            let e = setup();
            let h = form(&e, &[x[0], x[1], x[2]]);
            let k = form(&e, &[x[3], x[4], x[5]]);
            let m = form(&e, &[x[6], x[7], x[8]]);
            prop_assert!(forms_equivalent(&h, &h).unwrap());
            prop_assert!(forms_equivalent(&h, &h.permuted(&p).unwrap()).unwrap());
            let hk = forms_equivalent(&h, &k).unwrap();
            prop_assert_eq!(hk, forms_equivalent(&k, &h).unwrap());
            let km = forms_equivalent(&k, &m).unwrap();
            if hk && km {
                prop_assert!(forms_equivalent(&h, &m).unwrap());
            }
        }

        #[test]
        fn scaled_discriminant(a in entry(), b in entry(), c in entry(), l in entry()) {
            let e = setup();
            let f = e.base();
            let h = form(&e, &[a, b, c]);
            let lambda = f.element_i64(&l).unwrap();
            let d = global_invariant(&h).unwrap().disc;
            let ds = global_invariant(&h.scaled(&lambda).unwrap()).unwrap().disc;
            prop_assert_eq!(&ds, &f.mul(&f.pow(&lambda, 3), &d));
            prop_assert!(norm_class_equal(&e, &ds, &f.mul(&lambda, &d)).unwrap());
        }
    }
}
