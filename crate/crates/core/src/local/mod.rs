//! Nonarchimedean data for a CM extension `E = F(√δ)`: places of `F` above
//! rational primes, their splitting in `E`, local norm tests and the product
//! formula cross-check.

mod completion;
mod dyadic;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::modular::{factor_mod_p, ModRing, ZmPoly};
use crate::arith::{factor_integer, is_prime, valuation, Poly, Rational, Sign};
use crate::error::{invalid, Error, Result};
use crate::field::{CmExtension, FieldElement, NumberField};

use completion::Completion;

/// A prime 𝔭 of `F` above ℓ, read off the factor `g` of `p mod ℓ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinitePlace {
    rational_prime: u64,
    local_factor: Poly,
    residue_degree: u32,
    ramification_index: u32,
}

impl FinitePlace {
    pub fn rational_prime(&self) -> u64 {
        self.rational_prime
    }

    /// Monic factor of `p mod ℓ`, coefficients in `[0, ℓ)`.
    pub fn local_factor(&self) -> &Poly {
        &self.local_factor
    }

    pub fn residue_degree(&self) -> u32 {
        self.residue_degree
    }

    pub fn ramification_index(&self) -> u32 {
        self.ramification_index
    }

    pub fn residue_field_size(&self) -> u128 {
        (self.rational_prime as u128).pow(self.residue_degree)
    }
}

impl fmt::Display for FinitePlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {})",
            self.rational_prime,
            self.local_factor.pretty("a")
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplittingType {
    Split,
    Inert,
    Ramified,
}

impl SplittingType {
    pub fn as_str(self) -> &'static str {
        match self {
            SplittingType::Split => "split",
            SplittingType::Inert => "inert",
            SplittingType::Ramified => "ramified",
        }
    }
}

/// A place of `F`: a real embedding by canonical index, or a finite prime.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Place {
    Real(usize),
    Finite(FinitePlace),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real(j) => write!(f, "real {j}"),
            Place::Finite(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormMethod {
    /// Split place: every element is a norm.
    Split,
    /// Unramified place: norms are the elements of even valuation.
    UnramifiedValuation,
    /// Ramified place of odd residue characteristic: tame symbol.
    TameSymbol,
    /// Dyadic place: norm group rebuilt from square classes.
    DyadicHensel,
    ArchimedeanSign,
}

impl NormMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            NormMethod::Split => "split",
            NormMethod::UnramifiedValuation => "unramified-valuation",
            NormMethod::TameSymbol => "tame-symbol",
            NormMethod::DyadicHensel => "hensel-lift",
            NormMethod::ArchimedeanSign => "archimedean-sign",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormTestResult {
    pub place: Place,
    pub is_local_norm: bool,
    pub method: NormMethod,
}

pub(crate) fn integer_min_poly(field: &NumberField) -> Result<ZmPoly> {
    let p = field.min_poly();
    if !p.has_integer_coeffs() {
        return invalid("local computations need a minimal polynomial with integer coefficients");
    }
    Ok(p.coeffs().iter().map(|c| c.to_integer()).collect())
}

fn zm_to_poly(v: &ZmPoly) -> Poly {
    Poly::from_ints(v)
}

/// Places of `F` above ℓ.
///
/// ℓ must not divide the index `[O_F : ℤ[α]]`; this is decided by the
/// Dedekind criterion and index divisors are refused.
pub fn factor_prime(field: &NumberField, ell: u64) -> Result<Vec<FinitePlace>> {
    if !is_prime(ell) {
        return invalid(format!("{ell} is not prime"));
    }
    let f = integer_min_poly(field)?;
    let factors = factor_mod_p(ell, &f);
    if !dedekind_maximal(&f, &factors, ell) {
        return Err(Error::UnsupportedPrime {
            prime: ell,
            reason: "divides the index of Z[alpha] (Dedekind criterion)".into(),
        });
    }
    Ok(factors
        .into_iter()
        .map(|(g, e)| FinitePlace {
            rational_prime: ell,
            residue_degree: (g.len() - 1) as u32,
            local_factor: zm_to_poly(&g),
            ramification_index: e,
        })
        .collect())
}

/// Dedekind: with `p ≡ ∏ gᵢ^{eᵢ}`, `h = ∏ gᵢ` and `F = (∏ gᵢ^{eᵢ} - p)/ℓ`
/// over ℤ, the order is ℓ-maximal iff `gcd(F̄, h̄, p̄/h̄) = 1`.
fn dedekind_maximal(f: &ZmPoly, factors: &[(ZmPoly, u32)], ell: u64) -> bool {
    if factors.iter().all(|(_, e)| *e == 1) {
        return true;
    }
    let small = ModRing::of_u64(ell);
    let mut prod = Poly::one();
    let mut h = vec![BigInt::one()];
    for (g, e) in factors {
        prod = &prod * &zm_to_poly(g).pow(*e);
        h = small.mul(&h, g);
    }
    let diff = &prod - &Poly::from_ints(f);
    let ell_q = Rational::from_integer(BigInt::from(ell));
    let big_f: ZmPoly = diff
        .coeffs()
        .iter()
        .map(|c| (c / &ell_q).to_integer())
        .collect();
    let f_bar = small.norm(big_f);
    let t = small.div_rem(&small.norm(f.clone()), &h).expect("monic").0;
    let g = small.gcd(&small.gcd(&f_bar, &h), &t);
    g.len() == 1
}

fn rat_valuation(x: &Rational, ell: u64) -> i64 {
    valuation(x.numer(), ell) as i64 - valuation(x.denom(), ell) as i64
}

/// Upper bound on `v_𝔭` of the ℓ-integral rescaling of `x` produced by
/// [`Completion::embed`].
fn valuation_bound(field: &NumberField, x: &FieldElement, ell: u64) -> u32 {
    let l = x.to_poly().denominator_lcm();
    let t = valuation(&l, ell) as i64;
    let n = field.norm(x);
    let b = 2 * t * field.degree() as i64 + rat_valuation(&n, ell);
    b.max(0) as u32
}

/// `v_𝔭(u)` for nonzero `u`.
pub fn place_valuation(field: &NumberField, v: &FinitePlace, u: &FieldElement) -> Result<i64> {
    if u.is_zero() {
        return invalid("valuation of zero");
    }
    let comp = Completion::new(field, v, valuation_bound(field, u, v.rational_prime()) + 4)?;
    let (ul, shift) = comp.embed(u)?;
    let (a, _) = comp.valuation(&ul)?;
    Ok(a as i64 - (shift * v.ramification_index()) as i64)
}

/// Local data of `u` and `δ` at an odd place: valuations and unit residues.
struct OddData {
    comp: Completion,
    a: u32,
    u0: ZmPoly,
    b: u32,
    d0: ZmPoly,
}

fn odd_data(ext: &CmExtension, v: &FinitePlace, u: &FieldElement) -> Result<OddData> {
    let field = ext.base();
    let ell = v.rational_prime();
    let k = valuation_bound(field, u, ell) + valuation_bound(field, ext.delta(), ell) + 4;
    let comp = Completion::new(field, v, k)?;
    let (ul, _) = comp.embed(u)?;
    let (dl, _) = comp.embed(ext.delta())?;
    let (a, u0) = comp.valuation(&ul)?;
    let (b, d0) = comp.valuation(&dl)?;
    let u0 = comp.residue(&u0)?;
    let d0 = comp.residue(&d0)?;
    Ok(OddData { comp, a, u0, b, d0 })
}

/// How the place `v` of `F` behaves in `E`.
///
/// Odd residue characteristic: ramified iff `v(δ)` is odd, otherwise split or
/// inert as the unit part of δ is a square in the residue field or not.
/// Dyadic: see [`dyadic`].
pub fn splitting_in_e(ext: &CmExtension, v: &FinitePlace) -> Result<SplittingType> {
    if v.rational_prime() == 2 {
        return dyadic::splitting(ext, v);
    }
    let one = ext.base().one();
    let d = odd_data(ext, v, &one)?;
    Ok(if d.b % 2 == 1 {
        SplittingType::Ramified
    } else if d.comp.residue_is_square(&d.d0) {
        SplittingType::Split
    } else {
        SplittingType::Inert
    })
}

/// Is `u` a norm from `E_w` at the place `place`?
pub fn local_norm_test(ext: &CmExtension, u: &FieldElement, place: &Place) -> Result<NormTestResult> {
    if u.is_zero() {
        return invalid("norm test of zero");
    }
    let (is_local_norm, method) = match place {
        Place::Real(j) => (
            ext.base().sign_at(u, *j)? == Sign::Positive,
            NormMethod::ArchimedeanSign,
        ),
        Place::Finite(v) if v.rational_prime() == 2 => dyadic::norm_test(ext, v, u)?,
        Place::Finite(v) => odd_norm_test(ext, v, u)?,
    };
    Ok(NormTestResult {
        place: place.clone(),
        is_local_norm,
        method,
    })
}

/// Tame symbol `(u, δ)_𝔭 = χ((-1)^{ab} u₀^b δ₀^{-a})` with `u = π^a u₀`,
/// `δ = π^b δ₀` and χ the quadratic character of the residue field.
///
/// Scaling `u` and `δ` by even powers of ℓ to make them integral changes
/// neither side.
fn odd_norm_test(ext: &CmExtension, v: &FinitePlace, u: &FieldElement) -> Result<(bool, NormMethod)> {
    let d = odd_data(ext, v, u)?;
    let c = &d.comp;
    let chi = |r: &ZmPoly| c.residue_is_square(r);
    if d.b % 2 == 0 {
        if chi(&d.d0) {
            return Ok((true, NormMethod::Split));
        }
        return Ok((d.a % 2 == 0, NormMethod::UnramifiedValuation));
    }
    let mut w_square = true;
    if (d.a * d.b) % 2 == 1 && !chi(&c.residue_minus_one()) {
        w_square = !w_square;
    }
    if d.b % 2 == 1 && !chi(&d.u0) {
        w_square = !w_square;
    }
    if d.a % 2 == 1 && !chi(&d.d0) {
        w_square = !w_square;
    }
    Ok((w_square, NormMethod::TameSymbol))
}

/// Rational primes at which `(x, δ)` can be nontrivial for `x` among `xs`:
/// 2, divisors of numerators and denominators of norms, and of coordinate
/// denominators.
fn relevant_primes(field: &NumberField, xs: &[&FieldElement]) -> Result<BTreeSet<u64>> {
    let mut out = BTreeSet::from([2u64]);
    let mut add = |n: &BigInt| -> Result<()> {
        if n.is_zero() || n.abs().is_one() {
            return Ok(());
        }
        for (p, _) in factor_integer(n)? {
            out.insert(p);
        }
        Ok(())
    };
    for x in xs {
        let n = field.norm(x);
        add(n.numer())?;
        add(n.denom())?;
        add(&x.to_poly().denominator_lcm())?;
    }
    Ok(out)
}

/// Every place where the norm symbol of `u` can be nontrivial: all real
/// places and the finite places above [`relevant_primes`].
pub fn relevant_places(ext: &CmExtension, u: &FieldElement) -> Result<Vec<std::result::Result<Place, Error>>> {
    let field = ext.base();
    let mut out: Vec<std::result::Result<Place, Error>> =
        (0..field.num_real_places()).map(|j| Ok(Place::Real(j))).collect();
    for ell in relevant_primes(field, &[u, ext.delta()])? {
        match factor_prime(field, ell) {
            Ok(ps) => out.extend(ps.into_iter().map(|p| Ok(Place::Finite(p)))),
            Err(e) => out.push(Err(e)),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertEntry {
    pub place: String,
    pub result: std::result::Result<NormTestResult, String>,
}

/// Product-formula report: the local symbols `(u, δ)_v` at every place where
/// they can be nontrivial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertReport {
    pub entries: Vec<HilbertEntry>,
}

impl HilbertReport {
    pub fn minus_ones(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(&e.result, Ok(r) if !r.is_local_norm))
            .count()
    }

    pub fn unknowns(&self) -> usize {
        self.entries.iter().filter(|e| e.result.is_err()).count()
    }

    pub fn is_conclusive(&self) -> bool {
        self.unknowns() == 0
    }

    /// `Some(true)` iff conclusive with an even number of `-1` symbols.
    pub fn product_formula_holds(&self) -> Option<bool> {
        self.is_conclusive().then(|| self.minus_ones() % 2 == 0)
    }
}

pub fn hilbert_product_check(ext: &CmExtension, u: &FieldElement) -> Result<HilbertReport> {
    if u.is_zero() {
        return invalid("product formula check of zero");
    }
    let mut entries = Vec::new();
    for p in relevant_places(ext, u)? {
        match p {
            Ok(place) => {
                let result = local_norm_test(ext, u, &place).map_err(|e| e.to_string());
                entries.push(HilbertEntry {
                    place: place.to_string(),
                    result,
                });
            }
            Err(e) => entries.push(HilbertEntry {
                place: match &e {
                    Error::UnsupportedPrime { prime, .. } => format!("({prime}, ?)"),
                    _ => "?".into(),
                },
                result: Err(e.to_string()),
            }),
        }
    }
    Ok(HilbertReport { entries })
}

/// Is `u` a norm from `E`? By the Hasse norm theorem (E/F is cyclic) this is
/// the conjunction of the local tests at [`relevant_places`]; anything
/// undecided makes the whole test `Inconclusive`.
pub fn is_global_norm(ext: &CmExtension, u: &FieldElement) -> Result<bool> {
    if u.is_zero() {
        return invalid("norm test of zero");
    }
    for p in relevant_places(ext, u)? {
        let place = p.map_err(|e| Error::Inconclusive(e.to_string()))?;
        let r = local_norm_test(ext, u, &place).map_err(|e| match e {
            Error::InvalidInput(m) => Error::InvalidInput(m),
            other => Error::Inconclusive(other.to_string()),
        })?;
        if !r.is_local_norm {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Do `a` and `b` have the same class in `F*/N(E*)`?
pub fn norm_class_equal(ext: &CmExtension, a: &FieldElement, b: &FieldElement) -> Result<bool> {
    let q = ext.base().div(a, b)?;
    is_global_norm(ext, &q)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalGroupIso {
    pub isomorphic: bool,
    pub splitting: SplittingType,
    pub tag: String,
}

/// Any two special unitary groups of the same odd rank over `E_w/F_v` are
/// isomorphic; at split places both are `SL_rank(F_v)`.
pub fn local_group_isomorphic(ext: &CmExtension, rank: usize, v: &FinitePlace) -> Result<LocalGroupIso> {
    if rank % 2 == 0 {
        return Err(Error::Unsupported(format!(
            "even rank {rank}: local special unitary groups are not determined by rank"
        )));
    }
    let splitting = splitting_in_e(ext, v)?;
    let tag = match splitting {
        SplittingType::Split => format!("SL_{rank}(F_v)"),
        _ => format!("SU_{rank}(E_w/F_v)"),
    };
    Ok(LocalGroupIso {
        isomorphic: true,
        splitting,
        tag,
    })
}
