use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::arith::{factor_integer, int, is_rational_square, parse_rational, poly_discriminant, rat, Poly, Rational, Sign};
use crate::error::{invalid, Error, Result};
use crate::field::{automorphism_count, AutomorphismCount, CmExtension, FieldElement, GaloisClosure, NumberField};
use crate::fingerprint::{fingerprint, fingerprints_equal, level_id};
use crate::groups::{congruence_index, reduction_group, CongruenceLevel};
use crate::hermitian::{
    global_invariant, group_isomorphism_verdict, seed_pair_check, twist_pattern,
    GroupVerdict, HermitianForm, PlacePermutation, SignaturePattern, Verdict,
};
use crate::local::{factor_prime, hilbert_product_check, local_group_isomorphic, norm_class_equal, FinitePlace};

use super::*;

fn parse_coords(xs: &[String]) -> Result<Vec<Rational>> {
    xs.iter().map(|s| parse_rational(s)).collect()
}

fn parse_element(field: &NumberField, xs: &[String]) -> Result<FieldElement> {
    if xs.len() > field.degree() {
        return invalid(format!(
            "element has {} coordinates, field degree is {}",
            xs.len(),
            field.degree()
        ));
    }
    let mut c = parse_coords(xs)?;
    c.resize(field.degree(), int(0));
    field.element(c)
}

pub(super) fn show(e: &FieldElement) -> String {
    e.to_poly().pretty("a")
}

fn sign_str(s: Sign) -> String {
    match s {
        Sign::Positive => "+".into(),
        Sign::Negative => "-".into(),
    }
}

fn form_name(i: usize) -> String {
    format!("h{}", i + 1)
}

struct Parsed {
    field: Arc<NumberField>,
    ext: Arc<CmExtension>,
    forms: Vec<HermitianForm>,
    twists: Vec<PlacePermutation>,
    units: Vec<FieldElement>,
    samples: Vec<FieldElement>,
}

fn parse_input(input: &CertificateInput) -> Result<Parsed> {
    let p = Poly::new(parse_coords(&input.min_poly)?);
    let field = Arc::new(NumberField::new(p)?);
    let delta = parse_element(&field, &input.delta)?;
    let ext = Arc::new(CmExtension::new(field.clone(), delta)?);
    if input.forms.len() < 2 {
        return invalid("at least two forms are needed");
    }
    let forms = input
        .forms
        .iter()
        .map(|f| {
            let diag = f
                .iter()
                .map(|x| parse_element(&field, x))
                .collect::<Result<Vec<_>>>()?;
            HermitianForm::new(ext.clone(), diag)
        })
        .collect::<Result<Vec<_>>>()?;
    if forms.iter().any(|h| h.rank() != forms[0].rank()) {
        return invalid("forms of different ranks");
    }
    if input.twists.len() + 1 != forms.len() {
        return invalid("need one twist permutation per form after the first");
    }
    let n = field.num_real_places();
    let twists = input
        .twists
        .iter()
        .map(|t| {
            if t.len() != n {
                return invalid(format!("twist {t:?} does not permute {n} places"));
            }
            PlacePermutation::new(t.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    let units = input
        .units
        .iter()
        .map(|u| parse_element(&field, u))
        .collect::<Result<Vec<_>>>()?;
    let samples = input
        .norm_samples
        .iter()
        .map(|u| parse_element(&field, u))
        .collect::<Result<Vec<_>>>()?;
    Ok(Parsed {
        field,
        ext,
        forms,
        twists,
        units,
        samples,
    })
}

/// Is `ℤ[α]` the maximal order? True iff no prime whose square divides the
/// discriminant is refused by the Dedekind criterion.
fn order_is_maximal(field: &NumberField) -> Result<Option<bool>> {
    if !field.min_poly().is_monic() || !field.min_poly().has_integer_coeffs() {
        return Ok(None);
    }
    let d = field.disc().numer().abs();
    for (p, e) in factor_integer(&d)? {
        if e < 2 {
            continue;
        }
        match factor_prime(field, p) {
            Ok(_) => {}
            Err(Error::UnsupportedPrime { .. }) => return Ok(Some(false)),
            Err(e) => return Err(e),
        }
    }
    Ok(Some(true))
}

fn places_above(field: &NumberField, primes: &BTreeSet<u64>) -> Vec<(u64, Result<Vec<FinitePlace>>)> {
    primes.iter().map(|&p| (p, factor_prime(field, p))).collect()
}

fn component(name: impl Into<String>, verdict: Verdict, detail: impl Into<String>) -> ComponentBlock {
    ComponentBlock {
        name: name.into(),
        verdict,
        detail: detail.into(),
    }
}

fn pass_fail(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Run every check on `input` and assemble the certificate.
pub fn build_certificate(input: &CertificateInput, config: &PipelineConfig) -> Result<SeedCertificate> {
    let Parsed {
        field,
        ext,
        forms,
        twists,
        units,
        samples,
    } = parse_input(input)?;
    let n = field.num_real_places();
    let rank = forms[0].rank();
    let mut top = Vec::new();

    // field
    let aut = automorphism_count(&field, config.precision_cap);
    let width = rat(1, 1 << 20);
    let alpha = field.alpha();
    let place_order = (0..n)
        .map(|j| {
            let iv = field.place_value(j, &width)?;
            Ok(RealPlaceBlock {
                index: j,
                root_lo: iv.lo.to_string(),
                root_hi: iv.hi.to_string(),
                generator_sign: sign_str(field.sign_at(&alpha, j)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let field_block = FieldBlock {
        min_poly: field.min_poly().pretty("x"),
        degree: field.degree(),
        poly_disc: field.disc().to_string(),
        disc_is_square: is_rational_square(field.disc()),
        totally_real: field.is_totally_real(),
        place_order,
        automorphism_count: match &aut {
            AutomorphismCount::Exact { count, .. } => count.to_string(),
            AutomorphismCount::Unknown { lower, upper, .. } => format!("between {lower} and {upper}"),
        },
        automorphism_count_exact: aut.exact().is_some(),
        automorphism_images: aut.images().iter().map(show).collect(),
    };
    top.push(component(
        "field_totally_real",
        pass_fail(field_block.totally_real),
        format!("{} real places", n),
    ));

    let cm = CmBlock {
        delta: show(ext.delta()),
        delta_signs: field.signs(ext.delta())?.into_iter().map(sign_str).collect(),
    };

    // closure
    let closure = match &input.closure {
        None => None,
        Some(c) => {
            let q = Poly::new(parse_coords(&c.poly)?);
            let embs = c
                .embeddings
                .iter()
                .map(|e| Ok(Poly::new(parse_coords(e)?)))
                .collect::<Result<Vec<_>>>()?;
            let gc = GaloisClosure::new(q.clone(), embs.clone())?;
            let verified = (0..embs.len())
                .map(|j| gc.verify_embedding(&field, j))
                .collect::<Result<Vec<_>>>()?;
            Some(ClosureBlock {
                poly: q.pretty("b"),
                poly_disc: poly_discriminant(&q)?.to_string(),
                embeddings: embs.iter().map(|e| e.pretty("b")).collect(),
                distinct: gc.embeddings_distinct(),
                verified,
            })
        }
    };
    if let Some(c) = &closure {
        let ok = c.verified.iter().all(|&b| b) && c.distinct;
        top.push(component(
            "closure_embeddings",
            pass_fail(ok),
            format!("{} embeddings checked", c.verified.len()),
        ));
    }

    // units
    let unit_blocks = units
        .iter()
        .map(|u| {
            Ok(UnitBlock {
                element: show(u),
                norm: field.norm(u).to_string(),
                is_unit: field.is_unit(u)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if !unit_blocks.is_empty() {
        top.push(component(
            "units",
            pass_fail(unit_blocks.iter().all(|u| u.is_unit)),
            format!("{} listed elements", unit_blocks.len()),
        ));
    }

    // forms and signatures
    let mut form_blocks = Vec::new();
    let mut sigs: Vec<SignaturePattern> = Vec::new();
    let mut table = Vec::new();
    for (i, h) in forms.iter().enumerate() {
        let g = global_invariant(h)?;
        form_blocks.push(FormBlock {
            name: form_name(i),
            diag: h.diag().iter().map(show).collect(),
            disc: show(&g.disc),
        });
        for (j, &(p, q)) in g.signatures.per_place.iter().enumerate() {
            table.push(SignatureRow {
                form: form_name(i),
                place: j,
                pos: p,
                neg: q,
                indefinite: p > 0 && q > 0,
            });
        }
        sigs.push(g.signatures);
    }

    // twists relative to the first form
    let mut twist_blocks = Vec::new();
    for (i, t) in twists.iter().enumerate() {
        twist_blocks.push(TwistBlock {
            from: form_name(0),
            to: form_name(i + 1),
            permutation: t.mapping().to_vec(),
            pattern_match: twist_pattern(&sigs[0], t)? == sigs[i + 1],
        });
    }
    top.push(component(
        "twist_patterns",
        pass_fail(twist_blocks.iter().all(|t| t.pattern_match)),
        format!("{} twists", twist_blocks.len()),
    ));

    // pairs
    let all_twists: Vec<PlacePermutation> = std::iter::once(PlacePermutation::identity(n))
        .chain(twists.iter().cloned())
        .collect();
    let mut pairs = Vec::new();
    for i in 0..forms.len() {
        for j in i + 1..forms.len() {
            let tau = all_twists[i].inverse().compose(&all_twists[j])?;
            let (gv, gd) = match group_isomorphism_verdict(&forms[i], &forms[j], &units, config.lambda_height_bound) {
                Ok(v) => {
                    let d = match &v {
                        GroupVerdict::Isomorphic { lambda } => format!("lambda = {}", show(lambda)),
                        GroupVerdict::NotIsomorphic { witness } => format!("archimedean witness: real place {witness}"),
                        GroupVerdict::Unknown { reason } => reason.clone(),
                    };
                    (v.label().to_string(), d)
                }
                Err(e) => ("UNKNOWN".to_string(), e.to_string()),
            };
            let di = global_invariant(&forms[i])?.disc;
            let dj = global_invariant(&forms[j])?.disc;
            let classes = match norm_class_equal(&ext, &di, &dj) {
                Ok(true) => "equal".to_string(),
                Ok(false) => "different".to_string(),
                Err(e) => format!("inconclusive: {e}"),
            };
            let sv = seed_pair_check(&forms[i], &forms[j], &tau, &aut, &units, config.lambda_height_bound)?;
            let verdict = sv.overall();
            let name = format!("pair_{}_{}", form_name(i), form_name(j));
            top.push(component(name, verdict, format!("group verdict {gv}")));
            pairs.push(PairBlock {
                forms: vec![form_name(i), form_name(j)],
                permutation: tau.mapping().to_vec(),
                group_verdict: gv,
                group_detail: gd,
                discriminant_classes_equal: classes,
                components: sv
                    .components
                    .iter()
                    .map(|c| component(c.name, c.verdict, c.detail.clone()))
                    .collect(),
                verdict,
            });
        }
    }

    // local data
    let mut primes: BTreeSet<u64> = BTreeSet::from([2]);
    primes.extend(input.level_primes.iter().copied());
    let mut support = vec![ext.delta().clone()];
    for h in &forms {
        support.extend(h.diag().iter().cloned());
    }
    for x in &support {
        let nm = field.norm(x);
        for part in [nm.numer(), nm.denom()] {
            if !part.abs().is_zero() && part.abs() != BigInt::from(1) {
                primes.extend(factor_integer(&part.abs())?.into_iter().map(|(p, _)| p));
            }
        }
    }
    let mut local_places = Vec::new();
    for (p, ps) in places_above(&field, &primes) {
        match ps {
            Ok(ps) => {
                for v in ps {
                    let (splitting, group) = match local_group_isomorphic(&ext, rank, &v) {
                        Ok(l) => (l.splitting.as_str().to_string(), l.tag),
                        Err(e) => ("unknown".to_string(), format!("refused: {e}")),
                    };
                    local_places.push(LocalPlaceBlock {
                        place: v.to_string(),
                        splitting,
                        group,
                    });
                }
            }
            Err(e) => local_places.push(LocalPlaceBlock {
                place: format!("({p}, ?)"),
                splitting: "unknown".into(),
                group: format!("refused: {e}"),
            }),
        }
    }
    let mut sample_elems: Vec<FieldElement> = Vec::new();
    let d0 = global_invariant(&forms[0])?.disc;
    let ratios = forms[1..]
        .iter()
        .map(|h| field.div(&d0, &global_invariant(h)?.disc))
        .collect::<Result<Vec<_>>>()?;
    for x in samples.iter().chain(&units).chain(&ratios) {
        if !sample_elems.contains(x) {
            sample_elems.push(x.clone());
        }
    }
    let mut norm_samples = Vec::new();
    for u in &sample_elems {
        let r = hilbert_product_check(&ext, u)?;
        norm_samples.push(NormSampleBlock {
            element: show(u),
            symbols: r
                .entries
                .iter()
                .map(|e| match &e.result {
                    Ok(t) => SymbolEntry {
                        place: e.place.clone(),
                        symbol: if t.is_local_norm { "+1" } else { "-1" }.into(),
                        method: t.method.as_str().into(),
                    },
                    Err(m) => SymbolEntry {
                        place: e.place.clone(),
                        symbol: "unknown".into(),
                        method: m.clone(),
                    },
                })
                .collect(),
            minus_ones: r.minus_ones(),
            unknowns: r.unknowns(),
            product_formula: match r.product_formula_holds() {
                Some(true) => "holds",
                Some(false) => "fails",
                None => "inconclusive",
            }
            .into(),
        });
    }
    let pf = Verdict::combine(norm_samples.iter().map(|s| match s.product_formula.as_str() {
        "holds" => Verdict::Pass,
        "fails" => Verdict::Fail,
        _ => Verdict::Unknown,
    }));
    top.push(component(
        "product_formula_samples",
        pf,
        format!("{} elements", norm_samples.len()),
    ));
    let local = LocalBlock {
        odd_rank_rule: if rank % 2 == 1 {
            format!(
                "rank {rank} is odd: at every finite place all special unitary groups of rank {rank} for E_w/F_v are isomorphic, so the forms agree locally"
            )
        } else {
            format!("rank {rank} is even: no local rule applied")
        },
        places: local_places,
        norm_samples,
    };

    // congruence indices and the level
    let level_primes: BTreeSet<u64> = input.level_primes.iter().copied().collect();
    let mut level_places = Vec::new();
    let mut index = Vec::new();
    for (p, ps) in places_above(&field, &level_primes) {
        let ps = match ps {
            Ok(ps) => ps,
            Err(e) => {
                index.push(IndexEntry {
                    form: "*".into(),
                    place: format!("({p}, ?)"),
                    group: "unknown".into(),
                    index: format!("refused: {e}"),
                });
                continue;
            }
        };
        for v in ps {
            for (i, h) in forms.iter().enumerate() {
                let level = CongruenceLevel {
                    place: v.clone(),
                    form: h,
                };
                let (group, idx) = match (reduction_group(&level), congruence_index(&level)) {
                    (Ok(g), Ok(k)) => (g.to_string(), k.to_string()),
                    (Err(e), _) | (_, Err(e)) => ("unknown".into(), format!("refused: {e}")),
                };
                index.push(IndexEntry {
                    form: form_name(i),
                    place: v.to_string(),
                    group,
                    index: idx,
                });
            }
            level_places.push(v);
        }
    }
    let lid = level_id(&level_places);
    let fps = forms
        .iter()
        .map(|h| fingerprint(h, &lid))
        .collect::<Result<Vec<_>>>();
    let fingerprints = match fps {
        Ok(fps) => {
            let comparisons: Vec<_> = fps[1..].iter().map(|b| fingerprints_equal(&fps[0], b)).collect();
            let all_equal = comparisons.iter().all(|c| c.equal);
            FingerprintBlock {
                level_id: lid,
                fingerprints: fps,
                comparisons,
                all_equal,
            }
        }
        Err(_) => FingerprintBlock {
            level_id: lid,
            fingerprints: vec![],
            comparisons: vec![],
            all_equal: false,
        },
    };
    top.push(component(
        "volume_fingerprints",
        pass_fail(fingerprints.all_equal),
        "structural covolume inputs compared item by item",
    ));

    let assumptions = vec![
        "the level K is small enough for the congruence lattices to be torsion-free (not decided)".to_string(),
        "reduction modulo a good place is onto (strong approximation), so the index equals the finite group order".to_string(),
        "listed units are checked to be units; that they generate the unit group is not checked".to_string(),
    ];

    let (place_labels, claims) = match &input.claims {
        Some(c) => check_claims(c, &field, &aut, closure.as_ref(), &sigs, &twists)?,
        None => (BTreeMap::new(), vec![]),
    };
    let discrepancies = claims
        .iter()
        .filter(|c| c.status == "discrepancy")
        .map(|c| format!("{}: stated {}, computed {}", c.item, c.stated, c.computed))
        .collect();

    let overall = Verdict::combine(top.iter().map(|c| c.verdict));
    Ok(SeedCertificate {
        format_version: FORMAT_VERSION.into(),
        tool_version: TOOL_VERSION.into(),
        config: ConfigEcho::of(config),
        input: input.clone(),
        field: field_block,
        cm,
        closure,
        units: unit_blocks,
        forms: form_blocks,
        signature_table: table,
        twists: twist_blocks,
        pairs,
        local,
        index,
        fingerprints,
        assumptions,
        place_labels,
        claims,
        discrepancies,
        verdict: VerdictBlock {
            components: top,
            overall,
        },
    })
}

fn claim(item: impl Into<String>, stated: impl Into<String>, computed: impl Into<String>, status: &str, note: impl Into<String>) -> ClaimCheck {
    ClaimCheck {
        item: item.into(),
        stated: stated.into(),
        computed: computed.into(),
        status: status.into(),
        note: note.into(),
    }
}

fn agree(a: &str, b: &str) -> &'static str {
    if a == b {
        "agrees"
    } else {
        "discrepancy"
    }
}

type LabelMap = BTreeMap<String, String>;

fn check_claims(
    c: &Claims,
    field: &NumberField,
    aut: &AutomorphismCount,
    closure: Option<&ClosureBlock>,
    sigs: &[SignaturePattern],
    twists: &[PlacePermutation],
) -> Result<(LabelMap, Vec<ClaimCheck>)> {
    let mut out = Vec::new();
    if let Some(s) = &c.field_disc {
        let computed = field.disc().to_string();
        let note = match order_is_maximal(field)? {
            Some(true) => "polynomial discriminant; Z[a] is maximal, so it is the field discriminant",
            Some(false) => "polynomial discriminant; Z[a] is not maximal",
            None => "polynomial discriminant",
        };
        out.push(claim("field discriminant", s, &computed, agree(s, &computed), note));
    }
    if let Some(s) = &c.automorphism_count {
        let computed = match aut.exact() {
            Some(k) => k.to_string(),
            None => "undetermined".to_string(),
        };
        out.push(claim("automorphism count", s, &computed, agree(s, &computed), ""));
    }
    if let Some(s) = &c.galois_group {
        if field.degree() == 3 {
            let computed = if is_rational_square(field.disc()) { "C3" } else { "S3" };
            out.push(claim(
                "Galois group",
                s,
                computed,
                agree(s, computed),
                "irreducible cubic: S3 iff the discriminant is not a square",
            ));
        } else {
            out.push(claim("Galois group", s, "not computed", "unchecked", ""));
        }
    }
    if let (Some(s), Some(cl)) = (&c.closure_disc, closure) {
        let stated = parse_rational(s)?;
        let computed = parse_rational(&cl.poly_disc)?;
        let (status, note) = if stated == computed {
            ("agrees", String::new())
        } else if !stated.is_zero() && is_rational_square(&(&computed / &stated)) {
            (
                "consistent",
                format!(
                    "polynomial discriminant / stated value = {}, a square (an index squared)",
                    &computed / &stated
                ),
            )
        } else {
            ("discrepancy", String::new())
        };
        out.push(claim("closure discriminant", s, &cl.poly_disc, status, note));
    }

    // label dictionary from the indefinite places
    let mut labels = LabelMap::new();
    let mut used: BTreeSet<usize> = BTreeSet::new();
    for (i, l) in c.indefinite_place_labels.iter().enumerate() {
        let Some(s) = sigs.get(i) else { continue };
        let ind = s.indefinite_places();
        if ind.len() == 1 && !used.contains(&ind[0]) {
            labels.insert(l.clone(), format!("real {}", ind[0]));
            used.insert(ind[0]);
        } else {
            out.push(claim(
                format!("indefinite place of {}", form_name(i)),
                l,
                format!("{:?}", ind),
                "discrepancy",
                "not a single new indefinite place",
            ));
        }
    }
    let rest_labels: Vec<&String> = c.place_labels.iter().filter(|l| !labels.contains_key(*l)).collect();
    let rest_places: Vec<usize> = (0..field.num_real_places()).filter(|j| !used.contains(j)).collect();
    if rest_labels.len() == 1 && rest_places.len() == 1 {
        labels.insert(rest_labels[0].clone(), format!("real {}", rest_places[0]));
    }
    let place_of = |l: &str| -> Option<usize> { labels.get(l).and_then(|s| s.strip_prefix("real ")).and_then(|s| s.parse().ok()) };

    let alpha = field.alpha();
    let mut stated_pos = 0;
    let mut all_known = true;
    for (l, s) in &c.generator_signs {
        if s == "+" {
            stated_pos += 1;
        }
        match place_of(l) {
            Some(j) => {
                let computed = sign_str(field.sign_at(&alpha, j)?);
                out.push(claim(
                    format!("sign of a at {l}"),
                    s,
                    &computed,
                    agree(s, &computed),
                    format!("{l} is real place {j}"),
                ));
            }
            None => {
                all_known = false;
                out.push(claim(format!("sign of a at {l}"), s, "unlabelled", "unchecked", ""));
            }
        }
    }
    if !c.generator_signs.is_empty() && all_known && c.generator_signs.len() == field.num_real_places() {
        let computed = field
            .signs(&alpha)?
            .into_iter()
            .filter(|&s| s == Sign::Positive)
            .count();
        out.push(claim(
            "number of places where a > 0",
            stated_pos.to_string(),
            computed.to_string(),
            agree(&stated_pos.to_string(), &computed.to_string()),
            "",
        ));
    }
    if c.twist_labels.len() == 2 {
        let stated = format!("({} {})", c.twist_labels[0], c.twist_labels[1]);
        match (place_of(&c.twist_labels[0]), place_of(&c.twist_labels[1]), twists.first()) {
            (Some(a), Some(b), Some(t)) => {
                let expected = PlacePermutation::transposition(field.num_real_places(), a, b)?;
                out.push(claim(
                    "twist",
                    stated,
                    format!("{:?}", t.mapping()),
                    if &expected == t { "agrees" } else { "discrepancy" },
                    format!("transposition of real places {a} and {b}"),
                ));
            }
            _ => out.push(claim("twist", stated, "unlabelled", "unchecked", "")),
        }
    }
    Ok((labels, out))
}

/// The worked cubic example from the shipped fixture.
pub fn run_paper_example() -> Result<SeedCertificate> {
    run_paper_example_with(&PipelineConfig::default())
}

pub fn run_paper_example_with(config: &PipelineConfig) -> Result<SeedCertificate> {
    let input = CertificateInput::from_json(PAPER_FIXTURE)?;
    build_certificate(&input, config)
}
