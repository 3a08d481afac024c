//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Tolerances are wall-clock limits only; every value is compared exactly.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use conjlat::arith::{int, is_rational_square, parse_rational, poly_discriminant, Poly, Rational};
use conjlat::cert::{
    run_paper_example, search_seeds, verify_certificate, verify_certificate_text, CertificateInput, SearchConfig,
    VerifyOutcome, PAPER_FIXTURE,
};
use conjlat::field::{automorphism_count, CmExtension, FieldElement, GaloisClosure, NumberField, DEFAULT_PRECISION_CAP};
use conjlat::groups::{enumerate_group, group_order, Family, FiniteGroupSpec, DEFAULT_ENUMERATION_BUDGET};
use conjlat::hermitian::{
    forms_equivalent, group_isomorphism_verdict, signature_pattern, twist_pattern, GroupVerdict, HermitianForm,
    PlacePermutation, Verdict,
};
use conjlat::local::hilbert_product_check;

const LIMIT_DISC: Duration = Duration::from_millis(10);
const LIMIT_EMBEDDINGS: Duration = Duration::from_secs(1);
const LIMIT_CLOSURE_DISC: Duration = Duration::from_secs(1);
const LIMIT_AUTOMORPHISMS: Duration = Duration::from_secs(5);
const LIMIT_SIGNATURES: Duration = Duration::from_secs(1);
const LIMIT_ORACLE: Duration = Duration::from_secs(60);
const LIMIT_PRODUCT_FORMULA: Duration = Duration::from_secs(120);
const LIMIT_SEARCH: Duration = Duration::from_secs(600);

const PRODUCT_FORMULA_SAMPLES: usize = 100;
const PRODUCT_FORMULA_SEED: u64 = 0x5eed_0001;
const MAX_UNKNOWN_RATE: f64 = 0.05;
const STATED_CLOSURE_DISC: i64 = 810_448;
const LAMBDA_HEIGHT: u32 = 2;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let r = f();
    let dt = t.elapsed();
    let suffix = format!("{dt:.2?} (limit {limit:?})");
    match r {
        Ok(d) if dt < limit => Ok(format!("{d}; {suffix}")),
        Ok(d) => Err(format!("{d}; too slow: {suffix}")),
        Err(d) => Err(format!("{d}; {suffix}")),
    }
}

fn fixture() -> CertificateInput {
    CertificateInput::from_json(PAPER_FIXTURE).expect("fixture parses")
}

fn coords(xs: &[String]) -> Vec<Rational> {
    xs.iter().map(|s| parse_rational(s).unwrap()).collect()
}

fn field() -> Arc<NumberField> {
    Arc::new(NumberField::new(Poly::from_i64s(&[1, -3, -1, 1])).unwrap())
}

fn ext() -> Arc<CmExtension> {
    let f = field();
    let d = f.element_i64(&[-1, 0, 0]).unwrap();
    Arc::new(CmExtension::new(f, d).unwrap())
}

fn form_from(ext: &Arc<CmExtension>, diag: &[Vec<String>]) -> HermitianForm {
    let f = ext.base();
    let entries: Vec<FieldElement> = diag.iter().map(|c| f.element(coords(c)).unwrap()).collect();
    HermitianForm::new(ext.clone(), entries).unwrap()
}

fn worked_forms(ext: &Arc<CmExtension>) -> (HermitianForm, HermitianForm) {
    let input = fixture();
    (form_from(ext, &input.forms[0]), form_from(ext, &input.forms[1]))
}

fn units(f: &NumberField) -> Vec<FieldElement> {
    [[0, 1, 0], [-2, 0, 1], [-1, 0, 0]]
        .iter()
        .map(|c| f.element_i64(c).unwrap())
        .collect()
}

fn crit1() -> Outcome {
    timed(LIMIT_DISC, || {
        let d = poly_discriminant(&Poly::from_i64s(&[1, -3, -1, 1])).map_err(|e| e.to_string())?;
        check(d == int(148), format!("disc = {d}"))
    })
}

fn crit2() -> Outcome {
    let input = fixture();
    let cl = input.closure.clone().ok_or("fixture has no closure block")?;
    let q = Poly::new(coords(&cl.poly));
    let rhos: Vec<Poly> = cl.embeddings.iter().map(|r| Poly::new(coords(r))).collect();
    timed(LIMIT_EMBEDDINGS, || {
        if q != Poly::from_i64s(&[-148, 0, 100, 0, -20, 0, 1]) {
            return Err(format!("unexpected closure polynomial {}", q.pretty("x")));
        }
        let f = field();
        let g = GaloisClosure::new(q, rhos).map_err(|e| e.to_string())?;
        let ok: Vec<bool> = (0..3).map(|j| g.verify_embedding(&f, j).unwrap_or(false)).collect();
        check(ok == [true, true, true], format!("verified {ok:?}"))
    })
}

fn crit3() -> Outcome {
    timed(LIMIT_CLOSURE_DISC, || {
        let q = Poly::from_i64s(&[-148, 0, 100, 0, -20, 0, 1]);
        let d = poly_discriminant(&q).map_err(|e| e.to_string())?;
        let ratio = &d / int(STATED_CLOSURE_DISC);
        check(
            d == int(3_319_595_008) && is_rational_square(&ratio),
            format!("disc(q) = {d}, ratio to {STATED_CLOSURE_DISC} = {ratio}"),
        )
    })
}

fn crit4() -> Outcome {
    timed(LIMIT_AUTOMORPHISMS, || {
        let n = automorphism_count(&field(), DEFAULT_PRECISION_CAP).exact();
        let sq = is_rational_square(&int(148));
        check(n == Some(1) && !sq, format!("automorphisms {n:?}, 148 square: {sq}"))
    })
}

fn crit5() -> Outcome {
    let e = ext();
    let (h1, h2) = worked_forms(&e);
    timed(LIMIT_SIGNATURES, || {
        let s1 = signature_pattern(&h1).map_err(|e| e.to_string())?;
        let s2 = signature_pattern(&h2).map_err(|e| e.to_string())?;
        let odd = |s: &conjlat::hermitian::SignaturePattern| -> Vec<usize> {
            (0..s.per_place.len())
                .filter(|&j| s.per_place[j].0.abs_diff(s.per_place[j].1) == 1)
                .collect()
        };
        let (i1, i2) = (odd(&s1), odd(&s2));
        let v = group_isomorphism_verdict(&h1, &h2, &units(e.base()), LAMBDA_HEIGHT).map_err(|e| e.to_string())?;
        let witness_ok = matches!(v, GroupVerdict::NotIsomorphic { witness } if witness < 3);
        check(
            i1.len() == 1 && i2.len() == 1 && i1 != i2 && witness_ok,
            format!("h1 {s1}, h2 {s2}, verdict {v:?}"),
        )
    })
}

fn crit6() -> Outcome {
    let e = ext();
    let (h1, h2) = worked_forms(&e);
    let s1 = signature_pattern(&h1).map_err(|e| e.to_string())?;
    let s2 = signature_pattern(&h2).map_err(|e| e.to_string())?;
    let tau = PlacePermutation::transposition(3, s1.indefinite_places()[0], s2.indefinite_places()[0])
        .map_err(|e| e.to_string())?;
    let t = twist_pattern(&s1, &tau).map_err(|e| e.to_string())?;
    check(t == s2, format!("tau {:?}: {t} vs {s2}", tau))
}

fn crit7() -> Outcome {
    timed(LIMIT_ORACLE, || {
        let cases = [
            (Family::SL, 2, 2, None),
            (Family::SL, 2, 3, None),
            (Family::SL, 3, 2, Some(168u64)),
            (Family::GL, 2, 2, Some(6)),
            (Family::SU, 3, 2, Some(216)),
        ];
        let mut bad = vec![];
        let mut seen = vec![];
        for (fam, n, q, stated) in cases {
            let spec = FiniteGroupSpec::new(fam, n, q).map_err(|e| e.to_string())?;
            let formula = group_order(&spec);
            let count = enumerate_group(&spec, DEFAULT_ENUMERATION_BUDGET).map_err(|e| e.to_string())?;
            if formula != count.into() || stated.is_some_and(|s| s != count) {
                bad.push(format!("{spec}: formula {formula}, enumerated {count}"));
            }
            seen.push(format!("{spec}={count}"));
        }
        check(bad.is_empty(), if bad.is_empty() { seen.join(" ") } else { bad.join("; ") })
    })
}

fn crit8() -> Outcome {
    let e = ext();
    let f = e.base();
    let mut rng = ChaCha8Rng::seed_from_u64(PRODUCT_FORMULA_SEED);
    timed(LIMIT_PRODUCT_FORMULA, || {
        let (mut unknown, mut violations) = (0usize, vec![]);
        let mut done = 0;
        while done < PRODUCT_FORMULA_SAMPLES {
            let c: Vec<Rational> = (0..3)
                .map(|_| Rational::new(rng.gen_range(-30i64..=30).into(), rng.gen_range(1i64..=4).into()))
                .collect();
            let u = f.element(c).unwrap();
            if u.is_zero() {
                continue;
            }
            done += 1;
            let r = hilbert_product_check(&e, &u).map_err(|e| e.to_string())?;
            match r.product_formula_holds() {
                None => unknown += 1,
                Some(true) => {}
                Some(false) => violations.push(format!("{:?}", u.coords())),
            }
        }
        let rate = unknown as f64 / PRODUCT_FORMULA_SAMPLES as f64;
        check(
            violations.is_empty() && rate <= MAX_UNKNOWN_RATE,
            format!(
                "{PRODUCT_FORMULA_SAMPLES} samples, {unknown} unknown ({:.0}%), odd -1 counts: {violations:?}",
                rate * 100.0
            ),
        )
    })
}

fn crit9() -> Outcome {
    let f = field();
    let r: Vec<bool> = units(&f).iter().map(|u| f.is_unit(u).unwrap_or(false)).collect();
    check(r == [true, true, true], format!("is_unit {r:?}"))
}

fn crit10() -> Outcome {
    let e = ext();
    let (h1, h2) = worked_forms(&e);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| e.to_string())?;
    timed(LIMIT_SEARCH, || {
        let out = pool.install(|| search_seeds(&SearchConfig::default())).map_err(|e| e.to_string())?;
        let target = vec!["1", "-3", "-1", "1"];
        if !out.fields_kept.iter().any(|p| p == "x^3 - x^2 - 3*x + 1" || p == "1,-3,-1,1") {
            return Err(format!("field not kept; kept {:?}", out.fields_kept));
        }
        let mut hits = 0;
        for c in &out.certificates {
            if c.input.min_poly != target || c.overall() != Verdict::Pass || c.input.forms.len() != 2 {
                continue;
            }
            let g1 = form_from(&e, &c.input.forms[0]);
            let g2 = form_from(&e, &c.input.forms[1]);
            let matches = |a: &HermitianForm, b: &HermitianForm| {
                let sp = |x: &HermitianForm, y: &HermitianForm| {
                    forms_equivalent(x, y).unwrap_or(false) || similar(x, y)
                };
                sp(a, &h1) && sp(b, &h2)
            };
            if matches(&g1, &g2) || matches(&g2, &g1) {
                hits += 1;
            }
        }
        check(
            hits > 0,
            format!(
                "{} polynomials, {} fields, {} certificates, {hits} matching the worked pair",
                out.polynomials_examined,
                out.fields_kept.len(),
                out.certificates.len()
            ),
        )
    })
}

/// `λ·x ≅ y` for λ a signed product of the units.
fn similar(x: &HermitianForm, y: &HermitianForm) -> bool {
    let f = x.ext().base();
    let us = units(f);
    let mut lambdas = vec![];
    for a in 0..4u32 {
        for b in 0..4u32 {
            let l = f.mul(&f.pow(&us[0], a), &f.pow(&us[1], b));
            lambdas.push(f.neg(&l));
            lambdas.push(l);
        }
    }
    lambdas
        .iter()
        .any(|l| x.scaled(l).ok().is_some_and(|s| forms_equivalent(&s, y).unwrap_or(false)))
}

fn crit11() -> Outcome {
    let a = run_paper_example().map_err(|e| e.to_string())?;
    let b = run_paper_example().map_err(|e| e.to_string())?;
    let (ta, tb) = (a.render(), b.render());
    if ta != tb {
        return Err("two emissions differ".into());
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("paper_example.json");
    std::fs::write(&path, &ta).map_err(|e| e.to_string())?;
    let v = verify_certificate(&path).map_err(|e| e.to_string())?;
    if v != VerifyOutcome::Ok(Verdict::Pass) {
        return Err(format!("verify gave {v:?}"));
    }
    let mut tampered = vec![];
    let mut t = a.clone();
    t.signature_table[0].pos += 1;
    tampered.push(t.render());
    tampered.push(ta.replacen("\"NOT_ISOMORPHIC\"", "\"ISOMORPHIC\"", 1));
    tampered.push(ta.replacen("\"3319595008\"", "\"3319595009\"", 1));
    let mut caught = 0;
    for t in &tampered {
        if t != &ta && matches!(verify_certificate_text(t), Ok(VerifyOutcome::Mismatch(_))) {
            caught += 1;
        }
    }
    check(
        caught == tampered.len(),
        format!("byte-identical, verify OK, {caught}/{} tampered copies flagged", tampered.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("exact field discriminant", crit1),
        ("embedding identities", crit2),
        ("closure discriminant relation", crit3),
        ("trivial automorphism group", crit4),
        ("signature separation", crit5),
        ("twist match", crit6),
        ("finite group oracle", crit7),
        ("product formula", crit8),
        ("unit verification", crit9),
        ("search regression", crit10),
        ("determinism and round trip", crit11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(d) => println!("criterion {:>2} PASS {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
