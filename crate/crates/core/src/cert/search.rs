use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use num_traits::Zero;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::arith::{int, is_prime, Poly, Sign};
use crate::error::{invalid, Error, Result};
use crate::field::{automorphism_count, FieldElement, NumberField, DEFAULT_PRECISION_CAP};
use crate::groups::DEFAULT_ENUMERATION_BUDGET;
use crate::hermitian::PlacePermutation;

use super::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub degree: usize,
    pub coefficient_bound: i64,
    /// Negative rationals δ (as integers) giving `E = F(√δ)`.
    pub delta_candidates: Vec<i64>,
    pub rank: usize,
    pub lambda_height_bound: u32,
    pub precision_cap: u32,
    /// Largest number of candidate polynomials examined.
    pub enumeration_budget: u128,
    /// Coordinate bound for diagonal-entry candidates.
    pub entry_bound: i64,
    /// Also emit one certificate for the whole tuple of forms.
    pub tuples: bool,
    pub output_dir: Option<PathBuf>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            degree: 3,
            coefficient_bound: 3,
            delta_candidates: vec![-1],
            rank: 3,
            lambda_height_bound: DEFAULT_LAMBDA_HEIGHT,
            precision_cap: DEFAULT_PRECISION_CAP,
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
            entry_bound: 2,
            tuples: true,
            output_dir: None,
        }
    }
}

impl SearchConfig {
    fn validate(&self) -> Result<()> {
        if self.degree < 2 {
            return invalid("degree must be at least 2");
        }
        if self.rank < 3 || self.rank % 2 == 0 {
            return invalid("rank must be odd and at least 3");
        }
        if self.coefficient_bound < 1 || self.entry_bound < 1 {
            return invalid("bounds must be positive");
        }
        if self.delta_candidates.iter().any(|&d| d >= 0) {
            return invalid("delta candidates must be negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct SearchOutcome {
    pub certificates: Vec<SeedCertificate>,
    pub polynomials_examined: u64,
    /// Polynomials kept: irreducible, totally real, no nontrivial automorphism.
    pub fields_kept: Vec<String>,
    /// Polynomials dropped for a reason other than failing a filter.
    pub skipped: Vec<String>,
    pub budget_exhausted: bool,
    pub written: Vec<PathBuf>,
}

/// Monic integer polynomials of the given degree, constant term first,
/// with nonzero constant term.
fn candidate_polys(degree: usize, bound: i64) -> impl Iterator<Item = Vec<i64>> {
    let width = (2 * bound + 1) as u64;
    let total = width.pow(degree as u32);
    (0..total).filter_map(move |mut k| {
        let mut c = Vec::with_capacity(degree + 1);
        for _ in 0..degree {
            c.push((k % width) as i64 - bound);
            k /= width;
        }
        c.push(1);
        (c[0] != 0).then_some(c)
    })
}

/// Nonzero elements with coordinates in `[-b, b]`, smallest first.
fn small_elements(field: &NumberField, b: i64) -> Vec<FieldElement> {
    let d = field.degree();
    let width = (2 * b + 1) as u64;
    let mut coords: Vec<Vec<i64>> = (0..width.pow(d as u32))
        .map(|mut k| {
            (0..d)
                .map(|_| {
                    let c = (k % width) as i64 - b;
                    k /= width;
                    c
                })
                .collect()
        })
        .filter(|c: &Vec<i64>| c.iter().any(|&x| x != 0))
        .collect();
    coords.sort_by_key(|c| {
        (
            c.iter().map(|x| x.abs()).max(),
            c.iter().map(|x| x.abs()).sum::<i64>(),
            c.iter().map(|x| (x.abs(), *x < 0)).collect::<Vec<_>>(),
        )
    });
    coords
        .iter()
        .map(|c| field.element_i64(c).expect("degree matches"))
        .collect()
}

fn coords_strings(e: &FieldElement) -> Vec<String> {
    e.coords().iter().map(|c| c.to_string()).collect()
}

/// For each real place `j`, the first candidate whose sign is `lead` at `j`
/// and the opposite elsewhere.
fn single_sign_entries(field: &NumberField, cands: &[FieldElement], lead: Sign) -> Result<Vec<Option<FieldElement>>> {
    let n = field.num_real_places();
    let mut out = vec![None; n];
    for c in cands {
        let s = field.signs(c)?;
        let leads: Vec<usize> = (0..n).filter(|&j| s[j] == lead).collect();
        if leads.len() == 1 && out[leads[0]].is_none() {
            out[leads[0]] = Some(c.clone());
        }
        if out.iter().all(Option::is_some) {
            break;
        }
    }
    Ok(out)
}

fn seed_inputs(field: &NumberField, delta: i64, cfg: &SearchConfig) -> Result<Vec<CertificateInput>> {
    let n = field.num_real_places();
    let d = field.degree();
    let cands = small_elements(field, cfg.entry_bound);
    // shape (r-1, 1) at one place, negative definite elsewhere; else the mirror
    let mut entries = single_sign_entries(field, &cands, Sign::Positive)?;
    let mut last = int(-1);
    if entries.iter().filter(|e| e.is_some()).count() < 2 {
        entries = single_sign_entries(field, &cands, Sign::Negative)?;
        last = int(1);
    }
    let last = field.from_rational(last);
    let form = |x: &FieldElement| -> Vec<Vec<String>> {
        let mut f = vec![coords_strings(x); cfg.rank - 1];
        f.push(coords_strings(&last));
        f
    };
    let mut delta_c = vec!["0".to_string(); d];
    delta_c[0] = delta.to_string();
    let mut units = vec![coords_strings(&field.from_rational(int(-1)))];
    if field.is_unit(&field.alpha())? {
        units.push(coords_strings(&field.alpha()));
    }
    let disc = field.disc().numer().clone();
    let level = (3u64..)
        .filter(|&p| is_prime(p) && !(&disc % p).is_zero() && delta % p as i64 != 0)
        .take(1)
        .collect::<Vec<_>>();
    let base = |forms: Vec<Vec<Vec<String>>>, twists: Vec<Vec<usize>>| CertificateInput {
        min_poly: field.min_poly().coeffs().iter().map(|c| c.to_string()).collect(),
        delta: delta_c.clone(),
        closure: None,
        forms,
        twists,
        units: units.clone(),
        level_primes: level.clone(),
        norm_samples: vec![],
        claims: None,
    };
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if let (Some(a), Some(b)) = (&entries[i], &entries[j]) {
                let tau = PlacePermutation::transposition(n, i, j)?;
                out.push(base(vec![form(a), form(b)], vec![tau.mapping().to_vec()]));
            }
        }
    }
    if cfg.tuples && n > 2 && entries.iter().all(Option::is_some) {
        let forms = entries.iter().flatten().map(form).collect();
        let twists = (1..n)
            .map(|k| Ok(PlacePermutation::transposition(n, 0, k)?.mapping().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        out.push(base(forms, twists));
    }
    Ok(out)
}

enum PolyResult {
    Filtered,
    Kept(String, Vec<SeedCertificate>),
    Skipped(String),
}

fn examine(coeffs: &[i64], cfg: &SearchConfig) -> PolyResult {
    let p = Poly::from_i64s(coeffs);
    let name = p.pretty("x");
    let run = || -> Result<PolyResult> {
        let field = match NumberField::new(p.clone()) {
            Ok(f) => f,
            Err(Error::InvalidInput(_)) => return Ok(PolyResult::Filtered),
            Err(e) => return Err(e),
        };
        if !field.is_totally_real() {
            return Ok(PolyResult::Filtered);
        }
        match automorphism_count(&field, cfg.precision_cap).exact() {
            Some(1) => {}
            Some(_) => return Ok(PolyResult::Filtered),
            None => return Ok(PolyResult::Skipped(format!("{name}: automorphism count undetermined"))),
        }
        let pc = PipelineConfig {
            precision_cap: cfg.precision_cap,
            lambda_height_bound: cfg.lambda_height_bound,
        };
        let mut certs = Vec::new();
        for &delta in &cfg.delta_candidates {
            for input in seed_inputs(&field, delta, cfg)? {
                let cert = build_certificate(&input, &pc)?;
                if cert.overall() == Verdict::Pass {
                    certs.push(cert);
                }
            }
        }
        Ok(PolyResult::Kept(name.clone(), certs))
    };
    run().unwrap_or_else(|e| PolyResult::Skipped(format!("{name}: {e}")))
}

/// Enumerate candidate fields and emit a certificate for every passing seed.
pub fn search_seeds(cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    let mut polys: Vec<Vec<i64>> = candidate_polys(cfg.degree, cfg.coefficient_bound).collect();
    let mut out = SearchOutcome::default();
    if polys.len() as u128 > cfg.enumeration_budget {
        polys.truncate(cfg.enumeration_budget as usize);
        out.budget_exhausted = true;
    }
    out.polynomials_examined = polys.len() as u64;
    let results: Vec<PolyResult> = polys.par_iter().map(|c| examine(c, cfg)).collect();
    for r in results {
        match r {
            PolyResult::Filtered => {}
            PolyResult::Kept(name, certs) => {
                out.fields_kept.push(name);
                out.certificates.extend(certs);
            }
            PolyResult::Skipped(why) => out.skipped.push(why),
        }
    }
    if let Some(dir) = &cfg.output_dir {
        out.written = persist(dir, &out.certificates)?;
    }
    Ok(out)
}

/// Append-only store: one file per certificate, named by content hash,
/// plus an index line per new file.
fn persist(dir: &Path, certs: &[SeedCertificate]) -> Result<Vec<PathBuf>> {
    let io = |e: std::io::Error| Error::InvalidInput(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let mut index = OpenOptions::new()
        .create(true)
        .append(true)
        .open(dir.join("index.tsv"))
        .map_err(io)?;
    let mut written = Vec::new();
    for c in certs {
        let text = c.render();
        let hash = hex::encode(Sha256::digest(text.as_bytes()));
        let name = format!("cert-{}.json", &hash[..16]);
        let path = dir.join(&name);
        if path.exists() {
            continue;
        }
        fs::write(&path, &text).map_err(io)?;
        writeln!(
            index,
            "{}\t{}\t{}\t{}",
            c.field.min_poly,
            c.field.poly_disc,
            c.overall().as_str(),
            name
        )
        .map_err(io)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_enumeration() {
        let all: Vec<_> = candidate_polys(2, 1).collect();
        assert_eq!(all.len(), 6);
        assert!(all.iter().all(|c| c[0] != 0 && c[2] == 1));
    }

    #[test]
    fn quadratics_give_nothing() {
        let cfg = SearchConfig {
            degree: 2,
            coefficient_bound: 3,
            ..SearchConfig::default()
        };
        let out = search_seeds(&cfg).unwrap();
        assert!(out.certificates.is_empty());
        assert!(out.fields_kept.is_empty());
        assert!(out.skipped.is_empty());
    }

    #[test]
    fn budget_is_reported() {
        let cfg = SearchConfig {
            degree: 2,
            coefficient_bound: 2,
            enumeration_budget: 3,
            ..SearchConfig::default()
        };
        let out = search_seeds(&cfg).unwrap();
        assert!(out.budget_exhausted);
        assert_eq!(out.polynomials_examined, 3);
    }

    #[test]
    fn config_validation() {
        for cfg in [
            SearchConfig { degree: 1, ..SearchConfig::default() },
            SearchConfig { rank: 4, ..SearchConfig::default() },
            SearchConfig { delta_candidates: vec![2], ..SearchConfig::default() },
        ] {
            assert!(search_seeds(&cfg).is_err());
        }
    }
}
