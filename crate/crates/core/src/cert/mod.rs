//! Seed certificates: a single JSON record holding the input data, every
//! recomputable check, and the resulting verdict.
//!
//! All numbers are exact. Rationals and large integers are decimal strings;
//! the key order is the struct field order, so equal inputs give
//! byte-identical files.

mod pipeline;
mod search;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Error;
use crate::field::DEFAULT_PRECISION_CAP;
use crate::fingerprint::{FingerprintComparison, VolumeFingerprint};
use crate::hermitian::Verdict;

pub use pipeline::{build_certificate, run_paper_example, run_paper_example_with};
pub use search::{search_seeds, SearchConfig, SearchOutcome};

pub const FORMAT_VERSION: &str = "seed-certificate/1";
pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));
pub const DEFAULT_LAMBDA_HEIGHT: u32 = 2;

/// The worked cubic example, as shipped input data.
pub const PAPER_FIXTURE: &str = include_str!("../../fixtures/paper_example.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosureInput {
    /// Coefficients of `q`, constant term first.
    pub poly: Vec<String>,
    /// Images of α as polynomials in β, constant term first.
    pub embeddings: Vec<Vec<String>>,
}

/// Statements about the input made elsewhere, checked against the
/// computation and reported, never trusted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Claims {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_disc: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automorphism_count: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub galois_group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure_disc: Option<String>,
    /// Label of the indefinite place of each form, in form order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub indefinite_place_labels: Vec<String>,
    /// Every place label, so that leftovers can be matched.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub place_labels: Vec<String>,
    /// Stated sign (`+` or `-`) of the generator at each labelled place.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub generator_signs: BTreeMap<String, String>,
    /// The twist as a transposition of two labels.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub twist_labels: Vec<String>,
}

/// Input blocks. The fixture format is exactly this record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateInput {
    /// Minimal polynomial of α, constant term first.
    pub min_poly: Vec<String>,
    /// Coordinates of δ in the power basis.
    pub delta: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure: Option<ClosureInput>,
    /// Diagonal entries of each form, as power-basis coordinates.
    pub forms: Vec<Vec<Vec<String>>>,
    /// `twists[i]` maps the signature pattern of form 0 to that of form `i+1`.
    pub twists: Vec<Vec<usize>>,
    #[serde(default)]
    pub units: Vec<Vec<String>>,
    #[serde(default)]
    pub level_primes: Vec<u64>,
    #[serde(default)]
    pub norm_samples: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claims: Option<Claims>,
}

impl CertificateInput {
    pub fn from_json(text: &str) -> crate::Result<CertificateInput> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    pub precision_cap: u32,
    pub lambda_height_bound: u32,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            precision_cap: DEFAULT_PRECISION_CAP,
            lambda_height_bound: DEFAULT_LAMBDA_HEIGHT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub precision_cap: String,
    pub lambda_height_bound: String,
}

impl ConfigEcho {
    fn of(c: &PipelineConfig) -> ConfigEcho {
        ConfigEcho {
            precision_cap: c.precision_cap.to_string(),
            lambda_height_bound: c.lambda_height_bound.to_string(),
        }
    }

    fn parse(&self) -> crate::Result<PipelineConfig> {
        let num = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad config value {s:?}")))
        };
        Ok(PipelineConfig {
            precision_cap: num(&self.precision_cap)?,
            lambda_height_bound: num(&self.lambda_height_bound)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealPlaceBlock {
    pub index: usize,
    pub root_lo: String,
    pub root_hi: String,
    pub generator_sign: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldBlock {
    pub min_poly: String,
    pub degree: usize,
    pub poly_disc: String,
    pub disc_is_square: bool,
    pub totally_real: bool,
    pub place_order: Vec<RealPlaceBlock>,
    pub automorphism_count: String,
    pub automorphism_count_exact: bool,
    pub automorphism_images: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmBlock {
    pub delta: String,
    pub delta_signs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureBlock {
    pub poly: String,
    pub poly_disc: String,
    pub embeddings: Vec<String>,
    pub verified: Vec<bool>,
    pub distinct: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitBlock {
    pub element: String,
    pub norm: String,
    pub is_unit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormBlock {
    pub name: String,
    pub diag: Vec<String>,
    pub disc: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureRow {
    pub form: String,
    pub place: usize,
    pub pos: usize,
    pub neg: usize,
    pub indefinite: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistBlock {
    pub from: String,
    pub to: String,
    pub permutation: Vec<usize>,
    pub pattern_match: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentBlock {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairBlock {
    pub forms: Vec<String>,
    pub permutation: Vec<usize>,
    pub group_verdict: String,
    pub group_detail: String,
    pub discriminant_classes_equal: String,
    pub components: Vec<ComponentBlock>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalPlaceBlock {
    pub place: String,
    pub splitting: String,
    pub group: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolEntry {
    pub place: String,
    pub symbol: String,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormSampleBlock {
    pub element: String,
    pub symbols: Vec<SymbolEntry>,
    pub minus_ones: usize,
    pub unknowns: usize,
    pub product_formula: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalBlock {
    pub odd_rank_rule: String,
    pub places: Vec<LocalPlaceBlock>,
    pub norm_samples: Vec<NormSampleBlock>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub form: String,
    pub place: String,
    pub group: String,
    pub index: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintBlock {
    pub level_id: String,
    pub fingerprints: Vec<VolumeFingerprint>,
    pub comparisons: Vec<FingerprintComparison>,
    pub all_equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimCheck {
    pub item: String,
    pub stated: String,
    pub computed: String,
    /// `agrees`, `consistent` or `discrepancy`.
    pub status: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictBlock {
    pub components: Vec<ComponentBlock>,
    pub overall: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedCertificate {
    pub format_version: String,
    pub tool_version: String,
    pub config: ConfigEcho,
    pub input: CertificateInput,
    pub field: FieldBlock,
    pub cm: CmBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure: Option<ClosureBlock>,
    pub units: Vec<UnitBlock>,
    pub forms: Vec<FormBlock>,
    pub signature_table: Vec<SignatureRow>,
    pub twists: Vec<TwistBlock>,
    pub pairs: Vec<PairBlock>,
    pub local: LocalBlock,
    pub index: Vec<IndexEntry>,
    pub fingerprints: FingerprintBlock,
    pub assumptions: Vec<String>,
    pub place_labels: BTreeMap<String, String>,
    pub claims: Vec<ClaimCheck>,
    pub discrepancies: Vec<String>,
    pub verdict: VerdictBlock,
}

impl SeedCertificate {
    /// Canonical text: pretty JSON with a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn overall(&self) -> Verdict {
        self.verdict.overall
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyOutcome {
    Ok(Verdict),
    /// JSON paths whose recorded value differs from the recomputation.
    Mismatch(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("version mismatch in {field}: found {found:?}, expected {expected:?}")]
    VersionMismatch {
        field: &'static str,
        found: String,
        expected: String,
    },
    #[error("recomputation failed: {0}")]
    Recompute(Error),
}

pub fn verify_certificate(path: &Path) -> Result<VerifyOutcome, VerifyError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| VerifyError::Parse(format!("{}: {e}", path.display())))?;
    verify_certificate_text(&text)
}

/// Recompute every block from `input` and `config`, then compare.
pub fn verify_certificate_text(text: &str) -> Result<VerifyOutcome, VerifyError> {
    let recorded: Value =
        serde_json::from_str(text).map_err(|e| VerifyError::Parse(e.to_string()))?;
    for (field, expected) in [("format_version", FORMAT_VERSION), ("tool_version", TOOL_VERSION)] {
        let found = recorded.get(field).and_then(Value::as_str).unwrap_or_default();
        if found != expected {
            return Err(VerifyError::VersionMismatch {
                field,
                found: found.to_string(),
                expected: expected.to_string(),
            });
        }
    }
    let input: CertificateInput = recorded
        .get("input")
        .cloned()
        .map(serde_json::from_value)
        .transpose()
        .map_err(|e| VerifyError::Parse(format!("input block: {e}")))?
        .ok_or_else(|| VerifyError::Parse("missing input block".into()))?;
    let config: ConfigEcho = recorded
        .get("config")
        .cloned()
        .map(serde_json::from_value)
        .transpose()
        .map_err(|e| VerifyError::Parse(format!("config block: {e}")))?
        .ok_or_else(|| VerifyError::Parse("missing config block".into()))?;
    let config = config.parse().map_err(|e| VerifyError::Parse(e.to_string()))?;
    let fresh = build_certificate(&input, &config).map_err(VerifyError::Recompute)?;
    let fresh_value = serde_json::to_value(&fresh).expect("certificate serializes");
    let mut diffs = Vec::new();
    json_diff("", &recorded, &fresh_value, &mut diffs);
    if diffs.is_empty() && fresh.render() != text {
        diffs.push("<serialization>".to_string());
    }
    Ok(if diffs.is_empty() {
        VerifyOutcome::Ok(fresh.overall())
    } else {
        VerifyOutcome::Mismatch(diffs)
    })
}

fn json_diff(path: &str, a: &Value, b: &Value, out: &mut Vec<String>) {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let mut keys: Vec<&String> = x.keys().chain(y.keys()).collect();
            keys.sort();
            keys.dedup();
            for k in keys {
                let p = if path.is_empty() {
                    k.clone()
                } else {
                    format!("{path}.{k}")
                };
                match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => json_diff(&p, u, v, out),
                    _ => out.push(p),
                }
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            for (i, (u, v)) in x.iter().zip(y).enumerate() {
                json_diff(&format!("{path}[{i}]"), u, v, out);
            }
        }
        _ => {
            if a != b {
                out.push(path.to_string());
            }
        }
    }
}
