use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use conjlat::arith::{parse_rational, Poly, Rational};
use conjlat::cert::{
    build_certificate, search_seeds, verify_certificate, CertificateInput, PipelineConfig, SearchConfig,
    VerifyError, VerifyOutcome, DEFAULT_LAMBDA_HEIGHT, PAPER_FIXTURE,
};
use conjlat::field::{CmExtension, FieldElement, NumberField, DEFAULT_PRECISION_CAP};
use conjlat::groups::{enumerate_group, group_order, Family, FiniteGroupSpec, DEFAULT_ENUMERATION_BUDGET};
use conjlat::hermitian::{global_invariant, HermitianForm, Verdict};
use conjlat::local::{factor_prime, hilbert_product_check, local_norm_test, Place};
use conjlat::Error;

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 3;

/// Exact certificates for Galois-conjugate hermitian-form seeds.
///
/// Polynomials and field elements are comma-separated coefficient lists,
/// constant term first: `1,-3,-1,1` is x^3 - x^2 - 3x + 1 and `-2,0,1` is
/// a^2 - 2. Rationals may be written `p/q`.
#[derive(Parser)]
#[command(name = "conjlat", version)]
struct Cli {
    /// Candidate budget for enumeration (matrices, or polynomials in search).
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u128,
    /// Largest working precision, in bits, for automorphism reconstruction.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION_CAP)]
    precision_cap: u32,
    /// Output file (a directory for `search`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full pipeline on the shipped cubic example.
    PaperExample {
        /// Read the input blocks from this file instead.
        #[arg(long)]
        fixture: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_LAMBDA_HEIGHT)]
        lambda_height: u32,
    },
    /// Search monic polynomials for seed pairs and tuples.
    Search {
        #[arg(long, default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value_t = 3)]
        bound: i64,
        /// Negative integer δ; repeatable.
        #[arg(long = "delta", allow_hyphen_values = true, default_values_t = vec![-1i64])]
        deltas: Vec<i64>,
        #[arg(long, default_value_t = 3)]
        rank: usize,
        #[arg(long, default_value_t = DEFAULT_LAMBDA_HEIGHT)]
        lambda_height: u32,
        #[arg(long, default_value_t = 2)]
        entry_bound: i64,
        /// Only emit pair certificates.
        #[arg(long)]
        no_tuples: bool,
    },
    /// Recompute a certificate and compare it with the file.
    Verify { path: PathBuf },
    /// Signatures and discriminant of a diagonal form.
    ClassifyForm {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
        /// Diagonal entries separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        diag: String,
    },
    /// Local norm symbols of u for E = F(√δ), at the places above one prime
    /// or at every place where they can be nontrivial.
    LocalNorm {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long)]
        prime: Option<u64>,
    },
    /// Order of SL, GL, SU or GU over F_q, optionally by enumeration.
    FiniteOrder {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        enumerate: bool,
    },
}

fn coords(s: &str) -> conjlat::Result<Vec<Rational>> {
    s.split(',').map(parse_rational).collect()
}

fn field_of(poly: &str) -> conjlat::Result<Arc<NumberField>> {
    Ok(Arc::new(NumberField::new(Poly::new(coords(poly)?))?))
}

fn element(f: &NumberField, s: &str) -> conjlat::Result<FieldElement> {
    let mut c = coords(s)?;
    if c.len() > f.degree() {
        return Err(Error::InvalidInput(format!("{s:?} has too many coordinates")));
    }
    c.resize(f.degree(), Rational::from_integer(0.into()));
    f.element(c)
}

fn ext_of(poly: &str, delta: &str) -> conjlat::Result<Arc<CmExtension>> {
    let f = field_of(poly)?;
    let d = element(&f, delta)?;
    Ok(Arc::new(CmExtension::new(f, d)?))
}

fn show(e: &FieldElement) -> String {
    e.to_poly().pretty("a")
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => EXIT_OK,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Inconclusive(_) | Error::BudgetExceeded { .. } => EXIT_UNKNOWN,
        _ => EXIT_USAGE,
    }
}

fn run(cli: Cli) -> Result<u8, (u8, String)> {
    let fail = |e: Error| (error_code(&e), e.to_string());
    let io = |m: String| (EXIT_USAGE, m);
    match cli.cmd {
        Cmd::PaperExample { fixture, lambda_height } => {
            let text = match fixture {
                Some(p) => std::fs::read_to_string(&p).map_err(|e| io(format!("{}: {e}", p.display())))?,
                None => PAPER_FIXTURE.to_string(),
            };
            let input = CertificateInput::from_json(&text).map_err(fail)?;
            let config = PipelineConfig {
                precision_cap: cli.precision_cap,
                lambda_height_bound: lambda_height,
            };
            let cert = build_certificate(&input, &config).map_err(fail)?;
            emit(&cli.out, &cert.render()).map_err(io)?;
            for d in &cert.discrepancies {
                eprintln!("discrepancy: {d}");
            }
            eprintln!("verdict: {}", cert.overall().as_str());
            Ok(verdict_code(cert.overall()))
        }
        Cmd::Search {
            degree,
            bound,
            deltas,
            rank,
            lambda_height,
            entry_bound,
            no_tuples,
        } => {
            let cfg = SearchConfig {
                degree,
                coefficient_bound: bound,
                delta_candidates: deltas,
                rank,
                lambda_height_bound: lambda_height,
                precision_cap: cli.precision_cap,
                enumeration_budget: cli.budget,
                entry_bound,
                tuples: !no_tuples,
                output_dir: cli.out.clone(),
            };
            let out = search_seeds(&cfg).map_err(fail)?;
            println!(
                "examined {} polynomials, kept {} fields, {} passing certificates, {} new files",
                out.polynomials_examined,
                out.fields_kept.len(),
                out.certificates.len(),
                out.written.len()
            );
            for c in &out.certificates {
                let forms: Vec<String> = c.forms.iter().map(|f| format!("diag({})", f.diag.join(", "))).collect();
                println!("{}\tdisc {}\t{}", c.field.min_poly, c.field.poly_disc, forms.join(" / "));
            }
            for s in &out.skipped {
                eprintln!("skipped: {s}");
            }
            if out.budget_exhausted {
                eprintln!("budget exhausted: only the first {} polynomials were examined", out.polynomials_examined);
            }
            Ok(if out.budget_exhausted || !out.skipped.is_empty() {
                EXIT_UNKNOWN
            } else {
                EXIT_OK
            })
        }
        Cmd::Verify { path } => match verify_certificate(&path) {
            Ok(VerifyOutcome::Ok(v)) => {
                println!("OK (recorded verdict {})", v.as_str());
                Ok(EXIT_OK)
            }
            Ok(VerifyOutcome::Mismatch(paths)) => {
                println!("MISMATCH");
                for p in paths {
                    println!("  {p}");
                }
                Ok(EXIT_FAIL)
            }
            Err(e @ VerifyError::Parse(_)) => Err((EXIT_USAGE, e.to_string())),
            Err(e) => {
                println!("MISMATCH: {e}");
                Ok(EXIT_FAIL)
            }
        },
        Cmd::ClassifyForm { poly, delta, diag } => {
            let ext = ext_of(&poly, &delta).map_err(fail)?;
            let f = ext.base();
            let entries = diag
                .split(';')
                .map(|s| element(f, s))
                .collect::<conjlat::Result<Vec<_>>>()
                .map_err(fail)?;
            let h = HermitianForm::new(ext.clone(), entries).map_err(fail)?;
            let g = global_invariant(&h).map_err(fail)?;
            let mut text = format!("rank {}\ndisc {}\n", g.rank, show(&g.disc));
            for (j, (p, q)) in g.signatures.per_place.iter().enumerate() {
                let kind = if *p > 0 && *q > 0 { "indefinite" } else { "definite" };
                text.push_str(&format!("real {j}: ({p},{q}) {kind}\n"));
            }
            emit(&cli.out, &text).map_err(io)?;
            Ok(EXIT_OK)
        }
        Cmd::LocalNorm { poly, delta, u, prime } => {
            let ext = ext_of(&poly, &delta).map_err(fail)?;
            let u = element(ext.base(), &u).map_err(fail)?;
            let mut text = String::new();
            let mut unknown = false;
            match prime {
                Some(ell) => {
                    for v in factor_prime(ext.base(), ell).map_err(fail)? {
                        let place = Place::Finite(v);
                        match local_norm_test(&ext, &u, &place) {
                            Ok(r) => text.push_str(&format!(
                                "{place}: {} ({})\n",
                                if r.is_local_norm { "norm" } else { "not a norm" },
                                r.method.as_str()
                            )),
                            Err(e) => {
                                unknown = true;
                                text.push_str(&format!("{place}: unknown ({e})\n"));
                            }
                        }
                    }
                }
                None => {
                    let r = hilbert_product_check(&ext, &u).map_err(fail)?;
                    for e in &r.entries {
                        match &e.result {
                            Ok(t) => text.push_str(&format!(
                                "{}: {} ({})\n",
                                e.place,
                                if t.is_local_norm { "+1" } else { "-1" },
                                t.method.as_str()
                            )),
                            Err(m) => text.push_str(&format!("{}: unknown ({m})\n", e.place)),
                        }
                    }
                    text.push_str(&match r.product_formula_holds() {
                        Some(true) => format!("product formula holds ({} symbols equal -1)\n", r.minus_ones()),
                        Some(false) => format!("product formula FAILS ({} symbols equal -1)\n", r.minus_ones()),
                        None => "product formula inconclusive\n".to_string(),
                    });
                    unknown = !r.is_conclusive();
                }
            }
            emit(&cli.out, &text).map_err(io)?;
            Ok(if unknown { EXIT_UNKNOWN } else { EXIT_OK })
        }
        Cmd::FiniteOrder { family, n, q, enumerate } => {
            let spec = FiniteGroupSpec::new(family, n, q).map_err(fail)?;
            let order = group_order(&spec);
            let mut text = format!("|{spec}| = {order}\n");
            let mut code = EXIT_OK;
            if enumerate {
                let count = enumerate_group(&spec, cli.budget).map_err(fail)?;
                let same = order == count.into();
                text.push_str(&format!(
                    "enumerated: {count} ({})\n",
                    if same { "agrees" } else { "DISAGREES" }
                ));
                if !same {
                    code = EXIT_FAIL;
                }
            }
            emit(&cli.out, &text).map_err(io)?;
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
