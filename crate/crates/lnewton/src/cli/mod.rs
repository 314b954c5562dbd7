//! Command-line surface: job configuration, method dispatch with oracle
//! fallback and agreement checks, and the pinned reproduction suites.

pub mod document;
pub mod parse;
pub mod reproduce;

pub use document::{PolygonDocument, SCHEMA_VERSION};
pub use parse::parse_poly;

use std::time::Instant;

use num::{BigInt, One};

use crate::cyclotomic::Rat;
use crate::error::{Error, Result};
use crate::ffield::FieldCtx;
use crate::newton::NewtonPolygon;
use crate::oracle;
use crate::poly::LaurentPoly;
use crate::slopes;
use crate::tables;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Oracle,
    Slopes,
    Tables,
    Auto,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Slopes => "slopes",
            Method::Tables => "tables",
            Method::Auto => "auto",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub budget: u64,
    /// pi-adic precision override (default 4(p-1))
    pub precision: Option<u64>,
    /// weight cap override for the table search
    pub weight_cap: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            budget: oracle::DEFAULT_BUDGET,
            precision: None,
            weight_cap: None,
        }
    }
}

impl RunConfig {
    /// Environment defaults with the LNEWTON_ prefix; flags override these
    /// in the binary.
    pub fn from_env() -> Self {
        let mut cfg = RunConfig::default();
        if let Ok(v) = std::env::var("LNEWTON_BUDGET") {
            if let Ok(x) = v.parse() {
                cfg.budget = x;
            }
        }
        if let Ok(v) = std::env::var("LNEWTON_PRECISION") {
            if let Ok(x) = v.parse() {
                cfg.precision = Some(x);
            }
        }
        cfg
    }

    pub fn precision_for(&self, p: u64) -> u64 {
        self.precision.unwrap_or(4 * (p - 1))
    }
}

fn doc_skeleton(command: &str, f: &LaurentPoly, method: Method) -> PolygonDocument {
    PolygonDocument {
        schema_version: SCHEMA_VERSION,
        command: command.into(),
        f: f.canonical_text(),
        p: f.p(),
        a: f.field.k,
        method: method.name().into(),
        status: "inconclusive".into(),
        runtime_ms: 0,
        polygon: None,
        coefficient_ords: Vec::new(),
        certificates: Vec::new(),
        notes: Vec::new(),
    }
}

fn ords_to_doc(vals: &[Option<Rat>]) -> Vec<Option<document::RatDoc>> {
    vals.iter()
        .map(|o| o.as_ref().map(document::RatDoc::from))
        .collect()
}

/// Oracle path: exact polygon of L (one-variable polynomial mode) or of the
/// sign-adjusted L^*.
fn run_oracle_method(f: &LaurentPoly, cfg: &RunConfig) -> Result<PolygonDocument> {
    let mut doc = doc_skeleton("oracle", f, Method::Oracle);
    let run = oracle::run_oracle(f, None, cfg.budget)?;
    let np = run.np_l.clone().unwrap_or_else(|| run.np_adjusted.clone());
    doc.polygon = Some((&np).into());
    let mut adjusted = run.adjusted.clone();
    adjusted.coeffs.truncate(run.degree_bound as usize + 1);
    doc.coefficient_ords = ords_to_doc(&oracle::series_valuations(&adjusted, f.field.k)?);
    match &run.vanishing {
        Some(Ok(())) => doc
            .notes
            .push("degree-bound vanishing check passed".into()),
        Some(Err(e)) => {
            doc.status = "inconclusive".into();
            doc.notes.push(format!("degree anomaly: {e}"));
            return Ok(doc);
        }
        None => doc.notes.push(
            "vanishing check skipped (budget allows only the degree-bound truncation)".into(),
        ),
    }
    // bounded degeneracy evidence (not proof): witness search metadata
    if f.n <= 2 {
        match degeneracy_note(f, cfg) {
            Ok(note) => doc.notes.push(note),
            Err(e) => doc.notes.push(format!("witness search skipped: {e}")),
        }
    }
    doc.status = "proved".into();
    Ok(doc)
}

fn degeneracy_note(f: &LaurentPoly, cfg: &RunConfig) -> Result<String> {
    let e_max = 2;
    match crate::ffield::degeneracy_witness_search(f, e_max, cfg.budget.min(1_000_000))? {
        Some(w) => Ok(format!(
            "degeneracy witness found over extension degree {}: {:?}",
            w.extension, w.point
        )),
        None => Ok(format!(
            "no degeneracy witness up to extension degree {e_max} (evidence, not proof)"
        )),
    }
}

fn run_slopes_method(f: &LaurentPoly, _cfg: &RunConfig) -> Result<PolygonDocument> {
    let mut doc = doc_skeleton("slopes", f, Method::Slopes);
    let out = slopes::full_np_small_d(f)?;
    for rep in &out.reports {
        doc.certificates.push(document::CertificateDoc {
            kind: "lambda_s".into(),
            detail: serde_json::json!({
                "s": rep.s,
                "status": format!("{:?}", rep.status),
                "r_first": rep.r_first,
                "lambda": rep.lambda.as_ref().map(document::RatDoc::from),
                "f_value": rep.f_value,
            }),
        });
    }
    doc.notes.push(format!(
        "normalized with scale {} and shift {}",
        out.shifted.scale, out.shifted.shift
    ));
    match &out.polygon {
        Some(np) => {
            doc.polygon = Some(np.into());
            doc.status = "proved".into();
        }
        None => {
            doc.status = "inconclusive".into();
            doc.notes
                .push("a required lambda_s was not proved; use the oracle".into());
        }
    }
    Ok(doc)
}

fn run_tables_method(f: &LaurentPoly, cfg: &RunConfig) -> Result<PolygonDocument> {
    let mut doc = doc_skeleton("tables", f, Method::Tables);
    let p = f.p();
    let a = f.field.k;
    let degree = f.nfact_volume()? as u32;
    if degree == 0 {
        return Err(Error::InvalidArgument("constant polynomial".into()));
    }
    let default_cap = |s: u32| (p - 1) * a as u64 * f.n as u64 * s as u64 / 2 + p;
    let mut ords: Vec<Option<Rat>> = vec![Some(Rat::from_integer(BigInt::from(0)))];
    let mut bounds: Vec<(usize, Rat)> = Vec::new();
    let mut all_definitive = true;
    for s in 1..=degree {
        let cap = cfg.weight_cap.unwrap_or_else(|| default_cap(s));
        let rep = tables::min_weight_ord(f, s, cap, cfg.budget)?;
        doc.certificates.push(table_certificate(&rep, f));
        match rep.status {
            tables::MinWeightStatus::Definitive => {
                ords.push(rep.ord_q(a));
            }
            tables::MinWeightStatus::ZeroCoefficient => ords.push(None),
            tables::MinWeightStatus::Inconclusive => {
                all_definitive = false;
                if let Some(b) = &rep.lower_bound {
                    bounds.push((s as usize, b / Rat::from_integer(BigInt::from(a))));
                }
                ords.push(None);
            }
        }
    }
    doc.coefficient_ords = ords_to_doc(&ords);
    // hull of the definitive points; indefinite points must stay above it
    let np = crate::newton::newton_polygon(&ords)?;
    let hull_clears = bounds
        .iter()
        .all(|(s, b)| hull_height(&np, *s).map(|h| *b >= h).unwrap_or(false));
    if all_definitive || hull_clears {
        doc.polygon = Some((&np).into());
        doc.status = "proved".into();
        if f.n > 1 {
            doc.notes.push(
                "polygon of L_0^*: slopes below 1 are certified slopes of the adjusted L^*"
                    .into(),
            );
        }
    } else {
        doc.status = "inconclusive".into();
        doc.notes
            .push("table search inconclusive at some coefficient; raise the weight cap".into());
    }
    Ok(doc)
}

fn hull_height(np: &NewtonPolygon, x: usize) -> Option<Rat> {
    let slopes = np.slope_multiset();
    if x > slopes.len() {
        return None;
    }
    let mut acc = Rat::from_integer(BigInt::from(0));
    for s in slopes.iter().take(x) {
        acc = acc + s;
    }
    Some(acc)
}

fn table_certificate(rep: &tables::MinWeightReport, f: &LaurentPoly) -> document::CertificateDoc {
    let tables_json: Vec<serde_json::Value> = rep
        .certificate
        .iter()
        .take(16)
        .map(|t| {
            serde_json::json!({
                "blocks": t
                    .blocks
                    .iter()
                    .map(|b| serde_json::json!({
                        "level": b.level,
                        "ks": b.ks,
                        "modulus": b.modulus,
                        "digits": b.digits,
                    }))
                    .collect::<Vec<_>>(),
                "weight": t.weight(),
            })
        })
        .collect();
    document::CertificateDoc {
        kind: "min_weight_table".into(),
        detail: serde_json::json!({
            "s": rep.s,
            "status": format!("{:?}", rep.status),
            "weight": rep.weight,
            "ord_p": rep.ord_p.as_ref().map(document::RatDoc::from),
            "lower_bound": rep.lower_bound.as_ref().map(document::RatDoc::from),
            "unit_sum": rep.unit_sum.as_ref().map(|u| f.field.index_of(u)),
            "cancelled_weights": rep.cancelled_weights,
            "tables": tables_json,
        }),
    }
}

/// Method dispatch with oracle fallback and agreement check (spec op `run`).
pub fn run_polygon(
    method: Method,
    f_text: &str,
    p: u64,
    a: u32,
    cfg: &RunConfig,
) -> Result<PolygonDocument> {
    let start = Instant::now();
    let field = FieldCtx::new(p, a)?;
    let (f, warnings) = parse_poly(f_text, &field)?;
    let mut doc = match method {
        Method::Oracle => run_oracle_method(&f, cfg)?,
        Method::Slopes => run_slopes_method(&f, cfg)?,
        Method::Tables => run_tables_method(&f, cfg)?,
        Method::Auto => {
            // closed-form route first, oracle as fallback and as a witness
            let attempt = if f.is_poly_1var() && (3..=6).contains(&f.degree_1var()?) {
                run_slopes_method(&f, cfg)
                    .ok()
                    .filter(|d| d.status == "proved")
            } else {
                None
            };
            let attempt = match attempt {
                Some(d) => Some(d),
                None => run_tables_method(&f, cfg)
                    .ok()
                    .filter(|d| d.status == "proved"),
            };
            let mut d = match attempt {
                Some(mut d) => {
                    // agreement check against the oracle when affordable
                    if let Ok(od) = run_oracle_method(&f, cfg) {
                        if od.status == "proved" {
                            if od.polygon == d.polygon {
                                d.notes.push("oracle agreement check passed".into());
                            } else {
                                return Err(Error::IdentityViolation(
                                    "closed-form and oracle polygons disagree".into(),
                                ));
                            }
                        }
                    }
                    d
                }
                None => {
                    let mut d = run_oracle_method(&f, cfg)?;
                    d.notes
                        .push("closed-form paths unavailable; oracle result".into());
                    d
                }
            };
            d.method = "auto".into();
            d
        }
    };
    for w in warnings {
        doc.notes.push(format!("warning: {w}"));
    }
    doc.runtime_ms = start.elapsed().as_millis() as u64;
    Ok(doc)
}

/// gauss-check subcommand: Gross–Koblitz over all k, the interpolation
/// relation, and (for a = 1) the Hasse–Davenport lift at k in {2, 3}.
pub fn run_gauss_check(p: u64, a: u32, cfg: &RunConfig) -> Result<Vec<String>> {
    let m = cfg.precision_for(p);
    let ctx = crate::gauss::LocalRingCtx::new(p, a, m)?;
    let mut lines = Vec::new();
    let q = ctx.field.order;
    for k in 0..(q - 1) {
        let rep = crate::gauss::gross_koblitz_check(&ctx, k)?;
        lines.push(format!(
            "gross-koblitz q={q} k={k}: ord={} sigma={} unit={} gamma={}",
            rep.valuation, rep.sigma, rep.gauss_unit, rep.gamma_product
        ));
    }
    let interp = crate::gauss::interpolation_check(&ctx)?;
    lines.push(format!(
        "interpolation q={q}: deviation valuation >= {}",
        interp
            .min_deviation_val
            .map(|v| v.to_string())
            .unwrap_or_else(|| "precision".into())
    ));
    if a == 1 {
        for k in [2u32, 3] {
            crate::gauss::hasse_davenport_check(p, k, m)?;
            lines.push(format!("hasse-davenport p={p} d=1 k={k}: pass"));
        }
    }
    Ok(lines)
}

/// congruence subcommand: solution counts, orbit structure, and the
/// inclusion–exclusion count check at level d.
pub fn run_congruence(
    f_text: &str,
    p: u64,
    a: u32,
    d: u32,
    cfg: &RunConfig,
) -> Result<Vec<String>> {
    let field = FieldCtx::new(p, a)?;
    let (f, _) = parse_poly(f_text, &field)?;
    let vmat = f.exponent_matrix();
    let q = f.q();
    let h = crate::congruence::enumerate_h(&vmat, q, d, cfg.budget)?;
    let s = crate::congruence::sp_qd(&vmat, q, d, cfg.budget)?;
    let orbits = crate::congruence::orbit_decompose(&s, q)?;
    let count = crate::congruence::count_check(&vmat, q, d, cfg.budget)?;
    Ok(vec![
        format!("|H(q={q}, d={d})| = {}", h.len()),
        format!("|S(q={q}, d={d})| = {}", s.len()),
        format!("q-orbits at exact level {d}: {}", orbits.orbits.len()),
        format!(
            "inclusion-exclusion: enumerated {} vs formula {} ({})",
            count.enumerated,
            count.formula,
            if count.matches { "match" } else { "MISMATCH" }
        ),
    ])
}

/// Slope multiset of a symmetric one-variable L(f,T) polygon from its lower
/// half (middle 1/2 inserted for even d-1 widths is handled by the caller
/// passing the strict lower half).
pub fn symmetric_slopes(lower: &[Rat], d: u64) -> Vec<Rat> {
    let dm1 = (d - 1) as usize;
    let mut out: Vec<Rat> = lower.to_vec();
    if dm1 % 2 == 1 {
        out.push(Rat::new(BigInt::from(1), BigInt::from(2)));
    }
    for s in lower.iter().rev() {
        out.push(Rat::one() - s);
    }
    assert_eq!(out.len(), dm1);
    out
}
