//! Pinned reproduction suites: each suite runs a fixed set of cases with the
//! expected exact values frozen in, and reports one pass/fail line per case.

use std::time::Instant;

use num::{BigInt, One};

use crate::cli::RunConfig;
use crate::cyclotomic::{rat, Rat};
use crate::error::{Error, Result};
use crate::ffield::FieldCtx;
use crate::gauss;
use crate::oracle;
use crate::poly::LaurentPoly;
use crate::slopes::{self};
use crate::tables;

#[derive(Debug, Clone)]
pub struct CaseResult {
    pub id: String,
    pub pass: bool,
    pub detail: String,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: Vec<CaseResult>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            out.push_str(&format!(
                "{} {} ({} ms): {}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.id,
                c.runtime_ms,
                c.detail
            ));
        }
        out
    }
}

pub const SUITE_IDS: &[&str] = &[
    "thm7.1", "thm7.3", "thm7.5:i", "thm7.5:ii", "thm7.5:iii", "thm7.5:iv", "thm7.5:v",
    "thm7.5:vi", "thm7.5:vii", "thm7.5:viii", "thm7.5:ix", "thm7.5:x", "thm7.5:xi", "rmk7.2",
    "rmk7.6", "ex8.1", "ex8.2", "gk", "hd", "thm1.2", "prop4.5",
];

fn case<E>(id: String, run: impl FnOnce() -> std::result::Result<String, E>) -> CaseResult
where
    E: std::fmt::Display,
{
    let start = Instant::now();
    let (pass, detail) = match run() {
        Ok(msg) => (true, msg),
        Err(e) => (false, e.to_string()),
    };
    CaseResult {
        id,
        pass,
        detail,
        runtime_ms: start.elapsed().as_millis() as u64,
    }
}

fn poly_1var(pairs: &[(i64, i64)], p: u64) -> Result<LaurentPoly> {
    LaurentPoly::one_var(pairs, FieldCtx::new(p, 1)?)
}

/// Symmetric slope multiset of width d-1 from the strict lower half.
fn expected_slopes(lower: &[Rat], d: u64) -> Vec<Rat> {
    let dm1 = (d - 1) as usize;
    let mut out: Vec<Rat> = lower.to_vec();
    if (dm1 - 2 * lower.len()) % 2 == 1 {
        out.push(rat(1, 2));
    }
    for s in lower.iter().rev() {
        out.push(Rat::one() - s);
    }
    assert_eq!(out.len(), dm1, "slope assembly width");
    out
}

/// Run both the slopes module and the oracle on a one-variable f and check
/// the L(f,T) slope multiset against the expectation.
fn check_both_paths(
    f_pairs: &[(i64, i64)],
    p: u64,
    expected: &[Rat],
    with_oracle: bool,
    cfg: &RunConfig,
) -> Result<String> {
    let f = poly_1var(f_pairs, p)?;
    let out = slopes::full_np_small_d(&f)?;
    let np = out
        .polygon
        .ok_or_else(|| Error::Inconclusive("slopes module could not prove the polygon".into()))?;
    if np.slope_multiset() != expected {
        return Err(Error::IdentityViolation(format!(
            "slopes module polygon {:?} differs from the closed form",
            np.slope_multiset()
        )));
    }
    if with_oracle {
        let run = oracle::run_oracle(&f, Some(f.degree_1var()? as usize), cfg.budget)?;
        let onp = run
            .np_l
            .ok_or_else(|| Error::InternalError("oracle polygon missing".into()))?;
        if onp.slope_multiset() != expected {
            return Err(Error::IdentityViolation(format!(
                "oracle polygon {:?} differs from the closed form",
                onp.slope_multiset()
            )));
        }
    }
    Ok(format!(
        "{}: {}",
        if with_oracle {
            "slopes and oracle agree"
        } else {
            "slopes module matches (oracle skipped)"
        },
        expected
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    ))
}

fn thm71(cfg: &RunConfig) -> Vec<CaseResult> {
    let mut out = Vec::new();
    for p in [5u64, 11, 17] {
        for a1 in [1i64, 2] {
            let expected = vec![
                Rat::new(BigInt::from(p + 1), BigInt::from(3 * (p - 1))),
                Rat::one() - Rat::new(BigInt::from(p + 1), BigInt::from(3 * (p - 1))),
            ];
            out.push(case(format!("thm7.1 p={p} a1={a1}"), || {
                check_both_paths(&[(3, 1), (1, a1)], p, &expected, true, cfg)
            }));
        }
    }
    out
}

fn thm73(cfg: &RunConfig) -> Vec<CaseResult> {
    let mut out = Vec::new();
    for p in [7u64, 11, 19] {
        // branch a2 != 0 (with and without a linear term)
        for (a2, a1) in [(1i64, 1i64), (1, 0)] {
            let w1 = Rat::new(BigInt::from(p + 1), BigInt::from(4 * (p - 1)));
            let expected = expected_slopes(&[w1], 4);
            out.push(case(format!("thm7.3 p={p} a2={a2} a1={a1}"), || {
                check_both_paths(&[(4, 1), (2, a2), (1, a1)], p, &expected, true, cfg)
            }));
        }
        // branch a2 = 0, a1 != 0
        let w1 = Rat::new(BigInt::from(p + 5), BigInt::from(4 * (p - 1)));
        let expected = expected_slopes(&[w1], 4);
        out.push(case(format!("thm7.3 p={p} a2=0 a1=1"), || {
            check_both_paths(&[(4, 1), (1, 1)], p, &expected, true, cfg)
        }));
    }
    out
}

struct Family6 {
    id: &'static str,
    ps: Vec<u64>,
    with_oracle: bool,
}

/// Lower-half slopes (omega_1, omega_2) for each case of the degree-6
/// theorem, as functions of p.
fn sextic_lower(case_id: &str, p: u64) -> Option<Vec<Rat>> {
    let p1 = p - 1;
    let w = |num: u64, den: u64| Rat::new(BigInt::from(num), BigInt::from(den * p1));
    Some(match case_id {
        "i" => vec![w(p + 1, 6), w(p + 1, 3)],
        "ii" => vec![w(p + 1, 6), w(p + 4, 3)],
        "iii" => vec![w(p + 1, 6), w(p + 7, 3)],
        "iv" => vec![w(p + 1, 6), w(p + 10, 3)],
        "v" => vec![w(p + 1, 6), rat(1, 2)],
        "vi" => vec![w(p + 7, 6), w(p - 2, 3)],
        "vii" => vec![w(p + 7, 6), w(p + 1, 3)],
        "viii" => vec![w(p + 13, 6), w(p - 5, 3)],
        "ix" => vec![w(p + 19, 6), w(p - 8, 3)],
        "x" => vec![w(p + 19, 6), w(p + 4, 3)],
        "xi" => vec![w(p + 1, 4), w(p + 1, 4)],
        _ => return None,
    })
}

/// Coefficient instance (a4, a3, a2, a1) for each degree-6 case at prime p,
/// searched against the case's defining conditions.
fn sextic_instance(case_id: &str, p: u64) -> Option<(u64, u64, u64, u64)> {
    let inv = |x: u64| crate::arith::mod_inv(x % p, p).unwrap();
    match case_id {
        "i" => Some((1, 0, 0, 0)),
        "ii" => {
            if p == 17 {
                Some((3, 3, 6, 2)) // the Remark 7.6 instance
            } else {
                None
            }
        }
        "iii" | "iv" => {
            // a4 = 1, a3 != 0 (a3 = 0 degenerates into the a3 = a1 = 0
            // family); a2 and a1 follow from the two vanishing conditions;
            // the residual octic condition separates the two cases.
            for a3 in 1..p {
                let a2 = (3 * a3 % p * a3 % p + 1) % p * inv(3) % p;
                let a1 = (7 * a3 % p + 12 * a3 % p * a3 % p * a3 % p) % p * inv(12) % p;
                let a3p = |e: u32| crate::arith::mod_pow(a3, e as u64, p);
                let octic = (48384 % p * a3p(8) % p
                    + 225 % p
                    + 5600 % p * a3p(2) % p
                    + 41888 % p * a3p(4) % p
                    + 80640 % p * a3p(6) % p)
                    % p;
                let want_zero = case_id == "iv";
                if (octic == 0) == want_zero {
                    // hypothesis p >= 6 + sum of nonzero indices
                    let mut s = 6 + 4;
                    if a3 != 0 {
                        s += 3;
                    }
                    if a2 != 0 {
                        s += 2;
                    }
                    if a1 != 0 {
                        s += 1;
                    }
                    if p >= s {
                        return Some((1, a3, a2, a1));
                    }
                }
            }
            None
        }
        "v" => Some((3, 0, 3, 0)), // 3 a2 = 9 = a4^2
        "vi" => Some((0, 1, 0, 1)),
        "vii" => Some((0, 0, 1, 0)),
        "viii" => {
            // a3 = 1, a2 = t, a1 = -t^2/2 with 9 t^3 != 10
            for t in 1..p {
                if (9 * t % p * t % p * t % p) % p != 10 % p {
                    let a1 = (p - t * t % p) % p * inv(2) % p;
                    if a1 != 0 {
                        return Some((0, 1, t, a1));
                    }
                }
            }
            None
        }
        "ix" => {
            // a3 = 1, 9 a2^3 = 10, a1 = -a2^2/2
            for t in 1..p {
                if (9 * t % p * t % p * t % p) % p == 10 % p {
                    let a1 = (p - t * t % p) % p * inv(2) % p;
                    return Some((0, 1, t, a1));
                }
            }
            None
        }
        "x" => Some((0, 0, 0, 1)),
        "xi" => Some((0, 1, 0, 0)),
        _ => None,
    }
}

fn thm75(case_id: &str, cfg: &RunConfig) -> Result<Vec<CaseResult>> {
    let fam = match case_id {
        "i" => Family6 { id: "i", ps: vec![11, 17, 23], with_oracle: true },
        "ii" => Family6 { id: "ii", ps: vec![17], with_oracle: true },
        // generic-condition cases live at p >= 29; slopes-module check only
        "iii" => Family6 { id: "iii", ps: vec![29], with_oracle: false },
        "iv" => Family6 { id: "iv", ps: vec![29, 41, 53], with_oracle: false },
        "v" => Family6 { id: "v", ps: vec![17, 23], with_oracle: true },
        "vi" => Family6 { id: "vi", ps: vec![11, 17, 23], with_oracle: true },
        "vii" => Family6 { id: "vii", ps: vec![11, 17, 23], with_oracle: true },
        "viii" => Family6 { id: "viii", ps: vec![23], with_oracle: true },
        "ix" => Family6 { id: "ix", ps: vec![41], with_oracle: false },
        "x" => Family6 { id: "x", ps: vec![11, 17, 23], with_oracle: true },
        "xi" => Family6 { id: "xi", ps: vec![11, 17, 23], with_oracle: true },
        _ => return Err(Error::UnknownSuite(format!("thm7.5:{case_id}"))),
    };
    let mut out = Vec::new();
    let mut ran_any = false;
    for &p in &fam.ps {
        let Some((a4, a3, a2, a1)) = sextic_instance(fam.id, p) else {
            continue;
        };
        ran_any = true;
        let lower = sextic_lower(fam.id, p).unwrap();
        let expected = expected_slopes(&lower, 6);
        let pairs: Vec<(i64, i64)> = [(6i64, 1i64), (4, a4 as i64), (3, a3 as i64), (2, a2 as i64), (1, a1 as i64)]
            .into_iter()
            .filter(|&(_, c)| c != 0)
            .collect();
        out.push(case(
            format!("thm7.5:{} p={p} f=({a4},{a3},{a2},{a1})", fam.id),
            || check_both_paths(&pairs, p, &expected, fam.with_oracle, cfg),
        ));
    }
    if !ran_any {
        out.push(CaseResult {
            id: format!("thm7.5:{}", fam.id),
            pass: false,
            detail: "no instance satisfying the case conditions was found".into(),
            runtime_ms: 0,
        });
    }
    Ok(out)
}

fn rmk72(cfg: &RunConfig) -> Vec<CaseResult> {
    vec![case("rmk7.2 p=11 a2=3 a1=3".into(), || {
        let p = 11u64;
        let f = poly_1var(&[(3, 1), (2, 3), (1, 3)], p)?;
        // the shift must land on a diagonal polynomial
        let fp = slopes::normalize_shift(&f)?;
        if fp.coeff(2) != 0 || fp.coeff(1) != 0 {
            return Err(Error::IdentityViolation(
                "shift did not diagonalize 3 a1 = a2^2".into(),
            ));
        }
        let expected = vec![rat(1, 2), rat(1, 2)];
        check_both_paths(&[(3, 1), (2, 3), (1, 3)], p, &expected, true, cfg)
    })]
}

fn ex81(cfg: &RunConfig) -> Vec<CaseResult> {
    let mut out = Vec::new();
    for a in 1..=4u64 {
        out.push(case(format!("ex8.1 a={a}"), || -> Result<String> {
            let p = 5u64;
            let f = poly_1var(&[(7, 1), (4, a as i64)], p)?;
            let expect = [
                (2u32, rat(1, 4)),
                (3, rat(3, 4)),
                (4, rat(3, 2)),
            ];
            for (s, ord) in &expect {
                let rep = tables::min_weight_ord(&f, *s, 30, cfg.budget)?;
                if rep.status != tables::MinWeightStatus::Definitive
                    || rep.ord_p.as_ref() != Some(ord)
                {
                    return Err(Error::IdentityViolation(format!(
                        "ord_p c_{s} expected {ord}, got {:?}",
                        rep.ord_p
                    )));
                }
                if *s == 4 {
                    // unit-sum certificate (1/12) a^2 (a^4 + 7) mod 5
                    let e = crate::arith::mod_inv(12 % p, p).unwrap() * (a * a % p) % p
                        * ((a.pow(4) + 7) % p)
                        % p;
                    if rep.unit_sum != Some(f.field.from_u64(e)) {
                        return Err(Error::IdentityViolation(format!(
                            "c_4 unit sum != (1/12) a^2 (a^4 + 7) = {e}"
                        )));
                    }
                }
            }
            let run = oracle::run_oracle(&f, Some(7), cfg.budget)?;
            let slopes_got = run.np_l.unwrap().slope_multiset();
            let expected = vec![
                rat(1, 4),
                rat(1, 2),
                rat(1, 2),
                rat(1, 2),
                rat(1, 2),
                rat(3, 4),
            ];
            if slopes_got != expected {
                return Err(Error::IdentityViolation(format!(
                    "oracle slopes {slopes_got:?}"
                )));
            }
            Ok("ord c_2 = 1/4, c_3 = 3/4, c_4 = 3/2 with the unit certificate; oracle slopes {1/4, 1/2 x4, 3/4}".into())
        }));
    }
    out
}

fn ex82(cfg: &RunConfig) -> Vec<CaseResult> {
    let p = 11u64;
    let build = || -> Result<LaurentPoly> {
        let field = FieldCtx::new(p, 1)?;
        let one = field.one();
        LaurentPoly::new(
            2,
            vec![
                (vec![3, 0], one.clone()),
                (vec![1, 1], one.clone()),
                (vec![0, 2], one.clone()),
            ],
            field,
        )
    };
    let mut out = Vec::new();
    out.push(case("ex8.2 fiber reduction vs naive (k <= 2)".into(), || -> Result<String> {
        let f = build()?;
        for k in 1..=2u32 {
            let fast = oracle::exp_sum_star(&f, k, cfg.budget)?;
            let naive = oracle::exp_sum_star_2var_naive(&f, k, cfg.budget)?;
            if fast != naive {
                return Err(Error::IdentityViolation(format!(
                    "fiber reduction mismatch at k = {k}"
                )));
            }
        }
        Ok("exact agreement".into())
    }));
    out.push(case("ex8.2 ord_q c_2..c_5".into(), || -> Result<String> {
        let f = build()?;
        let expect = [
            (2u32, rat(1, 2)),
            (3, rat(1, 1)),
            (4, rat(3, 2)),
            (5, rat(12, 5)), // 7/3 + 2/(3(p-1))
        ];
        // the digit tables enumerate the orbit-product form of L_0^*,
        // which for n = 2 is the inverse of the exp form
        let product = oracle::l0_star(&f, 6, cfg.budget)?.inverse()?;
        let vals = oracle::series_valuations(&product, 1)?;
        for (s, ord) in &expect {
            let rep = tables::min_weight_ord(&f, *s, 42, cfg.budget)?;
            if rep.status != tables::MinWeightStatus::Definitive
                || rep.ord_p.as_ref() != Some(ord)
            {
                return Err(Error::IdentityViolation(format!(
                    "ord_q c_{s} expected {ord}, got {:?} ({:?})",
                    rep.ord_p, rep.status
                )));
            }
            if vals[*s as usize].as_ref() != Some(ord) {
                return Err(Error::IdentityViolation(format!(
                    "oracle ord c_{s} = {:?}, expected {ord}",
                    vals[*s as usize]
                )));
            }
        }
        Ok("tables and oracle agree: 1/2, 1, 3/2, 7/3+2/30".into())
    }));
    out.push(case("ex8.2 ord_p c_6 cross-path agreement".into(), || -> Result<String> {
        let f = build()?;
        let rep = tables::min_weight_ord(&f, 6, 42, cfg.budget)?;
        let product = oracle::l0_star(&f, 6, cfg.budget)?.inverse()?;
        let vals = oracle::series_valuations(&product, 1)?;
        if rep.status != tables::MinWeightStatus::Definitive
            || rep.ord_p != vals[6]
        {
            return Err(Error::IdentityViolation(format!(
                "tables {:?} vs oracle {:?}",
                rep.ord_p, vals[6]
            )));
        }
        Ok(format!(
            "both independent paths give ord_p c_6 = {} (minimal table weight {})",
            rep.ord_p.as_ref().unwrap(),
            rep.weight.unwrap()
        ))
    }));
    out.push(case("ex8.2 ord_p c_6 reference value 7/2 + 1/(p-1)".into(), || -> Result<String> {
        let f = build()?;
        let rep = tables::min_weight_ord(&f, 6, 42, cfg.budget)?;
        let reference = rat(18, 5);
        if rep.ord_p.as_ref() != Some(&reference) {
            return Err(Error::IdentityViolation(format!(
                "reference value {reference} is not attained: both paths measure {} — the \
                 claimed minimal table of weight 36 is beaten by a unique weight-34 table \
                 (two level-2 orbits plus the zero and (1/2,0,0) level-1 orbits), so the \
                 reference minimality claim fails; measured value is 7/2 - 1/(p-1)",
                rep.ord_p.as_ref().map(|r| r.to_string()).unwrap_or_default()
            )));
        }
        Ok("reference value attained".into())
    }));
    out
}

fn gk_suite(cfg: &RunConfig) -> Vec<CaseResult> {
    let mut out = Vec::new();
    for (p, a) in [(5u64, 1u32), (7, 1), (3, 2), (11, 1)] {
        let q = p.pow(a);
        out.push(case(format!("gk q={q}"), || -> Result<String> {
            let ctx = gauss::LocalRingCtx::new(p, a, cfg.precision_for(p))?;
            for k in 0..(q - 1) {
                gauss::gross_koblitz_check(&ctx, k)?;
            }
            Ok(format!("all k in [0, {}] pass", q - 2))
        }));
    }
    out
}

fn hd_suite(cfg: &RunConfig) -> Vec<CaseResult> {
    let mut out = Vec::new();
    for p in [5u64, 7] {
        for k in [2u32, 3] {
            out.push(case(format!("hd q={p} k={k}"), || -> Result<String> {
                gauss::hasse_davenport_check(p, k, cfg.precision_for(p))?;
                Ok("exact at working precision for every r".into())
            }));
        }
    }
    out
}

fn thm12_suite(cfg: &RunConfig) -> Vec<CaseResult> {
    let mut out = Vec::new();
    for p in [5u64, 7] {
        out.push(case(format!("thm1.2/eq6 p={p}"), || -> Result<String> {
            let f = poly_1var(&[(3, 1), (1, 1)], p)?;
            let m = cfg.precision_for(p);
            for k in 1..=3u32 {
                let (ctx, viag) = gauss::exp_sum_via_gauss(&f, k, m, cfg.budget)?;
                let emb = ctx.embed_cyc(&oracle::exp_sum_star(&f, k, cfg.budget)?)?;
                if !ctx.congruent(&viag, &emb, ctx.m_pi) {
                    return Err(Error::IdentityViolation(format!(
                        "S_{k}^* differs between the expansion and the oracle"
                    )));
                }
            }
            let cutoff = 2 * (p - 1);
            let (ctx, series) =
                gauss::theorem12_truncated_product(&f, 3, 2, cutoff, m, cfg.budget)?;
            let lstar = oracle::lfunction_star(&f, 3, cfg.budget)?;
            for s in 0..=3usize {
                let emb = ctx.embed_cyc(&lstar.coeffs[s])?;
                if !ctx.congruent(&series.coeffs[s], &emb, cutoff) {
                    return Err(Error::IdentityViolation(format!(
                        "truncated product coefficient c_{s} differs mod pi^{cutoff}"
                    )));
                }
            }
            Ok(format!(
                "expansion matches oracle for k <= 3; product matches c_0..c_3 mod pi^{cutoff}"
            ))
        }));
    }
    out.push(case("thm1.2 wan-diagonal x^3 p=7".into(), || -> Result<String> {
        let f = poly_1var(&[(3, 1)], 7)?;
        let (ctx, series) = gauss::wan_diagonal_lfunction(&f, cfg.precision_for(7), cfg.budget)?;
        let lstar = oracle::lfunction_star(&f, 3, cfg.budget)?;
        for s in 0..=3usize {
            let emb = ctx.embed_cyc(&lstar.coeffs[s])?;
            if !ctx.congruent(&series.coeffs[s], &emb, ctx.m_pi) {
                return Err(Error::IdentityViolation(format!(
                    "Wan product coefficient c_{s} differs"
                )));
            }
        }
        Ok("diagonal product matches the oracle polynomial to precision".into())
    }));
    out
}

fn prop45_suite(_cfg: &RunConfig) -> Vec<CaseResult> {
    use crate::tables::fsimple::{all_permutations, parity_cancellation_check, FMap};
    let mut out = Vec::new();
    let maps: Vec<(String, FMap)> = vec![
        ("constant n=5".into(), FMap(vec![0; 5])),
        ("fibers 2+3 n=5".into(), FMap(vec![0, 0, 1, 1, 1])),
        ("fibers 2+2+2 n=6".into(), FMap(vec![0, 0, 1, 1, 2, 2])),
        ("fibers 4+2 n=6".into(), FMap(vec![0, 0, 0, 0, 1, 1])),
    ];
    for (name, fmap) in maps {
        out.push(case(format!("prop4.5 {name}"), || -> Result<String> {
            let g = all_permutations(fmap.n());
            let rep = parity_cancellation_check(&g, &fmap)?;
            Ok(format!(
                "{} even vs {} odd non-f-simple permutations",
                rep.even_non_simple, rep.odd_non_simple
            ))
        }));
    }
    out
}

/// Run one pinned suite (spec op `reproduce`).
pub fn reproduce(suite_id: &str, cfg: &RunConfig) -> Result<SuiteReport> {
    let cases = match suite_id {
        "thm7.1" => thm71(cfg),
        "thm7.3" => thm73(cfg),
        s if s.starts_with("thm7.5:") => thm75(&s["thm7.5:".len()..], cfg)?,
        "rmk7.2" => rmk72(cfg),
        "rmk7.6" => thm75("ii", cfg)?,
        "ex8.1" => ex81(cfg),
        "ex8.2" => ex82(cfg),
        "gk" => gk_suite(cfg),
        "hd" => hd_suite(cfg),
        "thm1.2" => thm12_suite(cfg),
        "prop4.5" => prop45_suite(cfg),
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    Ok(SuiteReport {
        suite: suite_id.to_string(),
        cases,
    })
}
