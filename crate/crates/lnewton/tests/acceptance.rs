//! Acceptance suite: every pinned result runs at its stated tolerance
//! (exact rational equality throughout) and prints one line per criterion.
//!
//! Criterion 6 carries a documented red sub-case: the reference value for
//! ord_p c_6 of the two-variable example is not attained; both independent
//! computation paths agree on 7/2 - 1/(p-1) instead, and the suite reports
//! that mismatch rather than weakening the assertion.

use lnewton::cli::reproduce::{reproduce, SuiteReport};
use lnewton::cli::RunConfig;
use lnewton::cyclotomic::{rat, Rat};
use lnewton::ffield::FieldCtx;
use lnewton::poly::LaurentPoly;
use lnewton::{oracle, slopes, tables};

use num::{BigInt, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> RunConfig {
    RunConfig::default()
}

fn report(criterion: &str, rep: &SuiteReport, per_case_ms: u64) {
    let mut ok = true;
    for c in &rep.cases {
        println!(
            "criterion {criterion}: {} {} ({} ms) {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.id,
            c.runtime_ms,
            c.detail
        );
        ok &= c.pass;
        assert!(
            c.runtime_ms < per_case_ms,
            "case {} exceeded the runtime limit: {} ms >= {per_case_ms} ms",
            c.id,
            c.runtime_ms
        );
    }
    assert!(ok, "criterion {criterion} has failing cases");
}

#[test]
fn criterion_01_cubic_family() {
    let rep = reproduce("thm7.1", &cfg()).unwrap();
    assert_eq!(rep.cases.len(), 6);
    report("1", &rep, 10_000);
}

#[test]
fn criterion_02_quartic_family() {
    let rep = reproduce("thm7.3", &cfg()).unwrap();
    assert_eq!(rep.cases.len(), 9);
    report("2", &rep, 30_000);
}

#[test]
fn criterion_03_sextic_family() {
    for case in ["i", "v", "vi", "vii", "x", "xi", "ii"] {
        let rep = reproduce(&format!("thm7.5:{case}"), &cfg()).unwrap();
        report("3", &rep, 300_000);
    }
}

#[test]
fn criterion_04_shift_to_diagonal() {
    let rep = reproduce("rmk7.2", &cfg()).unwrap();
    report("4", &rep, 30_000);
}

#[test]
fn criterion_05_septic_tables() {
    let rep = reproduce("ex8.1", &cfg()).unwrap();
    assert_eq!(rep.cases.len(), 4);
    report("5", &rep, 5_000);
}

#[test]
fn criterion_06_two_variable_tables() {
    // The final sub-case asserts the pinned reference value for ord_p c_6
    // and is expected to fail: both independent paths measure 17/5, not
    // 18/5 (a unique weight-34 table beats the claimed weight-36 minimum).
    let rep = reproduce("ex8.2", &cfg()).unwrap();
    assert_eq!(rep.cases.len(), 4);
    report("6", &rep, 120_000);
}

#[test]
fn criterion_07_gross_koblitz() {
    let start = std::time::Instant::now();
    let rep = reproduce("gk", &cfg()).unwrap();
    report("7", &rep, 60_000);
    assert!(start.elapsed().as_secs() < 60, "total runtime over one minute");
}

#[test]
fn criterion_08_hasse_davenport() {
    let start = std::time::Instant::now();
    let rep = reproduce("hd", &cfg()).unwrap();
    report("8", &rep, 60_000);
    assert!(start.elapsed().as_secs() < 60, "total runtime over one minute");
}

#[test]
fn criterion_09_product_formula() {
    let rep = reproduce("thm1.2", &cfg()).unwrap();
    assert_eq!(rep.cases.len(), 3);
    report("9", &rep, 120_000);
}

#[test]
fn criterion_10_l0_two_ways() {
    let budget = cfg().budget;
    let p = 11u64;
    let f = LaurentPoly::one_var(&[(3, 1), (1, 1)], FieldCtx::new(p, 1).unwrap()).unwrap();
    let dcap = 6usize;
    let l0 = oracle::l0_star(&f, dcap, budget).unwrap();
    // alternating product: L*(T) * L*(qT)^{-1} for m - n = 1
    let lstar = oracle::lfunction_star(&f, dcap, budget).unwrap();
    let scaled = lstar.scale_t(&Rat::from_integer(BigInt::from(p)));
    let product = lstar.mul(&scaled.inverse().unwrap()).unwrap();
    assert_eq!(l0, product, "L_0^* two ways as truncated series");
    // polygons agree for slopes below 1
    let np_l0 = oracle::np_from_series(&l0, 1).unwrap();
    let mut lstar_poly = lstar.clone();
    lstar_poly.coeffs.truncate(4);
    let np_lstar = oracle::np_from_series(&lstar_poly, 1).unwrap();
    let one = Rat::one();
    assert_eq!(
        np_l0.slopes_below(&one),
        np_lstar.slopes_below(&one),
        "slopes below 1 agree"
    );
    println!(
        "criterion 10: PASS L_0^* identity and polygon agreement below slope 1 at p = {p}"
    );
}

// ---------- criterion 11: randomized property suites ----------

struct Draw {
    p: u64,
    f: LaurentPoly,
    d: u64,
}

fn draw_instance(rng: &mut ChaCha8Rng) -> Draw {
    let ps = [3u64, 5, 7, 11, 13];
    loop {
        let p = ps[rng.random_range(0..ps.len())];
        let d = rng.random_range(3..=6u64);
        if d % p == 0 {
            continue;
        }
        let field = FieldCtx::new(p, 1).unwrap();
        let mut pairs = vec![(d as i64, 1 + rng.random_range(0..(p - 1)) as i64)];
        for e in 1..d {
            if rng.random_range(0..2) == 1 {
                let c = rng.random_range(0..p) as i64;
                if c != 0 {
                    pairs.push((e as i64, c));
                }
            }
        }
        let f = LaurentPoly::one_var(&pairs, field).unwrap();
        return Draw { p, f, d };
    }
}

#[test]
fn criterion_11_property_suites() {
    let budget = cfg().budget;
    let mut rng = ChaCha8Rng::seed_from_u64(0x1f2e3d4c);
    let total = 200usize;
    let mut polygon_checked = 0usize;
    let mut shift_checked = 0usize;
    for idx in 0..total {
        let Draw { p, f, d } = draw_instance(&mut rng);
        let run = oracle::run_oracle(&f, Some(d as usize), budget).unwrap();
        for c in &run.lstar.coeffs {
            assert!(c.is_integral(), "L^* coefficients must be integral ({idx})");
        }
        let np = run.np_l.clone().expect("one-variable polynomial polygon");
        assert!(np.is_symmetric(), "polygon symmetry at instance {idx}: {f:?}");
        assert_eq!(
            np.slope_sum(),
            Rat::new(BigInt::from(d - 1), BigInt::from(2)),
            "slope sum (d-1)/2 at instance {idx}"
        );
        polygon_checked += 1;

        // shift invariance x -> x + b and constant shift f + a0
        let b = rng.random_range(0..p);
        let shifted = taylor_shift(&f, b);
        let run_b = oracle::run_oracle(&shifted, Some(d as usize), budget).unwrap();
        assert_eq!(
            run_b.np_l.as_ref().unwrap().slope_multiset(),
            np.slope_multiset(),
            "shift invariance under x -> x + {b} at instance {idx}"
        );
        let a0 = 1 + rng.random_range(0..(p - 1));
        let with_const = add_constant(&f, a0);
        let lfull = oracle::lfunction_full(&with_const, d as usize, budget).unwrap();
        let np_const = oracle::np_from_series(&lfull, 1).unwrap();
        let lbase = oracle::lfunction_full(&f, d as usize, budget).unwrap();
        let np_base = oracle::np_from_series(&lbase, 1).unwrap();
        assert_eq!(
            np_const.slope_multiset(),
            np_base.slope_multiset(),
            "constant-shift invariance at instance {idx}"
        );
        shift_checked += 1;
    }
    println!(
        "criterion 11a: PASS {polygon_checked} polygon suites and {shift_checked} shift suites"
    );

    prop34_two_sided(&mut rng);
    prop45_parity(&mut rng);
    cor53_bound(&mut rng);
    cross_module_consistency(&mut rng, budget);
}

fn taylor_shift(f: &LaurentPoly, b: u64) -> LaurentPoly {
    let p = f.p();
    let d = f.degree_1var().unwrap() as usize;
    let mut full = vec![0u64; d + 1];
    for t in &f.terms {
        full[t.exps[0] as usize] = t.coeff.0[0];
    }
    for i in 0..d {
        for j in (i..d).rev() {
            full[j] = (full[j] + b * full[j + 1]) % p;
        }
    }
    let pairs: Vec<(i64, i64)> = full
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &c)| c != 0)
        .map(|(e, &c)| (e as i64, c as i64))
        .collect();
    LaurentPoly::one_var(&pairs, f.field.clone()).unwrap()
}

fn add_constant(f: &LaurentPoly, a0: u64) -> LaurentPoly {
    let mut pairs: Vec<(i64, i64)> = f
        .terms
        .iter()
        .map(|t| (t.exps[0], t.coeff.0[0] as i64))
        .collect();
    pairs.push((0, a0 as i64));
    LaurentPoly::one_var(&pairs, f.field.clone()).unwrap()
}

/// Two-sided carry-condition equivalence, brute-forced: every solution's
/// digit matrix passes, and every passing digit matrix reconstructs to a
/// solution; together with completeness of the passing-matrix enumeration
/// this is the full equivalence over all p^{m s} matrices.
fn prop34_two_sided(rng: &mut ChaCha8Rng) {
    let mut checked = 0usize;
    let mut matrices = 0u64;
    while checked < 40 {
        let ps = [5u64, 7, 11, 13];
        let p = ps[rng.random_range(0..ps.len())];
        let d = rng.random_range(3..=6u64);
        if d % p == 0 || p < d + 1 {
            continue;
        }
        // support with sum of exponents <= p
        let e1 = rng.random_range(1..d);
        let exps = vec![e1, d];
        if exps.iter().sum::<u64>() > p {
            continue;
        }
        let m = exps.len();
        let smax = match (p, m) {
            (13, 2) => 2, // 13^6 is beyond the exhaustive budget
            _ => 3,
        };
        let s = rng.random_range(1..=smax);
        if 11u64.pow((m as u32) * s) > 3_000_000 {
            continue;
        }
        let field = FieldCtx::new(p, 1).unwrap();
        let f = LaurentPoly::one_var(
            &exps.iter().map(|&e| (e as i64, 1)).collect::<Vec<_>>(),
            field,
        )
        .unwrap();
        // exhaustive over all digit matrices
        let cols = s as usize;
        let total = p.pow((m as u32) * s);
        let vmat = f.exponent_matrix();
        let modulus = p.pow(s) - 1;
        for code in 0..total {
            let mut c = code;
            let mut digits = vec![vec![0u64; cols]; m];
            for row in digits.iter_mut() {
                for x in row.iter_mut() {
                    *x = c % p;
                    c /= p;
                }
            }
            let carry = tables::carry_check(&digits, &exps, p).unwrap();
            // reconstruct k and test membership in the solution set
            let ks: Vec<u64> = digits
                .iter()
                .map(|row| {
                    let mut k = 0u64;
                    for &dd in row.iter().rev() {
                        k = k * p + dd;
                    }
                    k % modulus
                })
                .collect();
            let sol = lnewton::congruence::SolutionVec {
                ks,
                modulus,
            };
            let member = lnewton::congruence::verifies_congruence(&vmat, &sol);
            // the all-(p-1) matrix reduces to k = 0 mod modulus, which is
            // in the solution set while its digits are not the canonical
            // expansion; skip that single wrap-around code
            let wraps = digits
                .iter()
                .any(|row| row.iter().all(|&x| x == p - 1) && modulus > 1);
            if wraps {
                continue;
            }
            assert_eq!(
                carry.ok, member,
                "carry/membership equivalence failed at p={p} exps={exps:?} s={s} digits={digits:?}"
            );
            matrices += 1;
        }
        checked += 1;
    }
    println!("criterion 11b: PASS carry equivalence on {checked} instances ({matrices} matrices)");
}

fn prop45_parity(rng: &mut ChaCha8Rng) {
    use lnewton::tables::fsimple::{all_permutations, parity_cancellation_check, FMap};
    let mut checked = 0usize;
    while checked < 40 {
        let n = rng.random_range(2..=6usize);
        let labels: Vec<u32> = (0..n).map(|_| rng.random_range(0..3u32)).collect();
        let fmap = FMap(labels);
        let g = all_permutations(n);
        let rep = parity_cancellation_check(&g, &fmap).unwrap();
        assert!(rep.equal);
        checked += 1;
    }
    println!("criterion 11c: PASS parity cancellation on {checked} label maps");
}

/// Lower bound: every enumerated table has ord_p at least (1/d) sum of its
/// column u-values.
fn cor53_bound(rng: &mut ChaCha8Rng) {
    let mut checked = 0usize;
    let mut tables_seen = 0u64;
    while checked < 25 {
        let ps = [5u64, 7, 11, 13];
        let p = ps[rng.random_range(0..ps.len())];
        let d = rng.random_range(3..=6u64);
        if d % p == 0 {
            continue;
        }
        let e1 = rng.random_range(1..d);
        if e1 + d > p {
            continue;
        }
        let field = FieldCtx::new(p, 1).unwrap();
        let f = LaurentPoly::one_var(&[(d as i64, 1), (e1 as i64, 1)], field).unwrap();
        let exps = vec![e1, d];
        for s in 1..=3u32 {
            let cap = 2 * (p - 1);
            let rep = tables::min_weight_ord(&f, s, cap, 10_000_000).unwrap();
            for t in &rep.certificate {
                let mut usum = Rat::zero();
                for b in &t.blocks {
                    let carry = tables::carry_check(&b.digits, &exps, p).unwrap();
                    assert!(carry.ok, "solution blocks satisfy the carry condition");
                    for u in &carry.u {
                        usum = usum + Rat::from_integer(BigInt::from(*u));
                    }
                }
                let bound = usum / Rat::from_integer(BigInt::from(d));
                assert!(
                    t.valuation_p(p) >= bound,
                    "column u-value bound failed at p={p}, f={f:?}, s={s}"
                );
                tables_seen += 1;
            }
        }
        checked += 1;
    }
    println!("criterion 11d: PASS u-value lower bound on {tables_seen} certificate tables");
}

/// Where both closed-form paths are definitive they agree with each other
/// and with the oracle's exact coefficient valuations of L_0^*.
fn cross_module_consistency(rng: &mut ChaCha8Rng, budget: u64) {
    let mut checked = 0usize;
    while checked < 25 {
        let ps = [7u64, 11, 13];
        let p = ps[rng.random_range(0..ps.len())];
        let d = rng.random_range(3..=6u64);
        if d % p == 0 {
            continue;
        }
        let e1 = rng.random_range(1..d);
        if d + e1 > p {
            continue;
        }
        let c1 = 1 + rng.random_range(0..(p - 1));
        let field = FieldCtx::new(p, 1).unwrap();
        let f = LaurentPoly::one_var(&[(d as i64, 1), (e1 as i64, c1 as i64)], field).unwrap();
        let s_max = ((d + 1) as u32).div_ceil(2);
        let l0 = oracle::l0_star(&f, s_max as usize, budget).unwrap();
        let vals = oracle::series_valuations(&l0, 1).unwrap();
        let mut engine = slopes::SlopeEngine::new(slopes::normalize_shift(&f).unwrap());
        for s in 1..=s_max {
            let lam = slopes::lambda_s(&mut engine, s, None).unwrap();
            let mw = tables::min_weight_ord(&f, s, 3 * (p - 1), budget).unwrap();
            if lam.status == slopes::SlopeStatus::Proved {
                assert_eq!(
                    lam.lambda.as_ref(),
                    vals[s as usize].as_ref(),
                    "lambda_s vs oracle at p={p} f={f:?} s={s}"
                );
            }
            if mw.status == tables::MinWeightStatus::Definitive {
                assert_eq!(
                    mw.ord_p.as_ref(),
                    vals[s as usize].as_ref(),
                    "min-weight ord vs oracle at p={p} f={f:?} s={s}"
                );
            }
            if lam.status == slopes::SlopeStatus::Proved
                && mw.status == tables::MinWeightStatus::Definitive
            {
                assert_eq!(lam.lambda, mw.ord_p, "the two closed-form paths agree");
            }
        }
        checked += 1;
    }
    println!("criterion 11e: PASS cross-module consistency on {checked} instances");
}

#[test]
fn criterion_09b_theorem12_coefficient_valuation() {
    // second-coefficient valuation agreement for a quartic over F_11
    let budget = cfg().budget;
    let p = 11u64;
    let f = LaurentPoly::one_var(&[(4, 1), (1, 1)], FieldCtx::new(p, 1).unwrap()).unwrap();
    let cutoff = 2 * (p - 1);
    let (ctx, series) =
        lnewton::gauss::theorem12_truncated_product(&f, 2, 2, cutoff, 4 * (p - 1), budget)
            .unwrap();
    let lstar = oracle::lfunction_star(&f, 2, budget).unwrap();
    let c2 = ctx.embed_cyc(&lstar.coeffs[2]).unwrap();
    assert!(
        ctx.congruent(&series.coeffs[2], &c2, cutoff),
        "c_2 congruent mod pi^{cutoff}"
    );
    let v1 = ctx.val_pi(&series.coeffs[2]);
    let lv = lnewton::cyclotomic::lambda_valuation(&lstar.coeffs[2], 200).unwrap();
    assert_eq!(v1, lv.val.finite(), "c_2 valuation matches the oracle");
    println!("criterion 9b: PASS truncated-product c_2 valuation matches at p = 11");
}

#[test]
fn criterion_extra_rmk76_instance() {
    // the quoted quintic-coefficient sextic instance at p = 17
    let rep = reproduce("rmk7.6", &cfg()).unwrap();
    report("3/rmk7.6", &rep, 300_000);
}
