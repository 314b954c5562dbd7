//! Small-slope algorithm for one-variable f over F_p: enumerate the
//! bounded-knapsack sets C(r;u,v), form the factorial-weighted sums F(r;u,v)
//! and the signed aggregates F_r^s, apply the first-nonvanishing stopping
//! rule, and assemble full Newton polygons for d <= 6 via slope symmetry.

use std::collections::HashMap;

use num::{BigInt, One, Zero};

use crate::arith::mod_inv;
use crate::cyclotomic::Rat;
use crate::error::{Error, Result};
use crate::newton::NewtonPolygon;
use crate::poly::LaurentPoly;
use crate::tables::fsimple::all_permutations;

/// One-variable polynomial over F_p after normalization: monic of degree d
/// with the x^{d-1} coefficient cleared and the constant dropped.
#[derive(Debug, Clone)]
pub struct ShiftedPoly {
    pub p: u64,
    pub d: u64,
    /// coefficient of x^e at index e-1, for e = 1..=d (last entry 1)
    pub coeffs: Vec<u64>,
    /// additive shift applied: f'(x) = f_monic(x + shift) - constant
    pub shift: u64,
    /// multiplicative rescale applied first: x -> scale * x
    pub scale: u64,
}

impl ShiftedPoly {
    pub fn coeff(&self, e: u64) -> u64 {
        if e >= 1 && e <= self.d {
            self.coeffs[(e - 1) as usize]
        } else {
            0
        }
    }

    pub fn support_sum(&self) -> u64 {
        (1..=self.d).filter(|&e| self.coeff(e) != 0).sum()
    }
}

/// Normalize to the x^{d-1}-free monic form (spec op `normalize_shift`):
/// rescale x to make f monic when a d-th root of 1/a_d exists, then shift
/// x -> x + b with b = -a_{d-1}/d and drop the constant term. Neither step
/// changes the L-function.
pub fn normalize_shift(f: &LaurentPoly) -> Result<ShiftedPoly> {
    if !f.is_poly_1var() || f.field.k != 1 {
        return Err(Error::Unsupported(
            "slope analysis requires a one-variable polynomial over F_p".into(),
        ));
    }
    let p = f.p();
    let d = f.degree_1var()?;
    if d % p == 0 {
        return Err(Error::RegimeError(format!("p = {p} divides d = {d}")));
    }
    let mut full = vec![0u64; (d + 1) as usize];
    for t in &f.terms {
        full[t.exps[0] as usize] = t.coeff.0[0];
    }
    // monic rescale
    let mut scale = 1u64;
    if full[d as usize] != 1 {
        let target = mod_inv(full[d as usize], p).unwrap();
        let mut found = None;
        for c in 1..p {
            if crate::arith::mod_pow(c, d, p) == target {
                found = Some(c);
                break;
            }
        }
        let c = found.ok_or_else(|| {
            Error::RegimeError(format!(
                "leading coefficient {} has no d-th root normalizer mod {p}",
                full[d as usize]
            ))
        })?;
        scale = c;
        let mut cp = 1u64;
        for e in 0..=d {
            full[e as usize] = full[e as usize] * cp % p;
            cp = cp * c % p;
        }
    }
    debug_assert_eq!(full[d as usize], 1);
    // Taylor shift x -> x + b with b = -a_{d-1}/d
    let b = (p - full[(d - 1) as usize] * mod_inv(d % p, p).unwrap() % p) % p;
    if b != 0 {
        // repeated synthetic division computes the shifted coefficients
        for i in 0..d as usize {
            for j in (i..d as usize).rev() {
                full[j] = (full[j] + b * full[j + 1]) % p;
            }
        }
    }
    debug_assert_eq!(full[(d - 1) as usize], 0, "x^{{d-1}} coefficient cleared");
    Ok(ShiftedPoly {
        p,
        d,
        coeffs: full[1..=(d as usize)].to_vec(),
        shift: b,
        scale,
    })
}

/// A nonnegative solution of sum_e (d - e) h_e = d r - u p + v over the
/// positions e = 1..=d-2, with the residual top count r - sum h_e.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CSolution {
    /// h_e at index e-1 for e = 1..=d-2
    pub h: Vec<u64>,
    /// k_m = r - sum h_e
    pub top: u64,
}

/// Complete enumeration of C(r; u, v) with the digit filters applied
/// against p: every h_e <= p-1 and the residual count in [0, p-1]
/// (spec op `enumerate_C`).
pub fn enumerate_c(fp: &ShiftedPoly, r: i64, u: i64, v: i64) -> Vec<CSolution> {
    let d = fp.d as i64;
    let p = fp.p as i64;
    let target = d * r - u * p + v;
    let mut out = Vec::new();
    if target < 0 || r < 0 {
        return out;
    }
    // positions 1..=d-2 always; position d-1 joins only when f still has a
    // nonzero x^{d-1} coefficient (the pre-shift setting)
    let hi = if d >= 2 && fp.coeff(d as u64 - 1) != 0 {
        d - 1
    } else {
        (d - 2).max(0)
    };
    let positions: Vec<i64> = (1..=hi).collect();
    let mut h = vec![0u64; positions.len()];
    fn dfs(
        fp: &ShiftedPoly,
        positions: &[i64],
        idx: usize,
        target: i64,
        hsum: i64,
        r: i64,
        p: i64,
        h: &mut Vec<u64>,
        out: &mut Vec<CSolution>,
    ) {
        if target == 0 || idx == positions.len() {
            if target != 0 {
                return;
            }
            let top = r - hsum;
            if top >= 0 && top <= p - 1 {
                out.push(CSolution {
                    h: h.clone(),
                    top: top as u64,
                });
            }
            return;
        }
        let e = positions[idx];
        let w = fp.d as i64 - e;
        let max_h = (target / w).min(p - 1).min(r - hsum);
        for he in 0..=max_h.max(-1) {
            h[idx] = he as u64;
            dfs(fp, positions, idx + 1, target - he * w, hsum + he, r, p, h, out);
        }
        h[idx] = 0;
    }
    dfs(fp, &positions, 0, target, 0, r, p, &mut h, &mut out);
    out
}

/// Factorial tables and memoized F-values for one normalized polynomial.
pub struct SlopeEngine {
    pub fp: ShiftedPoly,
    inv_fact: Vec<u64>,
    f_memo: HashMap<(i64, i64, i64), u64>,
    feasible_memo: HashMap<(i64, i64), Option<i64>>,
}

impl SlopeEngine {
    pub fn new(fp: ShiftedPoly) -> SlopeEngine {
        let p = fp.p;
        let mut fact = vec![1u64; p as usize];
        for i in 1..p {
            fact[i as usize] = fact[(i - 1) as usize] * i % p;
        }
        let inv_fact = fact
            .iter()
            .map(|&x| mod_inv(x, p).expect("factorials below p are units"))
            .collect();
        SlopeEngine {
            fp,
            inv_fact,
            f_memo: HashMap::new(),
            feasible_memo: HashMap::new(),
        }
    }

    /// F(r; u, v) = sum over C(r;u,v) of prod_e a_e^{h_e}/h_e! * 1/top!
    /// mod p (spec op `F_of`), with chi(a_e) replaced by the integer
    /// representative (valid over F_p).
    pub fn f_of(&mut self, r: i64, u: i64, v: i64) -> Result<u64> {
        if let Some(&x) = self.f_memo.get(&(r, u, v)) {
            return Ok(x);
        }
        let p = self.fp.p;
        let sols = enumerate_c(&self.fp, r, u, v);
        let mut acc = 0u64;
        for sol in &sols {
            if sol.h.iter().any(|&he| he >= p) || sol.top >= p {
                return Err(Error::ImpossibleTerm(format!(
                    "C(r={r};u={u},v={v}) produced a non-digit entry"
                )));
            }
            let mut term = self.inv_fact[sol.top as usize];
            for (idx, &he) in sol.h.iter().enumerate() {
                if he == 0 {
                    continue;
                }
                let a_e = self.fp.coeff(idx as u64 + 1);
                if a_e == 0 {
                    term = 0;
                    break;
                }
                term = term * crate::arith::mod_pow(a_e, he, p) % p;
                term = term * self.inv_fact[he as usize] % p;
            }
            acc = (acc + term) % p;
        }
        self.f_memo.insert((r, u, v), acc);
        Ok(acc)
    }

    /// Smallest rho with C(rho; u, v) nonempty (None when empty for all
    /// rho <= the search window); used only as a pruning bound.
    fn min_feasible(&mut self, u: i64, v: i64, window: i64) -> Option<i64> {
        if let Some(&x) = self.feasible_memo.get(&(u, v)) {
            return x.filter(|&m| m <= window);
        }
        for rho in 0..=window {
            if !enumerate_c(&self.fp, rho, u, v).is_empty() {
                self.feasible_memo.insert((u, v), Some(rho));
                return Some(rho);
            }
        }
        // do not cache a definitive None beyond the window
        None
    }

    /// F_r^s: signed sum over permutations, compositions sum r_i = r, and
    /// distinct u-value sets (spec op `F_r_s`). Computed per u-set as the
    /// x^r coefficient of det(M(x)) with M_{ij} = sum_rho F(rho;u_i,u_j) x^rho.
    pub fn f_r_s(&mut self, r: i64, s: u32, u_set_bound: Option<i64>) -> Result<u64> {
        let p = self.fp.p;
        let d = self.fp.d as i64;
        let default_bound = (d * r / p as i64 + 1).min(p as i64 - 1);
        let bound = u_set_bound.unwrap_or(default_bound).min(p as i64 - 1);
        let s = s as usize;
        if s == 0 {
            return Ok(u64::from(r == 0));
        }
        let perms = all_permutations(s);
        let mut total = 0u64;
        let mut subset: Vec<i64> = (0..s as i64).collect();
        loop {
            // prune: sum over positions of the cheapest feasible column
            let mut lb = 0i64;
            let mut feasible = true;
            for &u in &subset {
                let mut best: Option<i64> = None;
                for &v in &subset {
                    if let Some(m) = self.min_feasible(u, v, r) {
                        best = Some(best.map_or(m, |b: i64| b.min(m)));
                    }
                }
                match best {
                    Some(m) => lb += m,
                    None => {
                        feasible = false;
                        break;
                    }
                }
            }
            if feasible && lb <= r {
                // polynomial matrix M[i][j][rho] = F(rho; u_i, u_j)
                let len = (r + 1) as usize;
                let mut m = vec![vec![vec![0u64; len]; s]; s];
                for i in 0..s {
                    for j in 0..s {
                        for rho in 0..=r {
                            m[i][j][rho as usize] = self.f_of(rho, subset[i], subset[j])?;
                        }
                    }
                }
                for sigma in &perms {
                    // truncated product of M[i][sigma(i)]
                    let mut prod = vec![0u64; len];
                    prod[0] = 1;
                    let mut nonzero = true;
                    for i in 0..s {
                        let col = &m[i][sigma.apply(i)];
                        let mut next = vec![0u64; len];
                        for (x, &cx) in prod.iter().enumerate() {
                            if cx == 0 {
                                continue;
                            }
                            for (y, &cy) in col.iter().enumerate() {
                                if x + y >= len || cy == 0 {
                                    continue;
                                }
                                next[x + y] = (next[x + y] + cx * cy) % p;
                            }
                        }
                        prod = next;
                        if prod.iter().all(|&c| c == 0) {
                            nonzero = false;
                            break;
                        }
                    }
                    if !nonzero {
                        continue;
                    }
                    let contrib = prod[r as usize];
                    if contrib == 0 {
                        continue;
                    }
                    if sigma.is_even() {
                        total = (total + contrib) % p;
                    } else {
                        total = (total + p - contrib) % p;
                    }
                }
            }
            // next subset of {0..bound} of size s in lexicographic order
            let mut i = s;
            loop {
                if i == 0 {
                    return Ok(total);
                }
                i -= 1;
                if subset[i] < bound - (s as i64 - 1 - i as i64) {
                    subset[i] += 1;
                    for j in i + 1..s {
                        subset[j] = subset[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlopeStatus {
    /// First nonzero F_r^s found with lambda_s < 1 + (s-1)/d.
    Proved,
    /// First nonzero weight violates the stopping-rule inequality.
    Inconclusive,
    /// No nonzero F_r^s up to the search cap.
    BoundExceeded,
}

#[derive(Debug, Clone)]
pub struct SlopeReport {
    pub s: u32,
    pub status: SlopeStatus,
    /// minimal weight R with F_R^s != 0
    pub r_first: Option<u64>,
    /// lambda_s = R/(p-1)
    pub lambda: Option<Rat>,
    /// the nonzero value F_R^s mod p
    pub f_value: Option<u64>,
}

/// ord_p c_s by the stopping rule (spec op `lambda_s`): iterate r ascending
/// until F_r^s != 0 mod p; proved when lambda_s < 1 + (s-1)/d.
pub fn lambda_s(engine: &mut SlopeEngine, s: u32, r_cap: Option<u64>) -> Result<SlopeReport> {
    let p = engine.fp.p;
    let d = engine.fp.d;
    let dsum = engine.fp.support_sum();
    if p < dsum {
        return Err(Error::RegimeError(format!(
            "requires p >= sum of support exponents = {dsum}, got {p}"
        )));
    }
    if s >= 2 && (s as u64 - 2) * (s as u64 - 1) >= 2 * d {
        return Err(Error::RegimeError(format!(
            "(s-2)(s-1) < 2d violated for s = {s}, d = {d}; use the oracle"
        )));
    }
    // beyond (1 + (s-1)/d)(p-1) the stopping rule cannot conclude
    let cap = r_cap.unwrap_or((p - 1) + (s as u64 - 1) * (p - 1) / d + 2);
    for r in 0..=cap {
        let val = engine.f_r_s(r as i64, s, None)?;
        if val != 0 {
            let lambda = Rat::new(BigInt::from(r), BigInt::from(p - 1));
            let bound = Rat::one()
                + Rat::new(BigInt::from(s as u64 - 1), BigInt::from(d));
            let status = if lambda < bound {
                SlopeStatus::Proved
            } else {
                SlopeStatus::Inconclusive
            };
            return Ok(SlopeReport {
                s,
                status,
                r_first: Some(r),
                lambda: Some(lambda),
                f_value: Some(val),
            });
        }
    }
    Ok(SlopeReport {
        s,
        status: SlopeStatus::BoundExceeded,
        r_first: None,
        lambda: None,
        f_value: None,
    })
}

#[derive(Debug, Clone)]
pub struct SlopesOutcome {
    pub shifted: ShiftedPoly,
    pub reports: Vec<SlopeReport>,
    /// Newton polygon of L(f,T) when every needed lambda_s was proved.
    pub polygon: Option<NewtonPolygon>,
}

/// Newton polygon of L(f, T) for 3 <= d <= 6 from the proved lambda values,
/// completed by the slope symmetry alpha <-> 1 - alpha (spec op
/// `full_np_small_d`).
pub fn full_np_small_d(f: &LaurentPoly) -> Result<SlopesOutcome> {
    let fp = normalize_shift(f)?;
    let d = fp.d;
    if !(3..=6).contains(&d) {
        return Err(Error::RegimeError(format!(
            "full polygons by symmetry require 3 <= d <= 6, got {d}"
        )));
    }
    let mut engine = SlopeEngine::new(fp.clone());
    let s_max = ((d + 1) as u32).div_ceil(2);
    let mut reports = Vec::new();
    for s in 1..=s_max {
        reports.push(lambda_s(&mut engine, s, None)?);
    }
    let polygon = assemble_polygon(d, &reports)?;
    Ok(SlopesOutcome {
        shifted: fp,
        reports,
        polygon,
    })
}

/// Lower-half slope resolution: the exact coefficient ords lambda_2 (and
/// lambda_3 for d >= 5) pin the polygon. A coefficient ord sits on the hull
/// exactly at slope changes, and the symmetric middle forces omega <= 1/2,
/// which disambiguates the equal-slope cases.
fn assemble_polygon(d: u64, reports: &[SlopeReport]) -> Result<Option<NewtonPolygon>> {
    let half = Rat::new(BigInt::from(1), BigInt::from(2));
    let get = |s: u32| -> Option<Rat> {
        reports
            .iter()
            .find(|r| r.s == s && r.status == SlopeStatus::Proved)
            .and_then(|r| r.lambda.clone())
    };
    let Some(l2) = get(2) else { return Ok(None) };
    let slopes: Vec<Rat> = match d {
        3 => {
            let w1 = l2.min(half.clone());
            vec![w1.clone(), Rat::one() - w1]
        }
        4 => {
            let w1 = l2.min(half.clone());
            vec![w1.clone(), half.clone(), Rat::one() - w1]
        }
        5 | 6 => {
            let Some(l3) = get(3) else { return Ok(None) };
            if l3 < l2 {
                return Err(Error::InternalError(
                    "lambda values must be non-decreasing".into(),
                ));
            }
            let two = Rat::from_integer(BigInt::from(2));
            let (w1, w2) = if l2 < half && l3 > two.clone() * l2.clone() {
                let w2 = (l3 - l2.clone()).min(half.clone());
                (l2, w2)
            } else {
                let w = (l3 / two).min(half.clone());
                (w.clone(), w)
            };
            if w1 > w2 {
                return Err(Error::InternalError("slopes must be sorted".into()));
            }
            let mut v = vec![w1.clone(), w2.clone()];
            if d == 6 {
                v.push(half.clone());
            }
            v.push(Rat::one() - w2);
            v.push(Rat::one() - w1);
            v
        }
        _ => return Ok(None),
    };
    // a proved lambda beyond the assembly inputs must sit on or above the
    // partial hull (cheap contradiction check)
    let np = NewtonPolygon::from_slopes(&slopes);
    for rep in reports {
        if rep.status != SlopeStatus::Proved {
            continue;
        }
        let s = rep.s as usize;
        // hull of L* at x = s is 0 + omega_1 + ... + omega_{s-1}
        let mut hull = Rat::zero();
        let ms = np.slope_multiset();
        for w in ms.iter().take(s.saturating_sub(1)) {
            hull = hull + w;
        }
        if let Some(l) = &rep.lambda {
            if *l < hull {
                return Err(Error::InternalError(format!(
                    "lambda_{} = {} lies below the assembled hull",
                    rep.s, l
                )));
            }
        }
    }
    Ok(Some(np))
}
