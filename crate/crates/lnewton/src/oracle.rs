//! Ground-truth path: S_k*(f) and S_k(f) by direct enumeration, truncated
//! L-series assembly, and Newton polygons from exact coefficient valuations.
//!
//! The hot loop is counting-first: it builds the histogram
//! #{x : Tr f(x) = c} with small-integer trace sequences (one linear
//! recurrence per term, order = degree of the term's multiplier over F_p),
//! then converts counts to a cyclotomic integer once per k.

use num::BigInt;
use rayon::prelude::*;

use crate::cyclotomic::{lambda_valuation, CycNum, CycSeries, Rat, Valuation};
use crate::error::{Error, Result};
use crate::ffield::{FieldCtx, FqElem};
use crate::newton::{newton_polygon, NewtonPolygon};
use crate::poly::LaurentPoly;

/// Naive enumeration cap (points per exponential sum).
pub const DEFAULT_BUDGET: u64 = 600_000_000;

use crate::ffield::{embed_elem, embed_root};

/// Linear-recurrence generator of the sequence j -> Tr(c * gamma^j) in F_p.
struct TraceSeq {
    /// recurrence coefficients rho_l with u_{t+deg} = sum rho_l u_{t+l} (mod p)
    rho: Vec<u32>,
    window: Vec<u32>,
    p: u32,
}

impl TraceSeq {
    fn new(ext: &FieldCtx, c: &FqElem, gamma: &FqElem, start: u64) -> TraceSeq {
        let mp = ext.minimal_poly(gamma);
        let deg = mp.len() - 1;
        let p = ext.p as u32;
        let rho: Vec<u32> = mp[..deg].iter().map(|&m| ((ext.p - m) % ext.p) as u32).collect();
        let mut window = Vec::with_capacity(deg);
        let mut cur = ext.mul(c, &ext.pow(gamma, start % (ext.order - 1)));
        for _ in 0..deg {
            window.push(ext.trace_to_prime(&cur) as u32);
            cur = ext.mul(&cur, gamma);
        }
        TraceSeq { rho, window, p }
    }

    #[inline]
    fn value(&self) -> u32 {
        self.window[0]
    }

    #[inline]
    fn step(&mut self) {
        let deg = self.window.len();
        let mut acc: u32 = 0;
        for l in 0..deg {
            acc = acc.wrapping_add(self.rho[l].wrapping_mul(self.window[l]));
        }
        let next = acc % self.p;
        for l in 1..deg {
            self.window[l - 1] = self.window[l];
        }
        self.window[deg - 1] = next;
    }
}

/// Histogram of Tr_{F_{q^k}/F_p}(f(x)) over x in F_{q^k}^*, one-variable f
/// (arbitrary integer exponents). Returns counts per class of F_p.
fn star_histogram_1var(f: &LaurentPoly, k: u32, budget: u64) -> Result<Vec<u64>> {
    let p = f.p();
    let ext = FieldCtx::new(p, f.field.k * k)?;
    let points = ext.order - 1;
    if points > budget {
        return Err(Error::SizeExceeded(format!(
            "{points} points exceed the budget {budget}"
        )));
    }
    if f.terms.is_empty() {
        let mut hist = vec![0u64; p as usize];
        hist[0] = points;
        return Ok(hist);
    }
    let root = embed_root(&f.field, &ext)?;
    let order = ext.order - 1;
    let gammas: Vec<FqElem> = f
        .terms
        .iter()
        .map(|t| {
            let e = t.exps[0].rem_euclid(order as i64) as u64;
            ext.pow(&ext.generator, e)
        })
        .collect();
    let coeffs: Vec<FqElem> = f
        .terms
        .iter()
        .map(|t| embed_elem(&ext, &root, &t.coeff))
        .collect();

    let nchunks = (rayon::current_num_threads() as u64 * 4).min(points).max(1);
    let chunk = points.div_ceil(nchunks);
    let ranges: Vec<(u64, u64)> = (0..nchunks)
        .map(|i| (i * chunk, ((i + 1) * chunk).min(points)))
        .filter(|(lo, hi)| lo < hi)
        .collect();

    let hist = ranges
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut seqs: Vec<TraceSeq> = gammas
                .iter()
                .zip(&coeffs)
                .map(|(g, c)| TraceSeq::new(&ext, c, g, lo))
                .collect();
            let mut hist = vec![0u64; p as usize];
            let p32 = p as u32;
            for _ in lo..hi {
                let mut s: u32 = 0;
                for seq in seqs.iter_mut() {
                    s += seq.value();
                    seq.step();
                }
                hist[(s % p32) as usize] += 1;
            }
            hist
        })
        .reduce(
            || vec![0u64; p as usize],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                a
            },
        );
    Ok(hist)
}

fn counts_to_cyc(p: u64, hist: &[u64]) -> CycNum {
    let counts: Vec<i64> = hist.iter().map(|&c| c as i64).collect();
    CycNum::from_counts(p, &counts)
}

/// Shape test for the quadratic fiber reduction: f = g(x) + h(x) y + c y^2
/// with c a nonzero constant.
struct QuadFiber {
    g: Vec<(i64, FqElem)>,
    h: Vec<(i64, FqElem)>,
    c: FqElem,
}

fn quad_fiber_shape(f: &LaurentPoly) -> Option<QuadFiber> {
    if f.n != 2 || f.p() == 2 {
        return None;
    }
    let mut g = Vec::new();
    let mut h = Vec::new();
    let mut c = None;
    for t in &f.terms {
        match t.exps[1] {
            0 => g.push((t.exps[0], t.coeff.clone())),
            1 => h.push((t.exps[0], t.coeff.clone())),
            2 if t.exps[0] == 0 => {
                if c.is_some() {
                    return None;
                }
                c = Some(t.coeff.clone());
            }
            _ => return None,
        }
    }
    c.map(|c| QuadFiber { g, h, c })
}

/// S_k^*(f) for the quadratic-fiber shape in O(q^k) instead of O(q^{2k}):
/// complete the square in y against the full quadratic sum.
fn exp_sum_star_quad_fiber(f: &LaurentPoly, qf: &QuadFiber, k: u32, budget: u64) -> Result<CycNum> {
    let p = f.p();
    let field = &f.field;
    // u(x) = g(x) - h(x)^2 / (4c)
    let inv4c = field.inv(&field.scale(&qf.c, 4))?;
    let mut terms: Vec<(Vec<i64>, FqElem)> = qf
        .g
        .iter()
        .map(|(e, cf)| (vec![*e], cf.clone()))
        .collect();
    for (i, (e1, c1)) in qf.h.iter().enumerate() {
        for (j, (e2, c2)) in qf.h.iter().enumerate() {
            if j < i {
                continue;
            }
            let mut cf = field.mul(c1, c2);
            if i != j {
                cf = field.scale(&cf, 2);
            }
            cf = field.neg(&field.mul(&cf, &inv4c));
            terms.push((vec![e1 + e2], cf));
        }
    }
    let u_poly = LaurentPoly::new(1, terms, field.clone())?;
    let g_poly = LaurentPoly::new(
        1,
        qf.g.iter().map(|(e, c)| (vec![*e], c.clone())).collect(),
        field.clone(),
    )?;
    let y2_poly = LaurentPoly::new(1, vec![(vec![2], qf.c.clone())], field.clone())?;

    // Q = sum over ALL y (including 0) of zeta^{Tr(c y^2)}
    let mut qhist = star_histogram_1var(&y2_poly, k, budget)?;
    qhist[0] += 1; // y = 0 contributes Tr(0) = 0
    let qsum = counts_to_cyc(p, &qhist);

    // A = sum over x != 0 of zeta^{Tr(u(x))}; the u-constant term (if any)
    // is part of u_poly and handled by the gamma = 1 sequence.
    let ahist = star_histogram_1var(&u_poly, k, budget)?;
    let asum = counts_to_cyc(p, &ahist);

    // B = sum over x != 0 of zeta^{Tr(g(x))} (the excluded y = 0 fiber)
    let bhist = star_histogram_1var(&g_poly, k, budget)?;
    let bsum = counts_to_cyc(p, &bhist);

    qsum.mul(&asum)?.sub(&bsum)
}

/// Naive two-variable star sum in O(q^{2k}); used for small cases and to
/// validate the fiber reduction.
pub fn exp_sum_star_2var_naive(f: &LaurentPoly, k: u32, budget: u64) -> Result<CycNum> {
    let p = f.p();
    let ext = FieldCtx::new(p, f.field.k * k)?;
    let n1 = ext.order - 1;
    let points = n1
        .checked_mul(n1)
        .ok_or_else(|| Error::SizeExceeded("q^{2k} overflows".into()))?;
    if points > budget {
        return Err(Error::SizeExceeded(format!(
            "{points} points exceed the budget {budget}"
        )));
    }
    let root = embed_root(&f.field, &ext)?;
    let order = n1;
    let g1: Vec<FqElem> = f
        .terms
        .iter()
        .map(|t| ext.pow(&ext.generator, t.exps[0].rem_euclid(order as i64) as u64))
        .collect();
    let g2: Vec<FqElem> = f
        .terms
        .iter()
        .map(|t| ext.pow(&ext.generator, t.exps[1].rem_euclid(order as i64) as u64))
        .collect();
    let coeffs: Vec<FqElem> = f
        .terms
        .iter()
        .map(|t| embed_elem(&ext, &root, &t.coeff))
        .collect();
    let mut hist = vec![0u64; p as usize];
    let mut outer: Vec<FqElem> = coeffs.clone();
    for _ in 0..n1 {
        let mut inner = outer.clone();
        for _ in 0..n1 {
            let mut s = 0u64;
            for z in inner.iter() {
                s += ext.trace_to_prime(z);
            }
            hist[(s % p) as usize] += 1;
            for (z, g) in inner.iter_mut().zip(&g2) {
                *z = ext.mul(z, g);
            }
        }
        for (w, g) in outer.iter_mut().zip(&g1) {
            *w = ext.mul(w, g);
        }
    }
    Ok(counts_to_cyc(p, &hist))
}

/// S_k^*(f): exact character sum over (F_{q^k}^*)^n (spec op `exp_sum_star`).
pub fn exp_sum_star(f: &LaurentPoly, k: u32, budget: u64) -> Result<CycNum> {
    match f.n {
        1 => {
            let hist = star_histogram_1var(f, k, budget)?;
            Ok(counts_to_cyc(f.p(), &hist))
        }
        2 => {
            if let Some(qf) = quad_fiber_shape(f) {
                exp_sum_star_quad_fiber(f, &qf, k, budget)
            } else {
                exp_sum_star_2var_naive(f, k, budget)
            }
        }
        _ => Err(Error::Unsupported("n > 2".into())),
    }
}

/// S_k(f): full affine sum (spec op `exp_sum_full`); polynomial exponents
/// required so f extends to the coordinate hyperplanes.
pub fn exp_sum_full(f: &LaurentPoly, k: u32, budget: u64) -> Result<CycNum> {
    if f.terms.iter().any(|t| t.exps.iter().any(|&e| e < 0)) {
        return Err(Error::Unsupported(
            "full affine sums require polynomial exponents".into(),
        ));
    }
    match f.n {
        1 => {
            let star = exp_sum_star(f, k, budget)?;
            // x = 0 contributes zeta^{Tr(f(0))} with f(0) the constant term
            let c0 = f
                .terms
                .iter()
                .find(|t| t.exps[0] == 0)
                .map(|t| t.coeff.clone());
            let add = match c0 {
                None => CycNum::one(f.p()),
                Some(c) => {
                    // Tr_{F_{q^k}/F_p}(c) = Tr_{F_q/F_p}(k * c)
                    let t = f.field.trace_to_prime(&f.field.scale(&c, k as u64));
                    CycNum::zeta_pow(f.p(), t as i64)
                }
            };
            star.add(&add)
        }
        2 => {
            // inclusion of the two coordinate lines and the origin
            let star = exp_sum_star(f, k, budget)?;
            let fx = restrict_to_axis(f, 0)?;
            let fy = restrict_to_axis(f, 1)?;
            let sx = exp_sum_star(&fx, k, budget)?; // y = 0, x != 0
            let sy = exp_sum_star(&fy, k, budget)?; // x = 0, y != 0
            let c0 = f
                .terms
                .iter()
                .find(|t| t.exps.iter().all(|&e| e == 0))
                .map(|t| t.coeff.clone());
            let orig = match c0 {
                None => CycNum::one(f.p()),
                Some(c) => {
                    let t = f.field.trace_to_prime(&f.field.scale(&c, k as u64));
                    CycNum::zeta_pow(f.p(), t as i64)
                }
            };
            star.add(&sx)?.add(&sy)?.add(&orig)
        }
        _ => Err(Error::Unsupported("n > 2".into())),
    }
}

/// Restriction of a two-variable polynomial to one axis (other variable 0).
fn restrict_to_axis(f: &LaurentPoly, keep: usize) -> Result<LaurentPoly> {
    let other = 1 - keep;
    let terms = f
        .terms
        .iter()
        .filter(|t| t.exps[other] == 0)
        .map(|t| (vec![t.exps[keep]], t.coeff.clone()))
        .collect();
    LaurentPoly::new(1, terms, f.field.clone())
}

/// L^*(f, T) truncated at degree `dcap` (spec op `lfunction_star`).
pub fn lfunction_star(f: &LaurentPoly, dcap: usize, budget: u64) -> Result<CycSeries> {
    let p = f.p();
    let mut s = CycSeries::zero(p, dcap);
    for k in 1..=dcap {
        let sk = exp_sum_star(f, k as u32, budget)?;
        s.coeffs[k] = sk.scale(&Rat::new(BigInt::from(1), BigInt::from(k)));
    }
    s.exp()
}

/// L(f, T) = exp(sum S_k T^k / k) with the full affine sums.
pub fn lfunction_full(f: &LaurentPoly, dcap: usize, budget: u64) -> Result<CycSeries> {
    let p = f.p();
    let mut s = CycSeries::zero(p, dcap);
    for k in 1..=dcap {
        let sk = exp_sum_full(f, k as u32, budget)?;
        s.coeffs[k] = sk.scale(&Rat::new(BigInt::from(1), BigInt::from(k)));
    }
    s.exp()
}

/// L_0^*(f, T): S_k^* rescaled by (1 - q^k)^{m - n} (spec op `l0_star`).
pub fn l0_star(f: &LaurentPoly, dcap: usize, budget: u64) -> Result<CycSeries> {
    let p = f.p();
    let mn = f.m() as i64 - f.n as i64;
    if mn < 0 {
        return Err(Error::InvalidArgument(
            "L_0^* requires at least n nonzero terms".into(),
        ));
    }
    let q = BigInt::from(f.q());
    let mut s = CycSeries::zero(p, dcap);
    for k in 1..=dcap {
        let sk = exp_sum_star(f, k as u32, budget)?;
        let factor = (BigInt::from(1) - q.pow(k as u32)).pow(mn as u32);
        s.coeffs[k] = sk.scale(&Rat::new(factor, BigInt::from(k)));
    }
    s.exp()
}

/// The sign-adjusted series L^*(f,T)^{(-1)^{n-1}} (a polynomial of degree
/// n! V(f) for nondegenerate f).
pub fn lstar_adjusted(f: &LaurentPoly, dcap: usize, budget: u64) -> Result<CycSeries> {
    let ls = lfunction_star(f, dcap, budget)?;
    if f.n % 2 == 1 {
        Ok(ls)
    } else {
        ls.inverse()
    }
}

/// Vanishing check behind the Adolphson–Sperber degree bound: coefficients
/// of the adjusted series in (n!V, dcap] must vanish for nondegenerate f.
pub fn check_degree_vanishing(f: &LaurentPoly, adjusted: &CycSeries) -> Result<()> {
    let bound = f.nfact_volume()? as usize;
    for s in (bound + 1)..=adjusted.truncation() {
        if !adjusted.coeffs[s].is_zero() {
            return Err(Error::DegreeAnomaly(format!(
                "coefficient {s} of the adjusted L^* is nonzero beyond the degree bound {bound} \
                 (suggests a degenerate input)"
            )));
        }
    }
    Ok(())
}

/// Exact division of L^* by (1 - T) (spec op `strip_trivial_factor`,
/// one-variable polynomial mode).
pub fn strip_trivial_factor(f: &LaurentPoly, lstar: &CycSeries) -> Result<CycSeries> {
    if !f.is_poly_1var() {
        return Err(Error::Unsupported(
            "the (1-T) factor is only stripped in one-variable polynomial mode".into(),
        ));
    }
    lstar.divide_one_minus_t()
}

/// ord_q-normalized valuations of the series coefficients
/// (ord_q = lambda-val / (a (p-1))).
pub fn series_valuations(series: &CycSeries, a: u32) -> Result<Vec<Option<Rat>>> {
    let p = series.p;
    let mut out = Vec::with_capacity(series.truncation() + 1);
    for (s, c) in series.coeffs.iter().enumerate() {
        if c.is_zero() {
            out.push(None);
            continue;
        }
        // ord_q c_s <= n*s for L-type series; cap generously above that
        let cap = (p - 1) * a as u64 * (2 * s as u64 + 4) + 2 * p;
        let lv = lambda_valuation(c, cap)?;
        match lv.val {
            Valuation::Infinite => out.push(None),
            Valuation::Finite(v) => out.push(Some(Rat::new(
                BigInt::from(v),
                BigInt::from((p - 1) * a as u64),
            ))),
        }
    }
    Ok(out)
}

/// Newton polygon of a truncated series, ord_q-normalized.
pub fn np_from_series(series: &CycSeries, a: u32) -> Result<NewtonPolygon> {
    let vals = series_valuations(series, a)?;
    newton_polygon(&vals)
}

/// Default truncation degree: n!V(f) + 2 to exercise the vanishing check,
/// reduced to n!V(f) when the extra sums would blow the point budget.
pub fn default_dcap(f: &LaurentPoly, budget: u64) -> Result<(usize, bool)> {
    let dq = f.nfact_volume()? as usize;
    let points = |k: u32| -> u128 {
        let qk = (f.q() as u128).pow(k);
        match f.n {
            1 => qk - 1,
            _ => {
                if quad_fiber_shape(f).is_some() {
                    3 * qk
                } else {
                    (qk - 1) * (qk - 1)
                }
            }
        }
    };
    let fits = |d: usize| (1..=d).all(|k| points(k as u32) <= budget as u128);
    if fits(dq + 2) {
        Ok((dq + 2, true))
    } else if fits(dq) {
        Ok((dq, false))
    } else {
        Err(Error::SizeExceeded(format!(
            "S_k enumeration up to k = {dq} exceeds the budget {budget}"
        )))
    }
}

/// Full oracle run: series, polygons, and the vanishing flag.
pub struct OracleRun {
    pub lstar: CycSeries,
    pub adjusted: CycSeries,
    /// Polygon of the adjusted L^* (ord_q-normalized).
    pub np_adjusted: NewtonPolygon,
    /// Polygon of L(f,T) for one-variable polynomial mode.
    pub np_l: Option<NewtonPolygon>,
    pub degree_bound: u64,
    /// Some(Ok) when the vanishing check ran and passed; Some(Err) message
    /// when it failed; None when the budget forced dcap = degree bound.
    pub vanishing: Option<std::result::Result<(), String>>,
}

pub fn run_oracle(f: &LaurentPoly, dcap: Option<usize>, budget: u64) -> Result<OracleRun> {
    let bound = f.nfact_volume()?;
    let (dcap, check) = match dcap {
        Some(d) => (d, d > bound as usize),
        None => default_dcap(f, budget)?,
    };
    let lstar = lfunction_star(f, dcap, budget)?;
    let adjusted = if f.n % 2 == 1 {
        lstar.clone()
    } else {
        lstar.inverse()?
    };
    let vanishing = if check {
        Some(match check_degree_vanishing(f, &adjusted) {
            Ok(()) => Ok(()),
            Err(e) => Err(e.to_string()),
        })
    } else {
        None
    };
    // polygon from the polynomial part only
    let mut poly_part = adjusted.clone();
    poly_part.coeffs.truncate(bound as usize + 1);
    let np_adjusted = np_from_series(&poly_part, f.field.k)?;
    let np_l = if f.is_poly_1var() {
        let l = strip_trivial_factor(f, &poly_part)?;
        Some(np_from_series(&l, f.field.k)?)
    } else {
        None
    };
    Ok(OracleRun {
        lstar,
        adjusted,
        np_adjusted,
        np_l,
        degree_bound: bound,
        vanishing,
    })
}
