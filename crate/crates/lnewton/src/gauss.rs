//! p-adic local-ring arithmetic for direct Gauss sums, and verification of
//! Gross–Koblitz, Hasse–Davenport, the interpolation relation, the Gauss-sum
//! expansion of S_k^*, Wan's diagonal formula, and the truncated product
//! formula for L^*.
//!
//! The ring is Z_q[pi] with pi^{p-1} = -p, truncated at pi-precision M.
//! Internally an element is a polynomial of degree < p-1 in pi whose
//! coefficients live in the unramified part Z_q = Z_p[Y]/(g(Y)) mod p^N,
//! N = ceil(M / (p-1)); this pins the element modulo pi^{N(p-1)} >= M.

use std::collections::HashMap;

use num::{BigInt, Zero};

use crate::arith::{binom, mod_inv};
use crate::congruence::{enumerate_h, orbit_decompose, sp_qd, SolutionVec};
use crate::cyclotomic::{CycNum, Rat};
use crate::error::{Error, Result};
use crate::ffield::{FieldCtx, FqElem};
use crate::newton::{newton_polygon, NewtonPolygon};
use crate::poly::LaurentPoly;
use crate::tables::{digit_sigma, frac_part, rat_mod_p};

/// Element of Z_q mod p^N: coefficients of Y^0..Y^{a-1}.
type Zq = Vec<u64>;

/// Element of the ramified ring: pi-coefficients pi^0..pi^{p-2}, each a Zq.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalElem {
    pub coeffs: Vec<Zq>,
}

#[derive(Debug, Clone)]
pub struct GaussSum {
    pub k: u64,
    pub value: LocalElem,
    /// sigma(k): the pi-valuation asserted by Gross–Koblitz.
    pub sigma: u64,
}

/// Context for Z_q[pi] at pi-precision M, q = p^a.
pub struct LocalRingCtx {
    pub p: u64,
    pub a: u32,
    /// requested pi-adic precision in pi-units
    pub m_pi: u64,
    /// coefficient precision: number of p-adic digits
    pub n_p: u32,
    /// p^{n_p}
    pub pn: u64,
    pub field: FieldCtx,
    /// monic modulus of the unramified part, lifted to Z (length a+1)
    modulus: Vec<u64>,
    /// Y^{a+j} mod modulus, coefficients mod p^N
    red_table: Vec<Zq>,
    /// Teichmueller lift of the field generator
    pub teich_gen: Zq,
    /// teich_gen^j for j in 0..q-1
    teich_pows: Vec<Zq>,
    /// trace table: Tr(g^j) in F_p for j in 0..q-1
    tr: Vec<u64>,
    /// zeta_p as a ring element and its powers zeta^0..zeta^{p-1}
    pub zeta: LocalElem,
    zeta_pows: Vec<LocalElem>,
}

impl LocalRingCtx {
    pub fn new(p: u64, a: u32, m_pi: u64) -> Result<LocalRingCtx> {
        if p < 3 {
            return Err(Error::Unsupported("p must be an odd prime".into()));
        }
        let field = FieldCtx::new(p, a)?;
        let n_p = (m_pi.div_ceil(p - 1) as u32).max(2);
        let pn = crate::arith::checked_pow(p, n_p, 1 << 62)
            .ok_or_else(|| Error::SizeExceeded("p^N too large for u64 arithmetic".into()))?;
        let modulus: Vec<u64> = field.modulus.clone();
        let mut ctx = LocalRingCtx {
            p,
            a,
            m_pi,
            n_p,
            pn,
            field,
            modulus,
            red_table: Vec::new(),
            teich_gen: vec![0; a as usize],
            teich_pows: Vec::new(),
            tr: Vec::new(),
            zeta: LocalElem { coeffs: vec![] },
            zeta_pows: Vec::new(),
        };
        ctx.red_table = ctx.build_red_table();
        let gen = ctx.field.generator.clone();
        ctx.teich_gen = ctx.teichmuller_zq(&gen)?;
        let q = ctx.field.order;
        let mut teich_pows = Vec::with_capacity((q - 1) as usize);
        let mut tr = Vec::with_capacity((q - 1) as usize);
        let mut cur = ctx.zq_one();
        let mut gpow = ctx.field.one();
        for _ in 0..(q - 1) {
            teich_pows.push(cur.clone());
            tr.push(ctx.field.trace_to_prime(&gpow));
            cur = ctx.zq_mul(&cur, &ctx.teich_gen);
            gpow = ctx.field.mul(&gpow, &ctx.field.generator);
        }
        ctx.teich_pows = teich_pows;
        ctx.tr = tr;
        ctx.zeta = ctx.solve_zeta()?;
        let mut zeta_pows = Vec::with_capacity(p as usize);
        let mut zcur = ctx.one();
        for _ in 0..p {
            zeta_pows.push(zcur.clone());
            zcur = ctx.mul(&zcur, &ctx.zeta);
        }
        ctx.zeta_pows = zeta_pows;
        Ok(ctx)
    }

    /// Effective pi-precision of the representation (>= requested m_pi).
    pub fn eff_precision(&self) -> u64 {
        self.n_p as u64 * (self.p - 1)
    }

    // ---- unramified coefficient arithmetic (Z_q mod p^N) ----

    fn zq_zero(&self) -> Zq {
        vec![0; self.a as usize]
    }

    fn zq_one(&self) -> Zq {
        let mut v = self.zq_zero();
        v[0] = 1;
        v
    }

    fn zq_from_u64(&self, c: u64) -> Zq {
        let mut v = self.zq_zero();
        v[0] = c % self.pn;
        v
    }

    fn zq_add(&self, x: &Zq, y: &Zq) -> Zq {
        x.iter().zip(y).map(|(&u, &v)| (u + v) % self.pn).collect()
    }

    fn zq_sub(&self, x: &Zq, y: &Zq) -> Zq {
        x.iter()
            .zip(y)
            .map(|(&u, &v)| (u + self.pn - v) % self.pn)
            .collect()
    }

    fn zq_scale(&self, x: &Zq, c: u64) -> Zq {
        let c = c % self.pn;
        x.iter()
            .map(|&u| ((u as u128 * c as u128) % self.pn as u128) as u64)
            .collect()
    }

    fn zq_mul(&self, x: &Zq, y: &Zq) -> Zq {
        let a = self.a as usize;
        if a == 1 {
            return vec![((x[0] as u128 * y[0] as u128) % self.pn as u128) as u64];
        }
        let mut prod = vec![0u128; 2 * a - 1];
        for (i, &u) in x.iter().enumerate() {
            if u == 0 {
                continue;
            }
            for (j, &v) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u as u128 * v as u128) % self.pn as u128;
            }
        }
        for j in (a..2 * a - 1).rev() {
            let c = prod[j] as u64;
            if c == 0 {
                continue;
            }
            prod[j] = 0;
            for (t, &r) in self.red_table[j - a].iter().enumerate() {
                prod[t] = (prod[t] + c as u128 * r as u128) % self.pn as u128;
            }
        }
        prod.truncate(a);
        prod.into_iter().map(|u| u as u64).collect()
    }

    fn build_red_table(&self) -> Vec<Zq> {
        let a = self.a as usize;
        if a == 1 {
            return Vec::new();
        }
        let mut cur: Zq = self.modulus[..a]
            .iter()
            .map(|&c| (self.pn - c % self.pn) % self.pn)
            .collect();
        let mut table = vec![cur.clone()];
        for _ in 1..a {
            let mut next = vec![0u64; a];
            let top = cur[a - 1];
            for i in (1..a).rev() {
                next[i] = cur[i - 1];
            }
            if top != 0 {
                for i in 0..a {
                    next[i] = ((next[i] as u128 + top as u128 * table[0][i] as u128)
                        % self.pn as u128) as u64;
                }
            }
            table.push(next.clone());
            cur = next;
        }
        table
    }

    fn zq_is_zero(&self, x: &Zq) -> bool {
        x.iter().all(|&c| c == 0)
    }

    /// p-adic valuation of a Zq coefficient (None when indistinguishable
    /// from zero at precision N).
    fn zq_valp(&self, x: &Zq) -> Option<u32> {
        if self.zq_is_zero(x) {
            return None;
        }
        let mut v = 0u32;
        let mut cur: Vec<u64> = x.clone();
        loop {
            if cur.iter().any(|&c| c % self.p != 0) {
                return Some(v);
            }
            cur = cur.iter().map(|&c| c / self.p).collect();
            v += 1;
        }
    }

    fn zq_pow(&self, x: &Zq, mut e: u64) -> Zq {
        let mut acc = self.zq_one();
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.zq_mul(&acc, &base);
            }
            base = self.zq_mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Teichmueller lift inside Z_q: iterate x -> x^q to the fixed point.
    fn teichmuller_zq(&self, residue: &FqElem) -> Result<Zq> {
        if self.field.is_zero(residue) {
            return Ok(self.zq_zero());
        }
        let mut x: Zq = residue.0.clone();
        let q = self.field.order;
        for _ in 0..(2 * self.n_p + 4) {
            let next = self.zq_pow(&x, q);
            if next == x {
                return Ok(x);
            }
            x = next;
        }
        Err(Error::PrecisionExhausted(
            "Teichmueller iteration did not converge".into(),
        ))
    }

    // ---- ramified ring arithmetic ----

    pub fn zero(&self) -> LocalElem {
        LocalElem {
            coeffs: vec![self.zq_zero(); (self.p - 1) as usize],
        }
    }

    pub fn one(&self) -> LocalElem {
        let mut e = self.zero();
        e.coeffs[0] = self.zq_one();
        e
    }

    pub fn from_u64(&self, c: u64) -> LocalElem {
        let mut e = self.zero();
        e.coeffs[0] = self.zq_from_u64(c);
        e
    }

    pub fn from_bigint(&self, c: &BigInt) -> LocalElem {
        let pn = BigInt::from(self.pn);
        let r = ((c % &pn) + &pn) % &pn;
        let r: u64 = r.to_biguint().unwrap().try_into().unwrap();
        self.from_u64(r)
    }

    /// pi itself.
    pub fn pi(&self) -> LocalElem {
        let mut e = self.zero();
        e.coeffs[1] = self.zq_one();
        e
    }

    fn from_zq(&self, x: Zq) -> LocalElem {
        let mut e = self.zero();
        e.coeffs[0] = x;
        e
    }

    pub fn add(&self, x: &LocalElem, y: &LocalElem) -> LocalElem {
        LocalElem {
            coeffs: x
                .coeffs
                .iter()
                .zip(&y.coeffs)
                .map(|(u, v)| self.zq_add(u, v))
                .collect(),
        }
    }

    pub fn sub(&self, x: &LocalElem, y: &LocalElem) -> LocalElem {
        LocalElem {
            coeffs: x
                .coeffs
                .iter()
                .zip(&y.coeffs)
                .map(|(u, v)| self.zq_sub(u, v))
                .collect(),
        }
    }

    pub fn neg(&self, x: &LocalElem) -> LocalElem {
        self.sub(&self.zero(), x)
    }

    pub fn scale_zq(&self, x: &LocalElem, c: &Zq) -> LocalElem {
        LocalElem {
            coeffs: x.coeffs.iter().map(|u| self.zq_mul(u, c)).collect(),
        }
    }

    pub fn mul(&self, x: &LocalElem, y: &LocalElem) -> LocalElem {
        let d = (self.p - 1) as usize;
        let mut prod = vec![self.zq_zero(); 2 * d - 1];
        for (i, u) in x.coeffs.iter().enumerate() {
            if self.zq_is_zero(u) {
                continue;
            }
            for (j, v) in y.coeffs.iter().enumerate() {
                if self.zq_is_zero(v) {
                    continue;
                }
                let t = self.zq_mul(u, v);
                prod[i + j] = self.zq_add(&prod[i + j], &t);
            }
        }
        // fold pi^{p-1} = -p
        let minus_p = self.pn - self.p;
        for e in (d..2 * d - 1).rev() {
            if self.zq_is_zero(&prod[e]) {
                continue;
            }
            let folded = self.zq_scale(&prod[e], minus_p);
            prod[e - d] = self.zq_add(&prod[e - d], &folded);
            prod[e] = self.zq_zero();
        }
        prod.truncate(d);
        LocalElem { coeffs: prod }
    }

    pub fn pow(&self, x: &LocalElem, mut e: u64) -> LocalElem {
        let mut acc = self.one();
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self, x: &LocalElem) -> bool {
        x.coeffs.iter().all(|c| self.zq_is_zero(c))
    }

    /// pi-adic valuation: min over coefficients of (p-1) val_p + index;
    /// None when the element vanishes at working precision.
    pub fn val_pi(&self, x: &LocalElem) -> Option<u64> {
        let mut best: Option<u64> = None;
        for (i, c) in x.coeffs.iter().enumerate() {
            if let Some(v) = self.zq_valp(c) {
                let val = v as u64 * (self.p - 1) + i as u64;
                best = Some(best.map_or(val, |b: u64| b.min(val)));
            }
        }
        best
    }

    /// Valuation and unit residue mod pi: x = pi^v u with u a unit; the
    /// residue of u lies in F_q.
    pub fn unit_residue(&self, x: &LocalElem) -> Result<(u64, FqElem)> {
        let v = self
            .val_pi(x)
            .ok_or_else(|| Error::PrecisionExhausted("element is 0 at working precision".into()))?;
        let t = v / (self.p - 1);
        let e = (v % (self.p - 1)) as usize;
        // pi^{t(p-1)+e} u = (-p)^t pi^e u, so the pi^e coefficient is
        // (-1)^t p^t u_0 + higher powers of p
        let c = &x.coeffs[e];
        let pt = self.p.pow(t as u32);
        let mut res: Vec<u64> = c.iter().map(|&u| (u / pt) % self.p).collect();
        if t % 2 == 1 {
            for r in res.iter_mut() {
                *r = (self.p - *r) % self.p;
            }
        }
        Ok((v, FqElem(res)))
    }

    /// x ≡ y mod pi^cut (up to the representation precision).
    pub fn congruent(&self, x: &LocalElem, y: &LocalElem, cut: u64) -> bool {
        let d = self.sub(x, y);
        match self.val_pi(&d) {
            None => true,
            Some(v) => v >= cut,
        }
    }

    /// Inverse of a unit (valuation 0) by Newton iteration.
    pub fn inverse(&self, x: &LocalElem) -> Result<LocalElem> {
        let (v, r) = self.unit_residue(x)?;
        if v != 0 {
            return Err(Error::NotInvertible);
        }
        let r_inv = self.field.inv(&r)?;
        let mut inv = self.from_zq(r_inv.0.clone());
        let iters = 64 - self.eff_precision().leading_zeros() + 2;
        for _ in 0..iters {
            let t = self.sub(&self.from_u64(2), &self.mul(x, &inv));
            inv = self.mul(&inv, &t);
        }
        if !self.is_zero(&self.sub(&self.mul(x, &inv), &self.one())) {
            return Err(Error::InternalError("unit inversion failed".into()));
        }
        Ok(inv)
    }

    /// Teichmueller lift into the ramified ring (spec op `teichmuller`).
    pub fn teichmuller(&self, residue: &FqElem) -> Result<LocalElem> {
        Ok(self.from_zq(self.teichmuller_zq(residue)?))
    }

    /// teich(g)^e as a ring element.
    pub fn teich_power(&self, e: u64) -> LocalElem {
        let q1 = self.field.order - 1;
        self.from_zq(self.teich_pows[(e % q1) as usize].clone())
    }

    /// zeta_p^c for any integer class c.
    pub fn zeta_power(&self, c: u64) -> LocalElem {
        self.zeta_pows[(c % self.p) as usize].clone()
    }

    /// Hensel-solve Phi_p(z) = 0 from the seed z ≡ 1 + pi mod pi^2 (spec op
    /// `zeta_p_local`). Writing z = 1 + pi w, Phi_p(z) = -p h(w) with
    /// h(w) = w^{p-1} - sum_{j=1}^{p-1} (C(p,j)/p) pi^{j-1} w^{j-1}, whose
    /// derivative at w ≡ 1 is the unit (p-1) + O(pi).
    fn solve_zeta(&self) -> Result<LocalElem> {
        let p = self.p;
        // c_j = C(p,j)/p mod p^N (an integer; j! is a p-unit for j < p)
        let mut cj = vec![0u64; p as usize];
        let mut num = 1u64; // (p-1)(p-2)...(p-j+1) mod pn
        let mut fact = 1u64; // j! mod pn
        cj[1] = 1;
        for j in 2..p {
            num = ((num as u128 * ((p - j + 1) % self.pn) as u128) % self.pn as u128) as u64;
            fact = ((fact as u128 * (j % self.pn) as u128) % self.pn as u128) as u64;
            let fact_inv = mod_inv(fact, self.pn)
                .ok_or_else(|| Error::InternalError("factorial not invertible mod p^N".into()))?;
            cj[j as usize] = ((num as u128 * fact_inv as u128) % self.pn as u128) as u64;
        }
        let h = |ctx: &Self, w: &LocalElem| -> LocalElem {
            let piw = ctx.mul(&ctx.pi(), w);
            let mut acc = ctx.pow(w, p - 1);
            let mut pw = ctx.one(); // pi^{j-1} w^{j-1}
            for j in 1..p {
                let term = ctx.scale_zq(&pw, &ctx.zq_from_u64(cj[j as usize]));
                acc = ctx.sub(&acc, &term);
                pw = ctx.mul(&pw, &piw);
            }
            acc
        };
        let hderiv = |ctx: &Self, w: &LocalElem| -> LocalElem {
            let piw = ctx.mul(&ctx.pi(), w);
            let mut acc = ctx.scale_zq(&ctx.pow(w, p - 2), &ctx.zq_from_u64((p - 1) % ctx.pn));
            let mut cur = ctx.pi(); // pi^{j-1} w^{j-2}, starting at j = 2
            for j in 2..p {
                let coef = ((cj[j as usize] as u128 * ((j - 1) % ctx.pn) as u128)
                    % ctx.pn as u128) as u64;
                acc = ctx.sub(&acc, &ctx.scale_zq(&cur, &ctx.zq_from_u64(coef)));
                cur = ctx.mul(&cur, &piw);
            }
            acc
        };
        let mut w = self.one();
        let iters = 64 - self.eff_precision().leading_zeros() + 3;
        for _ in 0..iters {
            let hw = h(self, &w);
            if self.is_zero(&hw) {
                break;
            }
            let d = self.inverse(&hderiv(self, &w))?;
            w = self.sub(&w, &self.mul(&hw, &d));
        }
        if !self.is_zero(&h(self, &w)) {
            return Err(Error::InternalError(
                "Hensel iteration for zeta_p did not converge".into(),
            ));
        }
        let zeta = self.add(&self.one(), &self.mul(&self.pi(), &w));
        if self.val_pi(&self.sub(&zeta, &self.one())) != Some(1) {
            return Err(Error::InternalError(
                "zeta - 1 should have pi-valuation exactly 1".into(),
            ));
        }
        if !self.is_zero(&self.sub(&self.pow(&zeta, p), &self.one())) {
            return Err(Error::InternalError("zeta^p != 1".into()));
        }
        Ok(zeta)
    }

    /// Direct Gauss sum G_k(q) = -sum_{a in F_q^*} chi(a)^{-k} zeta^{Tr a}
    /// (spec op `gauss_sum`).
    pub fn gauss_sum(&self, k: u64) -> Result<GaussSum> {
        let q1 = self.field.order - 1;
        if k > q1.saturating_sub(1) {
            return Err(Error::InvalidArgument(format!(
                "character exponent {k} out of range [0, q-2]"
            )));
        }
        let mut acc = self.zero();
        for j in 0..q1 {
            let e = ((q1 - k % q1) as u128 * j as u128 % q1 as u128) as u64;
            let term = self.scale_zq(
                &self.zeta_pows[self.tr[j as usize] as usize],
                &self.teich_pows[e as usize],
            );
            acc = self.add(&acc, &term);
        }
        Ok(GaussSum {
            k,
            value: self.neg(&acc),
            sigma: digit_sigma(k, self.p),
        })
    }

    /// Embedding of an integral cyclotomic number via zeta_p -> zeta (fixed
    /// once per context).
    pub fn embed_cyc(&self, c: &CycNum) -> Result<LocalElem> {
        let ints = c.integer_coeffs()?;
        let mut acc = self.zero();
        for (i, v) in ints.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let scalar = self.from_bigint(v).coeffs[0].clone();
            let t = self.scale_zq(&self.zeta_pows[i], &scalar);
            acc = self.add(&acc, &t);
        }
        Ok(acc)
    }
}

/// Morita p-adic Gamma function modulo p: Gamma_p(x) mod p depends only on
/// x mod p; for the integer representative r in [0, p) it is 1 when r = 0
/// and (-1)^r (r-1)! otherwise (spec op `padic_gamma_mod_p`).
pub fn padic_gamma_mod_p(p: u64, x: &Rat) -> Result<u64> {
    let r = rat_mod_p(x, p)?;
    if r == 0 {
        return Ok(1);
    }
    let mut fact = 1u64;
    for i in 1..r {
        fact = fact * i % p;
    }
    if r % 2 == 1 {
        fact = (p - fact) % p;
    }
    Ok(fact)
}

#[derive(Debug, Clone)]
pub struct GkReport {
    pub k: u64,
    pub sigma: u64,
    pub valuation: u64,
    pub gauss_unit: u64,
    pub gamma_product: u64,
}

/// Gross–Koblitz check for one character exponent: ord_pi G_k = sigma(k)
/// and G_k pi^{-sigma(k)} ≡ prod_j Gamma_p({p^j k/(q-1)}) mod pi (spec op
/// `gross_koblitz_check`).
pub fn gross_koblitz_check(ctx: &LocalRingCtx, k: u64) -> Result<GkReport> {
    let g = ctx.gauss_sum(k)?;
    let (v, unit) = ctx.unit_residue(&g.value)?;
    let q1 = ctx.field.order - 1;
    let mut gamma_product = 1u64;
    for j in 0..ctx.a {
        let pjk = (ctx.p.pow(j) as u128 * k as u128 % q1 as u128) as u64;
        let frac = frac_part(&Rat::new(BigInt::from(pjk), BigInt::from(q1)));
        gamma_product = gamma_product * padic_gamma_mod_p(ctx.p, &frac)? % ctx.p;
    }
    let constant = unit.0[1..].iter().all(|&c| c == 0);
    let gauss_unit = unit.0[0];
    if v != g.sigma || !constant || gauss_unit != gamma_product {
        return Err(Error::IdentityViolation(format!(
            "Gross-Koblitz failed at k = {k}: valuation {v} vs sigma {}, unit {gauss_unit} vs \
             Gamma product {gamma_product}",
            g.sigma
        )));
    }
    Ok(GkReport {
        k,
        sigma: g.sigma,
        valuation: v,
        gauss_unit,
        gamma_product,
    })
}

#[derive(Debug, Clone)]
pub struct InterpReport {
    pub q: u64,
    /// smallest pi-valuation of a deviation, None when all vanish at
    /// working precision
    pub min_deviation_val: Option<u64>,
}

/// Interpolation relation zeta^{Tr a} = sum_k G_k(q)/(1-q) chi(a)^k for
/// every a in F_q^* (spec op `interpolation_check`).
pub fn interpolation_check(ctx: &LocalRingCtx) -> Result<InterpReport> {
    let q = ctx.field.order;
    let q1 = q - 1;
    let gs: Vec<GaussSum> = (0..q1).map(|k| ctx.gauss_sum(k)).collect::<Result<_>>()?;
    let one_minus_q = ctx.from_bigint(&(BigInt::from(1) - BigInt::from(q)));
    let inv = ctx.inverse(&one_minus_q)?;
    let mut worst: Option<u64> = None;
    for j in 0..q1 {
        let mut rhs = ctx.zero();
        for (k, g) in gs.iter().enumerate() {
            let e = (j as u128 * k as u128 % q1 as u128) as u64;
            let t = ctx.scale_zq(&g.value, &ctx.teich_pows[e as usize]);
            rhs = ctx.add(&rhs, &t);
        }
        rhs = ctx.mul(&rhs, &inv);
        let lhs = ctx.zeta_power(ctx.tr[j as usize]);
        if let Some(v) = ctx.val_pi(&ctx.sub(&lhs, &rhs)) {
            worst = Some(worst.map_or(v, |w: u64| w.min(v)));
        }
    }
    if let Some(v) = worst {
        if v < ctx.m_pi {
            return Err(Error::IdentityViolation(format!(
                "interpolation relation deviates at pi-valuation {v} < precision {}",
                ctx.m_pi
            )));
        }
    }
    Ok(InterpReport {
        q,
        min_deviation_val: worst,
    })
}

/// Hasse–Davenport lifting relation over the prime field (d = 1):
/// G_{r(p^k-1)/(p-1)... more precisely G_{r L}(p^k) = G_r(p)^k with
/// L = (p^k-1)/(p-1), for every r in [0, p-2].
pub fn hasse_davenport_check(p: u64, k: u32, m_pi: u64) -> Result<()> {
    let small = LocalRingCtx::new(p, 1, m_pi)?;
    let big = LocalRingCtx::new(p, k, m_pi)?;
    let lift = (big.field.order - 1) / (p - 1);
    for r in 0..(p - 1) {
        let lhs = big.gauss_sum(r * lift)?.value;
        let rhs_small = small.gauss_sum(r)?.value;
        // constants of Z_p[pi] embed coefficientwise into Z_q[pi]
        let mut rhs = big.zero();
        for (i, c) in rhs_small.coeffs.iter().enumerate() {
            rhs.coeffs[i][0] = c[0] % big.pn;
        }
        let rhs = big.pow(&rhs, k as u64);
        if !big.congruent(&lhs, &rhs, big.m_pi) {
            return Err(Error::IdentityViolation(format!(
                "Hasse-Davenport failed at p = {p}, k = {k}, r = {r}"
            )));
        }
    }
    Ok(())
}

/// S_k^*(f) via the Gauss-sum expansion over H_p(q,k) (spec op
/// `exp_sum_via_gauss`); ground field F_p.
pub fn exp_sum_via_gauss(
    f: &LaurentPoly,
    k: u32,
    m_pi: u64,
    budget: u64,
) -> Result<(LocalRingCtx, LocalElem)> {
    if f.field.k != 1 {
        return Err(Error::Unsupported(
            "the Gauss-sum expansion is implemented over prime ground fields".into(),
        ));
    }
    let p = f.p();
    let ctx = LocalRingCtx::new(p, k, m_pi)?;
    let qk1 = ctx.field.order - 1;
    let vmat = f.exponent_matrix();
    let h = enumerate_h(&vmat, p, k, budget)?;
    let mut gcache: HashMap<u64, LocalElem> = HashMap::new();
    let dlogs: Vec<u64> = f
        .terms
        .iter()
        .map(|t| ctx.field.discrete_log(&ctx.field.from_u64(t.coeff.0[0])))
        .collect::<Result<_>>()?;
    let mut acc = ctx.zero();
    for sol in &h {
        let mut term = ctx.one();
        for (i, &ki) in sol.ks.iter().enumerate() {
            let g = match gcache.get(&ki) {
                Some(g) => g.clone(),
                None => {
                    let g = ctx.gauss_sum(ki)?.value;
                    gcache.insert(ki, g.clone());
                    g
                }
            };
            let chi = ctx.teich_power((dlogs[i] as u128 * ki as u128 % qk1 as u128) as u64);
            term = ctx.mul(&term, &ctx.mul(&chi, &g));
        }
        acc = ctx.add(&acc, &term);
    }
    let n = f.n as i64;
    let m = f.m() as i64;
    let one_minus_qk = ctx.from_bigint(&(BigInt::from(1) - BigInt::from(p).pow(k)));
    let factor = if n >= m {
        ctx.pow(&one_minus_qk, (n - m) as u64)
    } else {
        ctx.pow(&ctx.inverse(&one_minus_qk)?, (m - n) as u64)
    };
    acc = ctx.mul(&acc, &factor);
    if n % 2 == 1 {
        acc = ctx.neg(&acc);
    }
    Ok((ctx, acc))
}

/// Truncated series over a fixed local ring.
#[derive(Debug, Clone)]
pub struct LocalSeries {
    pub coeffs: Vec<LocalElem>,
}

impl LocalRingCtx {
    pub fn series_one(&self, trunc: usize) -> LocalSeries {
        let mut coeffs = vec![self.zero(); trunc + 1];
        coeffs[0] = self.one();
        LocalSeries { coeffs }
    }

    pub fn series_mul(&self, x: &LocalSeries, y: &LocalSeries) -> LocalSeries {
        let trunc = (x.coeffs.len() - 1).min(y.coeffs.len() - 1);
        let mut out = vec![self.zero(); trunc + 1];
        for i in 0..=trunc {
            if self.is_zero(&x.coeffs[i]) {
                continue;
            }
            for j in 0..=(trunc - i) {
                if self.is_zero(&y.coeffs[j]) {
                    continue;
                }
                let t = self.mul(&x.coeffs[i], &y.coeffs[j]);
                out[i + j] = self.add(&out[i + j], &t);
            }
        }
        LocalSeries { coeffs: out }
    }

    pub fn series_pow(&self, x: &LocalSeries, mut e: u64) -> LocalSeries {
        let mut acc = self.series_one(x.coeffs.len() - 1);
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.series_mul(&acc, &base);
            }
            base = self.series_mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Newton polygon of a local series from pi-valuations, ord_q-normalized.
    pub fn series_np(&self, s: &LocalSeries) -> Result<NewtonPolygon> {
        let denom = (self.p - 1) * self.a as u64;
        let vals: Vec<Option<Rat>> = s
            .coeffs
            .iter()
            .map(|c| {
                self.val_pi(c)
                    .map(|v| Rat::new(BigInt::from(v), BigInt::from(denom)))
            })
            .collect();
        newton_polygon(&vals)
    }
}

/// The orbit factor prod_i chi(a_i)^{k_i} G_{k_i}(q^d), computed in the
/// level-d ring and collapsed to Z_p[pi] (legitimate because the q-orbit
/// grouping makes the factor Galois-stable).
fn orbit_factor(
    level_ctx: &LocalRingCtx,
    base: &LocalRingCtx,
    dlogs: &[u64],
    rep: &SolutionVec,
    gcache: &mut HashMap<u64, LocalElem>,
) -> Result<LocalElem> {
    let q1 = level_ctx.field.order - 1;
    let mut term = level_ctx.one();
    for (i, &ki) in rep.ks.iter().enumerate() {
        let g = match gcache.get(&ki) {
            Some(g) => g.clone(),
            None => {
                let g = level_ctx.gauss_sum(ki)?.value;
                gcache.insert(ki, g.clone());
                g
            }
        };
        let chi = level_ctx.teich_power((dlogs[i] as u128 * ki as u128 % q1 as u128) as u64);
        term = level_ctx.mul(&term, &level_ctx.mul(&chi, &g));
    }
    let mut out = base.zero();
    for (i, c) in term.coeffs.iter().enumerate() {
        if c[1..].iter().any(|&x| x != 0) {
            return Err(Error::InternalError(
                "orbit factor is not Galois-stable (non-constant coefficient)".into(),
            ));
        }
        out.coeffs[i][0] = c[0] % base.pn;
    }
    Ok(out)
}

fn coefficient_dlogs(ctx: &LocalRingCtx, f: &LaurentPoly) -> Result<Vec<u64>> {
    f.terms
        .iter()
        .map(|t| ctx.field.discrete_log(&ctx.field.from_u64(t.coeff.0[0])))
        .collect()
}

/// Wan's diagonal formula: the exact finite product over q-orbits of
/// S_p(q,d) of (1 - T^d G_O) (spec op `wan_diagonal_lfunction`); ground
/// field F_p.
pub fn wan_diagonal_lfunction(
    f: &LaurentPoly,
    m_pi: u64,
    budget: u64,
) -> Result<(LocalRingCtx, LocalSeries)> {
    if !f.is_diagonal() {
        return Err(Error::NotDiagonal);
    }
    if f.field.k != 1 {
        return Err(Error::Unsupported("prime ground fields only".into()));
    }
    let p = f.p();
    let vmat = f.exponent_matrix();
    // expected number of solutions: the p'-part of |det V|
    let det: i64 = match f.n {
        1 => vmat[0][0],
        2 => vmat[0][0] * vmat[1][1] - vmat[0][1] * vmat[1][0],
        _ => return Err(Error::Unsupported("n > 2".into())),
    };
    let mut expected = det.unsigned_abs();
    while expected % p == 0 {
        expected /= p;
    }
    let base = LocalRingCtx::new(p, 1, m_pi)?;
    let trunc = expected as usize;
    let mut series = base.series_one(trunc);
    let mut found = 0u64;
    let mut d = 1u32;
    while found < expected {
        if d > 64 {
            return Err(Error::InternalError(
                "diagonal solution levels did not close".into(),
            ));
        }
        let sols = sp_qd(&vmat, p, d, budget)?;
        if !sols.is_empty() {
            found += sols.len() as u64;
            let orbits = orbit_decompose(&sols, p)?;
            let level_ctx = if d == 1 {
                None
            } else {
                Some(LocalRingCtx::new(p, d, m_pi)?)
            };
            let level_ref = level_ctx.as_ref().unwrap_or(&base);
            let dlogs = coefficient_dlogs(level_ref, f)?;
            let mut gcache = HashMap::new();
            for orbit in &orbits.orbits {
                let g_o = orbit_factor(level_ref, &base, &dlogs, &orbit.rep, &mut gcache)?;
                let mut factor = base.series_one(trunc);
                if (d as usize) <= trunc {
                    factor.coeffs[d as usize] = base.neg(&g_o);
                }
                series = base.series_mul(&series, &factor);
            }
        }
        d += 1;
    }
    Ok((base, series))
}

/// Truncated triple product for L^*(f,T)^{(-1)^{n-1}}: factors
/// (1 - q^{dh} T^d G_O)^{C(h+m-n-1, m-n-1)} over levels d <= t_deg, q-orbits
/// at level d, and h <= h_max (spec op `theorem12_truncated_product`).
/// Coefficients are certified modulo pi^{val_cutoff} provided
/// (h_max + 1)(p - 1) > val_cutoff: every omitted factor differs from 1 by
/// pi-valuation at least d(h_max+1)(p-1).
pub fn theorem12_truncated_product(
    f: &LaurentPoly,
    t_deg: usize,
    h_max: u32,
    val_cutoff: u64,
    m_pi: u64,
    budget: u64,
) -> Result<(LocalRingCtx, LocalSeries)> {
    if f.m() <= f.n {
        return Err(Error::InvalidArgument(
            "the truncated product formula requires m > n".into(),
        ));
    }
    if f.field.k != 1 {
        return Err(Error::Unsupported("prime ground fields only".into()));
    }
    let p = f.p();
    if (h_max as u64 + 1) * (p - 1) <= val_cutoff {
        return Err(Error::InsufficientTruncation(format!(
            "h_max = {h_max} certifies only pi-valuations below {}, need {val_cutoff}",
            (h_max as u64 + 1) * (p - 1)
        )));
    }
    let vmat = f.exponent_matrix();
    let base = LocalRingCtx::new(p, 1, m_pi)?;
    let mnm1 = (f.m() - f.n - 1) as u64;
    let mut series = base.series_one(t_deg);
    for d in 1..=(t_deg as u32) {
        let sols = sp_qd(&vmat, p, d, budget)?;
        if sols.is_empty() {
            continue;
        }
        let orbits = orbit_decompose(&sols, p)?;
        let level_ctx = if d == 1 {
            None
        } else {
            Some(LocalRingCtx::new(p, d, m_pi)?)
        };
        let level_ref = level_ctx.as_ref().unwrap_or(&base);
        let dlogs = coefficient_dlogs(level_ref, f)?;
        let mut gcache = HashMap::new();
        for orbit in &orbits.orbits {
            let g_o = orbit_factor(level_ref, &base, &dlogs, &orbit.rep, &mut gcache)?;
            for h in 0..=h_max {
                let exponent = binom(h as u64 + mnm1, mnm1);
                if exponent == 0 {
                    continue;
                }
                let qdh = BigInt::from(p).pow(d * h);
                let coef = base.mul(&base.from_bigint(&qdh), &g_o);
                let mut factor = base.series_one(t_deg);
                if (d as usize) <= t_deg {
                    factor.coeffs[d as usize] = base.neg(&coef);
                }
                series = base.series_mul(&series, &base.series_pow(&factor, exponent));
            }
        }
    }
    Ok((base, series))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    const BUDGET: u64 = 10_000_000;

    #[test]
    fn zeta_defining_properties() {
        for p in [3u64, 5, 7, 11] {
            let ctx = LocalRingCtx::new(p, 1, 4 * (p - 1)).unwrap();
            let mut phi = ctx.zero();
            let mut zp = ctx.one();
            for _ in 0..p {
                phi = ctx.add(&phi, &zp);
                zp = ctx.mul(&zp, &ctx.zeta);
            }
            assert!(ctx.is_zero(&phi), "Phi_p(zeta) = 0 at p = {p}");
            assert_eq!(ctx.val_pi(&ctx.sub(&ctx.zeta, &ctx.one())), Some(1));
            assert!(ctx.is_zero(&ctx.sub(&ctx.pow(&ctx.zeta, p), &ctx.one())));
        }
    }

    #[test]
    fn zeta_in_extension_rings() {
        let ctx = LocalRingCtx::new(3, 2, 12).unwrap();
        let mut phi = ctx.zero();
        let mut zp = ctx.one();
        for _ in 0..3 {
            phi = ctx.add(&phi, &zp);
            zp = ctx.mul(&zp, &ctx.zeta);
        }
        assert!(ctx.is_zero(&phi));
    }

    #[test]
    fn teichmuller_properties() {
        let ctx = LocalRingCtx::new(5, 1, 16).unwrap();
        assert_eq!(ctx.teichmuller(&ctx.field.one()).unwrap(), ctx.one());
        let t2 = ctx.teichmuller(&ctx.field.from_u64(2)).unwrap();
        assert!(ctx.is_zero(&ctx.sub(&ctx.pow(&t2, 4), &ctx.one())));
        for a in 1..5u64 {
            let t = ctx.teichmuller(&ctx.field.from_u64(a)).unwrap();
            let (v, r) = ctx.unit_residue(&t).unwrap();
            assert_eq!(v, 0);
            assert_eq!(r, ctx.field.from_u64(a));
        }
    }

    #[test]
    fn valuation_is_additive() {
        let ctx = LocalRingCtx::new(5, 2, 16).unwrap();
        let x = ctx.mul(&ctx.pi(), &ctx.teich_power(3));
        let y = ctx.mul(&ctx.from_u64(5), &ctx.teich_power(7));
        assert_eq!(ctx.val_pi(&x), Some(1));
        assert_eq!(ctx.val_pi(&y), Some(4));
        assert_eq!(ctx.val_pi(&ctx.mul(&x, &y)), Some(5));
    }

    #[test]
    fn residue_map_is_multiplicative() {
        let ctx = LocalRingCtx::new(5, 2, 8).unwrap();
        for i in [1u64, 7, 13, 22] {
            for j in [2u64, 9, 17] {
                let x = ctx.field.element_from_index(i);
                let y = ctx.field.element_from_index(j);
                let tx = ctx.teichmuller(&x).unwrap();
                let ty = ctx.teichmuller(&y).unwrap();
                let (_, rx) = ctx.unit_residue(&ctx.mul(&tx, &ty)).unwrap();
                assert_eq!(rx, ctx.field.mul(&x, &y));
            }
        }
    }

    #[test]
    fn gauss_sum_g0_is_one() {
        for (p, a) in [(5u64, 1u32), (7, 1), (3, 2)] {
            let ctx = LocalRingCtx::new(p, a, 4 * (p - 1)).unwrap();
            let g0 = ctx.gauss_sum(0).unwrap();
            assert!(ctx.is_zero(&ctx.sub(&g0.value, &ctx.one())));
        }
    }

    #[test]
    fn gross_koblitz_q5_q7() {
        for p in [5u64, 7] {
            let ctx = LocalRingCtx::new(p, 1, 4 * (p - 1)).unwrap();
            for k in 0..(p - 1) {
                gross_koblitz_check(&ctx, k).unwrap();
            }
        }
    }

    #[test]
    fn gross_koblitz_q9() {
        let ctx = LocalRingCtx::new(3, 2, 12).unwrap();
        for k in 0..8 {
            gross_koblitz_check(&ctx, k).unwrap();
        }
    }

    #[test]
    fn sigma_complement_for_prime_fields() {
        for p in [5u64, 7, 11] {
            let ctx = LocalRingCtx::new(p, 1, 4 * (p - 1)).unwrap();
            for k in 1..(p - 1) {
                let v1 = ctx.val_pi(&ctx.gauss_sum(k).unwrap().value).unwrap();
                let v2 = ctx.val_pi(&ctx.gauss_sum(p - 1 - k).unwrap().value).unwrap();
                assert_eq!(v1 + v2, p - 1);
            }
        }
    }

    #[test]
    fn interpolation_q5_q7() {
        for p in [5u64, 7] {
            let ctx = LocalRingCtx::new(p, 1, 4 * (p - 1)).unwrap();
            interpolation_check(&ctx).unwrap();
        }
    }

    #[test]
    fn hasse_davenport_small() {
        hasse_davenport_check(5, 2, 8).unwrap();
    }

    #[test]
    fn gamma_convention_base_cases() {
        use crate::cyclotomic::rat;
        assert_eq!(padic_gamma_mod_p(7, &rat(0, 1)).unwrap(), 1);
        assert_eq!(padic_gamma_mod_p(7, &rat(1, 1)).unwrap(), 6); // -1 mod 7
        // p=7, x=1/6: r = 6, Gamma_7(6) = (-1)^6 5! = 120 ≡ 1 mod 7
        assert_eq!(padic_gamma_mod_p(7, &rat(1, 6)).unwrap(), 1);
    }

    #[test]
    fn exp_sum_via_gauss_matches_oracle() {
        let f = LaurentPoly::one_var(&[(3, 1), (1, 1)], FieldCtx::new(7, 1).unwrap()).unwrap();
        for k in 1..=2u32 {
            let (ctx, viag) = exp_sum_via_gauss(&f, k, 12, BUDGET).unwrap();
            let direct = oracle::exp_sum_star(&f, k, BUDGET).unwrap();
            let emb = ctx.embed_cyc(&direct).unwrap();
            assert!(ctx.congruent(&viag, &emb, ctx.m_pi), "k = {k}");
        }
    }

    #[test]
    fn exp_sum_via_gauss_diagonal_x() {
        let f = LaurentPoly::one_var(&[(1, 1)], FieldCtx::new(5, 1).unwrap()).unwrap();
        let (ctx, s) = exp_sum_via_gauss(&f, 1, 8, BUDGET).unwrap();
        assert!(ctx.is_zero(&ctx.add(&s, &ctx.one())), "S_1^*(x) = -1");
    }

    #[test]
    fn wan_diagonal_x3_at_p7() {
        let f = LaurentPoly::one_var(&[(3, 1)], FieldCtx::new(7, 1).unwrap()).unwrap();
        let (ctx, series) = wan_diagonal_lfunction(&f, 24, BUDGET).unwrap();
        let lstar = oracle::lfunction_star(&f, 3, BUDGET).unwrap();
        for s in 0..=3usize {
            let emb = ctx.embed_cyc(&lstar.coeffs[s]).unwrap();
            assert!(ctx.congruent(&series.coeffs[s], &emb, ctx.m_pi), "c_{s}");
        }
        let np = ctx.series_np(&series).unwrap();
        use crate::cyclotomic::rat;
        assert_eq!(np.slope_multiset(), vec![rat(0, 1), rat(1, 3), rat(2, 3)]);
    }

    #[test]
    fn theorem12_matches_oracle_x3_plus_x() {
        let p = 7u64;
        let f = LaurentPoly::one_var(&[(3, 1), (1, 1)], FieldCtx::new(p, 1).unwrap()).unwrap();
        let cutoff = 2 * (p - 1);
        let (ctx, series) =
            theorem12_truncated_product(&f, 3, 2, cutoff, 4 * (p - 1), BUDGET).unwrap();
        let lstar = oracle::lfunction_star(&f, 3, BUDGET).unwrap();
        for s in 0..=3usize {
            let emb = ctx.embed_cyc(&lstar.coeffs[s]).unwrap();
            assert!(ctx.congruent(&series.coeffs[s], &emb, cutoff), "c_{s}");
        }
    }

    #[test]
    fn insufficient_truncation_is_reported() {
        let f = LaurentPoly::one_var(&[(3, 1), (1, 1)], FieldCtx::new(7, 1).unwrap()).unwrap();
        assert!(matches!(
            theorem12_truncated_product(&f, 3, 0, 12, 24, BUDGET),
            Err(Error::InsufficientTruncation(_))
        ));
    }
}
