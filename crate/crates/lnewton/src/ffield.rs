//! Exact arithmetic and enumeration for F_p and F_{p^k}: deterministic
//! context construction, trace, generators and discrete logs.
//!
//! The modulus is the lexicographically smallest irreducible monic polynomial
//! of the requested degree, and the generator is the lex-smallest element of
//! full multiplicative order, so every downstream artifact is reproducible.
//! Character values depend on the generator choice; valuations and Newton
//! polygons do not.

use crate::arith::{checked_pow, factorize, is_prime};
use crate::error::{Error, Result};

/// Hard ceiling on field size (documented limit ~2^40).
pub const FIELD_SIZE_LIMIT: u64 = 1 << 40;

/// Element of F_{p^k} in the polynomial basis; `coeffs[i]` is the
/// coefficient of x^i, always reduced into [0, p).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FqElem(pub Vec<u64>);

/// Immutable context for F_{p^k}; all operations are pure and the context is
/// safe to share across threads.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    pub p: u64,
    pub k: u32,
    /// p^k
    pub order: u64,
    /// Monic modulus, coefficients of x^0..x^k (length k+1, last entry 1).
    pub modulus: Vec<u64>,
    pub generator: FqElem,
    /// Prime factorization of p^k - 1.
    pub unit_factors: Vec<(u64, u32)>,
    /// x^{k+j} mod modulus for j = 0..k-1, used by `mul`.
    red_table: Vec<Vec<u64>>,
}

impl FieldCtx {
    /// Deterministic field context (spec op `build_field`).
    pub fn new(p: u64, k: u32) -> Result<FieldCtx> {
        if !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("extension degree must be >= 1".into()));
        }
        let order = checked_pow(p, k, FIELD_SIZE_LIMIT)
            .ok_or_else(|| Error::SizeExceeded(format!("{p}^{k} exceeds the field size limit")))?;
        let modulus = smallest_irreducible(p, k);
        let red_table = reduction_table(p, &modulus);
        let unit_factors = factorize(order - 1);
        let mut ctx = FieldCtx {
            p,
            k,
            order,
            modulus,
            generator: FqElem(vec![0; k as usize]),
            unit_factors,
            red_table,
        };
        ctx.generator = ctx.find_generator()?;
        Ok(ctx)
    }

    pub fn zero(&self) -> FqElem {
        FqElem(vec![0; self.k as usize])
    }

    pub fn one(&self) -> FqElem {
        self.from_u64(1)
    }

    /// Constant element from an integer (reduced mod p).
    pub fn from_u64(&self, c: u64) -> FqElem {
        let mut v = vec![0; self.k as usize];
        v[0] = c % self.p;
        FqElem(v)
    }

    /// Element with index i in the fixed lexicographic enumeration
    /// (coefficient of x^0 is the least significant digit).
    pub fn element_from_index(&self, mut i: u64) -> FqElem {
        let mut v = vec![0; self.k as usize];
        for c in v.iter_mut() {
            *c = i % self.p;
            i /= self.p;
        }
        FqElem(v)
    }

    pub fn index_of(&self, x: &FqElem) -> u64 {
        let mut acc = 0u64;
        for &c in x.0.iter().rev() {
            acc = acc * self.p + c;
        }
        acc
    }

    pub fn is_zero(&self, x: &FqElem) -> bool {
        x.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        FqElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| (x + y) % self.p)
                .collect(),
        )
    }

    pub fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        FqElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| (x + self.p - y) % self.p)
                .collect(),
        )
    }

    pub fn neg(&self, a: &FqElem) -> FqElem {
        FqElem(a.0.iter().map(|&x| (self.p - x) % self.p).collect())
    }

    pub fn scale(&self, a: &FqElem, c: u64) -> FqElem {
        let c = c % self.p;
        FqElem(a.0.iter().map(|&x| x * c % self.p).collect())
    }

    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let k = self.k as usize;
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        for j in (k..2 * k - 1).rev() {
            let c = prod[j];
            if c == 0 {
                continue;
            }
            prod[j] = 0;
            for (t, &r) in self.red_table[j - k].iter().enumerate() {
                prod[t] = (prod[t] + c * r) % self.p;
            }
        }
        prod.truncate(k);
        FqElem(prod)
    }

    pub fn pow(&self, a: &FqElem, mut e: u64) -> FqElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FqElem) -> Result<FqElem> {
        if self.is_zero(a) {
            return Err(Error::ZeroArgument);
        }
        Ok(self.pow(a, self.order - 2))
    }

    /// Relative trace down to F_{p^sub_degree}: sum of x^{(p^s)^j}.
    pub fn trace(&self, sub_degree: u32, x: &FqElem) -> Result<FqElem> {
        if sub_degree == 0 || self.k % sub_degree != 0 {
            return Err(Error::InvalidSubfield {
                sub: sub_degree,
                k: self.k,
            });
        }
        let step = checked_pow(self.p, sub_degree, u64::MAX).unwrap();
        let mut acc = x.clone();
        let mut frob = x.clone();
        for _ in 1..(self.k / sub_degree) {
            frob = self.pow(&frob, step);
            acc = self.add(&acc, &frob);
        }
        Ok(acc)
    }

    /// Absolute trace to F_p as an integer in [0, p).
    pub fn trace_to_prime(&self, x: &FqElem) -> u64 {
        let t = self.trace(1, x).expect("sub_degree 1 always divides k");
        debug_assert!(t.0[1..].iter().all(|&c| c == 0));
        t.0[0]
    }

    /// Discrete log with respect to the fixed generator (baby-step giant-step).
    pub fn discrete_log(&self, x: &FqElem) -> Result<u64> {
        if self.is_zero(x) {
            return Err(Error::ZeroArgument);
        }
        let n = self.order - 1;
        let m = (n as f64).sqrt().ceil() as u64;
        let mut baby = std::collections::HashMap::with_capacity(m as usize);
        let mut cur = self.one();
        for j in 0..m {
            baby.entry(cur.clone()).or_insert(j);
            cur = self.mul(&cur, &self.generator);
        }
        // giant step factor g^{-m}
        let gm = self.pow(&self.generator, n - m % n);
        let mut gamma = x.clone();
        for i in 0..=m {
            if let Some(&j) = baby.get(&gamma) {
                return Ok((i * m + j) % n);
            }
            gamma = self.mul(&gamma, &gm);
        }
        Err(Error::InternalError("BSGS failed to find a logarithm".into()))
    }

    /// Monic minimal polynomial of `x` over F_p (coefficients of x^0..x^deg).
    pub fn minimal_poly(&self, x: &FqElem) -> Vec<u64> {
        let k = self.k as usize;
        // rows[i] = reduced form of gamma^i with bookkeeping of the combo.
        let mut pivots: Vec<(usize, Vec<u64>, Vec<u64>)> = Vec::new(); // (pivot col, vector, combo)
        let mut pw = self.one();
        for deg in 0..=k {
            let mut vec = pw.0.clone();
            let mut combo = vec![0u64; k + 1];
            combo[deg] = 1;
            for (pc, pv, pcombo) in &pivots {
                if vec[*pc] != 0 {
                    let f = vec[*pc] * crate::arith::mod_inv(pv[*pc], self.p).unwrap() % self.p;
                    for t in 0..k {
                        vec[t] = (vec[t] + (self.p - f) * pv[t]) % self.p;
                    }
                    for t in 0..=k {
                        combo[t] = (combo[t] + (self.p - f) * pcombo[t]) % self.p;
                    }
                }
            }
            if let Some(pc) = vec.iter().position(|&c| c != 0) {
                pivots.push((pc, vec, combo));
                pw = self.mul(&pw, x);
            } else {
                // combo encodes a vanishing combination sum combo[i] * x^i = 0
                // with combo[deg] = 1, i.e. the monic minimal polynomial.
                combo.truncate(deg + 1);
                return combo;
            }
        }
        unreachable!("an element of F_{{p^k}} has degree at most k");
    }

    /// Multiplicative order check used by the generator invariant tests.
    pub fn has_full_order(&self, x: &FqElem) -> bool {
        if self.is_zero(x) {
            return false;
        }
        let n = self.order - 1;
        self.unit_factors
            .iter()
            .all(|&(l, _)| self.pow(x, n / l) != self.one())
    }

    fn find_generator(&self) -> Result<FqElem> {
        for i in 1..self.order {
            let cand = self.element_from_index(i);
            if self.has_full_order(&cand) {
                return Ok(cand);
            }
        }
        Err(Error::InternalError("no generator found".into()))
    }
}

/// Root of the subfield modulus inside an extension with compatible order,
/// fixing one embedding F_{p^a} -> F_{p^{ak}} (any root gives conjugate,
/// equally valid embeddings for character sums).
pub fn embed_root(sub: &FieldCtx, ext: &FieldCtx) -> Result<FqElem> {
    if sub.k == 1 {
        return Ok(ext.one());
    }
    if ext.p != sub.p || (ext.order - 1) % (sub.order - 1) != 0 {
        return Err(Error::InvalidArgument("not a subfield".into()));
    }
    let step = (ext.order - 1) / (sub.order - 1);
    let base = ext.pow(&ext.generator, step);
    let mut cand = ext.one();
    for _ in 0..(sub.order - 1) {
        let mut acc = ext.zero();
        let mut pw = ext.one();
        for &c in &sub.modulus {
            acc = ext.add(&acc, &ext.scale(&pw, c));
            pw = ext.mul(&pw, &cand);
        }
        if ext.is_zero(&acc) {
            return Ok(cand);
        }
        cand = ext.mul(&cand, &base);
    }
    Err(Error::InternalError(
        "subfield modulus has no root in the extension".into(),
    ))
}

/// Image of a subfield element under the embedding fixed by `root`.
pub fn embed_elem(ext: &FieldCtx, root: &FqElem, x: &FqElem) -> FqElem {
    let mut acc = ext.zero();
    let mut pw = ext.one();
    for &c in &x.0 {
        acc = ext.add(&acc, &ext.scale(&pw, c));
        pw = ext.mul(&pw, root);
    }
    acc
}

/// One-variable nondegeneracy criterion: for f = sum a_i x^{d_i} with all
/// d_i > 0, f is nondegenerate exactly when p does not divide the degree
/// (spec op `is_nondegenerate_1var`).
pub fn is_nondegenerate_1var(f: &crate::poly::LaurentPoly, p: u64) -> Result<bool> {
    if !f.is_poly_1var() {
        return Err(Error::Unsupported(
            "the one-variable criterion requires positive exponents".into(),
        ));
    }
    Ok(f.degree_1var()? % p != 0)
}

#[derive(Debug, Clone)]
pub struct DegeneracyWitness {
    /// extension degree e over the ground field where the witness lives
    pub extension: u32,
    /// coordinates as element indices in the extension field
    pub point: Vec<u64>,
    /// indices of the terms on the offending face
    pub face: Vec<usize>,
}

/// Bounded witness search for Definition-style degeneracy: for each closed
/// face of Delta(f) not containing the origin, scan F_{q^e} (e <= e_max)
/// for a common zero of the n logarithmic partials x_i d f^delta / d x_i
/// with all coordinates nonzero. A none-found result is evidence, not
/// proof, of nondegeneracy (spec op `degeneracy_witness_search`).
pub fn degeneracy_witness_search(
    f: &crate::poly::LaurentPoly,
    e_max: u32,
    budget: u64,
) -> Result<Option<DegeneracyWitness>> {
    if f.n > 2 {
        return Err(Error::Unsupported("n > 2".into()));
    }
    let p = f.p();
    let faces = f.faces_without_origin();
    let mut scan_faces = Vec::new();
    for face in &faces {
        // terms contributing to the log-partial in each variable
        // (v_{var,j} != 0 mod p)
        let contributing: Vec<Vec<usize>> = (0..f.n)
            .map(|var| {
                face.iter()
                    .copied()
                    .filter(|&j| f.terms[j].exps[var].rem_euclid(p as i64) != 0)
                    .collect()
            })
            .collect();
        if contributing.iter().all(|c| c.is_empty()) {
            // every partial vanishes identically: any torus point witnesses
            return Ok(Some(DegeneracyWitness {
                extension: 1,
                point: vec![0; f.n],
                face: face.clone(),
            }));
        }
        if contributing.iter().any(|c| c.len() == 1) {
            // a single nonzero monomial never vanishes on the torus
            continue;
        }
        scan_faces.push(face.clone());
    }
    if scan_faces.is_empty() {
        return Ok(None);
    }
    for e in 1..=e_max {
        let ext = FieldCtx::new(p, f.field.k * e)?;
        let n1 = ext.order - 1;
        let points = n1.pow(f.n as u32);
        if points > budget {
            break;
        }
        let root = embed_root(&f.field, &ext)?;
        let coeffs: Vec<FqElem> = f
            .terms
            .iter()
            .map(|t| embed_elem(&ext, &root, &t.coeff))
            .collect();
        for face in &scan_faces {
            let mut xs = vec![0u64; f.n];
            let found = 'points: loop {
                let pt: Vec<FqElem> = xs
                    .iter()
                    .map(|&i| ext.pow(&ext.generator, i))
                    .collect();
                let mut all_zero = true;
                for var in 0..f.n {
                    let mut acc = ext.zero();
                    for &j in face {
                        let t = &f.terms[j];
                        let vij = t.exps[var].rem_euclid(p as i64) as u64;
                        if vij == 0 {
                            continue;
                        }
                        let mut mono = coeffs[j].clone();
                        for (var2, x) in pt.iter().enumerate() {
                            let ee = t.exps[var2].rem_euclid(n1 as i64) as u64;
                            mono = ext.mul(&mono, &ext.pow(x, ee));
                        }
                        acc = ext.add(&acc, &ext.scale(&mono, vij));
                    }
                    if !ext.is_zero(&acc) {
                        all_zero = false;
                        break;
                    }
                }
                if all_zero {
                    break 'points Some(xs.clone());
                }
                let mut pos = 0;
                loop {
                    if pos == f.n {
                        break 'points None;
                    }
                    xs[pos] += 1;
                    if xs[pos] < n1 {
                        break;
                    }
                    xs[pos] = 0;
                    pos += 1;
                }
            };
            if let Some(pt) = found {
                return Ok(Some(DegeneracyWitness {
                    extension: e,
                    point: pt,
                    face: face.clone(),
                }));
            }
        }
    }
    Ok(None)
}

/// Dense polynomial helpers over F_p used for irreducibility scanning.
mod fppoly {
    use crate::arith::mod_inv;

    pub fn trim(v: &mut Vec<u64>) {
        while v.len() > 1 && *v.last().unwrap() == 0 {
            v.pop();
        }
    }

    pub fn rem(mut a: Vec<u64>, m: &[u64], p: u64) -> Vec<u64> {
        let dm = m.len() - 1;
        let lead_inv = mod_inv(m[dm], p).unwrap();
        while a.len() > dm {
            let da = a.len() - 1;
            let f = a[da] * lead_inv % p;
            if f != 0 {
                for i in 0..=dm {
                    a[da - dm + i] = (a[da - dm + i] + (p - f) * m[i] % p) % p;
                }
            }
            a.pop();
            trim(&mut a);
        }
        if a.is_empty() {
            a.push(0);
        }
        a
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        trim(&mut prod);
        rem(prod, m, p)
    }

    /// x^e mod m
    pub fn x_powmod(e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut base = vec![0u64, 1];
        base = rem(base, m, p);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &base, m, p);
            }
            base = mulmod(&base, &base, m, p);
            e >>= 1;
        }
        acc
    }

    pub fn gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
        trim(&mut a);
        trim(&mut b);
        while !(b.len() == 1 && b[0] == 0) {
            let r = rem(a, &b, p);
            a = b;
            b = r;
        }
        a
    }
}

/// Irreducibility over F_p by gcd(x^{p^j} - x, m) for j <= k/2 plus a
/// squarefree-degree check; sufficient for monic m of degree k.
pub fn is_irreducible(modulus: &[u64], p: u64) -> bool {
    let k = modulus.len() - 1;
    if k == 1 {
        return true;
    }
    // x^{p^k} == x mod m is necessary; gcd checks rule out factors of
    // degree j for every j <= k/2, which rules out all proper factors.
    for j in 1..=(k / 2) {
        let pj = crate::arith::checked_pow(p, j as u32, u64::MAX).unwrap();
        let mut f = fppoly::x_powmod(pj, modulus, p);
        // f := x^{p^j} - x
        if f.len() < 2 {
            f.resize(2, 0);
        }
        f[1] = (f[1] + p - 1) % p;
        fppoly::trim(&mut f);
        let g = fppoly::gcd(modulus.to_vec(), f, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Lexicographically smallest irreducible monic polynomial of degree k over
/// F_p (k = 1 uses the plain "x" convention).
fn smallest_irreducible(p: u64, k: u32) -> Vec<u64> {
    let k = k as usize;
    if k == 1 {
        return vec![0, 1];
    }
    let count = checked_pow(p, k as u32, u64::MAX).unwrap();
    for idx in 0..count {
        let mut coeffs = Vec::with_capacity(k + 1);
        let mut i = idx;
        for _ in 0..k {
            coeffs.push(i % p);
            i /= p;
        }
        coeffs.push(1);
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree");
}

fn reduction_table(p: u64, modulus: &[u64]) -> Vec<Vec<u64>> {
    let k = modulus.len() - 1;
    if k == 1 {
        return Vec::new();
    }
    // x^k = -(m_0 + m_1 x + ... + m_{k-1} x^{k-1})
    let mut cur: Vec<u64> = modulus[..k].iter().map(|&c| (p - c) % p).collect();
    let mut table = vec![cur.clone()];
    for _ in 1..k {
        // multiply by x and reduce
        let mut next = vec![0u64; k];
        let top = cur[k - 1];
        for i in (1..k).rev() {
            next[i] = cur[i - 1];
        }
        next[0] = 0;
        if top != 0 {
            for i in 0..k {
                next[i] = (next[i] + top * table[0][i]) % p;
            }
        }
        table.push(next.clone());
        cur = next;
    }
    table
}
