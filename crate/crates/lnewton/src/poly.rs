//! Laurent polynomials over F_q with their Newton polytope geometry
//! (exponent matrix, volume, faces), shared by the oracle and the
//! combinatorial modules.

use crate::error::{Error, Result};
use crate::ffield::{FieldCtx, FqElem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub exps: Vec<i64>,
    pub coeff: FqElem,
}

/// f = sum_j a_j x^{V_j} with a_j != 0, over the ground field `field`
/// (q = p^a). Terms are kept sorted by exponent vector with duplicates
/// merged and zero coefficients dropped.
#[derive(Debug, Clone)]
pub struct LaurentPoly {
    pub n: usize,
    pub terms: Vec<Term>,
    pub field: FieldCtx,
}

impl LaurentPoly {
    pub fn new(n: usize, terms: Vec<(Vec<i64>, FqElem)>, field: FieldCtx) -> Result<LaurentPoly> {
        if n == 0 || n > 2 {
            return Err(Error::Unsupported(format!(
                "only 1 or 2 variables are supported, got {n}"
            )));
        }
        let mut map: std::collections::BTreeMap<Vec<i64>, FqElem> = std::collections::BTreeMap::new();
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::InvalidArgument(
                    "exponent vector length does not match variable count".into(),
                ));
            }
            let entry = map.entry(e).or_insert_with(|| field.zero());
            *entry = field.add(entry, &c);
        }
        let terms: Vec<Term> = map
            .into_iter()
            .filter(|(_, c)| !field.is_zero(c))
            .map(|(exps, coeff)| Term { exps, coeff })
            .collect();
        Ok(LaurentPoly { n, terms, field })
    }

    /// Convenience constructor for one-variable polynomials with integer
    /// coefficients given as (exponent, coefficient) pairs.
    pub fn one_var(pairs: &[(i64, i64)], field: FieldCtx) -> Result<LaurentPoly> {
        let p = field.p as i64;
        let terms = pairs
            .iter()
            .map(|&(e, c)| (vec![e], field.from_u64(c.rem_euclid(p) as u64)))
            .collect();
        LaurentPoly::new(1, terms, field)
    }

    pub fn p(&self) -> u64 {
        self.field.p
    }

    pub fn q(&self) -> u64 {
        self.field.order
    }

    pub fn m(&self) -> usize {
        self.terms.len()
    }

    /// True when n = 1 with all exponents positive (polynomial mode).
    pub fn is_poly_1var(&self) -> bool {
        self.n == 1 && !self.terms.is_empty() && self.terms.iter().all(|t| t.exps[0] > 0)
    }

    /// Degree for one-variable polynomial mode.
    pub fn degree_1var(&self) -> Result<u64> {
        if !self.is_poly_1var() {
            return Err(Error::Unsupported(
                "degree_1var requires one-variable polynomial mode".into(),
            ));
        }
        Ok(self.terms.iter().map(|t| t.exps[0]).max().unwrap() as u64)
    }

    /// Coefficient at a given exponent (one variable), as an F_p integer.
    pub fn coeff_at_1var(&self, e: i64) -> u64 {
        self.terms
            .iter()
            .find(|t| t.exps[0] == e)
            .map(|t| t.coeff.0[0])
            .unwrap_or(0)
    }

    /// Exponent matrix with columns V_j (n rows, m columns).
    pub fn exponent_matrix(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|i| self.terms.iter().map(|t| t.exps[i]).collect())
            .collect()
    }

    /// Vertices of Delta(f): convex hull of the origin and the V_j, n <= 2.
    pub fn delta_vertices(&self) -> Vec<(i64, i64)> {
        let mut pts: Vec<(i64, i64)> = vec![(0, 0)];
        for t in &self.terms {
            let x = t.exps[0];
            let y = if self.n == 2 { t.exps[1] } else { 0 };
            pts.push((x, y));
        }
        convex_hull(pts)
    }

    /// n! * V(f) as an exact integer (degree of the sign-adjusted L*).
    pub fn nfact_volume(&self) -> Result<u64> {
        match self.n {
            1 => {
                let lo = self.terms.iter().map(|t| t.exps[0]).min().unwrap_or(0).min(0);
                let hi = self.terms.iter().map(|t| t.exps[0]).max().unwrap_or(0).max(0);
                Ok((hi - lo) as u64)
            }
            2 => {
                let hull = self.delta_vertices();
                // shoelace: 2 * area is an integer
                let mut twice_area = 0i64;
                for i in 0..hull.len() {
                    let (x1, y1) = hull[i];
                    let (x2, y2) = hull[(i + 1) % hull.len()];
                    twice_area += x1 * y2 - x2 * y1;
                }
                Ok(twice_area.unsigned_abs())
            }
            _ => Err(Error::Unsupported("n > 2".into())),
        }
    }

    /// Diagonal test: exactly n non-constant terms spanning an
    /// n-dimensional simplex.
    pub fn is_diagonal(&self) -> bool {
        let nonconst: Vec<&Term> = self
            .terms
            .iter()
            .filter(|t| t.exps.iter().any(|&e| e != 0))
            .collect();
        if nonconst.len() != self.n {
            return false;
        }
        match self.n {
            1 => nonconst[0].exps[0] != 0,
            2 => {
                let (a, b) = (&nonconst[0].exps, &nonconst[1].exps);
                a[0] * b[1] - a[1] * b[0] != 0
            }
            _ => false,
        }
    }

    /// Closed faces of Delta(f) not containing the origin, as vertex index
    /// sets of terms lying on the face.
    pub fn faces_without_origin(&self) -> Vec<Vec<usize>> {
        match self.n {
            1 => {
                let mut out = Vec::new();
                let lo = self.terms.iter().map(|t| t.exps[0]).min().unwrap_or(0);
                let hi = self.terms.iter().map(|t| t.exps[0]).max().unwrap_or(0);
                for endpoint in [lo.min(0), hi.max(0)] {
                    if endpoint != 0 {
                        if let Some(i) = self.terms.iter().position(|t| t.exps[0] == endpoint) {
                            out.push(vec![i]);
                        }
                    }
                }
                out.dedup();
                out
            }
            2 => {
                let hull = self.delta_vertices();
                let mut faces: Vec<Vec<usize>> = Vec::new();
                let k = hull.len();
                let on_segment = |a: (i64, i64), b: (i64, i64), p: (i64, i64)| -> bool {
                    let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
                    if cross != 0 {
                        return false;
                    }
                    let dot = (p.0 - a.0) * (b.0 - a.0) + (p.1 - a.1) * (b.1 - a.1);
                    let len2 = (b.0 - a.0).pow(2) + (b.1 - a.1).pow(2);
                    dot >= 0 && dot <= len2
                };
                // vertices (0at-dimensional faces)
                for &v in &hull {
                    if v == (0, 0) {
                        continue;
                    }
                    let idx: Vec<usize> = self
                        .terms
                        .iter()
                        .enumerate()
                        .filter(|(_, t)| (t.exps[0], t.exps[1]) == v)
                        .map(|(i, _)| i)
                        .collect();
                    if !idx.is_empty() {
                        faces.push(idx);
                    }
                }
                // edges (1-dimensional faces)
                if k >= 2 {
                    for i in 0..k {
                        let a = hull[i];
                        let b = hull[(i + 1) % k];
                        if k == 2 && i == 1 {
                            break; // degenerate hull: single edge
                        }
                        if on_segment(a, b, (0, 0)) {
                            continue;
                        }
                        let idx: Vec<usize> = self
                            .terms
                            .iter()
                            .enumerate()
                            .filter(|(_, t)| on_segment(a, b, (t.exps[0], t.exps[1])))
                            .map(|(i, _)| i)
                            .collect();
                        if !idx.is_empty() {
                            faces.push(idx);
                        }
                    }
                }
                faces
            }
            _ => Vec::new(),
        }
    }

    /// Canonical text form (round-trips through the CLI parser).
    pub fn canonical_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let names = ["x", "y"];
        let mut parts = Vec::new();
        // highest exponents first for readability
        for t in self.terms.iter().rev() {
            let c = self.field.index_of(&t.coeff);
            let mut s = String::new();
            let monomial: Vec<String> = (0..self.n)
                .filter(|&i| t.exps[i] != 0)
                .map(|i| {
                    if t.exps[i] == 1 {
                        names[i].to_string()
                    } else {
                        format!("{}^{}", names[i], t.exps[i])
                    }
                })
                .collect();
            if monomial.is_empty() {
                s.push_str(&c.to_string());
            } else {
                if c != 1 {
                    s.push_str(&format!("{c}*"));
                }
                s.push_str(&monomial.join("*"));
            }
            parts.push(s);
        }
        parts.join("+")
    }
}

/// Convex hull (counterclockwise) of integer points, monotone chain.
pub fn convex_hull(mut pts: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| -> i64 {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::FieldCtx;

    #[test]
    fn duplicate_exponents_merge_and_zeros_drop() {
        let f7 = FieldCtx::new(7, 1).unwrap();
        let f = LaurentPoly::one_var(&[(3, 1), (1, 2), (1, 5)], f7).unwrap();
        // 2x + 5x = 7x = 0 mod 7
        assert_eq!(f.m(), 1);
        assert_eq!(f.terms[0].exps, vec![3]);
    }

    #[test]
    fn degree_and_volume_one_var() {
        let f5 = FieldCtx::new(5, 1).unwrap();
        let f = LaurentPoly::one_var(&[(3, 1), (1, 1)], f5).unwrap();
        assert!(f.is_poly_1var());
        assert_eq!(f.degree_1var().unwrap(), 3);
        assert_eq!(f.nfact_volume().unwrap(), 3);
    }

    #[test]
    fn volume_two_var_example() {
        // x^3 + xy + y^2 over F_11: 2*Area of hull {(0,0),(3,0),(1,1),(0,2)} = 6
        let f11 = FieldCtx::new(11, 1).unwrap();
        let one = f11.one();
        let f = LaurentPoly::new(
            2,
            vec![
                (vec![3, 0], one.clone()),
                (vec![1, 1], one.clone()),
                (vec![0, 2], one.clone()),
            ],
            f11,
        )
        .unwrap();
        assert_eq!(f.nfact_volume().unwrap(), 6);
        assert!(!f.is_diagonal());
    }

    #[test]
    fn diagonal_detection() {
        let f7 = FieldCtx::new(7, 1).unwrap();
        let one = f7.one();
        let f = LaurentPoly::new(
            2,
            vec![(vec![2, 0], one.clone()), (vec![0, 3], one.clone())],
            f7.clone(),
        )
        .unwrap();
        assert!(f.is_diagonal());
        let g = LaurentPoly::one_var(&[(3, 1)], f7).unwrap();
        assert!(g.is_diagonal());
    }

    #[test]
    fn faces_one_var() {
        let f5 = FieldCtx::new(5, 1).unwrap();
        let f = LaurentPoly::one_var(&[(3, 1), (1, 1)], f5).unwrap();
        let faces = f.faces_without_origin();
        // only the leading vertex {3}
        assert_eq!(faces.len(), 1);
        assert_eq!(f.terms[faces[0][0]].exps[0], 3);
    }

    #[test]
    fn canonical_text_examples() {
        let f7 = FieldCtx::new(7, 1).unwrap();
        let f = LaurentPoly::one_var(&[(3, 1), (1, 2)], f7.clone()).unwrap();
        assert_eq!(f.canonical_text(), "x^3+2*x");
        let one = f7.one();
        let g = LaurentPoly::new(
            2,
            vec![
                (vec![3, 0], one.clone()),
                (vec![1, 1], one.clone()),
                (vec![0, 2], one.clone()),
            ],
            f7,
        )
        .unwrap();
        assert_eq!(g.canonical_text(), "x^3+x*y+y^2");
    }
}
