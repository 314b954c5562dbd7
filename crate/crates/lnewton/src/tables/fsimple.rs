//! f-simple permutations: a permutation is f-simple when its centralizer in
//! the fiber-preserving subgroup G_f is trivial. Non-f-simple permutations
//! cancel in even/odd pairs inside q-stable sets, which is what makes the
//! minimal-weight table sums well defined.

use crate::error::{Error, Result};

/// Permutation of {0, .., n-1} in one-line form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(pub Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation((0..n).collect())
    }

    pub fn new(v: Vec<usize>) -> Result<Permutation> {
        let n = v.len();
        let mut seen = vec![false; n];
        for &x in &v {
            if x >= n || seen[x] {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            seen[x] = true;
        }
        Ok(Permutation(v))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// Composition self * other (apply other first).
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut v = vec![0; self.n()];
        for (i, &x) in self.0.iter().enumerate() {
            v[x] = i;
        }
        Permutation(v)
    }

    /// Disjoint cycles, each starting at its smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut cur = self.0[start];
            while cur != start {
                seen[cur] = true;
                cyc.push(cur);
                cur = self.0[cur];
            }
            out.push(cyc);
        }
        out
    }

    pub fn is_even(&self) -> bool {
        let n = self.n();
        let cycles = self.cycles().len();
        (n - cycles) % 2 == 0
    }
}

/// Label map f on {0, .., n-1}; fibers determine G_f.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FMap(pub Vec<u32>);

impl FMap {
    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// Fibers of f as sorted index lists.
    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut map: std::collections::BTreeMap<u32, Vec<usize>> = Default::default();
        for (i, &l) in self.0.iter().enumerate() {
            map.entry(l).or_default().push(i);
        }
        map.into_values().collect()
    }

    /// |G_f| = product of fiber factorials.
    pub fn gf_order(&self) -> u128 {
        self.fibers()
            .iter()
            .map(|f| (1..=f.len() as u128).product::<u128>())
            .product()
    }

    pub fn preserved_by(&self, sigma: &Permutation) -> bool {
        (0..self.n()).all(|i| self.0[sigma.apply(i)] == self.0[i])
    }
}

/// Enumerate G_f (all permutations preserving the fibers of f).
pub fn enumerate_gf(f: &FMap) -> Vec<Permutation> {
    let fibers = f.fibers();
    // per-fiber permutations composed into one-line form
    fn perms_of(v: &[usize]) -> Vec<Vec<usize>> {
        if v.len() <= 1 {
            return vec![v.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..v.len() {
            let mut rest = v.to_vec();
            let x = rest.remove(i);
            for mut tail in perms_of(&rest) {
                tail.insert(0, x);
                out.push(tail);
            }
        }
        out
    }
    let mut acc: Vec<Vec<usize>> = vec![(0..f.n()).collect()];
    for fiber in &fibers {
        let images = perms_of(fiber);
        let mut next = Vec::with_capacity(acc.len() * images.len());
        for base in &acc {
            for img in &images {
                let mut v = base.clone();
                for (pos, &target) in fiber.iter().zip(img) {
                    v[*pos] = target;
                }
                next.push(v);
            }
        }
        acc = next;
    }
    acc.into_iter().map(Permutation).collect()
}

/// Brute-force f-simplicity: no non-identity element of G_f commutes with a.
pub fn is_f_simple_brute(a: &Permutation, f: &FMap, budget: u128) -> Result<bool> {
    if f.gf_order() > budget {
        return Err(Error::SizeExceeded(format!(
            "|G_f| = {} exceeds the brute-force budget",
            f.gf_order()
        )));
    }
    let id = Permutation::identity(a.n());
    for sigma in enumerate_gf(f) {
        if sigma == id {
            continue;
        }
        if sigma.compose(a) == a.compose(&sigma) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Cycle-structure fast path: a is NOT f-simple exactly when (i) some cycle
/// of a has a proper period d < len with f constant along the d-shift, or
/// (ii) two distinct cycles of equal length admit a rotation aligning their
/// f-values.
pub fn is_f_simple(a: &Permutation, f: &FMap) -> Result<bool> {
    if a.n() != f.n() {
        return Err(Error::InvalidArgument(
            "permutation and label map sizes differ".into(),
        ));
    }
    if a.n() > 9 {
        return Err(Error::SizeExceeded("n > 9".into()));
    }
    let cycles = a.cycles();
    // obstruction (i): internal period
    for cyc in &cycles {
        let m = cyc.len();
        for d in 1..m {
            if m % d != 0 {
                continue;
            }
            if (0..m).all(|t| f.0[cyc[t]] == f.0[cyc[t % d]]) {
                return Ok(false);
            }
        }
    }
    // obstruction (ii): two cycles of equal length with matching f-values
    // under some rotation
    for (i, ci) in cycles.iter().enumerate() {
        for cj in cycles.iter().skip(i + 1) {
            if ci.len() != cj.len() {
                continue;
            }
            let m = ci.len();
            for shift in 0..m {
                if (0..m).all(|t| f.0[ci[t]] == f.0[cj[(t + shift) % m]]) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone)]
pub struct ParityReport {
    pub even_non_simple: u64,
    pub odd_non_simple: u64,
    pub equal: bool,
    /// Conjugacy-class parity counts over the f-simple elements (the
    /// follow-up statement), present when G is conjugation-closed.
    pub class_counts: Option<(u64, u64)>,
}

/// Parity cancellation: in a set G with sigma G = G for all sigma in G_f,
/// even and odd non-f-simple permutations are equinumerous (spec op
/// `parity_cancellation_check`).
pub fn parity_cancellation_check(g: &[Permutation], f: &FMap) -> Result<ParityReport> {
    if g.is_empty() {
        return Ok(ParityReport {
            even_non_simple: 0,
            odd_non_simple: 0,
            equal: true,
            class_counts: None,
        });
    }
    let n = g[0].n();
    if n > 8 {
        return Err(Error::SizeExceeded("n > 8".into()));
    }
    let gf = enumerate_gf(f);
    let gset: std::collections::BTreeSet<&Permutation> = g.iter().collect();
    // hypothesis: sigma G = G for all sigma in G_f
    for sigma in &gf {
        for tau in g {
            if !gset.contains(&sigma.compose(tau)) {
                return Err(Error::HypothesisFailed(
                    "G is not stable under left multiplication by G_f".into(),
                ));
            }
        }
    }
    let mut even = 0u64;
    let mut odd = 0u64;
    for tau in g {
        if !is_f_simple(tau, f)? {
            if tau.is_even() {
                even += 1;
            } else {
                odd += 1;
            }
        }
    }
    if even != odd {
        return Err(Error::IdentityViolation(format!(
            "parity counts differ: {even} even vs {odd} odd non-f-simple permutations"
        )));
    }
    // follow-up: conjugate-class parity over f-simple elements, when G is
    // closed under G_f-conjugation and globally parity-balanced
    let conj_closed = gf.iter().all(|s| {
        let si = s.inverse();
        g.iter()
            .all(|t| gset.contains(&s.compose(t).compose(&si)))
    });
    let balanced = {
        let evens = g.iter().filter(|t| t.is_even()).count();
        2 * evens == g.len()
    };
    let class_counts = if conj_closed && balanced {
        let mut seen: std::collections::BTreeSet<Permutation> = Default::default();
        let mut even_classes = 0u64;
        let mut odd_classes = 0u64;
        for tau in g {
            if seen.contains(tau) || !is_f_simple(tau, f)? {
                continue;
            }
            let mut class = Vec::new();
            for s in &gf {
                class.push(s.compose(tau).compose(&s.inverse()));
            }
            class.sort();
            class.dedup();
            for c in &class {
                seen.insert(c.clone());
            }
            if tau.is_even() {
                even_classes += 1;
            } else {
                odd_classes += 1;
            }
        }
        if even_classes != odd_classes {
            return Err(Error::IdentityViolation(format!(
                "f-simple conjugate class parity differs: {even_classes} vs {odd_classes}"
            )));
        }
        Some((even_classes, odd_classes))
    } else {
        None
    };
    Ok(ParityReport {
        even_non_simple: even,
        odd_non_simple: odd,
        equal: true,
        class_counts,
    })
}

/// All n! permutations (n small).
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Permutation>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(Permutation(prefix.clone()));
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn injective_f_makes_everything_simple() {
        let f = FMap(vec![0, 1, 2, 3, 4]);
        for a in all_permutations(5) {
            assert!(is_f_simple(&a, &f).unwrap());
        }
    }

    #[test]
    fn constant_f_has_no_simple_permutations_beyond_n1() {
        // For constant f and n >= 2 the centralizer of any a inside
        // G_f = S_n is nontrivial (even for a = id), so nothing is
        // f-simple; this is what makes the parity counts balance.
        let f = FMap(vec![0, 0, 0, 0]);
        for a in all_permutations(4) {
            assert!(!is_f_simple(&a, &f).unwrap());
            assert!(!is_f_simple_brute(&a, &f, 1 << 20).unwrap());
        }
        let f1 = FMap(vec![0]);
        assert!(is_f_simple(&Permutation::identity(1), &f1).unwrap());
    }

    #[test]
    fn fast_path_matches_brute_force() {
        // n = 7, fibers {0..3} and {4..6}: G_f ≅ S_4 x S_3
        let f = FMap(vec![0, 0, 0, 0, 1, 1, 1]);
        let a = Permutation::new(vec![1, 2, 3, 0, 5, 6, 4]).unwrap();
        assert_eq!(
            is_f_simple(&a, &f).unwrap(),
            is_f_simple_brute(&a, &f, 1 << 20).unwrap()
        );
        // exhaustive agreement on a smaller case
        let f = FMap(vec![0, 0, 1, 1, 2]);
        for a in all_permutations(5) {
            assert_eq!(
                is_f_simple(&a, &f).unwrap(),
                is_f_simple_brute(&a, &f, 1 << 20).unwrap(),
                "disagreement at {a:?}"
            );
        }
    }

    #[test]
    fn parity_cancellation_on_sn() {
        for n in 2..=5usize {
            // constant map: everything except id is non-f-simple
            let f = FMap(vec![0; n]);
            let g = all_permutations(n);
            let rep = parity_cancellation_check(&g, &f).unwrap();
            assert!(rep.equal);
            let total: u64 = rep.even_non_simple + rep.odd_non_simple;
            // the non-f-simple elements are everything except the identity...
            // which only balances because the identity is even and the counts
            // exclude it; verify against direct enumeration
            let direct = g
                .iter()
                .filter(|a| !is_f_simple(a, &f).unwrap())
                .count() as u64;
            assert_eq!(total, direct);
        }
    }

    #[test]
    fn parity_cancellation_mixed_fibers() {
        let f = FMap(vec![0, 0, 1, 1]);
        let g = all_permutations(4);
        let rep = parity_cancellation_check(&g, &f).unwrap();
        assert!(rep.equal);
        assert!(rep.class_counts.is_some());
    }

    #[test]
    fn vacuous_pass_on_identity_set() {
        let f = FMap(vec![0, 0, 0]);
        // G = {id} is not G_f-stable unless G_f = {id}; use injective f
        let fi = FMap(vec![0, 1, 2]);
        let g = vec![Permutation::identity(3)];
        let rep = parity_cancellation_check(&g, &fi).unwrap();
        assert_eq!(rep.even_non_simple, 0);
        let _ = f;
    }

    #[test]
    fn hypothesis_violation_detected() {
        let f = FMap(vec![0, 0]);
        let g = vec![Permutation::identity(2)];
        assert!(matches!(
            parity_cancellation_check(&g, &f),
            Err(Error::HypothesisFailed(_))
        ));
    }

    #[test]
    fn subgroup_product_case() {
        // G built like the u-value stabilizer: S_2 x S_2 inside S_4 with
        // f labeling the two blocks
        let f = FMap(vec![0, 0, 1, 1]);
        let mut g = Vec::new();
        for a in all_permutations(4) {
            // keep permutations preserving {0,1} and {2,3}
            if a.apply(0) < 2 && a.apply(1) < 2 {
                g.push(a);
            }
        }
        let rep = parity_cancellation_check(&g, &f).unwrap();
        assert!(rep.equal);
    }
}
