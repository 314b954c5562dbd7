//! Newton polygons: exact lower convex hulls of (s, ord c_s) points with
//! rational valuations, and the derived slope multiset.

use num::BigInt;
use num::{One, Zero};

use crate::cyclotomic::Rat;
use crate::error::{Error, Result};

/// Lower convex hull with strictly increasing integer x-coordinates and
/// exact rational heights; consecutive slopes are non-decreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, Rat)>,
    /// (slope, horizontal multiplicity) pairs in increasing slope order.
    pub slopes: Vec<(Rat, usize)>,
}

/// Lower convex hull of the points (s, vals[s]); entries of `vals` that are
/// `None` (infinite valuation, i.e. zero coefficients) are skipped.
pub fn newton_polygon(vals: &[Option<Rat>]) -> Result<NewtonPolygon> {
    let pts: Vec<(usize, Rat)> = vals
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.clone().map(|y| (i, y)))
        .collect();
    if pts.is_empty() {
        return Err(Error::EmptyInput);
    }
    // monotone chain, keeping only the lower hull
    let mut hull: Vec<(usize, Rat)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            // cross product (b - a) x (p - b) <= 0 means b is not a strict
            // lower-hull vertex
            let lhs = (&b.1 - &a.1) * Rat::from_integer(BigInt::from(p.0 - b.0));
            let rhs = (&p.1 - &b.1) * Rat::from_integer(BigInt::from(b.0 - a.0));
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut slopes = Vec::new();
    for w in hull.windows(2) {
        let dx = w[1].0 - w[0].0;
        let slope = (&w[1].1 - &w[0].1) / Rat::from_integer(BigInt::from(dx));
        slopes.push((slope, dx));
    }
    Ok(NewtonPolygon {
        vertices: hull,
        slopes,
    })
}

impl NewtonPolygon {
    /// Construct directly from a sorted slope multiset (used by the
    /// closed-form modules); the polygon starts at (0, 0).
    pub fn from_slopes(slopes: &[Rat]) -> NewtonPolygon {
        let mut vertices = vec![(0usize, Rat::zero())];
        let mut grouped: Vec<(Rat, usize)> = Vec::new();
        for s in slopes {
            match grouped.last_mut() {
                Some((g, m)) if g == s => *m += 1,
                _ => grouped.push((s.clone(), 1)),
            }
        }
        let mut x = 0usize;
        let mut y = Rat::zero();
        for (s, m) in &grouped {
            x += m;
            y = &y + &(s * Rat::from_integer(BigInt::from(*m)));
            vertices.push((x, y.clone()));
        }
        NewtonPolygon {
            vertices,
            slopes: grouped,
        }
    }

    /// Slopes expanded with multiplicity (one entry per unit of horizontal
    /// length).
    pub fn slope_multiset(&self) -> Vec<Rat> {
        let mut out = Vec::new();
        for (s, m) in &self.slopes {
            for _ in 0..*m {
                out.push(s.clone());
            }
        }
        out
    }

    /// Horizontal extent.
    pub fn width(&self) -> usize {
        self.vertices.last().map(|v| v.0).unwrap_or(0) - self.vertices.first().map(|v| v.0).unwrap_or(0)
    }

    /// Slopes strictly below `bound`, expanded with multiplicity.
    pub fn slopes_below(&self, bound: &Rat) -> Vec<Rat> {
        self.slope_multiset()
            .into_iter()
            .filter(|s| s < bound)
            .collect()
    }

    /// Symmetry check: the slope multiset is invariant under s -> 1 - s.
    pub fn is_symmetric(&self) -> bool {
        let mut a = self.slope_multiset();
        let one = Rat::one();
        let mut b: Vec<Rat> = a.iter().map(|s| &one - s).collect();
        a.sort();
        b.sort();
        a == b
    }

    pub fn slope_sum(&self) -> Rat {
        let mut acc = Rat::zero();
        for (s, m) in &self.slopes {
            acc = acc + s * Rat::from_integer(BigInt::from(*m));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::rat;

    fn some(v: Rat) -> Option<Rat> {
        Some(v)
    }

    #[test]
    fn two_zero_valuations_give_slope_zero() {
        let np = newton_polygon(&[some(rat(0, 1)), some(rat(0, 1))]).unwrap();
        assert_eq!(np.slope_multiset(), vec![rat(0, 1)]);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(newton_polygon(&[]), Err(Error::EmptyInput)));
        assert!(matches!(newton_polygon(&[None, None]), Err(Error::EmptyInput)));
    }

    #[test]
    fn infinite_points_are_skipped() {
        let np = newton_polygon(&[some(rat(0, 1)), None, some(rat(1, 1))]).unwrap();
        assert_eq!(np.slope_multiset(), vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn above_hull_points_do_not_create_vertices() {
        // (1, 10) lies far above the hull from (0,0) to (2,1)
        let np = newton_polygon(&[some(rat(0, 1)), some(rat(10, 1)), some(rat(1, 1))]).unwrap();
        assert_eq!(np.vertices.len(), 2);
        assert_eq!(np.slope_multiset(), vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn collinear_points_merge_into_one_edge() {
        let np = newton_polygon(&[
            some(rat(0, 1)),
            some(rat(1, 3)),
            some(rat(2, 3)),
            some(rat(1, 1)),
        ])
        .unwrap();
        assert_eq!(np.vertices.len(), 2);
        assert_eq!(np.slopes, vec![(rat(1, 3), 3)]);
    }

    #[test]
    fn symmetric_and_sum() {
        let np = NewtonPolygon::from_slopes(&[rat(1, 4), rat(1, 2), rat(1, 2), rat(3, 4)]);
        assert!(np.is_symmetric());
        assert_eq!(np.slope_sum(), rat(2, 1));
        assert_eq!(np.width(), 4);
        assert_eq!(np.slopes_below(&rat(1, 2)), vec![rat(1, 4)]);
    }
}
