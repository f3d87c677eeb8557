//! Exact lower convex hulls, Newton polygons and Gauss-norm dual graphs.

use std::cell::Cell;
use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{GhostError, Result};
use crate::valuation::{int, Rational, Valuation};

/// Lower convex hull of a point set with integer abscissae.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolygon {
    pub points: Vec<(i64, Valuation)>,
    /// Points where the slope strictly increases, plus both endpoints.
    pub vertices: Vec<(i64, Rational)>,
    /// Points on the hull that are not vertices.
    pub touch_points: Vec<(i64, Rational)>,
    /// Distinct slopes in increasing order with their horizontal lengths.
    pub slopes: Vec<(Rational, u64)>,
}

impl RationalPolygon {
    pub fn vertex_xs(&self) -> Vec<i64> {
        self.vertices.iter().map(|v| v.0).collect()
    }

    pub fn is_vertex(&self, x: i64) -> bool {
        self.vertices.binary_search_by_key(&x, |v| v.0).is_ok()
    }

    pub fn x_extent(&self) -> u64 {
        match (self.vertices.first(), self.vertices.last()) {
            (Some(a), Some(b)) => (b.0 - a.0) as u64,
            _ => 0,
        }
    }

    /// One slope per unit step: entry `i` is the slope over `[x_0 + i, x_0 + i + 1]`.
    pub fn slope_sequence(&self) -> Vec<Rational> {
        self.slopes
            .iter()
            .flat_map(|(s, m)| std::iter::repeat_n(s.clone(), *m as usize))
            .collect()
    }

    fn segment_index(&self, x: i64) -> Option<usize> {
        let first = self.vertices.first()?.0;
        let last = self.vertices.last()?.0;
        if x < first || x > last || self.vertices.len() < 2 {
            return None;
        }
        let i = self.vertices.partition_point(|v| v.0 <= x);
        Some(i.clamp(1, self.vertices.len() - 1) - 1)
    }

    /// Hull ordinate at `x`.
    pub fn value_at(&self, x: i64) -> Option<Rational> {
        if let Ok(i) = self.vertices.binary_search_by_key(&x, |v| v.0) {
            return Some(self.vertices[i].1.clone());
        }
        let i = self.segment_index(x)?;
        let (x0, y0) = &self.vertices[i];
        Some(y0 + self.segment_slope(i) * int(x - x0))
    }

    /// Slope of the hull over `[x, x + 1]`.
    pub fn slope_on(&self, x: i64) -> Option<Rational> {
        let last = self.vertices.last()?.0;
        if x >= last {
            return None;
        }
        self.segment_index(x).map(|i| self.segment_slope(i))
    }

    fn segment_slope(&self, i: usize) -> Rational {
        let (x0, y0) = &self.vertices[i];
        let (x1, y1) = &self.vertices[i + 1];
        (y1 - y0) / int(x1 - x0)
    }
}

/// Monotone-chain lower hull over points sorted by strictly increasing x.
///
/// `turn(o, a, b)` must return the sign of `(a - o) × (b - o)`; collinear points are dropped,
/// so the result contains exactly the vertices.
pub(crate) fn monotone_chain(
    order: &[usize],
    mut turn: impl FnMut(usize, usize, usize) -> Ordering,
) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(order.len());
    for &i in order {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], i) != Ordering::Greater {
            hull.pop();
        }
        hull.push(i);
    }
    hull
}

fn cross_rat(xs: &[i64], ys: &[Rational], o: usize, a: usize, b: usize) -> Ordering {
    let c = int(xs[a] - xs[o]) * (&ys[b] - &ys[o]) - int(xs[b] - xs[o]) * (&ys[a] - &ys[o]);
    c.cmp(&Rational::zero())
}

/// Exact lower hull; points with infinite ordinate impose no constraint and are skipped.
pub fn lower_hull(points: &[(i64, Valuation)]) -> Result<RationalPolygon> {
    if points.is_empty() {
        return Err(GhostError::EmptyInput);
    }
    if points.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(GhostError::DimensionMismatch("abscissae must be strictly increasing".into()));
    }
    let xs: Vec<i64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<Rational> = points
        .iter()
        .map(|p| p.1.finite().cloned().unwrap_or_else(Rational::zero))
        .collect();
    let finite: Vec<usize> = (0..points.len()).filter(|&i| !points[i].1.is_infinite()).collect();
    if finite.is_empty() {
        return Err(GhostError::EmptyInput);
    }
    let hull = monotone_chain(&finite, |o, a, b| cross_rat(&xs, &ys, o, a, b));
    Ok(assemble(points.to_vec(), &xs, &finite, &hull, |o, a, b| cross_rat(&xs, &ys, o, a, b), |i| {
        ys[i].clone()
    }))
}

pub(crate) fn assemble(
    points: Vec<(i64, Valuation)>,
    xs: &[i64],
    finite: &[usize],
    hull: &[usize],
    turn: impl Fn(usize, usize, usize) -> Ordering,
    value: impl Fn(usize) -> Rational,
) -> RationalPolygon {
    let vertices: Vec<(i64, Rational)> = hull.iter().map(|&i| (xs[i], value(i))).collect();
    let mut touch_points = Vec::new();
    let mut seg = 0usize;
    for &i in finite {
        while seg + 1 < hull.len() && xs[hull[seg + 1]] < xs[i] {
            seg += 1;
        }
        if seg + 1 >= hull.len() {
            break;
        }
        let (a, b) = (hull[seg], hull[seg + 1]);
        if xs[i] > xs[a] && xs[i] < xs[b] && turn(a, i, b) == Ordering::Equal {
            touch_points.push((xs[i], value(i)));
        }
    }
    let slopes = vertices
        .windows(2)
        .map(|w| ((&w[1].1 - &w[0].1) / int(w[1].0 - w[0].0), (w[1].0 - w[0].0) as u64))
        .collect();
    RationalPolygon { points, vertices, touch_points, slopes }
}

/// Points `(x_n, y_n + ε d_n)` with integer data; the hull is taken at infinitesimal `ε > 0`
/// (lexicographic order on `(y, d)`). With `d ≡ 0` this is the plain integer hull.
pub(crate) struct ScaledPoints<'a> {
    pub xs: &'a [i64],
    pub ys: &'a [i128],
    pub ds: Option<&'a [i128]>,
}

impl ScaledPoints<'_> {
    fn turn_checked(&self, o: usize, a: usize, b: usize) -> Option<Ordering> {
        let (xa, xb) = ((self.xs[a] - self.xs[o]) as i128, (self.xs[b] - self.xs[o]) as i128);
        let lin = |v: &[i128]| -> Option<i128> {
            xa.checked_mul(v[b].checked_sub(v[o])?)?.checked_sub(xb.checked_mul(v[a].checked_sub(v[o])?)?)
        };
        let c0 = lin(self.ys)?;
        if c0 != 0 {
            return Some(c0.cmp(&0));
        }
        match self.ds {
            Some(ds) => Some(lin(ds)?.cmp(&0)),
            None => Some(Ordering::Equal),
        }
    }

    fn turn_big(&self, o: usize, a: usize, b: usize) -> Ordering {
        let (xa, xb) = (BigInt::from(self.xs[a] - self.xs[o]), BigInt::from(self.xs[b] - self.xs[o]));
        let lin = |v: &[i128]| -> BigInt {
            &xa * (BigInt::from(v[b]) - BigInt::from(v[o])) - &xb * (BigInt::from(v[a]) - BigInt::from(v[o]))
        };
        let c0 = lin(self.ys);
        if !c0.is_zero() {
            return if c0.is_positive() { Ordering::Greater } else { Ordering::Less };
        }
        match self.ds {
            Some(ds) => lin(ds).cmp(&BigInt::zero()),
            None => Ordering::Equal,
        }
    }

    pub fn turn(&self, o: usize, a: usize, b: usize) -> Ordering {
        self.turn_checked(o, a, b).unwrap_or_else(|| self.turn_big(o, a, b))
    }

    pub fn hull(&self, order: &[usize]) -> Vec<usize> {
        let overflow = Cell::new(false);
        let fast = monotone_chain(order, |o, a, b| {
            self.turn_checked(o, a, b).unwrap_or_else(|| {
                overflow.set(true);
                Ordering::Equal
            })
        });
        if overflow.get() {
            monotone_chain(order, |o, a, b| self.turn_big(o, a, b))
        } else {
            fast
        }
    }
}

/// One affine piece `r ↦ intercept + slope · r` of a dual graph on `[r_lo, r_hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualSegment {
    pub r_lo: Rational,
    pub r_hi: Valuation,
    pub slope: i64,
    pub intercept: Valuation,
}

/// `r ↦ ν_r(f) = min_n (v(a_n) + n r)` on `[r_min, ∞)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualGraph {
    pub segments: Vec<DualSegment>,
}

impl DualGraph {
    pub fn value_at(&self, r: &Rational) -> Option<Rational> {
        let seg = self.segments.iter().find(|s| {
            &s.r_lo <= r && Valuation::Finite(r.clone()) <= s.r_hi
        })?;
        Some(seg.intercept.finite()? + int(seg.slope) * r)
    }

    /// Interior joins with the drop in slope across each.
    pub fn breakpoints(&self) -> Vec<(Rational, u64)> {
        self.segments
            .windows(2)
            .map(|w| (w[1].r_lo.clone(), (w[0].slope - w[1].slope) as u64))
            .collect()
    }

    /// The Newton-polygon vertices recovered from the affine pieces.
    pub fn newton_vertices(&self) -> Vec<(i64, Rational)> {
        let mut v: Vec<(i64, Rational)> = self
            .segments
            .iter()
            .filter_map(|s| s.intercept.finite().map(|c| (s.slope, c.clone())))
            .collect();
        v.sort_by_key(|p| p.0);
        v
    }
}

pub fn dual_graph(coefficients: &[(i64, Valuation)], r_min: &Rational) -> Result<DualGraph> {
    let np = lower_hull(coefficients)?;
    let verts = &np.vertices;
    let mut segments = Vec::new();
    // Walking r upward visits the vertices from right to left.
    for i in (0..verts.len()).rev() {
        let lo = if i + 1 < verts.len() {
            Some(-(&verts[i + 1].1 - &verts[i].1) / int(verts[i + 1].0 - verts[i].0))
        } else {
            None
        };
        let hi = if i > 0 {
            Valuation::Finite(-(&verts[i].1 - &verts[i - 1].1) / int(verts[i].0 - verts[i - 1].0))
        } else {
            Valuation::Infinity
        };
        if hi <= Valuation::Finite(r_min.clone()) {
            continue;
        }
        let r_lo = match lo {
            Some(l) if &l > r_min => l,
            _ => r_min.clone(),
        };
        segments.push(DualSegment {
            r_lo,
            r_hi: hi,
            slope: verts[i].0,
            intercept: Valuation::Finite(verts[i].1.clone()),
        });
    }
    Ok(DualGraph { segments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::rat;

    fn pts(v: &[(i64, i64)]) -> Vec<(i64, Valuation)> {
        v.iter().map(|&(x, y)| (x, Valuation::from_int(y))).collect()
    }

    #[test]
    fn convex_input_keeps_all_vertices() {
        let p = lower_hull(&pts(&[(0, 17), (1, 19), (2, 25), (3, 34)])).unwrap();
        assert_eq!(p.vertex_xs(), vec![0, 1, 2, 3]);
        let origin = lower_hull(&pts(&[(0, 0), (1, 19), (2, 25), (3, 34)])).unwrap();
        assert_eq!(origin.vertex_xs(), vec![0, 3]);
    }

    #[test]
    fn hull_drops_points_above() {
        let p = lower_hull(&pts(&[(0, 0), (1, 5), (2, 6)])).unwrap();
        assert_eq!(p.vertex_xs(), vec![0, 2]);
        assert!(p.touch_points.is_empty());
        assert_eq!(p.slopes, vec![(int(3), 2)]);
        assert_eq!(p.value_at(1), Some(int(3)));
    }

    #[test]
    fn touch_points_and_singletons() {
        let p = lower_hull(&pts(&[(0, 0), (1, 1), (2, 2), (3, 5)])).unwrap();
        assert_eq!(p.vertex_xs(), vec![0, 2, 3]);
        assert_eq!(p.touch_points, vec![(1, int(1))]);
        let single = lower_hull(&pts(&[(4, 7)])).unwrap();
        assert!(single.slopes.is_empty());
        assert!(lower_hull(&[]).is_err());
        assert!(lower_hull(&[(0, Valuation::Infinity)]).is_err());
    }

    #[test]
    fn infinite_points_are_ignored() {
        let p = lower_hull(&[(0, Valuation::zero()), (1, Valuation::Infinity), (2, Valuation::from_int(4))]).unwrap();
        assert_eq!(p.slopes, vec![(int(2), 2)]);
    }

    #[test]
    fn dual_graph_of_small_series() {
        let f = pts(&[(0, 0), (1, 2), (2, 6)]);
        let g = dual_graph(&f, &int(-100)).unwrap();
        assert_eq!(g.value_at(&int(1)), Some(int(0)));
        assert_eq!(g.breakpoints(), vec![(int(-4), 1), (int(-2), 1)]);
        let reversed = pts(&[(0, 6), (1, 2), (2, 0)]);
        let h = dual_graph(&reversed, &int(0)).unwrap();
        assert_eq!(h.breakpoints(), vec![(int(2), 1), (int(4), 1)]);
        assert_eq!(h.newton_vertices(), vec![(0, int(6)), (1, int(2)), (2, int(0))]);
    }

    #[test]
    fn single_slope_duality() {
        let f = pts(&[(0, 9), (3, 0)]);
        let g = dual_graph(&f, &int(0)).unwrap();
        assert_eq!(g.breakpoints(), vec![(int(3), 3)]);
        assert_eq!(g.value_at(&rat(1, 2)), Some(rat(3, 2)));
    }

    #[test]
    fn scaled_hull_lexicographic() {
        // at ε = 0 the middle point is collinear; a positive derivative lifts it off the hull
        let xs = [0, 1, 2];
        let ys = [0i128, 1, 2];
        let up = [0i128, 1, 0];
        let down = [0i128, -1, 0];
        let order = [0, 1, 2];
        assert_eq!(ScaledPoints { xs: &xs, ys: &ys, ds: Some(&up) }.hull(&order), vec![0, 2]);
        assert_eq!(ScaledPoints { xs: &xs, ys: &ys, ds: Some(&down) }.hull(&order), vec![0, 1, 2]);
    }
}
