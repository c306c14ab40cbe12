use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use super::CutError;
use crate::rational::{orient, q_frac, Point2, Q};
use crate::scheme::PlanarPolygon;

/// A simple polyline with exact coordinates. The first point is the base
/// point. A closed curve either repeats its first point at the end or ends
/// on a boundary point identified with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    points: Vec<Point2>,
    closed: bool,
}

impl Curve {
    pub fn new(points: Vec<Point2>, closed: bool) -> Result<Self, CutError> {
        if points.len() < 2 {
            return Err(CutError::CurveTooShort);
        }
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(CutError::CurveTooShort);
        }
        let c = Curve { points, closed };
        if !c.is_simple() {
            return Err(CutError::CurveSelfIntersects);
        }
        Ok(c)
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// True when the first and last points coincide.
    pub fn returns_to_start(&self) -> bool {
        self.points.first() == self.points.last()
    }

    pub fn base_point(&self) -> &Point2 {
        &self.points[0]
    }

    fn is_simple(&self) -> bool {
        let p = &self.points;
        let m = p.len() - 1;
        let looped = self.returns_to_start();
        if looped && m < 3 {
            return false;
        }
        for i in 0..m {
            for j in i + 1..m {
                let adjacent = j == i + 1 || (looped && i == 0 && j == m - 1);
                let (a, b, c, d) = (&p[i], &p[i + 1], &p[j], &p[j + 1]);
                if adjacent {
                    // Shared corner only: no fold back along the other piece.
                    let (shared, far_i, far_j) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                    if orient(far_i, shared, far_j) == Ordering::Equal
                        && (far_i - shared).dot(&(far_j - shared)).is_positive()
                    {
                        return false;
                    }
                    continue;
                }
                if crate::rational::segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }
}

fn locate(p: &PlanarPolygon, pts: &[Point2], x: &Point2) -> bool {
    p.oriented_triangles()
        .iter()
        .any(|t| (0..3).all(|k| orient(&pts[t[k]], &pts[t[(k + 1) % 3]], x) != Ordering::Less))
}

/// Replaces every stretch of the curve that runs along an edge by a small
/// detour into a triangle next to that edge. A curve that already meets
/// every edge in finitely many points is returned unchanged.
pub fn transversalize(curve: &Curve, p: &PlanarPolygon) -> Result<Curve, CutError> {
    let pts = p.coords().ok_or(CutError::NoCoordinates)?;
    if !curve.points.iter().all(|x| locate(p, pts, x)) {
        return Err(CutError::CurveNotInPolygon);
    }
    let c = p.complex();
    // Overlaps per segment: (lo, hi, edge).
    let mut overlaps: Vec<Vec<(Q, Q, usize)>> = Vec::new();
    for w in curve.points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let d = b - a;
        let len2 = d.norm2();
        let mut found = Vec::new();
        for (e, &[u, v]) in c.edges().iter().enumerate() {
            if orient(a, b, &pts[u]) != Ordering::Equal || orient(a, b, &pts[v]) != Ordering::Equal
            {
                continue;
            }
            let su = (&pts[u] - a).dot(&d) / &len2;
            let sv = (&pts[v] - a).dot(&d) / &len2;
            let (mut lo, mut hi) = if su < sv { (su, sv) } else { (sv, su) };
            if lo < Q::zero() {
                lo = Q::zero();
            }
            if hi > Q::one() {
                hi = Q::one();
            }
            if lo < hi {
                found.push((lo, hi, e));
            }
        }
        found.sort();
        overlaps.push(found);
    }
    if overlaps.iter().all(|o| o.is_empty()) {
        return Ok(curve.clone());
    }
    let mut eps = q_frac(1, 4);
    for _ in 0..24 {
        for side in 0..2 {
            let mut out: Vec<Point2> = vec![curve.points[0].clone()];
            let push = |out: &mut Vec<Point2>, x: Point2| {
                if out.last() != Some(&x) {
                    out.push(x);
                }
            };
            for (i, w) in curve.points.windows(2).enumerate() {
                let (a, b) = (&w[0], &w[1]);
                for (lo, hi, e) in &overlaps[i] {
                    let s = a.lerp(b, lo);
                    let t = a.lerp(b, hi);
                    let mid = s.midpoint(&t);
                    let ts = c.edge_triangles(*e);
                    let tri = ts[side.min(ts.len() - 1)];
                    let [x, y] = c.edge(*e);
                    let opp = *c
                        .triangle(tri)
                        .v
                        .iter()
                        .find(|&&z| z != x && z != y)
                        .expect("corner");
                    let dpt = mid.lerp(&pts[opp], &eps);
                    push(&mut out, s);
                    push(&mut out, dpt);
                    push(&mut out, t);
                }
                push(&mut out, b.clone());
            }
            if let Ok(nc) = Curve::new(out, curve.closed) {
                return Ok(nc);
            }
        }
        eps /= Q::from_integer(4.into());
    }
    Err(CutError::CurveSelfIntersects)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex;
    use crate::scheme::IdentificationScheme;

    fn pt(x: i64, y: i64) -> Point2 {
        Point2::from_ints(x, y)
    }

    fn square() -> PlanarPolygon {
        let c = Complex::from_triangles(4, &[[0, 1, 2], [0, 2, 3]]).unwrap();
        let coords = vec![pt(0, 0), pt(4, 0), pt(4, 4), pt(0, 4)];
        PlanarPolygon::new(c, Some(coords), IdentificationScheme::trivial()).unwrap()
    }

    #[test]
    fn rejects_self_intersections() {
        let bow = vec![pt(0, 0), pt(2, 2), pt(2, 0), pt(0, 2)];
        assert_eq!(Curve::new(bow, false), Err(CutError::CurveSelfIntersects));
        let back = vec![pt(0, 0), pt(2, 0), pt(1, 0)];
        assert_eq!(Curve::new(back, false), Err(CutError::CurveSelfIntersects));
        let tri = vec![pt(0, 0), pt(2, 0), pt(1, 1), pt(0, 0)];
        assert!(Curve::new(tri, true).unwrap().returns_to_start());
    }

    #[test]
    fn transversal_curve_is_a_fixed_point() {
        let p = square();
        let c = Curve::new(vec![pt(1, 0), pt(3, 4)], false).unwrap();
        assert_eq!(transversalize(&c, &p).unwrap(), c);
    }

    #[test]
    fn diagonal_overlap_is_nudged_off() {
        let p = square();
        let c = Curve::new(vec![pt(0, 1), pt(1, 1), pt(3, 3), pt(4, 3)], false).unwrap();
        let t = transversalize(&c, &p).unwrap();
        assert_eq!(t.points().len(), 5);
        for w in t.points().windows(2) {
            let on_diag = orient(&pt(0, 0), &pt(4, 4), &w[0]) == Ordering::Equal
                && orient(&pt(0, 0), &pt(4, 4), &w[1]) == Ordering::Equal;
            assert!(!on_diag);
        }
    }

    #[test]
    fn outside_points_are_rejected() {
        let p = square();
        let c = Curve::new(vec![pt(1, 1), pt(5, 1)], false).unwrap();
        assert_eq!(transversalize(&c, &p), Err(CutError::CurveNotInPolygon));
    }
}
