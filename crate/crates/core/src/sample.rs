//! Random triangulated convex polygons and curves for property tests and
//! benchmarks.

use std::collections::HashMap;

use rand::Rng;

use crate::complex::Complex;
use crate::cutter::Curve;
use crate::rational::{q, Point2};
use crate::scheme::{IdentificationScheme, PlanarPolygon};

type P = (i64, i64);

fn orient(a: P, b: P, c: P) -> i64 {
    ((b.0 - a.0) as i128 * (c.1 - a.1) as i128 - (b.1 - a.1) as i128 * (c.0 - a.0) as i128).signum()
        as i64
}

/// Strict convex hull, counterclockwise, collinear points dropped.
fn hull(pts: &[P]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by_key(|&i| pts[i]);
    if idx.len() < 3 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && orient(
                pts[lower[lower.len() - 2]],
                pts[lower[lower.len() - 1]],
                pts[i],
            ) <= 0
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && orient(
                pts[upper[upper.len() - 2]],
                pts[upper[upper.len() - 1]],
                pts[i],
            ) <= 0
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// A random triangulation of a random convex polygon with about
/// `n_vertices` vertices, integer coordinates in `[-range, range]`.
pub fn random_convex_polygon<R: Rng>(rng: &mut R, n_vertices: usize, range: i64) -> PlanarPolygon {
    loop {
        if let Some(p) = try_random_polygon(rng, n_vertices.max(3), range) {
            return p;
        }
    }
}

fn try_random_polygon<R: Rng>(rng: &mut R, n: usize, range: i64) -> Option<PlanarPolygon> {
    let mut seen = std::collections::HashSet::new();
    let mut raw: Vec<P> = Vec::new();
    let mut attempts = 0;
    while raw.len() < n && attempts < 100 * n {
        attempts += 1;
        let p = (rng.gen_range(-range..=range), rng.gen_range(-range..=range));
        if seen.insert(p) {
            raw.push(p);
        }
    }
    let h = hull(&raw);
    if h.len() < 3 {
        return None;
    }
    let hull_pts: Vec<P> = h.iter().map(|&i| raw[i]).collect();
    let m = hull_pts.len();
    // Keep only points strictly inside the hull.
    let mut inner: Vec<P> = Vec::new();
    for (i, &p) in raw.iter().enumerate() {
        if h.contains(&i) {
            continue;
        }
        if (0..m).all(|k| orient(hull_pts[k], hull_pts[(k + 1) % m], p) > 0) {
            inner.push(p);
        }
    }
    let mut pts = hull_pts.clone();
    let mut tris: Vec<[usize; 3]> = (1..m - 1).map(|k| [0, k, k + 1]).collect();
    for p in inner {
        let id = pts.len();
        pts.push(p);
        insert_point(&pts, &mut tris, id);
    }
    let flips = rng.gen_range(0..=2 * tris.len());
    random_flips(rng, &pts, &mut tris, flips);
    let complex = Complex::from_triangles(pts.len(), &tris).ok()?;
    let coords = pts.iter().map(|&(x, y)| Point2::from_ints(x, y)).collect();
    PlanarPolygon::new(complex, Some(coords), IdentificationScheme::trivial()).ok()
}

fn insert_point(pts: &[P], tris: &mut Vec<[usize; 3]>, id: usize) {
    let p = pts[id];
    for t in 0..tris.len() {
        let [a, b, c] = tris[t];
        let o = [
            orient(pts[a], pts[b], p),
            orient(pts[b], pts[c], p),
            orient(pts[c], pts[a], p),
        ];
        if o.iter().any(|&x| x < 0) {
            continue;
        }
        match o.iter().position(|&x| x == 0) {
            None => {
                tris[t] = [a, b, id];
                tris.push([b, c, id]);
                tris.push([c, a, id]);
            }
            Some(k) => {
                // On side k of t; split t and its neighbour across that side.
                let v = [a, b, c];
                let (x, y, z) = (v[k], v[(k + 1) % 3], v[(k + 2) % 3]);
                tris[t] = [x, id, z];
                tris.push([id, y, z]);
                if let Some(u) = (0..tris.len()).find(|&u| {
                    let w = tris[u];
                    (0..3).any(|j| w[j] == y && w[(j + 1) % 3] == x)
                }) {
                    let w = tris[u];
                    let j = (0..3)
                        .find(|&j| w[j] == y && w[(j + 1) % 3] == x)
                        .expect("side");
                    let opp = w[(j + 2) % 3];
                    tris[u] = [y, id, opp];
                    tris.push([id, x, opp]);
                }
            }
        }
        return;
    }
}

/// Flips `count` random interior edges, skipping those whose quadrilateral
/// is not strictly convex.
fn random_flips<R: Rng>(rng: &mut R, pts: &[P], tris: &mut [[usize; 3]], count: usize) {
    let mut sides: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for (t, w) in tris.iter().enumerate() {
        for j in 0..3 {
            sides.insert((w[j], w[(j + 1) % 3]), (t, j));
        }
    }
    let mut interior: Vec<(usize, usize)> = sides
        .keys()
        .filter(|&&(a, b)| a < b && sides.contains_key(&(b, a)))
        .copied()
        .collect();
    interior.sort_unstable();
    if interior.is_empty() {
        return;
    }
    for _ in 0..count {
        let k = rng.gen_range(0..interior.len());
        let (a, b) = interior[k];
        let (t1, j1) = sides[&(a, b)];
        let (t2, j2) = sides[&(b, a)];
        let c = tris[t1][(j1 + 2) % 3];
        let d = tris[t2][(j2 + 2) % 3];
        // Triangles (a,b,c) and (b,a,d) become (a,d,c) and (b,c,d).
        if orient(pts[c], pts[d], pts[a]) * orient(pts[c], pts[d], pts[b]) < 0
            && orient(pts[a], pts[b], pts[c]) * orient(pts[a], pts[b], pts[d]) < 0
        {
            for w in [tris[t1], tris[t2]] {
                for j in 0..3 {
                    sides.remove(&(w[j], w[(j + 1) % 3]));
                }
            }
            tris[t1] = [a, d, c];
            tris[t2] = [b, c, d];
            for t in [t1, t2] {
                let w = tris[t];
                for j in 0..3 {
                    sides.insert((w[j], w[(j + 1) % 3]), (t, j));
                }
            }
            interior[k] = (c.min(d), c.max(d));
        }
    }
}

/// A random simple polyline in `p` through `n_points` points (plus the
/// repeated base point when `closed`). Points are rational barycentric
/// combinations of triangle corners with small weights, so they often land
/// on edges and vertices. With `interior`, every point lies strictly inside
/// a triangle.
pub fn random_curve<R: Rng>(
    rng: &mut R,
    p: &PlanarPolygon,
    n_points: usize,
    closed: bool,
    interior: bool,
) -> Option<Curve> {
    let pts = p.coords()?;
    let tris = p.oriented_triangles();
    let lo = if interior { 1 } else { 0 };
    for _ in 0..200 {
        let mut out: Vec<Point2> = Vec::new();
        for _ in 0..n_points.max(2) {
            let t = tris[rng.gen_range(0..tris.len())];
            let w: [i64; 3] = loop {
                let w = [
                    rng.gen_range(lo..=3),
                    rng.gen_range(lo..=3),
                    rng.gen_range(lo..=3),
                ];
                if w.iter().sum::<i64>() > 0 {
                    break w;
                }
            };
            let total = q(w.iter().sum());
            let mut x = Point2::new(q(0), q(0));
            for k in 0..3 {
                x = &x + &pts[t[k]].scale(&(q(w[k]) / &total));
            }
            out.push(x);
        }
        if closed {
            out.push(out[0].clone());
        } else if out.first() == out.last() {
            continue;
        }
        if let Ok(c) = Curve::new(out, closed) {
            return Some(c);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_polygons_are_embedded_discs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..40 {
            let p = random_convex_polygon(&mut rng, 4 + i * 3, 50);
            assert_eq!(p.complex().euler_characteristic(), 1);
            p.check_embedding().unwrap();
        }
    }
}
