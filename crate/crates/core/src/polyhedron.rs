//! Convex polyhedra with exact rational vertices, the angle-sum check and
//! the central projection that turns a polyhedron minus one face into a
//! triangulated polygon.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Sub};

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::complex::Complex;
use crate::rational::{q, to_f64, Point2, Q};
use crate::scheme::{IdentificationScheme, PlanarPolygon};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point3 {
    pub x: Q,
    pub y: Q,
    pub z: Q,
}

impl Point3 {
    pub fn new(x: Q, y: Q, z: Q) -> Self {
        Point3 { x, y, z }
    }

    pub fn from_ints(x: i64, y: i64, z: i64) -> Self {
        Point3::new(q(x), q(y), q(z))
    }

    pub fn dot(&self, o: &Point3) -> Q {
        &self.x * &o.x + &self.y * &o.y + &self.z * &o.z
    }

    pub fn cross(&self, o: &Point3) -> Point3 {
        Point3::new(
            &self.y * &o.z - &self.z * &o.y,
            &self.z * &o.x - &self.x * &o.z,
            &self.x * &o.y - &self.y * &o.x,
        )
    }

    pub fn scale(&self, s: &Q) -> Point3 {
        Point3::new(&self.x * s, &self.y * s, &self.z * s)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [to_f64(&self.x), to_f64(&self.y), to_f64(&self.z)]
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl<'a> Sub<&'a Point3> for &'a Point3 {
    type Output = Point3;
    fn sub(self, o: &Point3) -> Point3 {
        Point3::new(&self.x - &o.x, &self.y - &o.y, &self.z - &o.z)
    }
}

impl<'a> Add<&'a Point3> for &'a Point3 {
    type Output = Point3;
    fn add(self, o: &Point3) -> Point3 {
        Point3::new(&self.x + &o.x, &self.y + &o.y, &self.z + &o.z)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("face {0} has fewer than three distinct, non-collinear vertices")]
    DegenerateFace(usize),
    #[error("face {0} is not planar")]
    NonPlanarFace(usize),
    #[error("face {0} is not a convex facet of the hull")]
    NotConvex(usize),
    #[error("edge {0}-{1} is not shared by exactly two faces")]
    EdgeNotManifold(usize, usize),
    #[error("vertex {0} lies on no face")]
    UnusedVertex(usize),
    #[error("face {0} references a missing vertex")]
    BadVertex(usize),
    #[error("no face {0}")]
    NoSuchFace(usize),
    #[error("projection centre is not outside the polyhedron beyond the face")]
    CenterInsidePolyhedron,
    #[error("projection is degenerate")]
    ProjectionDegenerate,
}

/// A convex polyhedron. Faces are stored counterclockwise seen from
/// outside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexPolyhedron3 {
    vertices: Vec<Point3>,
    faces: Vec<Vec<usize>>,
    /// Outward normal and offset: the face lies on `n · x = d`.
    planes: Vec<(Point3, Q)>,
}

impl ConvexPolyhedron3 {
    /// Validates planarity, convex position and the edge condition, and
    /// reorients faces outward.
    pub fn new(vertices: Vec<Point3>, mut faces: Vec<Vec<usize>>) -> Result<Self, PolyError> {
        let mut planes = Vec::with_capacity(faces.len());
        for (fi, f) in faces.iter_mut().enumerate() {
            if f.iter().any(|&v| v >= vertices.len()) {
                return Err(PolyError::BadVertex(fi));
            }
            if f.len() < 3 || f.iter().collect::<BTreeSet<_>>().len() != f.len() {
                return Err(PolyError::DegenerateFace(fi));
            }
            let p = |k: usize| &vertices[f[k % f.len()]];
            // Newell-style normal from the first corner with a proper turn.
            let mut n = Point3::from_ints(0, 0, 0);
            for k in 0..f.len() {
                n = (p(k + 1) - p(k)).cross(&(p(k + 2) - p(k + 1)));
                if !n.is_zero() {
                    break;
                }
            }
            if n.is_zero() {
                return Err(PolyError::DegenerateFace(fi));
            }
            let d = n.dot(p(0));
            if f.iter().any(|&v| n.dot(&vertices[v]) != d) {
                return Err(PolyError::NonPlanarFace(fi));
            }
            let others: Vec<Q> = (0..vertices.len())
                .filter(|v| !f.contains(v))
                .map(|v| n.dot(&vertices[v]) - &d)
                .collect();
            let (n, d) = if others.iter().all(|s| s.is_negative()) {
                (n, d)
            } else if others.iter().all(|s| s.is_positive()) {
                f.reverse();
                (n.scale(&q(-1)), -d)
            } else {
                return Err(PolyError::NotConvex(fi));
            };
            let p = |k: usize| &vertices[f[k % f.len()]];
            for k in 0..f.len() {
                let turn = (p(k + 1) - p(k)).cross(&(p(k + 2) - p(k + 1)));
                if !turn.dot(&n).is_positive() {
                    return Err(PolyError::NotConvex(fi));
                }
            }
            planes.push((n, d));
        }
        let mut sides: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for f in &faces {
            for k in 0..f.len() {
                *sides.entry((f[k], f[(k + 1) % f.len()])).or_default() += 1;
            }
        }
        for (&(a, b), &n) in &sides {
            if n != 1 || sides.get(&(b, a)) != Some(&1) {
                return Err(PolyError::EdgeNotManifold(a.min(b), a.max(b)));
            }
        }
        for v in 0..vertices.len() {
            if !faces.iter().any(|f| f.contains(&v)) {
                return Err(PolyError::UnusedVertex(v));
            }
        }
        Ok(ConvexPolyhedron3 {
            vertices,
            faces,
            planes,
        })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn n_edges(&self) -> usize {
        self.faces.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// `(n0, n1, n2)` counting faces as cells.
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.vertices.len(), self.n_edges(), self.faces.len())
    }

    pub fn euler_characteristic(&self) -> i64 {
        let (a, b, c) = self.counts();
        a as i64 - b as i64 + c as i64
    }

    /// The polyhedron whose vertices are the face planes of this one,
    /// scaled so `n · x = 1`. The origin must be strictly inside.
    pub fn polar(&self) -> Result<ConvexPolyhedron3, PolyError> {
        if self.planes.iter().any(|(_, d)| !d.is_positive()) {
            return Err(PolyError::CenterInsidePolyhedron);
        }
        let verts: Vec<Point3> = self
            .planes
            .iter()
            .map(|(n, d)| n.scale(&(q(1) / d)))
            .collect();
        // One dual face per vertex: the faces around it, in cyclic order.
        let mut faces = Vec::with_capacity(self.vertices.len());
        for v in 0..self.vertices.len() {
            let around: Vec<usize> = (0..self.faces.len())
                .filter(|&f| self.faces[f].contains(&v))
                .collect();
            let mut cyc = vec![around[0]];
            while cyc.len() < around.len() {
                let f = &self.faces[*cyc.last().expect("nonempty")];
                let k = f.iter().position(|&x| x == v).expect("member");
                let prev = f[(k + f.len() - 1) % f.len()];
                // The neighbour across edge (prev, v) holds the step v -> prev.
                let next = around
                    .iter()
                    .copied()
                    .find(|&g| {
                        let h = &self.faces[g];
                        (0..h.len()).any(|i| h[i] == v && h[(i + 1) % h.len()] == prev)
                    })
                    .expect("manifold");
                cyc.push(next);
            }
            faces.push(cyc);
        }
        ConvexPolyhedron3::new(verts, faces)
    }
}

/// Outcome of the angle-sum check.
#[derive(Debug, Clone, PartialEq)]
pub struct DescartesReport {
    /// Sum of the interior angles of all faces, in radians.
    pub angle_sum: f64,
    /// `2 (n0 - 2) π`.
    pub expected: f64,
    /// Whether the face sizes add up to twice the number of edges.
    pub edge_identity_ok: bool,
    pub passes: bool,
}

pub fn descartes_check(poly: &ConvexPolyhedron3, tol: f64) -> DescartesReport {
    let mut angle_sum = 0.0;
    for f in &poly.faces {
        for k in 0..f.len() {
            let v = &poly.vertices[f[k]];
            let a = &poly.vertices[f[(k + f.len() - 1) % f.len()]] - v;
            let b = &poly.vertices[f[(k + 1) % f.len()]] - v;
            let cos = to_f64(&a.dot(&b)) / (to_f64(&a.dot(&a)) * to_f64(&b.dot(&b))).sqrt();
            angle_sum += cos.clamp(-1.0, 1.0).acos();
        }
    }
    let expected = 2.0 * (poly.vertices.len() as f64 - 2.0) * std::f64::consts::PI;
    let mut edges = BTreeSet::new();
    for f in &poly.faces {
        for k in 0..f.len() {
            let (a, b) = (f[k], f[(k + 1) % f.len()]);
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let k_sum: usize = poly.faces.iter().map(Vec::len).sum();
    let edge_identity_ok = k_sum == 2 * edges.len();
    let passes = (angle_sum - expected).abs() < tol && edge_identity_ok;
    DescartesReport {
        angle_sum,
        expected,
        edge_identity_ok,
        passes,
    }
}

/// The projection of a polyhedron from a point just beyond one face.
#[derive(Debug, Clone)]
pub struct Schlegel {
    /// Every face except the removed one, fan-triangulated; vertex ids are
    /// those of the polyhedron.
    pub polygon: PlanarPolygon,
    /// The removed face, which projects onto the outer boundary.
    pub removed: Vec<usize>,
    pub center: Point3,
}

/// Central projection onto the plane of `face` from a centre above it.
/// The centre starts at twice the bounding radius above the face
/// centroid and is moved closer until every other face plane has it on
/// its inner side.
pub fn project_schlegel(poly: &ConvexPolyhedron3, face: usize) -> Result<Schlegel, PolyError> {
    let f = poly.faces.get(face).ok_or(PolyError::NoSuchFace(face))?;
    let (n, d) = &poly.planes[face];
    let mut centroid = Point3::from_ints(0, 0, 0);
    for &v in f {
        centroid = &centroid + &poly.vertices[v];
    }
    let centroid = centroid.scale(&(q(1) / q(f.len() as i64)));
    // Rational stand-in for the bounding radius: the largest coordinate
    // spread, which bounds the radius from above up to a factor √3.
    let spread = poly
        .vertices
        .iter()
        .flat_map(|p| [&p.x - &centroid.x, &p.y - &centroid.y, &p.z - &centroid.z])
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(|| q(1));
    let n2 = n.dot(n);
    // Height along the unit normal is `s·|n|`; start with `s·|n|² = 2·spread·|n|`
    // approximated from above by `2·spread·max(|n|², 1)`.
    let mut s = q(2) * &spread * if n2 > q(1) { n2.clone() } else { q(1) } / &n2;
    let visible_only = |c: &Point3| {
        poly.planes.iter().enumerate().all(|(g, (m, e))| {
            if g == face {
                m.dot(c) > *e
            } else {
                m.dot(c) < *e
            }
        })
    };
    let mut center = &centroid + &n.scale(&s);
    let mut tries = 0;
    while !visible_only(&center) {
        tries += 1;
        if tries > 200 {
            return Err(PolyError::CenterInsidePolyhedron);
        }
        s /= q(2);
        center = &centroid + &n.scale(&s);
    }
    if n.dot(&center) <= *d {
        return Err(PolyError::CenterInsidePolyhedron);
    }
    // In-plane orthogonal frame.
    let o = &poly.vertices[f[0]];
    let u = &poly.vertices[f[1]] - o;
    let w = n.cross(&u);
    let mut coords = Vec::with_capacity(poly.vertices.len());
    for x in &poly.vertices {
        let dir = x - &center;
        let den = n.dot(&dir);
        if den.is_zero() {
            return Err(PolyError::ProjectionDegenerate);
        }
        let t = (d - n.dot(&center)) / den;
        let y = &center + &dir.scale(&t);
        let rel = &y - o;
        coords.push(Point2::new(rel.dot(&u), rel.dot(&w)));
    }
    let mut tris = Vec::new();
    for (g, h) in poly.faces.iter().enumerate() {
        if g == face {
            continue;
        }
        for k in 1..h.len() - 1 {
            tris.push([h[0], h[k], h[k + 1]]);
        }
    }
    let c = Complex::from_triangles(poly.vertices.len(), &tris)
        .map_err(|_| PolyError::ProjectionDegenerate)?;
    let polygon = PlanarPolygon::new(c, Some(coords), IdentificationScheme::trivial())
        .map_err(|_| PolyError::ProjectionDegenerate)?;
    polygon
        .check_embedding()
        .map_err(|_| PolyError::ProjectionDegenerate)?;
    Ok(Schlegel {
        polygon,
        removed: f.clone(),
        center,
    })
}

pub fn tetrahedron() -> ConvexPolyhedron3 {
    let v = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)];
    let faces = vec![vec![0, 1, 2], vec![0, 3, 1], vec![0, 2, 3], vec![1, 3, 2]];
    build(&v, faces)
}

pub fn cube() -> ConvexPolyhedron3 {
    let mut v = Vec::new();
    for &z in &[-1, 1] {
        for &(x, y) in &[(-1, -1), (1, -1), (1, 1), (-1, 1)] {
            v.push((x, y, z));
        }
    }
    let faces = vec![
        vec![0, 3, 2, 1],
        vec![4, 5, 6, 7],
        vec![0, 1, 5, 4],
        vec![1, 2, 6, 5],
        vec![2, 3, 7, 6],
        vec![3, 0, 4, 7],
    ];
    build(&v, faces)
}

pub fn octahedron() -> ConvexPolyhedron3 {
    let v = [
        (1, 0, 0),
        (-1, 0, 0),
        (0, 1, 0),
        (0, -1, 0),
        (0, 0, 1),
        (0, 0, -1),
    ];
    let mut faces = Vec::new();
    for &x in &[0, 1] {
        for &y in &[2, 3] {
            for &z in &[4, 5] {
                faces.push(vec![x, y, z]);
            }
        }
    }
    build(&v, faces)
}

/// Vertices `(0, ±1, ±t)` and cyclic shifts with `t = 8/5` standing in
/// for the golden ratio.
pub fn icosahedron() -> ConvexPolyhedron3 {
    let t = Q::new(8.into(), 5.into());
    let mut v = Vec::new();
    for a in [q(1), q(-1)] {
        for b in [t.clone(), -t.clone()] {
            v.push(Point3::new(q(0), a.clone(), b.clone()));
            v.push(Point3::new(a.clone(), b.clone(), q(0)));
            v.push(Point3::new(b.clone(), q(0), a.clone()));
        }
    }
    // Faces are the triples whose plane has every other vertex on one side.
    let mut faces = Vec::new();
    for i in 0..12 {
        for j in i + 1..12 {
            for k in j + 1..12 {
                let n = (&v[j] - &v[i]).cross(&(&v[k] - &v[i]));
                let d = n.dot(&v[i]);
                let side: Vec<Q> = (0..12)
                    .filter(|x| ![i, j, k].contains(x))
                    .map(|x| n.dot(&v[x]) - &d)
                    .collect();
                if side.iter().all(|s| s.is_negative()) || side.iter().all(|s| s.is_positive()) {
                    faces.push(vec![i, j, k]);
                }
            }
        }
    }
    ConvexPolyhedron3::new(v, faces).expect("icosahedron")
}

/// The polar of [`icosahedron`]: rational, with planar pentagonal faces.
pub fn dodecahedron() -> ConvexPolyhedron3 {
    icosahedron().polar().expect("dodecahedron")
}

pub fn platonic_solids() -> Vec<(&'static str, ConvexPolyhedron3)> {
    vec![
        ("tetrahedron", tetrahedron()),
        ("cube", cube()),
        ("octahedron", octahedron()),
        ("dodecahedron", dodecahedron()),
        ("icosahedron", icosahedron()),
    ]
}

fn build(v: &[(i64, i64, i64)], faces: Vec<Vec<usize>>) -> ConvexPolyhedron3 {
    let pts = v
        .iter()
        .map(|&(x, y, z)| Point3::from_ints(x, y, z))
        .collect();
    ConvexPolyhedron3::new(pts, faces).expect("built-in polyhedron")
}
