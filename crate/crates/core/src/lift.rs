//! A removal schedule for a triangulated polygon that never gets stuck.
//!
//! Vertices get integer levels: the base triangle at 0, interior vertices
//! at 1..n by increasing distance, the boundary at n+1. Edges spanning more
//! than one level are cut at every intermediate level, which splits each
//! triangle into slabs between consecutive levels. The level-k edges then
//! form a simple cycle for every k, and the triangles between consecutive
//! cycles form annular bands. Removing the base triangle and then walking
//! around each band in turn removes everything but the boundary.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};

use rustc_hash::FxHashMap as HashMap;

use num_traits::Zero;

use crate::complex::{CellCounts, Complex, EdgeId, TriId, VertexId};
use crate::engine::{self, Failure, Mode, OpKind, Rules, Seed, Trace};
use crate::rational::{orient, q, Point2, Q};
use crate::scheme::{boundary_chi, quotient, IdentificationScheme, PlanarPolygon, SchemeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Metric {
    /// Squared distance from the origin point.
    #[default]
    Euclidean,
    /// Number of edges to the nearest base vertex.
    EdgePath,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OrderRule {
    /// Nearest vertex first, but a vertex is only taken once the already
    /// ordered neighbours form one arc of its link, which keeps every
    /// sublevel set a disc.
    #[default]
    Guarded,
    /// Nearest vertex first, unconditionally.
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WalkDirection {
    #[default]
    Ccw,
    Cw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Closing {
    /// The triangles around the start apex that end the walk are taken in
    /// reverse, so every band closes with operation II.
    #[default]
    ReverseTail,
    /// Each band ends on its last triangle with a side on the lower curve,
    /// removed by operation III. The hole boundary is pinched before that,
    /// so this replays leniently only.
    OpIII,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LiftOptions {
    pub metric: Metric,
    pub order_rule: OrderRule,
    pub direction: WalkDirection,
    pub closing: Closing,
    /// Origin for distances; must lie strictly inside an interior triangle,
    /// which becomes the base. Defaults to the centroid of the base.
    pub origin: Option<Point2>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LiftError {
    #[error("point lies on an edge or vertex")]
    PointOnSkeleton,
    #[error("point lies outside the polygon")]
    PointOutside,
    #[error("point lies in triangle {0}, which has a boundary edge")]
    PointInBoundaryTriangle(TriId),
    #[error("polygon has no coordinates")]
    NoCoordinates,
    #[error("level {0} is not a simple closed curve")]
    MultiplePointOnLevel(usize),
    #[error("vertex ordering got stuck after {0} vertices")]
    OrderingStuck(usize),
    #[error("band {0} is not an annulus of triangles")]
    MalformedBand(usize),
    #[error("schedule replay failed at step {} ({})", .0.index, .0.reason)]
    ScheduleReplayFailed(Failure),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Engine(#[from] engine::EngineError),
    #[error(transparent)]
    Complex(#[from] crate::complex::ComplexError),
}

/// Triangle strictly containing `point`.
pub fn pick_base(p: &PlanarPolygon, point: &Point2) -> Result<TriId, LiftError> {
    let pts = p.coords().ok_or(LiftError::NoCoordinates)?;
    let c = p.complex();
    let mut on_skeleton = false;
    for (t, v) in p.oriented_triangles().iter().enumerate() {
        let o = [
            orient(&pts[v[0]], &pts[v[1]], point),
            orient(&pts[v[1]], &pts[v[2]], point),
            orient(&pts[v[2]], &pts[v[0]], point),
        ];
        if o.iter().all(|&x| x == Ordering::Greater) {
            if c.triangle(t).e.iter().any(|&e| c.is_boundary_edge(e)) {
                return Err(LiftError::PointInBoundaryTriangle(t));
            }
            return Ok(t);
        }
        if o.iter().all(|&x| x != Ordering::Less) {
            on_skeleton = true;
        }
    }
    Err(if on_skeleton {
        LiftError::PointOnSkeleton
    } else {
        LiftError::PointOutside
    })
}

/// What preprocessing had to do before levels could be assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PrepFlags {
    /// Interior edges with both ends on the boundary, split at the midpoint.
    pub chords_split: usize,
    /// The chosen base triangle had a corner on the boundary.
    pub base_touched_boundary: bool,
    /// A smaller triangle was inserted inside the base to serve as the base.
    pub refined_base: bool,
}

/// The polygon actually scheduled: the input with chords split and, if
/// needed, a refined base triangle. Vertex ids of the input are kept.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub polygon: PlanarPolygon,
    pub base: TriId,
    pub origin: Option<Point2>,
    pub flags: PrepFlags,
}

pub fn prepare(p: &PlanarPolygon, origin: Option<&Point2>) -> Result<Prepared, LiftError> {
    let c = p.complex();
    let on_b = p.is_boundary_vertex();
    let user_base = match origin {
        Some(pt) => Some(pick_base(p, pt)?),
        None => None,
    };
    let has_boundary_edge = |t: TriId| c.triangle(t).e.iter().any(|&e| c.is_boundary_edge(e));
    let base = user_base.unwrap_or_else(|| {
        (0..c.n_triangles())
            .find(|&t| c.triangle(t).v.iter().all(|&v| !on_b[v]))
            .or_else(|| (0..c.n_triangles()).find(|&t| !has_boundary_edge(t)))
            .unwrap_or(0)
    });
    let mut flags = PrepFlags::default();
    let mut tris: Vec<[VertexId; 3]> = p.oriented_triangles().to_vec();
    let mut coords: Option<Vec<Point2>> = p.coords().map(|x| x.to_vec());
    let mut nv = c.n_vertices();
    let mut base_tri = tris[base];
    flags.base_touched_boundary = base_tri.iter().any(|&v| on_b[v]);
    if flags.base_touched_boundary {
        flags.refined_base = true;
        let [a, b, cc] = base_tri;
        let (a2, b2, c2) = (nv, nv + 1, nv + 2);
        nv += 3;
        if let Some(pts) = coords.as_mut() {
            let centre = match origin {
                Some(o) => o.clone(),
                None => centroid(&pts[a], &pts[b], &pts[cc]),
            };
            for v in [a, b, cc] {
                let m = pts[v].midpoint(&centre);
                pts.push(m);
            }
        }
        // Annulus of six triangles around the inner one, all counterclockwise.
        let ring = [
            [a, b, b2],
            [a, b2, a2],
            [b, cc, c2],
            [b, c2, b2],
            [cc, a, a2],
            [cc, a2, c2],
        ];
        tris[base] = [a2, b2, c2];
        tris.extend_from_slice(&ring);
        base_tri = [a2, b2, c2];
    }
    // Split chords until none remain.
    let mut on_boundary = on_b.clone();
    on_boundary.resize(nv, false);
    loop {
        let mut edge_tris: HashMap<(VertexId, VertexId), Vec<usize>> = HashMap::default();
        for (i, t) in tris.iter().enumerate() {
            for k in 0..3 {
                let (x, y) = (t[k], t[(k + 1) % 3]);
                edge_tris.entry((x.min(y), x.max(y))).or_default().push(i);
            }
        }
        let mut chords: Vec<(VertexId, VertexId)> = edge_tris
            .iter()
            .filter(|((x, y), ts)| ts.len() == 2 && on_boundary[*x] && on_boundary[*y])
            .map(|(k, _)| *k)
            .collect();
        chords.sort_unstable();
        let Some(&(x, y)) = chords.first() else { break };
        let m = nv;
        nv += 1;
        on_boundary.push(false);
        if let Some(pts) = coords.as_mut() {
            let mid = pts[x].midpoint(&pts[y]);
            pts.push(mid);
        }
        let ts = edge_tris[&(x, y)].clone();
        for i in ts {
            let t = tris[i];
            let k = (0..3)
                .find(|&k| {
                    let (u, v) = (t[k], t[(k + 1) % 3]);
                    (u == x && v == y) || (u == y && v == x)
                })
                .expect("chord side");
            let (u, v, w) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
            tris[i] = [u, m, w];
            tris.push([m, v, w]);
        }
        flags.chords_split += 1;
    }
    if !flags.refined_base && flags.chords_split == 0 {
        return Ok(Prepared {
            polygon: p.clone(),
            base,
            origin: origin.cloned().or_else(|| default_origin(p, base)),
            flags,
        });
    }
    let complex = Complex::from_triangles(nv, &tris)?;
    let scheme = IdentificationScheme {
        start: Some(p.boundary()[0]),
        ..p.scheme().clone()
    };
    let polygon = PlanarPolygon::new(complex, coords, scheme)?;
    let polygon = orient_like(polygon, p.boundary())?;
    let base = polygon
        .oriented_triangles()
        .iter()
        .position(|t| same_set(*t, base_tri))
        .expect("base survives preprocessing");
    let origin = origin.cloned().or_else(|| default_origin(&polygon, base));
    Ok(Prepared {
        polygon,
        base,
        origin,
        flags,
    })
}

fn centroid(a: &Point2, b: &Point2, c: &Point2) -> Point2 {
    let s = &(a + b) + c;
    s.scale(&Q::new(1.into(), 3.into()))
}

fn default_origin(p: &PlanarPolygon, base: TriId) -> Option<Point2> {
    let pts = p.coords()?;
    let [a, b, c] = p.oriented_triangles()[base];
    Some(centroid(&pts[a], &pts[b], &pts[c]))
}

fn same_set(a: [VertexId; 3], b: [VertexId; 3]) -> bool {
    let (mut x, mut y) = (a, b);
    x.sort_unstable();
    y.sort_unstable();
    x == y
}

/// Rebuilds `p` with reversed orientation if its boundary runs opposite to
/// `reference` (only possible without coordinates).
fn orient_like(p: PlanarPolygon, reference: &[VertexId]) -> Result<PlanarPolygon, SchemeError> {
    if p.boundary().len() < 3 || reference.len() < 3 || p.boundary()[1] == reference[1] {
        return Ok(p);
    }
    let c = p.complex();
    let mut tris = c.triangle_vertices();
    tris[0].swap(1, 2);
    let flipped = Complex::from_triangles(c.n_vertices(), &tris)?;
    PlanarPolygon::new(flipped, p.coords().map(|x| x.to_vec()), p.scheme().clone())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightAssignment {
    /// Level of every vertex.
    pub level: Vec<usize>,
    /// Interior vertices in level order (`order[i]` has level `i + 1`).
    pub order: Vec<VertexId>,
    pub metric: Metric,
    pub base: TriId,
}

impl HeightAssignment {
    /// Number of interior (non-base) vertices.
    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// Lifted height `(n + 1) - level`.
    pub fn height(&self, v: VertexId) -> usize {
        self.n() + 1 - self.level[v]
    }
}

/// Levels for the vertices of `p` with base triangle `base`.
pub fn order_vertices(
    p: &PlanarPolygon,
    base: TriId,
    metric: Metric,
    rule: OrderRule,
    origin: Option<&Point2>,
) -> Result<HeightAssignment, LiftError> {
    let c = p.complex();
    let nv = c.n_vertices();
    let on_b = p.is_boundary_vertex();
    let base_v = c.triangle(base).v;
    let mut nbrs = vec![Vec::new(); nv];
    for &[a, b] in c.edges() {
        nbrs[a].push(b);
        nbrs[b].push(a);
    }
    let key: Vec<Q> = match metric {
        Metric::Euclidean => {
            let pts = p.coords().ok_or(LiftError::NoCoordinates)?;
            let o = match origin {
                Some(o) => o.clone(),
                None => default_origin(p, base).ok_or(LiftError::NoCoordinates)?,
            };
            pts.iter().map(|x| x.dist2(&o)).collect()
        }
        Metric::EdgePath => {
            let mut d = vec![usize::MAX; nv];
            let mut queue = VecDeque::new();
            for &v in &base_v {
                d[v] = 0;
                queue.push_back(v);
            }
            while let Some(u) = queue.pop_front() {
                for &w in &nbrs[u] {
                    if d[w] == usize::MAX {
                        d[w] = d[u] + 1;
                        queue.push_back(w);
                    }
                }
            }
            d.into_iter().map(|x| q(x as i64)).collect()
        }
    };
    let interior: Vec<VertexId> = (0..nv)
        .filter(|&v| !on_b[v] && !base_v.contains(&v))
        .collect();
    let mut assigned = vec![false; nv];
    for &v in &base_v {
        assigned[v] = true;
    }
    let mut order = Vec::with_capacity(interior.len());
    match rule {
        OrderRule::Plain => {
            let mut sorted = interior.clone();
            sorted.sort_by(|&a, &b| key[a].cmp(&key[b]).then(a.cmp(&b)));
            order = sorted;
        }
        OrderRule::Guarded => {
            let links = vertex_links(p);
            let mut heap: BinaryHeap<Reverse<(Q, VertexId)>> = BinaryHeap::new();
            for &v in &base_v {
                for &w in &nbrs[v] {
                    if !on_b[w] && !assigned[w] {
                        heap.push(Reverse((key[w].clone(), w)));
                    }
                }
            }
            while let Some(Reverse((_, v))) = heap.pop() {
                if assigned[v] {
                    continue;
                }
                if !arc_condition(&links[v], &assigned) {
                    continue;
                }
                assigned[v] = true;
                order.push(v);
                for &w in &nbrs[v] {
                    if !on_b[w] && !assigned[w] {
                        heap.push(Reverse((key[w].clone(), w)));
                    }
                }
            }
            if order.len() != interior.len() {
                return Err(LiftError::OrderingStuck(order.len()));
            }
        }
    }
    let n = order.len();
    let mut level = vec![n + 1; nv];
    for &v in &base_v {
        level[v] = 0;
    }
    for (i, &v) in order.iter().enumerate() {
        level[v] = i + 1;
    }
    Ok(HeightAssignment {
        level,
        order,
        metric,
        base,
    })
}

/// Cyclic neighbour order around each interior vertex (empty for boundary vertices).
fn vertex_links(p: &PlanarPolygon) -> Vec<Vec<VertexId>> {
    let nv = p.complex().n_vertices();
    let on_b = p.is_boundary_vertex();
    let mut next: Vec<HashMap<VertexId, VertexId>> = vec![HashMap::default(); nv];
    for t in p.oriented_triangles() {
        for k in 0..3 {
            next[t[k]].insert(t[(k + 1) % 3], t[(k + 2) % 3]);
        }
    }
    (0..nv)
        .map(|v| {
            if on_b[v] || next[v].is_empty() {
                return Vec::new();
            }
            let start = *next[v].keys().min().expect("nonempty link");
            let mut cyc = vec![start];
            let mut cur = next[v][&start];
            while cur != start && cyc.len() <= next[v].len() {
                cyc.push(cur);
                cur = next[v][&cur];
            }
            cyc
        })
        .collect()
}

/// The assigned vertices of a link cycle form one nonempty proper arc.
fn arc_condition(link: &[VertexId], assigned: &[bool]) -> bool {
    let k = link.len();
    let marks: Vec<bool> = link.iter().map(|&w| assigned[w]).collect();
    let count = marks.iter().filter(|&&m| m).count();
    if count == 0 || count == k {
        return false;
    }
    let starts = (0..k)
        .filter(|&i| marks[i] && !marks[(i + k - 1) % k])
        .count();
    starts == 1
}

/// The polygon cut at every integer level.
#[derive(Debug, Clone)]
pub struct Subdivision {
    pub polygon: PlanarPolygon,
    pub level: Vec<usize>,
    /// Base triangle id in the subdivided polygon.
    pub base: TriId,
    /// Triangle of the input polygon containing each new triangle.
    pub parent: Vec<TriId>,
    pub n_levels: usize,
}

pub fn subdivide_levels(p: &PlanarPolygon, h: &HeightAssignment) -> Result<Subdivision, LiftError> {
    let c = p.complex();
    let lv = &h.level;
    let mut nv = c.n_vertices();
    let mut level = lv.clone();
    let mut coords: Option<Vec<Point2>> = p.coords().map(|x| x.to_vec());
    let mut cut: HashMap<(EdgeId, usize), VertexId> = HashMap::default();
    for (e, &[a, b]) in c.edges().iter().enumerate() {
        let (lo, hi) = if lv[a] <= lv[b] { (a, b) } else { (b, a) };
        for k in lv[lo] + 1..lv[hi] {
            cut.insert((e, k), nv);
            level.push(k);
            if let Some(pts) = coords.as_mut() {
                let t = Q::new(
                    ((k - lv[lo]) as i64).into(),
                    ((lv[hi] - lv[lo]) as i64).into(),
                );
                let pt = pts[lo].lerp(&pts[hi], &t);
                pts.push(pt);
            }
            nv += 1;
        }
    }
    let index = c.edge_index();
    let at = |x: VertexId, y: VertexId, k: usize| -> VertexId {
        if lv[x] == k {
            return x;
        }
        if lv[y] == k {
            return y;
        }
        cut[&(index[&(x.min(y), x.max(y))], k)]
    };
    let mut tris: Vec<[VertexId; 3]> = Vec::new();
    let mut parent = Vec::new();
    let base_tri = p.oriented_triangles()[h.base];
    for (t, &tv) in p.oriented_triangles().iter().enumerate() {
        if t == h.base {
            tris.push(tv);
            parent.push(t);
            continue;
        }
        let mut s = tv;
        s.sort_by_key(|&v| (lv[v], v));
        let [a, b, cc] = s;
        let (la, lb, lc) = (lv[a], lv[b], lv[cc]);
        let side = |k: usize| if k < lb { at(a, b, k) } else { at(b, cc, k) };
        for k in la..lc {
            let mut poly = vec![at(a, cc, k), side(k), side(k + 1), at(a, cc, k + 1)];
            poly.dedup();
            if poly.len() > 1 && poly[0] == poly[poly.len() - 1] {
                poly.pop();
            }
            match poly.len() {
                3 => tris.push([poly[0], poly[1], poly[2]]),
                4 => {
                    // Diagonal from the smaller-id level-k corner.
                    let d = if poly[0] < poly[1] { 0 } else { 1 };
                    let r = |j: usize| poly[(d + j) % 4];
                    tris.push([r(0), r(1), r(2)]);
                    tris.push([r(0), r(2), r(3)]);
                    parent.push(t);
                }
                _ => unreachable!("slab has 3 or 4 corners"),
            }
            parent.push(t);
        }
    }
    let complex = Complex::from_triangles(nv, &tris)?;
    let scheme = IdentificationScheme {
        start: Some(p.boundary()[0]),
        ..p.scheme().clone()
    };
    let polygon = orient_like(PlanarPolygon::new(complex, coords, scheme)?, p.boundary())?;
    let base = polygon
        .oriented_triangles()
        .iter()
        .position(|t| same_set(*t, base_tri))
        .expect("base kept");
    Ok(Subdivision {
        polygon,
        level,
        base,
        parent,
        n_levels: h.n() + 2,
    })
}

/// The level-k edges of the subdivision, as a counterclockwise cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelCurve {
    pub level: usize,
    /// Starts at the smallest vertex id; `edges[i]` joins `vertices[i]` and `vertices[i + 1]`.
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

pub fn level_curves(s: &Subdivision) -> Result<Vec<LevelCurve>, LiftError> {
    let p = &s.polygon;
    let c = p.complex();
    let lv = &s.level;
    let mut by_level: Vec<Vec<EdgeId>> = vec![Vec::new(); s.n_levels];
    for (e, &[a, b]) in c.edges().iter().enumerate() {
        if lv[a] == lv[b] {
            by_level[lv[a]].push(e);
        }
    }
    let index = c.edge_index();
    let mut verts_at: Vec<usize> = vec![0; s.n_levels];
    for &l in lv {
        verts_at[l] += 1;
    }
    // Directed successor along each curve, interior (lower levels) on the left.
    let mut succ: HashMap<VertexId, (VertexId, EdgeId)> = HashMap::default();
    for t in p.oriented_triangles() {
        for k in 0..3 {
            let (x, y, w) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
            let inside = if lv[x] == 0 {
                lv[w] == 0
            } else {
                lv[w] < lv[x]
            };
            if lv[x] == lv[y] && inside {
                let e = lookup(&index, x, y);
                if succ.insert(x, (y, e)).is_some() {
                    return Err(LiftError::MultiplePointOnLevel(lv[x]));
                }
            }
        }
    }
    let mut out = Vec::with_capacity(s.n_levels);
    for k in 0..s.n_levels {
        let edges = &by_level[k];
        let bad = LiftError::MultiplePointOnLevel(k);
        if edges.len() < 3 || edges.len() != verts_at[k] {
            return Err(bad);
        }
        let start = edges.iter().flat_map(|&e| c.edge(e)).min().expect("edges");
        let mut vertices = vec![start];
        let mut cedges = Vec::new();
        let mut cur = start;
        loop {
            let &(nx, e) = succ.get(&cur).ok_or(bad.clone())?;
            cedges.push(e);
            if nx == start {
                break;
            }
            if cedges.len() > edges.len() {
                return Err(bad);
            }
            vertices.push(nx);
            cur = nx;
        }
        if cedges.len() != edges.len() {
            return Err(bad);
        }
        out.push(LevelCurve {
            level: k,
            vertices,
            edges: cedges,
        });
    }
    Ok(out)
}

fn lookup(index: &HashMap<(VertexId, VertexId), EdgeId>, a: VertexId, b: VertexId) -> EdgeId {
    index[&(a.min(b), a.max(b))]
}

/// The triangles between level curves `index` and `index + 1`, in walk order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Band {
    pub index: usize,
    pub walk: Vec<TriId>,
    /// Start triangle `(alpha0, alpha1, beta0)`: `alpha0` trails, `alpha1` leads.
    pub alpha0: VertexId,
    pub alpha1: VertexId,
    pub beta0: VertexId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleEntry {
    pub tri: TriId,
    pub kind: OpKind,
    pub band: usize,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub base: TriId,
    pub entries: Vec<ScheduleEntry>,
    pub bands: Vec<Band>,
    pub rules: Rules,
    pub trace: Trace,
}

impl Schedule {
    pub fn order(&self) -> Vec<TriId> {
        self.entries.iter().map(|e| e.tri).collect()
    }
}

pub fn build_schedule(
    s: &Subdivision,
    curves: &[LevelCurve],
    direction: WalkDirection,
    closing: Closing,
) -> Result<Schedule, LiftError> {
    let p = &s.polygon;
    let c = p.complex();
    let lv = &s.level;
    let or = p.oriented_triangles();
    let mut band_of: Vec<Option<usize>> = vec![None; c.n_triangles()];
    let mut band_size = vec![0usize; s.n_levels];
    for (t, tv) in or.iter().enumerate() {
        if t == s.base {
            continue;
        }
        let lo = tv.iter().map(|&v| lv[v]).min().expect("corner");
        let hi = tv.iter().map(|&v| lv[v]).max().expect("corner");
        if hi != lo + 1 {
            return Err(LiftError::MalformedBand(lo));
        }
        band_of[t] = Some(lo);
        band_size[lo] += 1;
    }
    let index = c.edge_index();
    let mut bands = Vec::new();
    let mut entries = Vec::new();
    for i in 0..s.n_levels - 1 {
        let bad = || LiftError::MalformedBand(i);
        let curve = &curves[i];
        let e0 = *curve.edges.iter().min().ok_or_else(bad)?;
        let t0 = *c
            .edge_triangles(e0)
            .iter()
            .find(|&&t| band_of[t] == Some(i))
            .ok_or_else(bad)?;
        let tv = or[t0];
        let r = (0..3)
            .find(|&k| lv[tv[(k + 2) % 3]] == i + 1)
            .ok_or_else(bad)?;
        let (x, y, beta0) = (tv[r], tv[(r + 1) % 3], tv[(r + 2) % 3]);
        // Counterclockwise along the curve runs y -> x.
        let (alpha0, alpha1) = match direction {
            WalkDirection::Ccw => (y, x),
            WalkDirection::Cw => (x, y),
        };
        let mut walk = vec![t0];
        let (mut a, mut b) = (alpha1, beta0);
        let mut cur = t0;
        loop {
            let e = lookup(&index, a, b);
            let next = *c
                .edge_triangles(e)
                .iter()
                .find(|&&u| u != cur)
                .ok_or_else(bad)?;
            if next == t0 {
                break;
            }
            if band_of[next] != Some(i) || walk.len() > band_size[i] {
                return Err(bad());
            }
            let w = *c
                .triangle(next)
                .v
                .iter()
                .find(|&&v| v != a && v != b)
                .ok_or_else(bad)?;
            if lv[w] == i {
                a = w;
            } else {
                b = w;
            }
            walk.push(next);
            cur = next;
        }
        if walk.len() != band_size[i] {
            return Err(bad());
        }
        let order = match closing {
            Closing::ReverseTail => {
                let mut k = walk.len();
                while k > 1 && c.triangle(walk[k - 1]).has_vertex(beta0) {
                    k -= 1;
                }
                let mut o = walk[..k].to_vec();
                o.extend(walk[k..].iter().rev());
                o
            }
            Closing::OpIII => {
                // Close around the last triangle with a side on the lower curve.
                let j = walk
                    .iter()
                    .rposition(|&t| c.triangle(t).v.iter().filter(|&&v| lv[v] == i).count() == 2)
                    .filter(|&j| j > 0)
                    .ok_or_else(bad)?;
                let mut o = walk[..j].to_vec();
                o.extend(walk[j + 1..].iter().rev());
                o.push(walk[j]);
                o
            }
        };
        for (pos, &t) in order.iter().enumerate() {
            entries.push(ScheduleEntry {
                tri: t,
                kind: OpKind::I,
                band: i,
                position: pos,
            });
        }
        bands.push(Band {
            index: i,
            walk,
            alpha0,
            alpha1,
            beta0,
        });
    }
    let rules = match closing {
        Closing::ReverseTail => Rules::new(Mode::Strict, false),
        Closing::OpIII => Rules::new(Mode::Lenient, true),
    };
    let order: Vec<TriId> = entries.iter().map(|e| e.tri).collect();
    let trace = engine::replay(c, Seed::Triangle(s.base), &order, rules)?;
    if let Some(f) = &trace.failure {
        return Err(LiftError::ScheduleReplayFailed(f.clone()));
    }
    for (e, st) in entries.iter_mut().zip(&trace.steps) {
        e.kind = st.kind;
    }
    Ok(Schedule {
        base: s.base,
        entries,
        bands,
        rules,
        trace,
    })
}

/// Everything the pipeline produced for one polygon.
#[derive(Debug, Clone)]
pub struct Lifted {
    pub prepared: Prepared,
    pub heights: HeightAssignment,
    pub subdivision: Subdivision,
    pub curves: Vec<LevelCurve>,
    pub schedule: Schedule,
}

pub fn lift(p: &PlanarPolygon, opts: &LiftOptions) -> Result<Lifted, LiftError> {
    let prepared = prepare(p, opts.origin.as_ref())?;
    let heights = order_vertices(
        &prepared.polygon,
        prepared.base,
        opts.metric,
        opts.order_rule,
        prepared.origin.as_ref(),
    )?;
    let subdivision = subdivide_levels(&prepared.polygon, &heights)?;
    let curves = level_curves(&subdivision)?;
    let schedule = build_schedule(&subdivision, &curves, opts.direction, opts.closing)?;
    Ok(Lifted {
        prepared,
        heights,
        subdivision,
        curves,
        schedule,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem1Report {
    /// Euler characteristic of the quotient, by counting cells.
    pub chi_k: i64,
    /// `n0 - n1` of the identified boundary.
    pub chi_k0: i64,
    /// Identified survivors of the schedule plus the base triangle.
    pub chi_by_schedule: i64,
    pub schedule_ok: bool,
    pub quotient_counts: CellCounts,
    pub subdivision_counts: CellCounts,
    pub flags: PrepFlags,
}

impl Theorem1Report {
    pub fn holds(&self) -> bool {
        self.schedule_ok && self.chi_k == self.chi_k0 + 1 && self.chi_by_schedule == self.chi_k
    }
}

pub fn verify_theorem1(p: &PlanarPolygon, opts: &LiftOptions) -> Result<Theorem1Report, LiftError> {
    let qc = quotient(p)?;
    let chi_k0 = boundary_chi(p)?;
    let lifted = lift(p, opts)?;
    let k2 = lifted.subdivision.polygon.complex();
    let mut h = engine::init_hole(k2, Seed::Triangle(lifted.subdivision.base))?;
    for e in &lifted.schedule.entries {
        h.apply(k2, e.tri, e.kind)?;
    }
    let schedule_ok = lifted.schedule.trace.success() && h.is_complete(k2);
    // The survivors are the boundary cells of the input; identify them.
    let id = p.identification()?;
    let pc = p.complex();
    let pidx = pc.edge_index();
    let mut vs = Vec::new();
    let mut es = Vec::new();
    let mut foreign = false;
    for v in 0..k2.n_vertices() {
        if h.vertex_alive(v) {
            if v < pc.n_vertices() {
                vs.push(id.vertex[v]);
            } else {
                foreign = true;
            }
        }
    }
    for e in 0..k2.n_edges() {
        if h.edge_alive(e) {
            let [a, b] = k2.edge(e);
            match pidx.get(&(a.min(b), a.max(b))) {
                Some(&pe) => es.push(id.edge[pe]),
                None => foreign = true,
            }
        }
    }
    vs.sort_unstable();
    vs.dedup();
    es.sort_unstable();
    es.dedup();
    let chi_by_schedule = vs.len() as i64 - es.len() as i64 + h.counts().n2 as i64 + 1;
    Ok(Theorem1Report {
        chi_k: qc.euler_characteristic(),
        chi_k0,
        chi_by_schedule,
        schedule_ok: schedule_ok && !foreign,
        quotient_counts: qc.counts(),
        subdivision_counts: k2.counts(),
        flags: lifted.prepared.flags,
    })
}

/// Sum of `|area|` over triangles equals `|area|` of the boundary; used by tests.
pub fn total_area2(p: &PlanarPolygon) -> Option<Q> {
    let pts = p.coords()?;
    let mut s = Q::zero();
    for t in p.oriented_triangles() {
        s += crate::rational::area2(&pts[t[0]], &pts[t[1]], &pts[t[2]]);
    }
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;
    use crate::sample::random_convex_polygon;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(x: &str, y: &str) -> Point2 {
        Point2::new(parse_rational(x).unwrap(), parse_rational(y).unwrap())
    }

    /// The eleven-vertex polygon with base (a1, a2, a3) and interior
    /// vertices y1, y2. Ids: b1..b6 = 0..5, a1..a3 = 6..8, y1 = 9, y2 = 10.
    fn fig8() -> PlanarPolygon {
        let coords = vec![
            pt("-6", "-0.5"),
            pt("-3", "4"),
            pt("3.5", "4"),
            pt("6", "-1"),
            pt("4.5", "-4"),
            pt("-3.5", "-4"),
            pt("-1", "0"),
            pt("0", "2"),
            pt("2", "0"),
            pt("-2", "1"),
            pt("0.8", "-2"),
        ];
        let (b1, b2, b3, b4, b5, b6, a1, a2, a3, y1, y2) = (0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10);
        let tris = [
            [y1, b2, b1],
            [y1, b1, b6],
            [y1, b6, a1],
            [y1, a1, a2],
            [y1, a2, b2],
            [y2, a1, b6],
            [y2, b6, b5],
            [y2, b5, a3],
            [y2, a3, a1],
            [a2, b2, b3],
            [a2, b3, a3],
            [a3, b3, b4],
            [a3, b4, b5],
            [a1, a2, a3],
        ];
        let c = Complex::from_triangles(11, &tris).unwrap();
        PlanarPolygon::new(c, Some(coords), IdentificationScheme::trivial()).unwrap()
    }

    fn origin8() -> Point2 {
        pt("0.3", "0.7")
    }

    #[test]
    fn fig8_base_and_order() {
        let p = fig8();
        p.check_embedding().unwrap();
        assert_eq!(p.complex().counts(), CellCounts::new(11, 24, 14));
        assert_eq!(pick_base(&p, &origin8()), Ok(13));
        let h = order_vertices(
            &p,
            13,
            Metric::Euclidean,
            OrderRule::Guarded,
            Some(&origin8()),
        )
        .unwrap();
        assert_eq!(h.order, vec![9, 10]);
        assert_eq!(h.level[9], 1);
        assert_eq!(h.level[0], 3);
        assert_eq!(h.height(6), 3);
        let plain = order_vertices(
            &p,
            13,
            Metric::Euclidean,
            OrderRule::Plain,
            Some(&origin8()),
        )
        .unwrap();
        assert_eq!(plain.order, h.order);
    }

    #[test]
    fn pick_base_errors() {
        let p = fig8();
        // Midpoint of a1-a2.
        assert_eq!(
            pick_base(&p, &pt("-0.5", "1")),
            Err(LiftError::PointOnSkeleton)
        );
        assert_eq!(pick_base(&p, &pt("100", "0")), Err(LiftError::PointOutside));
        // Inside y1 b2 b1, which has a boundary edge.
        assert_eq!(
            pick_base(&p, &pt("-3.5", "1.5")),
            Err(LiftError::PointInBoundaryTriangle(0))
        );
    }

    #[test]
    fn fig8_pipeline() {
        let p = fig8();
        let opts = LiftOptions {
            origin: Some(origin8()),
            ..Default::default()
        };
        let l = lift(&p, &opts).unwrap();
        assert_eq!(l.prepared.flags, PrepFlags::default());
        let s = &l.subdivision;
        assert_eq!(s.polygon.complex().euler_characteristic(), 1);
        s.polygon.check_embedding().unwrap();
        assert_eq!(l.curves.len(), 4);
        assert_eq!(l.curves[0].vertices.len(), 3);
        assert!(l.curves[1].vertices.contains(&9));
        assert!(l.curves[2].vertices.contains(&10));
        assert_eq!(l.curves[3].vertices, p.boundary());
        assert!(l.schedule.trace.success());
        assert_eq!(
            l.schedule.entries.len(),
            s.polygon.complex().n_triangles() - 1
        );
        let r = verify_theorem1(&p, &opts).unwrap();
        assert!(r.holds(), "{r:?}");
        assert_eq!(r.chi_k, 1);
    }

    #[test]
    fn band_kinds_follow_the_walk() {
        let p = fig8();
        let opts = LiftOptions {
            origin: Some(origin8()),
            ..Default::default()
        };
        let l = lift(&p, &opts).unwrap();
        let lv = &l.subdivision.level;
        let c = l.subdivision.polygon.complex();
        for band in &l.schedule.bands {
            let entries: Vec<_> = l
                .schedule
                .entries
                .iter()
                .filter(|e| e.band == band.index)
                .collect();
            assert_eq!(entries[0].kind, OpKind::I);
            assert_eq!(entries.last().unwrap().kind, OpKind::II);
            for e in &entries[1..] {
                let inner = c
                    .triangle(e.tri)
                    .v
                    .iter()
                    .filter(|&&v| lv[v] == band.index)
                    .count();
                if !c.triangle(e.tri).has_vertex(band.beta0) {
                    let want = if inner == 2 { OpKind::II } else { OpKind::I };
                    assert_eq!(e.kind, want);
                }
            }
        }
    }

    #[test]
    fn ccw_walk_leads_counterclockwise() {
        let p = fig8();
        let opts = LiftOptions {
            origin: Some(origin8()),
            ..Default::default()
        };
        let l = lift(&p, &opts).unwrap();
        let pts = l.subdivision.polygon.coords().unwrap();
        let o = &origin8();
        for band in &l.schedule.bands {
            // Going from alpha0 to alpha1 turns counterclockwise about the origin.
            assert_eq!(
                orient(o, &pts[band.alpha0], &pts[band.alpha1]),
                Ordering::Greater
            );
        }
        let cw = LiftOptions {
            direction: WalkDirection::Cw,
            ..opts.clone()
        };
        let l2 = lift(&p, &cw).unwrap();
        for band in &l2.schedule.bands {
            assert_eq!(
                orient(o, &pts[band.alpha0], &pts[band.alpha1]),
                Ordering::Less
            );
        }
        assert!(l2.schedule.trace.success());
    }

    #[test]
    fn op3_closing_replays_leniently() {
        let p = fig8();
        let opts = LiftOptions {
            origin: Some(origin8()),
            closing: Closing::OpIII,
            ..Default::default()
        };
        let l = lift(&p, &opts).unwrap();
        assert!(l.schedule.trace.success());
        for band in &l.schedule.bands {
            let es: Vec<_> = l
                .schedule
                .entries
                .iter()
                .filter(|e| e.band == band.index)
                .collect();
            assert_eq!(es[es.len() - 1].kind, OpKind::III);
        }
        let strict = engine::replay(
            l.subdivision.polygon.complex(),
            Seed::Triangle(l.subdivision.base),
            &l.schedule.order(),
            Rules::new(Mode::Strict, true),
        )
        .unwrap();
        assert!(strict.failure.is_some());
    }

    #[test]
    fn single_band_between_two_triangles() {
        // Base triangle inside a rotated outer triangle: one band of six.
        let coords: Vec<Point2> = [(0, 8), (-7, -4), (7, -4), (0, -2), (2, 1), (-2, 1)]
            .iter()
            .map(|&(x, y)| Point2::from_ints(x, y))
            .collect();
        let tris = [
            [3, 4, 5],
            [0, 5, 4],
            [1, 3, 5],
            [2, 4, 3],
            [0, 1, 5],
            [1, 2, 3],
            [2, 0, 4],
        ];
        let c = Complex::from_triangles(6, &tris).unwrap();
        let p = PlanarPolygon::new(c, Some(coords), IdentificationScheme::trivial()).unwrap();
        p.check_embedding().unwrap();
        let l = lift(&p, &LiftOptions::default()).unwrap();
        assert_eq!(
            l.subdivision.polygon.complex().counts(),
            p.complex().counts()
        );
        assert_eq!(l.schedule.bands.len(), 1);
        let kinds: Vec<_> = l.schedule.entries.iter().map(|e| e.kind).collect();
        use OpKind::{I, II};
        assert_eq!(kinds, vec![I, I, II, I, II, II]);
        assert!(verify_theorem1(&p, &LiftOptions::default())
            .unwrap()
            .holds());
    }

    #[test]
    fn hexagon_band_starts_with_i_and_ends_with_ii() {
        let mut coords = Vec::new();
        for (x, y) in [
            (4, 0),
            (2, 4),
            (-2, 4),
            (-4, 0),
            (-2, -4),
            (2, -4),
            (1, 0),
            (-1, 1),
            (-1, -1),
        ] {
            coords.push(Point2::from_ints(x, y));
        }
        let tris = [
            [6, 7, 8],
            [0, 1, 6],
            [1, 7, 6],
            [1, 2, 7],
            [2, 3, 7],
            [3, 8, 7],
            [3, 4, 8],
            [4, 5, 8],
            [5, 6, 8],
            [5, 0, 6],
        ];
        let c = Complex::from_triangles(9, &tris).unwrap();
        let p = PlanarPolygon::new(c, Some(coords), IdentificationScheme::trivial()).unwrap();
        let l = lift(&p, &LiftOptions::default()).unwrap();
        let kinds: Vec<_> = l.schedule.entries.iter().map(|e| e.kind).collect();
        assert_eq!(kinds.len(), 9);
        assert_eq!(kinds[0], OpKind::I);
        assert_eq!(kinds[8], OpKind::II);
        assert_eq!(kinds.iter().filter(|&&k| k == OpKind::II).count(), 3);
    }

    #[test]
    fn slab_counts_match_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [8, 20, 40] {
            let p = random_convex_polygon(&mut rng, n, 40);
            let prep = prepare(&p, None).unwrap();
            let h = order_vertices(
                &prep.polygon,
                prep.base,
                Metric::Euclidean,
                OrderRule::Guarded,
                prep.origin.as_ref(),
            )
            .unwrap();
            let s = subdivide_levels(&prep.polygon, &h).unwrap();
            assert_eq!(s.polygon.complex().euler_characteristic(), 1);
            for (t, tv) in prep.polygon.oriented_triangles().iter().enumerate() {
                let mut l: Vec<usize> = tv.iter().map(|&v| h.level[v]).collect();
                l.sort_unstable();
                let expect = if t == prep.base {
                    1
                } else {
                    2 * (l[2] - l[0]) - (l[0] < l[1]) as usize - (l[1] < l[2]) as usize
                };
                assert_eq!(s.parent.iter().filter(|&&x| x == t).count(), expect);
            }
            for tv in s.polygon.oriented_triangles() {
                let lo = tv.iter().map(|&v| s.level[v]).min().unwrap();
                let hi = tv.iter().map(|&v| s.level[v]).max().unwrap();
                assert!(hi - lo <= 1);
            }
        }
    }

    #[test]
    fn random_polygons_schedule_strictly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..30 {
            let p = random_convex_polygon(&mut rng, 4 + (i * 7) % 60, 60);
            for metric in [Metric::Euclidean, Metric::EdgePath] {
                let opts = LiftOptions {
                    metric,
                    ..Default::default()
                };
                let r = verify_theorem1(&p, &opts).unwrap_or_else(|e| panic!("polygon {i}: {e}"));
                assert!(r.holds(), "polygon {i}: {r:?}");
            }
        }
    }
}
