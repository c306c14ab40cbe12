use std::cmp::Ordering;
use std::collections::HashMap;

use num_traits::{One, Signed};

use super::{Curve, CutError};
use crate::complex::{Complex, EdgeId, VertexId};
use crate::rational::{area2, on_segment, orient, Point2, Q};
use crate::scheme::{EdgeWord, IdentificationScheme, PlanarPolygon};

/// Where the curve enters or leaves a triangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Locus {
    Vertex(VertexId),
    /// A point on the side between two corners; `vertex` is the id it got.
    Edge {
        vertex: VertexId,
        side: [VertexId; 2],
    },
    /// A point strictly inside the triangle.
    Interior(VertexId),
}

impl Locus {
    pub fn vertex(&self) -> VertexId {
        match *self {
            Locus::Vertex(v) | Locus::Interior(v) => v,
            Locus::Edge { vertex, .. } => vertex,
        }
    }
}

/// How a single passage of the curve through a triangle is subdivided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    /// The base point, joined to the corners of its triangle.
    Start,
    /// A point of the curve inside a triangle, joined to its corners.
    Waypoint,
    /// Enters at a corner, leaves through the opposite side: 2 triangles.
    VertexToOppositeEdge,
    /// Enters at a corner, leaves through a side at that corner: 4 triangles.
    VertexToAdjacentEdge,
    /// Enters and leaves at corners: 3 triangles.
    VertexToVertex,
    /// Enters and leaves through different sides: 3 triangles.
    EdgeToOtherEdge,
    /// Enters and leaves through the same side: 5 triangles.
    EdgeToSameEdge,
    /// Enters through a side, leaves at one of its ends: 4 triangles.
    EdgeToAdjacentVertex,
    /// Enters through a side, leaves at the opposite corner: 2 triangles.
    EdgeToOppositeVertex,
}

impl Case {
    /// Vertices the case adds to a bare triangle: entry and exit points
    /// not at corners, plus one interior waypoint where the case needs it.
    pub fn added_vertices(self) -> usize {
        match self {
            Case::Start | Case::Waypoint => 1,
            Case::VertexToOppositeEdge => 1,
            Case::VertexToAdjacentEdge => 2,
            Case::VertexToVertex => 1,
            Case::EdgeToOtherEdge => 2,
            Case::EdgeToSameEdge => 3,
            Case::EdgeToAdjacentVertex => 2,
            Case::EdgeToOppositeVertex => 1,
        }
    }

    /// Triangles the case produces from a bare triangle.
    pub fn triangles(self) -> usize {
        match self {
            Case::Start | Case::Waypoint => 3,
            Case::VertexToOppositeEdge | Case::EdgeToOppositeVertex => 2,
            Case::VertexToVertex | Case::EdgeToOtherEdge => 3,
            Case::VertexToAdjacentEdge | Case::EdgeToAdjacentVertex => 4,
            Case::EdgeToSameEdge => 5,
        }
    }
}

/// One subdivided triangle along the walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingEvent {
    /// Corners of the triangle entered, counterclockwise.
    pub simplex: [VertexId; 3],
    pub entry: Locus,
    /// `None` when the step stops at a waypoint inside the triangle.
    pub exit: Option<Locus>,
    pub waypoints: Vec<VertexId>,
    pub case: Case,
    /// False when the triangle already carried extra points on its sides,
    /// so the split is a fan rather than the case's fixed pattern.
    pub template: bool,
}

#[derive(Debug, Clone)]
pub struct Subdivided {
    pub polygon: PlanarPolygon,
    /// Curve edges in walking order.
    pub curve_edges: Vec<EdgeId>,
    /// Curve vertices in walking order (one more than edges).
    pub curve_vertices: Vec<VertexId>,
    pub events: Vec<CrossingEvent>,
}

struct Work<'a> {
    pts: Vec<Point2>,
    /// Counterclockwise vertex cycles; triangles with extra points on sides.
    cells: Vec<Vec<VertexId>>,
    corners: Vec<[VertexId; 3]>,
    /// Original boundary corners, counterclockwise from the anchor.
    bnd: Vec<VertexId>,
    /// Partner of each original boundary edge and whether the gluing keeps
    /// the counterclockwise direction.
    partner: Vec<Option<(usize, bool)>>,
    inserted_on: Vec<usize>,
    /// Segments of the input edges.
    input_edges: Vec<(Point2, Point2)>,
    on_curve: Vec<bool>,
    path: Vec<VertexId>,
    events: Vec<CrossingEvent>,
    curve: &'a Curve,
}

enum Step {
    Along(VertexId),
    Into(usize),
}

enum Pass {
    /// Points strictly inside the triangle, then the exit point.
    Exit {
        bends: Vec<Point2>,
        exit: Point2,
        next: usize,
    },
    /// The curve ends inside the triangle.
    End { bends: Vec<Point2> },
}

/// Splits triangles of `p` until the curve is a path of edges. The Euler
/// characteristic is unchanged. Boundary points of a glued arc are
/// mirrored onto the partner arc so the word stays consistent.
pub fn subdivide_along(p: &PlanarPolygon, curve: &Curve) -> Result<Subdivided, CutError> {
    let pts = p.coords().ok_or(CutError::NoCoordinates)?.to_vec();
    let nv = pts.len();
    let cells: Vec<Vec<VertexId>> = p.oriented_triangles().iter().map(|t| t.to_vec()).collect();
    let corners = p.oriented_triangles().to_vec();
    let bnd = p.boundary().to_vec();
    let partner = boundary_partners(p)?;
    let mut w = Work {
        pts,
        cells,
        corners,
        inserted_on: vec![0; bnd.len()],
        input_edges: p
            .complex()
            .edges()
            .iter()
            .map(|&[a, b]| {
                (
                    p.coords().unwrap()[a].clone(),
                    p.coords().unwrap()[b].clone(),
                )
            })
            .collect(),
        bnd,
        partner,
        on_curve: vec![false; nv],
        path: Vec::new(),
        events: Vec::new(),
        curve,
    };
    w.run()?;
    w.finish(p)
}

/// For each boundary edge index, the glued partner edge and orientation.
fn boundary_partners(p: &PlanarPolygon) -> Result<Vec<Option<(usize, bool)>>, CutError> {
    let n = p.boundary().len();
    let mut out = vec![None; n];
    let Some(word) = &p.scheme().word else {
        return Ok(out);
    };
    let mut runs: HashMap<&str, Vec<Vec<(usize, bool)>>> = HashMap::new();
    let mut offset = 0;
    for tok in &word.tokens {
        let mut es: Vec<(usize, bool)> =
            (0..tok.span).map(|k| (offset + k, !tok.inverted)).collect();
        if tok.inverted {
            es.reverse();
        }
        runs.entry(tok.label.as_str()).or_default().push(es);
        offset += tok.span;
    }
    for occ in runs.values() {
        if occ.len() != 2 {
            continue;
        }
        if occ[0].len() != occ[1].len() {
            return Err(CutError::Scheme(
                crate::scheme::SchemeError::ArcLengthMismatch {
                    label: String::new(),
                    first: occ[0].len(),
                    second: occ[1].len(),
                },
            ));
        }
        for (&(i, fi), &(j, fj)) in occ[0].iter().zip(&occ[1]) {
            out[i] = Some((j, fi == fj));
            out[j] = Some((i, fi == fj));
        }
    }
    Ok(out)
}

impl<'a> Work<'a> {
    fn pt(&self, v: VertexId) -> &Point2 {
        &self.pts[v]
    }

    fn add_vertex(&mut self, x: Point2) -> VertexId {
        self.pts.push(x);
        self.on_curve.push(false);
        self.pts.len() - 1
    }

    fn strictly_inside(&self, cell: usize, x: &Point2) -> bool {
        let t = self.corners[cell];
        (0..3).all(|k| orient(self.pt(t[k]), self.pt(t[(k + 1) % 3]), x) == Ordering::Greater)
    }

    fn live_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.cells.len()).filter(|&c| !self.cells[c].is_empty())
    }

    fn cells_with(&self, v: VertexId) -> Vec<usize> {
        self.live_cells()
            .filter(|&c| self.cells[c].contains(&v))
            .collect()
    }

    /// Cell whose cycle contains the directed step `a -> b`.
    fn cell_with_step(&self, a: VertexId, b: VertexId) -> Option<usize> {
        self.live_cells().find(|&c| {
            let l = &self.cells[c];
            (0..l.len()).any(|i| l[i] == a && l[(i + 1) % l.len()] == b)
        })
    }

    fn is_curve_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.path
            .windows(2)
            .any(|w| (w[0] == a && w[1] == b) || (w[0] == b && w[1] == a))
    }

    fn run(&mut self) -> Result<(), CutError> {
        let pts = self.curve.points().to_vec();
        let n = pts.len();
        let mut u = self.place_start(&pts[0])?;
        self.path.push(u);
        self.on_curve[u] = true;
        let start = u;
        let mut idx = 1;
        while idx < n {
            let target = pts[idx].clone();
            if &target == self.pt(u) {
                idx += 1;
                continue;
            }
            match self.step(u, &target)? {
                Step::Along(w) => {
                    let d_w = (self.pt(w) - self.pt(u)).norm2();
                    let d_t = (&target - self.pt(u)).norm2();
                    let w =
                        match d_t.cmp(&d_w) {
                            Ordering::Less => {
                                // Stopping part way along an edge added by an
                                // earlier passage: split it there.
                                let pu = self.pt(u).clone();
                                if self.input_edges.iter().any(|(a, b)| {
                                    on_segment(a, b, &pu) && on_segment(a, b, &target)
                                }) {
                                    return Err(CutError::CurveNotTransversal);
                                }
                                let v = self.split(u, w, target)?;
                                idx += 1;
                                v
                            }
                            Ordering::Equal => {
                                idx += 1;
                                w
                            }
                            Ordering::Greater => w,
                        };
                    self.arrive(w, start, idx == n)?;
                    u = w;
                }
                Step::Into(cell) => {
                    let (next_u, next_idx) = self.pass(cell, u, idx, &pts, start)?;
                    u = next_u;
                    idx = next_idx;
                }
            }
        }
        if self.curve.is_closed() && self.curve.returns_to_start() && u != start {
            return Err(CutError::CurveNotClosed);
        }
        Ok(())
    }

    fn arrive(&mut self, w: VertexId, start: VertexId, last: bool) -> Result<(), CutError> {
        if self.on_curve[w] && !(last && w == start && self.curve.is_closed()) {
            return Err(CutError::CurveSelfIntersects);
        }
        self.on_curve[w] = true;
        self.path.push(w);
        Ok(())
    }

    fn place_start(&mut self, x: &Point2) -> Result<VertexId, CutError> {
        if let Some(v) = (0..self.pts.len()).find(|&v| self.pt(v) == x) {
            return Ok(v);
        }
        for c in self.live_cells().collect::<Vec<_>>() {
            if self.strictly_inside(c, x) {
                let v = self.add_vertex(x.clone());
                let simplex = self.corners[c];
                self.star(c, v);
                self.events.push(CrossingEvent {
                    simplex,
                    entry: Locus::Interior(v),
                    exit: None,
                    waypoints: Vec::new(),
                    case: Case::Start,
                    template: true,
                });
                return Ok(v);
            }
        }
        for c in self.live_cells().collect::<Vec<_>>() {
            let l = self.cells[c].clone();
            for i in 0..l.len() {
                let (a, b) = (l[i], l[(i + 1) % l.len()]);
                if on_segment(self.pt(a), self.pt(b), x) {
                    let v = self.split(a, b, x.clone())?;
                    return Ok(v);
                }
            }
        }
        Err(CutError::CurveNotInPolygon)
    }

    /// Which way the curve leaves vertex `u` towards `target`.
    fn step(&self, u: VertexId, target: &Point2) -> Result<Step, CutError> {
        let pu = self.pt(u);
        let dir = target - pu;
        for c in self.cells_with(u) {
            let l = &self.cells[c];
            let i = l.iter().position(|&x| x == u).expect("member");
            let next = l[(i + 1) % l.len()];
            let prev = l[(i + l.len() - 1) % l.len()];
            let o_next = orient(pu, self.pt(next), target);
            let o_prev = orient(pu, self.pt(prev), target);
            if o_next == Ordering::Equal && (self.pt(next) - pu).dot(&dir).is_positive() {
                return Ok(Step::Along(next));
            }
            if o_prev == Ordering::Equal && (self.pt(prev) - pu).dot(&dir).is_positive() {
                return Ok(Step::Along(prev));
            }
            if o_next == Ordering::Greater && o_prev == Ordering::Less {
                return Ok(Step::Into(c));
            }
        }
        Err(CutError::CurveNotInPolygon)
    }

    /// Follows the curve from `u` through `cell` until it reaches the
    /// cell's boundary or ends.
    fn trace(&self, cell: usize, u: VertexId, mut idx: usize, pts: &[Point2]) -> Pass {
        let t = self.corners[cell];
        let mut q = self.pt(u).clone();
        let mut bends = Vec::new();
        loop {
            let target = &pts[idx];
            if self.strictly_inside(cell, target) {
                bends.push(target.clone());
                q = target.clone();
                idx += 1;
                if idx == pts.len() {
                    return Pass::End { bends };
                }
                continue;
            }
            let mut best: Option<Q> = None;
            for k in 0..3 {
                let (s0, s1) = (self.pt(t[k]), self.pt(t[(k + 1) % 3]));
                let aq = area2(s0, s1, &q);
                let at = area2(s0, s1, target);
                if aq.is_positive() && !at.is_positive() {
                    let s = &aq / (&aq - &at);
                    if best.as_ref().is_none_or(|b| &s < b) {
                        best = Some(s);
                    }
                }
            }
            let s = best.expect("segment leaves the triangle");
            let exit = q.lerp(target, &s);
            let next = if s == Q::one() { idx + 1 } else { idx };
            return Pass::Exit { bends, exit, next };
        }
    }

    /// One passage through `cell`. Returns the new current vertex and the
    /// index of the next curve point to head for.
    fn pass(
        &mut self,
        cell: usize,
        u: VertexId,
        idx: usize,
        pts: &[Point2],
        start: VertexId,
    ) -> Result<(VertexId, usize), CutError> {
        let simplex = self.corners[cell];
        let entry = self.locus(cell, u);
        match self.trace(cell, u, idx, pts) {
            Pass::End { bends } => {
                let f = self.waypoint(cell, entry, bends[0].clone())?;
                Ok((f, idx + 1))
            }
            Pass::Exit { bends, exit, next } => {
                if &exit == self.pt(u) {
                    // Loops back to the entry: pin the first bend and go on.
                    let f = self.waypoint(cell, entry, bends[0].clone())?;
                    return Ok((f, idx + 1));
                }
                let l = self.cells[cell].clone();
                let x = match l.iter().find(|&&v| self.pt(v) == &exit) {
                    Some(&v) => v,
                    None => {
                        let m = (0..l.len())
                            .find(|&m| {
                                on_segment(self.pt(l[m]), self.pt(l[(m + 1) % l.len()]), &exit)
                            })
                            .expect("exit lies on the cell boundary");
                        self.split(l[m], l[(m + 1) % l.len()], exit.clone())?
                    }
                };
                let exit_locus = self.locus(cell, x);
                let case = classify(&entry, &exit_locus);
                let extra = self.cells[cell].len() - 3;
                let hanging = usize::from(matches!(entry, Locus::Edge { .. }))
                    + usize::from(matches!(exit_locus, Locus::Edge { .. }));
                let needs_bend = matches!(
                    case,
                    Case::VertexToAdjacentEdge
                        | Case::VertexToVertex
                        | Case::EdgeToSameEdge
                        | Case::EdgeToAdjacentVertex
                );
                let clean = extra == hanging && bends.len() == usize::from(needs_bend);
                if clean {
                    let f = if needs_bend {
                        Some(self.add_vertex(bends[0].clone()))
                    } else {
                        None
                    };
                    if let Some(tris) = self.template(case, &simplex, &entry, &exit_locus, f) {
                        self.replace(cell, tris);
                        let mut waypoints = Vec::new();
                        if let Some(f) = f {
                            self.arrive(f, start, false)?;
                            waypoints.push(f);
                        }
                        self.events.push(CrossingEvent {
                            simplex,
                            entry,
                            exit: Some(exit_locus),
                            waypoints,
                            case,
                            template: true,
                        });
                        self.arrive(x, start, next == pts.len())?;
                        return Ok((x, next));
                    }
                    if let Some(f) = f {
                        // Geometry does not fit the pattern: pin the bend instead.
                        self.pts.pop();
                        self.on_curve.pop();
                        debug_assert_eq!(self.pts.len(), f);
                    }
                }
                if let Some(b) = bends.first() {
                    let f = self.waypoint(cell, entry, b.clone())?;
                    return Ok((f, idx + 1));
                }
                // Straight chord across a cell with extra side points.
                let l = self.cells[cell].clone();
                let i = l.iter().position(|&v| v == u).expect("entry");
                let mut rot = l.clone();
                rot.rotate_left(i);
                let j = rot.iter().position(|&v| v == x).expect("exit");
                let a: Vec<VertexId> = rot[..=j].to_vec();
                let mut b: Vec<VertexId> = rot[j..].to_vec();
                b.push(u);
                let mut tris = ear_clip(&a, &self.pts);
                tris.extend(ear_clip(&b, &self.pts));
                self.replace(cell, tris);
                self.events.push(CrossingEvent {
                    simplex,
                    entry,
                    exit: Some(exit_locus),
                    waypoints: Vec::new(),
                    case,
                    template: false,
                });
                self.arrive(x, start, next == pts.len())?;
                Ok((x, next))
            }
        }
    }

    /// Inserts a curve point strictly inside `cell` and joins it to every
    /// vertex of the cell.
    fn waypoint(&mut self, cell: usize, entry: Locus, x: Point2) -> Result<VertexId, CutError> {
        let simplex = self.corners[cell];
        let template = self.cells[cell].len() == 3;
        let f = self.add_vertex(x);
        self.star(cell, f);
        self.events.push(CrossingEvent {
            simplex,
            entry,
            exit: None,
            waypoints: vec![f],
            case: Case::Waypoint,
            template,
        });
        self.arrive(f, usize::MAX, false)?;
        Ok(f)
    }

    fn star(&mut self, cell: usize, f: VertexId) {
        let l = self.cells[cell].clone();
        let tris: Vec<[VertexId; 3]> = (0..l.len())
            .map(|i| [l[i], l[(i + 1) % l.len()], f])
            .collect();
        self.replace(cell, tris);
    }

    fn replace(&mut self, cell: usize, tris: Vec<[VertexId; 3]>) {
        let mut it = tris.into_iter();
        let first = it.next().expect("at least one triangle");
        self.cells[cell] = first.to_vec();
        self.corners[cell] = first;
        for t in it {
            self.cells.push(t.to_vec());
            self.corners.push(t);
        }
    }

    fn locus(&self, cell: usize, v: VertexId) -> Locus {
        let t = self.corners[cell];
        if t.contains(&v) {
            return Locus::Vertex(v);
        }
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            if on_segment(self.pt(a), self.pt(b), self.pt(v)) {
                return Locus::Edge {
                    vertex: v,
                    side: [a, b],
                };
            }
        }
        Locus::Interior(v)
    }

    /// Splits the segment `a b` at `x` in every cell that has it, mirroring
    /// the point onto the partner arc when the segment is glued boundary.
    fn split(&mut self, a: VertexId, b: VertexId, x: Point2) -> Result<VertexId, CutError> {
        if self.is_curve_edge(a, b) {
            return Err(CutError::CurveSelfIntersects);
        }
        let v = self.add_vertex(x.clone());
        let mut shared = false;
        for (s, t) in [(a, b), (b, a)] {
            if let Some(c) = self.cell_with_step(s, t) {
                let l = &mut self.cells[c];
                let i = (0..l.len())
                    .find(|&i| l[i] == s && l[(i + 1) % l.len()] == t)
                    .expect("step");
                l.insert(i + 1, v);
                if s == b {
                    shared = true;
                }
            }
        }
        if !shared {
            let i = self
                .boundary_edge_of(&x)
                .expect("boundary segment lies on a boundary edge");
            self.inserted_on[i] += 1;
            if let Some((j, same)) = self.partner[i] {
                let n = self.bnd.len();
                let (b0, b1) = (self.bnd[i], self.bnd[(i + 1) % n]);
                let d = self.pt(b1) - self.pt(b0);
                let t = (&x - self.pt(b0)).dot(&d) / d.norm2();
                let s = if same { t } else { Q::one() - t };
                let (c0, c1) = (self.bnd[j], self.bnd[(j + 1) % n]);
                let y = self.pt(c0).lerp(self.pt(c1), &s);
                if !(0..self.pts.len()).any(|w| self.pt(w) == &y) {
                    let (p, r) = self
                        .segment_containing(&y)
                        .expect("partner point on the boundary");
                    let w = self.add_vertex(y.clone());
                    let c = self.cell_with_step(p, r).expect("boundary cell");
                    let l = &mut self.cells[c];
                    let k = (0..l.len())
                        .find(|&k| l[k] == p && l[(k + 1) % l.len()] == r)
                        .expect("step");
                    l.insert(k + 1, w);
                    self.inserted_on[j] += 1;
                }
            }
        }
        Ok(v)
    }

    fn boundary_edge_of(&self, x: &Point2) -> Option<usize> {
        let n = self.bnd.len();
        (0..n).find(|&i| on_segment(self.pt(self.bnd[i]), self.pt(self.bnd[(i + 1) % n]), x))
    }

    /// Boundary step of some cell whose segment contains `y` strictly.
    fn segment_containing(&self, y: &Point2) -> Option<(VertexId, VertexId)> {
        for c in self.live_cells() {
            let l = &self.cells[c];
            for i in 0..l.len() {
                let (p, r) = (l[i], l[(i + 1) % l.len()]);
                if self.cell_with_step(r, p).is_none() && on_segment(self.pt(p), self.pt(r), y) {
                    return Some((p, r));
                }
            }
        }
        None
    }

    /// The fixed splitting pattern for a clean passage, or `None` if the
    /// waypoint sits where the pattern would fold.
    fn template(
        &self,
        case: Case,
        t: &[VertexId; 3],
        entry: &Locus,
        exit: &Locus,
        f: Option<VertexId>,
    ) -> Option<Vec<[VertexId; 3]>> {
        let rot = |v: VertexId| -> [VertexId; 3] {
            let k = t.iter().position(|&x| x == v).expect("corner");
            [t[k], t[(k + 1) % 3], t[(k + 2) % 3]]
        };
        let tris: Vec<[VertexId; 3]> = match case {
            Case::VertexToOppositeEdge | Case::EdgeToOppositeVertex => {
                let (corner, d) = match (entry, exit) {
                    (Locus::Vertex(a), e) | (e, Locus::Vertex(a)) => (*a, e.vertex()),
                    _ => return None,
                };
                let [a, b, c] = rot(corner);
                vec![[a, b, d], [a, d, c]]
            }
            Case::VertexToVertex => {
                let f = f?;
                let [a, b, c] = *t;
                vec![[a, b, f], [b, c, f], [c, a, f]]
            }
            Case::VertexToAdjacentEdge | Case::EdgeToAdjacentVertex => {
                let f = f?;
                let (corner, e, side) = match (entry, exit) {
                    (Locus::Vertex(a), Locus::Edge { vertex, side })
                    | (Locus::Edge { vertex, side }, Locus::Vertex(a)) => (*a, *vertex, *side),
                    _ => return None,
                };
                let [a, b, c] = rot(corner);
                if side == [c, a] {
                    vec![[a, b, f], [b, e, f], [e, a, f], [b, c, e]]
                } else {
                    vec![[a, e, f], [e, c, f], [c, a, f], [e, b, c]]
                }
            }
            Case::EdgeToOtherEdge => {
                let (
                    Locus::Edge {
                        vertex: p,
                        side: s1,
                    },
                    Locus::Edge {
                        vertex: q,
                        side: s2,
                    },
                ) = (entry, exit)
                else {
                    return None;
                };
                // Shared corner x with sides x->y (holding P) and z->x (holding Q).
                let (pp, qq, entry_first) = if s1[0] == s2[1] {
                    (*p, *q, true)
                } else {
                    (*q, *p, false)
                };
                let x = if entry_first { s1[0] } else { s2[0] };
                let [x, y, z] = rot(x);
                let mut out = vec![[x, pp, qq]];
                if entry_first {
                    out.push([pp, y, qq]);
                    out.push([y, z, qq]);
                } else {
                    out.push([pp, y, z]);
                    out.push([pp, z, qq]);
                }
                out
            }
            Case::EdgeToSameEdge => {
                let f = f?;
                let (Locus::Edge { vertex: p, side }, Locus::Edge { vertex: q, .. }) =
                    (entry, exit)
                else {
                    return None;
                };
                let [s0, s1] = *side;
                let o = *t.iter().find(|&&v| v != s0 && v != s1).expect("corner");
                let near = |v: VertexId| (self.pt(v) - self.pt(s0)).norm2();
                let (p1, p2) = if near(*p) < near(*q) {
                    (*p, *q)
                } else {
                    (*q, *p)
                };
                vec![
                    [s0, p1, o],
                    [p2, s1, o],
                    [p1, p2, f],
                    [p2, o, f],
                    [o, p1, f],
                ]
            }
            Case::Start | Case::Waypoint => return None,
        };
        let ok = tris
            .iter()
            .all(|tr| orient(self.pt(tr[0]), self.pt(tr[1]), self.pt(tr[2])) == Ordering::Greater);
        ok.then_some(tris)
    }

    fn finish(mut self, p: &PlanarPolygon) -> Result<Subdivided, CutError> {
        let mut tris: Vec<[VertexId; 3]> = Vec::new();
        for c in 0..self.cells.len() {
            let l = std::mem::take(&mut self.cells[c]);
            match l.len() {
                0 => {}
                3 => tris.push([l[0], l[1], l[2]]),
                _ => tris.extend(ear_clip(&l, &self.pts)),
            }
        }
        let complex = Complex::from_triangles(self.pts.len(), &tris)?;
        let scheme = match &p.scheme().word {
            None => p.scheme().clone(),
            Some(word) => {
                let mut tokens = Vec::new();
                let mut offset = 0;
                for tok in &word.tokens {
                    let extra: usize = (offset..offset + tok.span)
                        .map(|i| self.inserted_on[i])
                        .sum();
                    let mut nt = tok.clone();
                    nt.span += extra;
                    tokens.push(nt);
                    offset += tok.span;
                }
                IdentificationScheme {
                    word: Some(EdgeWord { tokens }),
                    start: Some(p.boundary()[0]),
                    glue: p.scheme().glue.clone(),
                }
            }
        };
        let polygon = PlanarPolygon::new(complex, Some(self.pts), scheme)?;
        let index = polygon.complex().edge_index();
        let curve_edges = self
            .path
            .windows(2)
            .map(|w| index[&(w[0].min(w[1]), w[0].max(w[1]))])
            .collect();
        if self.curve.is_closed() && !self.curve.returns_to_start() {
            let id = polygon.identification()?;
            let (a, b) = (self.path[0], *self.path.last().expect("nonempty"));
            if id.vertex[a] != id.vertex[b] {
                return Err(CutError::CurveNotClosed);
            }
        }
        Ok(Subdivided {
            polygon,
            curve_edges,
            curve_vertices: self.path,
            events: self.events,
        })
    }
}

fn classify(entry: &Locus, exit: &Locus) -> Case {
    match (entry, exit) {
        (Locus::Vertex(_), Locus::Vertex(_)) => Case::VertexToVertex,
        (Locus::Vertex(a), Locus::Edge { side, .. }) => {
            if side.contains(a) {
                Case::VertexToAdjacentEdge
            } else {
                Case::VertexToOppositeEdge
            }
        }
        (Locus::Edge { side, .. }, Locus::Vertex(b)) => {
            if side.contains(b) {
                Case::EdgeToAdjacentVertex
            } else {
                Case::EdgeToOppositeVertex
            }
        }
        (Locus::Edge { side: s1, .. }, Locus::Edge { side: s2, .. }) => {
            if s1 == s2 {
                Case::EdgeToSameEdge
            } else {
                Case::EdgeToOtherEdge
            }
        }
        _ => Case::Waypoint,
    }
}

/// Triangulates a simple counterclockwise polygon, possibly with straight
/// angles, by clipping ears.
fn ear_clip(poly: &[VertexId], pts: &[Point2]) -> Vec<[VertexId; 3]> {
    let mut ring: Vec<VertexId> = poly.to_vec();
    let mut out = Vec::new();
    while ring.len() > 3 {
        let n = ring.len();
        let ear = (0..n).find(|&i| {
            let (a, b, c) = (ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]);
            if orient(&pts[a], &pts[b], &pts[c]) != Ordering::Greater {
                return false;
            }
            ring.iter().all(|&v| {
                v == a || v == b || v == c || {
                    let inside = orient(&pts[a], &pts[b], &pts[v]) != Ordering::Less
                        && orient(&pts[b], &pts[c], &pts[v]) != Ordering::Less
                        && orient(&pts[c], &pts[a], &pts[v]) != Ordering::Less;
                    !inside
                }
            })
        });
        let i = ear.expect("simple polygon has an ear");
        out.push([ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]]);
        ring.remove(i);
    }
    if ring.len() == 3 && orient(&pts[ring[0]], &pts[ring[1]], &pts[ring[2]]) == Ordering::Greater {
        out.push([ring[0], ring[1], ring[2]]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q_frac;
    use num_traits::Zero;

    fn pt(x: i64, y: i64) -> Point2 {
        Point2::from_ints(x, y)
    }

    fn single() -> PlanarPolygon {
        let c = Complex::from_triangles(3, &[[0, 1, 2]]).unwrap();
        let coords = vec![pt(0, 0), pt(12, 0), pt(0, 12)];
        PlanarPolygon::new(c, Some(coords), IdentificationScheme::trivial()).unwrap()
    }

    fn run(points: Vec<Point2>) -> Subdivided {
        let p = single();
        let closed = points.first() == points.last();
        let curve = Curve::new(points, closed).unwrap();
        let s = subdivide_along(&p, &curve).unwrap();
        s.polygon.check_embedding().unwrap();
        assert_eq!(s.polygon.complex().euler_characteristic(), 1);
        s
    }

    fn check_case(points: Vec<Point2>, case: Case) {
        let s = run(points);
        let ev: Vec<_> = s.events.iter().filter(|e| e.case != Case::Start).collect();
        assert_eq!(ev.len(), 1, "{:?}", s.events);
        assert_eq!(ev[0].case, case);
        assert!(ev[0].template);
        assert_eq!(s.polygon.complex().n_vertices() - 3, case.added_vertices());
        assert_eq!(s.polygon.complex().n_triangles(), case.triangles());
    }

    #[test]
    fn vertex_entry_cases() {
        check_case(vec![pt(0, 0), pt(6, 6)], Case::VertexToOppositeEdge);
        check_case(
            vec![pt(0, 0), pt(4, 2), pt(8, 0)],
            Case::VertexToAdjacentEdge,
        );
        check_case(
            vec![pt(0, 0), pt(2, 4), pt(0, 8)],
            Case::VertexToAdjacentEdge,
        );
        check_case(vec![pt(0, 0), pt(5, 5), pt(12, 0)], Case::VertexToVertex);
    }

    #[test]
    fn edge_entry_cases() {
        check_case(vec![pt(4, 0), pt(0, 4)], Case::EdgeToOtherEdge);
        check_case(vec![pt(0, 4), pt(4, 0)], Case::EdgeToOtherEdge);
        check_case(vec![pt(4, 0), pt(6, 6)], Case::EdgeToOtherEdge);
        check_case(vec![pt(2, 0), pt(5, 2), pt(8, 0)], Case::EdgeToSameEdge);
        check_case(vec![pt(8, 0), pt(5, 2), pt(2, 0)], Case::EdgeToSameEdge);
        check_case(
            vec![pt(4, 0), pt(2, 2), pt(0, 0)],
            Case::EdgeToAdjacentVertex,
        );
        check_case(
            vec![pt(4, 0), pt(8, 2), pt(12, 0)],
            Case::EdgeToAdjacentVertex,
        );
        check_case(vec![pt(4, 0), pt(0, 12)], Case::EdgeToOppositeVertex);
    }

    #[test]
    fn interior_base_point_is_joined_to_corners() {
        let s = run(vec![pt(2, 2), pt(6, 0)]);
        assert_eq!(s.events[0].case, Case::Start);
        assert_eq!(s.events[1].case, Case::VertexToOppositeEdge);
        // Base point star (3) then its sub-triangle split in two.
        assert_eq!(s.polygon.complex().n_triangles(), 4);
        assert_eq!(s.curve_edges.len(), 1);
    }

    #[test]
    fn existing_edge_path_adds_nothing() {
        let c = Complex::from_triangles(4, &[[0, 1, 2], [0, 2, 3]]).unwrap();
        let coords = vec![pt(0, 0), pt(4, 0), pt(4, 4), pt(0, 4)];
        let p = PlanarPolygon::new(c, Some(coords), IdentificationScheme::trivial()).unwrap();
        let curve = Curve::new(vec![pt(4, 0), pt(0, 0), pt(4, 4)], false).unwrap();
        let s = subdivide_along(&p, &curve).unwrap();
        assert_eq!(s.polygon.complex().counts(), p.complex().counts());
        assert_eq!(s.curve_vertices, vec![1, 0, 2]);
    }

    #[test]
    fn partial_edge_overlap_is_not_transversal() {
        let p = single();
        let curve = Curve::new(vec![pt(0, 0), pt(4, 0), pt(4, 4)], false).unwrap();
        assert_eq!(
            subdivide_along(&p, &curve).unwrap_err(),
            CutError::CurveNotTransversal
        );
    }

    #[test]
    fn glued_boundary_points_are_mirrored() {
        // Square torus; the curve runs from the bottom side to the top side.
        let c = Complex::from_triangles(4, &[[0, 1, 2], [0, 2, 3]]).unwrap();
        let coords = vec![pt(0, 0), pt(4, 0), pt(4, 4), pt(0, 4)];
        let w = crate::scheme::parse_word("a b a- b-").unwrap();
        let p = PlanarPolygon::new(c, Some(coords), IdentificationScheme::from_word(w)).unwrap();
        let x = Point2::new(q_frac(1, 1), Q::zero());
        let y = Point2::new(q_frac(1, 1), q_frac(4, 1));
        let curve = Curve::new(vec![x, y], true).unwrap();
        let s = subdivide_along(&p, &curve).unwrap();
        let qc = crate::scheme::quotient(&s.polygon).unwrap();
        assert_eq!(qc.euler_characteristic(), 0);
        assert_eq!(
            s.polygon.scheme().word.as_ref().unwrap().to_string(),
            "a:2 b a-:2 b-"
        );
        let id = s.polygon.identification().unwrap();
        let (a, b) = (s.curve_vertices[0], *s.curve_vertices.last().unwrap());
        assert_eq!(id.vertex[a], id.vertex[b]);
    }

    #[test]
    fn closed_loop_inside_one_triangle() {
        let s = run(vec![pt(2, 2), pt(5, 2), pt(2, 5), pt(2, 2)]);
        assert_eq!(s.curve_edges.len(), 3);
        assert_eq!(s.curve_vertices.first(), s.curve_vertices.last());
    }
}
