//! Hole expansion: removing triangles one at a time from a complex.
//!
//! The hole starts either as the outer face of a disc (the face removed
//! before flattening a polyhedron) or as one triangle. Every face on an
//! edge, including the outer face, must be gone before the edge is. An edge
//! whose other faces are all removed is *free* for the triangle being
//! taken; a vertex is *exhausted* when it has no edges left afterwards.
//! Operations I, II and III free 1, 2 and 3 edges and exhaust 0, 1 and 2
//! vertices. Taking the very last triangle of a disc frees three edges and
//! exhausts all three vertices.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use arrayvec::ArrayVec;

use crate::complex::{CellCounts, Complex, EdgeId, TriId, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    I,
    II,
    III,
    /// Last triangle of an outer-face run: three edges and three vertices.
    Final,
}

impl OpKind {
    /// `(dn0, dn1, dn2)`.
    pub fn delta(self) -> (i64, i64, i64) {
        match self {
            OpKind::I => (0, -1, -1),
            OpKind::II => (-1, -2, -1),
            OpKind::III => (-2, -3, -1),
            OpKind::Final => (-3, -3, -1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OpKind::I => "I",
            OpKind::II => "II",
            OpKind::III => "III",
            OpKind::Final => "FINAL",
        }
    }

    pub fn parse(s: &str) -> Option<OpKind> {
        match s {
            "I" => Some(OpKind::I),
            "II" => Some(OpKind::II),
            "III" => Some(OpKind::III),
            "FINAL" => Some(OpKind::Final),
            _ => None,
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Hole boundary stays one simple cycle and the remaining triangles
    /// stay edge-connected.
    Strict,
    /// Only the cell deltas are checked.
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Seed {
    Outer,
    Triangle(TriId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InvalidReason {
    AlreadyRemoved,
    NoEdgeOnHole,
    VertexStarNotExhausted,
    WouldDisconnect,
    BoundaryNotSimple,
    Op3Disabled,
    SeedOnBoundary,
}

impl InvalidReason {
    pub fn name(self) -> &'static str {
        match self {
            InvalidReason::AlreadyRemoved => "AlreadyRemoved",
            InvalidReason::NoEdgeOnHole => "NoEdgeOnHole",
            InvalidReason::VertexStarNotExhausted => "VertexStarNotExhausted",
            InvalidReason::WouldDisconnect => "WouldDisconnect",
            InvalidReason::BoundaryNotSimple => "BoundaryNotSimple",
            InvalidReason::Op3Disabled => "Op3Disabled",
            InvalidReason::SeedOnBoundary => "SeedOnBoundary",
        }
    }
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("unknown triangle {0}")]
    UnknownTriangle(TriId),
    #[error("complex has no boundary, so there is no outer face to remove")]
    NoOuterFace,
    #[error("triangle {tri} is {actual:?}, not {expected}")]
    ClassificationMismatch {
        tri: TriId,
        expected: OpKind,
        actual: Result<OpKind, InvalidReason>,
    },
}

/// Classification options besides the mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rules {
    pub mode: Mode,
    pub allow_op3: bool,
}

impl Rules {
    pub fn new(mode: Mode, allow_op3: bool) -> Self {
        Rules { mode, allow_op3 }
    }
}

/// The removed region and what remains of the complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoleState {
    seed: Seed,
    removed: Vec<bool>,
    edge_alive: Vec<bool>,
    vertex_alive: Vec<bool>,
    /// Faces (outer face included) still present on each edge.
    edge_live_faces: Vec<u32>,
    edge_removed_faces: Vec<u32>,
    edge_has_outer: Vec<bool>,
    /// Remaining edge-ends at each vertex.
    vertex_ends: Vec<u32>,
    /// Hole-boundary edge-ends at each vertex.
    hole_ends: Vec<u32>,
    hole_edges: usize,
    counts: CellCounts,
    remaining_tris: usize,
    boundary_simple: bool,
}

/// What removing one triangle would do.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Effect {
    free: ArrayVec<EdgeId, 3>,
    kept: ArrayVec<EdgeId, 3>,
    exhausted: ArrayVec<VertexId, 3>,
}

impl HoleState {
    /// Removes the seed's open 2-cell (or the outer face) and nothing else.
    pub fn new(c: &Complex, seed: Seed) -> Result<Self, EngineError> {
        let ne = c.n_edges();
        let edge_has_outer: Vec<bool> = (0..ne).map(|e| c.edge_triangles(e).len() == 1).collect();
        let mut h = HoleState {
            seed,
            removed: vec![false; c.n_triangles()],
            edge_alive: vec![true; ne],
            vertex_alive: vec![true; c.n_vertices()],
            edge_live_faces: (0..ne)
                .map(|e| c.edge_triangles(e).len() as u32 + edge_has_outer[e] as u32)
                .collect(),
            edge_removed_faces: vec![0; ne],
            edge_has_outer,
            vertex_ends: c.vertex_degrees().into_iter().map(|d| d as u32).collect(),
            hole_ends: vec![0; c.n_vertices()],
            hole_edges: 0,
            counts: c.counts(),
            remaining_tris: c.n_triangles(),
            boundary_simple: false,
        };
        match seed {
            Seed::Outer => {
                if !h.edge_has_outer.iter().any(|&b| b) {
                    return Err(EngineError::NoOuterFace);
                }
                for e in 0..ne {
                    if h.edge_has_outer[e] {
                        h.edge_live_faces[e] -= 1;
                        h.bump_removed(c, e, 1);
                    }
                }
            }
            Seed::Triangle(t) => {
                if t >= c.n_triangles() {
                    return Err(EngineError::UnknownTriangle(t));
                }
                h.removed[t] = true;
                h.remaining_tris -= 1;
                h.counts.n2 -= 1;
                for (e, m) in distinct_edges(c, t) {
                    h.edge_live_faces[e] -= m;
                    h.bump_removed(c, e, m);
                }
            }
        }
        h.boundary_simple = h.is_simple_cycle(c);
        Ok(h)
    }

    fn bump_removed(&mut self, c: &Complex, e: EdgeId, m: u32) {
        let was = self.on_hole(e);
        self.edge_removed_faces[e] += m;
        if !was && self.on_hole(e) {
            let [a, b] = c.edge(e);
            self.hole_ends[a] += 1;
            self.hole_ends[b] += 1;
            self.hole_edges += 1;
        }
    }

    fn on_hole(&self, e: EdgeId) -> bool {
        self.edge_alive[e] && self.edge_removed_faces[e] > 0
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }

    pub fn counts(&self) -> CellCounts {
        self.counts
    }

    pub fn is_removed(&self, t: TriId) -> bool {
        self.removed[t]
    }

    pub fn remaining_triangles(&self) -> usize {
        self.remaining_tris
    }

    pub fn edge_alive(&self, e: EdgeId) -> bool {
        self.edge_alive[e]
    }

    pub fn vertex_alive(&self, v: VertexId) -> bool {
        self.vertex_alive[v]
    }

    /// Remaining edges with at least one removed face, in id order.
    pub fn hole_boundary(&self) -> Vec<EdgeId> {
        (0..self.edge_alive.len())
            .filter(|&e| self.on_hole(e))
            .collect()
    }

    /// True iff the hole boundary is one cycle through distinct vertices.
    pub fn is_simple_cycle(&self, c: &Complex) -> bool {
        let edges = self.hole_boundary();
        if edges.is_empty() {
            return false;
        }
        let mut adj: std::collections::HashMap<VertexId, Vec<(VertexId, EdgeId)>> =
            Default::default();
        for &e in &edges {
            let [a, b] = c.edge(e);
            if a == b {
                return false;
            }
            adj.entry(a).or_default().push((b, e));
            adj.entry(b).or_default().push((a, e));
        }
        if adj.values().any(|n| n.len() != 2) {
            return false;
        }
        let start = c.edge(edges[0])[0];
        let (mut prev_e, mut cur) = (edges[0], c.edge(edges[0])[1]);
        let mut steps = 1;
        while cur != start {
            let nb = &adj[&cur];
            let &(nx, ne) = nb.iter().find(|&&(_, e)| e != prev_e).unwrap_or(&nb[0]);
            prev_e = ne;
            cur = nx;
            steps += 1;
            if steps > edges.len() {
                return false;
            }
        }
        steps == edges.len()
    }

    /// Remaining complex re-enumerated from scratch.
    pub fn enumerate_remaining(&self, c: &Complex) -> CellCounts {
        let mut n1 = 0;
        let mut used = vec![false; c.n_vertices()];
        for e in 0..c.n_edges() {
            let tri_alive = c.edge_triangles(e).iter().any(|&t| !self.removed[t]);
            let outer_alive = self.edge_has_outer[e] && self.seed != Seed::Outer;
            let alive = tri_alive || outer_alive || c.edge_triangles(e).is_empty();
            if alive {
                n1 += 1;
                let [a, b] = c.edge(e);
                used[a] = true;
                used[b] = true;
            }
        }
        let vt = c.vertex_degrees();
        let n0 = (0..c.n_vertices())
            .filter(|&v| used[v] || vt[v] == 0)
            .count();
        CellCounts::new(n0, n1, self.removed.iter().filter(|r| !**r).count())
    }

    fn effect(&self, c: &Complex, t: TriId) -> Effect {
        let mut free = ArrayVec::new();
        let mut kept = ArrayVec::new();
        let mut gone_ends: ArrayVec<(VertexId, u32), 3> = ArrayVec::new();
        for (e, m) in distinct_edges(c, t) {
            if self.edge_live_faces[e] == m {
                free.push(e);
                let [a, b] = c.edge(e);
                for v in [a, b] {
                    match gone_ends.iter_mut().find(|(x, _)| *x == v) {
                        Some(g) => g.1 += 1,
                        None => gone_ends.push((v, 1)),
                    }
                }
            } else {
                kept.push(e);
            }
        }
        let mut exhausted = ArrayVec::new();
        for v in distinct_vertices(c, t) {
            let gone = gone_ends.iter().find(|(x, _)| *x == v).map_or(0, |g| g.1);
            if self.vertex_alive[v] && self.vertex_ends[v] == gone {
                exhausted.push(v);
            }
        }
        Effect {
            free,
            kept,
            exhausted,
        }
    }

    /// Kind of removing `t`, or why it is not allowed.
    pub fn classify(&self, c: &Complex, t: TriId, rules: Rules) -> Result<OpKind, InvalidReason> {
        if t >= self.removed.len() || self.removed[t] {
            return Err(InvalidReason::AlreadyRemoved);
        }
        let eff = self.effect(c, t);
        let h = eff.free.len();
        let x = eff.exhausted.len();
        let kind = match (h, x) {
            (0, _) => return Err(InvalidReason::NoEdgeOnHole),
            (1, 0) => OpKind::I,
            (2, 1) => OpKind::II,
            (3, 2) => {
                if !rules.allow_op3 {
                    return Err(InvalidReason::Op3Disabled);
                }
                OpKind::III
            }
            (3, 3) if self.remaining_tris == 1 => OpKind::Final,
            (h, x) if x + 1 < h => return Err(InvalidReason::VertexStarNotExhausted),
            _ => return Err(InvalidReason::WouldDisconnect),
        };
        if rules.mode == Mode::Strict {
            if !self.stays_simple(c, t, &eff) {
                return Err(InvalidReason::BoundaryNotSimple);
            }
            if !self.stays_connected(c, t, &eff) {
                return Err(InvalidReason::WouldDisconnect);
            }
        }
        Ok(kind)
    }

    fn stays_simple(&self, c: &Complex, t: TriId, eff: &Effect) -> bool {
        if !self.boundary_simple {
            let mut next = self.clone();
            next.remove(c, t, eff);
            return next.is_simple_cycle(c) || next.remaining_tris == 0;
        }
        let verts = distinct_vertices(c, t);
        let mut ends: ArrayVec<i64, 3> = verts.iter().map(|&v| self.hole_ends[v] as i64).collect();
        let idx = |v: VertexId| verts.iter().position(|&x| x == v).expect("corner");
        for &e in &eff.free {
            let [a, b] = c.edge(e);
            ends[idx(a)] -= 1;
            ends[idx(b)] -= 1;
        }
        for &e in &eff.kept {
            if self.edge_removed_faces[e] == 0 {
                let [a, b] = c.edge(e);
                ends[idx(a)] += 1;
                ends[idx(b)] += 1;
            }
        }
        verts
            .iter()
            .zip(&ends)
            .all(|(v, &k)| eff.exhausted.contains(v) || k == 0 || k == 2)
    }

    fn stays_connected(&self, c: &Complex, t: TriId, eff: &Effect) -> bool {
        let mut nbrs: ArrayVec<TriId, 6> = ArrayVec::new();
        for &e in &eff.kept {
            for &u in c.edge_triangles(e) {
                if u != t && !self.removed[u] && !nbrs.contains(&u) {
                    nbrs.push(u);
                }
            }
        }
        if nbrs.len() <= 1 {
            return true;
        }
        let first = nbrs[0];
        let rest = &nbrs[1..];
        // Walk the star of a shared corner first; fall back to a full search.
        for v in distinct_vertices(c, t) {
            if nbrs.iter().all(|&u| c.triangle(u).has_vertex(v))
                && self.reaches_all(c, t, first, rest, Some(v))
            {
                return true;
            }
        }
        self.reaches_all(c, t, first, rest, None)
    }

    fn reaches_all(
        &self,
        c: &Complex,
        skip: TriId,
        from: TriId,
        targets: &[TriId],
        around: Option<VertexId>,
    ) -> bool {
        // Stars are small, so a list beats hashing there.
        let mut small: Vec<TriId> = vec![from, skip];
        let mut big: HashSet<TriId> = if around.is_none() {
            HashSet::from([from, skip])
        } else {
            HashSet::new()
        };
        let mut seen = |w: TriId| {
            if around.is_none() {
                big.insert(w)
            } else if small.contains(&w) {
                false
            } else {
                small.push(w);
                true
            }
        };
        let mut queue = VecDeque::from([from]);
        let mut found = 0;
        while let Some(u) = queue.pop_front() {
            for &e in &c.triangle(u).e {
                if let Some(v) = around {
                    if !c.edge(e).contains(&v) {
                        continue;
                    }
                }
                for &w in c.edge_triangles(e) {
                    if !self.removed[w] && seen(w) {
                        if targets.contains(&w) {
                            found += 1;
                            if found == targets.len() {
                                return true;
                            }
                        }
                        queue.push_back(w);
                    }
                }
            }
        }
        false
    }

    /// Removes `t`, which must classify (leniently, op III allowed) as `kind`.
    pub fn apply(&mut self, c: &Complex, t: TriId, kind: OpKind) -> Result<(), EngineError> {
        if t >= self.removed.len() {
            return Err(EngineError::UnknownTriangle(t));
        }
        let actual = self.classify(c, t, Rules::new(Mode::Lenient, true));
        if actual != Ok(kind) {
            return Err(EngineError::ClassificationMismatch {
                tri: t,
                expected: kind,
                actual,
            });
        }
        self.commit(c, t);
        Ok(())
    }

    /// Removes an already classified triangle.
    fn commit(&mut self, c: &Complex, t: TriId) {
        let eff = self.effect(c, t);
        let was_simple = self.boundary_simple;
        let local_ok = was_simple && self.stays_simple(c, t, &eff);
        self.remove(c, t, &eff);
        self.boundary_simple = if local_ok && self.remaining_tris > 0 && self.hole_edges > 0 {
            true
        } else {
            self.is_simple_cycle(c)
        };
    }

    fn remove(&mut self, c: &Complex, t: TriId, eff: &Effect) {
        self.removed[t] = true;
        self.remaining_tris -= 1;
        self.counts.n2 -= 1;
        for (e, m) in distinct_edges(c, t) {
            self.edge_live_faces[e] -= m;
            if eff.free.contains(&e) {
                let [a, b] = c.edge(e);
                if self.on_hole(e) {
                    self.hole_ends[a] -= 1;
                    self.hole_ends[b] -= 1;
                    self.hole_edges -= 1;
                }
                self.edge_removed_faces[e] += m;
                self.edge_alive[e] = false;
                self.counts.n1 -= 1;
                self.vertex_ends[a] -= 1;
                self.vertex_ends[b] -= 1;
            } else {
                self.bump_removed(c, e, m);
            }
        }
        for &v in &eff.exhausted {
            self.vertex_alive[v] = false;
            self.counts.n0 -= 1;
        }
    }

    /// True when nothing but the original boundary (for triangle seeds) or
    /// nothing at all (for the outer seed) remains.
    pub fn is_complete(&self, c: &Complex) -> bool {
        if self.remaining_tris != 0 {
            return false;
        }
        match self.seed {
            Seed::Outer => self.counts == CellCounts::default(),
            Seed::Triangle(_) => {
                (0..c.n_edges()).all(|e| self.edge_alive[e] == self.edge_has_outer[e])
            }
        }
    }
}

/// Distinct sides of `t` with their multiplicity in `t`.
fn distinct_edges(c: &Complex, t: TriId) -> ArrayVec<(EdgeId, u32), 3> {
    let mut out: ArrayVec<(EdgeId, u32), 3> = ArrayVec::new();
    for &e in &c.triangle(t).e {
        match out.iter_mut().find(|(x, _)| *x == e) {
            Some(p) => p.1 += 1,
            None => out.push((e, 1)),
        }
    }
    out
}

fn distinct_vertices(c: &Complex, t: TriId) -> ArrayVec<VertexId, 3> {
    let mut out = ArrayVec::new();
    for &v in &c.triangle(t).v {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Convenience wrapper matching the free-function style of the other modules.
pub fn init_hole(c: &Complex, seed: Seed) -> Result<HoleState, EngineError> {
    HoleState::new(c, seed)
}

pub fn classify(
    c: &Complex,
    h: &HoleState,
    t: TriId,
    rules: Rules,
) -> Result<OpKind, InvalidReason> {
    h.classify(c, t, rules)
}

pub fn is_simple_cycle(c: &Complex, h: &HoleState) -> bool {
    h.is_simple_cycle(c)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovalStep {
    /// 1-based position in the order.
    pub index: usize,
    pub tri: TriId,
    pub kind: OpKind,
    pub counts: CellCounts,
    pub boundary_simple: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub index: usize,
    pub tri: TriId,
    pub reason: InvalidReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub seed: Seed,
    pub initial: CellCounts,
    pub steps: Vec<RemovalStep>,
    pub failure: Option<Failure>,
    /// All triangles gone and only the expected remainder left.
    pub complete: bool,
}

impl Trace {
    pub fn success(&self) -> bool {
        self.failure.is_none() && self.complete
    }

    pub fn final_counts(&self) -> CellCounts {
        self.steps.last().map_or(self.initial, |s| s.counts)
    }

    /// One line per step, `"<k> <tri> <op|FAIL:reason> <n0> <n1> <n2>"`,
    /// triangles numbered from 1, preceded by a seed line for step 0.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let seed = match self.seed {
            Seed::Outer => "outer".to_string(),
            Seed::Triangle(t) => (t + 1).to_string(),
        };
        s.push_str(&format!("0 {seed} seed {}\n", self.initial));
        for st in &self.steps {
            s.push_str(&format!(
                "{} {} {} {}\n",
                st.index,
                st.tri + 1,
                st.kind,
                st.counts
            ));
        }
        if let Some(f) = &self.failure {
            s.push_str(&format!(
                "{} {} FAIL:{} {}\n",
                f.index,
                f.tri + 1,
                f.reason,
                self.final_counts()
            ));
        }
        s
    }
}

/// Applies `order` greedily and stops at the first invalid step.
pub fn replay(
    c: &Complex,
    seed: Seed,
    order: &[TriId],
    rules: Rules,
) -> Result<Trace, EngineError> {
    let mut h = HoleState::new(c, seed)?;
    let initial = h.counts();
    let mut trace = Trace {
        seed,
        initial,
        steps: Vec::new(),
        failure: None,
        complete: false,
    };
    if let Seed::Triangle(t) = seed {
        let touches = c.triangle(t).e.iter().any(|&e| c.is_boundary_edge(e));
        if touches && rules.mode == Mode::Strict {
            trace.failure = Some(Failure {
                index: 0,
                tri: t,
                reason: InvalidReason::SeedOnBoundary,
            });
            return Ok(trace);
        }
    }
    for (i, &t) in order.iter().enumerate() {
        if t >= c.n_triangles() {
            return Err(EngineError::UnknownTriangle(t));
        }
        match h.classify(c, t, rules) {
            Ok(kind) => {
                h.commit(c, t);
                trace.steps.push(RemovalStep {
                    index: i + 1,
                    tri: t,
                    kind,
                    counts: h.counts(),
                    boundary_simple: h.boundary_simple,
                });
            }
            Err(reason) => {
                trace.failure = Some(Failure {
                    index: i + 1,
                    tri: t,
                    reason,
                });
                return Ok(trace);
            }
        }
    }
    trace.complete = h.is_complete(c);
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::tetrahedron_boundary;

    fn lenient() -> Rules {
        Rules::new(Mode::Lenient, false)
    }

    fn strict() -> Rules {
        Rules::new(Mode::Strict, false)
    }

    #[test]
    fn seed_on_single_triangle() {
        let c = Complex::from_triangles(3, &[[0, 1, 2]]).unwrap();
        let h = init_hole(&c, Seed::Triangle(0)).unwrap();
        assert_eq!(h.counts(), CellCounts::new(3, 3, 0));
        assert_eq!(h.hole_boundary().len(), 3);
        assert!(h.is_simple_cycle(&c));
        assert!(h.is_complete(&c));
    }

    #[test]
    fn tetrahedron_seed_and_full_removal() {
        let c = tetrahedron_boundary();
        let h = init_hole(&c, Seed::Triangle(0)).unwrap();
        assert_eq!(h.counts(), CellCounts::new(4, 6, 3));
        assert_eq!(h.hole_boundary().len(), 3);
        assert!(is_simple_cycle(&c, &h));
        let tr = replay(&c, Seed::Triangle(0), &[1, 2, 3], strict()).unwrap();
        let kinds: Vec<_> = tr.steps.iter().map(|s| s.kind).collect();
        assert_eq!(kinds, vec![OpKind::I, OpKind::II, OpKind::Final]);
        assert_eq!(tr.final_counts(), CellCounts::new(0, 0, 0));
    }

    #[test]
    fn unknown_seed() {
        let c = tetrahedron_boundary();
        assert_eq!(
            init_hole(&c, Seed::Triangle(9)),
            Err(EngineError::UnknownTriangle(9))
        );
        assert_eq!(init_hole(&c, Seed::Outer), Err(EngineError::NoOuterFace));
    }

    #[test]
    fn fan_from_outer_face() {
        // Hexagon fan around centre 6.
        let tris: Vec<[usize; 3]> = (0..6).map(|i| [i, (i + 1) % 6, 6]).collect();
        let c = Complex::from_triangles(7, &tris).unwrap();
        let h = init_hole(&c, Seed::Outer).unwrap();
        assert_eq!(h.counts(), c.counts());
        assert!(h.is_simple_cycle(&c));
        assert_eq!(h.classify(&c, 0, strict()), Ok(OpKind::I));
        let tr = replay(&c, Seed::Outer, &[0, 1, 2, 3, 4, 5], strict()).unwrap();
        let kinds: Vec<_> = tr.steps.iter().map(|s| s.kind.name()).collect();
        assert_eq!(kinds, ["I", "II", "II", "II", "II", "FINAL"]);
        assert!(tr.success());
        // Skipping around the fan pinches the boundary at the centre.
        let tr = replay(&c, Seed::Outer, &[0, 3], strict()).unwrap();
        assert_eq!(tr.failure.unwrap().reason, InvalidReason::BoundaryNotSimple);
        let tr = replay(&c, Seed::Outer, &[0, 3], lenient()).unwrap();
        assert!(tr.failure.is_none());
    }

    #[test]
    fn interior_seed_keeps_boundary() {
        let tris: Vec<[usize; 3]> = (0..6).map(|i| [i, (i + 1) % 6, 6]).collect();
        let c = Complex::from_triangles(7, &tris).unwrap();
        let tr = replay(&c, Seed::Triangle(0), &[1, 2, 3, 4, 5], strict()).unwrap();
        assert_eq!(
            tr.failure,
            Some(Failure {
                index: 0,
                tri: 0,
                reason: InvalidReason::SeedOnBoundary
            })
        );
        let tr = replay(&c, Seed::Triangle(0), &[1, 2, 3, 4, 5], lenient()).unwrap();
        let kinds: Vec<_> = tr.steps.iter().map(|s| s.kind.name()).collect();
        assert_eq!(kinds, ["I", "I", "I", "I", "II"]);
        assert!(tr.success());
        assert_eq!(tr.final_counts(), CellCounts::new(6, 6, 0));
    }

    #[test]
    fn op3_gate() {
        // Square split by a diagonal, outer seed: taking triangle 0 then 1.
        let c = Complex::from_triangles(4, &[[0, 1, 2], [0, 2, 3]]).unwrap();
        let mut h = init_hole(&c, Seed::Outer).unwrap();
        assert_eq!(h.classify(&c, 0, strict()), Ok(OpKind::II));
        h.apply(&c, 0, OpKind::II).unwrap();
        assert_eq!(h.classify(&c, 1, strict()), Ok(OpKind::Final));
        // A lone triangle inside a larger hole needs op III.
        let tris = [[0, 1, 2], [1, 3, 2], [2, 3, 4]];
        let c = Complex::from_triangles(5, &tris).unwrap();
        let mut h = init_hole(&c, Seed::Outer).unwrap();
        assert_eq!(h.classify(&c, 1, lenient()), Ok(OpKind::I));
        h.apply(&c, 1, OpKind::I).unwrap();
        assert_eq!(
            h.classify(&c, 0, lenient()),
            Err(InvalidReason::Op3Disabled)
        );
        assert_eq!(
            h.classify(&c, 0, Rules::new(Mode::Lenient, true)),
            Ok(OpKind::III)
        );
        let before = h.counts();
        h.apply(&c, 0, OpKind::III).unwrap();
        let after = h.counts();
        assert_eq!(before.chi(), after.chi());
        assert_eq!(h.enumerate_remaining(&c), after);
    }

    #[test]
    fn apply_rejects_wrong_kind() {
        let c = Complex::from_triangles(3, &[[0, 1, 2]]).unwrap();
        let mut h = init_hole(&c, Seed::Outer).unwrap();
        assert!(matches!(
            h.apply(&c, 0, OpKind::I),
            Err(EngineError::ClassificationMismatch { .. })
        ));
    }

    #[test]
    fn no_edge_on_hole() {
        // Fan around 12 inside a ring of triangles.
        let mut tris = Vec::new();
        for i in 0..6 {
            tris.push([i, (i + 1) % 6, 12]);
            tris.push([i, 6 + i, (i + 1) % 6]);
            tris.push([(i + 1) % 6, 6 + i, 6 + (i + 1) % 6]);
        }
        let c = Complex::from_triangles(13, &tris).unwrap();
        let h = init_hole(&c, Seed::Outer).unwrap();
        assert_eq!(
            h.classify(&c, 0, lenient()),
            Err(InvalidReason::NoEdgeOnHole)
        );
    }
}
