use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::CutError;
use crate::complex::{CellCounts, Complex, EdgeId, Triangle, VertexId};
use crate::scheme::{EdgeWord, IdentificationScheme, PlanarPolygon, Token};
use crate::unionfind::UnionFind;

/// Position `pos` of the glued arc `label`, traversed from `tail` to `head`.
/// The two edges carrying the same label and position are identified
/// tail to tail.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeLabel {
    pub label: String,
    pub pos: usize,
    pub tail: VertexId,
    pub head: VertexId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Arc {
    len: usize,
    cyclic: bool,
}

/// A triangulated surface with boundary, together with the gluing of its
/// boundary edges that recovers a closed (or less cut) surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surface {
    complex: Complex,
    labels: Vec<Option<EdgeLabel>>,
    arcs: BTreeMap<String, Arc>,
    glue: Vec<(VertexId, VertexId)>,
}

impl Surface {
    /// A surface with no gluing data.
    pub fn closed(complex: Complex) -> Self {
        let labels = vec![None; complex.n_edges()];
        Surface {
            complex,
            labels,
            arcs: BTreeMap::new(),
            glue: Vec::new(),
        }
    }

    /// The polygon with its word turned into edge labels.
    pub fn from_polygon(p: &PlanarPolygon) -> Self {
        let mut s = Surface::closed(p.complex().clone());
        s.glue = p.scheme().glue.clone();
        let Some(word) = &p.scheme().word else {
            return s;
        };
        let n = p.boundary().len();
        let mut offset = 0;
        for tok in &word.tokens {
            let mut vs: Vec<VertexId> = (0..=tok.span)
                .map(|k| p.boundary()[(offset + k) % n])
                .collect();
            let mut es: Vec<EdgeId> = (0..tok.span)
                .map(|k| p.boundary_edges()[offset + k])
                .collect();
            if tok.inverted {
                vs.reverse();
                es.reverse();
            }
            for (k, &e) in es.iter().enumerate() {
                s.labels[e] = Some(EdgeLabel {
                    label: tok.label.clone(),
                    pos: k,
                    tail: vs[k],
                    head: vs[k + 1],
                });
            }
            s.arcs.insert(
                tok.label.clone(),
                Arc {
                    len: tok.span,
                    cyclic: false,
                },
            );
            offset += tok.span;
        }
        s
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn label(&self, e: EdgeId) -> Option<&EdgeLabel> {
        self.labels[e].as_ref()
    }

    pub fn glue(&self) -> &[(VertexId, VertexId)] {
        &self.glue
    }

    /// Vertex and edge classes after gluing, as dense labels.
    pub fn classes(&self) -> (Vec<usize>, usize, Vec<usize>, usize) {
        let mut vuf = UnionFind::new(self.complex.n_vertices());
        let mut euf = UnionFind::new(self.complex.n_edges());
        let mut first: HashMap<(&str, usize), EdgeId> = HashMap::new();
        for (e, l) in self.labels.iter().enumerate() {
            let Some(l) = l else { continue };
            match first.get(&(l.label.as_str(), l.pos)) {
                None => {
                    first.insert((l.label.as_str(), l.pos), e);
                }
                Some(&f) => {
                    let m = self.labels[f].as_ref().expect("labelled");
                    vuf.union(m.tail, l.tail);
                    vuf.union(m.head, l.head);
                    euf.union(f, e);
                }
            }
        }
        for &(a, b) in &self.glue {
            vuf.union(a, b);
        }
        let (v, nv) = vuf.dense_labels();
        let (e, ne) = euf.dense_labels();
        (v, nv, e, ne)
    }

    /// The glued surface as a complex.
    pub fn quotient(&self) -> Result<Complex, CutError> {
        let (vc, nv, ec, ne) = self.classes();
        let mut edges = vec![[usize::MAX; 2]; ne];
        for (e, &[a, b]) in self.complex.edges().iter().enumerate() {
            if edges[ec[e]][0] == usize::MAX {
                edges[ec[e]] = [vc[a], vc[b]];
            }
        }
        let tris = self
            .complex
            .triangles()
            .iter()
            .map(|t| Triangle {
                v: t.v.map(|v| vc[v]),
                e: t.e.map(|e| ec[e]),
            })
            .collect();
        Ok(Complex::from_cells(nv, edges, tris)?)
    }

    /// Cell counts of the glued surface.
    pub fn class_counts(&self) -> CellCounts {
        let (_, nv, _, ne) = self.classes();
        CellCounts::new(nv, ne, self.complex.n_triangles())
    }

    /// The surface as a polygon with a word, if it is a disc.
    pub fn to_polygon(&self) -> Result<PlanarPolygon, CutError> {
        let disc = PlanarPolygon::new(self.complex.clone(), None, IdentificationScheme::trivial())
            .map_err(|e| CutError::NotADisc(e.to_string()))?;
        let bv = disc.boundary();
        let be = disc.boundary_edges();
        let n = be.len();
        // Label, direction and arc position of each boundary edge.
        let mut free = 0;
        let info: Vec<(String, bool, usize)> = (0..n)
            .map(|i| match &self.labels[be[i]] {
                Some(l) => (
                    l.label.clone(),
                    l.tail == bv[i] && l.head == bv[(i + 1) % n],
                    l.pos,
                ),
                None => {
                    free += 1;
                    (format!("_{free}"), true, 0)
                }
            })
            .collect();
        let arc_of = |label: &str| {
            self.arcs.get(label).copied().unwrap_or(Arc {
                len: 1,
                cyclic: false,
            })
        };
        let continues = |i: usize, j: usize| -> bool {
            let (a, b) = (&info[i], &info[j]);
            if a.0 != b.0 || a.1 != b.1 {
                return false;
            }
            let arc = arc_of(&a.0);
            let step = |p: usize, fwd: bool| -> Option<usize> {
                if fwd {
                    if p + 1 < arc.len {
                        Some(p + 1)
                    } else if arc.cyclic {
                        Some(0)
                    } else {
                        None
                    }
                } else if p > 0 {
                    Some(p - 1)
                } else if arc.cyclic {
                    Some(arc.len - 1)
                } else {
                    None
                }
            };
            step(a.2, a.1) == Some(b.2)
        };
        let anchor = (0..n)
            .find(|&i| !continues((i + n - 1) % n, i))
            .unwrap_or(0);
        // Runs of consecutive edges along one arc.
        let mut runs: Vec<(usize, usize)> = Vec::new();
        let mut i = 0;
        while i < n {
            let s = (anchor + i) % n;
            let mut len = 1;
            while i + len < n && continues((anchor + i + len - 1) % n, (anchor + i + len) % n) {
                len += 1;
            }
            runs.push((s, len));
            i += len;
        }
        // Arc positions where some run starts; runs are split there.
        let mut breaks: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
        for &(s, len) in &runs {
            let (label, fwd, p) = &info[s];
            let arc = arc_of(label);
            let (lo, hi) = if *fwd {
                (*p, p + len)
            } else {
                ((p + arc.len + 1 - len) % arc.len.max(1), p + 1)
            };
            let set = breaks.entry(label.as_str()).or_default();
            set.insert(lo % arc.len.max(1));
            if arc.cyclic || hi < arc.len {
                set.insert(hi % arc.len.max(1));
            }
        }
        let mut tokens = Vec::new();
        for &(s, len) in &runs {
            let (label, fwd, _) = &info[s];
            let arc = arc_of(label);
            let set = &breaks[label.as_str()];
            let pieces = if arc.cyclic {
                set.len()
            } else {
                set.iter().filter(|&&b| b != 0).count() + 1
            };
            let name = |pos: usize| -> String {
                if pieces <= 1 {
                    return label.clone();
                }
                // Sub-arc holding `pos`, numbered from 1.
                let k = set.range(..=pos).count();
                let k = if arc.cyclic && k == 0 {
                    set.len()
                } else {
                    k.max(1)
                };
                format!("{label}_{k}")
            };
            let mut cur: Option<(String, usize)> = None;
            for k in 0..len {
                let pos = info[(s + k) % n].2;
                let nm = name(pos);
                match &mut cur {
                    Some((c, span)) if *c == nm => *span += 1,
                    _ => {
                        if let Some((c, span)) = cur.take() {
                            tokens.push(Token {
                                label: c,
                                inverted: !fwd,
                                span,
                            });
                        }
                        cur = Some((nm, 1));
                    }
                }
            }
            if let Some((c, span)) = cur {
                tokens.push(Token {
                    label: c,
                    inverted: !fwd,
                    span,
                });
            }
        }
        let scheme = IdentificationScheme {
            word: Some(EdgeWord { tokens }),
            start: Some(bv[anchor]),
            glue: self.glue.clone(),
        };
        Ok(PlanarPolygon::new(self.complex.clone(), None, scheme)?)
    }
}

/// Result of cutting along one curve.
#[derive(Debug, Clone)]
pub struct Cut {
    pub surface: Surface,
    /// Label carried by the two copies of the curve.
    pub label: String,
    /// New edges for each old edge (two for curve edges).
    pub edge_copies: Vec<Vec<EdgeId>>,
    /// New vertices for each old vertex.
    pub vertex_copies: Vec<Vec<VertexId>>,
}

/// Orders the curve edges into a vertex walk; the walk is closed when its
/// last vertex equals its first.
fn curve_walk(c: &Complex, curve: &[EdgeId]) -> Result<Vec<VertexId>, CutError> {
    let bad = |m: &str| CutError::CurveNotSubcomplex(m.to_string());
    if curve.is_empty() {
        return Err(bad("empty"));
    }
    for &e in curve {
        if e >= c.n_edges() {
            return Err(bad("edge out of range"));
        }
        let [a, b] = c.edge(e);
        if a == b {
            return Err(CutError::LoopEdge(e));
        }
        if c.edge_triangles(e).len() != 2 {
            return Err(bad("curve edge is not interior"));
        }
    }
    let [a0, b0] = c.edge(curve[0]);
    let mut walk = if curve.len() == 1 {
        vec![a0, b0]
    } else {
        let next = c.edge(curve[1]);
        if next.contains(&b0) {
            vec![a0, b0]
        } else if next.contains(&a0) {
            vec![b0, a0]
        } else {
            return Err(bad("edges are not consecutive"));
        }
    };
    for &e in &curve[1..] {
        let [a, b] = c.edge(e);
        let last = *walk.last().expect("nonempty");
        let nx = if a == last {
            b
        } else if b == last {
            a
        } else {
            return Err(bad("edges are not consecutive"));
        };
        walk.push(nx);
    }
    let closed = walk.len() > 2 && walk[0] == *walk.last().expect("nonempty");
    let body = if closed {
        &walk[..walk.len() - 1]
    } else {
        &walk[..]
    };
    let distinct: BTreeSet<_> = body.iter().collect();
    if distinct.len() != body.len() {
        return Err(bad("curve is not simple"));
    }
    Ok(walk)
}

/// Cuts `s` along a simple path or cycle of interior edges. Each curve edge
/// becomes two boundary edges labelled with a fresh `c<n>`, each curve
/// vertex splits into one copy per side, and gluing the copies back gives
/// the original cell counts.
pub fn cut_open(s: &Surface, curve: &[EdgeId]) -> Result<Cut, CutError> {
    let c = &s.complex;
    let walk = curve_walk(c, curve)?;
    let mut on_curve = vec![false; c.n_edges()];
    for &e in curve {
        on_curve[e] = true;
    }
    let nt = c.n_triangles();
    // Corners (t, k) -> 3t + k; joined across every edge not on the curve.
    let mut uf = UnionFind::new(3 * nt);
    let mut inc: Vec<Vec<(usize, usize)>> = vec![Vec::new(); c.n_edges()];
    for (t, tri) in c.triangles().iter().enumerate() {
        for j in 0..3 {
            inc[tri.e[j]].push((t, j));
        }
    }
    let ends = |t: usize, j: usize| -> [VertexId; 2] { c.triangle(t).side_endpoints(j) };
    for e in 0..c.n_edges() {
        if on_curve[e] || inc[e].len() < 2 {
            continue;
        }
        let (t1, j1) = inc[e][0];
        let [x1, _] = ends(t1, j1);
        for &(t2, j2) in &inc[e][1..] {
            let [x2, y2] = ends(t2, j2);
            let parallel = x1 == x2 && x2 != y2;
            let (k1, k2) = ((j1 + 1) % 3, (j2 + 1) % 3);
            if parallel {
                uf.union(3 * t1 + j1, 3 * t2 + j2);
                uf.union(3 * t1 + k1, 3 * t2 + k2);
            } else {
                uf.union(3 * t1 + j1, 3 * t2 + k2);
                uf.union(3 * t1 + k1, 3 * t2 + j2);
            }
        }
    }
    let (corner, nv) = uf.dense_labels();
    let cls = |t: usize, k: usize| corner[3 * t + k % 3];
    let mut vertex_copies: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); c.n_vertices()];
    for (t, tri) in c.triangles().iter().enumerate() {
        for k in 0..3 {
            vertex_copies[tri.v[k]].insert(cls(t, k));
        }
    }
    if let Some(v) = vertex_copies.iter().position(|s| s.is_empty()) {
        return Err(CutError::IsolatedVertex(v));
    }
    // New edges: one per non-curve edge, one per incidence of a curve edge.
    let mut edges: Vec<[VertexId; 2]> = Vec::new();
    let mut edge_copies: Vec<Vec<EdgeId>> = vec![Vec::new(); c.n_edges()];
    let mut side_edge: HashMap<(usize, usize), EdgeId> = HashMap::new();
    for e in 0..c.n_edges() {
        if on_curve[e] {
            for &(t, j) in &inc[e] {
                side_edge.insert((t, j), edges.len());
                edge_copies[e].push(edges.len());
                edges.push([cls(t, j), cls(t, j + 1)]);
            }
        } else {
            let id = edges.len();
            let [a, b] = c.edge(e);
            let ep = match inc[e].first() {
                Some(&(t, j)) => {
                    let [x, _] = ends(t, j);
                    if x == a && a != b {
                        [cls(t, j), cls(t, j + 1)]
                    } else {
                        [cls(t, j + 1), cls(t, j)]
                    }
                }
                None => {
                    let copy = |v: VertexId| *vertex_copies[v].iter().next().expect("copy");
                    [copy(a), copy(b)]
                }
            };
            for &(t, j) in &inc[e] {
                side_edge.insert((t, j), id);
            }
            edge_copies[e].push(id);
            edges.push(ep);
        }
    }
    let tris: Vec<Triangle> = (0..nt)
        .map(|t| Triangle {
            v: [cls(t, 0), cls(t, 1), cls(t, 2)],
            e: [0, 1, 2].map(|j| side_edge[&(t, j)]),
        })
        .collect();
    let complex = Complex::from_cells(nv, edges, tris)?;
    // Connectivity of the cut surface.
    let mut seen = vec![false; nt];
    let mut queue = VecDeque::new();
    if nt > 0 {
        seen[0] = true;
        queue.push_back(0);
    }
    while let Some(t) = queue.pop_front() {
        for &e in &complex.triangle(t).e {
            for &u in complex.edge_triangles(e) {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    if seen.iter().any(|&x| !x) {
        return Err(CutError::CutDisconnects);
    }
    let mut labels: Vec<Option<EdgeLabel>> = vec![None; complex.n_edges()];
    for e in 0..c.n_edges() {
        let Some(l) = &s.labels[e] else { continue };
        let ne = edge_copies[e][0];
        let (t, j) = inc[e][0];
        let [x, _] = ends(t, j);
        let (tail, head) = if x == l.tail {
            (cls(t, j), cls(t, j + 1))
        } else {
            (cls(t, j + 1), cls(t, j))
        };
        labels[ne] = Some(EdgeLabel {
            label: l.label.clone(),
            pos: l.pos,
            tail,
            head,
        });
    }
    let mut n = 1;
    while s.arcs.contains_key(&format!("c{n}")) {
        n += 1;
    }
    let label = format!("c{n}");
    for (k, &e) in curve.iter().enumerate() {
        for (copy, &(t, j)) in inc[e].iter().enumerate() {
            let [x, _] = ends(t, j);
            let (tail, head) = if x == walk[k] {
                (cls(t, j), cls(t, j + 1))
            } else {
                (cls(t, j + 1), cls(t, j))
            };
            labels[edge_copies[e][copy]] = Some(EdgeLabel {
                label: label.clone(),
                pos: k,
                tail,
                head,
            });
        }
    }
    let mut arcs = s.arcs.clone();
    let cyclic = walk.len() > 2 && walk[0] == *walk.last().expect("nonempty");
    arcs.insert(
        label.clone(),
        Arc {
            len: curve.len(),
            cyclic,
        },
    );
    let first_copy = |v: VertexId| *vertex_copies[v].iter().next().expect("copy");
    let glue: Vec<(VertexId, VertexId)> = s
        .glue
        .iter()
        .map(|&(a, b)| (first_copy(a), first_copy(b)))
        .collect();
    let mut surface = Surface {
        complex,
        labels,
        arcs,
        glue,
    };
    // Copies of one vertex that the labels do not glue back (a pinch) are
    // glued explicitly.
    let (vc, _, _, _) = surface.classes();
    let mut uf = UnionFind::new(surface.complex.n_vertices());
    for (a, &k) in vc.iter().enumerate() {
        let rep = vc.iter().position(|&x| x == k).expect("class member");
        uf.union(rep, a);
    }
    for copies in &vertex_copies {
        let mut it = copies.iter();
        let first = *it.next().expect("copy");
        for &other in it {
            if uf.find(first) != uf.find(other) {
                uf.union(first, other);
                surface.glue.push((first, other));
            }
        }
    }
    Ok(Cut {
        surface,
        label,
        edge_copies,
        vertex_copies: vertex_copies
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{boundary_chi, parse_word, quotient};

    fn grid_torus(r: usize) -> PlanarPolygon {
        // r x r square grid, diagonals from lower left to upper right.
        let id = |i: usize, j: usize| j * (r + 1) + i;
        let mut tris = Vec::new();
        for j in 0..r {
            for i in 0..r {
                tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        let c = Complex::from_triangles((r + 1) * (r + 1), &tris).unwrap();
        let w = parse_word(&format!("a:{r} b:{r} a-:{r} b-:{r}")).unwrap();
        PlanarPolygon::new(c, None, IdentificationScheme::from_word(w)).unwrap()
    }

    #[test]
    fn torus_cut_along_meridian_and_parallel() {
        let r = 3;
        let p = grid_torus(r);
        let id = p.identification().unwrap();
        let closed = Surface::closed(quotient(&p).unwrap());
        let qc = closed.complex();
        assert_eq!(qc.euler_characteristic(), 0);
        // Meridian: the image of the left side; parallel: the bottom side.
        let index = p.complex().edge_index();
        let v = |i: usize, j: usize| j * (r + 1) + i;
        let class = |a: usize, b: usize| id.edge[index[&(a.min(b), a.max(b))]];
        let m: Vec<EdgeId> = (0..r).map(|j| class(v(0, j), v(0, j + 1))).collect();
        let par: Vec<EdgeId> = (0..r).map(|i| class(v(i, 0), v(i + 1, 0))).collect();
        let first = cut_open(&closed, &m).unwrap();
        assert_eq!(first.label, "c1");
        assert_eq!(first.surface.class_counts(), qc.counts());
        let par2: Vec<EdgeId> = par.iter().map(|&e| first.edge_copies[e][0]).collect();
        let second = cut_open(&first.surface, &par2).unwrap();
        assert_eq!(second.label, "c2");
        let disc = second.surface.to_polygon().unwrap();
        let word = disc.scheme().word.clone().unwrap();
        assert_eq!(word.len(), 4, "{word}");
        let t = &word.tokens;
        assert_eq!(t[0].label, t[2].label);
        assert_eq!(t[1].label, t[3].label);
        assert_ne!(t[0].label, t[1].label);
        assert_ne!(t[0].inverted, t[2].inverted);
        assert_ne!(t[1].inverted, t[3].inverted);
        assert_eq!(quotient(&disc).unwrap().counts(), qc.counts());
        assert_eq!(boundary_chi(&disc).unwrap(), -1);
    }

    #[test]
    fn closed_cycle_on_a_sphere_disconnects() {
        let oct = Complex::from_triangles(
            6,
            &[
                [0, 2, 4],
                [2, 1, 4],
                [1, 3, 4],
                [3, 0, 4],
                [2, 0, 5],
                [1, 2, 5],
                [3, 1, 5],
                [0, 3, 5],
            ],
        )
        .unwrap();
        let idx = oct.edge_index();
        let eq: Vec<EdgeId> = [(0, 2), (1, 2), (1, 3), (0, 3)]
            .iter()
            .map(|k| idx[k])
            .collect();
        let s = Surface::closed(oct);
        assert_eq!(cut_open(&s, &eq).unwrap_err(), CutError::CutDisconnects);
    }

    #[test]
    fn slits_from_a_common_pole_give_a_disc() {
        let oct = Complex::from_triangles(
            6,
            &[
                [0, 2, 4],
                [2, 1, 4],
                [1, 3, 4],
                [3, 0, 4],
                [2, 0, 5],
                [1, 2, 5],
                [3, 1, 5],
                [0, 3, 5],
            ],
        )
        .unwrap();
        let counts = oct.counts();
        let idx = oct.edge_index();
        let mut s = Surface::closed(oct);
        // Three arcs out of pole 4 (to 0, 1, 2), cut one at a time.
        let mut map: Vec<EdgeId> = (0..s.complex().n_edges()).collect();
        for k in [(0, 4), (1, 4), (2, 4)] {
            let cut = cut_open(&s, &[map[idx[&k]]]).unwrap();
            map = map.iter().map(|&e| cut.edge_copies[e][0]).collect();
            s = cut.surface;
        }
        assert_eq!(s.class_counts(), counts);
        let disc = s.to_polygon().unwrap();
        assert_eq!(boundary_chi(&disc).unwrap(), 1);
        assert_eq!(quotient(&disc).unwrap().euler_characteristic(), 2);
    }

    #[test]
    fn pinch_point_stays_glued() {
        // Sphere as a disc folded in half, with the two fold ends glued.
        let c = Complex::from_triangles(5, &[[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]]).unwrap();
        let w = parse_word("a:2 a-:2").unwrap();
        let scheme = IdentificationScheme {
            word: Some(w),
            start: Some(0),
            glue: vec![(0, 2)],
        };
        let p = PlanarPolygon::new(c, None, scheme).unwrap();
        let q = quotient(&p).unwrap();
        assert_eq!(q.euler_characteristic(), 1);
        let closed = Surface::closed(q.clone());
        let id = p.identification().unwrap();
        let ix = p.complex().edge_index();
        let loop_edges = vec![id.edge[ix[&(0, 1)]], id.edge[ix[&(1, 2)]]];
        let cut = cut_open(&closed, &loop_edges).unwrap();
        assert_eq!(cut.surface.glue().len(), 1);
        assert_eq!(cut.surface.class_counts(), q.counts());
        let disc = cut.surface.to_polygon().unwrap();
        assert_eq!(boundary_chi(&disc).unwrap(), 0);
        assert_eq!(quotient(&disc).unwrap().counts(), q.counts());
    }

    #[test]
    fn polygon_round_trip_keeps_classes() {
        let p = grid_torus(4);
        let s = Surface::from_polygon(&p);
        assert_eq!(s.class_counts(), quotient(&p).unwrap().counts());
        let back = s.to_polygon().unwrap();
        assert_eq!(
            quotient(&back).unwrap().counts(),
            quotient(&p).unwrap().counts()
        );
    }
}
