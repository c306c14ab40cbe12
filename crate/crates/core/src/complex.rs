//! Two-dimensional cell complexes with exact counts.
//!
//! Built from plain triangle lists the complex is simplicial: edges are
//! keyed by their sorted vertex pair. Quotients of planar polygons are
//! generally not simplicial (the one-vertex torus has three loops), so a
//! complex may also be assembled directly from cells, in which case edges
//! are only endpoint pairs and may repeat or be loops.

use rustc_hash::FxHashMap as HashMap;
use std::fmt;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type TriId = usize;

/// A triangle with its corner vertices and its sides.
/// `e[0]` joins `v[0]`–`v[1]`, `e[1]` joins `v[1]`–`v[2]`, `e[2]` joins `v[2]`–`v[0]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triangle {
    pub v: [VertexId; 3],
    pub e: [EdgeId; 3],
}

impl Triangle {
    /// The corner not on side `i`.
    pub fn opposite_vertex(&self, side: usize) -> VertexId {
        self.v[(side + 2) % 3]
    }

    pub fn side_endpoints(&self, side: usize) -> [VertexId; 2] {
        [self.v[side], self.v[(side + 1) % 3]]
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.v.contains(&v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CellCounts {
    pub n0: usize,
    pub n1: usize,
    pub n2: usize,
}

impl CellCounts {
    pub fn new(n0: usize, n1: usize, n2: usize) -> Self {
        CellCounts { n0, n1, n2 }
    }

    pub fn chi(&self) -> i64 {
        self.n0 as i64 - self.n1 as i64 + self.n2 as i64
    }
}

impl fmt::Display for CellCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.n0, self.n1, self.n2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("vertex {vertex} out of range (complex has {n} vertices)")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge {edge} out of range (complex has {n} edges)")]
    EdgeOutOfRange { edge: usize, n: usize },
    #[error("triangle {0:?} repeats a vertex")]
    DegenerateTriangle([VertexId; 3]),
    #[error("triangle {tri}: side {side} does not join its corners")]
    InconsistentSide { tri: usize, side: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Edge not on any triangle.
    DanglingEdge(EdgeId),
    /// Edge on more than two triangles, counted with multiplicity.
    OverfullEdge { edge: EdgeId, incidences: usize },
    /// Second triangle on the same vertex triple as the first.
    DuplicateTriangle { first: TriId, duplicate: TriId },
    /// Closed surfaces have no boundary edges.
    BoundaryEdge(EdgeId),
    /// Closed surfaces need at least three edges at every vertex.
    LowDegreeVertex { vertex: VertexId, degree: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DanglingEdge(e) => write!(f, "edge {e} lies on no triangle"),
            Violation::OverfullEdge { edge, incidences } => {
                write!(f, "edge {edge} lies on {incidences} triangles")
            }
            Violation::DuplicateTriangle { first, duplicate } => {
                write!(f, "triangle {duplicate} duplicates triangle {first}")
            }
            Violation::BoundaryEdge(e) => write!(f, "edge {e} is a boundary edge"),
            Violation::LowDegreeVertex { vertex, degree } => {
                write!(f, "vertex {vertex} has only {degree} edges")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Complex {
    n_vertices: usize,
    edges: Vec<[VertexId; 2]>,
    tris: Vec<Triangle>,
    edge_tris: Vec<Vec<TriId>>,
    duplicates: Vec<(TriId, TriId)>,
}

impl Complex {
    /// `n` vertices and nothing else.
    pub fn with_vertices(n: usize) -> Self {
        Complex {
            n_vertices: n,
            ..Default::default()
        }
    }

    /// Simplicial complex on vertices `0..n` from vertex triples; edges are
    /// induced and numbered in order of first appearance.
    pub fn from_triangles(n: usize, tris: &[[VertexId; 3]]) -> Result<Self, ComplexError> {
        Self::from_triangles_and_edges(n, tris, &[])
    }

    /// As [`Complex::from_triangles`], plus free-standing edges appended
    /// after the induced ones (repeats of induced edges are merged).
    pub fn from_triangles_and_edges(
        n: usize,
        tris: &[[VertexId; 3]],
        extra_edges: &[[VertexId; 2]],
    ) -> Result<Self, ComplexError> {
        let mut c = Complex::with_vertices(n);
        let mut index: HashMap<(VertexId, VertexId), EdgeId> = HashMap::default();
        let mut tri_index: HashMap<[VertexId; 3], TriId> = HashMap::default();
        let mut edge_of = |c: &mut Complex, a: VertexId, b: VertexId| -> EdgeId {
            let key = if a < b { (a, b) } else { (b, a) };
            *index.entry(key).or_insert_with(|| {
                c.edges.push([key.0, key.1]);
                c.edge_tris.push(Vec::new());
                c.edges.len() - 1
            })
        };
        for (t, &v) in tris.iter().enumerate() {
            for &x in &v {
                if x >= n {
                    return Err(ComplexError::VertexOutOfRange { vertex: x, n });
                }
            }
            if v[0] == v[1] || v[1] == v[2] || v[0] == v[2] {
                return Err(ComplexError::DegenerateTriangle(v));
            }
            let e = [
                edge_of(&mut c, v[0], v[1]),
                edge_of(&mut c, v[1], v[2]),
                edge_of(&mut c, v[2], v[0]),
            ];
            let mut key = v;
            key.sort_unstable();
            if let Some(&first) = tri_index.get(&key) {
                c.duplicates.push((first, t));
            } else {
                tri_index.insert(key, t);
            }
            for &ei in &e {
                c.edge_tris[ei].push(t);
            }
            c.tris.push(Triangle { v, e });
        }
        for &[a, b] in extra_edges {
            for x in [a, b] {
                if x >= n {
                    return Err(ComplexError::VertexOutOfRange { vertex: x, n });
                }
            }
            edge_of(&mut c, a, b);
        }
        Ok(c)
    }

    /// Assembles a (possibly non-simplicial) complex from explicit cells.
    /// Each triangle's sides must join its corners in the documented order.
    pub fn from_cells(
        n: usize,
        edges: Vec<[VertexId; 2]>,
        tris: Vec<Triangle>,
    ) -> Result<Self, ComplexError> {
        for e in &edges {
            for &x in e {
                if x >= n {
                    return Err(ComplexError::VertexOutOfRange { vertex: x, n });
                }
            }
        }
        let mut edge_tris = vec![Vec::new(); edges.len()];
        for (t, tri) in tris.iter().enumerate() {
            for side in 0..3 {
                let ei = tri.e[side];
                if ei >= edges.len() {
                    return Err(ComplexError::EdgeOutOfRange {
                        edge: ei,
                        n: edges.len(),
                    });
                }
                let [a, b] = tri.side_endpoints(side);
                let [p, r] = edges[ei];
                if !((a == p && b == r) || (a == r && b == p)) {
                    return Err(ComplexError::InconsistentSide { tri: t, side });
                }
                edge_tris[ei].push(t);
            }
        }
        Ok(Complex {
            n_vertices: n,
            edges,
            tris,
            edge_tris,
            duplicates: Vec::new(),
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.tris.len()
    }

    pub fn counts(&self) -> CellCounts {
        CellCounts::new(self.n_vertices, self.edges.len(), self.tris.len())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts().chi()
    }

    pub fn edge(&self, e: EdgeId) -> [VertexId; 2] {
        self.edges[e]
    }

    pub fn edges(&self) -> &[[VertexId; 2]] {
        &self.edges
    }

    pub fn triangle(&self, t: TriId) -> &Triangle {
        &self.tris[t]
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.tris
    }

    /// Triangles on `e`, repeated when a triangle uses `e` twice.
    pub fn edge_triangles(&self, e: EdgeId) -> &[TriId] {
        &self.edge_tris[e]
    }

    /// First edge joining `a` and `b`, if any.
    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.edges
            .iter()
            .position(|&[p, r]| (p == a && r == b) || (p == b && r == a))
    }

    /// Lookup table for [`Complex::edge_between`] on simplicial complexes.
    pub fn edge_index(&self) -> HashMap<(VertexId, VertexId), EdgeId> {
        let mut m = HashMap::with_capacity_and_hasher(self.edges.len(), Default::default());
        for (i, &[a, b]) in self.edges.iter().enumerate() {
            m.entry((a.min(b), a.max(b))).or_insert(i);
        }
        m
    }

    pub fn is_boundary_edge(&self, e: EdgeId) -> bool {
        self.edge_tris[e].len() == 1
    }

    /// Edges on exactly one triangle, in increasing id order.
    pub fn boundary_edges(&self) -> Vec<EdgeId> {
        (0..self.edges.len())
            .filter(|&e| self.is_boundary_edge(e))
            .collect()
    }

    /// For every vertex, the incident edges (a loop is listed once).
    pub fn vertex_edges(&self) -> Vec<Vec<EdgeId>> {
        let mut out = vec![Vec::new(); self.n_vertices];
        for (i, &[a, b]) in self.edges.iter().enumerate() {
            out[a].push(i);
            if b != a {
                out[b].push(i);
            }
        }
        out
    }

    /// For every vertex, the triangles having it as a corner (once each).
    pub fn vertex_triangles(&self) -> Vec<Vec<TriId>> {
        let mut out = vec![Vec::new(); self.n_vertices];
        for (t, tri) in self.tris.iter().enumerate() {
            for (k, &v) in tri.v.iter().enumerate() {
                if !tri.v[..k].contains(&v) {
                    out[v].push(t);
                }
            }
        }
        out
    }

    /// Number of edge-ends at each vertex (a loop contributes two).
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_vertices];
        for &[a, b] in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn validate(&self, closed: bool) -> ValidationReport {
        let mut violations = Vec::new();
        for &(first, duplicate) in &self.duplicates {
            violations.push(Violation::DuplicateTriangle { first, duplicate });
        }
        for (e, ts) in self.edge_tris.iter().enumerate() {
            match ts.len() {
                0 => violations.push(Violation::DanglingEdge(e)),
                1 if closed => violations.push(Violation::BoundaryEdge(e)),
                k if k > 2 => violations.push(Violation::OverfullEdge {
                    edge: e,
                    incidences: k,
                }),
                _ => {}
            }
        }
        if closed {
            for (v, d) in self.vertex_degrees().into_iter().enumerate() {
                if d < 3 {
                    violations.push(Violation::LowDegreeVertex {
                        vertex: v,
                        degree: d,
                    });
                }
            }
        }
        ValidationReport { violations }
    }

    /// Disjoint union; the cells of `other` are renumbered after ours.
    pub fn disjoint_union(&self, other: &Complex) -> Complex {
        let nv = self.n_vertices;
        let ne = self.edges.len();
        let nt = self.tris.len();
        let mut c = self.clone();
        c.n_vertices += other.n_vertices;
        c.edges
            .extend(other.edges.iter().map(|&[a, b]| [a + nv, b + nv]));
        c.tris.extend(other.tris.iter().map(|t| Triangle {
            v: t.v.map(|x| x + nv),
            e: t.e.map(|x| x + ne),
        }));
        c.edge_tris.extend(
            other
                .edge_tris
                .iter()
                .map(|ts| ts.iter().map(|t| t + nt).collect()),
        );
        c.duplicates
            .extend(other.duplicates.iter().map(|&(a, b)| (a + nt, b + nt)));
        c
    }

    /// Triangle vertex triples, in id order.
    pub fn triangle_vertices(&self) -> Vec<[VertexId; 3]> {
        self.tris.iter().map(|t| t.v).collect()
    }
}

/// The boundary of the 3-simplex on vertices 0..4.
pub fn tetrahedron_boundary() -> Complex {
    Complex::from_triangles(4, &[[0, 1, 2], [0, 3, 1], [1, 3, 2], [0, 2, 3]])
        .expect("static complex")
}
