//! Edge words, planar polygons and their quotients.
//!
//! A word is read counterclockwise around the polygon boundary starting
//! at the anchor vertex. A token `a` runs along the boundary direction and
//! `a-` against it; `a:3` spans three consecutive boundary edges. Two
//! tokens with the same label are glued so that their runs coincide.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::complex::{Complex, ComplexError, EdgeId, TriId, Triangle, VertexId};
use crate::rational::{area2, orient, polygon_area2, segments_intersect, Point2, Q};
use crate::unionfind::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub label: String,
    pub inverted: bool,
    /// Number of boundary edges covered by the token.
    pub span: usize,
}

impl Token {
    pub fn new(label: impl Into<String>, inverted: bool) -> Self {
        Token {
            label: label.into(),
            inverted,
            span: 1,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        if self.inverted {
            write!(f, "-")?;
        }
        if self.span != 1 {
            write!(f, ":{}", self.span)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeWord {
    pub tokens: Vec<Token>,
}

impl EdgeWord {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Total number of boundary edges the word covers.
    pub fn total_span(&self) -> usize {
        self.tokens.iter().map(|t| t.span).sum()
    }
}

impl fmt::Display for EdgeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemeError {
    #[error("malformed word token {0:?}")]
    MalformedToken(String),
    #[error("label {0:?} used more than twice")]
    LabelUsedThrice(String),
    #[error("empty edge word")]
    EmptyWord,
    #[error("word covers {word} edges but the boundary has {boundary}")]
    WordLengthMismatch { word: usize, boundary: usize },
    #[error("label {label:?} pairs arcs of {first} and {second} edges")]
    ArcLengthMismatch {
        label: String,
        first: usize,
        second: usize,
    },
    #[error("anchor vertex {0} is not on the boundary")]
    StartNotOnBoundary(VertexId),
    #[error("glued vertex {0} out of range")]
    GlueOutOfRange(VertexId),
    #[error("complex is not a triangulated disc: {0}")]
    NotADisc(String),
    #[error("coordinate count {got} does not match {expected} vertices")]
    CoordinateCount { got: usize, expected: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

pub fn parse_word(text: &str) -> Result<EdgeWord, SchemeError> {
    let mut tokens = Vec::new();
    for raw in text.split_whitespace() {
        tokens.push(parse_token(raw)?);
    }
    if tokens.is_empty() {
        return Err(SchemeError::EmptyWord);
    }
    let mut seen: std::collections::HashMap<&str, usize> = std::collections::HashMap::new();
    for t in &tokens {
        let c = seen.entry(t.label.as_str()).or_insert(0);
        *c += 1;
        if *c > 2 {
            return Err(SchemeError::LabelUsedThrice(t.label.clone()));
        }
    }
    Ok(EdgeWord { tokens })
}

fn parse_token(raw: &str) -> Result<Token, SchemeError> {
    let bad = || SchemeError::MalformedToken(raw.to_string());
    let (head, span) = match raw.split_once(':') {
        Some((h, s)) => {
            let n: usize = s.parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            (h, n)
        }
        None => (raw, 1),
    };
    let (label, inverted) = match head.strip_suffix('-') {
        Some(l) => (l, true),
        None => (head, false),
    };
    if label.is_empty() || !label.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return Err(bad());
    }
    Ok(Token {
        label: label.to_string(),
        inverted,
        span,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdentificationScheme {
    /// `None` is the trivial scheme: no two boundary edges are glued.
    pub word: Option<EdgeWord>,
    /// Boundary vertex where the word starts; defaults to the smallest
    /// boundary vertex id.
    pub start: Option<VertexId>,
    /// Extra vertex gluings, used only where edge pairings cannot express
    /// the identification (a pinch point).
    pub glue: Vec<(VertexId, VertexId)>,
}

impl IdentificationScheme {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn from_word(word: EdgeWord) -> Self {
        IdentificationScheme {
            word: Some(word),
            ..Default::default()
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.word.as_ref().is_none_or(|w| {
            let mut labels: Vec<&str> = w.tokens.iter().map(|t| t.label.as_str()).collect();
            labels.sort_unstable();
            labels.windows(2).all(|p| p[0] != p[1])
        }) && self.glue.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmbeddingError {
    #[error("polygon has no coordinates")]
    MissingCoordinates,
    #[error("triangle {0} has non-positive area")]
    NonPositiveArea(TriId),
    #[error("edge {0} does not separate its two triangles")]
    FoldedEdge(EdgeId),
    #[error("boundary edges {0} and {1} intersect")]
    BoundaryNotSimple(EdgeId, EdgeId),
    #[error("triangle areas do not sum to the enclosed area")]
    AreaMismatch,
}

/// A triangulated disc with an optional straight-line embedding and a
/// boundary identification scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarPolygon {
    complex: Complex,
    coords: Option<Vec<Point2>>,
    oriented: Vec<[VertexId; 3]>,
    boundary: Vec<VertexId>,
    boundary_edges: Vec<EdgeId>,
    scheme: IdentificationScheme,
}

impl PlanarPolygon {
    /// Checks that `complex` is a disc, orients it (counterclockwise by
    /// coordinates when present, else following triangle 0 as given) and
    /// anchors the boundary cycle at the scheme's start vertex.
    pub fn new(
        complex: Complex,
        coords: Option<Vec<Point2>>,
        scheme: IdentificationScheme,
    ) -> Result<Self, SchemeError> {
        if let Some(c) = &coords {
            if c.len() != complex.n_vertices() {
                return Err(SchemeError::CoordinateCount {
                    got: c.len(),
                    expected: complex.n_vertices(),
                });
            }
        }
        let mut oriented = orient_disc(&complex)?;
        let (mut boundary, mut boundary_edges) = boundary_cycle(&complex, &oriented)?;
        if let Some(c) = &coords {
            let pts: Vec<&Point2> = boundary.iter().map(|&v| &c[v]).collect();
            if polygon_area2(&pts).is_negative() {
                for t in oriented.iter_mut() {
                    t.swap(1, 2);
                }
                let (b, be) = boundary_cycle(&complex, &oriented)?;
                boundary = b;
                boundary_edges = be;
            }
        }
        let start = match scheme.start {
            Some(s) => s,
            None => *boundary.iter().min().expect("nonempty boundary"),
        };
        let pos = boundary
            .iter()
            .position(|&v| v == start)
            .ok_or(SchemeError::StartNotOnBoundary(start))?;
        boundary.rotate_left(pos);
        boundary_edges.rotate_left(pos);
        if let Some(w) = &scheme.word {
            if w.total_span() != boundary.len() {
                return Err(SchemeError::WordLengthMismatch {
                    word: w.total_span(),
                    boundary: boundary.len(),
                });
            }
        }
        for &(a, b) in &scheme.glue {
            for x in [a, b] {
                if x >= complex.n_vertices() {
                    return Err(SchemeError::GlueOutOfRange(x));
                }
            }
        }
        Ok(PlanarPolygon {
            complex,
            coords,
            oriented,
            boundary,
            boundary_edges,
            scheme,
        })
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn coords(&self) -> Option<&[Point2]> {
        self.coords.as_deref()
    }

    /// Triangle corners in counterclockwise order, indexed like the complex.
    pub fn oriented_triangles(&self) -> &[[VertexId; 3]] {
        &self.oriented
    }

    /// Boundary vertices counterclockwise from the anchor.
    pub fn boundary(&self) -> &[VertexId] {
        &self.boundary
    }

    /// `boundary_edges()[i]` joins `boundary()[i]` to `boundary()[i + 1]`.
    pub fn boundary_edges(&self) -> &[EdgeId] {
        &self.boundary_edges
    }

    pub fn scheme(&self) -> &IdentificationScheme {
        &self.scheme
    }

    pub fn with_scheme(&self, scheme: IdentificationScheme) -> Result<Self, SchemeError> {
        PlanarPolygon::new(self.complex.clone(), self.coords.clone(), scheme)
    }

    pub fn is_boundary_vertex(&self) -> Vec<bool> {
        let mut on = vec![false; self.complex.n_vertices()];
        for &v in &self.boundary {
            on[v] = true;
        }
        on
    }

    /// Checks that the coordinates realize a straight-line embedding.
    pub fn check_embedding(&self) -> Result<(), EmbeddingError> {
        let pts = self
            .coords
            .as_ref()
            .ok_or(EmbeddingError::MissingCoordinates)?;
        let mut total = Q::zero();
        for (t, v) in self.oriented.iter().enumerate() {
            let a = area2(&pts[v[0]], &pts[v[1]], &pts[v[2]]);
            if !a.is_positive() {
                return Err(EmbeddingError::NonPositiveArea(t));
            }
            total += a;
        }
        for e in 0..self.complex.n_edges() {
            let ts = self.complex.edge_triangles(e);
            if ts.len() == 2 {
                let [a, b] = self.complex.edge(e);
                let opp = |t: TriId| {
                    *self.oriented[t]
                        .iter()
                        .find(|&&x| x != a && x != b)
                        .expect("corner")
                };
                let s1 = orient(&pts[a], &pts[b], &pts[opp(ts[0])]);
                let s2 = orient(&pts[a], &pts[b], &pts[opp(ts[1])]);
                if s1 == s2 || s1 == Ordering::Equal || s2 == Ordering::Equal {
                    return Err(EmbeddingError::FoldedEdge(e));
                }
            }
        }
        let n = self.boundary.len();
        for i in 0..n {
            let (a, b) = (&pts[self.boundary[i]], &pts[self.boundary[(i + 1) % n]]);
            for j in i + 1..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (c, d) = (&pts[self.boundary[j]], &pts[self.boundary[(j + 1) % n]]);
                if segments_intersect(a, b, c, d) {
                    return Err(EmbeddingError::BoundaryNotSimple(
                        self.boundary_edges[i],
                        self.boundary_edges[j],
                    ));
                }
            }
            // Adjacent edges may only share their common corner.
            let c = &pts[self.boundary[(i + 2) % n]];
            if n > 2 && orient(a, b, c) == Ordering::Equal && (c - b).dot(&(a - b)).is_positive() {
                return Err(EmbeddingError::BoundaryNotSimple(
                    self.boundary_edges[i],
                    self.boundary_edges[(i + 1) % n],
                ));
            }
        }
        let bpts: Vec<&Point2> = self.boundary.iter().map(|&v| &pts[v]).collect();
        if polygon_area2(&bpts) != total {
            return Err(EmbeddingError::AreaMismatch);
        }
        Ok(())
    }

    /// Vertex and edge classes induced by the scheme.
    pub fn identification(&self) -> Result<Identification, SchemeError> {
        let c = &self.complex;
        let mut vuf = UnionFind::new(c.n_vertices());
        let mut euf = UnionFind::new(c.n_edges());
        if let Some(word) = &self.scheme.word {
            let n = self.boundary.len();
            // Vertices and edges of each run, by label.
            type Run = (Vec<VertexId>, Vec<EdgeId>);
            let mut runs: std::collections::HashMap<&str, Vec<Run>> =
                std::collections::HashMap::new();
            let mut offset = 0;
            for tok in &word.tokens {
                let mut vs: Vec<VertexId> = (0..=tok.span)
                    .map(|k| self.boundary[(offset + k) % n])
                    .collect();
                let mut es: Vec<EdgeId> = (0..tok.span)
                    .map(|k| self.boundary_edges[offset + k])
                    .collect();
                if tok.inverted {
                    vs.reverse();
                    es.reverse();
                }
                runs.entry(tok.label.as_str()).or_default().push((vs, es));
                offset += tok.span;
            }
            let mut labels: Vec<_> = runs.into_iter().collect();
            labels.sort_by(|a, b| a.0.cmp(b.0));
            for (label, occ) in labels {
                if occ.len() != 2 {
                    continue;
                }
                let (v1, e1) = &occ[0];
                let (v2, e2) = &occ[1];
                if e1.len() != e2.len() {
                    return Err(SchemeError::ArcLengthMismatch {
                        label: label.to_string(),
                        first: e1.len(),
                        second: e2.len(),
                    });
                }
                for (a, b) in v1.iter().zip(v2) {
                    vuf.union(*a, *b);
                }
                for (a, b) in e1.iter().zip(e2) {
                    euf.union(*a, *b);
                }
            }
        }
        for &(a, b) in &self.scheme.glue {
            vuf.union(a, b);
        }
        let (vertex, n_vertex_classes) = vuf.dense_labels();
        let (edge, n_edge_classes) = euf.dense_labels();
        Ok(Identification {
            vertex,
            edge,
            n_vertex_classes,
            n_edge_classes,
        })
    }
}

/// Cell classes of a quotient: `vertex[v]` and `edge[e]` are dense class ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Identification {
    pub vertex: Vec<usize>,
    pub edge: Vec<usize>,
    pub n_vertex_classes: usize,
    pub n_edge_classes: usize,
}

/// The quotient complex. Triangles keep their ids; vertex and edge classes
/// are numbered by their smallest member.
pub fn quotient(p: &PlanarPolygon) -> Result<Complex, SchemeError> {
    let id = p.identification()?;
    let c = p.complex();
    let mut edges = vec![[usize::MAX; 2]; id.n_edge_classes];
    for e in 0..c.n_edges() {
        let k = id.edge[e];
        if edges[k][0] == usize::MAX {
            let [a, b] = c.edge(e);
            edges[k] = [id.vertex[a], id.vertex[b]];
        }
    }
    let tris = c
        .triangles()
        .iter()
        .map(|t| Triangle {
            v: t.v.map(|v| id.vertex[v]),
            e: t.e.map(|e| id.edge[e]),
        })
        .collect();
    Ok(Complex::from_cells(id.n_vertex_classes, edges, tris)?)
}

/// `n0 - n1` of the boundary cycle after identification.
pub fn boundary_chi(p: &PlanarPolygon) -> Result<i64, SchemeError> {
    let id = p.identification()?;
    let mut vs: Vec<usize> = p.boundary().iter().map(|&v| id.vertex[v]).collect();
    let mut es: Vec<usize> = p.boundary_edges().iter().map(|&e| id.edge[e]).collect();
    vs.sort_unstable();
    vs.dedup();
    es.sort_unstable();
    es.dedup();
    Ok(vs.len() as i64 - es.len() as i64)
}

/// Consistently orients a disc, starting from triangle 0 as given.
fn orient_disc(c: &Complex) -> Result<Vec<[VertexId; 3]>, SchemeError> {
    let not_disc = |m: &str| SchemeError::NotADisc(m.to_string());
    if c.n_triangles() == 0 {
        return Err(not_disc("no triangles"));
    }
    let report = c.validate(false);
    if let Some(v) = report.violations.first() {
        return Err(SchemeError::NotADisc(v.to_string()));
    }
    for t in c.triangles() {
        if t.v[0] == t.v[1] || t.v[1] == t.v[2] || t.v[0] == t.v[2] {
            return Err(not_disc("degenerate triangle"));
        }
    }
    let vt = c.vertex_triangles();
    if let Some(v) = vt.iter().position(|ts| ts.is_empty()) {
        return Err(SchemeError::NotADisc(format!(
            "vertex {v} lies on no triangle"
        )));
    }
    if c.euler_characteristic() != 1 {
        return Err(SchemeError::NotADisc(format!(
            "Euler characteristic {}",
            c.euler_characteristic()
        )));
    }
    let n = c.n_triangles();
    let mut out: Vec<Option<[VertexId; 3]>> = vec![None; n];
    out[0] = Some(c.triangle(0).v);
    let mut queue = VecDeque::from([0]);
    let mut seen = 1;
    while let Some(t) = queue.pop_front() {
        let tv = out[t].expect("oriented");
        for side in 0..3 {
            let (a, b) = (tv[side], tv[(side + 1) % 3]);
            let e = edge_of_tri(c.triangle(t), a, b);
            for &u in c.edge_triangles(e) {
                if u == t {
                    continue;
                }
                let uv = c.triangle(u).v;
                let w = *uv.iter().find(|&&x| x != a && x != b).expect("corner");
                // Neighbour traverses the shared edge as b -> a.
                let want = [b, a, w];
                match out[u] {
                    None => {
                        out[u] = Some(want);
                        seen += 1;
                        queue.push_back(u);
                    }
                    Some(have) => {
                        if !same_cycle(have, want) {
                            return Err(not_disc("not orientable"));
                        }
                    }
                }
            }
        }
    }
    if seen != n {
        return Err(not_disc("not connected"));
    }
    // Every vertex star must be a single fan.
    for (v, ts) in vt.iter().enumerate() {
        let mut uf = UnionFind::new(ts.len());
        for i in 0..ts.len() {
            for j in i + 1..ts.len() {
                let (ti, tj) = (c.triangle(ts[i]), c.triangle(ts[j]));
                let shared =
                    ti.e.iter()
                        .any(|e| tj.e.contains(e) && c.edge(*e).contains(&v));
                if shared {
                    uf.union(i, j);
                }
            }
        }
        let (_, k) = uf.dense_labels();
        if k != 1 {
            return Err(SchemeError::NotADisc(format!(
                "vertex {v} is a pinch point"
            )));
        }
    }
    Ok(out.into_iter().map(|t| t.expect("connected")).collect())
}

fn same_cycle(a: [VertexId; 3], b: [VertexId; 3]) -> bool {
    (0..3).any(|r| a[r] == b[0] && a[(r + 1) % 3] == b[1] && a[(r + 2) % 3] == b[2])
}

fn edge_of_tri(t: &Triangle, a: VertexId, b: VertexId) -> EdgeId {
    for side in 0..3 {
        let [p, r] = t.side_endpoints(side);
        if (p == a && r == b) || (p == b && r == a) {
            return t.e[side];
        }
    }
    unreachable!("vertices {a},{b} are corners of the triangle")
}

/// Boundary cycle following the orientation: each boundary edge is
/// traversed in the direction its triangle lists it.
fn boundary_cycle(
    c: &Complex,
    oriented: &[[VertexId; 3]],
) -> Result<(Vec<VertexId>, Vec<EdgeId>), SchemeError> {
    let nv = c.n_vertices();
    let mut next: Vec<Option<(VertexId, EdgeId)>> = vec![None; nv];
    let mut count = 0;
    for (t, tv) in oriented.iter().enumerate() {
        for side in 0..3 {
            let (a, b) = (tv[side], tv[(side + 1) % 3]);
            let e = edge_of_tri(c.triangle(t), a, b);
            if c.is_boundary_edge(e) {
                if next[a].is_some() {
                    return Err(SchemeError::NotADisc(format!(
                        "boundary pinches at vertex {a}"
                    )));
                }
                next[a] = Some((b, e));
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(SchemeError::NotADisc("no boundary".into()));
    }
    let start = next
        .iter()
        .position(|x| x.is_some())
        .expect("boundary vertex");
    let mut verts = vec![start];
    let mut edges = Vec::new();
    let mut cur = start;
    loop {
        let (nx, e) = next[cur].ok_or_else(|| SchemeError::NotADisc("open boundary".into()))?;
        edges.push(e);
        if nx == start {
            break;
        }
        if edges.len() > count {
            return Err(SchemeError::NotADisc("boundary does not close".into()));
        }
        verts.push(nx);
        cur = nx;
    }
    if edges.len() != count {
        return Err(SchemeError::NotADisc("boundary has several cycles".into()));
    }
    let mut sorted = verts.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != verts.len() {
        return Err(SchemeError::NotADisc("boundary is not simple".into()));
    }
    Ok((verts, edges))
}
