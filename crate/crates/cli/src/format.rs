//! Line-based text formats. Every format ignores blank lines and `#`
//! comments.
//!
//! Complex / polygon:
//!
//! ```text
//! v <id> [<x> <y>]
//! t <id> <id> <id>
//! word <token>...
//! start <id>
//! glue <id> <id>
//! ```
//!
//! Vertex ids are `0..n` in any order. Coordinates are rationals (`p/q`) or
//! decimals, read exactly.

use std::fmt::Write as _;

use eulerhole::cutter::Curve;
use eulerhole::polyhedron::{ConvexPolyhedron3, Point3};
use eulerhole::rational::{format_rational, parse_rational, Point2};
use eulerhole::{parse_word, Complex, IdentificationScheme, PlanarPolygon, TriId, VertexId};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("{0}")]
    File(String),
}

fn at(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Line {
        line,
        msg: msg.into(),
    }
}

/// Non-comment lines with their 1-based numbers, split into words.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let w: Vec<&str> = l.split_whitespace().collect();
        (!w.is_empty()).then_some((i + 1, w))
    })
}

fn id(line: usize, s: &str) -> Result<usize, ParseError> {
    s.parse().map_err(|_| at(line, format!("bad id {s:?}")))
}

/// The contents of a complex file before any geometric checks.
#[derive(Debug, Clone)]
pub struct ComplexFile {
    pub complex: Complex,
    pub coords: Option<Vec<Point2>>,
    pub scheme: IdentificationScheme,
}

impl ComplexFile {
    /// Whether the file carries any identification.
    pub fn has_scheme(&self) -> bool {
        self.scheme.word.is_some() || !self.scheme.glue.is_empty()
    }

    pub fn polygon(&self) -> Result<PlanarPolygon, eulerhole::scheme::SchemeError> {
        PlanarPolygon::new(
            self.complex.clone(),
            self.coords.clone(),
            self.scheme.clone(),
        )
    }
}

pub fn parse_complex(text: &str) -> Result<ComplexFile, ParseError> {
    let mut verts: Vec<(usize, usize, Option<Point2>)> = Vec::new();
    let mut tris: Vec<(usize, [usize; 3])> = Vec::new();
    let mut scheme = IdentificationScheme::trivial();
    let mut start_line = 0;
    for (ln, w) in lines(text) {
        match w[0] {
            "v" => {
                let point = match w.len() {
                    2 => None,
                    4 => {
                        let x = parse_rational(w[2]).map_err(|e| at(ln, e.to_string()))?;
                        let y = parse_rational(w[3]).map_err(|e| at(ln, e.to_string()))?;
                        Some(Point2::new(x, y))
                    }
                    _ => return Err(at(ln, "expected `v <id> [<x> <y>]`")),
                };
                verts.push((ln, id(ln, w[1])?, point));
            }
            "t" => {
                if w.len() != 4 {
                    return Err(at(ln, "expected `t <id> <id> <id>`"));
                }
                tris.push((ln, [id(ln, w[1])?, id(ln, w[2])?, id(ln, w[3])?]));
            }
            "word" => {
                if scheme.word.is_some() {
                    return Err(at(ln, "second word"));
                }
                let word = parse_word(&w[1..].join(" ")).map_err(|e| at(ln, e.to_string()))?;
                scheme.word = Some(word);
            }
            "start" => {
                if w.len() != 2 || scheme.start.is_some() {
                    return Err(at(ln, "expected one `start <id>`"));
                }
                scheme.start = Some(id(ln, w[1])?);
                start_line = ln;
            }
            "glue" => {
                if w.len() != 3 {
                    return Err(at(ln, "expected `glue <id> <id>`"));
                }
                scheme.glue.push((id(ln, w[1])?, id(ln, w[2])?));
            }
            other => return Err(at(ln, format!("unknown record {other:?}"))),
        }
    }
    let n = verts.len();
    let mut seen = vec![false; n];
    let mut pts: Vec<Option<Point2>> = vec![None; n];
    for (ln, v, p) in &verts {
        if *v >= n {
            return Err(at(
                *ln,
                format!("vertex id {v} is not below the vertex count {n}"),
            ));
        }
        if std::mem::replace(&mut seen[*v], true) {
            return Err(at(*ln, format!("vertex {v} declared twice")));
        }
        pts[*v] = p.clone();
    }
    let with = pts.iter().filter(|p| p.is_some()).count();
    let coords = match with {
        0 => None,
        k if k == n => Some(pts.into_iter().map(|p| p.expect("checked")).collect()),
        _ => {
            return Err(ParseError::File(
                "either every vertex has coordinates or none does".into(),
            ))
        }
    };
    for (ln, t) in &tris {
        if let Some(v) = t.iter().find(|&&v| v >= n) {
            return Err(at(*ln, format!("undeclared vertex {v}")));
        }
    }
    if let Some(s) = scheme.start {
        if s >= n {
            return Err(at(start_line, format!("undeclared vertex {s}")));
        }
    }
    if let Some(&(a, b)) = scheme.glue.iter().find(|&&(a, b)| a >= n || b >= n) {
        return Err(ParseError::File(format!(
            "glue {a} {b} names an undeclared vertex"
        )));
    }
    let triples: Vec<[VertexId; 3]> = tris.iter().map(|(_, t)| *t).collect();
    let complex =
        Complex::from_triangles(n, &triples).map_err(|e| ParseError::File(e.to_string()))?;
    Ok(ComplexFile {
        complex,
        coords,
        scheme,
    })
}

/// Writes a complex with optional coordinates and scheme. Triangles keep
/// their ids; each is written with the corner order stored in the complex.
pub fn write_complex(
    c: &Complex,
    coords: Option<&[Point2]>,
    scheme: &IdentificationScheme,
) -> String {
    let mut s = String::new();
    for v in 0..c.n_vertices() {
        match coords {
            Some(p) => writeln!(
                s,
                "v {v} {} {}",
                format_rational(&p[v].x),
                format_rational(&p[v].y)
            ),
            None => writeln!(s, "v {v}"),
        }
        .expect("string");
    }
    for t in c.triangles() {
        writeln!(s, "t {} {} {}", t.v[0], t.v[1], t.v[2]).expect("string");
    }
    if let Some(w) = &scheme.word {
        writeln!(s, "word {w}").expect("string");
    }
    if let Some(st) = scheme.start {
        writeln!(s, "start {st}").expect("string");
    }
    for (a, b) in &scheme.glue {
        writeln!(s, "glue {a} {b}").expect("string");
    }
    s
}

/// Writes a polygon with its word anchored explicitly, triangles
/// counterclockwise.
pub fn write_polygon(p: &PlanarPolygon) -> String {
    let c = p.complex();
    let mut s = String::new();
    for v in 0..c.n_vertices() {
        match p.coords() {
            Some(pts) => writeln!(
                s,
                "v {v} {} {}",
                format_rational(&pts[v].x),
                format_rational(&pts[v].y)
            ),
            None => writeln!(s, "v {v}"),
        }
        .expect("string");
    }
    for t in p.oriented_triangles() {
        writeln!(s, "t {} {} {}", t[0], t[1], t[2]).expect("string");
    }
    let scheme = p.scheme();
    if let Some(w) = &scheme.word {
        writeln!(s, "word {w}").expect("string");
        writeln!(s, "start {}", p.boundary()[0]).expect("string");
    }
    for (a, b) in &scheme.glue {
        writeln!(s, "glue {a} {b}").expect("string");
    }
    s
}

/// Whitespace-separated triangle numbers, counted from 1.
pub fn parse_order(text: &str, n_triangles: usize) -> Result<Vec<TriId>, ParseError> {
    let mut out = Vec::new();
    let mut used = vec![false; n_triangles];
    for (ln, w) in lines(text) {
        for tok in w {
            let k: usize = tok
                .parse()
                .map_err(|_| at(ln, format!("bad triangle number {tok:?}")))?;
            if k == 0 || k > n_triangles {
                return Err(at(ln, format!("triangle {k} is not in 1..={n_triangles}")));
            }
            if std::mem::replace(&mut used[k - 1], true) {
                return Err(at(ln, format!("triangle {k} listed twice")));
            }
            out.push(k - 1);
        }
    }
    Ok(out)
}

pub fn write_order(order: &[TriId]) -> String {
    let words: Vec<String> = order.iter().map(|t| (t + 1).to_string()).collect();
    words.join(" ") + "\n"
}

/// `p <x> <y>` per point and an optional `closed` line.
pub fn parse_curve(text: &str) -> Result<Curve, ParseError> {
    let mut pts = Vec::new();
    let mut closed = false;
    for (ln, w) in lines(text) {
        match (w[0], w.len()) {
            ("p", 3) => {
                let x = parse_rational(w[1]).map_err(|e| at(ln, e.to_string()))?;
                let y = parse_rational(w[2]).map_err(|e| at(ln, e.to_string()))?;
                pts.push(Point2::new(x, y));
            }
            ("closed", 1) => closed = true,
            _ => return Err(at(ln, "expected `p <x> <y>` or `closed`")),
        }
    }
    Curve::new(pts, closed).map_err(|e| ParseError::File(e.to_string()))
}

pub fn write_curve(c: &Curve) -> String {
    let mut s = String::new();
    for p in c.points() {
        writeln!(s, "p {} {}", format_rational(&p.x), format_rational(&p.y)).expect("string");
    }
    if c.is_closed() {
        s.push_str("closed\n");
    }
    s
}

/// `v3 <id> <x> <y> <z>` and `f <id>...` lines.
pub fn parse_polyhedron(text: &str) -> Result<ConvexPolyhedron3, ParseError> {
    let mut verts: Vec<(usize, usize, Point3)> = Vec::new();
    let mut faces: Vec<(usize, Vec<usize>)> = Vec::new();
    for (ln, w) in lines(text) {
        match w[0] {
            "v3" if w.len() == 5 => {
                let c: Result<Vec<_>, _> = w[2..].iter().map(|s| parse_rational(s)).collect();
                let [x, y, z]: [_; 3] = c
                    .map_err(|e| at(ln, e.to_string()))?
                    .try_into()
                    .expect("three");
                verts.push((ln, id(ln, w[1])?, Point3::new(x, y, z)));
            }
            "f" if w.len() >= 4 => {
                let ids: Result<Vec<usize>, _> = w[1..].iter().map(|s| id(ln, s)).collect();
                faces.push((ln, ids?));
            }
            _ => {
                return Err(at(
                    ln,
                    "expected `v3 <id> <x> <y> <z>` or `f <id> <id> <id>...`",
                ))
            }
        }
    }
    let n = verts.len();
    let mut pts: Vec<Option<Point3>> = vec![None; n];
    for (ln, v, p) in verts {
        if v >= n || pts[v].is_some() {
            return Err(at(
                ln,
                format!("vertex id {v} is repeated or not below {n}"),
            ));
        }
        pts[v] = Some(p);
    }
    for (ln, f) in &faces {
        if let Some(v) = f.iter().find(|&&v| v >= n) {
            return Err(at(*ln, format!("undeclared vertex {v}")));
        }
    }
    let pts = pts.into_iter().map(|p| p.expect("dense")).collect();
    ConvexPolyhedron3::new(pts, faces.into_iter().map(|(_, f)| f).collect())
        .map_err(|e| ParseError::File(e.to_string()))
}

pub fn write_polyhedron(p: &ConvexPolyhedron3) -> String {
    let mut s = String::new();
    for (i, v) in p.vertices().iter().enumerate() {
        writeln!(
            s,
            "v3 {i} {} {} {}",
            format_rational(&v.x),
            format_rational(&v.y),
            format_rational(&v.z)
        )
        .expect("string");
    }
    for f in p.faces() {
        let ids: Vec<String> = f.iter().map(|v| v.to_string()).collect();
        writeln!(s, "f {}", ids.join(" ")).expect("string");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use eulerhole::surface::{generate, SurfaceKind, SurfaceSpec};
    use eulerhole::{polyhedron, quotient};

    #[test]
    fn empty_file_is_an_empty_complex() {
        let f = parse_complex("# nothing\n\n").unwrap();
        assert_eq!(f.complex.counts(), eulerhole::CellCounts::new(0, 0, 0));
        assert!(f.coords.is_none());
    }

    #[test]
    fn polygon_round_trip() {
        for kind in [
            SurfaceKind::Torus,
            SurfaceKind::PinchedTorus,
            SurfaceKind::Genus(2),
        ] {
            let p = generate(SurfaceSpec {
                kind,
                resolution: 3,
            })
            .unwrap();
            let text = write_polygon(&p);
            let back = parse_complex(&text).unwrap().polygon().unwrap();
            assert_eq!(
                quotient(&back).unwrap().counts(),
                quotient(&p).unwrap().counts()
            );
            assert_eq!(back.boundary(), p.boundary());
            assert_eq!(write_polygon(&back), text);
        }
    }

    #[test]
    fn rejects_malformed_input() {
        let bad = [
            "v 0 1\n",
            "v 0\nv 0\n",
            "v 1\n",
            "v 0\nv 1\nv 2\nt 0 1 3\n",
            "v 0 0 0\nv 1\n",
            "x 1\n",
            "word a a a\n",
            "v 0\nstart 4\n",
            "v 0 1/0 2\n",
        ];
        for b in bad {
            assert!(parse_complex(b).is_err(), "{b:?}");
        }
    }

    #[test]
    fn decimals_are_exact() {
        let f = parse_complex("v 0 0.1 0\nv 1 1 0\nv 2 0 1\nt 0 1 2\n").unwrap();
        assert_eq!(f.coords.unwrap()[0].x, eulerhole::rational::q_frac(1, 10));
    }

    #[test]
    fn orders_are_one_based_and_distinct() {
        assert_eq!(parse_order("1 3\n2 # tail\n", 3).unwrap(), vec![0, 2, 1]);
        assert!(parse_order("1 1", 3).is_err());
        assert!(parse_order("0", 3).is_err());
        assert!(parse_order("4", 3).is_err());
    }

    #[test]
    fn curves_and_polyhedra_round_trip() {
        let c = parse_curve("p 0 0\np 1/2 1\np 2 0\n").unwrap();
        assert_eq!(parse_curve(&write_curve(&c)).unwrap(), c);
        assert!(parse_curve("p 0 0\n").is_err());
        for (_, poly) in polyhedron::platonic_solids() {
            assert_eq!(parse_polyhedron(&write_polyhedron(&poly)).unwrap(), poly);
        }
        assert!(parse_polyhedron("v3 0 0 0 0\nf 0 1 2\n").is_err());
    }
}
