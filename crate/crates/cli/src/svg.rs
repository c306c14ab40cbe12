//! Deterministic SVG pictures of removal states and level curves.

use std::fmt::Write as _;

use eulerhole::engine::HoleState;
use eulerhole::lift::LevelCurve;
use eulerhole::{PlanarPolygon, TriId};

const SIZE: f64 = 800.0;
const MARGIN: f64 = 20.0;

/// What to draw on top of the polygon.
#[derive(Debug, Default)]
pub struct Scene<'a> {
    pub state: Option<&'a HoleState>,
    /// Triangle removed by the last step, highlighted.
    pub current: Option<TriId>,
    pub levels: &'a [LevelCurve],
}

struct Frame {
    x0: f64,
    y1: f64,
    scale: f64,
}

impl Frame {
    fn new(pts: &[(f64, f64)]) -> Frame {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if pts.is_empty() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-12);
        Frame {
            x0,
            y1,
            scale: (SIZE - 2.0 * MARGIN) / span,
        }
    }

    fn map(&self, (x, y): (f64, f64)) -> String {
        format!(
            "{:.3},{:.3}",
            MARGIN + (x - self.x0) * self.scale,
            MARGIN + (self.y1 - y) * self.scale
        )
    }
}

fn level_colour(k: usize, n: usize) -> String {
    let hue = 360.0 * k as f64 / (n.max(1) as f64 + 1.0);
    format!("hsl({hue:.0},70%,45%)")
}

/// Returns `None` when the polygon has no coordinates.
pub fn render(p: &PlanarPolygon, scene: &Scene) -> Option<String> {
    let pts: Vec<(f64, f64)> = p.coords()?.iter().map(|q| q.to_f64()).collect();
    let f = Frame::new(&pts);
    let c = p.complex();
    let mut s = String::new();
    writeln!(
        s,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    )
    .expect("string");
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let tri_path = |t: &[usize; 3]| {
        t.iter()
            .map(|&v| f.map(pts[v]))
            .collect::<Vec<_>>()
            .join(" ")
    };

    s.push_str("<g id=\"triangles\">\n");
    for (t, tv) in p.oriented_triangles().iter().enumerate() {
        let removed = scene.state.is_some_and(|h| h.is_removed(t));
        let (class, fill) = if scene.current == Some(t) {
            ("current", "#f2a65a")
        } else if removed {
            ("hole", "#e6e6e6")
        } else {
            ("remaining", "#cfe3f5")
        };
        writeln!(
            s,
            "<polygon class=\"{class}\" data-tri=\"{}\" points=\"{}\" fill=\"{fill}\"/>",
            t + 1,
            tri_path(tv)
        )
        .expect("string");
    }
    s.push_str("</g>\n<g id=\"edges\">\n");
    for (e, &[a, b]) in c.edges().iter().enumerate() {
        let (alive, on_hole) = match scene.state {
            None => (true, false),
            Some(h) => (
                h.edge_alive(e),
                h.edge_alive(e) && c.edge_triangles(e).iter().any(|&t| h.is_removed(t)),
            ),
        };
        if !alive {
            continue;
        }
        let colour = if on_hole { "#c0392b" } else { "#2c3e50" };
        let width = if on_hole { 2.5 } else { 1.0 };
        let (p0, p1) = (f.map(pts[a]), f.map(pts[b]));
        let (x1, y1) = p0.split_once(',').expect("pair");
        let (x2, y2) = p1.split_once(',').expect("pair");
        writeln!(
            s,
            "<line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"{colour}\" stroke-width=\"{width}\"/>"
        )
        .expect("string");
    }
    s.push_str("</g>\n");
    let top = scene.levels.iter().map(|l| l.level).max().unwrap_or(0);
    for l in scene.levels {
        let path: Vec<String> = l.vertices.iter().map(|&v| f.map(pts[v])).collect();
        writeln!(
            s,
            "<g id=\"level-{k}\"><polygon class=\"level\" data-level=\"{k}\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/></g>",
            path.join(" "),
            level_colour(l.level, top),
            k = l.level
        )
        .expect("string");
    }
    s.push_str("</svg>\n");
    Some(s)
}
