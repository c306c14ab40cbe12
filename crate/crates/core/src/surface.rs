//! Planar representations of the standard surfaces, parameterized by a
//! resolution `r`: every arc of the edge word is split into `r` segments.

use thiserror::Error;

use crate::complex::{Complex, VertexId};
use crate::rational::{q, q_frac, Point2, Q};
use crate::scheme::{parse_word, IdentificationScheme, PlanarPolygon};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SurfaceKind {
    /// Hexagon `a a⁻¹ b b⁻¹ c c⁻¹`: the sphere cut along three arcs from a pole.
    SphereTrilune,
    /// Square grid with word `a b b⁻¹ a⁻¹`.
    SphereGrid,
    Torus,
    ProjectivePlane,
    KleinBottle,
    /// Orientable surface of genus `g ≥ 1` as a fan-triangulated `4g`-gon.
    Genus(u32),
    /// Non-orientable surface with `g ≥ 1` cross-caps, word `a1 a1 a2 a2 …`.
    CrossCaps(u32),
    /// Sphere word with the two fold points glued together.
    PinchedTorus,
}

impl SurfaceKind {
    pub const ALL_BASIC: [SurfaceKind; 6] = [
        SurfaceKind::SphereTrilune,
        SurfaceKind::SphereGrid,
        SurfaceKind::Torus,
        SurfaceKind::ProjectivePlane,
        SurfaceKind::KleinBottle,
        SurfaceKind::PinchedTorus,
    ];

    /// The Euler characteristic every triangulation of this surface has.
    pub fn expected_chi(self) -> i64 {
        match self {
            SurfaceKind::SphereTrilune | SurfaceKind::SphereGrid => lhuilier_expected(0, true),
            SurfaceKind::Torus => lhuilier_expected(1, true),
            SurfaceKind::ProjectivePlane => lhuilier_expected(1, false),
            SurfaceKind::KleinBottle => lhuilier_expected(2, false),
            SurfaceKind::Genus(g) => lhuilier_expected(g, true),
            SurfaceKind::CrossCaps(g) => lhuilier_expected(g, false),
            SurfaceKind::PinchedTorus => 1,
        }
    }

    pub fn name(self) -> String {
        match self {
            SurfaceKind::SphereTrilune => "sphere".into(),
            SurfaceKind::SphereGrid => "sphere-grid".into(),
            SurfaceKind::Torus => "torus".into(),
            SurfaceKind::ProjectivePlane => "projective-plane".into(),
            SurfaceKind::KleinBottle => "klein-bottle".into(),
            SurfaceKind::Genus(g) => format!("genus-{g}"),
            SurfaceKind::CrossCaps(g) => format!("crosscaps-{g}"),
            SurfaceKind::PinchedTorus => "pinched-torus".into(),
        }
    }

    /// Parses the names produced by [`SurfaceKind::name`]; `genus` and
    /// `crosscaps` take their genus separately.
    pub fn parse(s: &str, genus: Option<u32>) -> Option<SurfaceKind> {
        Some(match s {
            "sphere" | "sphere-trilune" => SurfaceKind::SphereTrilune,
            "sphere-grid" => SurfaceKind::SphereGrid,
            "torus" => SurfaceKind::Torus,
            "projective-plane" | "rp2" => SurfaceKind::ProjectivePlane,
            "klein-bottle" | "klein" => SurfaceKind::KleinBottle,
            "pinched-torus" => SurfaceKind::PinchedTorus,
            "genus" => SurfaceKind::Genus(genus?),
            "crosscaps" => SurfaceKind::CrossCaps(genus?),
            _ => match s.strip_prefix("genus-") {
                Some(g) => SurfaceKind::Genus(g.parse().ok()?),
                None => SurfaceKind::CrossCaps(s.strip_prefix("crosscaps-")?.parse().ok()?),
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    pub resolution: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("resolution {0} is below 3")]
    ResolutionTooSmall(usize),
    #[error("genus must be at least 1")]
    GenusZero,
}

/// `2 - 2g` for orientable surfaces, `2 - g` for non-orientable ones
/// (`g ≥ 1` cross-caps).
pub fn lhuilier_expected(g: u32, orientable: bool) -> i64 {
    if orientable {
        2 - 2 * g as i64
    } else {
        2 - g as i64
    }
}

pub fn generate(spec: SurfaceSpec) -> Result<PlanarPolygon, SurfaceError> {
    let r = spec.resolution;
    if r < 3 {
        return Err(SurfaceError::ResolutionTooSmall(r));
    }
    let word = |w: &str| parse_word(&w.replace('r', &r.to_string())).expect("generator word");
    let p = match spec.kind {
        SurfaceKind::SphereGrid => grid(r, "a:r b:r b-:r a-:r", &word),
        SurfaceKind::Torus => grid(r, "a:r b:r a-:r b-:r", &word),
        SurfaceKind::KleinBottle => grid(r, "a:r b:r a-:r b:r", &word),
        SurfaceKind::ProjectivePlane => grid(r, "a:r b:r a:r b:r", &word),
        SurfaceKind::SphereTrilune => {
            let corners = circle_points(6);
            fan(
                &corners,
                r,
                IdentificationScheme::from_word(word("a:r a-:r b:r b-:r c:r c-:r")),
            )
        }
        SurfaceKind::Genus(0) => return Err(SurfaceError::GenusZero),
        SurfaceKind::Genus(g) => {
            let text: Vec<String> = (1..=g)
                .map(|i| format!("a{i}:r b{i}:r a{i}-:r b{i}-:r"))
                .collect();
            let corners = circle_points(4 * g as usize);
            fan(
                &corners,
                r,
                IdentificationScheme::from_word(word(&text.join(" "))),
            )
        }
        SurfaceKind::CrossCaps(0) => return Err(SurfaceError::GenusZero),
        SurfaceKind::CrossCaps(1) => grid(r, "a:r b:r a:r b:r", &word),
        SurfaceKind::CrossCaps(g) => {
            let text: Vec<String> = (1..=g).map(|i| format!("a{i}:r a{i}:r")).collect();
            let corners = circle_points(2 * g as usize);
            fan(
                &corners,
                r,
                IdentificationScheme::from_word(word(&text.join(" "))),
            )
        }
        SurfaceKind::PinchedTorus => {
            let corners: Vec<Point2> = [(-2, 3), (1, 0), (4, 0), (7, 3), (4, 6), (1, 6)]
                .iter()
                .map(|&(x, y)| Point2::from_ints(x, y))
                .collect();
            let mut scheme = IdentificationScheme::from_word(word("a:r b:r c:r c-:r b-:r a-:r"));
            scheme.glue.push((0, 3 * r));
            fan(&corners, r, scheme)
        }
    };
    Ok(p)
}

/// `(r+1)²` grid on `[0, r]²`, each square cut by its rising diagonal.
fn grid(r: usize, w: &str, word: &dyn Fn(&str) -> crate::scheme::EdgeWord) -> PlanarPolygon {
    let id = |i: usize, j: usize| j * (r + 1) + i;
    let mut tris = Vec::with_capacity(2 * r * r);
    for j in 0..r {
        for i in 0..r {
            tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let mut coords = Vec::with_capacity((r + 1) * (r + 1));
    for j in 0..=r {
        for i in 0..=r {
            coords.push(Point2::from_ints(i as i64, j as i64));
        }
    }
    let c = Complex::from_triangles((r + 1) * (r + 1), &tris).expect("grid");
    let mut scheme = IdentificationScheme::from_word(word(w));
    scheme.start = Some(0);
    PlanarPolygon::new(c, Some(coords), scheme).expect("grid polygon")
}

/// Rational points on the unit circle in counterclockwise order, close to
/// a regular `n`-gon.
pub(crate) fn circle_points(n: usize) -> Vec<Point2> {
    (0..n)
        .map(|k| {
            // Half-angles stay inside (-π/2, π/2), so tan is finite.
            let half =
                -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
            let t = q_frac((half.tan() * 1000.0).round() as i64, 1000);
            let d = q(1) + &t * &t;
            Point2::new((q(1) - &t * &t) / &d, (q(2) * &t) / &d)
        })
        .collect()
}

/// Convex polygon with every side split into `r` pieces, fan-triangulated
/// from the centroid of its corners. Vertex 0 is corner 0.
fn fan(corners: &[Point2], r: usize, mut scheme: IdentificationScheme) -> PlanarPolygon {
    let m = corners.len();
    let mut coords = Vec::with_capacity(m * r + 1);
    for i in 0..m {
        let (a, b) = (&corners[i], &corners[(i + 1) % m]);
        for k in 0..r {
            coords.push(a.lerp(b, &q_frac(k as i64, r as i64)));
        }
    }
    let n = coords.len();
    let mut centre = Point2::new(Q::from_integer(0.into()), Q::from_integer(0.into()));
    for c in corners {
        centre = &centre + c;
    }
    coords.push(centre.scale(&q_frac(1, m as i64)));
    let tris: Vec<[VertexId; 3]> = (0..n).map(|i| [n, i, (i + 1) % n]).collect();
    let c = Complex::from_triangles(n + 1, &tris).expect("fan");
    scheme.start = Some(0);
    PlanarPolygon::new(c, Some(coords), scheme).expect("fan polygon")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::{verify_theorem1, LiftOptions};
    use crate::scheme::{boundary_chi, quotient};

    #[test]
    fn every_surface_has_its_constant() {
        let mut kinds = SurfaceKind::ALL_BASIC.to_vec();
        kinds.extend((1..=4).map(SurfaceKind::Genus));
        kinds.extend((1..=5).map(SurfaceKind::CrossCaps));
        for kind in kinds {
            for r in 3..=5 {
                let p = generate(SurfaceSpec {
                    kind,
                    resolution: r,
                })
                .unwrap();
                p.check_embedding().unwrap();
                let chi = quotient(&p).unwrap().euler_characteristic();
                assert_eq!(chi, kind.expected_chi(), "{kind:?} r={r}");
                assert_eq!(boundary_chi(&p).unwrap() + 1, chi, "{kind:?} r={r}");
            }
        }
    }

    #[test]
    fn schedules_agree_with_counting() {
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
            let rep = verify_theorem1(&p, &LiftOptions::default()).unwrap();
            assert!(rep.holds(), "{kind:?} {rep:?}");
        }
    }

    #[test]
    fn small_resolutions_are_rejected() {
        let e = generate(SurfaceSpec {
            kind: SurfaceKind::Torus,
            resolution: 2,
        })
        .unwrap_err();
        assert_eq!(e, SurfaceError::ResolutionTooSmall(2));
        assert_eq!(
            generate(SurfaceSpec {
                kind: SurfaceKind::Genus(0),
                resolution: 3
            })
            .unwrap_err(),
            SurfaceError::GenusZero
        );
    }

    #[test]
    fn lhuilier_values() {
        assert_eq!(lhuilier_expected(0, true), 2);
        assert_eq!(lhuilier_expected(3, true), -4);
        assert_eq!(lhuilier_expected(2, false), 0);
        assert_eq!(lhuilier_expected(1, false), 1);
    }

    #[test]
    fn names_round_trip() {
        let mut kinds = SurfaceKind::ALL_BASIC.to_vec();
        kinds.push(SurfaceKind::Genus(3));
        kinds.push(SurfaceKind::CrossCaps(4));
        for k in kinds {
            assert_eq!(SurfaceKind::parse(&k.name(), None), Some(k));
        }
    }
}
