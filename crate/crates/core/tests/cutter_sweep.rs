use eulerhole::cutter::{cut_open, subdivide_along, transversalize, Surface};
use eulerhole::sample::{random_convex_polygon, random_curve};
use eulerhole::scheme::{parse_word, quotient, IdentificationScheme};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_curves_keep_chi_and_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut done = 0;
    for i in 0..300 {
        let p = random_convex_polygon(&mut rng, 6 + i % 20, 12);
        let closed = i % 3 == 0;
        let interior = i % 2 == 0;
        let Some(c) = random_curve(&mut rng, &p, 2 + i % 6, closed, interior) else {
            continue;
        };
        let c = transversalize(&c, &p).unwrap();
        let s = subdivide_along(&p, &c).unwrap_or_else(|e| panic!("case {i}: {e} {c:?}"));
        s.polygon.check_embedding().unwrap();
        assert_eq!(s.polygon.complex().euler_characteristic(), 1);
        assert_eq!(s.curve_vertices.len(), s.curve_edges.len() + 1);
        if interior {
            match cut_open(&Surface::from_polygon(&s.polygon), &s.curve_edges) {
                Ok(cut) => assert_eq!(
                    cut.surface.quotient().unwrap().counts(),
                    s.polygon.complex().counts()
                ),
                Err(e) => assert!(closed, "case {i}: {e}"),
            }
        }
        done += 1;
    }
    assert!(done >= 200, "{done}");
}

#[test]
fn slits_in_folded_spheres_give_discs() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut done = 0;
    while done < 100 {
        let p = random_convex_polygon(&mut rng, 10, 12);
        let n = p.boundary().len();
        if n % 2 == 1 {
            continue;
        }
        let w = parse_word(&format!("a:{} a-:{}", n / 2, n / 2)).unwrap();
        let p = p.with_scheme(IdentificationScheme::from_word(w)).unwrap();
        let q = quotient(&p).unwrap();
        assert_eq!(q.euler_characteristic(), 2);
        // An ear at a fold point becomes a triangle with a repeated vertex.
        if (0..q.n_triangles()).any(|t| {
            let v = q.triangle(t).v;
            v[0] == v[1] || v[1] == v[2] || v[2] == v[0]
        }) {
            continue;
        }
        let Some(c) = random_curve(&mut rng, &p, 4, false, true) else {
            continue;
        };
        let c = transversalize(&c, &p).unwrap();
        let s = subdivide_along(&p, &c).unwrap_or_else(|e| {
            panic!("{e} {:?} {:?} {:?}", c, p.coords(), p.oriented_triangles())
        });
        let sphere = quotient(&s.polygon).unwrap();
        assert_eq!(sphere.euler_characteristic(), 2);
        let id = s.polygon.identification().unwrap();
        let edges: Vec<usize> = s.curve_edges.iter().map(|&e| id.edge[e]).collect();
        let cut = cut_open(&Surface::closed(sphere.clone()), &edges).unwrap();
        let disc = cut.surface.to_polygon().unwrap();
        assert_eq!(quotient(&disc).unwrap().counts(), sphere.counts());
        assert_eq!(eulerhole::boundary_chi(&disc).unwrap(), 1);
        done += 1;
    }
}
