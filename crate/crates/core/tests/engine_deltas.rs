use eulerhole::engine::{HoleState, Mode, OpKind, Rules, Seed};
use eulerhole::sample::random_convex_polygon;
use eulerhole::surface::{generate, SurfaceKind, SurfaceSpec};
use eulerhole::{quotient, Complex};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn surfaces() -> Vec<Complex> {
    let mut out = Vec::new();
    let mut kinds = SurfaceKind::ALL_BASIC.to_vec();
    kinds.push(SurfaceKind::Genus(2));
    for kind in kinds {
        let p = generate(SurfaceSpec {
            kind,
            resolution: 3,
        })
        .unwrap();
        out.push(quotient(&p).unwrap());
    }
    out.push(eulerhole::complex::tetrahedron_boundary());
    out
}

/// Removes triangles in random order, checking every accepted move against
/// a fresh count of the remaining cells. Returns the number of moves.
fn walk(c: &Complex, seed: Seed, rng: &mut ChaCha8Rng) -> usize {
    let mut h = HoleState::new(c, seed).unwrap();
    let mut moves = 0;
    loop {
        let live: Vec<usize> = (0..c.n_triangles()).filter(|&t| !h.is_removed(t)).collect();
        if live.is_empty() {
            return moves;
        }
        let rules = Rules::new(
            if rng.gen_bool(0.5) {
                Mode::Strict
            } else {
                Mode::Lenient
            },
            rng.gen_bool(0.5),
        );
        let t = live[rng.gen_range(0..live.len())];
        let pick = match h.classify(c, t, rules) {
            Ok(k) => Some((t, k)),
            // Fall back to any lenient move so the walk keeps going.
            Err(_) => live
                .iter()
                .filter_map(|&u| {
                    h.classify(c, u, Rules::new(Mode::Lenient, true))
                        .ok()
                        .map(|k| (u, k))
                })
                .next(),
        };
        let Some((t, kind)) = pick else { return moves };
        let before = h.enumerate_remaining(c);
        assert_eq!(before, h.counts());
        h.apply(c, t, kind).unwrap();
        let after = h.enumerate_remaining(c);
        assert_eq!(after, h.counts());
        let (d0, d1, d2) = kind.delta();
        assert_eq!(after.n0 as i64 - before.n0 as i64, d0, "{kind:?}");
        assert_eq!(after.n1 as i64 - before.n1 as i64, d1, "{kind:?}");
        assert_eq!(after.n2 as i64 - before.n2 as i64, d2, "{kind:?}");
        if kind != OpKind::Final {
            assert_eq!(after.chi(), before.chi());
        }
        moves += 1;
    }
}

#[test]
fn ten_thousand_moves_match_their_deltas() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let closed = surfaces();
    let mut moves = 0;
    let mut round = 0;
    while moves < 10_000 {
        if round % 3 == 0 {
            let c = &closed[round / 3 % closed.len()];
            let t = rng.gen_range(0..c.n_triangles());
            moves += walk(c, Seed::Triangle(t), &mut rng);
        } else {
            let p = random_convex_polygon(&mut rng, 5 + round % 40, 30);
            let c = p.complex();
            let seed = if rng.gen_bool(0.5) {
                Seed::Outer
            } else {
                Seed::Triangle(rng.gen_range(0..c.n_triangles()))
            };
            moves += walk(c, seed, &mut rng);
        }
        round += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deltas_hold_on_random_discs(seed in any::<u64>(), n in 3usize..40, outer in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_convex_polygon(&mut rng, n, 25);
        let c = p.complex();
        let s = if outer { Seed::Outer } else { Seed::Triangle(rng.gen_range(0..c.n_triangles())) };
        walk(c, s, &mut rng);
    }

    #[test]
    fn classify_is_pure(seed in any::<u64>(), n in 3usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_convex_polygon(&mut rng, n, 25);
        let c = p.complex();
        let h = HoleState::new(c, Seed::Outer).unwrap();
        let copy = h.clone();
        for t in 0..c.n_triangles() {
            for rules in [Rules::new(Mode::Strict, false), Rules::new(Mode::Lenient, true)] {
                prop_assert_eq!(h.classify(c, t, rules), h.classify(c, t, rules));
            }
        }
        prop_assert_eq!(h, copy);
    }
}
