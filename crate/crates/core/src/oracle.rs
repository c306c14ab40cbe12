//! Brute-force reference for the removal rules: every simplicial disc with
//! few triangles, an exact straight-line embedding for each, and a search
//! over removal orders that recounts the remaining complex from scratch at
//! every step instead of tracking deltas.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::complex::{CellCounts, Complex, TriId};
use crate::engine::{HoleState, Mode, OpKind, Rules, Seed};
use crate::rational::{Point2, Q};
use crate::scheme::{IdentificationScheme, PlanarPolygon};
use crate::surface::circle_points;

/// Consistently oriented triangles on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Disc {
    pub n: usize,
    pub tris: Vec<[usize; 3]>,
}

impl Disc {
    pub fn complex(&self) -> Complex {
        Complex::from_triangles(self.n, &self.tris).expect("generated disc is simplicial")
    }

    /// Directed boundary edges, disc on the left.
    fn boundary(&self) -> Vec<(usize, usize)> {
        let directed: HashSet<(usize, usize)> = self
            .tris
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
            .collect();
        let mut out: Vec<(usize, usize)> = directed
            .iter()
            .filter(|&&(a, b)| !directed.contains(&(b, a)))
            .copied()
            .collect();
        out.sort_unstable();
        out
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        self.tris.iter().any(|t| t.contains(&a) && t.contains(&b))
    }

    /// Invariant under relabelling and reflection.
    fn canonical(&self) -> Vec<[usize; 3]> {
        let mut best: Option<Vec<[usize; 3]>> = None;
        for flip in [false, true] {
            let tris: Vec<[usize; 3]> = self
                .tris
                .iter()
                .map(|&[a, b, c]| if flip { [a, c, b] } else { [a, b, c] })
                .collect();
            let mut across: HashMap<(usize, usize), usize> = HashMap::new();
            for (i, t) in tris.iter().enumerate() {
                for k in 0..3 {
                    across.insert((t[k], t[(k + 1) % 3]), i);
                }
            }
            for start in 0..tris.len() {
                for rot in 0..3 {
                    let code = bfs_code(&tris, &across, start, rot, self.n);
                    if best.as_ref().is_none_or(|b| code < *b) {
                        best = Some(code);
                    }
                }
            }
        }
        best.unwrap_or_default()
    }
}

fn bfs_code(
    tris: &[[usize; 3]],
    across: &HashMap<(usize, usize), usize>,
    start: usize,
    rot: usize,
    n: usize,
) -> Vec<[usize; 3]> {
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut seen = vec![false; tris.len()];
    let t0 = tris[start];
    let first = [t0[rot], t0[(rot + 1) % 3], t0[(rot + 2) % 3]];
    for v in first {
        label[v] = next;
        next += 1;
    }
    let mut queue = std::collections::VecDeque::from([first]);
    seen[start] = true;
    let mut code = Vec::with_capacity(tris.len());
    while let Some(t) = queue.pop_front() {
        let l = [label[t[0]], label[t[1]], label[t[2]]];
        let m = (0..3).min_by_key(|&k| l[k]).expect("three");
        code.push([l[m], l[(m + 1) % 3], l[(m + 2) % 3]]);
        for k in 0..3 {
            let (x, y) = (t[k], t[(k + 1) % 3]);
            if let Some(&u) = across.get(&(y, x)) {
                if seen[u] {
                    continue;
                }
                seen[u] = true;
                let s = tris[u];
                let j = (0..3).find(|&j| s[j] == y).expect("shared edge");
                let w = s[(j + 2) % 3];
                if label[w] == usize::MAX {
                    label[w] = next;
                    next += 1;
                }
                queue.push_back([y, x, w]);
            }
        }
    }
    code.sort_unstable();
    code
}

/// All simplicial discs with at most `max_tris` triangles, one per
/// isomorphism class (reflections identified). Every disc is shellable, so
/// growing from one triangle by gluing along one or two boundary edges
/// reaches all of them.
pub fn discs_up_to(max_tris: usize) -> Vec<Disc> {
    let mut out = Vec::new();
    let mut layer = vec![Disc {
        n: 3,
        tris: vec![[0, 1, 2]],
    }];
    while let Some(first) = layer.first() {
        if first.tris.len() > max_tris {
            break;
        }
        out.extend(layer.iter().cloned());
        let mut seen: HashSet<Vec<[usize; 3]>> = HashSet::new();
        let mut next = Vec::new();
        for d in &layer {
            let bnd = d.boundary();
            let succ: HashMap<usize, usize> = bnd.iter().copied().collect();
            for &(a, b) in &bnd {
                // A new vertex on edge a-b.
                let mut g = d.clone();
                g.tris.push([b, a, d.n]);
                g.n += 1;
                if seen.insert(g.canonical()) {
                    next.push(g);
                }
                // Close the corner a-b-c, making b interior.
                let c = succ[&b];
                if c != a && !d.has_edge(a, c) {
                    let mut g = d.clone();
                    g.tris.push([c, b, a]);
                    if seen.insert(g.canonical()) {
                        next.push(g);
                    }
                }
            }
        }
        next.sort();
        layer = next;
    }
    out
}

/// Boundary on rational points of the unit circle, interior vertices at the
/// average of their neighbours, solved exactly.
pub fn embed(d: &Disc) -> Option<PlanarPolygon> {
    let c = d.complex();
    let p = PlanarPolygon::new(c.clone(), None, IdentificationScheme::trivial()).ok()?;
    let bnd = p.boundary().to_vec();
    let ring = circle_points(bnd.len());
    let mut coords: Vec<Option<Point2>> = vec![None; d.n];
    for (v, x) in bnd.iter().zip(ring) {
        coords[*v] = Some(x);
    }
    let inner: Vec<usize> = (0..d.n).filter(|v| coords[*v].is_none()).collect();
    let pos: HashMap<usize, usize> = inner.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let m = inner.len();
    let mut nbrs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); d.n];
    for &[a, b] in c.edges() {
        nbrs[a].insert(b);
        nbrs[b].insert(a);
    }
    // Rows: deg·x_v − Σ interior neighbours = Σ boundary neighbours.
    let zero = Q::from_integer(0.into());
    let mut rows: Vec<(Vec<Q>, Q, Q)> = Vec::with_capacity(m);
    for &v in &inner {
        let mut a = vec![zero.clone(); m];
        a[pos[&v]] = Q::from_integer((nbrs[v].len() as i64).into());
        let (mut bx, mut by) = (zero.clone(), zero.clone());
        for &u in &nbrs[v] {
            match &coords[u] {
                Some(x) => {
                    bx += &x.x;
                    by += &x.y;
                }
                None => a[pos[&u]] -= Q::from_integer(1.into()),
            }
        }
        rows.push((a, bx, by));
    }
    for col in 0..m {
        let piv = (col..m).find(|&r| rows[r].0[col] != zero)?;
        rows.swap(col, piv);
        let (pr, px, py) = rows[col].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != col && row.0[col] != zero {
                let f = &row.0[col] / &pr[col];
                for (a, b) in row.0.iter_mut().zip(&pr) {
                    *a -= &f * b;
                }
                row.1 -= &f * &px;
                row.2 -= &f * &py;
            }
        }
    }
    for (i, &v) in inner.iter().enumerate() {
        let (a, x, y) = &rows[i];
        coords[v] = Some(Point2::new(x / &a[i], y / &a[i]));
    }
    let coords: Vec<Point2> = coords.into_iter().collect::<Option<_>>()?;
    let p = PlanarPolygon::new(c, Some(coords), IdentificationScheme::trivial()).ok()?;
    p.check_embedding().ok()?;
    Some(p)
}

/// Remaining cells after removing the open hole made of `removed` (and the
/// outer face for an outer seed), counted from scratch.
pub fn remaining_counts(c: &Complex, outer: bool, removed: &[bool]) -> CellCounts {
    let edge_alive: Vec<bool> = (0..c.n_edges())
        .map(|e| {
            let ts = c.edge_triangles(e);
            ts.iter().any(|&t| !removed[t]) || (!outer && ts.len() == 1)
        })
        .collect();
    let mut vertex_alive = vec![false; c.n_vertices()];
    for e in (0..c.n_edges()).filter(|&e| edge_alive[e]) {
        for v in c.edge(e) {
            vertex_alive[v] = true;
        }
    }
    CellCounts::new(
        vertex_alive.iter().filter(|&&a| a).count(),
        edge_alive.iter().filter(|&&a| a).count(),
        removed.iter().filter(|&&r| !r).count(),
    )
}

/// Whether the edges between the hole and what remains form one simple
/// cycle.
fn boundary_simple(c: &Complex, outer: bool, removed: &[bool]) -> bool {
    if removed.iter().all(|&r| r) {
        return true;
    }
    let mut deg: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut n_edges = 0;
    for e in 0..c.n_edges() {
        let ts = c.edge_triangles(e);
        let live =
            ts.iter().filter(|&&t| !removed[t]).count() + usize::from(!outer && ts.len() == 1);
        let gone = ts.iter().filter(|&&t| removed[t]).count() + usize::from(outer && ts.len() == 1);
        if live > 0 && gone > 0 {
            let [a, b] = c.edge(e);
            deg.entry(a).or_default().push(b);
            deg.entry(b).or_default().push(a);
            n_edges += 1;
        }
    }
    if n_edges == 0 || deg.values().any(|n| n.len() != 2) {
        return false;
    }
    // One cycle through all of them.
    let start = *deg.keys().min().expect("nonempty");
    let (mut prev, mut cur, mut steps) = (start, deg[&start][0], 1);
    while cur != start {
        let n = &deg[&cur];
        let nx = if n[0] == prev { n[1] } else { n[0] };
        prev = cur;
        cur = nx;
        steps += 1;
        if steps > n_edges {
            return false;
        }
    }
    if steps != n_edges {
        return false;
    }
    true
}

/// Edge-connected components of the remaining triangles.
fn components(c: &Complex, removed: &[bool]) -> usize {
    let mut seen = vec![false; c.n_triangles()];
    let mut n = 0;
    for s in 0..c.n_triangles() {
        if removed[s] || seen[s] {
            continue;
        }
        n += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(t) = stack.pop() {
            for &e in &c.triangle(t).e {
                for &u in c.edge_triangles(e) {
                    if !removed[u] && !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
    }
    n
}

/// The oracle's verdict on one removal: the operation whose cell changes
/// match a recount, if the step is allowed in strict mode without
/// operation III.
pub fn oracle_step(c: &Complex, outer: bool, removed: &[bool], t: TriId) -> Option<OpKind> {
    if removed[t] {
        return None;
    }
    let before = remaining_counts(c, outer, removed);
    let mut next = removed.to_vec();
    next[t] = true;
    let after = remaining_counts(c, outer, &next);
    let d = (
        after.n0 as i64 - before.n0 as i64,
        after.n1 as i64 - before.n1 as i64,
        after.n2 as i64 - before.n2 as i64,
    );
    let last = after.n2 == 0;
    let kind = match d {
        (0, -1, -1) => OpKind::I,
        (-1, -2, -1) => OpKind::II,
        (-3, -3, -1) if last => OpKind::Final,
        _ => return None,
    };
    // Strict: the boundary stays simple and no piece of the remainder is
    // split in two.
    (boundary_simple(c, outer, &next) && components(c, &next) <= components(c, removed))
        .then_some(kind)
}

/// Outcome of the exhaustive search from one seed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Exploration {
    /// Reachable hole states, the seed state included.
    pub states: usize,
    /// Complete strict removal orders.
    pub orders: u128,
    /// Reachable states other than the end where no removal is allowed.
    pub stuck: usize,
    /// (state, triangle) pairs where the engine and the oracle disagree.
    pub mismatches: Vec<String>,
}

/// Depth-first search over every strict removal order from `seed`,
/// comparing the engine's `classify` with [`oracle_step`] at every
/// reachable state.
pub fn explore(c: &Complex, seed: Seed) -> Exploration {
    let nt = c.n_triangles();
    assert!(nt <= 64, "search is limited to 64 triangles");
    let outer = seed == Seed::Outer;
    let mut init = vec![false; nt];
    if let Seed::Triangle(t) = seed {
        init[t] = true;
    }
    let rules = Rules::new(Mode::Strict, false);
    let mut memo: HashMap<u64, u128> = HashMap::new();
    let mut ex = Exploration::default();
    let h = HoleState::new(c, seed).expect("seed");
    dfs(c, outer, &mut init, &h, rules, &mut memo, &mut ex);
    ex.orders = memo[&mask(&init)];
    ex.states = memo.len();
    ex
}

fn mask(removed: &[bool]) -> u64 {
    removed
        .iter()
        .enumerate()
        .filter(|(_, &r)| r)
        .fold(0, |m, (i, _)| m | (1 << i))
}

fn dfs(
    c: &Complex,
    outer: bool,
    removed: &mut Vec<bool>,
    h: &HoleState,
    rules: Rules,
    memo: &mut HashMap<u64, u128>,
    ex: &mut Exploration,
) -> u128 {
    let key = mask(removed);
    if let Some(&n) = memo.get(&key) {
        return n;
    }
    if removed.iter().all(|&r| r) {
        memo.insert(key, 1);
        return 1;
    }
    let mut total = 0;
    let mut any = false;
    for t in 0..removed.len() {
        if removed[t] {
            continue;
        }
        let engine = h.classify(c, t, rules).ok();
        let oracle = oracle_step(c, outer, removed, t);
        if engine != oracle {
            ex.mismatches.push(format!(
                "state {key:#x} triangle {t}: engine {engine:?}, oracle {oracle:?}"
            ));
        }
        let Some(kind) = oracle else { continue };
        any = true;
        let mut next = h.clone();
        if next.apply(c, t, kind).is_err() {
            ex.mismatches.push(format!(
                "state {key:#x} triangle {t}: engine refused {kind:?}"
            ));
            continue;
        }
        removed[t] = true;
        total += dfs(c, outer, removed, &next, rules, memo, ex);
        removed[t] = false;
    }
    if !any {
        ex.stuck += 1;
    }
    memo.insert(key, total);
    total
}

/// Whether `order` is a complete strict removal order by the oracle alone.
pub fn is_valid_order(c: &Complex, seed: Seed, order: &[TriId]) -> bool {
    let outer = seed == Seed::Outer;
    let mut removed = vec![false; c.n_triangles()];
    if let Seed::Triangle(t) = seed {
        removed[t] = true;
    }
    for &t in order {
        if t >= removed.len() || oracle_step(c, outer, &removed, t).is_none() {
            return false;
        }
        removed[t] = true;
    }
    removed.iter().all(|&r| r)
}
