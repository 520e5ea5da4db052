//! Rectilinear Steiner arborescences: instances, validation, slides, an exact
//! solver and the perturbation that turns RSA into YRSA.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::triangulation::ValidationReport;

pub type Point = (i64, i64);

pub const ORIGIN: Point = (0, 0);

/// Default cap on the number of sinks `solve_exact` accepts.
pub const SOLVER_CAP: usize = 10;

/// Axis-parallel segment with `a` the west or south endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(p: Point, q: Point) -> Segment {
        if p <= q {
            Segment { a: p, b: q }
        } else {
            Segment { a: q, b: p }
        }
    }

    pub fn is_vertical(&self) -> bool {
        self.a.0 == self.b.0 && self.a.1 != self.b.1
    }

    pub fn is_horizontal(&self) -> bool {
        self.a.1 == self.b.1 && self.a.0 != self.b.0
    }

    pub fn len(&self) -> i64 {
        (self.b.0 - self.a.0).abs() + (self.b.1 - self.a.1).abs()
    }

    pub fn is_empty(&self) -> bool {
        self.a == self.b
    }

    pub fn contains(&self, p: Point) -> bool {
        self.a.0 <= p.0 && p.0 <= self.b.0 && self.a.1 <= p.1 && p.1 <= self.b.1
    }

    fn interior_contains(&self, p: Point) -> bool {
        self.contains(p) && p != self.a && p != self.b
    }

    /// Unit pieces from `a` to `b`.
    pub fn unit_pieces(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let (dx, dy) = ((self.b.0 - self.a.0).signum(), (self.b.1 - self.a.1).signum());
        (0..self.len()).map(move |k| {
            let p = (self.a.0 + k * dx, self.a.1 + k * dy);
            (p, (p.0 + dx, p.1 + dy))
        })
    }

    fn transposed(&self) -> Segment {
        Segment::new((self.a.1, self.a.0), (self.b.1, self.b.0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SinkSet {
    pub sinks: Vec<Point>,
    pub grid_n: i64,
}

impl SinkSet {
    pub fn new(sinks: Vec<Point>) -> Result<SinkSet> {
        if let Some(&(x, y)) = sinks.iter().find(|p| p.0 < 0 || p.1 < 0) {
            return Err(Error::InvalidInput(format!("sink ({x}, {y}) has a negative coordinate")));
        }
        let grid_n = sinks.iter().map(|p| p.0.max(p.1)).max().unwrap_or(0);
        Ok(SinkSet { sinks, grid_n })
    }

    /// As [`SinkSet::new`], additionally requiring distinct y-coordinates.
    pub fn yrsa(sinks: Vec<Point>) -> Result<SinkSet> {
        let s = SinkSet::new(sinks)?;
        s.require_yrsa()?;
        Ok(s)
    }

    pub fn require_yrsa(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for &(_, y) in &self.sinks {
            if !seen.insert(y) {
                return Err(Error::DuplicateYCoordinate(y));
            }
        }
        Ok(())
    }

    pub fn is_yrsa(&self) -> bool {
        self.require_yrsa().is_ok()
    }

    pub fn len(&self) -> usize {
        self.sinks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sinks.is_empty()
    }

    /// Distinct sinks other than the origin, sorted.
    pub fn targets(&self) -> Vec<Point> {
        let set: BTreeSet<Point> = self.sinks.iter().copied().filter(|&p| p != ORIGIN).collect();
        set.into_iter().collect()
    }

    pub fn hanan_xs(&self) -> Vec<i64> {
        let set: BTreeSet<i64> = self.sinks.iter().map(|p| p.0).chain([0]).collect();
        set.into_iter().collect()
    }

    pub fn hanan_ys(&self) -> Vec<i64> {
        let set: BTreeSet<i64> = self.sinks.iter().map(|p| p.1).chain([0]).collect();
        set.into_iter().collect()
    }

    fn transposed(&self) -> SinkSet {
        SinkSet { sinks: self.sinks.iter().map(|&(x, y)| (y, x)).collect(), grid_n: self.grid_n }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Arborescence {
    pub segments: Vec<Segment>,
}

impl Arborescence {
    pub fn new(mut segments: Vec<Segment>) -> Arborescence {
        segments.sort();
        Arborescence { segments }
    }

    pub fn length(&self) -> i64 {
        self.segments.iter().map(Segment::len).sum()
    }

    pub fn endpoints(&self) -> BTreeSet<Point> {
        self.segments.iter().flat_map(|s| [s.a, s.b]).collect()
    }

    pub fn unit_pieces(&self) -> BTreeSet<(Point, Point)> {
        self.segments.iter().flat_map(|s| s.unit_pieces().collect::<Vec<_>>()).collect()
    }

    /// Merges non-overlapping pieces into maximal segments. A point is kept
    /// as an endpoint if it is in `keep`, has degree other than two, or is a
    /// bend.
    pub fn from_pieces(pieces: impl IntoIterator<Item = (Point, Point)>, keep: &BTreeSet<Point>) -> Arborescence {
        let pieces: BTreeSet<Segment> =
            pieces.into_iter().map(|(p, q)| Segment::new(p, q)).filter(|s| !s.is_empty()).collect();
        let mut adj: BTreeMap<Point, Vec<Segment>> = BTreeMap::new();
        for s in &pieces {
            adj.entry(s.a).or_default().push(*s);
            adj.entry(s.b).or_default().push(*s);
        }
        let pass_through = |p: Point| -> bool {
            if keep.contains(&p) {
                return false;
            }
            match adj.get(&p).map(Vec::as_slice) {
                Some([s, t]) => s.is_vertical() == t.is_vertical(),
                _ => false,
            }
        };
        let mut used = BTreeSet::new();
        let mut out = Vec::new();
        for s in &pieces {
            if used.contains(s) {
                continue;
            }
            // Walk to the west/south end of the straight run, then east/north.
            let mut start = *s;
            while pass_through(start.a) {
                let prev = *adj[&start.a].iter().find(|t| **t != start).unwrap();
                start = prev;
            }
            let mut cur = start;
            used.insert(cur);
            while pass_through(cur.b) {
                let next = *adj[&cur.b].iter().find(|t| **t != cur).unwrap();
                used.insert(next);
                cur = next;
            }
            out.push(Segment::new(start.a, cur.b));
        }
        Arborescence::new(out)
    }

    fn transposed(&self) -> Arborescence {
        Arborescence::new(self.segments.iter().map(Segment::transposed).collect())
    }
}

/// Checks segment disjointness, tree shape, rooting at the origin, sink
/// coverage, monotone root paths and that every leaf is a sink.
pub fn validate_arborescence(a: &Arborescence, s: &SinkSet) -> ValidationReport {
    let mut reasons = Vec::new();
    for seg in &a.segments {
        if !(seg.is_vertical() || seg.is_horizontal()) {
            reasons.push(format!("segment {seg:?} is not axis-parallel with positive length"));
        }
    }
    if !reasons.is_empty() {
        return ValidationReport { reasons };
    }
    for (i, s1) in a.segments.iter().enumerate() {
        for s2 in &a.segments[i + 1..] {
            if let Some(p) = shared_non_endpoint(s1, s2) {
                reasons.push(format!("segments {s1:?} and {s2:?} meet at {p:?} away from their endpoints"));
            }
        }
    }
    let targets = s.targets();
    if a.segments.is_empty() {
        if !targets.is_empty() {
            reasons.push("empty arborescence with sinks away from the origin".into());
        }
        return ValidationReport { reasons };
    }
    let pts = a.endpoints();
    if !pts.contains(&ORIGIN) {
        reasons.push("origin is not a segment endpoint".into());
    }
    for &t in &targets {
        if !pts.contains(&t) {
            reasons.push(format!("sink {t:?} is not a segment endpoint"));
        }
    }
    if pts.len() != a.segments.len() + 1 {
        reasons.push(format!("{} endpoints for {} segments: not a tree", pts.len(), a.segments.len()));
    }
    let mut adj: BTreeMap<Point, Vec<Point>> = BTreeMap::new();
    for seg in &a.segments {
        adj.entry(seg.a).or_default().push(seg.b);
        adj.entry(seg.b).or_default().push(seg.a);
    }
    if pts.contains(&ORIGIN) {
        let mut dist = BTreeMap::from([(ORIGIN, 0i64)]);
        let mut stack = vec![ORIGIN];
        while let Some(p) = stack.pop() {
            for &q in &adj[&p] {
                if !dist.contains_key(&q) {
                    dist.insert(q, dist[&p] + (q.0 - p.0).abs() + (q.1 - p.1).abs());
                    stack.push(q);
                }
            }
        }
        if dist.len() != pts.len() {
            reasons.push("arborescence is not connected".into());
        }
        for (p, d) in &dist {
            if *d != p.0 + p.1 {
                reasons.push(format!("root path to {p:?} has length {d}, not {}", p.0 + p.1));
            }
        }
    }
    let sinks: BTreeSet<Point> = s.sinks.iter().copied().collect();
    for (p, nb) in &adj {
        if nb.len() == 1 && *p != ORIGIN && !sinks.contains(p) {
            reasons.push(format!("leaf {p:?} is not a sink"));
        }
    }
    ValidationReport { reasons }
}

fn shared_non_endpoint(s1: &Segment, s2: &Segment) -> Option<Point> {
    for p in [s2.a, s2.b] {
        if s1.interior_contains(p) {
            return Some(p);
        }
    }
    for p in [s1.a, s1.b] {
        if s2.interior_contains(p) {
            return Some(p);
        }
    }
    if s1.is_vertical() != s2.is_vertical() {
        let (v, h) = if s1.is_vertical() { (s1, s2) } else { (s2, s1) };
        let p = (v.a.0, h.a.1);
        if v.interior_contains(p) && h.interior_contains(p) {
            return Some(p);
        }
    }
    None
}

pub fn is_on_hanan_grid(a: &Arborescence, s: &SinkSet) -> bool {
    let xs: BTreeSet<i64> = s.hanan_xs().into_iter().collect();
    let ys: BTreeSet<i64> = s.hanan_ys().into_iter().collect();
    a.segments.iter().all(|seg| {
        if seg.is_vertical() {
            xs.contains(&seg.a.0)
        } else {
            ys.contains(&seg.a.1)
        }
    })
}

/// Keeps, for every sink, the path that always steps to the west neighbour
/// when one is present and otherwise to the south neighbour. `pieces` must
/// form a graph in which every node has a monotone path to `root`.
pub fn tree_from_monotone_graph(
    pieces: &BTreeSet<(Point, Point)>,
    sinks: &[Point],
    root: Point,
) -> Result<BTreeSet<(Point, Point)>> {
    let mut west: HashMap<Point, Point> = HashMap::new();
    let mut south: HashMap<Point, Point> = HashMap::new();
    for &(p, q) in pieces {
        let s = Segment::new(p, q);
        if s.is_horizontal() {
            west.insert(s.b, s.a);
        } else {
            south.insert(s.b, s.a);
        }
    }
    let mut out = BTreeSet::new();
    for &t in sinks {
        let mut p = t;
        while p != root {
            let q = *west
                .get(&p)
                .or_else(|| south.get(&p))
                .ok_or_else(|| Error::InvalidArborescence(format!("{p:?} has no monotone path to the root")))?;
            if !out.insert((q, p)) {
                break;
            }
            p = q;
        }
    }
    Ok(out)
}

/// Slides the vertical segment `e` to the right.
pub fn slide_right(a: &Arborescence, e: Segment, s: &SinkSet) -> Result<Arborescence> {
    let bad = |m: &str| Error::PreconditionViolated(m.to_string());
    if !a.segments.contains(&e) {
        return Err(bad("e is not a segment of the arborescence"));
    }
    if !e.is_vertical() {
        return Err(bad("e is not vertical"));
    }
    let sinks: BTreeSet<Point> = s.sinks.iter().copied().collect();
    if sinks.iter().any(|&p| e.contains(p)) {
        return Err(bad("e contains a sink"));
    }
    let top = e.b;
    let incident: Vec<&Segment> = a.segments.iter().filter(|t| t.a == top || t.b == top).collect();
    if incident.len() != 2 {
        return Err(bad("upper endpoint of e does not have exactly two incident segments"));
    }
    let f = **incident.iter().find(|t| **t != &e).unwrap();
    if !(f.is_horizontal() && f.a == top) {
        return Err(bad("the other segment at the upper endpoint is not a horizontal segment to the right"));
    }
    let (x0, lo, hi) = (e.a.0, e.a.1, e.b.1);
    let stops: BTreeSet<Point> = a.endpoints().union(&sinks).copied().collect();
    let delta = (1..=f.len())
        .find(|d| stops.iter().any(|&(x, y)| x == x0 + d && lo <= y && y <= hi))
        .expect("the right endpoint of f always stops the slide");
    let x1 = x0 + delta;

    let mut pieces = a.unit_pieces();
    for p in e.unit_pieces() {
        pieces.remove(&p);
    }
    for k in 0..delta {
        pieces.remove(&((x0 + k, hi), (x0 + k + 1, hi)));
    }
    let mut on_tree: BTreeSet<Point> = pieces.iter().flat_map(|&(p, q)| [p, q]).collect();
    on_tree.insert(ORIGIN);
    let d = (x1, hi);
    if on_tree.contains(&d) || sinks.contains(&d) {
        // Clockwise from d: down the right side of R, then left along its bottom.
        let mut walk: Vec<Point> = (lo..hi).rev().map(|y| (x1, y)).collect();
        walk.extend((x0..x1).rev().map(|x| (x, lo)));
        let mut prev = d;
        for p in walk {
            pieces.insert(if p < prev { (p, prev) } else { (prev, p) });
            if on_tree.contains(&p) {
                break;
            }
            prev = p;
        }
    }
    let pieces = prune_dead_leaves(pieces, &sinks);
    let mut keep = sinks;
    keep.insert(ORIGIN);
    Ok(Arborescence::from_pieces(pieces, &keep))
}

/// Slides the horizontal segment `e` upwards.
pub fn slide_up(a: &Arborescence, e: Segment, s: &SinkSet) -> Result<Arborescence> {
    slide_right(&a.transposed(), e.transposed(), &s.transposed()).map(|t| t.transposed())
}

fn prune_dead_leaves(mut pieces: BTreeSet<(Point, Point)>, sinks: &BTreeSet<Point>) -> BTreeSet<(Point, Point)> {
    loop {
        let mut deg: BTreeMap<Point, usize> = BTreeMap::new();
        for &(p, q) in &pieces {
            *deg.entry(p).or_default() += 1;
            *deg.entry(q).or_default() += 1;
        }
        let dead: Vec<(Point, Point)> = pieces
            .iter()
            .copied()
            .filter(|&(p, q)| {
                [p, q].iter().any(|v| deg[v] == 1 && *v != ORIGIN && !sinks.contains(v))
            })
            .collect();
        if dead.is_empty() {
            return pieces;
        }
        for p in dead {
            pieces.remove(&p);
        }
    }
}

/// Minimum-length RSA on the Hanan grid, by dynamic programming over grid
/// nodes and sink subsets.
pub fn solve_exact(s: &SinkSet) -> Result<Arborescence> {
    solve_exact_with_cap(s, SOLVER_CAP)
}

pub fn solve_exact_with_cap(s: &SinkSet, cap: usize) -> Result<Arborescence> {
    let targets = s.targets();
    let k = targets.len();
    if k > cap {
        return Err(Error::TooManySinks(k, cap));
    }
    if k == 0 {
        return Ok(Arborescence::default());
    }
    let xs = s.hanan_xs();
    let ys = s.hanan_ys();
    let (nx, ny) = (xs.len(), ys.len());
    let node = |i: usize, j: usize| i * ny + j;
    let full = (1usize << k) - 1;
    let mut dom = vec![0usize; nx * ny];
    let mut sink_bit = vec![0usize; nx * ny];
    for i in 0..nx {
        for j in 0..ny {
            for (b, t) in targets.iter().enumerate() {
                if t.0 >= xs[i] && t.1 >= ys[j] {
                    dom[node(i, j)] |= 1 << b;
                }
                if *t == (xs[i], ys[j]) {
                    sink_bit[node(i, j)] = 1 << b;
                }
            }
        }
    }
    const INF: i64 = i64::MAX / 4;
    let width = full + 1;
    let mut dp = vec![INF; nx * ny * width];
    for mask in 0..=full {
        for i in (0..nx).rev() {
            for j in (0..ny).rev() {
                let v = node(i, j);
                let val = if mask & !dom[v] != 0 {
                    INF
                } else if mask == 0 {
                    0
                } else if mask & sink_bit[v] != 0 {
                    dp[v * width + (mask ^ sink_bit[v])]
                } else {
                    let mut best = INF;
                    if i + 1 < nx {
                        best = best.min(dp[node(i + 1, j) * width + mask] + xs[i + 1] - xs[i]);
                    }
                    if j + 1 < ny {
                        best = best.min(dp[node(i, j + 1) * width + mask] + ys[j + 1] - ys[j]);
                    }
                    let low = mask & mask.wrapping_neg();
                    let mut sub = (mask - 1) & mask;
                    while sub > 0 {
                        if sub & low != 0 {
                            best = best.min(dp[v * width + sub] + dp[v * width + (mask ^ sub)]);
                        }
                        sub = (sub - 1) & mask;
                    }
                    best
                };
                dp[v * width + mask] = val.min(INF);
            }
        }
    }
    let optimum = dp[node(0, 0) * width + full];

    let mut pieces = BTreeSet::new();
    let mut stack = vec![(0usize, 0usize, full)];
    while let Some((i, j, mask)) = stack.pop() {
        let v = node(i, j);
        let here = dp[v * width + mask];
        if mask == 0 {
            continue;
        }
        if mask & sink_bit[v] != 0 {
            stack.push((i, j, mask ^ sink_bit[v]));
            continue;
        }
        if i + 1 < nx && dp[node(i + 1, j) * width + mask] + xs[i + 1] - xs[i] == here {
            pieces.insert(((xs[i], ys[j]), (xs[i + 1], ys[j])));
            stack.push((i + 1, j, mask));
            continue;
        }
        if j + 1 < ny && dp[node(i, j + 1) * width + mask] + ys[j + 1] - ys[j] == here {
            pieces.insert(((xs[i], ys[j]), (xs[i], ys[j + 1])));
            stack.push((i, j + 1, mask));
            continue;
        }
        let low = mask & mask.wrapping_neg();
        let mut sub = (mask - 1) & mask;
        loop {
            if sub & low != 0 && dp[v * width + sub] + dp[v * width + (mask ^ sub)] == here {
                stack.push((i, j, sub));
                stack.push((i, j, mask ^ sub));
                break;
            }
            sub = (sub - 1) & mask;
            assert!(sub > 0, "dp reconstruction found no witness");
        }
    }
    let tree = tree_from_monotone_graph(&pieces, &targets, ORIGIN)?;
    let mut keep: BTreeSet<Point> = targets.iter().copied().collect();
    keep.insert(ORIGIN);
    let out = Arborescence::from_pieces(tree, &keep);
    debug_assert_eq!(out.length(), optimum);
    Ok(out)
}

/// Optimal RSA length by branch and bound over unions of one monotone Hanan
/// path per sink. Independent of [`solve_exact`].
pub fn brute_force_oracle(s: &SinkSet) -> Result<i64> {
    let targets = s.targets();
    if targets.len() > 4 {
        return Err(Error::TooLarge(format!("{} sinks, at most 4 supported", targets.len())));
    }
    let xs = s.hanan_xs();
    let ys = s.hanan_ys();
    let (nx, ny) = (xs.len(), ys.len());
    let h_edge = |i: usize, j: usize| j * (nx - 1) + i;
    let v_edge = |i: usize, j: usize| ny * (nx - 1) + i * (ny - 1) + j;
    let edges = ny * (nx - 1) + nx * (ny - 1);
    if edges > 64 {
        return Err(Error::TooLarge(format!("{edges} Hanan edges")));
    }
    let mut weight = vec![0i64; edges];
    for j in 0..ny {
        for i in 0..nx - 1 {
            weight[h_edge(i, j)] = xs[i + 1] - xs[i];
        }
    }
    for i in 0..nx {
        for j in 0..ny - 1 {
            weight[v_edge(i, j)] = ys[j + 1] - ys[j];
        }
    }
    let cost = |mask: u64| -> i64 { (0..edges).filter(|e| mask >> e & 1 == 1).map(|e| weight[e]).sum() };

    let mut paths: Vec<Vec<u64>> = Vec::new();
    for t in &targets {
        let ti = xs.binary_search(&t.0).unwrap();
        let tj = ys.binary_search(&t.1).unwrap();
        let mut out = Vec::new();
        let mut stack = vec![(0usize, 0usize, 0u64)];
        while let Some((i, j, m)) = stack.pop() {
            if (i, j) == (ti, tj) {
                out.push(m);
                continue;
            }
            if i < ti {
                stack.push((i + 1, j, m | 1 << h_edge(i, j)));
            }
            if j < tj {
                stack.push((i, j + 1, m | 1 << v_edge(i, j)));
            }
        }
        paths.push(out);
    }

    fn search(paths: &[Vec<u64>], depth: usize, mask: u64, cost: &dyn Fn(u64) -> i64, best: &mut i64) {
        let c = cost(mask);
        if c >= *best {
            return;
        }
        if depth == paths.len() {
            *best = c;
            return;
        }
        for &p in &paths[depth] {
            search(paths, depth + 1, mask | p, cost, best);
        }
    }
    let mut best = i64::MAX;
    search(&paths, 0, 0, &cost, &mut best);
    Ok(if targets.is_empty() { 0 } else { best })
}

/// `s'_i = (x_i N^4, y_i N^4 + i)` with 1-based `i`, and `k' = k N^4 + N^3`.
pub fn perturb_to_yrsa(s: &SinkSet, k: i64) -> (SinkSet, i64) {
    let n = s.len() as i64;
    let n4 = n.pow(4);
    let sinks = s
        .sinks
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| (x * n4, y * n4 + i as i64 + 1))
        .collect();
    (SinkSet::new(sinks).expect("perturbed coordinates are nonnegative"), k * n4 + n.pow(3))
}

/// Moves every coordinate up to the nearest Hanan coordinate at or above it
/// and extracts a tree from the image. Never longer than `a`.
pub fn snap_to_hanan(a: &Arborescence, s: &SinkSet) -> Result<Arborescence> {
    let xs = s.hanan_xs();
    let ys = s.hanan_ys();
    let up = |v: i64, grid: &[i64]| -> Result<usize> {
        let k = grid.partition_point(|&g| g < v);
        if k == grid.len() {
            return Err(Error::InvalidArborescence(format!("coordinate {v} lies beyond every sink")));
        }
        Ok(k)
    };
    let mut pieces = BTreeSet::new();
    for seg in &a.segments {
        let (i0, j0) = (up(seg.a.0, &xs)?, up(seg.a.1, &ys)?);
        let (i1, j1) = (up(seg.b.0, &xs)?, up(seg.b.1, &ys)?);
        for i in i0..i1 {
            pieces.insert(((xs[i], ys[j0]), (xs[i + 1], ys[j0])));
        }
        for j in j0..j1 {
            pieces.insert(((xs[i0], ys[j]), (xs[i0], ys[j + 1])));
        }
    }
    let targets = s.targets();
    let tree = tree_from_monotone_graph(&pieces, &targets, ORIGIN)?;
    let mut keep: BTreeSet<Point> = targets.into_iter().collect();
    keep.insert(ORIGIN);
    Ok(Arborescence::from_pieces(tree, &keep))
}

/// A random arborescence over the given sinks: the tree extracted from the
/// union of one random monotone lattice path per sink.
pub fn random_arborescence(s: &SinkSet, rng: &mut impl rand::Rng) -> Arborescence {
    let targets = s.targets();
    let mut pieces = BTreeSet::new();
    for &t in &targets {
        let mut p = ORIGIN;
        while p != t {
            let east = p.0 < t.0 && (p.1 == t.1 || rng.gen_bool(0.5));
            let q = if east { (p.0 + 1, p.1) } else { (p.0, p.1 + 1) };
            pieces.insert((p, q));
            p = q;
        }
    }
    let tree = tree_from_monotone_graph(&pieces, &targets, ORIGIN).expect("monotone union");
    let mut keep: BTreeSet<Point> = targets.into_iter().collect();
    keep.insert(ORIGIN);
    Arborescence::from_pieces(tree, &keep)
}

/// Every vertical segment to which `slide_right` applies.
pub fn slidable_right(a: &Arborescence, s: &SinkSet) -> Vec<Segment> {
    a.segments
        .iter()
        .copied()
        .filter(|&e| e.is_vertical() && slide_right(a, e, s).is_ok())
        .collect()
}
