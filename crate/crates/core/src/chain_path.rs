//! Chain paths on `P_D^+`, flip classification, traces and their cost.
//!
//! A chain edge `u_v l_w` maps to the lattice point `(v, w)`; the chain path
//! of a triangulation is the sorted sequence of its chain edges. Grid points
//! here are 1-based with the root at `(1, 1)`.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;

use crate::double_chain::{build_double_chain, DcPolygon, DoubleChain};
use crate::error::{Error, Result};
use crate::rsa::{self, Arborescence, Point, SinkSet};
use crate::triangulation::{triangle, Diagonal, FlipSequence, SimplePolygon, Triangle, Triangulation, ValidationReport};

pub const ROOT: Point = (1, 1);

/// `P_D^+`: a double chain of size `m` closed by the apex `z`.
#[derive(Clone, Debug)]
pub struct PlusPolygon {
    pub dc: DcPolygon,
}

impl PlusPolygon {
    pub fn new(m: usize) -> Result<PlusPolygon> {
        PlusPolygon::from_chain(&build_double_chain(m)?)
    }

    pub fn from_chain(chain: &DoubleChain) -> Result<PlusPolygon> {
        Ok(PlusPolygon { dc: chain.polygon_with_apex(&chain.default_apex(), "z")? })
    }

    pub fn m(&self) -> usize {
        self.dc.n()
    }

    pub fn polygon(&self) -> &Arc<SimplePolygon> {
        &self.dc.polygon
    }

    pub fn u(&self, v: usize) -> usize {
        self.dc.u(v)
    }

    pub fn l(&self, w: usize) -> usize {
        self.dc.l(w)
    }

    pub fn z(&self) -> usize {
        self.m()
    }

    /// `(chain, position)`: `Some((true, v))` for `u_v`, `Some((false, w))`
    /// for `l_w`, `None` for `z`.
    fn role(&self, i: usize) -> Option<(bool, usize)> {
        let m = self.m();
        if i < m {
            Some((false, i + 1))
        } else if i == m {
            None
        } else {
            Some((true, 2 * m + 1 - i))
        }
    }

    /// Chain triangle `u_{v} l_{w} l_{w+1}` in polygon indices.
    pub fn visiting_triangle(&self, v: usize, w: usize) -> Triangle {
        triangle(self.u(v), self.l(w), self.l(w + 1))
    }

    pub fn root_triangulation(&self) -> Triangulation {
        self.triangulation_of(&ChainPath::root()).expect("root path fits every grid")
    }

    pub fn chain_path_of(&self, t: &Triangulation) -> Result<ChainPath> {
        if t.polygon().as_ref() != self.polygon().as_ref() {
            return Err(Error::WrongPolygon("triangulation is not on this P_D+".into()));
        }
        let mut pts: Vec<Point> = vec![ROOT];
        for d in t.diagonals() {
            match (self.role(d.0), self.role(d.1)) {
                (Some((true, v)), Some((false, w))) | (Some((false, w)), Some((true, v))) => {
                    pts.push((v as i64, w as i64));
                }
                (None, _) | (_, None) => {}
                _ => return Err(Error::WrongPolygon(format!("diagonal {d:?} joins one chain to itself"))),
            }
        }
        pts.sort_by_key(|&(v, w)| (v + w, v));
        let cp = ChainPath { points: pts };
        cp.check()
            .map_err(|e| Error::WrongPolygon(format!("chain edges do not form a path: {e}")))?;
        Ok(cp)
    }

    pub fn triangulation_of(&self, cp: &ChainPath) -> Result<Triangulation> {
        let m = self.m() as i64;
        if cp.points.iter().any(|&(v, w)| v < 1 || w < 1 || v > m || w > m) {
            return Err(Error::PathOutOfRange(self.m()));
        }
        cp.check().map_err(Error::InvalidInput)?;
        let mut diagonals: Vec<Diagonal> = cp
            .points
            .iter()
            .skip(1)
            .map(|&(v, w)| Diagonal::new(self.u(v as usize), self.l(w as usize)))
            .collect();
        let (bv, bw) = cp.endpoint();
        let z = self.z();
        diagonals.extend((bv as usize..self.m()).map(|k| Diagonal::new(z, self.u(k))));
        diagonals.extend((bw as usize..self.m()).map(|k| Diagonal::new(z, self.l(k))));
        Ok(Triangulation::from_diagonals(self.polygon().clone(), diagonals))
    }

    pub fn classify_flip(&self, t: &Triangulation, d: Diagonal) -> Result<FlipClass> {
        if !t.flippable(d)? {
            return Err(Error::NotFlippable(d.0, d.1));
        }
        let before = self.chain_path_of(t)?;
        let after = self.chain_path_of(&t.flip(d)?)?;
        Ok(compare_paths(&before, &after).0)
    }

    /// A random flip sequence on `P_D^+` that starts and ends at the root
    /// path: `steps` uniformly random flips, then shortening back to the root.
    pub fn random_traversal(&self, steps: usize, rng: &mut impl Rng) -> FlipSequence {
        let start = self.root_triangulation();
        let mut t = start.clone();
        let mut flips = Vec::new();
        for _ in 0..steps {
            let options: Vec<Diagonal> =
                t.diagonals().iter().copied().filter(|&d| t.flippable(d).unwrap_or(false)).collect();
            let d = options[rng.gen_range(0..options.len())];
            t = t.flip(d).expect("flippable");
            flips.push(d);
        }
        loop {
            let cp = self.chain_path_of(&t).expect("valid P_D+ triangulation");
            if cp.points.len() == 1 {
                break;
            }
            let (v, w) = cp.endpoint();
            let d = Diagonal::new(self.u(v as usize), self.l(w as usize));
            t = t.flip(d).expect("the last chain edge is flippable");
            flips.push(d);
        }
        FlipSequence { start, flips }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlipClass {
    ExtendNorth,
    ExtendEast,
    Shorten,
    BendFlip,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChainPath {
    pub points: Vec<Point>,
}

impl ChainPath {
    pub fn root() -> ChainPath {
        ChainPath { points: vec![ROOT] }
    }

    pub fn endpoint(&self) -> Point {
        *self.points.last().unwrap()
    }

    fn check(&self) -> Result<(), String> {
        if self.points.first() != Some(&ROOT) {
            return Err("path does not start at the root".into());
        }
        for w in self.points.windows(2) {
            let (a, b) = (w[0], w[1]);
            if !(b == (a.0 + 1, a.1) || b == (a.0, a.1 + 1)) {
                return Err(format!("step {a:?} -> {b:?} is not a unit step north or east"));
            }
        }
        Ok(())
    }
}

/// Every chain path inside the `m x m` grid.
pub fn all_chain_paths(m: usize) -> Vec<ChainPath> {
    let m = m as i64;
    let mut out = Vec::new();
    let mut stack = vec![vec![ROOT]];
    while let Some(p) = stack.pop() {
        let (x, y) = *p.last().unwrap();
        if x < m {
            let mut q = p.clone();
            q.push((x + 1, y));
            stack.push(q);
        }
        if y < m {
            let mut q = p.clone();
            q.push((x, y + 1));
            stack.push(q);
        }
        out.push(ChainPath { points: p });
    }
    out.sort();
    out
}

/// Class of the change from `a` to `b`, plus the grid element it touches:
/// the new edge for extensions, the box corner for bend flips.
fn compare_paths(a: &ChainPath, b: &ChainPath) -> (FlipClass, Option<Element>) {
    let (la, lb) = (a.points.len(), b.points.len());
    if lb == la + 1 && b.points[..la] == a.points[..] {
        let (p, q) = (a.endpoint(), b.endpoint());
        let class = if q.1 > p.1 { FlipClass::ExtendNorth } else { FlipClass::ExtendEast };
        return (class, Some(Element::Edge(p, q)));
    }
    if la == lb + 1 && a.points[..lb] == b.points[..] {
        return (FlipClass::Shorten, None);
    }
    if la == lb {
        let diff: Vec<usize> = (0..la).filter(|&i| a.points[i] != b.points[i]).collect();
        if let [i] = diff[..] {
            if i > 0 && i + 1 < la {
                let (p, q) = (a.points[i - 1], a.points[i + 1]);
                if q == (p.0 + 1, p.1 + 1) {
                    return (FlipClass::BendFlip, Some(Element::Box(p)));
                }
            }
        }
    }
    (FlipClass::Other, None)
}

enum Element {
    Edge(Point, Point),
    Box(Point),
}

pub type Edge = (Point, Point);

/// Unit edges plus unit boxes keyed by their lower-left corner.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub edges: BTreeSet<Edge>,
    pub boxes: BTreeSet<Point>,
}

fn box_sides(b: Point) -> [Edge; 4] {
    let (x, y) = b;
    [((x, y), (x + 1, y)), ((x + 1, y), (x + 1, y + 1)), ((x, y + 1), (x + 1, y + 1)), ((x, y), (x, y + 1))]
}

/// Neighbouring box across each side, in the order of [`box_sides`].
fn box_neighbours(b: Point) -> [Point; 4] {
    let (x, y) = b;
    [(x, y - 1), (x + 1, y), (x, y + 1), (x - 1, y)]
}

fn norm(p: Point, q: Point) -> Edge {
    if p <= q {
        (p, q)
    } else {
        (q, p)
    }
}

impl Trace {
    pub fn from_edges(edges: impl IntoIterator<Item = Edge>) -> Trace {
        Trace { edges: edges.into_iter().map(|(p, q)| norm(p, q)).collect(), boxes: BTreeSet::new() }
    }

    pub fn is_box_free(&self) -> bool {
        self.boxes.is_empty()
    }

    /// Adds a box and drops the edges that now coincide with its sides.
    pub fn add_box(&mut self, b: Point) {
        self.boxes.insert(b);
        for s in box_sides(b) {
            self.edges.remove(&s);
        }
    }

    /// Adds an edge unless it lies on the side of a box.
    pub fn add_edge(&mut self, p: Point, q: Point) {
        let e = norm(p, q);
        if !self.side_edges().contains(&e) {
            self.edges.insert(e);
        }
    }

    fn side_edges(&self) -> BTreeSet<Edge> {
        self.boxes.iter().flat_map(|&b| box_sides(b)).collect()
    }

    /// Edges and box sides together.
    pub fn skeleton(&self) -> BTreeSet<Edge> {
        let mut s = self.side_edges();
        s.extend(self.edges.iter().copied());
        s
    }

    /// Grid points of the trace. The root always belongs to it.
    pub fn points(&self) -> BTreeSet<Point> {
        self.skeleton().into_iter().flat_map(|(p, q)| [p, q]).chain([ROOT]).collect()
    }

    pub fn cost(&self) -> i64 {
        let boxes: i64 = self
            .boxes
            .iter()
            .map(|&b| 1 + box_neighbours(b).iter().filter(|n| !self.boxes.contains(n)).count() as i64)
            .sum();
        2 * self.edges.len() as i64 + boxes
    }

    pub fn covers(&self, sinks: &[Point]) -> bool {
        let pts = self.points();
        sinks.iter().all(|s| pts.contains(s))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut reasons = Vec::new();
        let sides = self.side_edges();
        for e in &self.edges {
            let (p, q) = *e;
            if (q.0 - p.0) + (q.1 - p.1) != 1 || q.0 < p.0 || q.1 < p.1 {
                reasons.push(format!("{e:?} is not a unit grid edge"));
            }
            if sides.contains(e) {
                reasons.push(format!("edge {e:?} coincides with a box side"));
            }
        }
        let pts = self.points();
        if pts.iter().any(|p| p.0 < 1 || p.1 < 1) {
            reasons.push("trace leaves the positive quadrant".into());
        }
        if !pts.contains(&ROOT) {
            reasons.push("trace does not contain the root".into());
        } else {
            let reached = monotone_reach(&self.skeleton());
            if let Some(p) = pts.iter().find(|p| !reached.contains(p)) {
                reasons.push(format!("{p:?} has no monotone path to the root"));
            }
        }
        ValidationReport { reasons }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }
}

/// Points reachable from the root by north and east steps along `edges`.
fn monotone_reach(edges: &BTreeSet<Edge>) -> BTreeSet<Point> {
    let mut reached = BTreeSet::from([ROOT]);
    let mut stack = vec![ROOT];
    while let Some(p) = stack.pop() {
        for q in [(p.0 + 1, p.1), (p.0, p.1 + 1)] {
            if edges.contains(&(p, q)) && reached.insert(q) {
                stack.push(q);
            }
        }
    }
    reached
}

/// The trace of a flip traversal on `P_D^+`.
pub fn trace_of(plus: &PlusPolygon, seq: &FlipSequence) -> Result<Trace> {
    let states = seq.states()?;
    let paths: Vec<ChainPath> = states.iter().map(|t| plus.chain_path_of(t)).collect::<Result<_>>()?;
    if paths.first().map(|p| p.points.len()) != Some(1) || paths.last().map(|p| p.points.len()) != Some(1) {
        return Err(Error::NotATraversal("sequence must start and end at the root chain path".into()));
    }
    let mut trace = Trace::default();
    for (i, w) in paths.windows(2).enumerate() {
        match compare_paths(&w[0], &w[1]) {
            (_, Some(Element::Edge(p, q))) => trace.add_edge(p, q),
            (_, Some(Element::Box(b))) => trace.add_box(b),
            (FlipClass::Shorten, None) => {}
            _ => return Err(Error::NotATraversal(format!("flip {i} is not a chain-path move"))),
        }
    }
    Ok(trace)
}

/// True iff some state of `seq` contains the chain triangle
/// `u_{βx+1} l_{βy+1} l_{βy+2}` of `sink`, looked up by vertex label.
pub fn visits(seq: &FlipSequence, sink: Point, beta: i64) -> bool {
    let p = seq.start.polygon();
    let (v, w) = (beta * sink.0 + 1, beta * sink.1 + 1);
    let (Some(a), Some(b), Some(c)) = (
        p.find_label(&format!("u{v}")),
        p.find_label(&format!("l{w}")),
        p.find_label(&format!("l{}", w + 1)),
    ) else {
        return false;
    };
    let tri = triangle(a, b, c);
    let mut t = seq.start.clone();
    if t.contains_triangle(tri) {
        return true;
    }
    for &d in &seq.flips {
        match t.flip(d) {
            Ok(n) => t = n,
            Err(_) => return false,
        }
        if t.contains_triangle(tri) {
            return true;
        }
    }
    false
}

fn check_even(sinks: &[Point]) -> Result<()> {
    for &(x, y) in sinks {
        if (x - 1) % 2 != 0 || (y - 1) % 2 != 0 {
            return Err(Error::OddSinkCoordinate(x, y));
        }
    }
    Ok(())
}

/// Drops edges hanging off non-sink leaves until none remain.
fn prune(trace: &mut Trace, sinks: &[Point]) {
    let keep: BTreeSet<Point> = sinks.iter().copied().chain([ROOT]).collect();
    loop {
        let skel = trace.skeleton();
        let mut deg = std::collections::BTreeMap::<Point, usize>::new();
        for (p, q) in &skel {
            *deg.entry(*p).or_default() += 1;
            *deg.entry(*q).or_default() += 1;
        }
        let dead: Vec<Edge> = trace
            .edges
            .iter()
            .copied()
            .filter(|(p, q)| [p, q].iter().any(|v| deg[v] == 1 && !keep.contains(v)))
            .collect();
        if dead.is_empty() {
            return;
        }
        for e in dead {
            trace.edges.remove(&e);
        }
    }
}

fn acceptable(t: &Trace, sinks: &[Point]) -> bool {
    t.covers(sinks) && t.is_valid()
}

/// Replaces `removed` boxes by the cheapest subset of their outer sides that
/// keeps the trace valid and covering.
fn try_remove(trace: &Trace, removed: &[Point], sinks: &[Point]) -> Option<Trace> {
    let mut base = trace.clone();
    for b in removed {
        base.boxes.remove(b);
    }
    let kept_sides = base.side_edges();
    let mut outer: Vec<Edge> = removed
        .iter()
        .flat_map(|&b| box_sides(b))
        .filter(|s| !kept_sides.contains(s))
        .collect();
    outer.sort();
    outer.dedup();
    let mut best: Option<Trace> = None;
    for mask in 0u32..(1 << outer.len()) {
        let mut cand = base.clone();
        for (i, e) in outer.iter().enumerate() {
            if mask >> i & 1 == 1 {
                cand.edges.insert(*e);
            }
        }
        prune(&mut cand, sinks);
        if acceptable(&cand, sinks) && best.as_ref().map_or(true, |b| cand.cost() < b.cost()) {
            best = Some(cand);
        }
    }
    best
}

/// A box-free covering trace no more expensive than `r`.
///
/// Boxes are removed one at a time, or in adjacent pairs, keeping the
/// cheapest subset of their outer sides. The result is compared against the
/// shortest path tree inside `r` and against an optimal arborescence for the
/// sinks, and the cheapest box-free candidate wins.
pub fn eliminate_boxes(r: &Trace, sinks: &[Point]) -> Result<Trace> {
    check_even(sinks)?;
    if !r.covers(sinks) {
        let p = sinks.iter().find(|s| !r.points().contains(s)).unwrap();
        return Err(Error::SinkNotCovered(p.0, p.1));
    }
    if r.is_box_free() {
        return Ok(r.clone());
    }
    let budget = r.cost();
    let mut cur = r.clone();
    'outer: while !cur.is_box_free() {
        let boxes: Vec<Point> = cur.boxes.iter().copied().collect();
        let mut groups: Vec<Vec<Point>> = boxes.iter().map(|&b| vec![b]).collect();
        for &b in &boxes {
            for n in [(b.0 + 1, b.1), (b.0, b.1 + 1)] {
                if cur.boxes.contains(&n) {
                    groups.push(vec![b, n]);
                }
            }
        }
        for g in groups {
            if let Some(next) = try_remove(&cur, &g, sinks) {
                if next.cost() <= cur.cost() {
                    cur = next;
                    continue 'outer;
                }
            }
        }
        break;
    }
    let mut candidates = Vec::new();
    if cur.is_box_free() {
        candidates.push(cur);
    }
    let tree = tree_trace(&r.skeleton(), sinks)?;
    candidates.push(tree);
    let shifted: Vec<Point> = sinks.iter().map(|&(x, y)| (x - 1, y - 1)).collect();
    if let Ok(opt) = rsa::solve_exact(&SinkSet::new(shifted)?) {
        candidates.push(Trace::from_edges(
            opt.unit_pieces().into_iter().map(|((a, b), (c, d))| ((a + 1, b + 1), (c + 1, d + 1))),
        ));
    }
    let best = candidates.into_iter().min_by_key(Trace::cost).unwrap();
    if best.cost() > budget {
        return Err(Error::ConstructionFailed(format!(
            "no box-free covering trace within cost {budget} (best {})",
            best.cost()
        )));
    }
    Ok(best)
}

fn tree_trace(skeleton: &BTreeSet<Edge>, sinks: &[Point]) -> Result<Trace> {
    let tree = rsa::tree_from_monotone_graph(skeleton, sinks, ROOT)?;
    Ok(Trace::from_edges(tree))
}

/// A shortest path tree of a box-free trace, shifted so the root is the
/// origin. Valid for the sinks shifted by `(-1, -1)`.
pub fn shortest_path_tree(r: &Trace, sinks: &[Point]) -> Result<Arborescence> {
    if !r.is_box_free() {
        return Err(Error::InvalidInput("trace still contains boxes".into()));
    }
    let pts = r.points();
    if let Some(p) = sinks.iter().find(|s| **s != ROOT && !pts.contains(s)) {
        return Err(Error::SinkNotCovered(p.0, p.1));
    }
    let targets: Vec<Point> = sinks.iter().copied().filter(|&s| s != ROOT).collect();
    let tree = rsa::tree_from_monotone_graph(&r.edges, &targets, ROOT)?;
    let mut keep: BTreeSet<Point> = targets.iter().map(|&(x, y)| (x - 1, y - 1)).collect();
    keep.insert(rsa::ORIGIN);
    Ok(Arborescence::from_pieces(
        tree.into_iter().map(|((a, b), (c, d))| ((a - 1, b - 1), (c - 1, d - 1))),
        &keep,
    ))
}
