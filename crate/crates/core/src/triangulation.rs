//! Simple polygons, triangulations stored as diagonal sets, and edge flips.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicI8, Ordering as AtomicOrdering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{
    on_open_segment, orientation, segments_properly_intersect, ExactPoint, Orientation, Rat,
};

/// A simple polygon with counterclockwise boundary and optional role labels.
pub struct SimplePolygon {
    vertices: Vec<ExactPoint>,
    labels: Vec<Option<String>>,
    // Lazily filled orientation signs, indexed by (i, j, k); 2 = unknown.
    orient_cache: Vec<AtomicI8>,
}

impl fmt::Debug for SimplePolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimplePolygon")
            .field("vertices", &self.vertices)
            .field("labels", &self.labels)
            .finish()
    }
}

impl PartialEq for SimplePolygon {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.labels == other.labels
    }
}

impl SimplePolygon {
    pub fn new(vertices: Vec<ExactPoint>) -> Result<SimplePolygon> {
        let labels = vec![None; vertices.len()];
        SimplePolygon::with_labels(vertices, labels)
    }

    pub fn with_labels(vertices: Vec<ExactPoint>, labels: Vec<Option<String>>) -> Result<SimplePolygon> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolygon(format!("{n} vertices")));
        }
        if labels.len() != n {
            return Err(Error::InvalidPolygon("label count differs from vertex count".into()));
        }
        let cache_len = n.checked_mul(n).and_then(|v| v.checked_mul(n)).unwrap_or(0);
        let poly = SimplePolygon {
            vertices,
            labels,
            orient_cache: if n <= 160 { (0..cache_len).map(|_| AtomicI8::new(2)).collect() } else { Vec::new() },
        };
        poly.check_simple()?;
        Ok(poly)
    }

    fn check_simple(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            for j in i + 1..n {
                if self.vertices[i] == self.vertices[j] {
                    return Err(Error::InvalidPolygon(format!("vertices {i} and {j} coincide")));
                }
            }
        }
        for i in 0..n {
            let (a, b) = self.edge(i);
            for j in i + 1..n {
                let (c, d) = self.edge(j);
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // Consecutive edges may only meet at their shared vertex.
                    let (p, q, r) = if j == i + 1 { (a, b, d) } else { (c, d, b) };
                    if orientation(p, q, r) == Orientation::Collinear
                        && (on_open_segment(p, q, r) || on_open_segment(q, r, p))
                    {
                        return Err(Error::InvalidPolygon(format!("edges {i} and {j} overlap")));
                    }
                } else if segments_properly_intersect((a, b), (c, d)) || a == c || a == d || b == c || b == d {
                    return Err(Error::InvalidPolygon(format!("edges {i} and {j} intersect")));
                }
            }
        }
        if self.signed_area2().signum() <= 0 {
            return Err(Error::InvalidPolygon("boundary is not counterclockwise".into()));
        }
        Ok(())
    }

    fn signed_area2(&self) -> Rat {
        let n = self.len();
        (0..n).fold(Rat::zero(), |acc, i| {
            let p = &self.vertices[i];
            let q = &self.vertices[(i + 1) % n];
            acc + (&p.x * &q.y - &p.y * &q.x)
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[ExactPoint] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &ExactPoint {
        &self.vertices[i]
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Option<&str> {
        self.labels[i].as_deref()
    }

    /// Index of the vertex carrying `label`.
    pub fn find_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l.as_deref() == Some(label))
    }

    fn edge(&self, i: usize) -> (&ExactPoint, &ExactPoint) {
        (&self.vertices[i], &self.vertices[(i + 1) % self.len()])
    }

    pub fn next(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }

    pub fn prev(&self, i: usize) -> usize {
        (i + self.len() - 1) % self.len()
    }

    pub fn is_boundary_edge(&self, a: usize, b: usize) -> bool {
        a != b && (self.next(a) == b || self.next(b) == a)
    }

    /// Orientation of the vertex triple `(i, j, k)`, cached.
    pub fn orient(&self, i: usize, j: usize, k: usize) -> Orientation {
        let n = self.len();
        if self.orient_cache.is_empty() {
            return orientation(&self.vertices[i], &self.vertices[j], &self.vertices[k]);
        }
        let slot = &self.orient_cache[(i * n + j) * n + k];
        match slot.load(AtomicOrdering::Relaxed) {
            1 => Orientation::Ccw,
            -1 => Orientation::Cw,
            0 => Orientation::Collinear,
            _ => {
                let o = orientation(&self.vertices[i], &self.vertices[j], &self.vertices[k]);
                let s = match o {
                    Orientation::Ccw => 1,
                    Orientation::Cw => -1,
                    Orientation::Collinear => 0,
                };
                slot.store(s, AtomicOrdering::Relaxed);
                o
            }
        }
    }

    fn left(&self, a: usize, b: usize, c: usize) -> bool {
        self.orient(a, b, c) == Orientation::Ccw
    }

    fn left_on(&self, a: usize, b: usize, c: usize) -> bool {
        self.orient(a, b, c) != Orientation::Cw
    }

    /// True iff the segment from vertex `i` towards vertex `j` starts into
    /// the interior angle at `i`.
    fn in_cone(&self, i: usize, j: usize) -> bool {
        let a0 = self.prev(i);
        let a1 = self.next(i);
        if self.left_on(i, a1, a0) {
            self.left(i, j, a0) && self.left(j, i, a1)
        } else {
            !(self.left_on(i, j, a1) && self.left_on(j, i, a0))
        }
    }

    /// True iff `i j` is a diagonal: it joins non-adjacent vertices and its
    /// relative interior lies in the polygon interior.
    pub fn is_diagonal(&self, i: usize, j: usize) -> bool {
        let n = self.len();
        if i == j || i >= n || j >= n || self.is_boundary_edge(i, j) {
            return false;
        }
        let (p, q) = (&self.vertices[i], &self.vertices[j]);
        for k in 0..n {
            if k != i && k != j && on_open_segment(p, q, &self.vertices[k]) {
                return false;
            }
        }
        for k in 0..n {
            let k2 = self.next(k);
            if k == i || k == j || k2 == i || k2 == j {
                continue;
            }
            if segments_properly_intersect((p, q), self.edge(k)) {
                return false;
            }
        }
        self.in_cone(i, j) && self.in_cone(j, i)
    }
}

/// Unordered vertex pair, stored with the smaller index first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Diagonal(pub usize, pub usize);

impl Diagonal {
    pub fn new(a: usize, b: usize) -> Diagonal {
        if a <= b {
            Diagonal(a, b)
        } else {
            Diagonal(b, a)
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0 == v || self.1 == v
    }

    pub fn other(&self, v: usize) -> usize {
        if self.0 == v {
            self.1
        } else {
            self.0
        }
    }
}

impl fmt::Debug for Diagonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// Sorted vertex triple.
pub type Triangle = [usize; 3];

pub fn triangle(a: usize, b: usize, c: usize) -> Triangle {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

/// Result of [`Triangulation::validate`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub reasons: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.reasons.is_empty()
    }
}

/// A set of diagonals of a fixed polygon. Flips return new values.
#[derive(Clone)]
pub struct Triangulation {
    polygon: Arc<SimplePolygon>,
    diagonals: BTreeSet<Diagonal>,
}

impl PartialEq for Triangulation {
    fn eq(&self, other: &Self) -> bool {
        self.diagonals == other.diagonals
            && (Arc::ptr_eq(&self.polygon, &other.polygon) || self.polygon == other.polygon)
    }
}

impl Eq for Triangulation {}

impl std::hash::Hash for Triangulation {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.diagonals.hash(state)
    }
}

impl fmt::Debug for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.diagonals.iter()).finish()
    }
}

impl Triangulation {
    /// Builds a triangulation without validating it; see [`Triangulation::validate`].
    pub fn from_diagonals(polygon: Arc<SimplePolygon>, diagonals: impl IntoIterator<Item = Diagonal>) -> Triangulation {
        Triangulation { polygon, diagonals: diagonals.into_iter().collect() }
    }

    /// Builds a triangulation and rejects it unless it validates.
    pub fn checked(polygon: Arc<SimplePolygon>, diagonals: impl IntoIterator<Item = Diagonal>) -> Result<Triangulation> {
        let t = Triangulation::from_diagonals(polygon, diagonals);
        let report = t.validate();
        if report.is_valid() {
            Ok(t)
        } else {
            Err(Error::InvalidInput(report.reasons.join("; ")))
        }
    }

    pub fn polygon(&self) -> &Arc<SimplePolygon> {
        &self.polygon
    }

    pub fn diagonals(&self) -> &BTreeSet<Diagonal> {
        &self.diagonals
    }

    pub fn contains(&self, d: Diagonal) -> bool {
        self.diagonals.contains(&d)
    }

    /// Boundary edge or diagonal.
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.polygon.is_boundary_edge(a, b) || self.diagonals.contains(&Diagonal::new(a, b))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = vec![self.polygon.prev(v), self.polygon.next(v)];
        out.extend(self.diagonals.iter().filter(|d| d.contains(v)).map(|d| d.other(v)));
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Checks every triangulation invariant and collects the violations.
    pub fn validate(&self) -> ValidationReport {
        let mut reasons = Vec::new();
        let p = &self.polygon;
        let n = p.len();
        if self.diagonals.len() + 3 != n {
            reasons.push(format!("{} diagonals, expected {}", self.diagonals.len(), n.saturating_sub(3)));
        }
        for d in &self.diagonals {
            if d.1 >= n {
                reasons.push(format!("{d:?} references a missing vertex"));
            } else if !p.is_diagonal(d.0, d.1) {
                reasons.push(format!("{d:?} is not a polygon diagonal"));
            }
        }
        if !reasons.is_empty() {
            return ValidationReport { reasons };
        }
        let ds: Vec<_> = self.diagonals.iter().copied().collect();
        for (i, a) in ds.iter().enumerate() {
            for b in &ds[i + 1..] {
                let shared = a.contains(b.0) || a.contains(b.1);
                if !shared
                    && segments_properly_intersect(
                        (p.vertex(a.0), p.vertex(a.1)),
                        (p.vertex(b.0), p.vertex(b.1)),
                    )
                {
                    reasons.push(format!("{a:?} crosses {b:?}"));
                }
            }
        }
        if reasons.is_empty() && self.triangles().len() + 2 != n {
            reasons.push(format!("{} faces, expected {}", self.triangles().len(), n - 2));
        }
        ValidationReport { reasons }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    /// All faces as sorted vertex triples.
    pub fn triangles(&self) -> Vec<Triangle> {
        let n = self.polygon.len();
        let mut adj = vec![Vec::new(); n];
        for v in 0..n {
            adj[v] = self.neighbors(v);
        }
        let mut out = Vec::new();
        for a in 0..n {
            for &b in adj[a].iter().filter(|&&b| b > a) {
                for &c in adj[b].iter().filter(|&&c| c > b) {
                    if adj[a].binary_search(&c).is_ok() {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }

    pub fn contains_triangle(&self, t: Triangle) -> bool {
        self.has_edge(t[0], t[1]) && self.has_edge(t[1], t[2]) && self.has_edge(t[0], t[2])
    }

    /// The two apexes of the faces on either side of `d`: first the one to
    /// the left of `d.0 -> d.1`, then the one to the right.
    pub fn quad_apexes(&self, d: Diagonal) -> Result<(usize, usize)> {
        if !self.diagonals.contains(&d) {
            return Err(Error::NotADiagonal(d.0, d.1));
        }
        let na = self.neighbors(d.0);
        let nb = self.neighbors(d.1);
        let common: Vec<usize> = na.iter().copied().filter(|c| nb.binary_search(c).is_ok()).collect();
        let p = &self.polygon;
        let left = common.iter().copied().find(|&c| p.orient(d.0, d.1, c) == Orientation::Ccw);
        let right = common.iter().copied().find(|&c| p.orient(d.0, d.1, c) == Orientation::Cw);
        match (left, right, common.len()) {
            (Some(l), Some(r), 2) => Ok((l, r)),
            _ => Err(Error::InvalidInput(format!("diagonal {d:?} does not bound exactly two faces"))),
        }
    }

    pub fn flippable(&self, d: Diagonal) -> Result<bool> {
        let (left, right) = self.quad_apexes(d)?;
        let p = &self.polygon;
        let quad = [d.0, right, d.1, left];
        Ok((0..4).all(|i| p.orient(quad[i], quad[(i + 1) % 4], quad[(i + 2) % 4]) == Orientation::Ccw))
    }

    /// The diagonal that replaces `d` if it is flipped.
    pub fn flip_target(&self, d: Diagonal) -> Result<Diagonal> {
        if !self.flippable(d)? {
            return Err(Error::NotFlippable(d.0, d.1));
        }
        let (l, r) = self.quad_apexes(d)?;
        Ok(Diagonal::new(l, r))
    }

    pub fn flip(&self, d: Diagonal) -> Result<Triangulation> {
        let created = self.flip_target(d)?;
        let mut diagonals = self.diagonals.clone();
        diagonals.remove(&d);
        diagonals.insert(created);
        Ok(Triangulation { polygon: Arc::clone(&self.polygon), diagonals })
    }

    /// Injective, order-independent byte encoding of the diagonal set.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut key = Vec::with_capacity(self.diagonals.len() * 4);
        for d in &self.diagonals {
            key.extend_from_slice(&(d.0 as u16).to_be_bytes());
            key.extend_from_slice(&(d.1 as u16).to_be_bytes());
        }
        key
    }
}

/// Triangulation whose diagonals all start at `apex`.
pub fn fan_triangulation(polygon: &Arc<SimplePolygon>, apex: usize) -> Result<Triangulation> {
    let n = polygon.len();
    let mut ds = Vec::new();
    for v in 0..n {
        if v == apex || polygon.is_boundary_edge(apex, v) {
            continue;
        }
        if !polygon.is_diagonal(apex, v) {
            return Err(Error::ApexNotVisible { apex, vertex: v });
        }
        ds.push(Diagonal::new(apex, v));
    }
    let t = Triangulation::from_diagonals(Arc::clone(polygon), ds);
    match t.validate().is_valid() {
        true => Ok(t),
        false => Err(Error::ApexNotVisible { apex, vertex: apex }),
    }
}

/// An ordered list of flipped diagonals applied to a start triangulation.
#[derive(Clone, Debug, PartialEq)]
pub struct FlipSequence {
    pub start: Triangulation,
    pub flips: Vec<Diagonal>,
}

impl FlipSequence {
    pub fn new(start: Triangulation) -> FlipSequence {
        FlipSequence { start, flips: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.flips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flips.is_empty()
    }

    /// Every triangulation along the sequence, start included.
    pub fn states(&self) -> Result<Vec<Triangulation>> {
        let mut out = Vec::with_capacity(self.flips.len() + 1);
        let mut cur = self.start.clone();
        for (index, d) in self.flips.iter().enumerate() {
            let next = cur.flip(*d).map_err(|e| Error::ReplayFailure { index, reason: e.to_string() })?;
            out.push(std::mem::replace(&mut cur, next));
        }
        out.push(cur);
        Ok(out)
    }

    /// Replays the sequence and returns the final triangulation.
    pub fn replay(&self) -> Result<Triangulation> {
        let mut cur = self.start.clone();
        for (index, d) in self.flips.iter().enumerate() {
            cur = cur.flip(*d).map_err(|e| Error::ReplayFailure { index, reason: e.to_string() })?;
        }
        Ok(cur)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn convex_polygon(m: usize) -> Arc<SimplePolygon> {
        // Points on the parabola y = x^2, left to right, are in convex CCW position.
        let pts: Vec<ExactPoint> = (0..m as i64).map(|i| ExactPoint::from_ints(i, i * i)).collect();
        Arc::new(SimplePolygon::new(pts).unwrap())
    }

    fn square() -> Arc<SimplePolygon> {
        let pts = vec![
            ExactPoint::from_ints(0, 0),
            ExactPoint::from_ints(1, 0),
            ExactPoint::from_ints(1, 1),
            ExactPoint::from_ints(0, 1),
        ];
        Arc::new(SimplePolygon::new(pts).unwrap())
    }

    #[test]
    fn polygon_rejects_bad_input() {
        let cw = vec![ExactPoint::from_ints(0, 0), ExactPoint::from_ints(0, 1), ExactPoint::from_ints(1, 0)];
        assert!(SimplePolygon::new(cw).is_err());
        let bowtie = vec![
            ExactPoint::from_ints(0, 0),
            ExactPoint::from_ints(2, 2),
            ExactPoint::from_ints(2, 0),
            ExactPoint::from_ints(0, 2),
        ];
        assert!(SimplePolygon::new(bowtie).is_err());
    }

    #[test]
    fn validate_examples() {
        let sq = square();
        assert!(Triangulation::from_diagonals(sq.clone(), [Diagonal::new(0, 2)]).is_valid());
        let both = Triangulation::from_diagonals(sq, [Diagonal::new(0, 2), Diagonal::new(1, 3)]);
        assert!(!both.is_valid());
        let penta = convex_polygon(5);
        let crossing = Triangulation::from_diagonals(penta, [Diagonal::new(0, 2), Diagonal::new(1, 3)]);
        let report = crossing.validate();
        assert!(report.reasons.iter().any(|r| r.contains("crosses")), "{report:?}");
    }

    #[test]
    fn square_flip() {
        let t = Triangulation::from_diagonals(square(), [Diagonal::new(0, 2)]);
        assert!(t.flippable(Diagonal::new(0, 2)).unwrap());
        let f = t.flip(Diagonal::new(0, 2)).unwrap();
        assert_eq!(f.diagonals().iter().copied().collect::<Vec<_>>(), vec![Diagonal::new(1, 3)]);
        assert_eq!(f.flip(Diagonal::new(1, 3)).unwrap(), t);
        assert!(matches!(t.flippable(Diagonal::new(1, 3)), Err(Error::NotADiagonal(1, 3))));
    }

    #[test]
    fn nonconvex_quad_not_flippable() {
        // Dart with reflex vertex 2: 0-2 is its only diagonal.
        let pts = vec![
            ExactPoint::from_ints(0, 0),
            ExactPoint::from_ints(4, 0),
            ExactPoint::from_ints(1, 1),
            ExactPoint::from_ints(0, 4),
        ];
        let poly = Arc::new(SimplePolygon::new(pts).unwrap());
        assert!(!poly.is_diagonal(1, 3));
        let t = Triangulation::checked(poly, [Diagonal::new(0, 2)]).unwrap();
        assert!(!t.flippable(Diagonal::new(0, 2)).unwrap());
        assert!(matches!(t.flip(Diagonal::new(0, 2)), Err(Error::NotFlippable(0, 2))));
    }

    #[test]
    fn fan_examples() {
        let penta = convex_polygon(5);
        for apex in 0..5 {
            assert_eq!(fan_triangulation(&penta, apex).unwrap().diagonals().len(), 2);
        }
        // Comb polygon: the bottom-left corner cannot see the far tooth.
        let pts = vec![
            ExactPoint::from_ints(0, 0),
            ExactPoint::from_ints(6, 0),
            ExactPoint::from_ints(6, 3),
            ExactPoint::from_ints(5, 3),
            ExactPoint::from_ints(5, 1),
            ExactPoint::from_ints(1, 1),
            ExactPoint::from_ints(1, 3),
            ExactPoint::from_ints(0, 3),
        ];
        let comb = Arc::new(SimplePolygon::new(pts).unwrap());
        assert!(matches!(fan_triangulation(&comb, 0), Err(Error::ApexNotVisible { .. })));
    }

    #[test]
    fn canonical_key_examples() {
        let hex = convex_polygon(6);
        let a = Triangulation::from_diagonals(hex.clone(), [Diagonal::new(0, 2), Diagonal::new(0, 3), Diagonal::new(0, 4)]);
        let b = Triangulation::from_diagonals(hex, [Diagonal::new(4, 0), Diagonal::new(3, 0), Diagonal::new(2, 0)]);
        assert_eq!(a.canonical_key(), b.canonical_key());
        let f = a.flip(Diagonal::new(0, 3)).unwrap();
        assert_ne!(a.canonical_key(), f.canonical_key());
        assert_eq!(a.triangles().len(), 4);
    }
}
