//! Double chains, the polygons `P_D` and `P_D^p`, and their extreme
//! triangulations.
//!
//! Both chains sit on parabolas that bulge towards each other:
//! `u_i = (t_i, h + t_i^2)` and `l_i = (t_i, -h - t_i^2)` with
//! `t_i = 2i - n - 1`. Vertex indices in the polygons are
//! `l_1..l_n = 0..n-1`, then the optional apex, then `u_n..u_1`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{orientation, ExactPoint, Orientation, Rat};
use crate::triangulation::{triangle, Diagonal, FlipSequence, SimplePolygon, Triangle, Triangulation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleChain {
    pub n: usize,
    pub upper: Vec<ExactPoint>,
    pub lower: Vec<ExactPoint>,
}

pub fn build_double_chain(n: usize) -> Result<DoubleChain> {
    let h = 4 * (n as i64) * (n as i64);
    DoubleChain::parabolic(n, Rat::from_int(h))
}

impl DoubleChain {
    /// Chains on the parabolas `y = ±(h + t^2)`. Requires `h > 0`.
    pub fn parabolic(n: usize, h: Rat) -> Result<DoubleChain> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("double chain needs n >= 2, got {n}")));
        }
        if h.signum() <= 0 {
            return Err(Error::InvalidInput("chain offset must be positive".into()));
        }
        let t = |i: usize| Rat::from_int(2 * i as i64 - n as i64 - 1);
        let upper = (1..=n).map(|i| ExactPoint::new(t(i), &h + &(&t(i) * &t(i)))).collect();
        let lower = (1..=n).map(|i| ExactPoint::new(t(i), -(&h + &(&t(i) * &t(i))))).collect();
        Ok(DoubleChain { n, upper, lower })
    }

    /// `u_i`, 1-based.
    pub fn u(&self, i: usize) -> &ExactPoint {
        &self.upper[i - 1]
    }

    /// `l_i`, 1-based.
    pub fn l(&self, i: usize) -> &ExactPoint {
        &self.lower[i - 1]
    }

    /// A kernel point on the symmetry axis, right of `l_n u_n`.
    pub fn default_apex(&self) -> ExactPoint {
        ExactPoint::from_ints(self.n as i64, 0)
    }

    fn region(&self, q: &ExactPoint, strict: bool) -> [bool; 4] {
        let n = self.n;
        let ok = |o: Orientation, want: Orientation| o == want || (!strict && o == Orientation::Collinear);
        // Left of a left-to-right upper line is above it.
        [
            ok(orientation(self.u(1), self.u(2), q), Orientation::Cw),
            ok(orientation(self.u(n - 1), self.u(n), q), Orientation::Cw),
            ok(orientation(self.l(1), self.l(2), q), Orientation::Ccw),
            ok(orientation(self.l(n - 1), self.l(n), q), Orientation::Ccw),
        ]
    }

    /// Closed half-planes below `u_1u_2`, `u_{n-1}u_n` and above `l_1l_2`,
    /// `l_{n-1}l_n`.
    pub fn kernel_contains(&self, q: &ExactPoint) -> bool {
        self.region(q, false).iter().all(|&b| b)
    }

    /// Open wedge `W_1` or open wedge `W_n`.
    pub fn hourglass_contains(&self, q: &ExactPoint) -> bool {
        let [a, b, c, d] = self.region(q, true);
        (a && c) || (b && d)
    }

    /// Checks mutual visibility of the chains and the non-convexity of every
    /// three-plus-one quadruple. Returns the first violation found.
    pub fn check_invariants(&self) -> Result<(), String> {
        let p = self.polygon_pd();
        let n = self.n;
        for i in 1..=n {
            for j in 1..=n {
                let (a, b) = (p.l(i), p.u(j));
                if !p.polygon.is_boundary_edge(a, b) && !p.polygon.is_diagonal(a, b) {
                    return Err(format!("l{i} does not see u{j}"));
                }
            }
        }
        for (own, other, name) in [(&self.upper, &self.lower, "upper"), (&self.lower, &self.upper, "lower")] {
            for a in 0..n {
                for b in a + 1..n {
                    for c in b + 1..n {
                        for v in other {
                            if convex_position(&[&own[a], &own[b], &own[c], v]) {
                                return Err(format!("{name} triple ({a},{b},{c}) is convex with the other chain"));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// True iff no point lies in the closed triangle of the other three.
fn convex_position(pts: &[&ExactPoint; 4]) -> bool {
    (0..4).all(|i| {
        let o: Vec<&ExactPoint> = (0..4).filter(|&j| j != i).map(|j| pts[j]).collect();
        let s = [
            orientation(o[0], o[1], pts[i]),
            orientation(o[1], o[2], pts[i]),
            orientation(o[2], o[0], pts[i]),
        ];
        let inside = s.iter().all(|&x| x != Orientation::Cw) || s.iter().all(|&x| x != Orientation::Ccw);
        !inside
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Pd,
    Pdp,
}

/// A polygon built from a double chain, with index lookups for its roles.
#[derive(Clone, Debug)]
pub struct DcPolygon {
    pub chain: DoubleChain,
    pub variant: Variant,
    pub polygon: Arc<SimplePolygon>,
}

impl DoubleChain {
    pub fn polygon_pd(&self) -> DcPolygon {
        let n = self.n;
        let mut pts: Vec<ExactPoint> = self.lower.clone();
        pts.extend(self.upper.iter().rev().cloned());
        let mut labels: Vec<Option<String>> = (1..=n).map(|i| Some(format!("l{i}"))).collect();
        labels.extend((1..=n).rev().map(|i| Some(format!("u{i}"))));
        let polygon = SimplePolygon::with_labels(pts, labels).expect("double chain polygon is simple");
        DcPolygon { chain: self.clone(), variant: Variant::Pd, polygon: Arc::new(polygon) }
    }

    pub fn polygon_pdp(&self, p: &ExactPoint) -> Result<DcPolygon> {
        self.polygon_with_apex(p, "p")
    }

    /// `P_D^p` with the apex labelled `name`.
    pub fn polygon_with_apex(&self, p: &ExactPoint, name: &str) -> Result<DcPolygon> {
        let n = self.n;
        let right = orientation(self.l(n), self.u(n), p) == Orientation::Cw;
        if !right || !self.kernel_contains(p) {
            return Err(Error::PointNotInKernel);
        }
        let mut pts: Vec<ExactPoint> = self.lower.clone();
        pts.push(p.clone());
        pts.extend(self.upper.iter().rev().cloned());
        let mut labels: Vec<Option<String>> = (1..=n).map(|i| Some(format!("l{i}"))).collect();
        labels.push(Some(name.to_string()));
        labels.extend((1..=n).rev().map(|i| Some(format!("u{i}"))));
        let polygon = SimplePolygon::with_labels(pts, labels)?;
        Ok(DcPolygon { chain: self.clone(), variant: Variant::Pdp, polygon: Arc::new(polygon) })
    }
}

impl DcPolygon {
    pub fn n(&self) -> usize {
        self.chain.n
    }

    pub fn l(&self, i: usize) -> usize {
        i - 1
    }

    pub fn u(&self, i: usize) -> usize {
        match self.variant {
            Variant::Pd => 2 * self.n() - i,
            Variant::Pdp => 2 * self.n() + 1 - i,
        }
    }

    pub fn apex(&self) -> Option<usize> {
        (self.variant == Variant::Pdp).then_some(self.n())
    }

    pub fn is_upper(&self, v: usize) -> bool {
        v >= self.u(self.n()) && v <= self.u(1)
    }

    pub fn is_lower(&self, v: usize) -> bool {
        v < self.n()
    }

    /// `(T_u, T_l)`: the triangulations in which `u_1`, respectively `l_1`,
    /// has maximum degree. The apex variant also keeps `u_n l_n`.
    pub fn extreme_triangulations(&self) -> (Triangulation, Triangulation) {
        let n = self.n();
        let mut tu: Vec<Diagonal> = (2..=n).map(|j| Diagonal::new(self.u(1), self.l(j))).collect();
        tu.extend((2..n).map(|i| Diagonal::new(self.u(i), self.l(n))));
        let mut tl: Vec<Diagonal> = (2..=n).map(|j| Diagonal::new(self.l(1), self.u(j))).collect();
        tl.extend((2..n).map(|i| Diagonal::new(self.l(i), self.u(n))));
        if self.variant == Variant::Pdp {
            tu.push(Diagonal::new(self.u(n), self.l(n)));
            tl.push(Diagonal::new(self.u(n), self.l(n)));
        }
        (
            Triangulation::from_diagonals(self.polygon.clone(), tu),
            Triangulation::from_diagonals(self.polygon.clone(), tl),
        )
    }

    /// The `4n - 4` flip sequence from `T_u` to `T_l` through the apex.
    pub fn explicit_pdp_sequence(&self) -> Result<FlipSequence> {
        let p = self
            .apex()
            .ok_or_else(|| Error::ConstructionFailed("sequence needs the apex variant".into()))?;
        let n = self.n();
        let mut flips = Vec::with_capacity(4 * n - 4);
        flips.extend((2..=n).rev().map(|i| Diagonal::new(self.u(i), self.l(n))));
        flips.extend((2..=n).rev().map(|j| Diagonal::new(self.u(1), self.l(j))));
        flips.extend((1..n).map(|i| Diagonal::new(p, self.u(i))));
        flips.extend((1..n).map(|j| Diagonal::new(p, self.l(j))));
        let seq = FlipSequence { start: self.extreme_triangulations().0, flips };
        seq.states().map_err(|e| Error::ConstructionFailed(e.to_string()))?;
        Ok(seq)
    }

    /// Triangles with one vertex on each chain and the third strictly inside
    /// the hourglass, other than the ear `u_n l_n p`.
    pub fn hourglass_triangle_predicate(&self) -> impl Fn(Triangle) -> bool + '_ {
        let ear = self.apex().map(|p| triangle(self.u(self.n()), self.l(self.n()), p));
        move |t: Triangle| {
            if Some(t) == ear {
                return false;
            }
            let ups = t.iter().filter(|&&v| self.is_upper(v)).count();
            let lows = t.iter().filter(|&&v| self.is_lower(v)).count();
            if ups != 1 || lows != 1 {
                return false;
            }
            let third = t.iter().find(|&&v| !self.is_upper(v) && !self.is_lower(v)).unwrap();
            self.chain.hourglass_contains(self.polygon.vertex(*third))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{enumerate_all_triangulations, flip_distance, SearchBudget};

    #[test]
    fn invariants_hold_for_small_sizes() {
        for n in 2..=8 {
            let d = build_double_chain(n).unwrap();
            d.check_invariants().unwrap_or_else(|e| panic!("n = {n}: {e}"));
            assert!(d.kernel_contains(&d.default_apex()));
            assert!(d.polygon_pdp(&d.default_apex()).is_ok());
        }
    }

    #[test]
    fn coordinate_size_grows_slowly() {
        let bits = |n| {
            let d = build_double_chain(n).unwrap();
            d.upper.iter().chain(&d.lower).map(|p| p.bit_length()).max().unwrap()
        };
        assert!(bits(5) <= 8);
        assert!(bits(40) <= 2 * bits(5) + 6);
    }

    #[test]
    fn kernel_and_hourglass_membership() {
        let d = build_double_chain(4).unwrap();
        let mid = d.u(1).lerp(d.l(1), &Rat::new(1, 2));
        let shifted = ExactPoint::new(&mid.x - &Rat::from_int(100), mid.y.clone());
        assert!(d.hourglass_contains(&shifted));
        assert!(!d.kernel_contains(&shifted));
        assert!(!d.kernel_contains(&ExactPoint::from_ints(0, 10_000)));
        assert!(d.hourglass_contains(&d.default_apex()));
        assert!(matches!(d.polygon_pdp(&ExactPoint::from_ints(-1, 0)), Err(Error::PointNotInKernel)));
        assert!(matches!(d.polygon_pdp(&ExactPoint::from_ints(400, 0)), Err(Error::PointNotInKernel)));
    }

    #[test]
    fn polygon_sizes_and_labels() {
        let d = build_double_chain(2).unwrap();
        let pdp = d.polygon_pdp(&d.default_apex()).unwrap();
        assert_eq!(pdp.polygon.len(), 5);
        let names: Vec<_> = (0..5).map(|i| pdp.polygon.label(i).unwrap().to_string()).collect();
        assert_eq!(names, ["l1", "l2", "p", "u2", "u1"]);
        assert_eq!(pdp.u(2), 3);
        assert_eq!(d.polygon_pd().u(1), 3);
    }

    #[test]
    fn extreme_triangulations_are_valid() {
        for n in 2..=6 {
            let d = build_double_chain(n).unwrap();
            let pd = d.polygon_pd();
            let (tu, tl) = pd.extreme_triangulations();
            assert!(tu.is_valid() && tl.is_valid(), "n = {n}");
            let pdp = d.polygon_pdp(&d.default_apex()).unwrap();
            let (tu, tl) = pdp.extreme_triangulations();
            assert!(tu.is_valid() && tl.is_valid(), "n = {n}");
            assert!(tu.contains(Diagonal::new(pdp.u(n), pdp.l(n))));
        }
        let pd = build_double_chain(2).unwrap().polygon_pd();
        let (tu, tl) = pd.extreme_triangulations();
        assert_eq!(tu.diagonals().iter().copied().collect::<Vec<_>>(), [Diagonal::new(pd.u(1), pd.l(2))]);
        assert_eq!(tl.diagonals().iter().copied().collect::<Vec<_>>(), [Diagonal::new(pd.l(1), pd.u(2))]);
    }

    #[test]
    fn upper_extreme_is_unique_max_degree() {
        let pd = build_double_chain(3).unwrap().polygon_pd();
        let (tu, _) = pd.extreme_triangulations();
        let all = enumerate_all_triangulations(&tu, 1000).unwrap();
        let deg = |t: &Triangulation| t.neighbors(pd.u(1)).len();
        let best = all.iter().map(deg).max().unwrap();
        let winners: Vec<_> = all.iter().filter(|t| deg(t) == best).collect();
        assert_eq!(winners, [&tu]);
        assert_eq!(tu.diagonals().len(), 3);
    }

    #[test]
    fn every_diagonal_joins_the_chains() {
        for n in 2..=4 {
            let pd = build_double_chain(n).unwrap().polygon_pd();
            let all = enumerate_all_triangulations(&pd.extreme_triangulations().0, 100_000).unwrap();
            for t in &all {
                for d in t.diagonals() {
                    assert!(pd.is_upper(d.0) != pd.is_upper(d.1), "{d:?}");
                }
            }
        }
    }

    #[test]
    fn explicit_sequence_replays() {
        for n in 2..=8 {
            let d = build_double_chain(n).unwrap();
            let pdp = d.polygon_pdp(&d.default_apex()).unwrap();
            let seq = pdp.explicit_pdp_sequence().unwrap();
            assert_eq!(seq.len(), 4 * n - 4);
            assert_eq!(seq.replay().unwrap(), pdp.extreme_triangulations().1);
        }
    }

    #[test]
    fn small_distances() {
        let pd = build_double_chain(3).unwrap().polygon_pd();
        let (tu, tl) = pd.extreme_triangulations();
        let r = flip_distance(&pd.polygon, &tu, &tl, SearchBudget::default()).unwrap();
        assert_eq!(r.distance, Some(4));
    }
}
