//! The polygon `P_D^*` built from a YRSA instance: a big double chain closed
//! by `z`, with one small double chain spliced into the lower chain per sink.
//!
//! Sink `(x, y)` sits at grid point `(βx + 1, βy + 1)`. Its gadget replaces
//! the lower-chain edge `l_j l_{j+1}`, `j = βy + 1`, and uses `u_i`,
//! `i = βx + 1`, as the apex of its local polygon.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::chain_path::PlusPolygon;
use crate::double_chain::{DcPolygon, DoubleChain};
use crate::error::{Error, Result};
use crate::geometry::{Affine, ExactPoint, Rat};
use crate::rsa::{Point, SinkSet};
use crate::triangulation::{Diagonal, SimplePolygon, Triangulation, ValidationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReductionParams {
    pub beta: usize,
    pub d: usize,
    pub override_allowed: bool,
}

impl ReductionParams {
    /// `β = 2N`, `d = nN`, where `n` is the grid size.
    pub fn defaults(s: &SinkSet) -> ReductionParams {
        let n_sinks = s.len().max(1);
        ReductionParams { beta: 2 * n_sinks, d: (grid_size(s) * n_sinks).max(2), override_allowed: false }
    }

    /// Desk-scale parameters. Instances stay structurally valid but lose the
    /// guarantee that a short flip sequence yields a short arborescence.
    pub fn custom(beta: usize, d: usize) -> ReductionParams {
        ReductionParams { beta, d, override_allowed: true }
    }

    pub fn is_override(&self, s: &SinkSet) -> bool {
        let def = ReductionParams::defaults(s);
        (self.beta, self.d) != (def.beta, def.d)
    }
}

/// Grid size `n`: sink coordinates lie in `0..n`.
pub fn grid_size(s: &SinkSet) -> usize {
    s.sinks.iter().map(|p| p.0.max(p.1)).max().unwrap_or(0) as usize + 1
}

pub fn budget(beta: usize, d: usize, n_sinks: usize, k: i64) -> i64 {
    2 * beta as i64 * k + (4 * d as i64 - 2) * n_sinks as i64
}

/// Smallest `d >= 2` whose budget for `k` stays below `(d - 1)^2`, the
/// length limit of the decomposition.
pub fn smallest_valid_d(beta: usize, n_sinks: usize, k: i64) -> usize {
    (2..).find(|&d| budget(beta, d, n_sinks, k) < ((d - 1) * (d - 1)) as i64).expect("budget grows linearly in d")
}

/// Axis-aligned bounding box `[min_x, max_x] x [min_y, max_y]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bin {
    pub min: ExactPoint,
    pub max: ExactPoint,
}

impl Bin {
    fn around<'a>(pts: impl IntoIterator<Item = &'a ExactPoint>) -> Bin {
        let pts: Vec<&ExactPoint> = pts.into_iter().collect();
        let min_x = pts.iter().map(|p| p.x.clone()).min().unwrap();
        let max_x = pts.iter().map(|p| p.x.clone()).max().unwrap();
        let min_y = pts.iter().map(|p| p.y.clone()).min().unwrap();
        let max_y = pts.iter().map(|p| p.y.clone()).max().unwrap();
        Bin { min: ExactPoint::new(min_x, min_y), max: ExactPoint::new(max_x, max_y) }
    }

    pub fn intersects(&self, o: &Bin) -> bool {
        self.min.x <= o.max.x && o.min.x <= self.max.x && self.min.y <= o.max.y && o.min.y <= self.max.y
    }
}

#[derive(Clone, Debug)]
pub struct SinkGadget {
    pub sink: Point,
    /// Position in the instance's sink list.
    pub index: usize,
    /// The embedded small chain. Its upper chain ends at `l_j`, its lower
    /// chain at `l_{j+1}`.
    pub chain: DoubleChain,
    /// Big-chain positions `i` (apex `u_i`) and `j` (mouth `l_j l_{j+1}`).
    pub i: usize,
    pub j: usize,
    pub l_s: usize,
    pub l_s_prime: usize,
    pub u_s: usize,
    pub bin: Bin,
    /// The gadget polygon with `u_s` as apex, in embedded coordinates.
    pub local: DcPolygon,
    /// Global vertex index of each local vertex.
    pub global_of_local: Vec<usize>,
}

impl SinkGadget {
    pub fn d(&self) -> usize {
        self.chain.n
    }

    pub fn map(&self, d: Diagonal) -> Diagonal {
        Diagonal::new(self.global_of_local[d.0], self.global_of_local[d.1])
    }

    /// Global indices of the `2d - 2` vertices strictly inside the pocket.
    pub fn pocket_vertices(&self) -> Vec<usize> {
        let d = self.d();
        (1..d)
            .map(|k| self.global_of_local[self.local.u(k)])
            .chain((1..d).map(|k| self.global_of_local[self.local.l(k)]))
            .collect()
    }

    fn local_extremes(&self) -> (Vec<Diagonal>, Vec<Diagonal>) {
        let (tu, tl) = self.local.extreme_triangulations();
        let apex = self.local.apex().unwrap();
        let keep = |t: &Triangulation| -> Vec<Diagonal> {
            t.diagonals().iter().filter(|d| !d.contains(apex)).map(|&d| self.map(d)).collect()
        };
        (keep(&tu), keep(&tl))
    }
}

#[derive(Clone, Debug)]
pub struct PolyFlipInstance {
    pub polygon: Arc<SimplePolygon>,
    pub t1: Triangulation,
    pub t2: Triangulation,
    pub budget_l: i64,
    pub params: ReductionParams,
    pub gadgets: Vec<SinkGadget>,
    pub z: usize,
    pub sinks: SinkSet,
    pub k: i64,
    pub big: DoubleChain,
}

impl PolyFlipInstance {
    pub fn m(&self) -> usize {
        self.big.n
    }

    /// `P_D^+` on the same big chain.
    pub fn plus(&self) -> PlusPolygon {
        PlusPolygon::from_chain(&self.big).expect("big chain admits its default apex")
    }

    pub fn u(&self, k: usize) -> usize {
        self.polygon.find_label(&format!("u{k}")).expect("upper chain vertex")
    }

    pub fn l(&self, k: usize) -> usize {
        self.polygon.find_label(&format!("l{k}")).expect("lower chain vertex")
    }

    /// Largest numerator or denominator bit length over all vertices.
    pub fn max_bit_length(&self) -> u64 {
        self.polygon.vertices().iter().map(ExactPoint::bit_length).max().unwrap_or(0)
    }

    pub fn expected_vertex_count(&self) -> usize {
        2 * self.m() + 1 + self.gadgets.len() * (2 * self.params.d - 2)
    }
}

/// The big chain of size `m`.
pub fn big_chain(m: usize) -> Result<DoubleChain> {
    let h = 16 * (m as i64) * (m as i64);
    DoubleChain::parabolic(m, Rat::from_int(h))
}

/// Embeds a size-`d` double chain into the lower-chain edge `l_j l_{j+1}` of
/// `big`, with `u_i` as the only vertex in its hourglass.
pub fn embed_gadget_coordinates(big: &DoubleChain, i: usize, j: usize, d: usize) -> Result<DoubleChain> {
    let m = big.n as i64;
    if d < 2 {
        return Err(Error::GadgetPlacementFailed(format!("gadget size {d} < 2")));
    }
    if j + 1 > big.n || i > big.n || i == 0 || j == 0 {
        return Err(Error::GadgetPlacementFailed(format!("positions ({i}, {j}) outside the chain")));
    }
    let di = d as i64;
    let x_p = (di - 1) + 8 * m * (2 * di - 2);
    let h = 8 * (2 * di - 4) * (x_p + di) + 4 * di * di;
    let local = DoubleChain::parabolic(d, Rat::from_int(h))?;
    let p = ExactPoint::from_ints(x_p, 0);
    if !local.kernel_contains(&p) {
        return Err(Error::GadgetPlacementFailed("local apex outside the local kernel".into()));
    }
    let map = Affine::from_triangles([local.u(d), local.l(d), &p], [big.l(j), big.l(j + 1), big.u(i)])
        .ok_or_else(|| Error::GadgetPlacementFailed("degenerate placement triangle".into()))?;
    if map.determinant().signum() <= 0 {
        return Err(Error::GadgetPlacementFailed("placement reverses orientation".into()));
    }
    Ok(DoubleChain {
        n: d,
        upper: local.upper.iter().map(|q| map.apply(q)).collect(),
        lower: local.lower.iter().map(|q| map.apply(q)).collect(),
    })
}

pub fn build_instance(s: &SinkSet, k: i64, params: ReductionParams) -> Result<PolyFlipInstance> {
    s.require_yrsa()?;
    if s.is_empty() {
        return Err(Error::InvalidInput("instance has no sinks".into()));
    }
    if k < 1 {
        return Err(Error::InvalidInput(format!("budget k = {k} must be at least 1")));
    }
    if params.beta < 2 || params.beta % 2 != 0 {
        return Err(Error::InvalidInput(format!("beta = {} must be even and at least 2", params.beta)));
    }
    if params.d < 2 {
        return Err(Error::InvalidInput(format!("d = {} must be at least 2", params.d)));
    }
    if params.is_override(s) && !params.override_allowed {
        return Err(Error::InvalidInput("non-default parameters need override mode".into()));
    }
    let (beta, d) = (params.beta, params.d);
    let m = beta * grid_size(s);
    let big = big_chain(m)?;

    // Sinks in order of their mouth position along the lower chain.
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by_key(|&q| s.sinks[q].1);
    let mut chains: Vec<(usize, usize, usize, DoubleChain)> = Vec::new();
    for &q in &order {
        let (x, y) = s.sinks[q];
        let (i, j) = (beta * x as usize + 1, beta * y as usize + 1);
        chains.push((q, i, j, embed_gadget_coordinates(&big, i, j, d)?));
    }

    let mut pts: Vec<ExactPoint> = Vec::new();
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut pocket_start = vec![0usize; s.len()];
    let mut next_gadget = chains.iter().peekable();
    for kk in 1..=m {
        pts.push(big.l(kk).clone());
        labels.push(Some(format!("l{kk}")));
        if let Some((q, _, j, ch)) = next_gadget.peek() {
            if *j == kk {
                pocket_start[*q] = pts.len();
                for a in (1..d).rev() {
                    pts.push(ch.u(a).clone());
                    labels.push(Some(format!("gadget:s{}:u{a}", q + 1)));
                }
                for a in 1..d {
                    pts.push(ch.l(a).clone());
                    labels.push(Some(format!("gadget:s{}:l{a}", q + 1)));
                }
                next_gadget.next();
            }
        }
    }
    let z = pts.len();
    pts.push(big.default_apex());
    labels.push(Some("z".into()));
    for kk in (1..=m).rev() {
        pts.push(big.u(kk).clone());
        labels.push(Some(format!("u{kk}")));
    }
    let polygon = Arc::new(
        SimplePolygon::with_labels(pts, labels).map_err(|e| Error::GadgetPlacementFailed(e.to_string()))?,
    );
    let find = |l: String| polygon.find_label(&l).expect("label present");

    let mut gadgets = Vec::new();
    for (q, i, j, ch) in chains {
        let u_s = find(format!("u{i}"));
        let local = ch.polygon_with_apex(big.u(i), "u_s").map_err(|e| {
            Error::GadgetPlacementFailed(format!("sink {:?}: {e}", s.sinks[q]))
        })?;
        let mut global_of_local = vec![0usize; 2 * d + 1];
        for a in 1..d {
            global_of_local[local.u(a)] = pocket_start[q] + (d - 1 - a);
            global_of_local[local.l(a)] = pocket_start[q] + (d - 1) + (a - 1);
        }
        global_of_local[local.u(d)] = find(format!("l{j}"));
        global_of_local[local.l(d)] = find(format!("l{}", j + 1));
        global_of_local[local.apex().unwrap()] = u_s;
        let bin = Bin::around(ch.upper.iter().chain(&ch.lower));
        gadgets.push(SinkGadget {
            sink: s.sinks[q],
            index: q,
            chain: ch,
            i,
            j,
            l_s: find(format!("l{j}")),
            l_s_prime: find(format!("l{}", j + 1)),
            u_s,
            bin,
            local,
            global_of_local,
        });
    }
    gadgets.sort_by_key(|g| g.index);

    let mut base: Vec<Diagonal> = (1..m).map(|kk| Diagonal::new(z, find(format!("u{kk}")))).collect();
    base.extend((1..m).map(|kk| Diagonal::new(z, find(format!("l{kk}")))));
    let mut d1 = base.clone();
    let mut d2 = base;
    for g in &gadgets {
        let (tu, tl) = g.local_extremes();
        d1.extend(tu);
        d2.extend(tl);
    }
    let t1 = Triangulation::from_diagonals(polygon.clone(), d1);
    let t2 = Triangulation::from_diagonals(polygon.clone(), d2);
    let inst = PolyFlipInstance {
        polygon,
        t1,
        t2,
        budget_l: budget(beta, d, s.len(), k),
        params,
        gadgets,
        z,
        sinks: s.clone(),
        k,
        big,
    };
    let report = verify_instance(&inst);
    if !report.is_valid() {
        return Err(Error::GadgetPlacementFailed(report.reasons.join("; ")));
    }
    Ok(inst)
}

/// Checks every structural condition of an instance.
pub fn verify_instance(inst: &PolyFlipInstance) -> ValidationReport {
    let mut reasons = Vec::new();
    let p = &inst.polygon;
    if let Err(e) = SimplePolygon::new(p.vertices().to_vec()) {
        reasons.push(format!("polygon: {e}"));
    }
    if p.len() != inst.expected_vertex_count() {
        reasons.push(format!("{} vertices, expected {}", p.len(), inst.expected_vertex_count()));
    }
    let expected = budget(inst.params.beta, inst.params.d, inst.sinks.len(), inst.k);
    if inst.budget_l != expected {
        reasons.push(format!("budget {} differs from formula value {expected}", inst.budget_l));
    }
    for (name, t) in [("T1", &inst.t1), ("T2", &inst.t2)] {
        let r = t.validate();
        reasons.extend(r.reasons.into_iter().map(|x| format!("{name}: {x}")));
        for kk in 1..inst.m() {
            for v in [inst.u(kk), inst.l(kk)] {
                if !t.contains(Diagonal::new(inst.z, v)) {
                    reasons.push(format!("{name} lacks the z-fan diagonal to vertex {v}"));
                }
            }
        }
    }
    for g in &inst.gadgets {
        let tag = format!("gadget {:?}", g.sink);
        let apex = p.vertex(g.u_s);
        if !g.chain.kernel_contains(apex) {
            reasons.push(format!("{tag}: u_s is outside the flip-kernel"));
        }
        if !g.chain.hourglass_contains(apex) {
            reasons.push(format!("{tag}: u_s is outside the hourglass"));
        }
        for (v, q) in p.vertices().iter().enumerate() {
            if v != g.u_s && g.chain.hourglass_contains(q) {
                reasons.push(format!("{tag}: vertex {v} lies inside the hourglass"));
            }
        }
        let (tu, tl) = g.local_extremes();
        if !tu.iter().all(|&d| inst.t1.contains(d)) {
            reasons.push(format!("{tag}: T1 is not upper-extreme on the gadget"));
        }
        if !tl.iter().all(|&d| inst.t2.contains(d)) {
            reasons.push(format!("{tag}: T2 is not lower-extreme on the gadget"));
        }
        for h in &inst.gadgets {
            if h.index > g.index && g.bin.intersects(&h.bin) {
                reasons.push(format!("{tag}: bin overlaps the bin of gadget {:?}", h.sink));
            }
        }
        // The local polygon must sit inside P_D*: its two apex edges cross no boundary edge.
        for e in [(g.l_s, g.u_s), (g.l_s_prime, g.u_s)] {
            if !p.is_diagonal(e.0, e.1) && !p.is_boundary_edge(e.0, e.1) {
                reasons.push(format!("{tag}: {e:?} is neither an edge nor a diagonal"));
            }
        }
    }
    let mouths: BTreeSet<usize> = inst.gadgets.iter().map(|g| g.j).collect();
    if mouths.len() != inst.gadgets.len() {
        reasons.push("two gadgets share a mouth".into());
    }
    ValidationReport { reasons }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sink_defaults() {
        let s = SinkSet::yrsa(vec![(1, 1)]).unwrap();
        let inst = build_instance(&s, 2, ReductionParams::defaults(&s)).unwrap();
        assert_eq!((inst.params.beta, inst.params.d), (2, 2));
        assert_eq!(inst.budget_l, 2 * 2 * 2 + (4 * 2 - 2));
        assert_eq!(inst.polygon.len(), inst.expected_vertex_count());
        assert!(verify_instance(&inst).is_valid());
    }

    #[test]
    fn small_overrides_verify() {
        let cases: Vec<Vec<Point>> = vec![
            vec![(0, 0)],
            vec![(2, 0)],
            vec![(0, 2)],
            vec![(1, 0), (0, 1)],
            vec![(2, 1), (1, 2)],
            vec![(2, 0), (0, 1), (1, 2)],
        ];
        for sinks in cases {
            let s = SinkSet::yrsa(sinks.clone()).unwrap();
            for (beta, d) in [(2, 2), (2, 3), (4, 4)] {
                let inst = build_instance(&s, 3, ReductionParams::custom(beta, d))
                    .unwrap_or_else(|e| panic!("{sinks:?} beta={beta} d={d}: {e}"));
                assert!(verify_instance(&inst).is_valid());
            }
            let inst = build_instance(&s, 3, ReductionParams::defaults(&s)).unwrap();
            assert!(inst.max_bit_length() < 64);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let s = SinkSet::new(vec![(1, 1), (2, 1)]).unwrap();
        assert!(matches!(
            build_instance(&s, 2, ReductionParams::custom(2, 2)),
            Err(Error::DuplicateYCoordinate(1))
        ));
        let s = SinkSet::yrsa(vec![(1, 1)]).unwrap();
        let sneaky = ReductionParams { beta: 2, d: 5, override_allowed: false };
        assert!(build_instance(&s, 2, sneaky).is_err());
        assert!(build_instance(&s, 2, ReductionParams::custom(3, 2)).is_err());
    }

    #[test]
    fn negative_checks_fire() {
        let s = SinkSet::yrsa(vec![(1, 1)]).unwrap();
        let mut inst = build_instance(&s, 2, ReductionParams::custom(2, 3)).unwrap();
        let t1 = inst.t1.clone();
        inst.t1 = inst.t2.clone();
        assert!(!verify_instance(&inst).is_valid());
        inst.t1 = t1;
        let g = &mut inst.gadgets[0];
        g.u_s = inst.z;
        assert!(!verify_instance(&inst).is_valid());
    }
}
