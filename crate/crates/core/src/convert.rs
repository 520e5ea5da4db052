//! Arborescence to flip sequence on `P_D^*`, and back.

use std::collections::{BTreeMap, BTreeSet};

use crate::chain_path::{eliminate_boxes, shortest_path_tree, trace_of, visits, PlusPolygon, ROOT};
use crate::error::{Error, Result};
use crate::reduction::{PolyFlipInstance, SinkGadget};
use crate::rsa::{self, validate_arborescence, Arborescence, Point, Segment, SinkSet};
use crate::triangulation::{triangle, Diagonal, FlipSequence, Triangle, Triangulation};

struct Walk<'a> {
    inst: &'a PolyFlipInstance,
    u: Vec<usize>,
    l: Vec<usize>,
    children: BTreeMap<Point, BTreeSet<Point>>,
    at_sink: BTreeMap<Point, &'a SinkGadget>,
    flips: Vec<Diagonal>,
}

impl Walk<'_> {
    fn visit(&mut self, p: Point) -> Result<()> {
        let (v, w) = (p.0 as usize, p.1 as usize);
        if let Some(g) = self.at_sink.remove(&p) {
            self.flips.push(Diagonal::new(self.inst.z, self.l[w]));
            self.flips.extend(g.local.explicit_pdp_sequence()?.flips.iter().map(|&d| g.map(d)));
            self.flips.push(Diagonal::new(self.u[v], self.l[w + 1]));
        }
        let kids: Vec<Point> = self.children.get(&p).map(|c| c.iter().copied().collect()).unwrap_or_default();
        for c in kids {
            let (cv, cw) = (c.0 as usize, c.1 as usize);
            let extend = if cv > v { self.u[v] } else { self.l[w] };
            self.flips.push(Diagonal::new(self.inst.z, extend));
            self.visit(c)?;
            self.flips.push(Diagonal::new(self.u[cv], self.l[cw]));
        }
        Ok(())
    }
}

fn scaled(beta: i64, p: Point) -> Point {
    (beta * p.0 + 1, beta * p.1 + 1)
}

/// Walks `a`, scaled by `β`, depth first with children in increasing
/// `(x, y)` order. On the first arrival at a sink the chain path steps north,
/// the sink's gadget runs its explicit sequence, and the path steps back.
pub fn rsa_to_flips(a: &Arborescence, inst: &PolyFlipInstance) -> Result<FlipSequence> {
    let report = validate_arborescence(a, &inst.sinks);
    if !report.is_valid() {
        return Err(Error::InvalidArborescence(report.reasons.join("; ")));
    }
    let beta = inst.params.beta as i64;
    let m = inst.m();
    let mut children: BTreeMap<Point, BTreeSet<Point>> = BTreeMap::new();
    for (p, q) in a.unit_pieces() {
        for (x, y) in Segment::new(scaled(beta, p), scaled(beta, q)).unit_pieces() {
            children.entry(x).or_default().insert(y);
        }
    }
    let mut walk = Walk {
        inst,
        u: (0..=m).map(|k| if k == 0 { usize::MAX } else { inst.u(k) }).collect(),
        l: (0..=m).map(|k| if k == 0 { usize::MAX } else { inst.l(k) }).collect(),
        children,
        at_sink: inst.gadgets.iter().map(|g| (scaled(beta, g.sink), g)).collect(),
        flips: Vec::new(),
    };
    walk.visit(ROOT)?;
    if let Some(p) = walk.at_sink.keys().next() {
        return Err(Error::InvalidArborescence(format!("scaled sink {p:?} is not reached")));
    }
    let seq = FlipSequence { start: inst.t1.clone(), flips: walk.flips };
    let end = seq.replay()?;
    if end != inst.t2 {
        return Err(Error::ReplayFailure { index: seq.len(), reason: "sequence does not end at T2".into() });
    }
    Ok(seq)
}

/// Where a vertex of `P_D^*` lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    /// A vertex of `P_D^+`, with its index there.
    Big(usize),
    /// A pocket vertex of gadget `g`; `upper` for the chain ending at `l_s`.
    Pocket { g: usize, upper: bool },
}

/// Precomputed index maps between `P_D^*`, `P_D^+` and the gadget polygons.
pub struct Layout {
    pub plus: PlusPolygon,
    roles: Vec<Role>,
    /// Per gadget: global index to local index, for the `2d` chain vertices.
    local_of_global: Vec<BTreeMap<usize, usize>>,
    /// Per gadget: global endpoints of the bottommost pocket edge.
    bottom: Vec<(usize, usize)>,
    plus_l_s: Vec<(usize, usize)>,
}

impl Layout {
    pub fn new(inst: &PolyFlipInstance) -> Result<Layout> {
        let plus = inst.plus();
        let pp = plus.polygon();
        let n = inst.polygon.len();
        let mut roles = vec![Role::Big(usize::MAX); n];
        for (v, role) in roles.iter_mut().enumerate() {
            if let Some(label) = inst.polygon.label(v) {
                if let Some(i) = pp.find_label(label) {
                    *role = Role::Big(i);
                }
            }
        }
        let mut local_of_global = Vec::new();
        let mut bottom = Vec::new();
        let mut plus_l_s = Vec::new();
        for (gi, g) in inst.gadgets.iter().enumerate() {
            let d = g.d();
            let mut map = BTreeMap::new();
            for k in 1..=d {
                for (local, upper) in [(g.local.u(k), true), (g.local.l(k), false)] {
                    let global = g.global_of_local[local];
                    map.insert(global, local);
                    if k < d {
                        roles[global] = Role::Pocket { g: gi, upper };
                    }
                }
            }
            local_of_global.push(map);
            bottom.push((g.global_of_local[g.local.u(1)], g.global_of_local[g.local.l(1)]));
            plus_l_s.push((plus.l(g.j), plus.l(g.j + 1)));
        }
        if let Some(v) = roles.iter().position(|r| *r == Role::Big(usize::MAX)) {
            return Err(Error::InvalidInput(format!("vertex {v} belongs to neither P_D^+ nor a gadget")));
        }
        Ok(Layout { plus, roles, local_of_global, bottom, plus_l_s })
    }

    /// The gadget with at least two of its chain vertices in `t`, if any.
    fn gadget_of(&self, t: Triangle) -> Option<usize> {
        (0..self.local_of_global.len()).find(|&g| t.iter().filter(|v| self.local_of_global[g].contains_key(v)).count() >= 2)
    }
}

/// Projections of one triangulation of `P_D^*`.
#[derive(Clone, Debug)]
pub struct Projection {
    pub plus: Triangulation,
    pub locals: Vec<Triangulation>,
    /// `Δ_s` per gadget, in global indices.
    pub deltas: Vec<Triangle>,
}

fn edges_of(t: Triangle) -> [(usize, usize); 3] {
    [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])]
}

/// `Δ_s`: starting at the triangle on the bottommost pocket edge, walk the
/// dual through pocket triangles until a triangle has a vertex off the
/// gadget chains.
fn find_delta(t: &Triangulation, layout: &Layout, g: usize, by_edge: &BTreeMap<(usize, usize), Vec<Triangle>>) -> Result<Triangle> {
    let on_chain = &layout.local_of_global[g];
    let (a, b) = layout.bottom[g];
    let mut entry = (a.min(b), a.max(b));
    let mut cur = by_edge.get(&entry).and_then(|v| v.first().copied()).ok_or_else(|| fail("bottom edge has no triangle"))?;
    for _ in 0..=t.polygon().len() {
        if cur.iter().any(|v| !on_chain.contains_key(v)) {
            return Ok(cur);
        }
        let exits: Vec<(usize, usize)> = edges_of(cur)
            .into_iter()
            .filter(|&e| e != entry && t.contains(Diagonal::new(e.0, e.1)))
            .collect();
        if exits.len() != 1 {
            return Err(fail("pocket dual walk branches"));
        }
        entry = exits[0];
        cur = *by_edge[&entry].iter().find(|&&x| x != cur).ok_or_else(|| fail("dual walk dead end"))?;
    }
    Err(fail("dual walk does not terminate"))
}

fn fail(reason: &str) -> Error {
    Error::PipelineFailure { stage: "decompose", reason: reason.into() }
}

fn diagonals_from_triangles(tris: &BTreeSet<Triangle>, is_boundary: impl Fn(usize, usize) -> bool) -> BTreeSet<Diagonal> {
    tris.iter()
        .flat_map(|&t| edges_of(t))
        .filter(|&(a, b)| !is_boundary(a, b))
        .map(|(a, b)| Diagonal::new(a, b))
        .collect()
}

pub fn project(t: &Triangulation, inst: &PolyFlipInstance, layout: &Layout) -> Result<Projection> {
    let tris = t.triangles();
    let mut by_edge: BTreeMap<(usize, usize), Vec<Triangle>> = BTreeMap::new();
    for &tr in &tris {
        for e in edges_of(tr) {
            by_edge.entry(e).or_default().push(tr);
        }
    }
    let deltas: Vec<Triangle> =
        (0..inst.gadgets.len()).map(|g| find_delta(t, layout, g, &by_edge)).collect::<Result<_>>()?;

    let mut plus_tris = BTreeSet::new();
    let mut local_tris: Vec<BTreeSet<Triangle>> = vec![BTreeSet::new(); inst.gadgets.len()];
    for &tr in &tris {
        let owner = layout.gadget_of(tr);
        if let Some(g) = owner {
            let map = &layout.local_of_global[g];
            let apex = inst.gadgets[g].local.apex().expect("gadget polygon has an apex");
            let [a, b, c] = tr.map(|v| map.get(&v).copied().unwrap_or(apex));
            local_tris[g].insert(triangle(a, b, c));
            if tr == deltas[g] {
                let outside = *tr.iter().find(|v| !map.contains_key(v)).expect("delta has an outside vertex");
                let Role::Big(o) = layout.roles[outside] else {
                    return Err(fail("delta apex lies in another gadget"));
                };
                let (ls, lsp) = layout.plus_l_s[g];
                plus_tris.insert(triangle(ls, lsp, o));
            }
            continue;
        }
        let mapped = tr.map(|v| match layout.roles[v] {
            Role::Big(i) => i,
            Role::Pocket { g, upper } => {
                if upper {
                    layout.plus_l_s[g].0
                } else {
                    layout.plus_l_s[g].1
                }
            }
        });
        let tt = triangle(mapped[0], mapped[1], mapped[2]);
        if tt[0] == tt[1] || tt[1] == tt[2] {
            return Err(fail("triangle collapses in P_D^+"));
        }
        plus_tris.insert(tt);
    }
    let pp = layout.plus.polygon().clone();
    let plus_diags = diagonals_from_triangles(&plus_tris, |a, b| pp.is_boundary_edge(a, b));
    if plus_diags.len() + 3 != pp.len() {
        return Err(fail("projection to P_D^+ is not a triangulation"));
    }
    let plus = Triangulation::from_diagonals(pp, plus_diags);
    let mut locals = Vec::new();
    for (g, tris) in local_tris.iter().enumerate() {
        let lp = inst.gadgets[g].local.polygon.clone();
        let diags = diagonals_from_triangles(tris, |a, b| lp.is_boundary_edge(a, b));
        if diags.len() + 3 != lp.len() {
            return Err(fail("projection to a gadget polygon is not a triangulation"));
        }
        locals.push(Triangulation::from_diagonals(lp, diags));
    }
    Ok(Projection { plus, locals, deltas })
}

/// The pairing of the two triangles on a flipped diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlipCase {
    /// Both triangles project to the same polygon and neither is `Δ_s`.
    SameSide,
    /// One triangle projects to a gadget, the other to `P_D^+`.
    Mixed,
    /// `Δ_s` and a triangle of `P_D^+`.
    DeltaPlus,
    /// `Δ_s` and a triangle of its own gadget.
    DeltaLocal,
    /// Anything else. Never produced on valid sequences.
    Other,
}

impl FlipCase {
    pub fn number(self) -> Option<u8> {
        match self {
            FlipCase::SameSide => Some(1),
            FlipCase::Mixed => Some(2),
            FlipCase::DeltaPlus => Some(3),
            FlipCase::DeltaLocal => Some(4),
            FlipCase::Other => None,
        }
    }
}

/// Which projection a flip changed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlipEffect {
    Plus,
    Local(usize),
    Silent,
}

#[derive(Clone, Debug)]
pub struct FlipRecord {
    pub index: usize,
    pub case: FlipCase,
    pub effect: FlipEffect,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub sigma1: FlipSequence,
    pub sigma_s: Vec<FlipSequence>,
    pub records: Vec<FlipRecord>,
}

impl Decomposition {
    pub fn projected_len(&self) -> usize {
        self.sigma1.len() + self.sigma_s.iter().map(FlipSequence::len).sum::<usize>()
    }

    pub fn silent_flips(&self) -> usize {
        self.records.iter().filter(|r| r.effect == FlipEffect::Silent).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    Plus,
    Local(usize),
    Delta(usize),
}

fn classify_triangle(tr: Triangle, layout: &Layout, p: &Projection) -> Class {
    if let Some(g) = p.deltas.iter().position(|&d| d == tr) {
        Class::Delta(g)
    } else if let Some(g) = layout.gadget_of(tr) {
        Class::Local(g)
    } else {
        Class::Plus
    }
}

fn flip_case(a: Class, b: Class) -> FlipCase {
    use Class::*;
    match (a, b) {
        (Plus, Plus) => FlipCase::SameSide,
        (Local(g), Local(h)) if g == h => FlipCase::SameSide,
        (Local(_), Plus) | (Plus, Local(_)) => FlipCase::Mixed,
        (Delta(_), Plus) | (Plus, Delta(_)) => FlipCase::DeltaPlus,
        (Delta(g), Local(h)) | (Local(h), Delta(g)) if g == h => FlipCase::DeltaLocal,
        _ => FlipCase::Other,
    }
}

/// The single flip turning `a` into `b`, `None` if they are equal.
fn flip_between(a: &Triangulation, b: &Triangulation) -> Result<Option<Diagonal>> {
    let gone: Vec<Diagonal> = a.diagonals().difference(b.diagonals()).copied().collect();
    match gone.len() {
        0 => Ok(None),
        1 => Ok(Some(gone[0])),
        _ => Err(fail("one flip changed a projection by more than one flip")),
    }
}

/// Projects every state of `seq` and splits it into a sequence on `P_D^+`
/// and one per gadget polygon.
pub fn decompose_flip_sequence(seq: &FlipSequence, inst: &PolyFlipInstance) -> Result<Decomposition> {
    let d = inst.params.d;
    let limit = (d - 1) * (d - 1);
    if seq.len() >= limit {
        return Err(Error::BudgetTooLarge { len: seq.len(), limit });
    }
    decompose_unchecked(seq, inst)
}

/// [`decompose_flip_sequence`] without the length precondition. The
/// projections stay well defined; only the lower bound on each gadget
/// sequence is lost.
pub fn decompose_unchecked(seq: &FlipSequence, inst: &PolyFlipInstance) -> Result<Decomposition> {
    let layout = Layout::new(inst)?;
    let states = seq.states()?;
    let proj: Vec<Projection> = states.iter().map(|t| project(t, inst, &layout)).collect::<Result<_>>()?;
    let mut sigma1 = FlipSequence::new(proj[0].plus.clone());
    let mut sigma_s: Vec<FlipSequence> = proj[0].locals.iter().cloned().map(FlipSequence::new).collect();
    let mut records = Vec::new();
    for (k, &dg) in seq.flips.iter().enumerate() {
        let (before, after) = (&proj[k], &proj[k + 1]);
        let (x, y) = states[k].quad_apexes(dg)?;
        let case = flip_case(
            classify_triangle(triangle(dg.0, dg.1, x), &layout, before),
            classify_triangle(triangle(dg.0, dg.1, y), &layout, before),
        );
        let mut effects = Vec::new();
        if let Some(f) = flip_between(&before.plus, &after.plus)? {
            sigma1.flips.push(f);
            effects.push(FlipEffect::Plus);
        }
        for g in 0..before.locals.len() {
            if let Some(f) = flip_between(&before.locals[g], &after.locals[g])? {
                sigma_s[g].flips.push(f);
                effects.push(FlipEffect::Local(g));
            }
        }
        let effect = match effects.as_slice() {
            [] => FlipEffect::Silent,
            [e] => *e,
            _ => return Err(fail("one flip changed two projections")),
        };
        records.push(FlipRecord { index: k, case, effect });
    }
    Ok(Decomposition { sigma1, sigma_s, records })
}

/// Intermediate results of [`flips_to_rsa`].
#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub decomposition: Decomposition,
    pub trace_cost: i64,
    pub boxes: usize,
    pub eliminated_cost: i64,
    pub scaled_tree_length: i64,
    pub arborescence: Arborescence,
    /// Whether the result meets the instance budget `k`.
    pub within_k: bool,
}

/// Decompose, trace, remove boxes, take a shortest path tree, snap it to the
/// Hanan grid of the scaled sinks and divide by `β`.
pub fn flips_to_rsa(seq: &FlipSequence, inst: &PolyFlipInstance) -> Result<Arborescence> {
    Ok(flips_to_rsa_report(seq, inst)?.arborescence)
}

pub fn flips_to_rsa_report(seq: &FlipSequence, inst: &PolyFlipInstance) -> Result<PipelineReport> {
    let stage = |stage: &'static str| move |e: Error| match e {
        Error::PipelineFailure { .. } | Error::BudgetTooLarge { .. } => e,
        other => Error::PipelineFailure { stage, reason: other.to_string() },
    };
    if seq.start != inst.t1 {
        return Err(Error::PipelineFailure { stage: "input", reason: "sequence does not start at T1".into() });
    }
    let end = seq.replay().map_err(stage("input"))?;
    if end != inst.t2 {
        return Err(Error::PipelineFailure { stage: "input", reason: "sequence does not end at T2".into() });
    }
    let decomposition = decompose_flip_sequence(seq, inst).map_err(stage("decompose"))?;
    let beta = inst.params.beta as i64;
    let sigma1 = &decomposition.sigma1;
    if let Some(s) = inst.sinks.sinks.iter().find(|&&s| !visits(sigma1, s, beta)) {
        return Err(Error::PipelineFailure { stage: "traversal", reason: format!("sink {s:?} is never visited") });
    }
    let trace = trace_of(&inst.plus(), sigma1).map_err(stage("trace"))?;
    let scaled: Vec<Point> = inst.sinks.sinks.iter().map(|&s| scaled(beta, s)).collect();
    let clean = eliminate_boxes(&trace, &scaled).map_err(stage("eliminate-boxes"))?;
    let spt = shortest_path_tree(&clean, &scaled).map_err(stage("shortest-path-tree"))?;
    let scaled_set = SinkSet::new(inst.sinks.sinks.iter().map(|&(x, y)| (beta * x, beta * y)).collect())
        .map_err(stage("snap"))?;
    let snapped = rsa::snap_to_hanan(&spt, &scaled_set).map_err(stage("snap"))?;
    let mut segments = Vec::new();
    for s in &snapped.segments {
        let coords = [s.a.0, s.a.1, s.b.0, s.b.1];
        if coords.iter().any(|c| c % beta != 0) {
            return Err(Error::PipelineFailure { stage: "snap", reason: format!("{s:?} is off the scaled grid") });
        }
        segments.push(Segment::new((s.a.0 / beta, s.a.1 / beta), (s.b.0 / beta, s.b.1 / beta)));
    }
    let arborescence = Arborescence::new(segments);
    let report = validate_arborescence(&arborescence, &inst.sinks);
    if !report.is_valid() {
        return Err(Error::PipelineFailure { stage: "snap", reason: report.reasons.join("; ") });
    }
    Ok(PipelineReport {
        trace_cost: trace.cost(),
        boxes: trace.boxes.len(),
        eliminated_cost: clean.cost(),
        scaled_tree_length: spt.length(),
        within_k: arborescence.length() <= inst.k,
        arborescence,
        decomposition,
    })
}
