//! Breadth-first search over the implicit flip graph of a polygon.
//!
//! States are deduplicated by [`Triangulation::canonical_key`]. Neighbours are
//! always generated in increasing order of the flipped diagonal and frontiers
//! are kept in insertion order, so witnesses are reproducible run to run.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::triangulation::{Diagonal, FlipSequence, SimplePolygon, Triangle, Triangulation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Unidirectional,
    Bidirectional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_depth: usize,
    pub max_states: usize,
    pub mode: SearchMode,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_depth: 64, max_states: 5_000_000, mode: SearchMode::Bidirectional }
    }
}

impl SearchBudget {
    pub fn with_depth(max_depth: usize) -> SearchBudget {
        SearchBudget { max_depth, ..SearchBudget::default() }
    }

    pub fn mode(self, mode: SearchMode) -> SearchBudget {
        SearchBudget { mode, ..self }
    }
}

/// `distance == None` means the budget ran out, never that no path exists.
#[derive(Clone, Debug)]
pub struct DistanceResult {
    pub distance: Option<usize>,
    pub witness: Option<FlipSequence>,
    pub states_expanded: usize,
}

impl DistanceResult {
    fn exhausted(states_expanded: usize) -> DistanceResult {
        DistanceResult { distance: None, witness: None, states_expanded }
    }
}

/// Every triangulation one flip away, paired with the flipped diagonal.
pub fn flip_neighbors(t: &Triangulation) -> Vec<(Diagonal, Triangulation)> {
    t.diagonals()
        .iter()
        .filter_map(|&d| t.flip(d).ok().map(|n| (d, n)))
        .collect()
}

type Key = Vec<u8>;

struct Side {
    // key -> (parent key, diagonal flipped in the parent, diagonal created)
    parents: HashMap<Key, Option<(Key, Diagonal, Diagonal)>>,
    depth: HashMap<Key, usize>,
    frontier: Vec<Triangulation>,
    level: usize,
}

impl Side {
    fn new(root: &Triangulation) -> Side {
        let key = root.canonical_key();
        Side {
            parents: HashMap::from([(key.clone(), None)]),
            depth: HashMap::from([(key, 0)]),
            frontier: vec![root.clone()],
            level: 0,
        }
    }

    /// Expands one full layer. Returns the newly discovered states.
    fn expand(&mut self, allowed: &dyn Fn(&Triangulation) -> bool, expanded: &mut usize) -> Vec<Key> {
        let mut next = Vec::new();
        let mut fresh = Vec::new();
        for t in std::mem::take(&mut self.frontier) {
            *expanded += 1;
            let pk = t.canonical_key();
            for (d, n) in flip_neighbors(&t) {
                let k = n.canonical_key();
                if self.parents.contains_key(&k) || !allowed(&n) {
                    continue;
                }
                let created = *n.diagonals().difference(t.diagonals()).next().expect("flip creates a diagonal");
                self.parents.insert(k.clone(), Some((pk.clone(), d, created)));
                self.depth.insert(k.clone(), self.level + 1);
                fresh.push(k);
                next.push(n);
            }
        }
        self.level += 1;
        self.frontier = next;
        fresh
    }

    /// Flips from the root to `key`, in forward order.
    fn path_from_root(&self, key: &Key) -> Vec<Diagonal> {
        let mut out = Vec::new();
        let mut k = key.clone();
        while let Some(Some((pk, d, _))) = self.parents.get(&k) {
            out.push(*d);
            k = pk.clone();
        }
        out.reverse();
        out
    }

    /// Flips leading from `key` back to the root.
    fn path_to_root(&self, key: &Key) -> Vec<Diagonal> {
        let mut out = Vec::new();
        let mut k = key.clone();
        while let Some(Some((pk, _, created))) = self.parents.get(&k) {
            out.push(*created);
            k = pk.clone();
        }
        out
    }
}

fn check_inputs(p: &SimplePolygon, a: &Triangulation, b: &Triangulation) -> Result<()> {
    for (name, t) in [("source", a), ("target", b)] {
        if t.polygon().as_ref() != p {
            return Err(Error::InvalidInput(format!("{name} belongs to a different polygon")));
        }
        let report = t.validate();
        if !report.is_valid() {
            return Err(Error::InvalidInput(format!("{name}: {}", report.reasons.join("; "))));
        }
    }
    Ok(())
}

fn search(
    a: &Triangulation,
    b: &Triangulation,
    budget: SearchBudget,
    allowed: &dyn Fn(&Triangulation) -> bool,
) -> DistanceResult {
    if a == b {
        return DistanceResult { distance: Some(0), witness: Some(FlipSequence::new(a.clone())), states_expanded: 0 };
    }
    let target = b.canonical_key();
    let mut expanded = 0;
    let mut fwd = Side::new(a);
    match budget.mode {
        SearchMode::Unidirectional => {
            while fwd.level < budget.max_depth && !fwd.frontier.is_empty() {
                fwd.expand(allowed, &mut expanded);
                if fwd.parents.contains_key(&target) {
                    let flips = fwd.path_from_root(&target);
                    return DistanceResult {
                        distance: Some(flips.len()),
                        witness: Some(FlipSequence { start: a.clone(), flips }),
                        states_expanded: expanded,
                    };
                }
                if fwd.parents.len() > budget.max_states {
                    break;
                }
            }
            DistanceResult::exhausted(expanded)
        }
        SearchMode::Bidirectional => {
            let mut bwd = Side::new(b);
            loop {
                if fwd.level + bwd.level >= budget.max_depth
                    || fwd.parents.len() + bwd.parents.len() > budget.max_states
                    || (fwd.frontier.is_empty() && bwd.frontier.is_empty())
                {
                    return DistanceResult::exhausted(expanded);
                }
                let forward = !fwd.frontier.is_empty()
                    && (bwd.frontier.is_empty() || fwd.frontier.len() <= bwd.frontier.len());
                let (grown, other) = if forward { (&mut fwd, &bwd) } else { (&mut bwd, &fwd) };
                let fresh = grown.expand(allowed, &mut expanded);
                let meet = fresh
                    .iter()
                    .filter_map(|k| other.depth.get(k).map(|d| (grown.depth[k] + d, k)))
                    .min();
                if let Some((dist, key)) = meet {
                    let mut flips = fwd.path_from_root(key);
                    flips.extend(bwd.path_to_root(key));
                    debug_assert_eq!(flips.len(), dist);
                    return DistanceResult {
                        distance: Some(dist),
                        witness: Some(FlipSequence { start: a.clone(), flips }),
                        states_expanded: expanded,
                    };
                }
            }
        }
    }
}

/// Exact flip distance between `a` and `b`, with a witness sequence.
pub fn flip_distance(
    polygon: &SimplePolygon,
    a: &Triangulation,
    b: &Triangulation,
    budget: SearchBudget,
) -> Result<DistanceResult> {
    check_inputs(polygon, a, b)?;
    Ok(search(a, b, budget, &|_| true))
}

/// Flip distance within the subgraph of triangulations that contain no
/// triangle for which `forbidden` holds.
pub fn restricted_flip_distance(
    polygon: &SimplePolygon,
    a: &Triangulation,
    b: &Triangulation,
    forbidden: &dyn Fn(Triangle) -> bool,
    budget: SearchBudget,
) -> Result<DistanceResult> {
    check_inputs(polygon, a, b)?;
    let allowed = |t: &Triangulation| !t.triangles().into_iter().any(forbidden);
    if !allowed(a) || !allowed(b) {
        return Err(Error::InvalidInput("endpoint contains a forbidden triangle".into()));
    }
    Ok(search(a, b, budget, &allowed))
}

/// All triangulations reachable from `seed`, which is all of them since the
/// flip graph of a polygon is connected. Fails once more than `cap` are found.
pub fn enumerate_all_triangulations(seed: &Triangulation, cap: usize) -> Result<Vec<Triangulation>> {
    let mut seen = HashMap::from([(seed.canonical_key(), ())]);
    let mut out = vec![seed.clone()];
    let mut i = 0;
    while i < out.len() {
        let t = out[i].clone();
        i += 1;
        for (_, n) in flip_neighbors(&t) {
            if seen.insert(n.canonical_key(), ()).is_none() {
                if out.len() >= cap {
                    return Err(Error::CapExceeded(cap));
                }
                out.push(n);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::fan_triangulation;
    use crate::triangulation::tests::convex_polygon;

    /// Triangulation count of a convex m-gon by the interval recurrence,
    /// independent of any flip machinery.
    fn catalan_dp(m: usize) -> u64 {
        let mut c = vec![0u64; m + 1];
        c[0] = 1;
        for k in 1..=m {
            c[k] = (0..k).map(|i| c[i] * c[k - 1 - i]).sum();
        }
        c[m - 2]
    }

    #[test]
    fn catalan_oracle_values() {
        assert_eq!(catalan_dp(4), 2);
        assert_eq!(catalan_dp(6), 14);
        assert_eq!(catalan_dp(7), 42);
    }

    #[test]
    fn enumeration_matches_catalan() {
        for m in 4..=8 {
            let p = convex_polygon(m);
            let all = enumerate_all_triangulations(&fan_triangulation(&p, 0).unwrap(), 10_000).unwrap();
            assert_eq!(all.len() as u64, catalan_dp(m), "m = {m}");
            assert!(all.iter().all(|t| t.is_valid()));
        }
        let p = convex_polygon(7);
        assert!(matches!(
            enumerate_all_triangulations(&fan_triangulation(&p, 0).unwrap(), 10),
            Err(Error::CapExceeded(10))
        ));
    }

    #[test]
    fn neighbor_counts() {
        let quad = convex_polygon(4);
        assert_eq!(flip_neighbors(&fan_triangulation(&quad, 0).unwrap()).len(), 1);
        let hex = convex_polygon(6);
        let fan = fan_triangulation(&hex, 0).unwrap();
        let flippable = fan.diagonals().iter().filter(|d| fan.flippable(**d).unwrap()).count();
        assert_eq!(flip_neighbors(&fan).len(), flippable);
    }

    #[test]
    fn distance_properties_on_convex_heptagon() {
        let p = convex_polygon(7);
        let all = enumerate_all_triangulations(&fan_triangulation(&p, 0).unwrap(), 100).unwrap();
        let budget = SearchBudget::with_depth(20);
        let d = |a: &Triangulation, b: &Triangulation, mode| {
            flip_distance(&p, a, b, budget.mode(mode)).unwrap().distance.unwrap()
        };
        for (i, a) in all.iter().enumerate().step_by(5) {
            for b in all.iter().skip(i % 3).step_by(7) {
                let bi = d(a, b, SearchMode::Bidirectional);
                assert_eq!(bi, d(b, a, SearchMode::Bidirectional));
                assert_eq!(bi, d(a, b, SearchMode::Unidirectional));
                let r = flip_distance(&p, a, b, budget).unwrap();
                let w = r.witness.unwrap();
                assert_eq!(w.len(), bi);
                assert_eq!(&w.replay().unwrap(), b);
                for c in all.iter().step_by(11) {
                    assert!(bi <= d(a, c, SearchMode::Bidirectional) + d(c, b, SearchMode::Bidirectional));
                }
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_soft() {
        let p = convex_polygon(8);
        let a = fan_triangulation(&p, 0).unwrap();
        let b = fan_triangulation(&p, 4).unwrap();
        let r = flip_distance(&p, &a, &b, SearchBudget::with_depth(1)).unwrap();
        assert!(r.distance.is_none());
        assert_eq!(flip_distance(&p, &a, &a, SearchBudget::with_depth(0)).unwrap().distance, Some(0));
    }

    #[test]
    fn restriction_never_shortens() {
        let p = convex_polygon(7);
        let a = fan_triangulation(&p, 0).unwrap();
        let b = fan_triangulation(&p, 3).unwrap();
        let budget = SearchBudget::with_depth(20);
        let free = flip_distance(&p, &a, &b, budget).unwrap().distance.unwrap();
        let none = restricted_flip_distance(&p, &a, &b, &|_| false, budget).unwrap().distance.unwrap();
        assert_eq!(free, none);
        let forbid = |t: Triangle| t == [1, 3, 5] || t == [0, 2, 4];
        let r = restricted_flip_distance(&p, &a, &b, &forbid, budget).unwrap().distance.unwrap();
        assert!(r >= free);
    }
}
