use flipforge::chain_path::*;
use flipforge::rsa::{validate_arborescence, SinkSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn every_flip_on_small_plus_polygons_is_a_chain_move() {
    for m in 2..=4 {
        let plus = PlusPolygon::new(m).unwrap();
        for cp in all_chain_paths(m) {
            let t = plus.triangulation_of(&cp).unwrap();
            for &d in t.diagonals() {
                if t.flippable(d).unwrap() {
                    assert_ne!(plus.classify_flip(&t, d).unwrap(), FlipClass::Other);
                }
            }
        }
    }
}

#[test]
fn random_traces_respect_cost_bound_and_eliminate_cleanly() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let plus = PlusPolygon::new(5).unwrap();
    let mut boxed = 0;
    for _ in 0..200 {
        let steps = rng.gen_range(0..40);
        let seq = plus.random_traversal(steps, &mut rng);
        let r = trace_of(&plus, &seq).unwrap();
        assert!(r.is_valid(), "{:?}", r.validate().reasons);
        assert!(r.cost() <= seq.len() as i64, "cost {} len {} trace {:?} paths {:?}", r.cost(), seq.len(), r, seq.states().unwrap().iter().map(|t| plus.chain_path_of(t).unwrap().points).collect::<Vec<_>>());
        let pts = r.points();
        let mut sinks: Vec<_> = pts.iter().copied().filter(|p| (p.0 - 1) % 2 == 0 && (p.1 - 1) % 2 == 0 && *p != ROOT).collect();
        while sinks.len() > 4 {
            sinks.remove(rng.gen_range(0..sinks.len()));
        }
        if !r.is_box_free() {
            boxed += 1;
        }
        let e = eliminate_boxes(&r, &sinks).unwrap();
        assert!(e.is_box_free() && e.is_valid() && e.covers(&sinks));
        assert!(e.cost() <= r.cost());
        let a = shortest_path_tree(&e, &sinks).unwrap();
        let shifted = SinkSet::new(sinks.iter().map(|&(x, y)| (x - 1, y - 1)).collect()).unwrap();
        assert!(validate_arborescence(&a, &shifted).is_valid());
        assert!(2 * a.length() <= e.cost());
    }
    assert!(boxed > 20, "only {boxed} traces had boxes");
}
