use flipforge::convert::{decompose_flip_sequence, flips_to_rsa_report, rsa_to_flips, FlipCase, FlipEffect};
use flipforge::reduction::{budget, build_instance, smallest_valid_d, ReductionParams};
use flipforge::rsa::{random_arborescence, validate_arborescence, SinkSet};
use flipforge::chain_path::visits;
use flipforge::{Diagonal, FlipSequence};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sinks() -> impl Strategy<Value = Vec<(i64, i64)>> {
    (1usize..=2, 0i64..3, 0i64..3, 0i64..3).prop_map(|(n, x0, x1, y0)| {
        if n == 1 {
            vec![(x0, y0)]
        } else {
            vec![(x0, y0), (x1, (y0 + 1) % 3)]
        }
    })
}

/// Inserts `count` random flip-and-undo pairs into `seq`.
fn with_detours(seq: &FlipSequence, count: usize, rng: &mut ChaCha8Rng) -> FlipSequence {
    let states = seq.states().unwrap();
    let mut at: Vec<usize> = (0..count).map(|_| rng.gen_range(0..states.len())).collect();
    at.sort_unstable();
    let mut flips = Vec::new();
    let mut next = at.into_iter().peekable();
    for k in 0..=seq.flips.len() {
        while next.peek() == Some(&k) {
            next.next();
            let t = &states[k];
            let options: Vec<Diagonal> =
                t.diagonals().iter().copied().filter(|&d| t.flippable(d).unwrap()).collect();
            let d = options[rng.gen_range(0..options.len())];
            let created = t.flip_target(d).unwrap();
            flips.push(d);
            flips.push(created);
        }
        if k < seq.flips.len() {
            flips.push(seq.flips[k]);
        }
    }
    FlipSequence { start: seq.start.clone(), flips }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn forward_and_roundtrip(pts in sinks(), seed in any::<u64>()) {
        let s = SinkSet::yrsa(pts).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_arborescence(&s, &mut rng);
        prop_assert!(validate_arborescence(&a, &s).is_valid());
        let k = a.length().max(1);
        let beta = 2;
        let d = smallest_valid_d(beta, s.len(), k);
        let inst = build_instance(&s, k, ReductionParams::custom(beta, d)).unwrap();
        let seq = rsa_to_flips(&a, &inst).unwrap();
        prop_assert_eq!(seq.len() as i64, budget(beta, d, s.len(), a.length()));
        prop_assert_eq!(seq.replay().unwrap(), inst.t2.clone());

        let report = flips_to_rsa_report(&seq, &inst).unwrap();
        let dec = &report.decomposition;
        prop_assert!(dec.projected_len() <= seq.len());
        prop_assert_eq!(dec.sigma1.len() as i64, 2 * beta as i64 * a.length() + 2 * s.len() as i64);
        prop_assert!(dec.sigma_s.iter().all(|x| x.len() >= 4 * d - 4));
        prop_assert!(dec.records.iter().all(|r| r.case != FlipCase::Other));
        for &p in &s.sinks {
            prop_assert!(visits(&dec.sigma1, p, beta as i64));
        }
        prop_assert!(report.trace_cost <= dec.sigma1.len() as i64);
        prop_assert!(report.eliminated_cost <= report.trace_cost);
        prop_assert!(2 * report.scaled_tree_length <= report.eliminated_cost);
        prop_assert!(validate_arborescence(&report.arborescence, &s).is_valid());
        prop_assert!(report.arborescence.length() <= a.length());
    }

    #[test]
    fn detours_keep_conservation(pts in sinks(), seed in any::<u64>(), count in 1usize..6) {
        let s = SinkSet::yrsa(pts).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_arborescence(&s, &mut rng);
        let beta = 2;
        let k = a.length() + count as i64;
        let d = smallest_valid_d(beta, s.len(), k);
        let inst = build_instance(&s, k, ReductionParams::custom(beta, d)).unwrap();
        let seq = with_detours(&rsa_to_flips(&a, &inst).unwrap(), count, &mut rng);
        prop_assert_eq!(seq.replay().unwrap(), inst.t2.clone());
        let dec = decompose_flip_sequence(&seq, &inst).unwrap();
        prop_assert!(dec.projected_len() + dec.silent_flips() == seq.len());
        prop_assert!(dec.records.iter().all(|r| r.case != FlipCase::Other));
        prop_assert!(dec.records.iter().all(|r| r.case != FlipCase::Mixed || r.effect == FlipEffect::Silent));
        prop_assert!(dec.sigma1.len() <= seq.len() - (4 * d - 4) * s.len());

        let report = flips_to_rsa_report(&seq, &inst).unwrap();
        let bound = (seq.len() - (4 * d - 4) * s.len()) as i64 / (2 * beta as i64);
        prop_assert!(validate_arborescence(&report.arborescence, &s).is_valid());
        prop_assert!(report.arborescence.length() <= bound);
    }
}

/// A random walk of `len` flips starting `k` flips into `seq`.
fn wander(seq: &FlipSequence, k: usize, len: usize, rng: &mut ChaCha8Rng) -> FlipSequence {
    let mut t = seq.states().unwrap()[k].clone();
    let mut flips = seq.flips[..k].to_vec();
    for _ in 0..len {
        let options: Vec<Diagonal> = t.diagonals().iter().copied().filter(|&d| t.flippable(d).unwrap()).collect();
        let d = options[rng.gen_range(0..options.len())];
        t = t.flip(d).unwrap();
        flips.push(d);
    }
    FlipSequence { start: seq.start.clone(), flips }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn projections_survive_random_walks(seed in any::<u64>()) {
        let s = SinkSet::yrsa(vec![(1, 0), (2, 2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_arborescence(&s, &mut rng);
        let inst = build_instance(&s, a.length(), ReductionParams::custom(2, 4)).unwrap();
        let seq = rsa_to_flips(&a, &inst).unwrap();
        let k = rng.gen_range(0..=seq.len());
        let walk = wander(&seq, k, 40, &mut rng);
        let dec = flipforge::convert::decompose_unchecked(&walk, &inst).unwrap();
        prop_assert_eq!(dec.projected_len() + dec.silent_flips(), walk.len());
        for r in &dec.records {
            prop_assert!(r.case != FlipCase::Other);
            match r.case {
                FlipCase::Mixed => prop_assert_eq!(r.effect, FlipEffect::Silent),
                FlipCase::DeltaPlus => prop_assert_eq!(r.effect, FlipEffect::Plus),
                FlipCase::DeltaLocal => prop_assert!(matches!(r.effect, FlipEffect::Local(_))),
                _ => {}
            }
        }
        prop_assert!(dec.sigma1.replay().is_ok());
        prop_assert!(dec.sigma_s.iter().all(|x| x.replay().is_ok()));
    }
}

#[test]
fn mixed_flip_changes_neither_projection() {
    let s = SinkSet::yrsa(vec![(1, 0), (2, 2)]).unwrap();
    let a = flipforge::rsa::solve_exact(&s).unwrap();
    let inst = build_instance(&s, a.length(), ReductionParams::custom(2, 4)).unwrap();
    let seq = rsa_to_flips(&a, &inst).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut seen = 0;
    for _ in 0..40 {
        let k = rng.gen_range(0..=seq.len());
        let walk = wander(&seq, k, 30, &mut rng);
        let dec = flipforge::convert::decompose_unchecked(&walk, &inst).unwrap();
        for r in dec.records.iter().filter(|r| r.case == FlipCase::Mixed) {
            assert_eq!(r.effect, FlipEffect::Silent);
            seen += 1;
        }
    }
    assert!(seen > 0, "no mixed flip found");
}
