use flipforge::rsa::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sinks(max_n: usize, grid: i64) -> impl Strategy<Value = SinkSet> {
    prop::collection::vec((0..grid, 0..grid), 1..=max_n).prop_map(|v| SinkSet::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn slides_keep_validity_and_never_lengthen(s in sinks(5, 8), seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_arborescence(&s, &mut rng);
        for e in slidable_right(&a, &s) {
            let b = slide_right(&a, e, &s).unwrap();
            prop_assert!(validate_arborescence(&b, &s).is_valid(), "{:?} -> {:?}", a, b);
            prop_assert!(b.length() <= a.length());
        }
        for e in a.segments.iter().copied().filter(|e| e.is_horizontal()) {
            if let Ok(b) = slide_up(&a, e, &s) {
                prop_assert!(validate_arborescence(&b, &s).is_valid());
                prop_assert!(b.length() <= a.length());
            }
        }
    }

    #[test]
    fn solver_meets_lower_bounds(s in sinks(6, 10)) {
        let a = solve_exact(&s).unwrap();
        prop_assert!(validate_arborescence(&a, &s).is_valid());
        prop_assert!(is_on_hanan_grid(&a, &s));
        for &(x, y) in &s.sinks {
            prop_assert!(a.length() >= x + y);
        }
    }

    #[test]
    fn perturbation_separates_rows(s in sinks(5, 6), k in 0i64..40) {
        let (p, k2) = perturb_to_yrsa(&s, k);
        let n = s.len() as i64;
        prop_assert!(p.is_yrsa());
        prop_assert_eq!(k2, k * n.pow(4) + n.pow(3));
    }
}
