use flipforge::double_chain::build_double_chain;
use flipforge::search::{flip_distance, SearchBudget, SearchMode};

#[test]
fn apex_chain_distance_is_min_of_both_routes() {
    for n in 2..=6 {
        let chain = build_double_chain(n).unwrap();
        let pdp = chain.polygon_pdp(&chain.default_apex()).unwrap();
        let (tu, tl) = pdp.extreme_triangulations();
        let bi = flip_distance(&pdp.polygon, &tu, &tl, SearchBudget::default()).unwrap();
        let uni = flip_distance(
            &pdp.polygon,
            &tu,
            &tl,
            SearchBudget::default().mode(SearchMode::Unidirectional),
        )
        .unwrap();
        let expected = ((n - 1) * (n - 1)).min(4 * n - 4);
        assert_eq!(bi.distance, Some(expected), "n = {n}");
        assert_eq!(uni.distance, Some(expected), "n = {n}");
        assert_eq!(bi.witness.unwrap().replay().unwrap(), tl);
    }
}

#[test]
fn plain_chain_distance_is_square() {
    for n in 2..=5 {
        let pd = build_double_chain(n).unwrap().polygon_pd();
        let (tu, tl) = pd.extreme_triangulations();
        let r = flip_distance(&pd.polygon, &tu, &tl, SearchBudget::default()).unwrap();
        assert_eq!(r.distance, Some((n - 1) * (n - 1)), "n = {n}");
    }
}
