use museum_swn::config::{PolicyKind, SimConfig};
use museum_swn::experiment::{mean_ci, summarize, sweep};
use proptest::prelude::*;

#[test]
fn sweep_cardinality_and_order() {
    let cfg = SimConfig::default();
    let result = sweep(&cfg, &[0.0, 0.01, 1.0], &PolicyKind::ALL, &(0..10).collect::<Vec<_>>()).unwrap();
    assert_eq!(result.rows.len(), 90);
    let keys: Vec<_> = result.rows.iter().map(|r| (r.p, r.policy, r.seed)).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    assert_eq!(keys, sorted);
    // Unrewired rows carry the exact lattice clustering, 3(k-2)/(4(k-1)) = 0.5.
    assert!(result.rows.iter().filter(|r| r.p == 0.0).all(|r| r.clustering == 0.5));

    let one = sweep(&cfg, &[0.1], &[PolicyKind::Hotspot], &[4]).unwrap();
    assert_eq!(one.rows.len(), 1);
}

#[test]
fn rows_match_individual_runs() {
    let cfg = SimConfig::default();
    let result = sweep(&cfg, &[0.1], &[PolicyKind::SwnGuided], &[7]).unwrap();
    let r = museum_swn::run(&cfg, 7).unwrap();
    let b = museum_swn::simcore::bunching_index(&r);
    assert_eq!(result.rows[0].overflow_minutes, b.overflow_minutes);
    assert_eq!(result.rows[0].peak_queue, b.peak_queue);
}

#[test]
fn summary_examples() {
    let half = mean_ci(&[0.0, 1.0]).unwrap();
    assert_eq!(half.mean, 0.5);
    // 1.96 * sd / sqrt(n) with sd = 1/sqrt(2).
    assert!((half.half_width - 0.98).abs() < 1e-12);
    assert_eq!(mean_ci(&[1.0; 4]).unwrap().half_width, 0.0);
    assert_eq!(mean_ci(&[3.5]).unwrap().half_width, 0.0);
    assert!(mean_ci(&[]).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn seed_order_does_not_matter(seeds in prop::collection::btree_set(0u64..1000, 1..5), rotate in 0usize..5) {
        let cfg = SimConfig::default();
        let ascending: Vec<u64> = seeds.into_iter().collect();
        let mut shuffled = ascending.clone();
        let by = rotate % shuffled.len();
        shuffled.rotate_left(by);
        shuffled.reverse();
        let a = sweep(&cfg, &[0.0, 0.2], &[PolicyKind::SwnGuided, PolicyKind::UnguidedRandom], &ascending).unwrap();
        let b = sweep(&cfg, &[0.2, 0.0], &[PolicyKind::UnguidedRandom, PolicyKind::SwnGuided], &shuffled).unwrap();
        prop_assert_eq!(a.to_csv(), b.to_csv());
        prop_assert_eq!(summarize(&a).unwrap().len(), 4);
    }
}
