//! Witness filtration and barcode against brute-force references.

use gscore_core::{build_witness_filtration, compute_persistence, DistanceMatrix};
use gscore_testkit::{
    alive_at, as_pairs, betti_by_rank, exhaustive_witness_filtration, noisy_circle_instance,
    sort_pairs,
};
use proptest::prelude::*;

fn sizes(seed: u64) -> (usize, usize) {
    let l0 = 3 + (seed % 6) as usize;
    let n = l0 + (seed * 7 % (33 - l0 as u64)) as usize;
    (l0, n)
}

#[test]
fn pruned_filtration_equals_exhaustive_enumeration() {
    for seed in 0..150 {
        let (l0, n) = sizes(seed);
        let inst = noisy_circle_instance(seed, l0, n);
        let fast = build_witness_filtration(&inst.distances, inst.alpha_max, 2).unwrap();
        fast.validate().unwrap();
        let slow = exhaustive_witness_filtration(&inst.distances, inst.alpha_max);
        assert_eq!(as_pairs(fast.simplices()), sort_pairs(slow), "seed {seed}");
    }
}

#[test]
fn circle_with_eight_landmarks_and_32_witnesses() {
    let inst = noisy_circle_instance(2718, 8, 32);
    let fast = build_witness_filtration(&inst.distances, inst.alpha_max, 2).unwrap();
    let slow = exhaustive_witness_filtration(&inst.distances, inst.alpha_max);
    assert_eq!(as_pairs(fast.simplices()), sort_pairs(slow));
}

fn check_barcode_against_ranks(seed: u64) {
    let (l0, n) = sizes(seed);
    let inst = noisy_circle_instance(seed, l0, n);
    let filtration = build_witness_filtration(&inst.distances, inst.alpha_max, 2).unwrap();
    let barcode = compute_persistence(&filtration, 1).unwrap();
    let pairs = as_pairs(filtration.simplices());

    let mut values: Vec<f64> = pairs.iter().map(|(_, t)| *t).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    for &alpha in &values {
        let (b0, b1) = betti_by_rank(&pairs, alpha);
        assert_eq!(alive_at(&barcode.intervals, 0, alpha), b0, "seed {seed}, α = {alpha}, dim 0");
        assert_eq!(alive_at(&barcode.intervals, 1, alpha), b1, "seed {seed}, α = {alpha}, dim 1");
    }

    // Every endpoint is an actual appearance time (or infinity).
    for iv in &barcode.intervals {
        assert!(values.contains(&iv.birth));
        assert!(iv.death.is_infinite() || values.contains(&iv.death));
        assert!(iv.birth <= iv.death);
    }
    // Infinite dimension-0 classes count the components at the end.
    let (components, _) = betti_by_rank(&pairs, inst.alpha_max);
    let infinite = barcode
        .intervals
        .iter()
        .filter(|i| i.dim == 0 && i.is_infinite())
        .count();
    assert_eq!(infinite, components);
}

#[test]
fn barcode_matches_rank_betti_numbers() {
    for seed in 0..150 {
        check_barcode_against_ranks(seed);
    }
}

#[test]
fn euler_characteristic_matches() {
    for seed in 0..40 {
        let (l0, n) = sizes(seed);
        let inst = noisy_circle_instance(seed, l0, n);
        let filtration = build_witness_filtration(&inst.distances, inst.alpha_max, 2).unwrap();
        let barcode = compute_persistence(&filtration, 1).unwrap();
        for alpha in filtration.simplices().iter().map(|s| s.appearance) {
            let mut chi = 0i64;
            for s in filtration.at(alpha) {
                chi += if s.dim() % 2 == 0 { 1 } else { -1 };
            }
            let b0 = alive_at(&barcode.intervals, 0, alpha) as i64;
            let b1 = alive_at(&barcode.intervals, 1, alpha) as i64;
            // χ = β₀ − β₁ + β₂ and β₂ ≥ 0.
            assert!(chi >= b0 - b1, "seed {seed}");
            let (rb0, rb1) = betti_by_rank(&as_pairs(filtration.simplices()), alpha);
            assert_eq!(b0 - b1, rb0 as i64 - rb1 as i64);
        }
    }
}

#[test]
fn persistence_is_deterministic() {
    let inst = noisy_circle_instance(99, 8, 32);
    let f = build_witness_filtration(&inst.distances, inst.alpha_max, 2).unwrap();
    let a = compute_persistence(&f, 1).unwrap();
    let b = compute_persistence(&f, 1).unwrap();
    assert_eq!(a, b);
}

#[test]
fn vertex_nearest_some_witness_enters_at_zero() {
    for seed in 0..30 {
        let inst = noisy_circle_instance(seed, 6, 20);
        let f = build_witness_filtration(&inst.distances, inst.alpha_max, 2).unwrap();
        let d = &inst.distances;
        for w in 0..d.n_witnesses() {
            let nearest = (0..d.n_landmarks())
                .min_by(|&a, &b| d.get(a, w).total_cmp(&d.get(b, w)))
                .unwrap();
            let s = f
                .simplices()
                .iter()
                .find(|s| s.simplex.vertices() == [nearest as u32])
                .unwrap();
            assert_eq!(s.appearance, 0.0);
        }
    }
}

fn matrix_strategy() -> impl Strategy<Value = (DistanceMatrix, f64)> {
    (3usize..7, 3usize..14).prop_flat_map(|(l, w)| {
        (
            proptest::collection::vec(0.0f64..4.0, l * w),
            0.05f64..6.0,
        )
            .prop_map(move |(d, a)| (DistanceMatrix::from_raw(d, l, w).unwrap(), a))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    // Arbitrary (not necessarily metric) landmark-witness distances.
    #[test]
    fn arbitrary_matrices_match_oracle((d, alpha_max) in matrix_strategy()) {
        let fast = build_witness_filtration(&d, alpha_max, 2).unwrap();
        fast.validate().unwrap();
        prop_assert_eq!(as_pairs(fast.simplices()), sort_pairs(exhaustive_witness_filtration(&d, alpha_max)));
    }

    #[test]
    fn thresholds_are_nested((d, alpha_max) in matrix_strategy(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let f = build_witness_filtration(&d, alpha_max, 2).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let small: Vec<_> = f.at(lo * alpha_max).map(|s| s.simplex).collect();
        let large: Vec<_> = f.at(hi * alpha_max).map(|s| s.simplex).collect();
        prop_assert!(small.iter().all(|s| large.contains(s)));
    }

    #[test]
    fn more_witnesses_never_delay((d, alpha_max) in matrix_strategy(), keep in 1usize..10) {
        let keep = keep.min(d.n_witnesses());
        let mut sub = Vec::new();
        for l in 0..d.n_landmarks() {
            sub.extend_from_slice(&d.row(l)[..keep]);
        }
        let fewer = DistanceMatrix::from_raw(sub, d.n_landmarks(), keep).unwrap();
        let all = build_witness_filtration(&d, alpha_max, 2).unwrap();
        let part = build_witness_filtration(&fewer, alpha_max, 2).unwrap();
        for s in part.simplices() {
            let t = all.simplices().iter().find(|x| x.simplex == s.simplex);
            prop_assert!(t.is_some());
            prop_assert!(t.unwrap().appearance <= s.appearance);
        }
    }
}
