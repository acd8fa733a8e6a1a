//! Distance-metric oracle equivalence and invariance properties.
//!
//! The oracle is an independently written naive double loop over index
//! pairs; the properties (permutation and translation invariance) run under
//! proptest.

use catperc::linalg::Matrix;
use catperc::metrics::{
    mean_between_distance, mean_within_distance, separation_compression, Phase,
    RepresentationSnapshot,
};
use catperc::stimuli::Category;
use catperc::Probe;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn naive_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        sum += (x - y) * (x - y);
    }
    sum.sqrt()
}

fn oracle_within(rows: &[Vec<f64>], labels: &[Category], cat: Category) -> f64 {
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            if labels[i] == cat && labels[j] == cat {
                sum += naive_distance(&rows[i], &rows[j]);
                pairs += 1;
            }
        }
    }
    sum / pairs as f64
}

fn oracle_between(rows: &[Vec<f64>], labels: &[Category]) -> f64 {
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..rows.len() {
        for j in 0..rows.len() {
            if labels[i] == Category::A && labels[j] == Category::B {
                sum += naive_distance(&rows[i], &rows[j]);
                pairs += 1;
            }
        }
    }
    sum / pairs as f64
}

fn random_snapshot(
    rng: &mut ChaCha8Rng,
    max_rows: usize,
    max_dims: usize,
    phase: Phase,
) -> (Vec<Vec<f64>>, Vec<Category>, RepresentationSnapshot<f64>) {
    let per_cat = rng.gen_range(2..=max_rows / 2);
    let dims = rng.gen_range(1..=max_dims);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for cat in Category::BOTH {
        for _ in 0..per_cat {
            rows.push((0..dims).map(|_| rng.gen::<f64>() * 10.0 - 5.0).collect());
            labels.push(cat);
        }
    }
    let snap = RepresentationSnapshot::new(
        Matrix::from_rows(&rows).unwrap(),
        labels.clone(),
        phase,
        Probe::PreActivation,
    )
    .unwrap();
    (rows, labels, snap)
}

#[test]
fn distance_means_match_the_naive_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD157);
    for _ in 0..40 {
        let (rows, labels, snap) = random_snapshot(&mut rng, 80, 32, Phase::Unsupervised);
        let within_a = mean_within_distance(&snap, Category::A).unwrap();
        let within_b = mean_within_distance(&snap, Category::B).unwrap();
        let between = mean_between_distance(&snap).unwrap();
        assert!((within_a - oracle_within(&rows, &labels, Category::A)).abs() < 1e-12);
        assert!((within_b - oracle_within(&rows, &labels, Category::B)).abs() < 1e-12);
        assert!((between - oracle_between(&rows, &labels)).abs() < 1e-12);
    }
}

#[test]
fn full_report_matches_oracle_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    for _ in 0..10 {
        let (urows, labels, unsup) = random_snapshot(&mut rng, 40, 16, Phase::Unsupervised);
        // Supervised snapshot over the same labels, fresh vectors.
        let srows: Vec<Vec<f64>> = urows
            .iter()
            .map(|r| r.iter().map(|&v| v * 0.5 + 1.0).collect())
            .collect();
        let sup = RepresentationSnapshot::new(
            Matrix::from_rows(&srows).unwrap(),
            labels.clone(),
            Phase::Supervised,
            Probe::PreActivation,
        )
        .unwrap();
        let report = separation_compression(&unsup, &sup).unwrap();
        let expected_sp_b = oracle_between(&srows, &labels) - oracle_between(&urows, &labels);
        let expected_sp_w = ((oracle_within(&srows, &labels, Category::A)
            + oracle_within(&srows, &labels, Category::B))
            - (oracle_within(&urows, &labels, Category::A)
                + oracle_within(&urows, &labels, Category::B)))
            / 2.0;
        assert!((report.sp_b - expected_sp_b).abs() < 1e-12);
        assert!((report.sp_w - expected_sp_w).abs() < 1e-12);
    }
}

/// Strategy: a labeled point set with 2..6 points per category in 1..4 dims.
fn snapshot_strategy() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<Category>)> {
    (2usize..6, 1usize..4).prop_flat_map(|(per_cat, dims)| {
        let n = 2 * per_cat;
        proptest::collection::vec(
            proptest::collection::vec(-50.0f64..50.0, dims..=dims),
            n..=n,
        )
        .prop_map(move |rows| {
            let labels = (0..n)
                .map(|i| if i < per_cat { Category::A } else { Category::B })
                .collect();
            (rows, labels)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn permuting_rows_leaves_the_report_unchanged(
        (rows, labels) in snapshot_strategy(),
        seed in 0u64..1000,
    ) {
        let make = |rows: &[Vec<f64>], labels: &[Category], phase| {
            RepresentationSnapshot::new(
                Matrix::from_rows(rows).unwrap(),
                labels.to_vec(),
                phase,
                Probe::PreActivation,
            )
            .unwrap()
        };
        let unsup = make(&rows, &labels, Phase::Unsupervised);
        let sup_rows: Vec<Vec<f64>> =
            rows.iter().map(|r| r.iter().map(|&v| v * 0.9).collect()).collect();
        let sup = make(&sup_rows, &labels, Phase::Supervised);
        let base = separation_compression(&unsup, &sup).unwrap();

        // Shuffle all three in lockstep.
        let mut order: Vec<usize> = (0..rows.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..order.len()).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        let perm_rows: Vec<Vec<f64>> = order.iter().map(|&i| rows[i].clone()).collect();
        let perm_sup: Vec<Vec<f64>> = order.iter().map(|&i| sup_rows[i].clone()).collect();
        let perm_labels: Vec<Category> = order.iter().map(|&i| labels[i]).collect();
        let unsup_p = make(&perm_rows, &perm_labels, Phase::Unsupervised);
        let sup_p = make(&perm_sup, &perm_labels, Phase::Supervised);
        let permuted = separation_compression(&unsup_p, &sup_p).unwrap();

        prop_assert!((base.sp_b - permuted.sp_b).abs() < 1e-12);
        prop_assert!((base.sp_w - permuted.sp_w).abs() < 1e-12);
        prop_assert!((base.d_between_u - permuted.d_between_u).abs() < 1e-12);
    }

    #[test]
    fn translating_all_rows_leaves_the_report_unchanged(
        (rows, labels) in snapshot_strategy(),
        shift in -100.0f64..100.0,
    ) {
        let make = |rows: &[Vec<f64>], phase| {
            RepresentationSnapshot::new(
                Matrix::from_rows(rows).unwrap(),
                labels.clone(),
                phase,
                Probe::PreActivation,
            )
            .unwrap()
        };
        let sup_rows: Vec<Vec<f64>> =
            rows.iter().map(|r| r.iter().map(|&v| v * 1.1 - 0.3).collect()).collect();
        let base = separation_compression(
            &make(&rows, Phase::Unsupervised),
            &make(&sup_rows, Phase::Supervised),
        )
        .unwrap();

        let shifted: Vec<Vec<f64>> =
            rows.iter().map(|r| r.iter().map(|&v| v + shift).collect()).collect();
        let shifted_sup: Vec<Vec<f64>> =
            sup_rows.iter().map(|r| r.iter().map(|&v| v + shift).collect()).collect();
        let moved = separation_compression(
            &make(&shifted, Phase::Unsupervised),
            &make(&shifted_sup, Phase::Supervised),
        )
        .unwrap();

        prop_assert!((base.sp_b - moved.sp_b).abs() < 1e-9);
        prop_assert!((base.sp_w - moved.sp_w).abs() < 1e-9);
    }
}
