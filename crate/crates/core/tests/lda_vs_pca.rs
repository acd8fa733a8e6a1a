//! The classic unsupervised-vs-supervised projection picture: on a dataset
//! whose dominant variance axis carries no category information, the first
//! principal component entangles the categories while the discriminant
//! direction separates them cleanly.

use catperc::linalg::{normalize, Matrix};
use catperc::linear::{entangled_demo, fisher_ratio_along, lda_direction, pca, project};
use catperc::stimuli::Category;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Is there a threshold on the 1-D coordinates that splits the categories
/// perfectly?
fn linearly_separable(coords: &Matrix<f64>, labels: &[Category]) -> bool {
    let (mut max_a, mut min_a) = (f64::NEG_INFINITY, f64::INFINITY);
    let (mut max_b, mut min_b) = (f64::NEG_INFINITY, f64::INFINITY);
    for (row, &label) in coords.rows_iter().zip(labels) {
        let v = row[0];
        match label {
            Category::A => {
                max_a = max_a.max(v);
                min_a = min_a.min(v);
            }
            Category::B => {
                max_b = max_b.max(v);
                min_b = min_b.min(v);
            }
        }
    }
    max_a < min_b || max_b < min_a
}

fn per_category_stats(coords: &Matrix<f64>, labels: &[Category]) -> ((f64, f64), (f64, f64)) {
    let mut stats = Vec::new();
    for cat in Category::BOTH {
        let values: Vec<f64> = coords
            .rows_iter()
            .zip(labels)
            .filter(|(_, &l)| l == cat)
            .map(|(r, _)| r[0])
            .collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let spread =
            values.iter().map(|v| (v - mean).abs()).sum::<f64>() / values.len() as f64;
        stats.push((mean, spread));
    }
    (stats[0], stats[1])
}

#[test]
fn lda_separates_where_the_first_principal_component_does_not() {
    let (samples, labels) = entangled_demo::<f64>(200, 42);

    let basis = pca(&samples, 1).unwrap();
    let pca_coords = project(&samples, &basis).unwrap();
    assert!(
        !linearly_separable(&pca_coords, &labels),
        "first principal component should entangle the categories"
    );

    let lda = lda_direction(&samples, &labels).unwrap();
    let lda_coords = project(&samples, &lda).unwrap();
    assert!(
        linearly_separable(&lda_coords, &labels),
        "discriminant direction should separate the categories"
    );

    // The supervised projection compresses within categories and widens the
    // gap between their means relative to the unsupervised one.
    let ((mean_pa, spread_pa), (mean_pb, spread_pb)) = per_category_stats(&pca_coords, &labels);
    let ((mean_la, spread_la), (mean_lb, spread_lb)) = per_category_stats(&lda_coords, &labels);
    let pca_gap = (mean_pb - mean_pa).abs();
    let lda_gap = (mean_lb - mean_la).abs();
    let pca_spread = 0.5 * (spread_pa + spread_pb);
    let lda_spread = 0.5 * (spread_la + spread_lb);
    assert!(
        lda_spread < pca_spread,
        "within-category spread: lda {lda_spread} vs pca {pca_spread}"
    );
    assert!(
        lda_gap > pca_gap,
        "between-category gap: lda {lda_gap} vs pca {pca_gap}"
    );
}

#[test]
fn fisher_ratio_is_maximized_by_the_lda_direction() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // A handful of datasets with different geometry.
    for (per_cat, seed) in [(50usize, 1u64), (80, 2), (120, 3)] {
        let (samples, labels) = entangled_demo::<f64>(per_cat, seed);
        let lda = lda_direction(&samples, &labels).unwrap();
        let best = fisher_ratio_along(&samples, &labels, &lda.direction).unwrap();
        assert_eq!(best, lda.fisher_ratio);
        for _ in 0..1000 {
            let mut dir = vec![rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5];
            if normalize(&mut dir) == 0.0 {
                continue;
            }
            let ratio = fisher_ratio_along(&samples, &labels, &dir).unwrap();
            assert!(
                ratio <= best * (1.0 + 1e-9),
                "random direction beat the discriminant: {ratio} > {best}"
            );
        }
    }
}
