//! Separation/compression measures on hidden-representation snapshots.
//!
//! Six mean pairwise Euclidean distances (within A, within B, between, for
//! each learning phase) condense into two numbers: `sp_b`, the change in
//! between-category distance from the unsupervised to the supervised
//! snapshot, and `sp_w`, the corresponding change in within-category
//! distance. Positive `sp_b` is separation; negative `sp_w` is compression.

use crate::error::{Error, Result};
use crate::linalg::{euclidean, Matrix};
use crate::nn::Probe;
use crate::scalar::Scalar;
use crate::stimuli::Category;

/// Learning phase a snapshot was taken after.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Unsupervised,
    Supervised,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Unsupervised => "unsupervised",
            Phase::Supervised => "supervised",
        }
    }
}

/// Hidden representations of a stimulus set, one row per stimulus.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationSnapshot<T> {
    pub vectors: Matrix<T>,
    pub labels: Vec<Category>,
    pub phase: Phase,
    pub probe: Probe,
}

impl<T: Scalar> RepresentationSnapshot<T> {
    pub fn new(
        vectors: Matrix<T>,
        labels: Vec<Category>,
        phase: Phase,
        probe: Probe,
    ) -> Result<Self> {
        if vectors.n_rows() != labels.len() {
            return Err(Error::dim(
                vectors.n_rows(),
                labels.len(),
                "snapshot labels",
            ));
        }
        Ok(RepresentationSnapshot {
            vectors,
            labels,
            phase,
            probe,
        })
    }

    fn indices_of(&self, category: Category) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == category)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Mean Euclidean distance over unordered same-category pairs (each pair
/// counted once).
pub fn mean_within_distance<T: Scalar>(
    snapshot: &RepresentationSnapshot<T>,
    category: Category,
) -> Result<T> {
    let idx = snapshot.indices_of(category);
    if idx.len() < 2 {
        return Err(Error::NotEnoughData(format!(
            "within-category distance needs >= 2 members of {category}, got {}",
            idx.len()
        )));
    }
    let mut sum = T::zero();
    for (pos, &i) in idx.iter().enumerate() {
        for &j in &idx[pos + 1..] {
            sum += euclidean(snapshot.vectors.row(i), snapshot.vectors.row(j));
        }
    }
    let pairs = idx.len() * (idx.len() - 1) / 2;
    Ok(sum / T::cast(pairs as f64))
}

/// Mean Euclidean distance over all A-to-B pairs.
pub fn mean_between_distance<T: Scalar>(snapshot: &RepresentationSnapshot<T>) -> Result<T> {
    let idx_a = snapshot.indices_of(Category::A);
    let idx_b = snapshot.indices_of(Category::B);
    if idx_a.is_empty() || idx_b.is_empty() {
        return Err(Error::NotEnoughData(
            "between-category distance needs both categories nonempty".into(),
        ));
    }
    let mut sum = T::zero();
    for &i in &idx_a {
        for &j in &idx_b {
            sum += euclidean(snapshot.vectors.row(i), snapshot.vectors.row(j));
        }
    }
    Ok(sum / T::cast((idx_a.len() * idx_b.len()) as f64))
}

/// The six phase distances, the separation/compression measures derived
/// from them, and the pair counts they averaged over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpReport<T> {
    pub d_within_a_u: T,
    pub d_within_b_u: T,
    pub d_within_a_s: T,
    pub d_within_b_s: T,
    pub d_between_u: T,
    pub d_between_s: T,
    /// `((D_A^s + D_B^s) - (D_A^u + D_B^u)) / 2`; negative = compression.
    pub sp_w: T,
    /// `D_AB^s - D_AB^u`; positive = separation.
    pub sp_b: T,
    pub pairs_a: usize,
    pub pairs_b: usize,
    pub pairs_ab: usize,
}

impl<T: Scalar> CpReport<T> {
    /// Mean within-category distance per phase, combining A and B equally.
    pub fn within_mean(&self, phase: Phase) -> T {
        let half = T::cast(0.5);
        match phase {
            Phase::Unsupervised => (self.d_within_a_u + self.d_within_b_u) * half,
            Phase::Supervised => (self.d_within_a_s + self.d_within_b_s) * half,
        }
    }

    pub fn between(&self, phase: Phase) -> T {
        match phase {
            Phase::Unsupervised => self.d_between_u,
            Phase::Supervised => self.d_between_s,
        }
    }
}

/// Computes the full report from matched unsupervised and supervised
/// snapshots of the same stimuli in the same order.
pub fn separation_compression<T: Scalar>(
    unsup: &RepresentationSnapshot<T>,
    sup: &RepresentationSnapshot<T>,
) -> Result<CpReport<T>> {
    if unsup.phase != Phase::Unsupervised || sup.phase != Phase::Supervised {
        return Err(Error::InvalidSpec(
            "separation_compression expects (unsupervised, supervised) snapshots".into(),
        ));
    }
    if unsup.labels != sup.labels {
        return Err(Error::InvalidSpec(
            "snapshots must cover the same stimuli in the same order".into(),
        ));
    }

    let d_within_a_u = mean_within_distance(unsup, Category::A)?;
    let d_within_b_u = mean_within_distance(unsup, Category::B)?;
    let d_within_a_s = mean_within_distance(sup, Category::A)?;
    let d_within_b_s = mean_within_distance(sup, Category::B)?;
    let d_between_u = mean_between_distance(unsup)?;
    let d_between_s = mean_between_distance(sup)?;

    let half = T::cast(0.5);
    let sp_w = ((d_within_a_s + d_within_b_s) - (d_within_a_u + d_within_b_u)) * half;
    let sp_b = d_between_s - d_between_u;

    let n_a = unsup.indices_of(Category::A).len();
    let n_b = unsup.indices_of(Category::B).len();
    Ok(CpReport {
        d_within_a_u,
        d_within_b_u,
        d_within_a_s,
        d_within_b_s,
        d_between_u,
        d_between_s,
        sp_w,
        sp_b,
        pairs_a: n_a * (n_a - 1) / 2,
        pairs_b: n_b * (n_b - 1) / 2,
        pairs_ab: n_a * n_b,
    })
}
