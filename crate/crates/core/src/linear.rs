//! Linear reference analyses: PCA and two-class Fisher LDA.
//!
//! These serve two roles. Pedagogically they reproduce the classic picture
//! of an unsupervised projection that entangles categories next to a
//! supervised projection that separates them; practically they are simple,
//! independently checkable oracles for the neural pipeline's behavior.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{dot, jacobi_eigen, normalize, solve, Matrix};
use crate::scalar::Scalar;
use crate::stimuli::Category;

/// Orthonormal component basis with per-component explained variance,
/// sorted descending, plus the centering vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentBasis<T> {
    pub components: Vec<Vec<T>>,
    pub explained_variance: Vec<T>,
    pub mean: Vec<T>,
}

/// The Fisher discriminant direction for a two-category dataset.
///
/// `ridge` records the regularization added to the within-class scatter
/// when it was singular (zero otherwise), and `mean` is the centering
/// vector so projections follow the same convention as [`ComponentBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminantDirection<T> {
    pub direction: Vec<T>,
    pub fisher_ratio: T,
    pub mean: Vec<T>,
    pub ridge: T,
}

/// Feature-by-feature covariance of mean-centered samples, normalized by
/// `n - 1`. Symmetric by construction.
pub fn covariance_matrix<T: Scalar>(samples: &Matrix<T>) -> Result<Matrix<T>> {
    let n = samples.n_rows();
    let m = samples.n_cols();
    if n < 2 {
        return Err(Error::NotEnoughData(format!(
            "covariance needs >= 2 rows, got {n}"
        )));
    }
    let mean = samples.mean_row();
    let mut cov = Matrix::zeros(m, m);
    let norm = T::cast((n - 1) as f64);
    for row in samples.rows_iter() {
        let centered: Vec<T> = row.iter().zip(&mean).map(|(&x, &mu)| x - mu).collect();
        for i in 0..m {
            for j in i..m {
                cov[(i, j)] += centered[i] * centered[j];
            }
        }
    }
    for i in 0..m {
        for j in i..m {
            let v = cov[(i, j)] / norm;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    Ok(cov)
}

/// Principal components of a sample matrix, by descending eigenvalue of the
/// covariance matrix.
pub fn pca<T: Scalar>(samples: &Matrix<T>, n_components: usize) -> Result<ComponentBasis<T>> {
    let m = samples.n_cols();
    if n_components == 0 || n_components > m {
        return Err(Error::InvalidSpec(format!(
            "n_components must be in 1..={m}, got {n_components}"
        )));
    }
    let cov = covariance_matrix(samples)?;
    let (values, vectors) = jacobi_eigen(&cov)?;
    let mut components = Vec::with_capacity(n_components);
    let mut explained = Vec::with_capacity(n_components);
    for (row, &value) in vectors.rows_iter().zip(&values).take(n_components) {
        let mut v = row.to_vec();
        normalize(&mut v);
        fix_sign(&mut v);
        components.push(v);
        // Covariance is positive semidefinite; tiny negative eigenvalues are
        // rounding noise.
        explained.push(value.max(T::zero()));
    }
    Ok(ComponentBasis {
        components,
        explained_variance: explained,
        mean: samples.mean_row(),
    })
}

/// Sign convention: the first coordinate of non-negligible magnitude is
/// made positive so repeated runs agree.
fn fix_sign<T: Scalar>(v: &mut [T]) {
    let tol = T::cast(1e-12);
    if let Some(&lead) = v.iter().find(|x| x.abs() > tol) {
        if lead < T::zero() {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
}

fn category_mean<T: Scalar>(samples: &Matrix<T>, labels: &[Category], cat: Category) -> Vec<T> {
    let m = samples.n_cols();
    let mut mean = vec![T::zero(); m];
    let mut count = 0usize;
    for (row, &label) in samples.rows_iter().zip(labels) {
        if label == cat {
            for (acc, &x) in mean.iter_mut().zip(row) {
                *acc += x;
            }
            count += 1;
        }
    }
    let n = T::cast(count as f64);
    for x in &mut mean {
        *x /= n;
    }
    mean
}

/// Within-class scatter matrix `sum_c sum_i (x - mu_c)(x - mu_c)^T`.
fn within_scatter<T: Scalar>(samples: &Matrix<T>, labels: &[Category]) -> Matrix<T> {
    let m = samples.n_cols();
    let mean_a = category_mean(samples, labels, Category::A);
    let mean_b = category_mean(samples, labels, Category::B);
    let mut scatter = Matrix::zeros(m, m);
    for (row, &label) in samples.rows_iter().zip(labels) {
        let mu = match label {
            Category::A => &mean_a,
            Category::B => &mean_b,
        };
        let centered: Vec<T> = row.iter().zip(mu).map(|(&x, &c)| x - c).collect();
        for i in 0..m {
            for j in i..m {
                scatter[(i, j)] += centered[i] * centered[j];
            }
        }
    }
    for i in 0..m {
        for j in (i + 1)..m {
            scatter[(j, i)] = scatter[(i, j)];
        }
    }
    scatter
}

/// Fisher ratio of a direction: squared projected mean gap over projected
/// within-class scatter. Infinite when the scatter vanishes along `w` while
/// the means still differ.
pub fn fisher_ratio_along<T: Scalar>(
    samples: &Matrix<T>,
    labels: &[Category],
    direction: &[T],
) -> Result<T> {
    if direction.len() != samples.n_cols() {
        return Err(Error::dim(
            samples.n_cols(),
            direction.len(),
            "fisher_ratio_along direction",
        ));
    }
    let mean_a = category_mean(samples, labels, Category::A);
    let mean_b = category_mean(samples, labels, Category::B);
    let gap: T = mean_b
        .iter()
        .zip(&mean_a)
        .zip(direction)
        .map(|((&b, &a), &w)| (b - a) * w)
        .sum();
    let numerator = gap * gap;

    let scatter = within_scatter(samples, labels);
    let sw = scatter.matvec(direction)?;
    let denominator = dot(&sw, direction);

    if denominator <= T::zero() {
        if numerator > T::zero() {
            return Ok(T::infinity());
        }
        return Ok(T::zero());
    }
    Ok(numerator / denominator)
}

/// Two-class Fisher discriminant: the direction maximizing the ratio of
/// projected between-category variance to projected within-category
/// variance, solved in closed form as `S_w^{-1} (mu_B - mu_A)`.
pub fn lda_direction<T: Scalar>(
    samples: &Matrix<T>,
    labels: &[Category],
) -> Result<DiscriminantDirection<T>> {
    if samples.n_rows() != labels.len() {
        return Err(Error::dim(
            samples.n_rows(),
            labels.len(),
            "lda_direction labels",
        ));
    }
    for cat in Category::BOTH {
        let count = labels.iter().filter(|&&l| l == cat).count();
        if count < 2 {
            return Err(Error::NotEnoughData(format!(
                "lda needs >= 2 samples in category {cat}, got {count}"
            )));
        }
    }
    let m = samples.n_cols();
    let mean_a = category_mean(samples, labels, Category::A);
    let mean_b = category_mean(samples, labels, Category::B);
    let diff: Vec<T> = mean_b.iter().zip(&mean_a).map(|(&b, &a)| b - a).collect();
    let scatter = within_scatter(samples, labels);

    let (solution, ridge) = match solve(&scatter, &diff) {
        Some(w) => (w, T::zero()),
        None => {
            // Singular scatter: shrink toward the identity just enough to
            // invert. Epsilon scales with the scatter's own trace.
            let trace: T = (0..m).map(|i| scatter[(i, i)]).sum();
            let eps = {
                let scaled = T::cast(1e-8) * trace / T::cast(m as f64);
                if scaled > T::zero() {
                    scaled
                } else {
                    T::one()
                }
            };
            let mut ridged = scatter.clone();
            for i in 0..m {
                ridged[(i, i)] += eps;
            }
            let w = solve(&ridged, &diff).ok_or_else(|| {
                Error::NotEnoughData("within-class scatter unusable even with ridge".into())
            })?;
            (w, eps)
        }
    };

    let mut direction = solution;
    if normalize(&mut direction) == T::zero() {
        // Identical category means: any direction scores zero; pick the
        // first axis for determinism.
        direction = vec![T::zero(); m];
        direction[0] = T::one();
    }
    fix_sign(&mut direction);
    let fisher_ratio = fisher_ratio_along(samples, labels, &direction)?;
    Ok(DiscriminantDirection {
        direction,
        fisher_ratio,
        mean: samples.mean_row(),
        ridge,
    })
}

/// Anything data can be projected onto: a centering vector plus one or more
/// unit axes.
pub trait Projection<T: Scalar> {
    fn center(&self) -> &[T];
    fn axes(&self) -> Vec<&[T]>;
}

impl<T: Scalar> Projection<T> for ComponentBasis<T> {
    fn center(&self) -> &[T] {
        &self.mean
    }
    fn axes(&self) -> Vec<&[T]> {
        self.components.iter().map(|c| c.as_slice()).collect()
    }
}

impl<T: Scalar> Projection<T> for DiscriminantDirection<T> {
    fn center(&self) -> &[T] {
        &self.mean
    }
    fn axes(&self) -> Vec<&[T]> {
        vec![&self.direction]
    }
}

/// Projects each row of `data` onto the projection's axes after centering;
/// one output column per axis.
pub fn project<T: Scalar, P: Projection<T>>(data: &Matrix<T>, p: &P) -> Result<Matrix<T>> {
    let mean = p.center();
    let axes = p.axes();
    if data.n_cols() != mean.len() {
        return Err(Error::dim(mean.len(), data.n_cols(), "project data width"));
    }
    let mut out = Matrix::zeros(data.n_rows(), axes.len());
    for (i, row) in data.rows_iter().enumerate() {
        let centered: Vec<T> = row.iter().zip(mean).map(|(&x, &mu)| x - mu).collect();
        for (j, axis) in axes.iter().enumerate() {
            out[(i, j)] = dot(&centered, axis);
        }
    }
    Ok(out)
}

/// Maps basis coordinates back into the original space.
pub fn reconstruct<T: Scalar>(coords: &Matrix<T>, basis: &ComponentBasis<T>) -> Result<Matrix<T>> {
    if coords.n_cols() != basis.components.len() {
        return Err(Error::dim(
            basis.components.len(),
            coords.n_cols(),
            "reconstruct coordinate width",
        ));
    }
    let m = basis.mean.len();
    let mut out = Matrix::zeros(coords.n_rows(), m);
    for (i, crow) in coords.rows_iter().enumerate() {
        let row = out.row_mut(i);
        row.copy_from_slice(&basis.mean);
        for (coef, component) in crow.iter().zip(&basis.components) {
            for (o, &c) in row.iter_mut().zip(component) {
                *o += *coef * c;
            }
        }
    }
    Ok(out)
}

/// Demonstration dataset in the spirit of the classic PCA-vs-LDA picture:
/// a long shared-variance axis carries no category information while a
/// short orthogonal axis separates the categories cleanly.
pub fn entangled_demo<T: Scalar>(
    per_category: usize,
    seed: u64,
) -> (Matrix<T>, Vec<Category>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(2 * per_category);
    let mut labels = Vec::with_capacity(2 * per_category);
    for category in Category::BOTH {
        let offset = match category {
            Category::A => -1.0,
            Category::B => 1.0,
        };
        for _ in 0..per_category {
            let long = -10.0 + 20.0 * rng.gen::<f64>();
            let short = offset + 0.8 * (rng.gen::<f64>() - 0.5);
            rows.push(vec![T::cast(long), T::cast(short)]);
            labels.push(category);
        }
    }
    (Matrix::from_rows(&rows).expect("rectangular by construction"), labels)
}
