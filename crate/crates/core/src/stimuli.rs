//! Synthetic binary stimulus families.
//!
//! Two generators share a common dataset container:
//!
//! * N-dimensional vectors whose first `k` components covary perfectly with
//!   the category (value `-a` for A, `+a` for B) while the remaining `N - k`
//!   components are independent coin flips of magnitude `b`;
//! * square binary images assembled from micro-feature patches, where `k`
//!   of the micro-features covary with the category and the rest pick a
//!   variant at random per stimulus.
//!
//! Alongside the generators sits an analytic expectation for mean squared
//! pair distances in vector-stimulus space, used as a test oracle.

use std::fmt;
use std::io::{BufRead, Write};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Category tag; every stimulus belongs to exactly one of two categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    A,
    B,
}

impl Category {
    pub const BOTH: [Category; 2] = [Category::A, Category::B];

    /// Covariant-component sign: A sits at `-a`, B at `+a`.
    fn covariant_sign<T: Scalar>(self) -> T {
        match self {
            Category::A => -T::one(),
            Category::B => T::one(),
        }
    }

    /// Target value for the supervised phase (A -> 0, B -> 1).
    pub fn target(self) -> f64 {
        match self {
            Category::A => 0.0,
            Category::B => 1.0,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::A => write!(f, "A"),
            Category::B => write!(f, "B"),
        }
    }
}

impl std::str::FromStr for Category {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" => Ok(Category::A),
            "B" => Ok(Category::B),
            other => Err(Error::Parse(format!("unknown category label {other:?}"))),
        }
    }
}

/// Parametric definition of a vector stimulus family.
///
/// `n_dims` is the total component count, `n_covariant` how many of them
/// covary with the category, `covariant_salience` their magnitude (`a`), and
/// `random_magnitude` the magnitude of the remaining coin-flip components
/// (`b`, default 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StimulusSpec<T> {
    pub n_dims: usize,
    pub n_covariant: usize,
    pub covariant_salience: T,
    pub random_magnitude: T,
}

impl<T: Scalar> StimulusSpec<T> {
    pub fn new(n_dims: usize, n_covariant: usize, covariant_salience: T) -> Result<Self> {
        Self::with_magnitude(n_dims, n_covariant, covariant_salience, T::one())
    }

    pub fn with_magnitude(
        n_dims: usize,
        n_covariant: usize,
        covariant_salience: T,
        random_magnitude: T,
    ) -> Result<Self> {
        let spec = StimulusSpec {
            n_dims,
            n_covariant,
            covariant_salience,
            random_magnitude,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_dims == 0 {
            return Err(Error::InvalidSpec("n_dims must be positive".into()));
        }
        if self.n_covariant == 0 || self.n_covariant > self.n_dims {
            return Err(Error::InvalidSpec(format!(
                "n_covariant must be in 1..={}, got {}",
                self.n_dims, self.n_covariant
            )));
        }
        if !(self.covariant_salience > T::zero() && self.covariant_salience <= T::one()) {
            return Err(Error::InvalidSpec(
                "covariant_salience must lie in (0, 1]".into(),
            ));
        }
        // Written so that NaN also fails the check.
        let magnitude_positive = self.random_magnitude > T::zero();
        if !magnitude_positive {
            return Err(Error::InvalidSpec("random_magnitude must be > 0".into()));
        }
        Ok(())
    }

    /// Analytic mean squared pair distances in stimulus space:
    /// `within = 2(N-k) b^2`, `between = 4 k a^2 + 2(N-k) b^2`.
    ///
    /// Same-category pairs agree on every covariant slot and differ by `2b`
    /// on each random slot with probability 1/2; cross-category pairs add a
    /// guaranteed `2a` gap on each covariant slot.
    pub fn expected_squared_distances(&self) -> (T, T) {
        let two = T::cast(2.0);
        let four = T::cast(4.0);
        let n_random = T::cast((self.n_dims - self.n_covariant) as f64);
        let k = T::cast(self.n_covariant as f64);
        let a = self.covariant_salience;
        let b = self.random_magnitude;
        let within = two * n_random * b * b;
        let between = four * k * a * a + within;
        (within, between)
    }
}

/// A single micro-feature: two distinct binary patch variants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MicrofeaturePair {
    pub variant0: Vec<u8>,
    pub variant1: Vec<u8>,
}

/// Parametric definition of a grid stimulus family.
///
/// A stimulus is a `grid_edge x grid_edge` arrangement of patch slots, each
/// slot holding one `patch_edge x patch_edge` binary micro-feature patch.
/// The `n_microfeatures` features fill the slots in equal proportions and
/// are shuffled into random positions per stimulus.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub n_microfeatures: usize,
    pub n_covariant: usize,
    pub patch_edge: usize,
    pub grid_edge: usize,
    pub microfeature_pairs: Vec<MicrofeaturePair>,
}

impl GridSpec {
    pub fn new(
        n_covariant: usize,
        patch_edge: usize,
        grid_edge: usize,
        microfeature_pairs: Vec<MicrofeaturePair>,
    ) -> Result<Self> {
        let spec = GridSpec {
            n_microfeatures: microfeature_pairs.len(),
            n_covariant,
            patch_edge,
            grid_edge,
            microfeature_pairs,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Draws `n_microfeatures` random distinct variant pairs for the given
    /// seed. The published figures do not pin the patch patterns, so each
    /// experiment generates its own set deterministically.
    pub fn random(
        n_microfeatures: usize,
        n_covariant: usize,
        patch_edge: usize,
        grid_edge: usize,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pixels = patch_edge * patch_edge;
        let mut pairs = Vec::with_capacity(n_microfeatures);
        for _ in 0..n_microfeatures {
            let variant0: Vec<u8> = (0..pixels).map(|_| rng.gen_range(0..2u8)).collect();
            let variant1 = loop {
                let candidate: Vec<u8> = (0..pixels).map(|_| rng.gen_range(0..2u8)).collect();
                if candidate != variant0 {
                    break candidate;
                }
            };
            pairs.push(MicrofeaturePair { variant0, variant1 });
        }
        GridSpec::new(n_covariant, patch_edge, grid_edge, pairs)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_microfeatures == 0 || self.patch_edge == 0 || self.grid_edge == 0 {
            return Err(Error::InvalidSpec(
                "grid spec dimensions must be positive".into(),
            ));
        }
        if self.n_covariant == 0 || self.n_covariant > self.n_microfeatures {
            return Err(Error::InvalidSpec(format!(
                "n_covariant must be in 1..={}, got {}",
                self.n_microfeatures, self.n_covariant
            )));
        }
        if self.microfeature_pairs.len() != self.n_microfeatures {
            return Err(Error::InvalidSpec(
                "microfeature_pairs length must equal n_microfeatures".into(),
            ));
        }
        let pixels = self.patch_edge * self.patch_edge;
        for (i, pair) in self.microfeature_pairs.iter().enumerate() {
            for variant in [&pair.variant0, &pair.variant1] {
                if variant.len() != pixels {
                    return Err(Error::InvalidSpec(format!(
                        "micro-feature {i} patch must have {pixels} pixels"
                    )));
                }
                if variant.iter().any(|&p| p > 1) {
                    return Err(Error::InvalidSpec(format!(
                        "micro-feature {i} patch must be binary"
                    )));
                }
            }
            if pair.variant0 == pair.variant1 {
                return Err(Error::InvalidSpec(format!(
                    "micro-feature {i} variants must differ"
                )));
            }
        }
        Ok(())
    }

    pub fn n_slots(&self) -> usize {
        self.grid_edge * self.grid_edge
    }

    /// Flattened pixel count of one stimulus.
    pub fn n_pixels(&self) -> usize {
        self.n_slots() * self.patch_edge * self.patch_edge
    }
}

/// Which generator produced a dataset.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSpec<T> {
    Vector(StimulusSpec<T>),
    Grid(GridSpec),
}

/// A labeled stimulus matrix, one stimulus per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub samples: Matrix<T>,
    pub labels: Vec<Category>,
    pub spec: DatasetSpec<T>,
    pub seed: u64,
}

impl<T: Scalar> Dataset<T> {
    pub fn n_samples(&self) -> usize {
        self.samples.n_rows()
    }

    pub fn n_dims(&self) -> usize {
        self.samples.n_cols()
    }

    /// Row indices belonging to `category`.
    pub fn indices_of(&self, category: Category) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == category)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Draws one vector stimulus: covariant slots carry the category sign times
/// `a`, the rest are independent `+/-b` coin flips.
pub fn generate_vector_stimulus<T: Scalar, R: Rng>(
    spec: &StimulusSpec<T>,
    category: Category,
    rng: &mut R,
) -> Vec<T> {
    let covariant = category.covariant_sign::<T>() * spec.covariant_salience;
    let b = spec.random_magnitude;
    (0..spec.n_dims)
        .map(|i| {
            if i < spec.n_covariant {
                covariant
            } else if rng.gen::<bool>() {
                b
            } else {
                -b
            }
        })
        .collect()
}

/// Generates `per_category` stimuli for each category (A rows first), with
/// a bit-exact dependence on `seed`.
pub fn generate_vector_dataset<T: Scalar>(
    spec: &StimulusSpec<T>,
    per_category: usize,
    seed: u64,
) -> Result<Dataset<T>> {
    spec.validate()?;
    if per_category == 0 {
        return Err(Error::InvalidSpec("per_category must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(2 * per_category);
    let mut labels = Vec::with_capacity(2 * per_category);
    for category in Category::BOTH {
        for _ in 0..per_category {
            rows.push(generate_vector_stimulus(spec, category, &mut rng));
            labels.push(category);
        }
    }
    Ok(Dataset {
        samples: Matrix::from_rows(&rows)?,
        labels,
        spec: DatasetSpec::Vector(*spec),
        seed,
    })
}

/// Slot-level description of one generated grid stimulus: which feature and
/// which variant landed in each patch slot (row-major over slots).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridLayout {
    pub slots: Vec<(usize, usize)>,
}

/// Draws one grid stimulus; returns flattened `{0,1}` pixels plus the slot
/// layout (useful for frequency checks).
pub fn generate_grid_stimulus<T: Scalar, R: Rng>(
    spec: &GridSpec,
    category: Category,
    rng: &mut R,
) -> Result<(Vec<T>, GridLayout)> {
    let n_slots = spec.n_slots();
    if !n_slots.is_multiple_of(spec.n_microfeatures) {
        return Err(Error::InvalidSpec(format!(
            "grid_edge^2 = {} is not divisible by n_microfeatures = {}; equal proportions impossible",
            n_slots, spec.n_microfeatures
        )));
    }
    let copies = n_slots / spec.n_microfeatures;

    // One variant decision per feature per stimulus: covariant features are
    // pinned to the category, the rest flip a coin.
    let variant_of: Vec<usize> = (0..spec.n_microfeatures)
        .map(|f| {
            if f < spec.n_covariant {
                match category {
                    Category::A => 0,
                    Category::B => 1,
                }
            } else if rng.gen::<bool>() {
                1
            } else {
                0
            }
        })
        .collect();

    let mut slots: Vec<(usize, usize)> = (0..spec.n_microfeatures)
        .flat_map(|f| std::iter::repeat_n((f, variant_of[f]), copies))
        .collect();
    // Fisher-Yates with the caller's stream keeps the whole stimulus
    // reproducible from one seed.
    for i in (1..slots.len()).rev() {
        let j = rng.gen_range(0..=i);
        slots.swap(i, j);
    }

    let edge_px = spec.grid_edge * spec.patch_edge;
    let mut pixels = vec![T::zero(); spec.n_pixels()];
    for (slot_idx, &(feature, variant)) in slots.iter().enumerate() {
        let pair = &spec.microfeature_pairs[feature];
        let patch = if variant == 0 {
            &pair.variant0
        } else {
            &pair.variant1
        };
        let slot_row = slot_idx / spec.grid_edge;
        let slot_col = slot_idx % spec.grid_edge;
        for pr in 0..spec.patch_edge {
            for pc in 0..spec.patch_edge {
                let row = slot_row * spec.patch_edge + pr;
                let col = slot_col * spec.patch_edge + pc;
                pixels[row * edge_px + col] = T::cast(patch[pr * spec.patch_edge + pc] as f64);
            }
        }
    }
    Ok((pixels, GridLayout { slots }))
}

/// Generates a balanced grid dataset (A rows first), bit-exact under `seed`.
pub fn generate_grid_dataset<T: Scalar>(
    spec: &GridSpec,
    per_category: usize,
    seed: u64,
) -> Result<Dataset<T>> {
    spec.validate()?;
    if per_category == 0 {
        return Err(Error::InvalidSpec("per_category must be >= 1".into()));
    }
    if spec.n_slots() < spec.n_microfeatures {
        return Err(Error::InvalidSpec(
            "grid_edge^2 must be >= n_microfeatures".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(2 * per_category);
    let mut labels = Vec::with_capacity(2 * per_category);
    for category in Category::BOTH {
        for _ in 0..per_category {
            let (pixels, _) = generate_grid_stimulus(spec, category, &mut rng)?;
            rows.push(pixels);
            labels.push(category);
        }
    }
    Ok(Dataset {
        samples: Matrix::from_rows(&rows)?,
        labels,
        spec: DatasetSpec::Grid(spec.clone()),
        seed,
    })
}

// ---------------------------------------------------------------------------
// Plain-text serialization
// ---------------------------------------------------------------------------

impl<T: Scalar> Dataset<T> {
    /// Writes the dataset in the plain-text interchange format: a header
    /// line `N k a b per_category seed`, for grids a second header line
    /// `grid_edge patch_edge`, then one space-separated row per stimulus
    /// with a trailing `A`/`B` label token.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let per_category = self.n_samples() / 2;
        match &self.spec {
            DatasetSpec::Vector(s) => {
                writeln!(
                    w,
                    "{} {} {} {} {} {}",
                    s.n_dims, s.n_covariant, s.covariant_salience, s.random_magnitude,
                    per_category, self.seed
                )?;
            }
            DatasetSpec::Grid(s) => {
                // Grid pixels are plain {0,1}; magnitudes are recorded as 1.
                writeln!(
                    w,
                    "{} {} 1 1 {} {}",
                    s.n_microfeatures, s.n_covariant, per_category, self.seed
                )?;
                writeln!(w, "{} {}", s.grid_edge, s.patch_edge)?;
            }
        }
        for (row, label) in self.samples.rows_iter().zip(&self.labels) {
            for x in row {
                write!(w, "{x} ")?;
            }
            writeln!(w, "{label}")?;
        }
        Ok(())
    }
}

/// Raw parse of the text dataset format; the grid header, when present,
/// appears in `grid_dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct TextDataset<T> {
    pub n: usize,
    pub k: usize,
    pub a: T,
    pub b: T,
    pub per_category: usize,
    pub seed: u64,
    pub grid_dims: Option<(usize, usize)>,
    pub samples: Matrix<T>,
    pub labels: Vec<Category>,
}

pub fn read_text_dataset<T: Scalar, R: BufRead>(reader: R) -> Result<TextDataset<T>> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty dataset file".into()))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 {
        return Err(Error::Parse(format!(
            "header must have 6 fields, got {}",
            fields.len()
        )));
    }
    let parse_usize = |s: &str| {
        s.parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}")))
    };
    let parse_scalar = |s: &str| {
        s.parse::<f64>()
            .map(T::cast)
            .map_err(|e| Error::Parse(format!("bad number {s:?}: {e}")))
    };
    let n = parse_usize(fields[0])?;
    let k = parse_usize(fields[1])?;
    let a = parse_scalar(fields[2])?;
    let b = parse_scalar(fields[3])?;
    let per_category = parse_usize(fields[4])?;
    let seed = fields[5]
        .parse::<u64>()
        .map_err(|e| Error::Parse(format!("bad seed {:?}: {e}", fields[5])))?;

    let mut grid_dims = None;
    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut labels = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut tokens: Vec<&str> = line.split_whitespace().collect();
        // A grid header is the only line with two tokens and no label.
        if grid_dims.is_none() && rows.is_empty() && tokens.len() == 2 {
            if let (Ok(ge), Ok(pe)) = (tokens[0].parse::<usize>(), tokens[1].parse::<usize>()) {
                grid_dims = Some((ge, pe));
                continue;
            }
        }
        let label: Category = tokens
            .pop()
            .ok_or_else(|| Error::Parse("empty data row".into()))?
            .parse()?;
        let row = tokens
            .iter()
            .map(|t| {
                t.parse::<f64>()
                    .map(T::cast)
                    .map_err(|e| Error::Parse(format!("bad value {t:?}: {e}")))
            })
            .collect::<Result<Vec<T>>>()?;
        rows.push(row);
        labels.push(label);
    }
    Ok(TextDataset {
        n,
        k,
        a,
        b,
        per_category,
        seed,
        grid_dims,
        samples: Matrix::from_rows(&rows)?,
        labels,
    })
}
