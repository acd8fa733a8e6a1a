//! Core machinery for simulating learning-induced categorical perception in
//! small neural networks.
//!
//! The pipeline this crate supports: generate a parametric binary stimulus
//! family ([`stimuli`]), learn it without labels through a tied-weight
//! denoising autoencoder ([`autoencoder`]), fine-tune a classifier from that
//! encoding with corrective feedback ([`classifier`]), and measure how mean
//! pairwise distances in the hidden layer moved between the two phases
//! ([`metrics`]). Linear analyses (PCA / Fisher LDA, [`linear`]) provide the
//! classical reference picture and double as oracles in tests.
//!
//! All numeric code is generic over the [`scalar::Scalar`] type; the
//! aliases at the crate root fix `f64`, which is what the experiment
//! harness uses throughout.

pub mod autoencoder;
pub mod classifier;
pub mod error;
pub mod linalg;
pub mod linear;
pub mod metrics;
pub mod nn;
pub mod scalar;
pub mod snapshot;
pub mod stimuli;

pub use error::{Error, Result};
pub use nn::{Activation, Probe};
pub use scalar::Scalar;
pub use stimuli::Category;

/// Double-precision aliases; experiments run in `f64` so that measured
/// distances do not drift.
pub type Matrix = linalg::Matrix<f64>;
pub type StimulusSpec = stimuli::StimulusSpec<f64>;
pub type GridSpec = stimuli::GridSpec;
pub type Dataset = stimuli::Dataset<f64>;
pub type ComponentBasis = linear::ComponentBasis<f64>;
pub type DiscriminantDirection = linear::DiscriminantDirection<f64>;
pub type DenseLayer = nn::DenseLayer<f64>;
pub type TrainConfig = nn::TrainConfig<f64>;
pub type Autoencoder = autoencoder::Autoencoder<f64>;
pub type Classifier = classifier::Classifier<f64>;
pub type RepresentationSnapshot = metrics::RepresentationSnapshot<f64>;
pub type CpReport = metrics::CpReport<f64>;
