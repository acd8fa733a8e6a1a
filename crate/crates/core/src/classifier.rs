//! Supervised phase: a two-weight-layer classification network whose hidden
//! layer starts from the trained autoencoder. Fine-tuning with corrective
//! feedback moves both weight layers, so the hidden pre-activation drifts
//! away from its unsupervised state -- that drift is what the distance
//! metrics quantify.

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::autoencoder::Autoencoder;
use crate::error::{Error, Result};
use crate::nn::{Activation, DenseLayer, DiffModel, LossKind, Probe, TrainConfig};
use crate::scalar::Scalar;
use crate::stimuli::{Category, Dataset};

/// Classification network: autoencoder-initialized hidden layer plus a
/// single logistic output unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier<T> {
    pub hidden: DenseLayer<T>,
    pub output: DenseLayer<T>,
    /// Identifier of the autoencoder snapshot the hidden layer came from.
    pub provenance: String,
    /// When set, supervised training updates only the output layer.
    pub freeze_hidden: bool,
}

/// Per-epoch loss/accuracy trace plus the halt condition of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierReport {
    pub epoch_loss: Vec<f64>,
    pub epoch_accuracy: Vec<f64>,
    /// True when training halted because accuracy reached the target;
    /// false when the epoch budget ran out first.
    pub reached_criterion: bool,
    pub epochs_run: usize,
    pub final_accuracy: f64,
}

impl ClassifierReport {
    /// 1-based epoch at which the accuracy criterion was met, when it was.
    pub fn epochs_to_criterion(&self) -> Option<usize> {
        if self.reached_criterion {
            Some(self.epochs_run)
        } else {
            None
        }
    }
}

impl<T: Scalar> Classifier<T> {
    /// Copies the autoencoder's encoder into the hidden layer and draws a
    /// fresh random output layer from `seed`.
    pub fn from_autoencoder(ae: &Autoencoder<T>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let output = DenseLayer::new_random(1, ae.hidden_dim(), Activation::Logistic, &mut rng);
        Classifier {
            hidden: ae.encoder.clone(),
            output,
            provenance: String::new(),
            freeze_hidden: false,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.hidden.in_dim()
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden.out_dim()
    }

    /// Probability assigned to category B.
    pub fn probability_b(&self, x: &[T]) -> Result<T> {
        let h = self.hidden.forward(x)?;
        let out = self.output.forward(&h.output)?;
        Ok(out.output[0])
    }

    /// Thresholded readout: B above probability 1/2, A otherwise (ties go
    /// to A). Confidence is the probability of the predicted label.
    pub fn classify(&self, x: &[T]) -> Result<(Category, f64)> {
        let p = self.probability_b(x)?.as_f64();
        if p > 0.5 {
            Ok((Category::B, p))
        } else {
            Ok((Category::A, 1.0 - p))
        }
    }

    /// Hidden-layer representation of `x` at the requested probe point.
    pub fn hidden_representation(&self, x: &[T], probe: Probe) -> Result<Vec<T>> {
        let trace = self.hidden.forward(x)?;
        Ok(match probe {
            Probe::PreActivation => trace.pre_activation,
            Probe::PostActivation => trace.output,
        })
    }

    /// Fraction of dataset rows classified correctly.
    pub fn accuracy(&self, dataset: &Dataset<T>) -> Result<f64> {
        let mut correct = 0usize;
        for (row, &label) in dataset.samples.rows_iter().zip(&dataset.labels) {
            let (predicted, _) = self.classify(row)?;
            if predicted == label {
                correct += 1;
            }
        }
        Ok(correct as f64 / dataset.n_samples() as f64)
    }

    /// Cross-entropy loss and the gradients for one labeled sample. The
    /// output delta is formed at the pre-activation (`p - y`), which keeps
    /// it exact even when the logistic saturates.
    fn sample_grads(
        &self,
        x: &[T],
        label: Category,
    ) -> Result<(ClassifierGrads<T>, T)> {
        let hidden_trace = self.hidden.forward(x)?;
        let output_trace = self.output.forward(&hidden_trace.output)?;
        let y = T::cast(label.target());
        let loss = LossKind::BinaryCrossEntropy.evaluate(&output_trace.output, &[y]);

        let delta_out = vec![output_trace.output[0] - y];
        let (output_grads, upstream) = self.output.backward_from_delta(&output_trace, &delta_out);
        let (hidden_grads, _) = self.hidden.backward(&hidden_trace, &upstream);
        Ok((
            ClassifierGrads {
                hidden: hidden_grads,
                output: output_grads,
            },
            loss,
        ))
    }
}

#[derive(Debug, Clone)]
struct ClassifierGrads<T> {
    hidden: crate::nn::LayerGrads<T>,
    output: crate::nn::LayerGrads<T>,
}

/// Trains the classifier with mini-batch SGD on cross-entropy, halting as
/// soon as training accuracy reaches `cfg.target_accuracy`. Falling short
/// of the target within the epoch budget is reported, not raised.
pub fn train_classifier<T: Scalar>(
    clf: &mut Classifier<T>,
    dataset: &Dataset<T>,
    cfg: &TrainConfig<T>,
) -> Result<ClassifierReport> {
    cfg.validate()?;
    if dataset.n_samples() == 0 {
        return Err(Error::NotEnoughData("empty dataset".into()));
    }
    if dataset.n_dims() != clf.input_dim() {
        return Err(Error::dim(
            clf.input_dim(),
            dataset.n_dims(),
            "classifier training data",
        ));
    }
    let n_a = dataset.indices_of(Category::A).len();
    let n_b = dataset.n_samples() - n_a;
    if n_a != n_b {
        return Err(Error::InvalidSpec(format!(
            "supervised training expects a balanced dataset, got {n_a} A vs {n_b} B"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = dataset.n_samples();
    let mut order: Vec<usize> = (0..n).collect();
    let mut epoch_loss = Vec::new();
    let mut epoch_accuracy = Vec::new();
    let mut reached = false;

    for _ in 0..cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = T::zero();
        for batch in order.chunks(cfg.batch_size) {
            let mut hidden_total = crate::nn::LayerGrads::zeros(clf.hidden_dim(), clf.input_dim());
            let mut output_total = crate::nn::LayerGrads::zeros(1, clf.hidden_dim());
            for &idx in batch {
                let (grads, loss) = clf.sample_grads(dataset.samples.row(idx), dataset.labels[idx])?;
                hidden_total.add_assign(&grads.hidden);
                output_total.add_assign(&grads.output);
                loss_sum += loss;
            }
            let scale = T::one() / T::cast(batch.len() as f64);
            hidden_total.scale(scale);
            output_total.scale(scale);
            if !clf.freeze_hidden {
                clf.hidden.apply_gradients(&hidden_total, cfg.learning_rate)?;
            }
            clf.output.apply_gradients(&output_total, cfg.learning_rate)?;
        }
        epoch_loss.push(loss_sum.as_f64() / n as f64);
        let accuracy = clf.accuracy(dataset)?;
        epoch_accuracy.push(accuracy);
        if accuracy >= cfg.target_accuracy {
            reached = true;
            break;
        }
    }

    let final_accuracy = match epoch_accuracy.last() {
        Some(&acc) => acc,
        None => clf.accuracy(dataset)?,
    };
    Ok(ClassifierReport {
        epochs_run: epoch_loss.len(),
        epoch_loss,
        epoch_accuracy,
        reached_criterion: reached,
        final_accuracy,
    })
}

/// Flattened-parameter view for gradient checking: `[W1, b1, W2, b2]`.
impl<T: Scalar> DiffModel<T> for Classifier<T> {
    fn get_params(&self) -> Vec<T> {
        let mut out = Vec::new();
        self.hidden.write_params(&mut out);
        self.output.write_params(&mut out);
        out
    }

    fn set_params(&mut self, params: &[T]) {
        let n_hidden = self.hidden.n_params();
        self.hidden.read_params(&params[..n_hidden]);
        self.output.read_params(&params[n_hidden..]);
    }

    fn loss(&self, input: &[T], target: &[T]) -> Result<T> {
        let p = self.probability_b(input)?;
        Ok(LossKind::BinaryCrossEntropy.evaluate(&[p], target))
    }

    fn param_grads(&self, input: &[T], target: &[T]) -> Result<Vec<T>> {
        let label = if target[0] > T::cast(0.5) {
            Category::B
        } else {
            Category::A
        };
        let (grads, _) = self.sample_grads(input, label)?;
        let mut flat = Vec::new();
        flat.extend_from_slice(grads.hidden.weights.as_slice());
        flat.extend_from_slice(&grads.hidden.bias);
        flat.extend_from_slice(grads.output.weights.as_slice());
        flat.extend_from_slice(&grads.output.bias);
        Ok(flat)
    }
}
