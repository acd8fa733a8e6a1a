//! Unsupervised phase: a one-hidden-layer denoising autoencoder with tied
//! weights. The decoder weight matrix is the transpose of the encoder's at
//! all times -- it is never stored separately, so the tie cannot drift.
//!
//! Training minimizes the squared reconstruction error of clean stimuli
//! from corrupted presentations. Labels are never read here; the hidden
//! pre-activation this phase ends with is the "before category learning"
//! representation that the distance metrics compare against.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::nn::{Activation, DenseLayer, DiffModel, Probe, TrainConfig};
use crate::scalar::Scalar;
use crate::stimuli::Dataset;

/// Tied-weight denoising autoencoder.
#[derive(Debug, Clone, PartialEq)]
pub struct Autoencoder<T> {
    /// Encoder `h = tanh(W x + b_h)`; the decoder reuses `W^T`.
    pub encoder: DenseLayer<T>,
    /// Decoder bias `b_x`; reconstruction is `tanh(W^T h + b_x)`.
    pub decoder_bias: Vec<T>,
}

/// Per-epoch mean reconstruction error of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    pub epoch_errors: Vec<f64>,
}

impl<T: Scalar> Autoencoder<T> {
    pub fn new_random<R: Rng>(input_dim: usize, hidden_dim: usize, rng: &mut R) -> Self {
        let encoder = DenseLayer::new_random(hidden_dim, input_dim, Activation::Tanh, rng);
        let bound = 1.0 / (hidden_dim as f64).sqrt();
        let decoder_bias = (0..input_dim)
            .map(|_| T::cast(bound * (2.0 * rng.gen::<f64>() - 1.0)))
            .collect();
        Autoencoder {
            encoder,
            decoder_bias,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.encoder.in_dim()
    }

    pub fn hidden_dim(&self) -> usize {
        self.encoder.out_dim()
    }

    /// `(a_h, h)` with `a_h = W x + b_h` and `h = tanh(a_h)`. Both are
    /// returned because distances are measured on the pre-activation.
    pub fn encode(&self, x: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        let trace = self.encoder.forward(x)?;
        Ok((trace.pre_activation, trace.output))
    }

    /// `tanh(W^T h + b_x)` with the tied transpose.
    pub fn decode(&self, h: &[T]) -> Result<Vec<T>> {
        if h.len() != self.hidden_dim() {
            return Err(Error::dim(self.hidden_dim(), h.len(), "decode input"));
        }
        let mut a_x = self.encoder.weights.transpose_matvec(h)?;
        for (a, b) in a_x.iter_mut().zip(&self.decoder_bias) {
            *a += *b;
        }
        Ok(a_x.iter().map(|&a| Activation::Tanh.apply(a)).collect())
    }

    pub fn reconstruct(&self, x: &[T]) -> Result<Vec<T>> {
        let (_, h) = self.encode(x)?;
        self.decode(&h)
    }

    /// Hidden-layer representation of `x` at the requested probe point.
    pub fn hidden_representation(&self, x: &[T], probe: Probe) -> Result<Vec<T>> {
        let (a_h, h) = self.encode(x)?;
        Ok(match probe {
            Probe::PreActivation => a_h,
            Probe::PostActivation => h,
        })
    }

    /// Squared reconstruction error of `target` from possibly corrupted
    /// `input`.
    pub fn sample_error(&self, input: &[T], target: &[T]) -> Result<T> {
        let recon = self.reconstruct(input)?;
        if target.len() != recon.len() {
            return Err(Error::dim(recon.len(), target.len(), "sample_error target"));
        }
        Ok(recon
            .iter()
            .zip(target)
            .map(|(&r, &t)| (r - t) * (r - t))
            .sum())
    }

    /// Gradients of the tied loss for one (input, target) pair. The weight
    /// gradient accumulates both the encoder and decoder contributions of
    /// the shared matrix.
    fn tied_grads(&self, input: &[T], target: &[T]) -> Result<(TiedGrads<T>, T)> {
        let trace = self.encoder.forward(input)?;
        let h = &trace.output;
        let recon = self.decode(h)?;

        let two = T::cast(2.0);
        let error: T = recon
            .iter()
            .zip(target)
            .map(|(&r, &t)| (r - t) * (r - t))
            .sum();
        // delta at the decoder pre-activation: 2(recon - x) tanh'(a_x)
        let delta_x: Vec<T> = recon
            .iter()
            .zip(target)
            .map(|(&r, &t)| two * (r - t) * Activation::Tanh.derivative_from_output(r))
            .collect();

        let hidden = self.hidden_dim();
        let input_dim = self.input_dim();
        let mut grad_w = Matrix::zeros(hidden, input_dim);
        // Decoder contribution: a_x = W^T h, so dE/dW[j][i] += h[j] delta_x[i].
        for (j, &hj) in h.iter().enumerate() {
            let row = grad_w.row_mut(j);
            for (g, &dx) in row.iter_mut().zip(&delta_x) {
                *g = hj * dx;
            }
        }
        // Back through the tie into the encoder.
        let delta_h = self.encoder.weights.matvec(&delta_x)?;
        let delta_ah: Vec<T> = delta_h
            .iter()
            .zip(h)
            .map(|(&d, &y)| d * Activation::Tanh.derivative_from_output(y))
            .collect();
        // Encoder contribution: a_h = W x, so dE/dW[j][i] += delta_ah[j] x[i].
        for (j, &dah) in delta_ah.iter().enumerate() {
            let row = grad_w.row_mut(j);
            for (g, &x) in row.iter_mut().zip(input) {
                *g += dah * x;
            }
        }
        Ok((
            TiedGrads {
                weights: grad_w,
                encoder_bias: delta_ah,
                decoder_bias: delta_x,
            },
            error,
        ))
    }
}

#[derive(Debug, Clone)]
struct TiedGrads<T> {
    weights: Matrix<T>,
    encoder_bias: Vec<T>,
    decoder_bias: Vec<T>,
}

impl<T: Scalar> TiedGrads<T> {
    fn zeros(hidden: usize, input: usize) -> Self {
        TiedGrads {
            weights: Matrix::zeros(hidden, input),
            encoder_bias: vec![T::zero(); hidden],
            decoder_bias: vec![T::zero(); input],
        }
    }

    fn add_assign(&mut self, other: &TiedGrads<T>) {
        for (a, b) in self
            .weights
            .as_mut_slice()
            .iter_mut()
            .zip(other.weights.as_slice())
        {
            *a += *b;
        }
        for (a, b) in self.encoder_bias.iter_mut().zip(&other.encoder_bias) {
            *a += *b;
        }
        for (a, b) in self.decoder_bias.iter_mut().zip(&other.decoder_bias) {
            *a += *b;
        }
    }

    fn is_finite(&self) -> bool {
        self.weights.is_finite()
            && self.encoder_bias.iter().all(|x| x.is_finite())
            && self.decoder_bias.iter().all(|x| x.is_finite())
    }
}

/// Applies an explicit sign-flip mask: entries with a set mask bit are
/// negated. Separated out so tests can force specific corruptions.
pub fn apply_flip_mask<T: Scalar>(x: &[T], mask: &[bool]) -> Vec<T> {
    debug_assert_eq!(x.len(), mask.len());
    x.iter()
        .zip(mask)
        .map(|(&v, &flip)| if flip { -v } else { v })
        .collect()
}

/// Corrupts a stimulus by independently sign-flipping each component with
/// probability `flip_prob`.
pub fn corrupt<T: Scalar, R: Rng>(x: &[T], flip_prob: f64, rng: &mut R) -> Vec<T> {
    if flip_prob == 0.0 {
        return x.to_vec();
    }
    let mask: Vec<bool> = x.iter().map(|_| rng.gen::<f64>() < flip_prob).collect();
    apply_flip_mask(x, &mask)
}

/// Trains the autoencoder by mini-batch SGD on the denoising objective.
/// Labels are never consulted. Aborts when an epoch's mean error exceeds
/// ten times the first epoch's.
pub fn train_autoencoder<T: Scalar>(
    ae: &mut Autoencoder<T>,
    dataset: &Dataset<T>,
    cfg: &TrainConfig<T>,
) -> Result<ReconstructionReport> {
    cfg.validate()?;
    if dataset.n_samples() == 0 {
        return Err(Error::NotEnoughData("empty dataset".into()));
    }
    if dataset.n_dims() != ae.input_dim() {
        return Err(Error::dim(
            ae.input_dim(),
            dataset.n_dims(),
            "autoencoder training data",
        ));
    }
    if ae.hidden_dim() >= ae.input_dim() && cfg.noise_flip_prob == 0.0 {
        return Err(Error::InvalidSpec(
            "autoencoding needs an undercomplete hidden layer or noise_flip_prob > 0".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = dataset.n_samples();
    let mut order: Vec<usize> = (0..n).collect();
    let mut epoch_errors = Vec::with_capacity(cfg.max_epochs);

    for epoch in 0..cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut epoch_error = T::zero();
        for batch in order.chunks(cfg.batch_size) {
            let mut total = TiedGrads::zeros(ae.hidden_dim(), ae.input_dim());
            for &idx in batch {
                let clean = dataset.samples.row(idx);
                let noisy = corrupt(clean, cfg.noise_flip_prob, &mut rng);
                let (grads, err) = ae.tied_grads(&noisy, clean)?;
                total.add_assign(&grads);
                epoch_error += err;
            }
            if !total.is_finite() {
                return Err(Error::NonFinite("autoencoder gradient"));
            }
            let scale = cfg.learning_rate / T::cast(batch.len() as f64);
            for (w, &g) in ae
                .encoder
                .weights
                .as_mut_slice()
                .iter_mut()
                .zip(total.weights.as_slice())
            {
                *w -= scale * g;
            }
            for (b, &g) in ae.encoder.bias.iter_mut().zip(&total.encoder_bias) {
                *b -= scale * g;
            }
            for (b, &g) in ae.decoder_bias.iter_mut().zip(&total.decoder_bias) {
                *b -= scale * g;
            }
        }
        let mean_error = epoch_error.as_f64() / n as f64;
        epoch_errors.push(mean_error);
        let initial = epoch_errors[0];
        if epoch > 0 && mean_error > 10.0 * initial {
            return Err(Error::Diverged {
                epoch,
                error: mean_error,
                initial,
            });
        }
    }
    Ok(ReconstructionReport { epoch_errors })
}

/// Flattened-parameter view for gradient checking: `[W, b_h, b_x]`.
impl<T: Scalar> DiffModel<T> for Autoencoder<T> {
    fn get_params(&self) -> Vec<T> {
        let mut out = Vec::new();
        self.encoder.write_params(&mut out);
        out.extend_from_slice(&self.decoder_bias);
        out
    }

    fn set_params(&mut self, params: &[T]) {
        let n_enc = self.encoder.n_params();
        self.encoder.read_params(&params[..n_enc]);
        self.decoder_bias.copy_from_slice(&params[n_enc..]);
    }

    fn loss(&self, input: &[T], target: &[T]) -> Result<T> {
        self.sample_error(input, target)
    }

    fn param_grads(&self, input: &[T], target: &[T]) -> Result<Vec<T>> {
        let (grads, _) = self.tied_grads(input, target)?;
        let mut flat = Vec::new();
        flat.extend_from_slice(grads.weights.as_slice());
        flat.extend_from_slice(&grads.encoder_bias);
        flat.extend_from_slice(&grads.decoder_bias);
        Ok(flat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::gradient_check;
    use crate::stimuli::{generate_vector_dataset, Category, StimulusSpec};

    fn small_config(seed: u64) -> TrainConfig<f64> {
        TrainConfig {
            learning_rate: 0.05,
            max_epochs: 200,
            batch_size: 16,
            seed,
            target_accuracy: 0.99,
            noise_flip_prob: 0.1,
        }
    }

    #[test]
    fn corrupt_with_zero_probability_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = vec![1.0, -1.0, 1.0];
        assert_eq!(corrupt(&x, 0.0, &mut rng), x);
    }

    #[test]
    fn forced_mask_flips_exactly_the_selected_components() {
        assert_eq!(apply_flip_mask(&[1.0, -1.0], &[true, false]), vec![-1.0, -1.0]);
    }

    #[test]
    fn corrupt_flip_counts_follow_the_binomial_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let x = vec![1.0f64; 50];
        let trials = 10_000;
        let mut total_flips = 0usize;
        for _ in 0..trials {
            let noisy = corrupt(&x, 0.1, &mut rng);
            total_flips += noisy.iter().filter(|&&v| v < 0.0).count();
        }
        let mean = total_flips as f64 / trials as f64;
        // Binomial(50, 0.1): sd of the per-trial count is ~2.12, so the
        // mean over 10k trials has sd ~0.0212.
        let se = (50.0 * 0.1 * 0.9f64).sqrt() / (trials as f64).sqrt();
        assert!((mean - 5.0).abs() < 3.0 * se, "mean flips {mean}");
    }

    #[test]
    fn zero_autoencoder_encodes_and_decodes_to_zero() {
        let ae = Autoencoder {
            encoder: DenseLayer::<f64>::zeros(2, 4, Activation::Tanh),
            decoder_bias: vec![0.0; 4],
        };
        let (a_h, h) = ae.encode(&[1.0, -1.0, 1.0, 1.0]).unwrap();
        assert_eq!(a_h, vec![0.0; 2]);
        assert_eq!(h, vec![0.0; 2]);
        assert_eq!(ae.decode(&h).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn encode_matches_hand_evaluation_and_stays_in_range() {
        let ae = Autoencoder {
            encoder: DenseLayer {
                weights: Matrix::from_rows(&[vec![1.0, -1.0]]).unwrap(),
                bias: vec![0.0],
                activation: Activation::Tanh,
            },
            decoder_bias: vec![0.0; 2],
        };
        let (a_h, h) = ae.encode(&[1.0, -1.0]).unwrap();
        assert_eq!(a_h[0], 2.0);
        assert_eq!(h[0], 2.0f64.tanh());

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let random = Autoencoder::<f64>::new_random(20, 10, &mut rng);
        let x: Vec<f64> = (0..20).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let (_, h) = random.encode(&x).unwrap();
        assert!(h.iter().all(|&v| v > -1.0 && v < 1.0));
        assert_eq!(random.reconstruct(&x).unwrap().len(), 20);
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ae = Autoencoder::<f64>::new_random(4, 2, &mut rng);
        assert!(ae.encode(&[1.0; 3]).is_err());
        assert!(ae.decode(&[1.0; 3]).is_err());
    }

    #[test]
    fn tied_gradients_pass_the_finite_difference_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut ae = Autoencoder::<f64>::new_random(6, 3, &mut rng);
        let x: Vec<f64> = (0..6).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
        let noisy = corrupt(&x, 0.2, &mut rng);
        let err = gradient_check(&mut ae, &noisy, &x, 1e-5).unwrap();
        assert!(err < 1e-4, "max relative error {err}");
    }

    #[test]
    fn training_memorizes_a_single_repeated_stimulus() {
        let spec = StimulusSpec::new(8, 8, 1.0).unwrap();
        let mut data = generate_vector_dataset(&spec, 1, 0).unwrap();
        // One repeated stimulus: duplicate the A row.
        let row = data.samples.row(0).to_vec();
        data.samples = Matrix::from_rows(&vec![row; 8]).unwrap();
        data.labels = vec![Category::A; 8];

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut ae = Autoencoder::<f64>::new_random(8, 1, &mut rng);
        let cfg = TrainConfig {
            noise_flip_prob: 0.0,
            max_epochs: 400,
            ..small_config(4)
        };
        let report = train_autoencoder(&mut ae, &data, &cfg).unwrap();
        let final_err = *report.epoch_errors.last().unwrap();
        assert!(final_err < 0.01 * 8.0, "final error {final_err}");
        assert!(final_err < report.epoch_errors[0]);
    }

    #[test]
    fn training_recovers_signs_of_the_two_point_dataset() {
        let spec = StimulusSpec::new(6, 6, 1.0).unwrap();
        let data = generate_vector_dataset(&spec, 1, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut ae = Autoencoder::<f64>::new_random(6, 2, &mut rng);
        let cfg = TrainConfig {
            noise_flip_prob: 0.0,
            max_epochs: 500,
            ..small_config(5)
        };
        train_autoencoder(&mut ae, &data, &cfg).unwrap();
        for row in data.samples.rows_iter() {
            let recon = ae.reconstruct(row).unwrap();
            for (r, x) in recon.iter().zip(row) {
                assert_eq!(r.signum(), x.signum());
            }
        }
    }

    #[test]
    fn labels_are_never_read_during_unsupervised_training() {
        let spec = StimulusSpec::new(12, 4, 1.0).unwrap();
        let data = generate_vector_dataset(&spec, 20, 6).unwrap();
        let mut shuffled = data.clone();
        shuffled.labels.reverse();

        let mut rng1 = ChaCha8Rng::seed_from_u64(7);
        let mut rng2 = ChaCha8Rng::seed_from_u64(7);
        let mut ae1 = Autoencoder::<f64>::new_random(12, 6, &mut rng1);
        let mut ae2 = Autoencoder::<f64>::new_random(12, 6, &mut rng2);
        let cfg = TrainConfig { max_epochs: 30, ..small_config(8) };
        let r1 = train_autoencoder(&mut ae1, &data, &cfg).unwrap();
        let r2 = train_autoencoder(&mut ae2, &shuffled, &cfg).unwrap();
        assert_eq!(ae1, ae2);
        assert_eq!(r1, r2);
    }

    #[test]
    fn default_configuration_error_curve_stays_near_its_running_minimum() {
        let spec = StimulusSpec::new(20, 10, 1.0).unwrap();
        let data = generate_vector_dataset(&spec, 200, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut ae = Autoencoder::<f64>::new_random(20, 10, &mut rng);
        let cfg = TrainConfig {
            max_epochs: 200,
            learning_rate: 0.02,
            ..small_config(11)
        };
        let report = train_autoencoder(&mut ae, &data, &cfg).unwrap();
        let mut running_min = f64::INFINITY;
        for (epoch, &err) in report.epoch_errors.iter().enumerate() {
            assert!(
                err <= running_min * 1.2,
                "epoch {epoch}: error {err} exceeds running minimum {running_min} by >20%"
            );
            running_min = running_min.min(err);
        }
        assert!(*report.epoch_errors.last().unwrap() < report.epoch_errors[0]);
    }

    #[test]
    fn overcomplete_noiseless_config_is_rejected() {
        let spec = StimulusSpec::new(4, 2, 1.0).unwrap();
        let data = generate_vector_dataset(&spec, 4, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut ae = Autoencoder::<f64>::new_random(4, 4, &mut rng);
        let cfg = TrainConfig { noise_flip_prob: 0.0, ..small_config(0) };
        assert!(train_autoencoder(&mut ae, &data, &cfg).is_err());
        // The same geometry with noise is fine.
        let cfg = TrainConfig { noise_flip_prob: 0.1, max_epochs: 5, ..small_config(0) };
        assert!(train_autoencoder(&mut ae, &data, &cfg).is_ok());
    }

    #[test]
    fn identical_seeds_give_bit_identical_training_trajectories() {
        let spec = StimulusSpec::new(10, 3, 1.0).unwrap();
        let data = generate_vector_dataset(&spec, 30, 14).unwrap();
        let make = || {
            let mut rng = ChaCha8Rng::seed_from_u64(15);
            let mut ae = Autoencoder::<f64>::new_random(10, 5, &mut rng);
            let cfg = TrainConfig { max_epochs: 50, ..small_config(16) };
            let report = train_autoencoder(&mut ae, &data, &cfg).unwrap();
            (ae, report)
        };
        let (ae1, r1) = make();
        let (ae2, r2) = make();
        assert_eq!(ae1, ae2);
        assert_eq!(r1, r2);
    }
}
