//! Dense-network machinery: layers, forward traces, backpropagation,
//! SGD updates, and finite-difference gradient checking.
//!
//! The two concrete networks in this crate (tied-weight autoencoder and
//! two-layer classifier) both sit on top of this module; anything with a
//! flattened parameter vector and a scalar loss can be gradient-checked
//! through [`DiffModel`].

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Which hidden-layer quantity to read out: the pre-activation `a_h`
/// (where separation/compression is measured) or the nonlinear output `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Probe {
    PreActivation,
    PostActivation,
}

impl Probe {
    pub fn name(self) -> &'static str {
        match self {
            Probe::PreActivation => "pre_activation",
            Probe::PostActivation => "post_activation",
        }
    }
}

impl std::str::FromStr for Probe {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pre_activation" | "pre" => Ok(Probe::PreActivation),
            "post_activation" | "post" => Ok(Probe::PostActivation),
            other => Err(Error::Parse(format!("unknown probe {other:?}"))),
        }
    }
}

/// Elementwise nonlinearity of a layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Logistic,
    Identity,
}

impl Activation {
    pub fn apply<T: Scalar>(self, x: T) -> T {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Logistic => T::one() / (T::one() + (-x).exp()),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the activation's own output.
    pub fn derivative_from_output<T: Scalar>(self, y: T) -> T {
        match self {
            Activation::Tanh => T::one() - y * y,
            Activation::Logistic => y * (T::one() - y),
            Activation::Identity => T::one(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Logistic => "logistic",
            Activation::Identity => "identity",
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tanh" => Ok(Activation::Tanh),
            "logistic" => Ok(Activation::Logistic),
            "identity" => Ok(Activation::Identity),
            other => Err(Error::Parse(format!("unknown activation {other:?}"))),
        }
    }
}

/// Fully connected layer: `out = f(W x + b)` with `W` stored `out x in`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer<T> {
    pub weights: Matrix<T>,
    pub bias: Vec<T>,
    pub activation: Activation,
}

/// Record of one layer application, kept around for backpropagation.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace<T> {
    pub input: Vec<T>,
    pub pre_activation: Vec<T>,
    pub output: Vec<T>,
}

/// Gradients with the same shapes as a layer's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrads<T> {
    pub weights: Matrix<T>,
    pub bias: Vec<T>,
}

impl<T: Scalar> LayerGrads<T> {
    pub fn zeros(out_dim: usize, in_dim: usize) -> Self {
        LayerGrads {
            weights: Matrix::zeros(out_dim, in_dim),
            bias: vec![T::zero(); out_dim],
        }
    }

    pub fn add_assign(&mut self, other: &LayerGrads<T>) {
        for (a, b) in self
            .weights
            .as_mut_slice()
            .iter_mut()
            .zip(other.weights.as_slice())
        {
            *a += *b;
        }
        for (a, b) in self.bias.iter_mut().zip(&other.bias) {
            *a += *b;
        }
    }

    pub fn scale(&mut self, factor: T) {
        for a in self.weights.as_mut_slice() {
            *a *= factor;
        }
        for a in &mut self.bias {
            *a *= factor;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.weights.is_finite() && self.bias.iter().all(|x| x.is_finite())
    }
}

impl<T: Scalar> DenseLayer<T> {
    /// Random layer with weights and biases uniform on `[-1/sqrt(in), 1/sqrt(in)]`.
    pub fn new_random<R: Rng>(
        out_dim: usize,
        in_dim: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Self {
        let bound = 1.0 / (in_dim as f64).sqrt();
        let mut draw = || T::cast(bound * (2.0 * rng.gen::<f64>() - 1.0));
        let mut weights = Matrix::zeros(out_dim, in_dim);
        for w in weights.as_mut_slice() {
            *w = draw();
        }
        let bias = (0..out_dim).map(|_| draw()).collect();
        DenseLayer {
            weights,
            bias,
            activation,
        }
    }

    pub fn zeros(out_dim: usize, in_dim: usize, activation: Activation) -> Self {
        DenseLayer {
            weights: Matrix::zeros(out_dim, in_dim),
            bias: vec![T::zero(); out_dim],
            activation,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.weights.n_cols()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.n_rows()
    }

    /// `f(W x + b)` with the intermediate values recorded.
    pub fn forward(&self, input: &[T]) -> Result<ForwardTrace<T>> {
        if input.len() != self.in_dim() {
            return Err(Error::dim(self.in_dim(), input.len(), "layer forward input"));
        }
        let mut pre = self.weights.matvec(input)?;
        for (a, b) in pre.iter_mut().zip(&self.bias) {
            *a += *b;
        }
        let output = pre.iter().map(|&a| self.activation.apply(a)).collect();
        Ok(ForwardTrace {
            input: input.to_vec(),
            pre_activation: pre,
            output,
        })
    }

    /// Backpropagates `dL/d(output)` through this layer; returns parameter
    /// gradients and `dL/d(input)`.
    pub fn backward(&self, trace: &ForwardTrace<T>, grad_output: &[T]) -> (LayerGrads<T>, Vec<T>) {
        let delta: Vec<T> = grad_output
            .iter()
            .zip(&trace.output)
            .map(|(&g, &y)| g * self.activation.derivative_from_output(y))
            .collect();
        self.backward_from_delta(trace, &delta)
    }

    /// Same as [`DenseLayer::backward`] but starting from `dL/d(pre_activation)`;
    /// lets losses fused with the output nonlinearity stay numerically exact.
    pub fn backward_from_delta(
        &self,
        trace: &ForwardTrace<T>,
        delta: &[T],
    ) -> (LayerGrads<T>, Vec<T>) {
        debug_assert_eq!(delta.len(), self.out_dim());
        let mut grads = LayerGrads::zeros(self.out_dim(), self.in_dim());
        for (o, &d) in delta.iter().enumerate() {
            let row = grads.weights.row_mut(o);
            for (w, &x) in row.iter_mut().zip(&trace.input) {
                *w = d * x;
            }
            grads.bias[o] = d;
        }
        let grad_input = self
            .weights
            .transpose_matvec(delta)
            .expect("delta length checked above");
        (grads, grad_input)
    }

    /// One SGD step `p <- p - lr * g`. A non-finite gradient aborts.
    pub fn apply_gradients(&mut self, grads: &LayerGrads<T>, learning_rate: T) -> Result<()> {
        if !grads.is_finite() {
            return Err(Error::NonFinite("gradient update"));
        }
        for (w, &g) in self
            .weights
            .as_mut_slice()
            .iter_mut()
            .zip(grads.weights.as_slice())
        {
            *w -= learning_rate * g;
        }
        for (b, &g) in self.bias.iter_mut().zip(&grads.bias) {
            *b -= learning_rate * g;
        }
        debug_assert!(self.weights.is_finite());
        Ok(())
    }

    pub fn n_params(&self) -> usize {
        self.out_dim() * self.in_dim() + self.out_dim()
    }

    pub fn write_params(&self, out: &mut Vec<T>) {
        out.extend_from_slice(self.weights.as_slice());
        out.extend_from_slice(&self.bias);
    }

    pub fn read_params(&mut self, params: &[T]) {
        let nw = self.out_dim() * self.in_dim();
        self.weights.as_mut_slice().copy_from_slice(&params[..nw]);
        self.bias.copy_from_slice(&params[nw..]);
    }
}

/// Plain elementwise SGD on flattened parameters.
pub fn sgd_step<T: Scalar>(params: &mut [T], grads: &[T], learning_rate: T) -> Result<()> {
    if params.len() != grads.len() {
        return Err(Error::dim(params.len(), grads.len(), "sgd_step gradients"));
    }
    if grads.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("gradient update"));
    }
    for (p, &g) in params.iter_mut().zip(grads) {
        *p -= learning_rate * g;
    }
    Ok(())
}

/// Backpropagates through a stack of layers given their forward traces and
/// the loss gradient at the final output. Returns per-layer gradients (in
/// layer order) and the gradient at the stack's input.
pub fn backward_stack<T: Scalar>(
    layers: &[&DenseLayer<T>],
    traces: &[ForwardTrace<T>],
    grad_output: &[T],
) -> Result<(Vec<LayerGrads<T>>, Vec<T>)> {
    if layers.len() != traces.len() {
        return Err(Error::dim(layers.len(), traces.len(), "backward_stack traces"));
    }
    let last = layers.len() - 1;
    if grad_output.len() != layers[last].out_dim() {
        return Err(Error::dim(
            layers[last].out_dim(),
            grad_output.len(),
            "backward_stack grad_output",
        ));
    }
    let mut grads: Vec<LayerGrads<T>> = Vec::with_capacity(layers.len());
    let mut upstream = grad_output.to_vec();
    for (layer, trace) in layers.iter().zip(traces).rev() {
        let (g, next) = layer.backward(trace, &upstream);
        grads.push(g);
        upstream = next;
    }
    grads.reverse();
    Ok((grads, upstream))
}

/// Training hyperparameters shared by both learning phases.
///
/// `target_accuracy` only matters to the supervised phase and
/// `noise_flip_prob` only to the denoising phase; the unused field is
/// ignored by the other phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig<T> {
    pub learning_rate: T,
    pub max_epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub target_accuracy: f64,
    pub noise_flip_prob: f64,
}

impl<T: Scalar> TrainConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > T::zero() && self.learning_rate.is_finite()) {
            return Err(Error::InvalidSpec("learning_rate must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidSpec("batch_size must be >= 1".into()));
        }
        if !(self.target_accuracy > 0.0 && self.target_accuracy <= 1.0) {
            return Err(Error::InvalidSpec(
                "target_accuracy must lie in (0, 1]".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.noise_flip_prob) {
            return Err(Error::InvalidSpec(
                "noise_flip_prob must lie in [0, 1)".into(),
            ));
        }
        Ok(())
    }
}

impl<T: Scalar> Default for TrainConfig<T> {
    fn default() -> Self {
        TrainConfig {
            learning_rate: T::cast(0.02),
            max_epochs: 300,
            batch_size: 16,
            seed: 0,
            target_accuracy: 0.99,
            noise_flip_prob: 0.1,
        }
    }
}

/// A differentiable model: flattened parameters, a scalar loss, and the
/// matching analytic gradient. Implemented by every network in the crate so
/// one finite-difference check covers them all.
pub trait DiffModel<T: Scalar> {
    fn get_params(&self) -> Vec<T>;
    fn set_params(&mut self, params: &[T]);
    fn loss(&self, input: &[T], target: &[T]) -> Result<T>;
    fn param_grads(&self, input: &[T], target: &[T]) -> Result<Vec<T>>;
}

/// Compares analytic gradients with central finite differences over every
/// parameter; returns the maximum relative error.
pub fn gradient_check<T: Scalar, M: DiffModel<T>>(
    model: &mut M,
    input: &[T],
    target: &[T],
    epsilon: T,
) -> Result<T> {
    let eps = epsilon.as_f64();
    if !(1e-7..=1e-3).contains(&eps) {
        return Err(Error::InvalidSpec(format!(
            "epsilon must lie in [1e-7, 1e-3], got {eps}"
        )));
    }
    let analytic = model.param_grads(input, target)?;
    let original = model.get_params();
    let mut worst = T::zero();
    let mut params = original.clone();
    for i in 0..params.len() {
        let p = params[i];
        params[i] = p + epsilon;
        model.set_params(&params);
        let plus = model.loss(input, target)?;
        params[i] = p - epsilon;
        model.set_params(&params);
        let minus = model.loss(input, target)?;
        params[i] = p;

        let numeric = (plus - minus) / (T::cast(2.0) * epsilon);
        let denom = (analytic[i].abs() + numeric.abs()).max(T::cast(1e-8));
        let rel = (analytic[i] - numeric).abs() / denom;
        worst = worst.max(rel);
    }
    model.set_params(&original);
    Ok(worst)
}

/// Loss attached to a generic layer stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    /// `sum_i (out_i - target_i)^2`
    SquaredError,
    /// Single logistic output against a 0/1 target.
    BinaryCrossEntropy,
}

impl LossKind {
    pub fn evaluate<T: Scalar>(self, output: &[T], target: &[T]) -> T {
        match self {
            LossKind::SquaredError => output
                .iter()
                .zip(target)
                .map(|(&o, &t)| (o - t) * (o - t))
                .sum(),
            LossKind::BinaryCrossEntropy => {
                let p = clamp_probability(output[0]);
                let y = target[0];
                -(y * p.ln() + (T::one() - y) * (T::one() - p).ln())
            }
        }
    }

    /// `dL/d(output)`.
    pub fn gradient<T: Scalar>(self, output: &[T], target: &[T]) -> Vec<T> {
        match self {
            LossKind::SquaredError => output
                .iter()
                .zip(target)
                .map(|(&o, &t)| T::cast(2.0) * (o - t))
                .collect(),
            LossKind::BinaryCrossEntropy => {
                let p = clamp_probability(output[0]);
                let y = target[0];
                vec![(p - y) / (p * (T::one() - p))]
            }
        }
    }
}

fn clamp_probability<T: Scalar>(p: T) -> T {
    let lo = T::cast(1e-12);
    p.max(lo).min(T::one() - lo)
}

/// Generic feed-forward stack with an attached loss; mostly used for
/// gradient-check suites and small demonstrations.
#[derive(Debug, Clone)]
pub struct Mlp<T> {
    pub layers: Vec<DenseLayer<T>>,
    pub loss: LossKind,
}

impl<T: Scalar> Mlp<T> {
    pub fn forward_all(&self, input: &[T]) -> Result<Vec<ForwardTrace<T>>> {
        let mut traces = Vec::with_capacity(self.layers.len());
        let mut current = input.to_vec();
        for layer in &self.layers {
            let trace = layer.forward(&current)?;
            current = trace.output.clone();
            traces.push(trace);
        }
        Ok(traces)
    }

    pub fn output(&self, input: &[T]) -> Result<Vec<T>> {
        Ok(self
            .forward_all(input)?
            .pop()
            .expect("at least one layer")
            .output)
    }
}

impl<T: Scalar> DiffModel<T> for Mlp<T> {
    fn get_params(&self) -> Vec<T> {
        let mut out = Vec::new();
        for layer in &self.layers {
            layer.write_params(&mut out);
        }
        out
    }

    fn set_params(&mut self, params: &[T]) {
        let mut offset = 0;
        for layer in &mut self.layers {
            let n = layer.n_params();
            layer.read_params(&params[offset..offset + n]);
            offset += n;
        }
    }

    fn loss(&self, input: &[T], target: &[T]) -> Result<T> {
        Ok(self.loss.evaluate(&self.output(input)?, target))
    }

    fn param_grads(&self, input: &[T], target: &[T]) -> Result<Vec<T>> {
        let traces = self.forward_all(input)?;
        let output = &traces.last().expect("at least one layer").output;
        let grad_out = self.loss.gradient(output, target);
        let layer_refs: Vec<&DenseLayer<T>> = self.layers.iter().collect();
        let (grads, _) = backward_stack(&layer_refs, &traces, &grad_out)?;
        let mut flat = Vec::new();
        for g in &grads {
            flat.extend_from_slice(g.weights.as_slice());
            flat.extend_from_slice(&g.bias);
        }
        Ok(flat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn forward_of_zero_layer_is_zero() {
        let layer = DenseLayer::<f64>::zeros(3, 2, Activation::Tanh);
        let trace = layer.forward(&[0.7, -0.3]).unwrap();
        assert_eq!(trace.pre_activation, vec![0.0; 3]);
        assert_eq!(trace.output, vec![0.0; 3]);
    }

    #[test]
    fn identity_layer_passes_input_through() {
        let layer = DenseLayer {
            weights: Matrix::identity(3),
            bias: vec![0.0; 3],
            activation: Activation::Identity,
        };
        let input = [1.5, -2.0, 0.25];
        let trace = layer.forward(&input).unwrap();
        assert_eq!(trace.output, input.to_vec());
    }

    #[test]
    fn forward_matches_hand_evaluation() {
        let layer = DenseLayer {
            weights: Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap(),
            bias: vec![0.0],
            activation: Activation::Tanh,
        };
        let trace = layer.forward(&[1.0, 1.0]).unwrap();
        assert_eq!(trace.pre_activation[0], 2.0);
        assert_eq!(trace.output[0], 2.0f64.tanh());
        assert!((trace.output[0] - 0.9640).abs() < 1e-4);
    }

    #[test]
    fn forward_rejects_dimension_mismatch() {
        let layer = DenseLayer::<f64>::zeros(2, 3, Activation::Identity);
        assert!(layer.forward(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn zero_loss_gradient_yields_zero_parameter_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let layer = DenseLayer::<f64>::new_random(4, 6, Activation::Tanh, &mut rng);
        let trace = layer.forward(&[0.1, -0.2, 0.3, 0.4, -0.5, 0.6]).unwrap();
        let (grads, input_grad) = layer.backward(&trace, &[0.0; 4]);
        assert!(grads.weights.as_slice().iter().all(|&g| g == 0.0));
        assert!(grads.bias.iter().all(|&g| g == 0.0));
        assert!(input_grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn squared_loss_at_its_minimum_has_zero_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mlp = Mlp {
            layers: vec![DenseLayer::<f64>::new_random(
                3,
                3,
                Activation::Identity,
                &mut rng,
            )],
            loss: LossKind::SquaredError,
        };
        let input = [0.4, -0.1, 0.9];
        let target = mlp.output(&input).unwrap();
        let grads = mlp.param_grads(&input, &target).unwrap();
        assert!(grads.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn random_two_layer_net_passes_gradient_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut mlp = Mlp {
            layers: vec![
                DenseLayer::<f64>::new_random(4, 6, Activation::Tanh, &mut rng),
                DenseLayer::<f64>::new_random(2, 4, Activation::Logistic, &mut rng),
            ],
            loss: LossKind::SquaredError,
        };
        let input: Vec<f64> = (0..6).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let target = vec![0.3, 0.8];
        let err = gradient_check(&mut mlp, &input, &target, 1e-5).unwrap();
        assert!(err < 1e-4, "max relative error {err}");
    }

    #[test]
    fn linear_network_with_quadratic_loss_checks_to_high_precision() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut mlp = Mlp {
            layers: vec![DenseLayer::<f64>::new_random(
                2,
                3,
                Activation::Identity,
                &mut rng,
            )],
            loss: LossKind::SquaredError,
        };
        let input = [1.0, -0.5, 0.25];
        let target = [2.0, -1.0];
        let err = gradient_check(&mut mlp, &input, &target, 1e-5).unwrap();
        assert!(err < 1e-8, "max relative error {err}");
    }

    #[test]
    fn gradient_check_enforces_epsilon_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut mlp = Mlp {
            layers: vec![DenseLayer::<f64>::new_random(
                1,
                1,
                Activation::Identity,
                &mut rng,
            )],
            loss: LossKind::SquaredError,
        };
        assert!(gradient_check(&mut mlp, &[1.0], &[0.0], 1e-8).is_err());
        assert!(gradient_check(&mut mlp, &[1.0], &[0.0], 1e-2).is_err());
    }

    #[test]
    fn sgd_step_applies_the_plain_update() {
        let mut params = vec![1.0f64];
        sgd_step(&mut params, &[2.0], 0.1).unwrap();
        assert!((params[0] - 0.8).abs() < 1e-15);

        let mut unchanged = vec![0.5, -0.5];
        sgd_step(&mut unchanged, &[0.0, 0.0], 0.3).unwrap();
        assert_eq!(unchanged, vec![0.5, -0.5]);
        sgd_step(&mut unchanged, &[1.0, 1.0], 0.0).unwrap();
        assert_eq!(unchanged, vec![0.5, -0.5]);
    }

    #[test]
    fn sgd_step_aborts_on_non_finite_gradient() {
        let mut params = vec![1.0f64];
        assert!(sgd_step(&mut params, &[f64::NAN], 0.1).is_err());
        let mut layer = DenseLayer::<f64>::zeros(1, 1, Activation::Identity);
        let grads = LayerGrads {
            weights: Matrix::from_vec(1, 1, vec![f64::INFINITY]).unwrap(),
            bias: vec![0.0],
        };
        assert!(layer.apply_gradients(&grads, 0.1).is_err());
    }

    #[test]
    fn full_batch_descent_on_a_convex_problem_is_monotone() {
        // Single identity layer, squared error: the batch loss is convex in
        // the parameters, so a small enough step never increases it.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut layer = DenseLayer::<f64>::new_random(1, 2, Activation::Identity, &mut rng);
        let batch: Vec<(Vec<f64>, Vec<f64>)> = (0..8)
            .map(|_| {
                let x = vec![rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0];
                let y = vec![0.7 * x[0] - 0.3 * x[1] + 0.1];
                (x, y)
            })
            .collect();
        let batch_loss = |layer: &DenseLayer<f64>| -> f64 {
            batch
                .iter()
                .map(|(x, y)| {
                    let out = layer.forward(x).unwrap().output;
                    LossKind::SquaredError.evaluate(&out, y)
                })
                .sum()
        };
        let mut last = batch_loss(&layer);
        for _ in 0..200 {
            let mut total = LayerGrads::zeros(1, 2);
            for (x, y) in &batch {
                let trace = layer.forward(x).unwrap();
                let grad_out = LossKind::SquaredError.gradient(&trace.output, y);
                let (g, _) = layer.backward(&trace, &grad_out);
                total.add_assign(&g);
            }
            layer.apply_gradients(&total, 0.01).unwrap();
            let loss = batch_loss(&layer);
            assert!(loss <= last + 1e-12, "loss rose from {last} to {loss}");
            last = loss;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn random_initialization_is_seed_deterministic_and_bounded() {
        let mut rng1 = ChaCha8Rng::seed_from_u64(9);
        let mut rng2 = ChaCha8Rng::seed_from_u64(9);
        let a = DenseLayer::<f64>::new_random(5, 16, Activation::Tanh, &mut rng1);
        let b = DenseLayer::<f64>::new_random(5, 16, Activation::Tanh, &mut rng2);
        assert_eq!(a, b);
        let bound = 1.0 / 4.0;
        assert!(a.weights.as_slice().iter().all(|w| w.abs() <= bound));
    }

    #[test]
    fn train_config_validation_bounds() {
        let ok = TrainConfig::<f64>::default();
        assert!(ok.validate().is_ok());
        assert!(TrainConfig { learning_rate: 0.0, ..ok }.validate().is_err());
        assert!(TrainConfig { batch_size: 0, ..ok }.validate().is_err());
        assert!(TrainConfig { target_accuracy: 0.0, ..ok }.validate().is_err());
        assert!(TrainConfig { noise_flip_prob: 1.0, ..ok }.validate().is_err());
        // Zero epochs is allowed: it expresses "take the snapshot untouched".
        assert!(TrainConfig { max_epochs: 0, ..ok }.validate().is_ok());
    }
}
