//! Dense autoencoder with ReLU hidden layers, MSE loss, and the ADADELTA
//! optimizer.
//!
//! Layer sizes are `[n, h1, c, h1, n]`: encoder `n -> h1 -> c`, decoder
//! `c -> h1 -> n`. Hidden layers apply ReLU; the output layer is linear so
//! that negative embedding components remain reconstructible. The probed
//! activations are the code layer, the decoder hidden layer (`dec1`), and
//! the output layer clamped at zero (`dec2`), so every probed activation is
//! non-negative.

mod adadelta;
mod checkpoint;

pub use adadelta::AdadeltaState;
pub use checkpoint::{load_model, save_model};

use crate::embed::EmbeddingSet;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("input dimension {found} does not match model dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no training vectors")]
    EmptyTrainingSet,
    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },
    #[error("non-finite gradient")]
    NonFiniteGradient,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint line {line}: {message}")]
    BadCheckpoint { line: usize, message: String },
}

/// Probed layers, in fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Code,
    Dec1,
    Dec2,
}

impl Layer {
    pub const ALL: [Layer; 3] = [Layer::Code, Layer::Dec1, Layer::Dec2];

    pub fn as_str(self) -> &'static str {
        match self {
            Layer::Code => "code",
            Layer::Dec1 => "dec1",
            Layer::Dec2 => "dec2",
        }
    }

    pub fn parse(s: &str) -> Option<Layer> {
        match s {
            "code" => Some(Layer::Code),
            "dec1" => Some(Layer::Dec1),
            "dec2" => Some(Layer::Dec2),
            _ => None,
        }
    }
}

/// A probed neuron: its layer and index within the layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NeuronId {
    pub layer: Layer,
    pub index: usize,
}

impl std::fmt::Display for NeuronId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.layer.as_str(), self.index)
    }
}

/// One dense layer, row-major `out x in` weights.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Dense {
    pub(crate) rows: usize,
    pub(crate) cols: usize,
    pub(crate) weights: Vec<f64>,
    pub(crate) biases: Vec<f64>,
}

impl Dense {
    fn zeros(rows: usize, cols: usize) -> Self {
        Dense {
            rows,
            cols,
            weights: vec![0.0; rows * cols],
            biases: vec![0.0; rows],
        }
    }

    fn glorot(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Self {
        let limit = (6.0 / (rows + cols) as f64).sqrt();
        let mut layer = Dense::zeros(rows, cols);
        for w in layer.weights.iter_mut() {
            *w = rng.gen_range(-limit..limit);
        }
        layer
    }

    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for r in 0..self.rows {
            let row = &self.weights[r * self.cols..(r + 1) * self.cols];
            let mut acc = self.biases[r];
            for (w, v) in row.iter().zip(x) {
                acc += w * v;
            }
            out[r] = acc;
        }
    }
}

/// Per-layer activations from one forward pass. All entries are >= 0.
#[derive(Debug, Clone)]
pub struct LayerActivations {
    pub code: Vec<f64>,
    pub dec1: Vec<f64>,
    pub dec2: Vec<f64>,
}

/// Autoencoder weights plus training history. Sizes `[n, h1, c, h1, n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutoModel {
    pub(crate) layers: [Dense; 4],
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub code_dim: usize,
    pub seed: u64,
    /// (epoch, mean loss) per completed epoch, strictly ordered by epoch.
    pub history: Vec<(usize, f64)>,
}

/// Size ratios for the hidden and code layers, as fractions of the input
/// dimension (rounded up).
#[derive(Debug, Clone, Copy)]
pub struct SizeRatios {
    pub h1: f64,
    pub code: f64,
}

impl Default for SizeRatios {
    fn default() -> Self {
        SizeRatios { h1: 0.5, code: 0.25 }
    }
}

/// Glorot-uniform initialization, biases zero, sizes `[n, ceil(n/2),
/// ceil(n/4), ceil(n/2), n]` under the default ratios.
pub fn init_model(n: usize, seed: u64) -> AutoModel {
    init_model_with(n, seed, SizeRatios::default())
}

pub fn init_model_with(n: usize, seed: u64, ratios: SizeRatios) -> AutoModel {
    assert!(n >= 4, "input dimension must be at least 4");
    let h1 = ((n as f64 * ratios.h1).ceil() as usize).max(1);
    let code = ((n as f64 * ratios.code).ceil() as usize).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = [
        Dense::glorot(h1, n, &mut rng),
        Dense::glorot(code, h1, &mut rng),
        Dense::glorot(h1, code, &mut rng),
        Dense::glorot(n, h1, &mut rng),
    ];
    AutoModel {
        layers,
        input_dim: n,
        hidden_dim: h1,
        code_dim: code,
        seed,
        history: Vec::new(),
    }
}

impl AutoModel {
    pub fn layer_sizes(&self) -> [usize; 5] {
        [
            self.input_dim,
            self.hidden_dim,
            self.code_dim,
            self.hidden_dim,
            self.input_dim,
        ]
    }

    /// Neurons of the probed layers in fixed order: code, dec1, dec2.
    pub fn probed_neurons(&self) -> Vec<NeuronId> {
        let mut out = Vec::with_capacity(self.code_dim + self.hidden_dim + self.input_dim);
        for (layer, size) in [
            (Layer::Code, self.code_dim),
            (Layer::Dec1, self.hidden_dim),
            (Layer::Dec2, self.input_dim),
        ] {
            for index in 0..size {
                out.push(NeuronId { layer, index });
            }
        }
        out
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    /// All parameters as one flat vector (weights then biases, per layer).
    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.biases);
        }
        out
    }

    pub fn set_params_flat(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.param_count());
        let mut off = 0;
        for l in self.layers.iter_mut() {
            let nw = l.weights.len();
            l.weights.copy_from_slice(&params[off..off + nw]);
            off += nw;
            let nb = l.biases.len();
            l.biases.copy_from_slice(&params[off..off + nb]);
            off += nb;
        }
    }
}

fn relu_inplace(v: &mut [f64]) {
    for x in v.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
}

/// Forward pass: returns the (linear) reconstruction and the probed
/// activations. `dec2` is the output layer clamped at zero.
pub fn forward(model: &AutoModel, x: &[f64]) -> Result<(Vec<f64>, LayerActivations), TrainError> {
    if x.len() != model.input_dim {
        return Err(TrainError::DimensionMismatch {
            expected: model.input_dim,
            found: x.len(),
        });
    }
    let mut h1 = vec![0.0; model.hidden_dim];
    model.layers[0].forward_into(x, &mut h1);
    relu_inplace(&mut h1);

    let mut code = vec![0.0; model.code_dim];
    model.layers[1].forward_into(&h1, &mut code);
    relu_inplace(&mut code);

    let mut dec1 = vec![0.0; model.hidden_dim];
    model.layers[2].forward_into(&code, &mut dec1);
    relu_inplace(&mut dec1);

    let mut reconstruction = vec![0.0; model.input_dim];
    model.layers[3].forward_into(&dec1, &mut reconstruction);

    let dec2 = reconstruction.iter().map(|&v| v.max(0.0)).collect();
    Ok((
        reconstruction,
        LayerActivations { code, dec1, dec2 },
    ))
}

/// Mean-squared-error loss and flat parameter gradients for a batch.
/// Loss is the mean over samples of the per-component squared error mean.
pub fn batch_loss_and_grads(model: &AutoModel, batch: &[&[f64]]) -> (f64, Vec<f64>) {
    let n = model.input_dim as f64;
    let scale = 1.0 / batch.len() as f64;
    let mut grads: Vec<Dense> = model
        .layers
        .iter()
        .map(|l| Dense::zeros(l.rows, l.cols))
        .collect();
    let mut total_loss = 0.0;

    for &x in batch {
        // Forward, keeping pre-ReLU masks via the post-activation values.
        let mut h1 = vec![0.0; model.hidden_dim];
        model.layers[0].forward_into(x, &mut h1);
        relu_inplace(&mut h1);
        let mut code = vec![0.0; model.code_dim];
        model.layers[1].forward_into(&h1, &mut code);
        relu_inplace(&mut code);
        let mut dec1 = vec![0.0; model.hidden_dim];
        model.layers[2].forward_into(&code, &mut dec1);
        relu_inplace(&mut dec1);
        let mut out = vec![0.0; model.input_dim];
        model.layers[3].forward_into(&dec1, &mut out);

        let mut delta: Vec<f64> = Vec::with_capacity(model.input_dim);
        let mut loss = 0.0;
        for (o, t) in out.iter().zip(x) {
            let diff = o - t;
            loss += diff * diff;
            delta.push(2.0 * diff / n);
        }
        total_loss += loss / n;

        // Backward through layer 3 (linear), then 2, 1, 0 (ReLU).
        let inputs: [&[f64]; 4] = [x, &h1, &code, &dec1];
        let post: [Option<&[f64]>; 4] = [Some(&h1), Some(&code), Some(&dec1), None];
        let mut delta = delta;
        for li in (0..4).rev() {
            let layer = &model.layers[li];
            let grad = &mut grads[li];
            let input = inputs[li];
            for r in 0..layer.rows {
                let d = delta[r] * scale;
                grad.biases[r] += d;
                let grow = &mut grad.weights[r * layer.cols..(r + 1) * layer.cols];
                for (g, v) in grow.iter_mut().zip(input) {
                    *g += d * v;
                }
            }
            if li == 0 {
                break;
            }
            // Propagate to the previous layer's post-activation, applying
            // the ReLU mask of that layer (derivative zero at and below 0).
            let prev_post = post[li - 1].unwrap();
            let mut next_delta = vec![0.0; layer.cols];
            for r in 0..layer.rows {
                let d = delta[r];
                let row = &layer.weights[r * layer.cols..(r + 1) * layer.cols];
                for (nd, w) in next_delta.iter_mut().zip(row) {
                    *nd += d * w;
                }
            }
            for (nd, &p) in next_delta.iter_mut().zip(prev_post) {
                if p <= 0.0 {
                    *nd = 0.0;
                }
            }
            delta = next_delta;
        }
    }

    let mut flat = Vec::with_capacity(model.param_count());
    for g in &grads {
        flat.extend_from_slice(&g.weights);
        flat.extend_from_slice(&g.biases);
    }
    (total_loss * scale, flat)
}

/// Batch loss only (used by gradient checks).
pub fn batch_loss(model: &AutoModel, batch: &[&[f64]]) -> f64 {
    let n = model.input_dim as f64;
    let mut total = 0.0;
    for &x in batch {
        let (out, _) = forward(model, x).expect("dimensions checked by caller");
        let loss: f64 = out.iter().zip(x).map(|(o, t)| (o - t) * (o - t)).sum();
        total += loss / n;
    }
    total / batch.len() as f64
}

/// Train with ADADELTA for `epochs` epochs over seeded shuffles of the
/// vectors, recording the mean loss per epoch. Deterministic given the seed.
pub fn train(
    model: &mut AutoModel,
    vectors: &EmbeddingSet,
    epochs: usize,
    batch: usize,
    seed: u64,
) -> Result<(), TrainError> {
    if vectors.is_empty() {
        return Err(TrainError::EmptyTrainingSet);
    }
    if vectors.dim() != model.input_dim {
        return Err(TrainError::DimensionMismatch {
            expected: model.input_dim,
            found: vectors.dim(),
        });
    }
    let batch = batch.max(1);
    let rows: Vec<&[f64]> = vectors.iter().map(|(_, v)| v).collect();
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut opt = AdadeltaState::new(model.param_count());
    let mut params = model.params_flat();

    let start_epoch = model.history.last().map(|&(e, _)| e).unwrap_or(0);
    for e in 0..epochs {
        let epoch = start_epoch + e + 1;
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut seen = 0usize;
        for (bi, chunk) in order.chunks(batch).enumerate() {
            let minibatch: Vec<&[f64]> = chunk.iter().map(|&i| rows[i]).collect();
            let (loss, grads) = batch_loss_and_grads(model, &minibatch);
            if !loss.is_finite() {
                return Err(TrainError::NonFiniteLoss { epoch, batch: bi });
            }
            opt.step(&grads, &mut params)?;
            model.set_params_flat(&params);
            loss_sum += loss * minibatch.len() as f64;
            seen += minibatch.len();
        }
        model.history.push((epoch, loss_sum / seen as f64));
    }
    Ok(())
}

/// Activations of every probed neuron (rows) for every vector in the set
/// (columns, in set iteration order). Entries are non-negative.
#[derive(Debug, Clone)]
pub struct ActivationMatrix {
    neurons: Vec<NeuronId>,
    columns: Vec<String>,
    /// Row-major neurons x columns.
    data: Vec<f64>,
}

impl ActivationMatrix {
    pub fn neurons(&self) -> &[NeuronId] {
        &self.neurons
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn n_neurons(&self) -> usize {
        self.neurons.len()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, neuron: usize) -> &[f64] {
        let w = self.columns.len();
        &self.data[neuron * w..(neuron + 1) * w]
    }

    pub fn row_of(&self, id: NeuronId) -> Option<&[f64]> {
        self.neurons
            .iter()
            .position(|&n| n == id)
            .map(|i| self.row(i))
    }
}

/// Run every vector through the model and collect probed activations.
pub fn activations(
    model: &AutoModel,
    vectors: &EmbeddingSet,
) -> Result<ActivationMatrix, TrainError> {
    if vectors.dim() != model.input_dim {
        return Err(TrainError::DimensionMismatch {
            expected: model.input_dim,
            found: vectors.dim(),
        });
    }
    let neurons = model.probed_neurons();
    let n_cols = vectors.len();
    let mut data = vec![0.0; neurons.len() * n_cols];
    let mut columns = Vec::with_capacity(n_cols);
    for (col, (id, x)) in vectors.iter().enumerate() {
        columns.push(id.to_string());
        let (_, acts) = forward(model, x)?;
        let stacked = acts
            .code
            .iter()
            .chain(acts.dec1.iter())
            .chain(acts.dec2.iter());
        for (row, &v) in stacked.enumerate() {
            data[row * n_cols + col] = v;
        }
    }
    Ok(ActivationMatrix {
        neurons,
        columns,
        data,
    })
}
