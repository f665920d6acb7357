//! Skip-gram with negative sampling, trained single-threaded for exact
//! reproducibility. Negatives follow the unigram^0.75 distribution. A 5%
//! held-out slice of (center, context) pairs, with negatives fixed per pair,
//! tracks the objective across epochs.

use super::{EmbedError, Sentence};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

const BASE_LEARNING_RATE: f64 = 0.025;
const MIN_LR_FACTOR: f64 = 1e-4;

/// Learned word vectors: vocabulary plus input ("center") and output
/// ("context") matrices, both |V| x d row-major.
#[derive(Debug, Clone)]
pub struct VocabEmbedding {
    words: Vec<String>,
    index: HashMap<String, usize>,
    dim: usize,
    input: Vec<f64>,
    output: Vec<f64>,
    /// Mean held-out negative-sampling loss after each epoch.
    pub heldout_loss: Vec<f64>,
}

impl VocabEmbedding {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocab_size(&self) -> usize {
        self.words.len()
    }

    pub fn word_index(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn input_vector(&self, word_idx: usize) -> &[f64] {
        &self.input[word_idx * self.dim..(word_idx + 1) * self.dim]
    }

    pub fn output_vector(&self, word_idx: usize) -> &[f64] {
        &self.output[word_idx * self.dim..(word_idx + 1) * self.dim]
    }

    pub fn input_matrix(&self) -> &[f64] {
        &self.input
    }

    pub fn output_matrix(&self) -> &[f64] {
        &self.output
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^x), stable for large |x|.
fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else if x < -30.0 {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Negative-sampling loss for one training example:
/// `-ln s(v.u_ctx) - sum_neg ln s(-v.u_neg)`.
pub fn example_loss(
    input: &[f64],
    output: &[f64],
    dim: usize,
    center: usize,
    context: usize,
    negatives: &[usize],
) -> f64 {
    let v = &input[center * dim..(center + 1) * dim];
    let mut loss = softplus(-dot(v, &output[context * dim..(context + 1) * dim]));
    for &neg in negatives {
        loss += softplus(dot(v, &output[neg * dim..(neg + 1) * dim]));
    }
    loss
}

/// Analytic gradients of [`example_loss`]. `grad_center` receives d/dv for
/// the center's input row; `grad_targets` holds one row per output row
/// touched, laid out `[context, negatives...]` (duplicates are separate rows
/// the caller sums when applying).
pub fn example_gradients(
    input: &[f64],
    output: &[f64],
    dim: usize,
    center: usize,
    context: usize,
    negatives: &[usize],
    grad_center: &mut [f64],
    grad_targets: &mut [f64],
) -> f64 {
    debug_assert_eq!(grad_center.len(), dim);
    debug_assert_eq!(grad_targets.len(), (negatives.len() + 1) * dim);
    let v = &input[center * dim..(center + 1) * dim];
    grad_center.fill(0.0);
    let mut loss = 0.0;

    let targets = std::iter::once((context, 1.0)).chain(negatives.iter().map(|&n| (n, 0.0)));
    for (slot, (row, label)) in targets.enumerate() {
        let u = &output[row * dim..(row + 1) * dim];
        let score = dot(v, u);
        loss += if label == 1.0 {
            softplus(-score)
        } else {
            softplus(score)
        };
        // d(loss)/d(score)
        let e = sigmoid(score) - label;
        let g = &mut grad_targets[slot * dim..(slot + 1) * dim];
        for d in 0..dim {
            grad_center[d] += e * u[d];
            g[d] = e * v[d];
        }
    }
    loss
}

// SplitMix-style hash used to assign pairs to the held-out slice and to seed
// their per-pair negative streams.
fn mix(seed: u64, a: u64, b: u64, c: u64) -> u64 {
    let mut z = seed
        .wrapping_mul(0x9E3779B97F4A7C15)
        .wrapping_add(a)
        .wrapping_mul(0xBF58476D1CE4E5B9)
        .wrapping_add(b)
        .wrapping_mul(0x94D049BB133111EB)
        .wrapping_add(c);
    z ^= z >> 31;
    z = z.wrapping_mul(0xD6E8FEB86659FD93);
    z ^ (z >> 32)
}

struct UnigramTable {
    cumulative: Vec<f64>,
}

impl UnigramTable {
    fn new(counts: &[u64]) -> Self {
        let mut cumulative = Vec::with_capacity(counts.len());
        let mut acc = 0.0;
        for &c in counts {
            acc += (c as f64).powf(0.75);
            cumulative.push(acc);
        }
        UnigramTable { cumulative }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let total = *self.cumulative.last().unwrap();
        let u = rng.gen::<f64>() * total;
        self.cumulative.partition_point(|&x| x <= u)
    }
}

struct HeldoutPair {
    center: u32,
    context: u32,
    negatives: Vec<usize>,
}

/// Train skip-gram vectors. Deterministic for a fixed seed (bitwise
/// identical matrices across runs).
pub fn train_skipgram(
    sentences: &[Sentence],
    dim: usize,
    window: usize,
    negatives: usize,
    epochs: usize,
    seed: u64,
) -> Result<VocabEmbedding, EmbedError> {
    assert!(dim >= 1, "dimension must be at least 1");

    // Vocabulary in first-occurrence order.
    let mut words: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut counts: Vec<u64> = Vec::new();
    for s in sentences {
        for w in &s.words {
            match index.get(w) {
                Some(&i) => counts[i] += 1,
                None => {
                    index.insert(w.clone(), words.len());
                    words.push(w.clone());
                    counts.push(1);
                }
            }
        }
    }
    if words.is_empty() {
        return Err(EmbedError::EmptyVocabulary);
    }
    let table = UnigramTable::new(&counts);

    // Enumerate (center, context) pairs; roughly 5% become held-out, with
    // negatives frozen per pair so epoch losses are comparable.
    let mut train_pairs: Vec<(u32, u32)> = Vec::new();
    let mut heldout: Vec<HeldoutPair> = Vec::new();
    let mut total_pairs = 0usize;
    for s in sentences {
        total_pairs += s.words.len() * (s.words.len().min(2 * window + 1) - 1);
    }
    let use_holdout = total_pairs >= 20;
    for (si, s) in sentences.iter().enumerate() {
        let ids: Vec<u32> = s.words.iter().map(|w| index[w] as u32).collect();
        for i in 0..ids.len() {
            let lo = i.saturating_sub(window);
            let hi = (i + window).min(ids.len() - 1);
            for j in lo..=hi {
                if j == i {
                    continue;
                }
                let key = mix(seed, si as u64, i as u64, j as u64);
                if use_holdout && key % 20 == 0 {
                    let mut rng = ChaCha8Rng::seed_from_u64(key ^ 0xA5A5_A5A5);
                    let negs: Vec<usize> =
                        (0..negatives).map(|_| table.sample(&mut rng)).collect();
                    heldout.push(HeldoutPair {
                        center: ids[i],
                        context: ids[j],
                        negatives: negs,
                    });
                } else {
                    train_pairs.push((ids[i], ids[j]));
                }
            }
        }
    }
    if train_pairs.is_empty() {
        return Err(EmbedError::NoPairs);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut input = vec![0.0f64; words.len() * dim];
    for x in input.iter_mut() {
        *x = (rng.gen::<f64>() - 0.5) / dim as f64;
    }
    let mut output = vec![0.0f64; words.len() * dim];

    let total_updates = (train_pairs.len() * epochs.max(1)) as f64;
    let mut processed = 0usize;
    let mut grad_center = vec![0.0f64; dim];
    let mut negs: Vec<usize> = Vec::with_capacity(negatives);
    let mut heldout_loss = Vec::with_capacity(epochs);

    for _ in 0..epochs {
        train_pairs.shuffle(&mut rng);
        for &(center, context) in &train_pairs {
            let (center, context) = (center as usize, context as usize);
            let lr = BASE_LEARNING_RATE
                * (1.0 - processed as f64 / total_updates).max(MIN_LR_FACTOR);
            processed += 1;

            negs.clear();
            for _ in 0..negatives {
                let t = table.sample(&mut rng);
                if t != context {
                    negs.push(t);
                }
            }

            let v_off = center * dim;
            grad_center.fill(0.0);
            for (row, label) in std::iter::once((context, 1.0))
                .chain(negs.iter().map(|&n| (n, 0.0)))
            {
                let u_off = row * dim;
                let score = dot(
                    &input[v_off..v_off + dim],
                    &output[u_off..u_off + dim],
                );
                let e = sigmoid(score) - label;
                for d in 0..dim {
                    grad_center[d] += e * output[u_off + d];
                }
                for d in 0..dim {
                    output[u_off + d] -= lr * e * input[v_off + d];
                }
            }
            for d in 0..dim {
                input[v_off + d] -= lr * grad_center[d];
            }
        }

        let monitor: f64 = if heldout.is_empty() {
            let sample = &train_pairs[..train_pairs.len().min(2000)];
            let mut acc = 0.0;
            for &(c, o) in sample {
                acc += example_loss(&input, &output, dim, c as usize, o as usize, &[]);
            }
            acc / sample.len() as f64
        } else {
            let mut acc = 0.0;
            for p in &heldout {
                acc += example_loss(
                    &input,
                    &output,
                    dim,
                    p.center as usize,
                    p.context as usize,
                    &p.negatives,
                );
            }
            acc / heldout.len() as f64
        };
        heldout_loss.push(monitor);
    }

    Ok(VocabEmbedding {
        words,
        index,
        dim,
        input,
        output,
        heldout_loss,
    })
}
