//! The single-channel convolutional sentence classifier.
//!
//! Geometry: a sentence of at most `n` tokens is embedded into a
//! `(n + l_h - 1) x k` matrix (left-padded by `l_h - 1` zero rows, where
//! `l_h` is the widest filter). Each filter of width `h` slides over all
//! word windows producing a feature map, which is rectified and
//! max-pooled over time. Pooled features concatenate into the
//! penultimate vector (dropout here during training) feeding an affine
//! softmax layer.

use std::collections::BTreeMap;

use crate::classifier::config::{CnnConfig, Variant};
use crate::classifier::encode::EncodedBatch;
use crate::embeddings::vectors::WordVectors;
use crate::error::{Error, Result};
use crate::numerics::matrix::{axpy, dot, Matrix};
use crate::numerics::ops::softmax_cross_entropy;
use crate::numerics::rng::SeededRng;
use crate::numerics::scalar::Scalar;
use crate::text::vocab::{Vocabulary, PAD_ID, RESERVED};

/// All filters of one window width: `weights` is `maps x (width * k)`,
/// one flattened filter per row.
#[derive(Clone, Debug)]
pub struct FilterBank<T> {
    pub width: usize,
    pub weights: Matrix<T>,
    pub bias: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct CnnModel<T> {
    /// `vocab_len x k`; row 0 is the padding row and stays all-zero.
    pub embedding: Matrix<T>,
    pub filters: Vec<FilterBank<T>>,
    /// `num_classes x total_maps`.
    pub fc_weight: Matrix<T>,
    pub fc_bias: Vec<T>,
    /// Longest training sentence n; encoding pads to `n + l_h - 1`.
    pub max_len: usize,
    pub num_classes: usize,
}

/// Builds the embedding matrix for a variant.
///
/// `rand` draws every non-padding row from U[-r, r]. The pretrained
/// variants copy vectors for covered words and draw U[-r, r] for the
/// rest; the padding row is always zero.
pub fn init_embeddings<T: Scalar>(
    vocab: &Vocabulary,
    variant: Variant,
    pretrained: Option<&WordVectors<T>>,
    dim: usize,
    init_range: f64,
    rng: &mut SeededRng,
) -> Result<Matrix<T>> {
    let lo = T::from_f64(-init_range);
    let hi = T::from_f64(init_range);
    let mut embedding = Matrix::zeros(vocab.len(), dim);
    match variant {
        Variant::Rand => {
            for r in 1..vocab.len() {
                for v in embedding.row_mut(r) {
                    *v = rng.uniform(lo, hi);
                }
            }
        }
        Variant::Static | Variant::NonStatic => {
            let pretrained = pretrained.ok_or_else(|| {
                Error::Config(format!(
                    "variant {} requires pretrained vectors",
                    variant.name()
                ))
            })?;
            if pretrained.dim() != dim {
                return Err(Error::Config(format!(
                    "pretrained vectors have dimension {}, model expects {dim}",
                    pretrained.dim()
                )));
            }
            for r in 1..vocab.len() {
                let covered = r >= RESERVED
                    && match pretrained.get(vocab.token_of(r as u32)) {
                        Some(vec) => {
                            embedding.row_mut(r).copy_from_slice(vec);
                            true
                        }
                        None => false,
                    };
                if !covered {
                    for v in embedding.row_mut(r) {
                        *v = rng.uniform(lo, hi);
                    }
                }
            }
        }
    }
    Ok(embedding)
}

impl<T: Scalar> CnnModel<T> {
    /// Initializes a model: variant-dependent embeddings, fan-balanced
    /// uniform filters with zero biases, and a zero final layer.
    pub fn init(
        vocab: &Vocabulary,
        num_classes: usize,
        max_len: usize,
        cfg: &CnnConfig,
        pretrained: Option<&WordVectors<T>>,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        cfg.validate()?;
        if num_classes < 2 {
            return Err(Error::Config(format!(
                "need at least 2 classes, got {num_classes}"
            )));
        }
        if max_len == 0 {
            return Err(Error::Config("training set has no tokens".into()));
        }
        let dim = cfg.embedding_dim;
        let embedding =
            init_embeddings(vocab, cfg.variant, pretrained, dim, cfg.init_range, rng)?;
        let mut filters = Vec::with_capacity(cfg.filter_widths.len());
        for &width in &cfg.filter_widths {
            let fan_in = width * dim;
            let limit = (6.0 / (fan_in + cfg.feature_maps) as f64).sqrt();
            let (lo, hi) = (T::from_f64(-limit), T::from_f64(limit));
            let mut weights = Matrix::zeros(cfg.feature_maps, fan_in);
            for v in weights.data_mut() {
                *v = rng.uniform(lo, hi);
            }
            filters.push(FilterBank {
                width,
                weights,
                bias: vec![T::zero(); cfg.feature_maps],
            });
        }
        Ok(CnnModel {
            embedding,
            filters,
            fc_weight: Matrix::zeros(num_classes, cfg.total_maps()),
            fc_bias: vec![T::zero(); num_classes],
            max_len,
            num_classes,
        })
    }

    pub fn dim(&self) -> usize {
        self.embedding.cols()
    }

    pub fn max_width(&self) -> usize {
        self.filters.iter().map(|b| b.width).max().unwrap_or(1)
    }

    pub fn total_maps(&self) -> usize {
        self.filters.iter().map(|b| b.weights.rows()).sum()
    }

    pub fn padded_len(&self) -> usize {
        self.max_len + self.max_width() - 1
    }
}

/// Pre-activation feature maps for one flattened `positions x k` input:
/// returns `maps x (positions - width + 1)` where entry `(f, i)` is
/// `w_f . x_{i:i+width-1} + b_f`. Windows are contiguous slices of the
/// row-major input, so each feature is a plain dot product.
pub fn convolve<T: Scalar>(
    embedded: &[T],
    dim: usize,
    weights: &Matrix<T>,
    bias: &[T],
    width: usize,
) -> Matrix<T> {
    let padded_len = embedded.len() / dim;
    let positions = padded_len - width + 1;
    let maps = weights.rows();
    let mut out = Matrix::zeros(maps, positions);
    for i in 0..positions {
        let window = &embedded[i * dim..(i + width) * dim];
        for f in 0..maps {
            out.set(f, i, dot(weights.row(f), window) + bias[f]);
        }
    }
    out
}

/// Everything backward needs, cached per example.
#[derive(Clone, Debug)]
pub struct ForwardCache<T> {
    /// Flattened `padded_len x k` embedded inputs.
    pub embedded: Vec<Vec<T>>,
    /// Max-pool argmax position per penultimate feature.
    pub argmax: Vec<Vec<usize>>,
    /// Rectified pooled features before dropout.
    pub pooled: Vec<Vec<T>>,
    /// Penultimate vector after the (frozen) dropout mask.
    pub dropped: Vec<Vec<T>>,
    /// Whether masks were applied.
    pub training: bool,
}

/// Forward pass over an encoded batch. With `training`, dropout masks
/// from the batch scale the penultimate layer; at inference the layer
/// passes through unchanged.
pub fn forward<T: Scalar>(
    model: &CnnModel<T>,
    batch: &EncodedBatch<T>,
    training: bool,
) -> Result<(Matrix<T>, ForwardCache<T>)> {
    let padded_len = model.padded_len();
    let dim = model.dim();
    if model.max_width() > padded_len {
        return Err(Error::Config(format!(
            "filter width {} exceeds padded length {padded_len}",
            model.max_width()
        )));
    }
    let total_maps = model.total_maps();
    if model.fc_weight.cols() != total_maps || model.fc_weight.rows() != model.num_classes {
        return Err(Error::Config("final layer shape mismatch".into()));
    }

    let mut logits = Matrix::zeros(batch.len(), model.num_classes);
    let mut cache = ForwardCache {
        embedded: Vec::with_capacity(batch.len()),
        argmax: Vec::with_capacity(batch.len()),
        pooled: Vec::with_capacity(batch.len()),
        dropped: Vec::with_capacity(batch.len()),
        training,
    };

    for (e, row) in batch.rows.iter().enumerate() {
        if row.len() != padded_len {
            return Err(Error::Config(format!(
                "encoded row has {} slots, model expects {padded_len}",
                row.len()
            )));
        }
        let mut embedded = vec![T::zero(); padded_len * dim];
        for (pos, &id) in row.iter().enumerate() {
            embedded[pos * dim..(pos + 1) * dim]
                .copy_from_slice(model.embedding.row(id as usize));
        }

        let mut pooled = Vec::with_capacity(total_maps);
        let mut argmax = Vec::with_capacity(total_maps);
        for bank in &model.filters {
            let maps = convolve(&embedded, dim, &bank.weights, &bank.bias, bank.width);
            for f in 0..maps.rows() {
                let mut best = T::zero();
                let mut best_pos = 0usize;
                let mut found = false;
                for (i, &pre) in maps.row(f).iter().enumerate() {
                    let val = pre.max(T::zero()); // rectifier
                    if !found || val > best {
                        best = val;
                        best_pos = i;
                        found = true;
                    }
                }
                pooled.push(best);
                argmax.push(best_pos);
            }
        }

        let dropped: Vec<T> = match (&batch.masks, training) {
            (Some(masks), true) => pooled
                .iter()
                .zip(masks[e].iter())
                .map(|(&p, &m)| p * m)
                .collect(),
            _ => pooled.clone(),
        };

        for c in 0..model.num_classes {
            logits.set(e, c, dot(model.fc_weight.row(c), &dropped) + model.fc_bias[c]);
        }
        cache.embedded.push(embedded);
        cache.argmax.push(argmax);
        cache.pooled.push(pooled);
        cache.dropped.push(dropped);
    }
    Ok((logits, cache))
}

/// Mean cross-entropy over the batch plus `λ/2 (‖W‖² + ‖b‖²)` on the
/// final layer. Returns the scalar loss and the per-example softmax
/// probabilities.
pub fn batch_loss<T: Scalar>(
    logits: &Matrix<T>,
    labels: &[usize],
    model: &CnnModel<T>,
    lambda: f64,
) -> Result<(T, Matrix<T>)> {
    if logits.rows() == 0 || logits.rows() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} logit rows for {} labels",
            logits.rows(),
            labels.len()
        )));
    }
    let mut probs = Matrix::zeros(logits.rows(), logits.cols());
    let mut total = T::zero();
    for (e, &label) in labels.iter().enumerate() {
        let (loss, p) = softmax_cross_entropy(logits.row(e), label)?;
        total += loss;
        probs.row_mut(e).copy_from_slice(&p);
    }
    let mean = total / T::from_usize(labels.len());
    let half_lambda = T::from_f64(lambda * 0.5);
    let penalty = half_lambda
        * (model.fc_weight.squared_norm()
            + model.fc_bias.iter().map(|&b| b * b).sum::<T>());
    Ok((mean + penalty, probs))
}

/// Gradients for every trainable tensor. `embedding` maps touched row
/// ids to their gradient rows and is `None` for the static variant; the
/// padding row never appears.
#[derive(Clone, Debug)]
pub struct Gradients<T> {
    pub filters: Vec<(Matrix<T>, Vec<T>)>,
    pub fc_weight: Matrix<T>,
    pub fc_bias: Vec<T>,
    pub embedding: Option<BTreeMap<u32, Vec<T>>>,
}

impl<T: Scalar> Gradients<T> {
    fn zeros(model: &CnnModel<T>, train_embedding: bool) -> Self {
        Gradients {
            filters: model
                .filters
                .iter()
                .map(|b| {
                    (
                        Matrix::zeros(b.weights.rows(), b.weights.cols()),
                        vec![T::zero(); b.bias.len()],
                    )
                })
                .collect(),
            fc_weight: Matrix::zeros(model.fc_weight.rows(), model.fc_weight.cols()),
            fc_bias: vec![T::zero(); model.fc_bias.len()],
            embedding: train_embedding.then(BTreeMap::new),
        }
    }

    /// Elementwise accumulation; shapes must match.
    pub fn merge(&mut self, other: Gradients<T>) {
        for ((w, b), (ow, ob)) in self.filters.iter_mut().zip(other.filters) {
            for (x, y) in w.data_mut().iter_mut().zip(ow.data()) {
                *x += *y;
            }
            for (x, y) in b.iter_mut().zip(ob) {
                *x += y;
            }
        }
        for (x, y) in self.fc_weight.data_mut().iter_mut().zip(other.fc_weight.data()) {
            *x += *y;
        }
        for (x, y) in self.fc_bias.iter_mut().zip(other.fc_bias) {
            *x += y;
        }
        if let (Some(mine), Some(theirs)) = (&mut self.embedding, other.embedding) {
            for (id, row) in theirs {
                match mine.get_mut(&id) {
                    Some(acc) => {
                        for (x, y) in acc.iter_mut().zip(row) {
                            *x += y;
                        }
                    }
                    None => {
                        mine.insert(id, row);
                    }
                }
            }
        }
    }

    /// Multiplies every gradient by `s`.
    pub fn scale(&mut self, s: T) {
        for (w, b) in &mut self.filters {
            for x in w.data_mut() {
                *x *= s;
            }
            for x in b {
                *x *= s;
            }
        }
        for x in self.fc_weight.data_mut() {
            *x *= s;
        }
        for x in &mut self.fc_bias {
            *x *= s;
        }
        if let Some(rows) = &mut self.embedding {
            for row in rows.values_mut() {
                for x in row {
                    *x *= s;
                }
            }
        }
    }
}

/// Sum-convention backward pass (no 1/B factor, no l2 term); the public
/// [`backward`] and the batched trainer both finalize from this.
pub(crate) fn backward_sum<T: Scalar>(
    model: &CnnModel<T>,
    batch: &EncodedBatch<T>,
    cache: &ForwardCache<T>,
    probs: &Matrix<T>,
    train_embedding: bool,
) -> Result<Gradients<T>> {
    if cache.pooled.len() != batch.len()
        || probs.rows() != batch.len()
        || cache
            .pooled
            .first()
            .is_some_and(|p| p.len() != model.total_maps())
    {
        return Err(Error::InvalidInput(
            "internal: forward cache does not match model/batch".into(),
        ));
    }
    let dim = model.dim();
    let mut grads = Gradients::zeros(model, train_embedding);
    let mut dlogit = vec![T::zero(); model.num_classes];
    let mut dpooled = vec![T::zero(); model.total_maps()];

    for e in 0..batch.len() {
        for c in 0..model.num_classes {
            let target = if c == batch.labels[e] { T::one() } else { T::zero() };
            dlogit[c] = probs.get(e, c) - target;
        }
        // final layer
        for c in 0..model.num_classes {
            axpy(grads.fc_weight.row_mut(c), dlogit[c], &cache.dropped[e]);
            grads.fc_bias[c] += dlogit[c];
        }
        // into the penultimate vector, back through the dropout mask
        for (j, d) in dpooled.iter_mut().enumerate() {
            let mut acc = T::zero();
            for c in 0..model.num_classes {
                acc += model.fc_weight.get(c, j) * dlogit[c];
            }
            *d = acc;
        }
        if cache.training {
            if let Some(masks) = &batch.masks {
                for (d, &m) in dpooled.iter_mut().zip(masks[e].iter()) {
                    *d *= m;
                }
            }
        }
        // through max-pool and the rectifier into filters and embeddings
        let mut offset = 0usize;
        for (bank_idx, bank) in model.filters.iter().enumerate() {
            let maps = bank.weights.rows();
            for f in 0..maps {
                let j = offset + f;
                // gradient flows only where the pooled rectified value is
                // positive; at zero every map entry was clipped
                if cache.pooled[e][j] <= T::zero() {
                    continue;
                }
                let g = dpooled[j];
                if g == T::zero() {
                    continue;
                }
                let pos = cache.argmax[e][j];
                let window = &cache.embedded[e][pos * dim..(pos + bank.width) * dim];
                let (fw, fb) = &mut grads.filters[bank_idx];
                axpy(fw.row_mut(f), g, window);
                fb[f] += g;
                if let Some(rows) = &mut grads.embedding {
                    let weights_row = bank.weights.row(f);
                    for r in 0..bank.width {
                        let id = batch.rows[e][pos + r];
                        if id == PAD_ID {
                            continue; // padding row is frozen at zero
                        }
                        let acc = rows
                            .entry(id)
                            .or_insert_with(|| vec![T::zero(); dim]);
                        axpy(acc, g, &weights_row[r * dim..(r + 1) * dim]);
                    }
                }
            }
            offset += maps;
        }
    }
    Ok(grads)
}

/// Gradients of [`batch_loss`] for all trainable tensors: mean-scaled
/// cross-entropy terms plus the l2 contribution on the final layer.
/// The static variant passes `train_embedding = false` and gets no
/// embedding gradient.
pub fn backward<T: Scalar>(
    model: &CnnModel<T>,
    batch: &EncodedBatch<T>,
    cache: &ForwardCache<T>,
    probs: &Matrix<T>,
    train_embedding: bool,
    lambda: f64,
) -> Result<Gradients<T>> {
    let mut grads = backward_sum(model, batch, cache, probs, train_embedding)?;
    grads.scale(T::one() / T::from_usize(batch.len()));
    let lam = T::from_f64(lambda);
    for (x, &w) in grads.fc_weight.data_mut().iter_mut().zip(model.fc_weight.data()) {
        *x += lam * w;
    }
    for (x, &b) in grads.fc_bias.iter_mut().zip(model.fc_bias.iter()) {
        *x += lam * b;
    }
    Ok(grads)
}
