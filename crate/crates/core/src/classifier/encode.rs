//! Batch encoding: padding and dropout masks.

use crate::error::{Error, Result};
use crate::numerics::rng::SeededRng;
use crate::numerics::scalar::Scalar;
use crate::text::dataset::Example;
use crate::text::vocab::PAD_ID;

/// Sentences padded to a fixed geometry: `max_width - 1` padding ids on
/// the left, then the sentence, then right padding up to
/// `n + max_width - 1` slots. Masks, when present, carry inverted-dropout
/// scaling: entries are 0 or 1/(1-p).
#[derive(Clone, Debug)]
pub struct EncodedBatch<T> {
    pub rows: Vec<Vec<u32>>,
    pub labels: Vec<usize>,
    pub masks: Option<Vec<Vec<T>>>,
}

impl<T> EncodedBatch<T> {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Pads each example to `n + max_width - 1` slots. Sentences longer than
/// `n` (possible in cross-validation test folds) are truncated to their
/// first `n` tokens with a warning.
pub fn encode_batch<T: Scalar>(
    examples: &[&Example],
    n: usize,
    max_width: usize,
) -> Result<EncodedBatch<T>> {
    if examples.is_empty() {
        return Err(Error::InvalidInput("empty batch".into()));
    }
    let left = max_width - 1;
    let total = n + max_width - 1;
    let mut rows = Vec::with_capacity(examples.len());
    let mut labels = Vec::with_capacity(examples.len());
    let mut truncated = 0usize;
    for ex in examples {
        if ex.ids.is_empty() {
            return Err(Error::InvalidInput("example with no tokens".into()));
        }
        let mut ids = ex.ids.as_slice();
        if ids.len() > n {
            ids = &ids[..n];
            truncated += 1;
        }
        let mut row = Vec::with_capacity(total);
        row.resize(left, PAD_ID);
        row.extend_from_slice(ids);
        row.resize(total, PAD_ID);
        rows.push(row);
        labels.push(ex.label);
    }
    if truncated > 0 {
        log::warn!("truncated {truncated} sentences longer than n={n} tokens");
    }
    Ok(EncodedBatch {
        rows,
        labels,
        masks: None,
    })
}

/// Draws one inverted-dropout mask per example over the penultimate
/// features. Mask entries are 1/(1-p) with probability 1-p and 0
/// otherwise; with `p == 0` masks are omitted entirely.
pub fn attach_dropout_masks<T: Scalar>(
    batch: &mut EncodedBatch<T>,
    total_maps: usize,
    dropout: f64,
    rng: &mut SeededRng,
) {
    if dropout <= 0.0 {
        batch.masks = None;
        return;
    }
    let keep = 1.0 - dropout;
    let scale = T::from_f64(1.0 / keep);
    let masks = batch
        .rows
        .iter()
        .map(|_| {
            (0..total_maps)
                .map(|_| if rng.bernoulli(keep) { scale } else { T::zero() })
                .collect()
        })
        .collect();
    batch.masks = Some(masks);
}
