//! Noise distribution for negative sampling.

use crate::error::{Error, Result};
use crate::numerics::rng::SeededRng;
use crate::text::vocab::Vocabulary;

/// Cumulative distribution over vocabulary ids with probabilities
/// proportional to `count^alpha`. Padding and unknown ids never appear.
#[derive(Clone, Debug)]
pub struct NoiseTable {
    ids: Vec<u32>,
    cdf: Vec<f64>,
}

impl NoiseTable {
    pub fn build(vocab: &Vocabulary, alpha: f64) -> Result<Self> {
        let mut ids = Vec::new();
        let mut weights = Vec::new();
        for (id, count) in vocab.word_ids() {
            if count > 0 {
                ids.push(id);
                weights.push((count as f64).powf(alpha));
            }
        }
        let total: f64 = weights.iter().sum();
        if ids.is_empty() || total <= 0.0 {
            return Err(Error::InvalidInput(
                "noise table needs at least one word with a nonzero count".into(),
            ));
        }
        let mut cdf = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w / total;
            cdf.push(acc);
        }
        *cdf.last_mut().unwrap() = 1.0;
        Ok(NoiseTable { ids, cdf })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Exact probability mass of the i-th table entry.
    pub fn prob(&self, i: usize) -> f64 {
        let prev = if i == 0 { 0.0 } else { self.cdf[i - 1] };
        self.cdf[i] - prev
    }

    pub fn id(&self, i: usize) -> u32 {
        self.ids[i]
    }

    pub fn sample(&self, rng: &mut SeededRng) -> u32 {
        let u = rng.unit_f64();
        let pos = self.cdf.partition_point(|&c| c <= u);
        self.ids[pos.min(self.ids.len() - 1)]
    }
}
