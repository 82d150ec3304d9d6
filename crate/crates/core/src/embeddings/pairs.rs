//! Skip-gram training-pair generation.

use crate::numerics::rng::SeededRng;
use crate::text::vocab::Vocabulary;

/// Probability of keeping a token under frequency subsampling with
/// threshold `t` (the word2vec convention): `sqrt(K/f) + K/f` with
/// `K = t * total`, capped at 1.
pub fn subsample_keep_prob(count: u64, total: u64, t: f64) -> f64 {
    if t <= 0.0 || count == 0 {
        return 1.0;
    }
    let k = t * total as f64;
    let f = count as f64;
    ((k / f).sqrt() + k / f).min(1.0)
}

/// Drops frequent tokens from a sequence before pairing. With `t == 0`
/// the sequence is returned unchanged.
pub fn subsample_tokens(
    ids: &[u32],
    vocab: &Vocabulary,
    t: f64,
    rng: &mut SeededRng,
) -> Vec<u32> {
    if t <= 0.0 {
        return ids.to_vec();
    }
    let total = vocab.total_word_count();
    ids.iter()
        .copied()
        .filter(|&id| {
            let keep = subsample_keep_prob(vocab.count_of(id), total, t);
            keep >= 1.0 || rng.unit_f64() < keep
        })
        .collect()
}

/// All `(center, context)` pairs `(w_t, w_{t+j})` for `-c <= j <= c`,
/// `j != 0`, staying in range. Sequences shorter than two yield nothing.
pub fn generate_pairs(ids: &[u32], window: usize) -> Vec<(u32, u32)> {
    let mut pairs = Vec::with_capacity(ids.len() * 2 * window);
    for t in 0..ids.len() {
        let start = t.saturating_sub(window);
        let end = (t + window + 1).min(ids.len());
        for j in start..end {
            if j != t {
                pairs.push((ids[t], ids[j]));
            }
        }
    }
    pairs
}

/// Number of pairs [`generate_pairs`] yields for a sequence of `len`
/// tokens, without materializing them.
pub fn count_pairs(len: usize, window: usize) -> u64 {
    let mut count = 0u64;
    for t in 0..len {
        count += t.min(window) as u64 + (len - 1 - t).min(window) as u64;
    }
    count
}
