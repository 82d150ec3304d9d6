//! Skip-gram training with negative sampling.
//!
//! A pair `(center, context)` contributes the loss
//! `-[ln σ(v'_ctx · v_center) + Σ_neg ln σ(-v'_neg · v_center)]`
//! where `v` rows live in the input matrix (indexed by the center word)
//! and `v'` rows in the output matrix (context and noise words). Rows are
//! updated by plain SGD; only the touched rows move.

use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use crate::embeddings::noise::NoiseTable;
use crate::embeddings::pairs::{count_pairs, generate_pairs, subsample_tokens};
use crate::embeddings::vectors::WordVectors;
use crate::error::{Error, Result};
use crate::numerics::matrix::{axpy, dot, Matrix};
use crate::numerics::ops::{log_sigmoid, sigmoid};
use crate::numerics::rng::SeededRng;
use crate::numerics::scalar::Scalar;
use crate::text::vocab::{Vocabulary, RESERVED};

/// Hyperparameters for skip-gram negative-sampling training.
#[derive(Clone, Debug)]
pub struct SgnsConfig {
    /// Vector dimension k.
    pub dim: usize,
    /// Context window c: pairs use offsets 1..=c on both sides.
    pub window: usize,
    /// Negative samples per observed pair.
    pub negatives: usize,
    pub epochs: usize,
    /// Initial SGD learning rate; decays linearly to 1e-4 of itself over
    /// the total pair count.
    pub initial_lr: f64,
    /// Tokens with fewer occurrences are dropped from the corpus.
    pub min_count: u64,
    /// Frequency-subsampling threshold t; 0 disables.
    pub subsample: f64,
    /// Noise distribution exponent over unigram counts.
    pub noise_alpha: f64,
    pub seed: u64,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        SgnsConfig {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            min_count: 5,
            subsample: 0.0,
            noise_alpha: 0.75,
            seed: 1,
        }
    }
}

impl SgnsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidInput("dimension must be >= 2".into()));
        }
        if self.window < 1 {
            return Err(Error::InvalidInput("window must be >= 1".into()));
        }
        if self.negatives < 1 {
            return Err(Error::InvalidInput("negatives must be >= 1".into()));
        }
        if self.initial_lr <= 0.0 {
            return Err(Error::InvalidInput("learning rate must be positive".into()));
        }
        Ok(())
    }
}

/// Paired input/output embedding matrices.
#[derive(Clone, Debug)]
pub struct SkipGramModel<T> {
    pub input: Matrix<T>,
    pub output: Matrix<T>,
}

impl<T: Scalar> SkipGramModel<T> {
    /// Input rows uniform in [-0.5/k, 0.5/k], output rows zero; the
    /// reserved padding/unknown rows stay zero on both sides.
    pub fn init(vocab_len: usize, dim: usize, rng: &mut SeededRng) -> Self {
        let mut input = Matrix::zeros(vocab_len, dim);
        let half = 0.5 / dim as f64;
        for r in RESERVED..vocab_len {
            for v in input.row_mut(r) {
                *v = rng.uniform(T::from_f64(-half), T::from_f64(half));
            }
        }
        SkipGramModel {
            input,
            output: Matrix::zeros(vocab_len, dim),
        }
    }

    /// One SGD step on a single (center, context) pair with the given
    /// negatives. Returns the pre-update loss. Negatives must exclude the
    /// true context id.
    pub fn step(&mut self, center: u32, context: u32, negatives: &[u32], lr: T) -> Result<T> {
        debug_assert!(!negatives.contains(&context));
        let dim = self.input.cols();
        let center_row = center as usize;

        let pos_score = dot(self.input.row(center_row), self.output.row(context as usize));
        if !pos_score.is_finite() {
            return Err(Error::NumericFault(format!(
                "non-finite dot product for pair ({center}, {context})"
            )));
        }
        let mut loss = -log_sigmoid(pos_score);
        // dL/ds for the observed pair
        let pos_grad = sigmoid(pos_score) - T::one();

        let mut center_grad = vec![T::zero(); dim];
        axpy(&mut center_grad, pos_grad, self.output.row(context as usize));
        let mut out_updates: Vec<(usize, T)> = Vec::with_capacity(1 + negatives.len());
        out_updates.push((context as usize, pos_grad));

        for &neg in negatives {
            let neg_row = neg as usize;
            let score = dot(self.input.row(center_row), self.output.row(neg_row));
            if !score.is_finite() {
                return Err(Error::NumericFault(format!(
                    "non-finite dot product for negative {neg}"
                )));
            }
            loss -= log_sigmoid(-score);
            let g = sigmoid(score); // dL/ds for a noise pair
            axpy(&mut center_grad, g, self.output.row(neg_row));
            out_updates.push((neg_row, g));
        }

        // All gradients derive from pre-update rows; apply afterwards.
        let center_vals: Vec<T> = self.input.row(center_row).to_vec();
        for (row, g) in out_updates {
            axpy(self.output.row_mut(row), -lr * g, &center_vals);
        }
        axpy(self.input.row_mut(center_row), -lr, &center_grad);
        Ok(loss)
    }
}

/// Result of a training run: exported vectors (the input-side matrix for
/// real words) plus the mean loss per epoch.
#[derive(Clone, Debug)]
pub struct SgnsOutcome<T: Scalar> {
    pub vectors: WordVectors<T>,
    pub epoch_losses: Vec<f64>,
    pub model: SkipGramModel<T>,
}

/// Drops out-of-vocabulary tokens and encodes the remainder, mirroring
/// the usual treatment of words below the count threshold.
pub fn encode_corpus(token_seqs: &[Vec<String>], vocab: &Vocabulary) -> Vec<Vec<u32>> {
    token_seqs
        .iter()
        .map(|seq| seq.iter().filter_map(|t| vocab.id_of(t)).collect())
        .collect()
}

/// Deterministic single-threaded trainer: a fixed seed fixes every draw,
/// so two runs produce bitwise-identical vectors.
pub fn train_sgns<T: Scalar>(
    sentences: &[Vec<u32>],
    vocab: &Vocabulary,
    cfg: &SgnsConfig,
) -> Result<SgnsOutcome<T>> {
    cfg.validate()?;
    let total_tokens: u64 = sentences.iter().map(|s| s.len() as u64).sum();
    if total_tokens == 0 {
        return Err(Error::InvalidInput(
            "empty corpus after min-count filtering".into(),
        ));
    }
    let noise = NoiseTable::build(vocab, cfg.noise_alpha)?;
    let mut rng = SeededRng::new(cfg.seed);
    let mut model = SkipGramModel::init(vocab.len(), cfg.dim, &mut rng);

    let pairs_per_epoch: u64 = sentences
        .iter()
        .map(|s| count_pairs(s.len(), cfg.window))
        .sum();
    let total_pairs = (pairs_per_epoch * cfg.epochs as u64).max(1);

    let mut processed: u64 = 0;
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut negatives = Vec::with_capacity(cfg.negatives);
    for _epoch in 0..cfg.epochs {
        let mut loss_sum = 0.0f64;
        let mut loss_count = 0u64;
        for sentence in sentences {
            let kept = subsample_tokens(sentence, vocab, cfg.subsample, &mut rng);
            for (center, context) in generate_pairs(&kept, cfg.window) {
                let progress = processed as f64 / total_pairs as f64;
                let lr = cfg.initial_lr * (1.0 - progress).max(1e-4);
                processed += 1;
                draw_negatives(&noise, context, cfg.negatives, &mut rng, &mut negatives);
                let loss = model.step(center, context, &negatives, T::from_f64(lr))?;
                loss_sum += loss.into_f64();
                loss_count += 1;
            }
        }
        epoch_losses.push(if loss_count > 0 {
            loss_sum / loss_count as f64
        } else {
            0.0
        });
    }

    let vectors = WordVectors::from_vocab(vocab, &model.input)?;
    Ok(SgnsOutcome {
        vectors,
        epoch_losses,
        model,
    })
}

/// Samples negatives, redrawing any that equal the true context id.
fn draw_negatives(
    noise: &NoiseTable,
    context: u32,
    k: usize,
    rng: &mut SeededRng,
    out: &mut Vec<u32>,
) {
    out.clear();
    for _ in 0..k {
        for _attempt in 0..100 {
            let id = noise.sample(rng);
            if id != context {
                out.push(id);
                break;
            }
        }
    }
}

/// Lock-free multi-worker trainer (f32 only). Workers update shared rows
/// without coordination, so lost updates are possible and results are
/// nondeterministic; the trained vectors still satisfy the same quality
/// properties as the deterministic mode.
pub fn train_sgns_parallel(
    sentences: &[Vec<u32>],
    vocab: &Vocabulary,
    cfg: &SgnsConfig,
    workers: usize,
) -> Result<SgnsOutcome<f32>> {
    if workers <= 1 {
        return train_sgns::<f32>(sentences, vocab, cfg);
    }
    cfg.validate()?;
    let total_tokens: u64 = sentences.iter().map(|s| s.len() as u64).sum();
    if total_tokens == 0 {
        return Err(Error::InvalidInput(
            "empty corpus after min-count filtering".into(),
        ));
    }
    let noise = NoiseTable::build(vocab, cfg.noise_alpha)?;
    let mut rng = SeededRng::new(cfg.seed);
    let init = SkipGramModel::<f32>::init(vocab.len(), cfg.dim, &mut rng);

    let input = AtomicMatrix::from_matrix(&init.input);
    let output = AtomicMatrix::from_matrix(&init.output);
    let pairs_per_epoch: u64 = sentences
        .iter()
        .map(|s| count_pairs(s.len(), cfg.window))
        .sum();
    let total_pairs = (pairs_per_epoch * cfg.epochs as u64).max(1);
    let processed = AtomicU64::new(0);

    // Per-worker per-epoch (loss sum, pair count), merged after the join.
    let per_worker: Vec<(Vec<f64>, Vec<u64>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let input = &input;
                let output = &output;
                let noise = &noise;
                let processed = &processed;
                let master = rng.derive(w as u64 + 1);
                scope.spawn(move || {
                    worker_loop(
                        sentences, vocab, cfg, w, workers, input, output, noise, processed,
                        total_pairs, master,
                    )
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    let mut epoch_losses = vec![0.0f64; cfg.epochs];
    let mut epoch_counts = vec![0u64; cfg.epochs];
    for (sums, counts) in per_worker {
        for e in 0..cfg.epochs {
            epoch_losses[e] += sums[e];
            epoch_counts[e] += counts[e];
        }
    }
    for e in 0..cfg.epochs {
        if epoch_counts[e] > 0 {
            epoch_losses[e] /= epoch_counts[e] as f64;
        }
    }

    let model = SkipGramModel {
        input: input.into_matrix(),
        output: output.into_matrix(),
    };
    let vectors = WordVectors::from_vocab(vocab, &model.input)?;
    Ok(SgnsOutcome {
        vectors,
        epoch_losses,
        model,
    })
}

#[allow(clippy::too_many_arguments)]
fn worker_loop(
    sentences: &[Vec<u32>],
    vocab: &Vocabulary,
    cfg: &SgnsConfig,
    worker: usize,
    workers: usize,
    input: &AtomicMatrix,
    output: &AtomicMatrix,
    noise: &NoiseTable,
    processed: &AtomicU64,
    total_pairs: u64,
    mut rng: SeededRng,
) -> (Vec<f64>, Vec<u64>) {
    let dim = cfg.dim;
    let mut center_buf = vec![0.0f32; dim];
    let mut ctx_buf = vec![0.0f32; dim];
    let mut center_grad = vec![0.0f32; dim];
    let mut negatives = Vec::with_capacity(cfg.negatives);
    let mut loss_sums = vec![0.0f64; cfg.epochs];
    let mut counts = vec![0u64; cfg.epochs];

    for epoch in 0..cfg.epochs {
        for sentence in sentences.iter().skip(worker).step_by(workers) {
            let kept = subsample_tokens(sentence, vocab, cfg.subsample, &mut rng);
            for (center, context) in generate_pairs(&kept, cfg.window) {
                let done = processed.fetch_add(1, Ordering::Relaxed);
                let lr =
                    (cfg.initial_lr * (1.0 - done as f64 / total_pairs as f64).max(1e-4)) as f32;
                draw_negatives(noise, context, cfg.negatives, &mut rng, &mut negatives);

                input.load_row(center as usize, &mut center_buf);
                center_grad.fill(0.0);
                let mut loss = 0.0f64;

                output.load_row(context as usize, &mut ctx_buf);
                let s = dot(&center_buf, &ctx_buf);
                loss -= log_sigmoid(s) as f64;
                let g = sigmoid(s) - 1.0;
                axpy(&mut center_grad, g, &ctx_buf);
                output.add_row(context as usize, -lr * g, &center_buf);

                for &neg in &negatives {
                    output.load_row(neg as usize, &mut ctx_buf);
                    let s = dot(&center_buf, &ctx_buf);
                    loss -= log_sigmoid(-s) as f64;
                    let g = sigmoid(s);
                    axpy(&mut center_grad, g, &ctx_buf);
                    output.add_row(neg as usize, -lr * g, &center_buf);
                }
                input.add_row(center as usize, -lr, &center_grad);
                loss_sums[epoch] += loss;
                counts[epoch] += 1;
            }
        }
    }
    (loss_sums, counts)
}

/// f32 matrix with relaxed-atomic elements for hogwild-style updates.
struct AtomicMatrix {
    rows: usize,
    cols: usize,
    data: Vec<AtomicU32>,
}

impl AtomicMatrix {
    fn from_matrix(m: &Matrix<f32>) -> Self {
        AtomicMatrix {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|v| AtomicU32::new(v.to_bits())).collect(),
        }
    }

    fn into_matrix(self) -> Matrix<f32> {
        let data: Vec<f32> = self
            .data
            .into_iter()
            .map(|a| f32::from_bits(a.into_inner()))
            .collect();
        Matrix::from_vec(self.rows, self.cols, data).expect("shape preserved")
    }

    fn load_row(&self, r: usize, buf: &mut [f32]) {
        let base = r * self.cols;
        for (i, v) in buf.iter_mut().enumerate() {
            *v = f32::from_bits(self.data[base + i].load(Ordering::Relaxed));
        }
    }

    /// `row += scale * src` without locking; concurrent writers may lose
    /// updates, which hogwild training tolerates.
    fn add_row(&self, r: usize, scale: f32, src: &[f32]) {
        let base = r * self.cols;
        for (i, &s) in src.iter().enumerate() {
            let cell = &self.data[base + i];
            let old = f32::from_bits(cell.load(Ordering::Relaxed));
            cell.store((old + scale * s).to_bits(), Ordering::Relaxed);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gradcheck::finite_diff_check;
    use std::collections::HashMap;

    fn toy_vocab(n: usize) -> Vocabulary {
        let counts: HashMap<String, u64> =
            (0..n).map(|i| (format!("w{i}"), 10 + i as u64)).collect();
        Vocabulary::from_counts(counts, 1).unwrap()
    }

    #[test]
    fn zero_vectors_give_uniform_loss() {
        let vocab = toy_vocab(8);
        let mut model = SkipGramModel::<f64> {
            input: Matrix::zeros(vocab.len(), 4),
            output: Matrix::zeros(vocab.len(), 4),
        };
        let loss = model.step(2, 3, &[4, 5, 6, 7, 8], 0.0).unwrap();
        // σ(0) = 0.5 in all six terms -> 6 ln 2
        assert!((loss - 6.0 * std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn loss_is_nonnegative() {
        let vocab = toy_vocab(6);
        let mut rng = SeededRng::new(3);
        let mut model = SkipGramModel::<f64>::init(vocab.len(), 5, &mut rng);
        for v in model.input.data_mut() {
            *v = rng.uniform(-2.0, 2.0);
        }
        for v in model.output.data_mut() {
            *v = rng.uniform(-2.0, 2.0);
        }
        for _ in 0..50 {
            let loss = model.step(2, 3, &[4, 5], 0.01).unwrap();
            assert!(loss >= 0.0);
        }
    }

    #[test]
    fn repeated_pair_loss_strictly_decreases() {
        let vocab = toy_vocab(6);
        let mut rng = SeededRng::new(5);
        let mut model = SkipGramModel::<f64>::init(vocab.len(), 8, &mut rng);
        let negs = [4u32, 5, 6];
        let first = model.step(2, 3, &negs, 0.05).unwrap();
        let second = model.step(2, 3, &negs, 0.05).unwrap();
        assert!(
            second < first,
            "loss did not decrease: {first} -> {second}"
        );
    }

    #[test]
    fn center_gradient_matches_finite_differences() {
        // Check d loss / d input[center] against the oracle at f64.
        let vocab = toy_vocab(8);
        let dim = 6;
        let mut rng = SeededRng::new(11);
        let mut base = SkipGramModel::<f64>::init(vocab.len(), dim, &mut rng);
        for v in base.output.data_mut() {
            *v = rng.uniform(-0.8, 0.8);
        }
        for v in base.input.data_mut() {
            *v = rng.uniform(-0.8, 0.8);
        }
        let (center, context, negs) = (2u32, 3u32, vec![4u32, 5, 6, 7, 8]);

        // analytic gradient of the center row: (σ(s+)-1)·v'_ctx + Σ σ(s-)·v'_neg
        let s_pos = dot(base.input.row(center as usize), base.output.row(context as usize));
        let mut analytic_row = vec![0.0f64; dim];
        axpy(&mut analytic_row, sigmoid(s_pos) - 1.0, base.output.row(context as usize));
        for &n in &negs {
            let s = dot(base.input.row(center as usize), base.output.row(n as usize));
            axpy(&mut analytic_row, sigmoid(s), base.output.row(n as usize));
        }
        let analytic = Matrix::from_vec(1, dim, analytic_row).unwrap();
        let param = Matrix::from_vec(1, dim, base.input.row(center as usize).to_vec()).unwrap();

        let loss_fn = |p: &Matrix<f64>| {
            let mut m = base.clone();
            m.input.row_mut(center as usize).copy_from_slice(p.row(0));
            // evaluate the loss without stepping: lr = 0
            m.step(center, context, &negs, 0.0).unwrap()
        };
        let err = finite_diff_check(loss_fn, &param, &analytic, 1e-5).unwrap();
        assert!(err < 1e-6, "relative error {err}");
    }

    fn two_cluster_corpus(rng: &mut SeededRng) -> Vec<Vec<String>> {
        // words within a cluster co-occur, never across
        let clusters: [&[&str]; 2] = [
            &["ape", "bear", "cat", "dog", "elk"],
            &["iron", "jade", "kelp", "lead", "mica"],
        ];
        let mut sentences = Vec::new();
        for s in 0..240 {
            let cluster = clusters[s % 2];
            let sentence: Vec<String> = (0..12)
                .map(|_| cluster[rng.below(cluster.len())].to_string())
                .collect();
            sentences.push(sentence);
        }
        sentences
    }

    fn cluster_separation(vectors: &WordVectors<f32>) -> (f64, f64) {
        use crate::embeddings::vectors::cosine_similarity;
        let cluster_a = ["ape", "bear", "cat", "dog", "elk"];
        let cluster_b = ["iron", "jade", "kelp", "lead", "mica"];
        let mut within = Vec::new();
        let mut across = Vec::new();
        let all: Vec<&str> = cluster_a.iter().chain(cluster_b.iter()).copied().collect();
        for (i, &a) in all.iter().enumerate() {
            for &b in all.iter().skip(i + 1) {
                let va = vectors.get(a).unwrap();
                let vb = vectors.get(b).unwrap();
                let cos = cosine_similarity(va, vb).unwrap() as f64;
                let same = cluster_a.contains(&a) == cluster_a.contains(&b);
                if same {
                    within.push(cos);
                } else {
                    across.push(cos);
                }
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        (mean(&within), mean(&across))
    }

    #[test]
    fn two_cluster_corpus_separates() {
        let mut rng = SeededRng::new(123);
        let sentences = two_cluster_corpus(&mut rng);
        let vocab = crate::text::vocab::build_vocab(
            sentences.iter().map(|s| s.as_slice()),
            1,
        )
        .unwrap();
        let corpus = encode_corpus(&sentences, &vocab);
        let cfg = SgnsConfig {
            dim: 16,
            window: 3,
            epochs: 5,
            min_count: 1,
            seed: 9,
            ..SgnsConfig::default()
        };
        let outcome = train_sgns::<f32>(&corpus, &vocab, &cfg).unwrap();
        let (within, across) = cluster_separation(&outcome.vectors);
        assert!(
            within - across > 0.2,
            "within {within:.3} vs across {across:.3}"
        );
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let vocab = toy_vocab(5);
        let corpus = vec![vec![2u32, 3, 4, 5, 6]];
        let cfg = SgnsConfig {
            dim: 4,
            epochs: 0,
            min_count: 1,
            seed: 17,
            ..SgnsConfig::default()
        };
        let outcome = train_sgns::<f64>(&corpus, &vocab, &cfg).unwrap();
        let mut rng = SeededRng::new(17);
        let reference = SkipGramModel::<f64>::init(vocab.len(), 4, &mut rng);
        assert_eq!(outcome.model.input, reference.input);
        assert!(outcome.epoch_losses.is_empty());
    }

    #[test]
    fn fixed_seed_is_bitwise_reproducible() {
        let vocab = toy_vocab(6);
        let corpus = vec![vec![2u32, 3, 4, 5, 6, 7], vec![3, 5, 7, 2, 4, 6]];
        let cfg = SgnsConfig {
            dim: 8,
            window: 2,
            epochs: 3,
            min_count: 1,
            seed: 31,
            ..SgnsConfig::default()
        };
        let a = train_sgns::<f32>(&corpus, &vocab, &cfg).unwrap();
        let b = train_sgns::<f32>(&corpus, &vocab, &cfg).unwrap();
        assert_eq!(a.model.input, b.model.input);
        assert_eq!(a.model.output, b.model.output);
        assert_eq!(a.epoch_losses, b.epoch_losses);
    }

    #[test]
    fn empty_corpus_is_rejected() {
        let vocab = toy_vocab(3);
        let corpus: Vec<Vec<u32>> = vec![vec![], vec![]];
        assert!(train_sgns::<f32>(&corpus, &vocab, &SgnsConfig::default()).is_err());
    }

    #[test]
    fn parallel_mode_separates_clusters_too() {
        let mut rng = SeededRng::new(321);
        let sentences = two_cluster_corpus(&mut rng);
        let vocab = crate::text::vocab::build_vocab(
            sentences.iter().map(|s| s.as_slice()),
            1,
        )
        .unwrap();
        let corpus = encode_corpus(&sentences, &vocab);
        let cfg = SgnsConfig {
            dim: 16,
            window: 3,
            epochs: 5,
            min_count: 1,
            seed: 77,
            ..SgnsConfig::default()
        };
        let outcome = train_sgns_parallel(&corpus, &vocab, &cfg, 2).unwrap();
        let (within, across) = cluster_separation(&outcome.vectors);
        assert!(
            within - across > 0.2,
            "within {within:.3} vs across {across:.3}"
        );
    }
}
