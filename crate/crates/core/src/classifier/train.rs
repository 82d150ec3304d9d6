//! Mini-batch training, evaluation, and cross-validation for the
//! convolutional classifier.

use rayon::prelude::*;

use crate::classifier::config::CnnConfig;
use crate::classifier::encode::{encode_batch, EncodedBatch};
use crate::classifier::model::{backward_sum, forward, CnnModel, Gradients};
use crate::embeddings::vectors::WordVectors;
use crate::error::{Error, Result};
use crate::numerics::adam::{adam_step, adam_step_rows, AdamState};
use crate::numerics::matrix::Matrix;
use crate::numerics::ops::softmax_cross_entropy;
use crate::numerics::rng::SeededRng;
use crate::numerics::scalar::Scalar;
use crate::text::dataset::{Dataset, Example};
use crate::text::split::kfold_split;
use crate::text::vocab::Vocabulary;

/// Work is split into fixed-size chunks whose partial gradients reduce
/// in chunk order, so results are bitwise identical whether chunks run
/// serially or in parallel.
const CHUNK: usize = 10;

#[derive(Clone, Debug)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_accuracy: f64,
    pub test_loss: Option<f64>,
    pub test_accuracy: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome<T: Scalar> {
    pub model: CnnModel<T>,
    pub metrics: Vec<EpochMetrics>,
}

#[derive(Clone, Debug)]
pub struct EvalReport {
    pub accuracy: f64,
    pub mean_loss: f64,
    /// `confusion[true_class][predicted_class]`.
    pub confusion: Vec<Vec<usize>>,
}

/// Optimizer state for every trainable tensor.
struct Optimizer<T> {
    filters: Vec<(AdamState<T>, AdamState<T>)>,
    fc_weight: AdamState<T>,
    fc_bias: AdamState<T>,
    embedding: Option<AdamState<T>>,
}

impl<T: Scalar> Optimizer<T> {
    fn new(model: &CnnModel<T>, train_embedding: bool) -> Self {
        Optimizer {
            filters: model
                .filters
                .iter()
                .map(|b| {
                    (
                        AdamState::new(b.weights.rows(), b.weights.cols()),
                        AdamState::new(1, b.bias.len()),
                    )
                })
                .collect(),
            fc_weight: AdamState::new(model.fc_weight.rows(), model.fc_weight.cols()),
            fc_bias: AdamState::new(1, model.fc_bias.len()),
            embedding: train_embedding
                .then(|| AdamState::new(model.embedding.rows(), model.embedding.cols())),
        }
    }

    fn apply(&mut self, model: &mut CnnModel<T>, grads: &Gradients<T>, lr: T) -> Result<()> {
        for ((bank, (gw, gb)), (sw, sb)) in model
            .filters
            .iter_mut()
            .zip(grads.filters.iter())
            .zip(self.filters.iter_mut())
        {
            adam_step(&mut bank.weights, gw, sw, lr)?;
            step_slice(&mut bank.bias, gb, sb, lr)?;
        }
        adam_step(&mut model.fc_weight, &grads.fc_weight, &mut self.fc_weight, lr)?;
        step_slice(&mut model.fc_bias, &grads.fc_bias, &mut self.fc_bias, lr)?;
        if let (Some(state), Some(rows)) = (&mut self.embedding, &grads.embedding) {
            let rows: Vec<(usize, Vec<T>)> = rows
                .iter()
                .map(|(&id, g)| (id as usize, g.clone()))
                .collect();
            adam_step_rows(&mut model.embedding, &rows, state, lr)?;
        }
        Ok(())
    }
}

/// Adam over a bias vector, viewed as a 1 x n matrix.
fn step_slice<T: Scalar>(
    param: &mut [T],
    grad: &[T],
    state: &mut AdamState<T>,
    lr: T,
) -> Result<()> {
    let mut p = Matrix::from_vec(1, param.len(), param.to_vec())?;
    let g = Matrix::from_vec(1, grad.len(), grad.to_vec())?;
    adam_step(&mut p, &g, state, lr)?;
    param.copy_from_slice(p.row(0));
    Ok(())
}

/// Argmax prediction with ties broken toward the lowest class index.
pub fn predict_row<T: Scalar>(logits: &[T]) -> usize {
    let mut best = 0usize;
    for (c, &v) in logits.iter().enumerate().skip(1) {
        if v > logits[best] {
            best = c;
        }
    }
    best
}

struct ChunkResult<T> {
    grads: Gradients<T>,
    loss_sum: f64,
    correct: usize,
}

/// Forward/backward over one fixed chunk with the masks already frozen.
fn run_chunk<T: Scalar>(
    model: &CnnModel<T>,
    examples: &[&Example],
    masks: Option<&[Vec<T>]>,
    train_embedding: bool,
) -> Result<ChunkResult<T>> {
    let mut batch: EncodedBatch<T> = encode_batch(examples, model.max_len, model.max_width())?;
    batch.masks = masks.map(|m| m.to_vec());
    let (logits, cache) = forward(model, &batch, true)?;
    let mut probs = Matrix::zeros(logits.rows(), logits.cols());
    let mut loss_sum = 0.0f64;
    let mut correct = 0usize;
    for e in 0..batch.len() {
        let (loss, p) = softmax_cross_entropy(logits.row(e), batch.labels[e])?;
        loss_sum += loss.into_f64();
        if predict_row(logits.row(e)) == batch.labels[e] {
            correct += 1;
        }
        probs.row_mut(e).copy_from_slice(&p);
    }
    let grads = backward_sum(model, &batch, &cache, &probs, train_embedding)?;
    Ok(ChunkResult {
        grads,
        loss_sum,
        correct,
    })
}

/// One optimizer step over a mini-batch. Returns `(mean data loss + l2,
/// correct count, gradients)` where the gradients match the public
/// backward contract (mean-scaled, l2 included).
fn train_batch<T: Scalar>(
    model: &CnnModel<T>,
    examples: &[&Example],
    masks: Option<&Vec<Vec<T>>>,
    lambda: f64,
    train_embedding: bool,
    parallel: bool,
) -> Result<(f64, usize, Gradients<T>)> {
    let chunk_jobs: Vec<(usize, usize)> = (0..examples.len())
        .step_by(CHUNK)
        .map(|start| (start, (start + CHUNK).min(examples.len())))
        .collect();
    let run = |&(start, end): &(usize, usize)| -> Result<ChunkResult<T>> {
        run_chunk(
            model,
            &examples[start..end],
            masks.map(|m| &m[start..end]),
            train_embedding,
        )
    };
    let results: Vec<Result<ChunkResult<T>>> = if parallel && chunk_jobs.len() > 1 {
        chunk_jobs.par_iter().map(run).collect()
    } else {
        chunk_jobs.iter().map(run).collect()
    };

    let mut merged: Option<Gradients<T>> = None;
    let mut loss_sum = 0.0f64;
    let mut correct = 0usize;
    for result in results {
        let chunk = result?;
        loss_sum += chunk.loss_sum;
        correct += chunk.correct;
        match &mut merged {
            Some(m) => m.merge(chunk.grads),
            None => merged = Some(chunk.grads),
        }
    }
    let mut grads = merged.expect("at least one chunk");
    let batch_len = examples.len();
    grads.scale(T::one() / T::from_usize(batch_len));
    let lam = T::from_f64(lambda);
    for (x, &w) in grads
        .fc_weight
        .data_mut()
        .iter_mut()
        .zip(model.fc_weight.data())
    {
        *x += lam * w;
    }
    for (x, &b) in grads.fc_bias.iter_mut().zip(model.fc_bias.iter()) {
        *x += lam * b;
    }
    let penalty = 0.5
        * lambda
        * (model.fc_weight.squared_norm().into_f64()
            + model.fc_bias.iter().map(|&b| (b * b).into_f64()).sum::<f64>());
    Ok((loss_sum / batch_len as f64 + penalty, correct, grads))
}

/// Trains a model with the full recipe: shuffled mini-batches (the last
/// short batch kept), Adam with the stepped schedule, dropout masks
/// frozen per batch, and per-epoch metrics. A fixed seed makes the run
/// bitwise reproducible; `parallel` only controls whether fixed chunks
/// run on multiple threads and never changes the numbers.
pub fn train<T: Scalar>(
    train_examples: &[&Example],
    test_examples: Option<&[&Example]>,
    vocab: &Vocabulary,
    num_classes: usize,
    cfg: &CnnConfig,
    pretrained: Option<&WordVectors<T>>,
    parallel: bool,
) -> Result<TrainOutcome<T>> {
    cfg.validate()?;
    if train_examples.is_empty() {
        return Err(Error::InvalidInput("no training examples".into()));
    }
    let max_len = train_examples.iter().map(|e| e.ids.len()).max().unwrap();
    let mut rng = SeededRng::new(cfg.seed);
    let mut model = CnnModel::init(vocab, num_classes, max_len, cfg, pretrained, &mut rng)?;
    let train_embedding = cfg.variant.trains_embedding();
    let mut optimizer = Optimizer::new(&model, train_embedding);

    let mut order: Vec<usize> = (0..train_examples.len()).collect();
    let mut metrics = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        let lr = T::from_f64(cfg.schedule.rate_for_epoch(epoch));
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0f64;
        let mut epoch_correct = 0usize;
        for batch_indices in order.chunks(cfg.batch_size) {
            let examples: Vec<&Example> =
                batch_indices.iter().map(|&i| train_examples[i]).collect();
            let masks = if cfg.dropout > 0.0 {
                let keep = 1.0 - cfg.dropout;
                let scale = T::from_f64(1.0 / keep);
                Some(
                    examples
                        .iter()
                        .map(|_| {
                            (0..model.total_maps())
                                .map(|_| if rng.bernoulli(keep) { scale } else { T::zero() })
                                .collect::<Vec<T>>()
                        })
                        .collect::<Vec<_>>(),
                )
            } else {
                None
            };
            let (loss, correct, grads) = train_batch(
                &model,
                &examples,
                masks.as_ref(),
                cfg.l2_lambda,
                train_embedding,
                parallel,
            )?;
            if !loss.is_finite() {
                return Err(Error::NumericFault(format!(
                    "non-finite training loss in epoch {epoch}"
                )));
            }
            epoch_loss += loss * examples.len() as f64;
            epoch_correct += correct;
            optimizer.apply(&mut model, &grads, lr)?;
        }
        let (test_loss, test_accuracy) = match test_examples {
            Some(test) if !test.is_empty() => {
                let report = evaluate(&model, test)?;
                (Some(report.mean_loss), Some(report.accuracy))
            }
            _ => (None, None),
        };
        metrics.push(EpochMetrics {
            epoch,
            train_loss: epoch_loss / train_examples.len() as f64,
            train_accuracy: epoch_correct as f64 / train_examples.len() as f64,
            test_loss,
            test_accuracy,
        });
    }
    Ok(TrainOutcome { model, metrics })
}

/// Accuracy and per-class confusion counts under argmax prediction
/// (lowest class index on logit ties).
pub fn evaluate<T: Scalar>(model: &CnnModel<T>, examples: &[&Example]) -> Result<EvalReport> {
    if examples.is_empty() {
        return Err(Error::InvalidInput("empty evaluation set".into()));
    }
    let mut confusion = vec![vec![0usize; model.num_classes]; model.num_classes];
    let mut correct = 0usize;
    let mut loss_sum = 0.0f64;
    for group in examples.chunks(200) {
        let batch: EncodedBatch<T> = encode_batch(group, model.max_len, model.max_width())?;
        let (logits, _) = forward(model, &batch, false)?;
        for e in 0..batch.len() {
            let truth = batch.labels[e];
            if truth >= model.num_classes {
                return Err(Error::InvalidInput(format!(
                    "label {truth} outside the model's {} classes",
                    model.num_classes
                )));
            }
            let predicted = predict_row(logits.row(e));
            confusion[truth][predicted] += 1;
            if predicted == truth {
                correct += 1;
            }
            let (loss, _) = softmax_cross_entropy(logits.row(e), truth)?;
            loss_sum += loss.into_f64();
        }
    }
    Ok(EvalReport {
        accuracy: correct as f64 / examples.len() as f64,
        mean_loss: loss_sum / examples.len() as f64,
        confusion,
    })
}

#[derive(Clone, Debug)]
pub struct CvOutcome<T: Scalar> {
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub fold_metrics: Vec<Vec<EpochMetrics>>,
    /// Model trained on the first fold, kept for checkpointing.
    pub first_model: Option<CnnModel<T>>,
}

/// Trains k independent models on stratified folds of `dataset.train`
/// and reports mean ± sample standard deviation of fold accuracy. Fold
/// seeds derive from the config seed, so the whole procedure is
/// reproducible.
pub fn run_cv<T: Scalar>(
    dataset: &Dataset,
    cfg: &CnnConfig,
    k: usize,
    pretrained: Option<&WordVectors<T>>,
    parallel: bool,
) -> Result<CvOutcome<T>> {
    let labels: Vec<usize> = dataset.train.iter().map(|e| e.label).collect();
    let folds = kfold_split(&labels, k, cfg.seed)?;
    let master = SeededRng::new(cfg.seed);
    let mut fold_accuracies = Vec::with_capacity(k);
    let mut fold_metrics = Vec::with_capacity(k);
    let mut first_model = None;
    for (fold_idx, fold) in folds.iter().enumerate() {
        let mut train_refs: Vec<&Example> =
            fold.train.iter().map(|&i| &dataset.train[i]).collect();
        train_refs.extend(dataset.extra_train.iter());
        let test_refs: Vec<&Example> = fold.test.iter().map(|&i| &dataset.train[i]).collect();
        let mut fold_cfg = cfg.clone();
        fold_cfg.seed = master.derive(0xF01D + fold_idx as u64).seed();
        let outcome = train(
            &train_refs,
            Some(&test_refs),
            &dataset.vocab,
            dataset.num_classes(),
            &fold_cfg,
            pretrained,
            parallel,
        )?;
        let report = evaluate(&outcome.model, &test_refs)?;
        fold_accuracies.push(report.accuracy);
        fold_metrics.push(outcome.metrics);
        if fold_idx == 0 {
            first_model = Some(outcome.model);
        }
    }
    let mean = fold_accuracies.iter().sum::<f64>() / k as f64;
    let variance = if k > 1 {
        fold_accuracies
            .iter()
            .map(|a| (a - mean) * (a - mean))
            .sum::<f64>()
            / (k - 1) as f64
    } else {
        0.0
    };
    Ok(CvOutcome {
        fold_accuracies,
        mean_accuracy: mean,
        std_accuracy: variance.sqrt(),
        fold_metrics,
        first_model,
    })
}
