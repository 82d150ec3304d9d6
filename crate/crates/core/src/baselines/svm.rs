//! One-vs-rest linear SVM trained by epoch-based SGD.
//!
//! Each class gets an L2-regularized hinge-loss classifier with the
//! Pegasos step size `eta_t = 1/(reg * t)`. The bias term is updated on
//! margin violations but never regularized.

use rayon::prelude::*;

use crate::baselines::tfidf::SparseVec;
use crate::error::{Error, Result};
use crate::numerics::matrix::Matrix;
use crate::numerics::rng::SeededRng;

#[derive(Clone, Debug)]
pub struct LinearSvm {
    /// `classes x dims` weight rows over the feature space.
    pub weights: Matrix<f64>,
    pub bias: Vec<f64>,
    pub reg: f64,
    pub epochs: usize,
    pub seed: u64,
}

pub const DEFAULT_REG: f64 = 1e-4;
pub const DEFAULT_EPOCHS: usize = 20;

/// Trains one-vs-rest classifiers. Each per-class problem sees only its
/// own ±1 labels, so relabeling among the *other* classes cannot change
/// a classifier; the example order is a pure function of the seed.
pub fn svm_train(
    features: &[SparseVec],
    labels: &[usize],
    dims: usize,
    num_classes: usize,
    reg: f64,
    epochs: usize,
    seed: u64,
) -> Result<LinearSvm> {
    if features.is_empty() || features.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} feature vectors for {} labels",
            features.len(),
            labels.len()
        )));
    }
    if reg <= 0.0 {
        return Err(Error::InvalidInput("regularization must be positive".into()));
    }
    let mut present = vec![false; num_classes];
    for &l in labels {
        if l >= num_classes {
            return Err(Error::InvalidInput(format!(
                "label {l} outside {num_classes} classes"
            )));
        }
        present[l] = true;
    }
    if present.iter().filter(|&&p| p).count() < 2 {
        return Err(Error::InvalidInput(
            "training needs at least 2 classes present".into(),
        ));
    }
    for vec in features {
        if vec.iter().any(|&(id, _)| id as usize >= dims) {
            return Err(Error::InvalidInput("feature id outside dimension".into()));
        }
    }

    let master = SeededRng::new(seed);
    let rows: Vec<Vec<f64>> = (0..num_classes)
        .into_par_iter()
        .map(|class| {
            train_one_class(features, labels, dims, class, reg, epochs, master.derive(class as u64))
        })
        .collect();
    let mut weights = Matrix::zeros(num_classes, dims);
    let mut bias = vec![0.0; num_classes];
    for (class, mut row) in rows.into_iter().enumerate() {
        bias[class] = row.pop().expect("bias slot");
        weights.row_mut(class).copy_from_slice(&row);
    }
    Ok(LinearSvm {
        weights,
        bias,
        reg,
        epochs,
        seed,
    })
}

/// Pegasos-style SGD for a single binary problem. Returns the weight
/// vector with the bias appended.
fn train_one_class(
    features: &[SparseVec],
    labels: &[usize],
    dims: usize,
    class: usize,
    reg: f64,
    epochs: usize,
    mut rng: SeededRng,
) -> Vec<f64> {
    let mut w = vec![0.0f64; dims];
    let mut b = 0.0f64;
    let mut order: Vec<usize> = (0..features.len()).collect();
    let mut t = 0u64;
    for _ in 0..epochs {
        rng.shuffle(&mut order);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (reg * t as f64);
            let y = if labels[i] == class { 1.0 } else { -1.0 };
            let score: f64 = features[i].iter().map(|&(id, v)| w[id as usize] * v).sum::<f64>() + b;
            let margin = y * score;
            // shrink, then step on violation
            let shrink = 1.0 - eta * reg;
            if shrink != 1.0 {
                for v in w.iter_mut() {
                    *v *= shrink;
                }
            }
            if margin < 1.0 {
                for &(id, v) in &features[i] {
                    w[id as usize] += eta * y * v;
                }
                b += eta * y;
            }
        }
    }
    w.push(b);
    w
}

/// Argmax over per-class scores, lowest class index on ties.
pub fn svm_predict(model: &LinearSvm, features: &SparseVec) -> Result<usize> {
    if features
        .iter()
        .any(|&(id, _)| id as usize >= model.weights.cols())
    {
        return Err(Error::InvalidInput(format!(
            "feature id outside the model's {} dimensions",
            model.weights.cols()
        )));
    }
    let mut best = 0usize;
    let mut best_score = f64::NEG_INFINITY;
    for class in 0..model.weights.rows() {
        let row = model.weights.row(class);
        let score: f64 = features.iter().map(|&(id, v)| row[id as usize] * v).sum::<f64>()
            + model.bias[class];
        if score > best_score {
            best_score = score;
            best = class;
        }
    }
    Ok(best)
}

/// Accuracy of the model over a labeled feature set.
pub fn svm_accuracy(model: &LinearSvm, features: &[SparseVec], labels: &[usize]) -> Result<f64> {
    if features.is_empty() {
        return Err(Error::InvalidInput("empty evaluation set".into()));
    }
    let mut correct = 0usize;
    for (vec, &label) in features.iter().zip(labels) {
        if svm_predict(model, vec)? == label {
            correct += 1;
        }
    }
    Ok(correct as f64 / features.len() as f64)
}

/// Mean hinge loss of class `class`'s classifier plus its l2 term,
/// exposed for gradient diagnostics.
pub fn hinge_objective(
    w: &[f64],
    b: f64,
    features: &[SparseVec],
    labels: &[usize],
    class: usize,
    reg: f64,
) -> f64 {
    let data: f64 = features
        .iter()
        .zip(labels)
        .map(|(vec, &label)| {
            let y = if label == class { 1.0 } else { -1.0 };
            let score: f64 =
                vec.iter().map(|&(id, v)| w[id as usize] * v).sum::<f64>() + b;
            (1.0 - y * score).max(0.0)
        })
        .sum::<f64>()
        / features.len() as f64;
    data + 0.5 * reg * w.iter().map(|v| v * v).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gradcheck::finite_diff_check;

    fn dense(xs: &[f64]) -> SparseVec {
        xs.iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i as u32, v))
            .collect()
    }

    #[test]
    fn separable_points_reach_full_accuracy() {
        let features = vec![dense(&[1.0, 0.0]), dense(&[0.0, 1.0])];
        let labels = vec![0usize, 1];
        let model = svm_train(&features, &labels, 2, 2, 1e-4, 100, 3).unwrap();
        assert_eq!(svm_accuracy(&model, &features, &labels).unwrap(), 1.0);
    }

    #[test]
    fn zero_epochs_means_zero_weights_and_class_zero() {
        let features = vec![dense(&[1.0, 0.0]), dense(&[0.0, 1.0])];
        let labels = vec![0usize, 1];
        let model = svm_train(&features, &labels, 2, 2, 1e-4, 0, 3).unwrap();
        assert!(model.weights.data().iter().all(|&v| v == 0.0));
        assert_eq!(svm_predict(&model, &dense(&[0.3, 0.9])).unwrap(), 0);
    }

    #[test]
    fn hand_set_weights_select_their_class() {
        let mut model = LinearSvm {
            weights: Matrix::zeros(3, 2),
            bias: vec![0.0; 3],
            reg: 1e-4,
            epochs: 0,
            seed: 0,
        };
        model.weights.row_mut(2).copy_from_slice(&[5.0, 5.0]);
        assert_eq!(svm_predict(&model, &dense(&[1.0, 1.0])).unwrap(), 2);
    }

    #[test]
    fn all_zero_weights_tie_breaks_to_class_zero() {
        let model = LinearSvm {
            weights: Matrix::zeros(4, 3),
            bias: vec![0.0; 4],
            reg: 1e-4,
            epochs: 0,
            seed: 0,
        };
        assert_eq!(svm_predict(&model, &dense(&[1.0, 2.0, 3.0])).unwrap(), 0);
    }

    #[test]
    fn prediction_scale_invariant_with_zero_bias() {
        let mut model = LinearSvm {
            weights: Matrix::zeros(2, 2),
            bias: vec![0.0; 2],
            reg: 1e-4,
            epochs: 0,
            seed: 0,
        };
        model.weights.row_mut(0).copy_from_slice(&[1.0, -0.5]);
        model.weights.row_mut(1).copy_from_slice(&[-0.3, 0.8]);
        let x = dense(&[0.4, 0.7]);
        let scaled: SparseVec = x.iter().map(|&(i, v)| (i, 10.0 * v)).collect();
        assert_eq!(
            svm_predict(&model, &x).unwrap(),
            svm_predict(&model, &scaled).unwrap()
        );
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let model = LinearSvm {
            weights: Matrix::zeros(2, 2),
            bias: vec![0.0; 2],
            reg: 1e-4,
            epochs: 0,
            seed: 0,
        };
        assert!(svm_predict(&model, &vec![(5u32, 1.0)]).is_err());
    }

    #[test]
    fn single_class_input_is_rejected() {
        let features = vec![dense(&[1.0]), dense(&[0.5])];
        assert!(svm_train(&features, &[1, 1], 1, 2, 1e-4, 5, 1).is_err());
    }

    #[test]
    fn training_is_seed_deterministic() {
        let features: Vec<SparseVec> = (0..20)
            .map(|i| dense(&[(i % 5) as f64, (i % 3) as f64, 1.0]))
            .collect();
        let labels: Vec<usize> = (0..20).map(|i| i % 2).collect();
        let a = svm_train(&features, &labels, 3, 2, 1e-3, 10, 7).unwrap();
        let b = svm_train(&features, &labels, 3, 2, 1e-3, 10, 7).unwrap();
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.bias, b.bias);
    }

    #[test]
    fn one_vs_rest_ignores_permutations_of_other_classes() {
        // class 0's classifier must be identical whether the rest are
        // labeled 1/2 or 2/1
        let features: Vec<SparseVec> = (0..12)
            .map(|i| dense(&[1.0 + (i % 4) as f64, (i % 3) as f64]))
            .collect();
        let labels_a: Vec<usize> = (0..12).map(|i| i % 3).collect();
        let labels_b: Vec<usize> = labels_a
            .iter()
            .map(|&l| match l {
                1 => 2,
                2 => 1,
                other => other,
            })
            .collect();
        let ma = svm_train(&features, &labels_a, 2, 3, 1e-3, 5, 11).unwrap();
        let mb = svm_train(&features, &labels_b, 2, 3, 1e-3, 5, 11).unwrap();
        assert_eq!(ma.weights.row(0), mb.weights.row(0));
        assert_eq!(ma.bias[0], mb.bias[0]);
    }

    #[test]
    fn hinge_subgradient_matches_finite_differences_off_the_kink() {
        // pick a point where no example sits exactly at margin 1
        let features = vec![dense(&[0.9, 0.2]), dense(&[0.1, 1.1]), dense(&[0.7, 0.6])];
        let labels = vec![0usize, 1, 0];
        let w = vec![0.3, -0.4];
        let b = 0.05;
        let reg = 1e-2;
        let class = 0usize;

        // analytic subgradient: mean over violating examples of -y*x + reg*w
        let mut grad = vec![reg * w[0], reg * w[1]];
        let mut bias_grad = 0.0;
        for (vec, &label) in features.iter().zip(&labels) {
            let y = if label == class { 1.0 } else { -1.0 };
            let score: f64 =
                vec.iter().map(|&(id, v)| w[id as usize] * v).sum::<f64>() + b;
            if y * score < 1.0 {
                for &(id, v) in vec {
                    grad[id as usize] -= y * v / features.len() as f64;
                }
                bias_grad -= y / features.len() as f64;
            }
        }

        let param = Matrix::from_vec(1, 3, vec![w[0], w[1], b]).unwrap();
        let analytic = Matrix::from_vec(1, 3, vec![grad[0], grad[1], bias_grad]).unwrap();
        let err = finite_diff_check(
            |p| {
                hinge_objective(
                    &[p.get(0, 0), p.get(0, 1)],
                    p.get(0, 2),
                    &features,
                    &labels,
                    class,
                    reg,
                )
            },
            &param,
            &analytic,
            1e-6,
        )
        .unwrap();
        assert!(err < 1e-6, "relative error {err}");
    }
}
