//! Cross-validation splitting and class rebalancing.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numerics::rng::SeededRng;
use crate::text::dataset::Dataset;

/// One cross-validation partition: index lists into the example slice.
#[derive(Clone, Debug)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Stratified k-fold split over example labels.
///
/// Folds are a disjoint cover whose sizes differ by at most one, with
/// each class spread as evenly as possible. The assignment depends only
/// on `labels`, `k`, and `seed`.
pub fn kfold_split(labels: &[usize], k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("k must be >= 2, got {k}")));
    }
    if labels.len() < k {
        return Err(Error::InvalidInput(format!(
            "cannot split {} examples into {k} folds",
            labels.len()
        )));
    }
    let rng = SeededRng::new(seed);
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &label) in labels.iter().enumerate() {
        by_class.entry(label).or_default().push(i);
    }

    // Deal classes consecutively with a pointer continuing across classes:
    // per-class counts and global fold sizes both stay within one.
    let mut assignments = vec![Vec::new(); k];
    let mut cursor = 0usize;
    for (label, mut indices) in by_class {
        rng.derive(label as u64).shuffle(&mut indices); // per-class child rng
        for idx in indices {
            assignments[cursor % k].push(idx);
            cursor += 1;
        }
    }

    let folds = (0..k)
        .map(|f| {
            let mut test = assignments[f].clone();
            test.sort_unstable();
            let mut train: Vec<usize> = assignments
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != f)
                .flat_map(|(_, v)| v.iter().copied())
                .collect();
            train.sort_unstable();
            Fold { train, test }
        })
        .collect();
    Ok(folds)
}

/// Undersamples every class down to the size of the smallest, choosing
/// kept examples uniformly per class and shuffling the result order.
/// Statistics (vocabulary included) are recomputed from the kept set.
pub fn undersample_balance(dataset: &Dataset, seed: u64) -> Result<Dataset> {
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); dataset.num_classes()];
    for (i, ex) in dataset.train.iter().enumerate() {
        by_class[ex.label].push(i);
    }
    if let Some((label, _)) = by_class.iter().enumerate().find(|(_, v)| v.is_empty()) {
        return Err(Error::InvalidInput(format!(
            "class {:?} has no examples",
            dataset.class_names[label]
        )));
    }
    if dataset.num_classes() < 2 {
        return Err(Error::InvalidInput("need at least 2 classes".into()));
    }
    let target = by_class.iter().map(Vec::len).min().unwrap();
    let rng = SeededRng::new(seed);
    let mut kept: Vec<usize> = Vec::with_capacity(target * by_class.len());
    for (label, mut indices) in by_class.into_iter().enumerate() {
        rng.derive(label as u64).shuffle(&mut indices);
        indices.truncate(target);
        kept.extend(indices);
    }
    let mut order_rng = rng.derive(u64::MAX);
    order_rng.shuffle(&mut kept);

    let train = kept
        .into_iter()
        .map(|i| {
            let ex = &dataset.train[i];
            (dataset.class_names[ex.label].clone(), ex.text.clone())
        })
        .collect();
    let test = dataset.test.as_ref().map(|examples| {
        examples
            .iter()
            .map(|ex| (dataset.class_names[ex.label].clone(), ex.text.clone()))
            .collect()
    });
    Dataset::from_labeled(&dataset.name, train, test, vec![])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::dataset::Dataset;

    #[test]
    fn hundred_examples_ten_even_folds() {
        let labels: Vec<usize> = (0..100).map(|i| i % 2).collect();
        let folds = kfold_split(&labels, 10, 3).unwrap();
        assert_eq!(folds.len(), 10);
        for fold in &folds {
            assert_eq!(fold.test.len(), 10);
            assert_eq!(fold.train.len(), 90);
        }
    }

    #[test]
    fn folds_are_a_disjoint_cover() {
        let labels: Vec<usize> = (0..103).map(|i| i % 3).collect();
        let folds = kfold_split(&labels, 10, 9).unwrap();
        let mut seen = vec![false; labels.len()];
        for fold in &folds {
            for &i in &fold.test {
                assert!(!seen[i], "index {i} in two folds");
                seen[i] = true;
            }
            // train ∪ test = everything, train ∩ test = ∅
            let mut union: Vec<usize> = fold.train.iter().chain(fold.test.iter()).copied().collect();
            union.sort_unstable();
            assert_eq!(union, (0..labels.len()).collect::<Vec<_>>());
        }
        assert!(seen.iter().all(|&s| s));
        // sizes differ by at most one
        let sizes: Vec<usize> = folds.iter().map(|f| f.test.len()).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn stratification_keeps_class_ratios() {
        // 70/30 class balance over 200 examples
        let labels: Vec<usize> = (0..200).map(|i| usize::from(i % 10 < 3)).collect();
        let folds = kfold_split(&labels, 10, 17).unwrap();
        for fold in &folds {
            let ones = fold.test.iter().filter(|&&i| labels[i] == 1).count();
            // 6 per fold expected; stratified dealing keeps it within one
            assert!((5..=7).contains(&ones), "got {ones} minority items");
        }
    }

    #[test]
    fn same_seed_same_partition() {
        let labels: Vec<usize> = (0..57).map(|i| i % 4).collect();
        let a = kfold_split(&labels, 5, 21).unwrap();
        let b = kfold_split(&labels, 5, 21).unwrap();
        for (fa, fb) in a.iter().zip(b.iter()) {
            assert_eq!(fa.test, fb.test);
            assert_eq!(fa.train, fb.train);
        }
        let c = kfold_split(&labels, 5, 22).unwrap();
        assert!(a.iter().zip(c.iter()).any(|(fa, fc)| fa.test != fc.test));
    }

    #[test]
    fn k_larger_than_n_is_rejected() {
        let labels = vec![0, 1, 0];
        assert!(kfold_split(&labels, 4, 1).is_err());
        assert!(kfold_split(&labels, 1, 1).is_err());
    }

    fn imbalanced_dataset(majority: usize, minority: usize) -> Dataset {
        let mut rows = Vec::new();
        for i in 0..majority {
            rows.push(("big".to_string(), format!("big example number {i}")));
        }
        for i in 0..minority {
            rows.push(("small".to_string(), format!("small example number {i}")));
        }
        Dataset::from_labeled("toy", rows, None, vec![]).unwrap()
    }

    #[test]
    fn undersampling_equalizes_class_sizes() {
        let ds = imbalanced_dataset(990, 84);
        let balanced = undersample_balance(&ds, 5).unwrap();
        let mut counts = vec![0usize; balanced.num_classes()];
        for ex in &balanced.train {
            counts[ex.label] += 1;
        }
        assert_eq!(counts, vec![84, 84]);
    }

    #[test]
    fn already_balanced_keeps_the_same_multiset() {
        let ds = imbalanced_dataset(10, 10);
        let balanced = undersample_balance(&ds, 5).unwrap();
        let mut before: Vec<&str> = ds.train.iter().map(|e| e.text.as_str()).collect();
        let mut after: Vec<&str> = balanced.train.iter().map(|e| e.text.as_str()).collect();
        before.sort_unstable();
        after.sort_unstable();
        assert_eq!(before, after);
    }

    #[test]
    fn undersampling_is_seed_deterministic() {
        let ds = imbalanced_dataset(50, 9);
        let a = undersample_balance(&ds, 11).unwrap();
        let b = undersample_balance(&ds, 11).unwrap();
        let texts = |d: &Dataset| d.train.iter().map(|e| e.text.clone()).collect::<Vec<_>>();
        assert_eq!(texts(&a), texts(&b));
        let c = undersample_balance(&ds, 12).unwrap();
        assert_ne!(texts(&a), texts(&c));
    }
}
