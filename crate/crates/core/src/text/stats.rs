//! Dataset summary statistics.

use std::collections::HashSet;

use crate::text::dataset::Dataset;

/// The familiar per-dataset summary row: class count `c`, average
/// sentence length `l` (rounded to the nearest integer), size `N`,
/// vocabulary size `|V|`, pretrained coverage `|V_pre|`, and the fixed
/// test-set size (absent for cross-validated corpora).
///
/// Statistics are always recomputed from the imported examples, never
/// trusted from input files. Phrase-level training extras are excluded;
/// the figures describe sentences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetStats {
    pub classes: usize,
    pub avg_len: u64,
    pub size: usize,
    pub vocab_size: usize,
    pub pretrained_vocab: Option<usize>,
    pub test_size: Option<usize>,
}

pub fn compute_stats(dataset: &Dataset, pretrained: Option<&HashSet<String>>) -> DatasetStats {
    let sentences: Vec<&_> = dataset
        .train
        .iter()
        .chain(dataset.test.iter().flatten())
        .collect();
    let total_tokens: usize = sentences.iter().map(|e| e.ids.len()).sum();
    let avg_len = if sentences.is_empty() {
        0
    } else {
        (total_tokens as f64 / sentences.len() as f64).round() as u64
    };
    let pretrained_vocab =
        pretrained.map(|set| dataset.vocab.words().filter(|w| set.contains(*w)).count());
    DatasetStats {
        classes: dataset.num_classes(),
        avg_len,
        size: sentences.len(),
        vocab_size: dataset.vocab.word_count(),
        pretrained_vocab,
        test_size: dataset.test.as_ref().map(Vec::len),
    }
}

impl DatasetStats {
    /// Tab-separated row in table order: c, l, N, |V|, |V_pre|, Test.
    pub fn to_row(&self, name: &str) -> String {
        format!(
            "{name}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.classes,
            self.avg_len,
            self.size,
            self.vocab_size,
            self.pretrained_vocab
                .map_or_else(|| "-".to_string(), |v| v.to_string()),
            self.test_size
                .map_or_else(|| "CV".to_string(), |t| t.to_string()),
        )
    }
}
