//! Tokenization, vocabularies, dataset importers, cross-validation
//! splitting, and class balancing.

pub mod dataset;
pub mod import;
pub mod split;
pub mod stats;
pub mod tokenize;
pub mod vocab;

pub use dataset::{read_tsv, Dataset, Example, LabeledText};
pub use import::{import_dataset, DatasetKind, ALL_DATASETS};
pub use split::{kfold_split, undersample_balance, Fold};
pub use stats::{compute_stats, DatasetStats};
pub use tokenize::tokenize;
pub use vocab::{build_vocab, Vocabulary, PAD_ID, PAD_TOKEN, RESERVED, UNK_ID, UNK_TOKEN};
