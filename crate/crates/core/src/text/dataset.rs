//! Canonical dataset representation and the TSV interchange format.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::text::tokenize::tokenize;
use crate::text::vocab::{build_vocab, Vocabulary};

/// One classified sentence: token ids into the dataset vocabulary, the
/// class index, and the raw text kept for reporting.
#[derive(Clone, Debug)]
pub struct Example {
    pub ids: Vec<u32>,
    pub label: usize,
    pub text: String,
}

/// A labeled corpus with a dataset-wide vocabulary.
///
/// `test` is `Some` for benchmarks with a fixed train/test split and
/// `None` for those evaluated by cross-validation. `extra_train` holds
/// additional training-only examples (phrase-level items) that never
/// count toward statistics or evaluation.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub name: String,
    pub class_names: Vec<String>,
    pub vocab: Vocabulary,
    pub train: Vec<Example>,
    pub test: Option<Vec<Example>>,
    pub extra_train: Vec<Example>,
}

/// Raw `(label name, text)` pairs produced by the per-format importers.
pub type LabeledText = (String, String);

impl Dataset {
    /// Tokenizes, assigns class indices (label names in lexicographic
    /// order), builds the vocabulary over every example, and encodes.
    ///
    /// Examples that tokenize to nothing are dropped with a warning; the
    /// class invariant requires non-empty token sequences.
    pub fn from_labeled(
        name: &str,
        train: Vec<LabeledText>,
        test: Option<Vec<LabeledText>>,
        extra_train: Vec<LabeledText>,
    ) -> Result<Dataset> {
        if train.is_empty() {
            return Err(Error::InvalidInput(format!(
                "dataset {name}: no training examples"
            )));
        }
        let mut label_set: BTreeSet<&str> = BTreeSet::new();
        for (label, _) in train
            .iter()
            .chain(test.iter().flatten())
            .chain(extra_train.iter())
        {
            label_set.insert(label);
        }
        let class_names: Vec<String> = label_set.into_iter().map(str::to_string).collect();
        if class_names.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "dataset {name}: needs at least 2 classes, found {}",
                class_names.len()
            )));
        }
        let class_index = |label: &str| -> usize {
            class_names.binary_search_by(|c| c.as_str().cmp(label)).unwrap()
        };

        let mut dropped = 0usize;
        let mut prepare = |items: Vec<LabeledText>| -> Vec<(usize, Vec<String>, String)> {
            items
                .into_iter()
                .filter_map(|(label, text)| {
                    let tokens = tokenize(&text, false);
                    if tokens.is_empty() {
                        dropped += 1;
                        None
                    } else {
                        Some((class_index(&label), tokens, text))
                    }
                })
                .collect()
        };
        let train_tok = prepare(train);
        let test_tok = test.map(&mut prepare);
        let extra_tok = prepare(extra_train);
        if dropped > 0 {
            log::warn!("dataset {name}: dropped {dropped} examples that tokenize to nothing");
        }
        if train_tok.is_empty() {
            return Err(Error::InvalidInput(format!(
                "dataset {name}: every training example tokenized to nothing"
            )));
        }

        let vocab = build_vocab(
            train_tok
                .iter()
                .chain(test_tok.iter().flatten())
                .chain(extra_tok.iter())
                .map(|(_, tokens, _)| tokens.as_slice()),
            1,
        )?;

        let encode = |items: Vec<(usize, Vec<String>, String)>, vocab: &Vocabulary| {
            items
                .into_iter()
                .map(|(label, tokens, text)| Example {
                    ids: vocab.encode(&tokens),
                    label,
                    text,
                })
                .collect::<Vec<Example>>()
        };
        let train = encode(train_tok, &vocab);
        let test = test_tok.map(|t| encode(t, &vocab));
        let extra_train = encode(extra_tok, &vocab);
        Ok(Dataset {
            name: name.to_string(),
            class_names,
            vocab,
            train,
            test,
            extra_train,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Longest token sequence over every example, including test and
    /// phrase-level items.
    pub fn max_len(&self) -> usize {
        self.all_examples().map(|e| e.ids.len()).max().unwrap_or(0)
    }

    /// Everything the classifier trains on: sentences plus any
    /// phrase-level extras.
    pub fn training_examples(&self) -> Vec<&Example> {
        self.train.iter().chain(self.extra_train.iter()).collect()
    }

    fn all_examples(&self) -> impl Iterator<Item = &Example> {
        self.train
            .iter()
            .chain(self.test.iter().flatten())
            .chain(self.extra_train.iter())
    }

    /// Serializes to the canonical TSV format: `train.tsv` always,
    /// `test.tsv` when a fixed split exists, `phrases.tsv` when
    /// phrase-level extras exist. UTF-8, LF line endings,
    /// `label<TAB>text` per line.
    pub fn write_canonical(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        self.write_split(&dir.join("train.tsv"), &self.train)?;
        if let Some(test) = &self.test {
            self.write_split(&dir.join("test.tsv"), test)?;
        }
        if !self.extra_train.is_empty() {
            self.write_split(&dir.join("phrases.tsv"), &self.extra_train)?;
        }
        Ok(())
    }

    fn write_split(&self, path: &Path, examples: &[Example]) -> Result<()> {
        let mut out = Vec::new();
        for ex in examples {
            let text: String = ex
                .text
                .chars()
                .map(|c| if c == '\t' || c == '\n' || c == '\r' { ' ' } else { c })
                .collect();
            writeln!(out, "{}\t{}", self.class_names[ex.label], text)?;
        }
        fs::write(path, out)?;
        Ok(())
    }

    /// Loads a dataset previously written by [`Dataset::write_canonical`]
    /// (or any corpus provided in canonical form).
    pub fn from_canonical(name: &str, dir: &Path) -> Result<Dataset> {
        let train = read_tsv(&dir.join("train.tsv"))?;
        let test_path = dir.join("test.tsv");
        let test = if test_path.exists() {
            Some(read_tsv(&test_path)?)
        } else {
            None
        };
        let phrases_path = dir.join("phrases.tsv");
        let extra = if phrases_path.exists() {
            read_tsv(&phrases_path)?
        } else {
            Vec::new()
        };
        Dataset::from_labeled(name, train, test, extra)
    }
}

/// Reads a canonical `label<TAB>text` file.
pub fn read_tsv(path: &Path) -> Result<Vec<LabeledText>> {
    let display = path.display().to_string();
    let content = fs::read_to_string(path).map_err(|e| Error::Parse {
        path: display.clone(),
        line: 0,
        message: e.to_string(),
    })?;
    let mut out = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (label, text) = line.split_once('\t').ok_or_else(|| Error::Parse {
            path: display.clone(),
            line: i + 1,
            message: "expected label<TAB>text".into(),
        })?;
        if label.is_empty() {
            return Err(Error::Parse {
                path: display.clone(),
                line: i + 1,
                message: "empty label".into(),
            });
        }
        out.push((label.to_string(), text.to_string()));
    }
    if out.is_empty() {
        return Err(Error::Parse {
            path: display,
            line: 0,
            message: "file contains no examples".into(),
        });
    }
    Ok(out)
}
