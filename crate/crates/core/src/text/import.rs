//! Importers for the benchmark corpora.
//!
//! Each importer understands the benchmark's original distribution files
//! and produces a [`Dataset`]; corpora without a stable public format
//! (irony, opi, tweet, polite) are consumed in the canonical TSV form.
//! When a directory already contains `train.tsv` the canonical loader is
//! used regardless of the dataset kind, so converted corpora re-import
//! cleanly.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::text::dataset::{Dataset, LabeledText};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatasetKind {
    Mr,
    Sst1,
    Sst2,
    Subj,
    Trec,
    Irony,
    Opi,
    Tweet,
    Polite,
}

pub const ALL_DATASETS: [DatasetKind; 9] = [
    DatasetKind::Mr,
    DatasetKind::Sst1,
    DatasetKind::Sst2,
    DatasetKind::Subj,
    DatasetKind::Trec,
    DatasetKind::Irony,
    DatasetKind::Opi,
    DatasetKind::Tweet,
    DatasetKind::Polite,
];

impl DatasetKind {
    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::Mr => "mr",
            DatasetKind::Sst1 => "sst1",
            DatasetKind::Sst2 => "sst2",
            DatasetKind::Subj => "subj",
            DatasetKind::Trec => "trec",
            DatasetKind::Irony => "irony",
            DatasetKind::Opi => "opi",
            DatasetKind::Tweet => "tweet",
            DatasetKind::Polite => "polite",
        }
    }

    /// Whether the benchmark ships a fixed train/test split (otherwise it
    /// is evaluated with 10-fold cross-validation).
    pub fn has_fixed_split(self) -> bool {
        matches!(
            self,
            DatasetKind::Sst1 | DatasetKind::Sst2 | DatasetKind::Trec | DatasetKind::Tweet
        )
    }

    /// Whether classes are rebalanced by undersampling before training.
    pub fn balance_by_default(self) -> bool {
        matches!(self, DatasetKind::Irony)
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mr" => Ok(DatasetKind::Mr),
            "sst1" | "sst-1" => Ok(DatasetKind::Sst1),
            "sst2" | "sst-2" => Ok(DatasetKind::Sst2),
            "subj" => Ok(DatasetKind::Subj),
            "trec" => Ok(DatasetKind::Trec),
            "irony" => Ok(DatasetKind::Irony),
            "opi" => Ok(DatasetKind::Opi),
            "tweet" | "twitter" => Ok(DatasetKind::Tweet),
            "polite" => Ok(DatasetKind::Polite),
            other => Err(Error::Config(format!(
                "unknown dataset {other:?}; valid names: mr, sst1, sst2, subj, trec, irony, opi, tweet, polite"
            ))),
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Imports a dataset from `dir`. Expects either the benchmark's original
/// files or the canonical TSV form.
pub fn import_dataset(kind: DatasetKind, dir: &Path) -> Result<Dataset> {
    if dir.join("train.tsv").exists() {
        return Dataset::from_canonical(kind.name(), dir);
    }
    match kind {
        DatasetKind::Mr => import_mr(dir),
        DatasetKind::Subj => import_subj(dir),
        DatasetKind::Trec => import_trec(dir),
        DatasetKind::Sst1 => import_sst(dir, false),
        DatasetKind::Sst2 => import_sst(dir, true),
        DatasetKind::Irony | DatasetKind::Opi | DatasetKind::Tweet | DatasetKind::Polite => {
            Err(Error::Parse {
                path: dir.display().to_string(),
                line: 0,
                message: format!(
                    "dataset {} is consumed in canonical form; expected train.tsv",
                    kind.name()
                ),
            })
        }
    }
}

/// Reads a text file line by line with a lossy single-byte fallback:
/// lines that are not valid UTF-8 are decoded as Latin-1.
fn read_lines_lossy(path: &Path) -> Result<Vec<String>> {
    let bytes = fs::read(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: 0,
        message: e.to_string(),
    })?;
    let mut lines = Vec::new();
    for raw in bytes.split(|&b| b == b'\n') {
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        match std::str::from_utf8(raw) {
            Ok(s) => lines.push(s.to_string()),
            Err(_) => lines.push(raw.iter().map(|&b| b as char).collect()),
        }
    }
    if lines.last().is_some_and(String::is_empty) {
        lines.pop();
    }
    Ok(lines)
}

fn require_file(dir: &Path, names: &[&str]) -> Result<std::path::PathBuf> {
    for name in names {
        let p = dir.join(name);
        if p.exists() {
            return Ok(p);
        }
    }
    Err(Error::Parse {
        path: dir.display().to_string(),
        line: 0,
        message: format!("missing expected file (looked for: {})", names.join(", ")),
    })
}

/// Movie reviews: two polarity files, one sentence per line.
fn import_mr(dir: &Path) -> Result<Dataset> {
    let pos = require_file(dir, &["rt-polarity.pos"])?;
    let neg = require_file(dir, &["rt-polarity.neg"])?;
    let mut train: Vec<LabeledText> = Vec::new();
    for line in read_lines_lossy(&pos)? {
        train.push(("pos".into(), line));
    }
    for line in read_lines_lossy(&neg)? {
        train.push(("neg".into(), line));
    }
    Dataset::from_labeled("mr", train, None, vec![])
}

/// Subjectivity: one file of subjective snippets, one of objective ones.
fn import_subj(dir: &Path) -> Result<Dataset> {
    let subjective = require_file(dir, &["quote.tok.gt9.5000", "subj.subjective"])?;
    let objective = require_file(dir, &["plot.tok.gt9.5000", "subj.objective"])?;
    let mut train: Vec<LabeledText> = Vec::new();
    for line in read_lines_lossy(&subjective)? {
        train.push(("subjective".into(), line));
    }
    for line in read_lines_lossy(&objective)? {
        train.push(("objective".into(), line));
    }
    Dataset::from_labeled("subj", train, None, vec![])
}

/// TREC questions: `COARSE:fine question text` per line, 6 coarse classes,
/// fixed 500-question test file.
fn import_trec(dir: &Path) -> Result<Dataset> {
    let train_path = require_file(dir, &["train_5500.label", "train.label"])?;
    let test_path = require_file(dir, &["TREC_10.label", "test.label"])?;
    let train = parse_trec_file(&train_path)?;
    let test = parse_trec_file(&test_path)?;
    Dataset::from_labeled("trec", train, Some(test), vec![])
}

fn parse_trec_file(path: &Path) -> Result<Vec<LabeledText>> {
    let display = path.display().to_string();
    let mut out = Vec::new();
    for (i, line) in read_lines_lossy(path)?.into_iter().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (label, rest) = line.split_once(' ').ok_or_else(|| Error::Parse {
            path: display.clone(),
            line: i + 1,
            message: "expected `LABEL question text`".into(),
        })?;
        let (coarse, _fine) = label.split_once(':').ok_or_else(|| Error::Parse {
            path: display.clone(),
            line: i + 1,
            message: format!("label {label:?} has no ':' separator"),
        })?;
        if coarse.is_empty() {
            return Err(Error::Parse {
                path: display.clone(),
                line: i + 1,
                message: "empty coarse label".into(),
            });
        }
        out.push((coarse.to_string(), rest.to_string()));
    }
    Ok(out)
}

/// Sentiment-score bucket boundaries: [0,0.2] (0.2,0.4] (0.4,0.6]
/// (0.6,0.8] (0.8,1.0] map to classes 0..=4.
pub fn sst_bucket(score: f64) -> usize {
    if score <= 0.2 {
        0
    } else if score <= 0.4 {
        1
    } else if score <= 0.6 {
        2
    } else if score <= 0.8 {
        3
    } else {
        4
    }
}

/// Stanford Sentiment Treebank from its sentence/phrase/score tables.
///
/// Split 1 = train, 2 = test, 3 = dev; dev sentences join the training
/// split since no early stopping is used. Training additionally includes
/// every dictionary phrase that occurs as a token n-gram of a train-split
/// sentence (the test split is never mined for phrases). With `binary`,
/// neutral items are dropped and classes collapse to negative/positive.
fn import_sst(dir: &Path, binary: bool) -> Result<Dataset> {
    let sentences_path = require_file(dir, &["datasetSentences.txt"])?;
    let split_path = require_file(dir, &["datasetSplit.txt"])?;
    let dictionary_path = require_file(dir, &["dictionary.txt"])?;
    let labels_path = require_file(dir, &["sentiment_labels.txt"])?;

    // phrase text -> phrase id
    let mut dictionary: HashMap<String, u64> = HashMap::new();
    for (i, line) in read_lines_lossy(&dictionary_path)?.into_iter().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (phrase, id) = line.rsplit_once('|').ok_or_else(|| Error::Parse {
            path: dictionary_path.display().to_string(),
            line: i + 1,
            message: "expected `phrase|id`".into(),
        })?;
        let id: u64 = id.parse().map_err(|_| Error::Parse {
            path: dictionary_path.display().to_string(),
            line: i + 1,
            message: format!("bad phrase id {id:?}"),
        })?;
        dictionary.insert(phrase.to_string(), id);
    }

    // phrase id -> sentiment score
    let mut scores: HashMap<u64, f64> = HashMap::new();
    for (i, line) in read_lines_lossy(&labels_path)?.into_iter().enumerate() {
        if i == 0 || line.is_empty() {
            continue; // header
        }
        let (id, score) = line.split_once('|').ok_or_else(|| Error::Parse {
            path: labels_path.display().to_string(),
            line: i + 1,
            message: "expected `id|score`".into(),
        })?;
        let id: u64 = id.parse().map_err(|_| Error::Parse {
            path: labels_path.display().to_string(),
            line: i + 1,
            message: format!("bad phrase id {id:?}"),
        })?;
        let score: f64 = score.parse().map_err(|_| Error::Parse {
            path: labels_path.display().to_string(),
            line: i + 1,
            message: format!("bad score {score:?}"),
        })?;
        scores.insert(id, score);
    }

    // sentence index -> split
    let mut splits: HashMap<u64, u8> = HashMap::new();
    for (i, line) in read_lines_lossy(&split_path)?.into_iter().enumerate() {
        if i == 0 || line.is_empty() {
            continue; // header
        }
        let (idx, split) = line.split_once(',').ok_or_else(|| Error::Parse {
            path: split_path.display().to_string(),
            line: i + 1,
            message: "expected `index,split`".into(),
        })?;
        let idx: u64 = idx.parse().map_err(|_| Error::Parse {
            path: split_path.display().to_string(),
            line: i + 1,
            message: format!("bad sentence index {idx:?}"),
        })?;
        let split: u8 = split.trim().parse().map_err(|_| Error::Parse {
            path: split_path.display().to_string(),
            line: i + 1,
            message: format!("bad split label {split:?}"),
        })?;
        splits.insert(idx, split);
    }

    let label_of = |score: f64| -> Option<String> {
        let bucket = sst_bucket(score);
        if binary {
            match bucket {
                0 | 1 => Some("negative".into()),
                3 | 4 => Some("positive".into()),
                _ => None, // neutral dropped
            }
        } else {
            Some(bucket.to_string())
        }
    };

    let mut train: Vec<LabeledText> = Vec::new();
    let mut test: Vec<LabeledText> = Vec::new();
    let mut extra: Vec<LabeledText> = Vec::new();
    let mut train_sentences: Vec<String> = Vec::new();
    let mut sentence_phrase_ids: Vec<u64> = Vec::new();
    let mut unmatched = 0usize;

    for (i, line) in read_lines_lossy(&sentences_path)?.into_iter().enumerate() {
        if i == 0 || line.is_empty() {
            continue; // header
        }
        let (idx, text) = line.split_once('\t').ok_or_else(|| Error::Parse {
            path: sentences_path.display().to_string(),
            line: i + 1,
            message: "expected `index<TAB>sentence`".into(),
        })?;
        let idx: u64 = idx.parse().map_err(|_| Error::Parse {
            path: sentences_path.display().to_string(),
            line: i + 1,
            message: format!("bad sentence index {idx:?}"),
        })?;
        let text = fix_double_encoding(text);
        let Some(&phrase_id) = dictionary.get(&text) else {
            unmatched += 1;
            continue;
        };
        let Some(&score) = scores.get(&phrase_id) else {
            unmatched += 1;
            continue;
        };
        let Some(label) = label_of(score) else {
            continue;
        };
        match splits.get(&idx).copied().unwrap_or(1) {
            2 => test.push((label, text)),
            _ => {
                // dev (3) joins train (1)
                train.push((label, text.clone()));
                train_sentences.push(text);
                sentence_phrase_ids.push(phrase_id);
            }
        }
    }
    if unmatched > 0 {
        log::warn!("sst: {unmatched} sentences had no dictionary/score entry and were skipped");
    }

    // Phrase-level training data: distinct sub-spans of train sentences.
    let own_ids: std::collections::HashSet<u64> = sentence_phrase_ids.into_iter().collect();
    let mut seen: std::collections::HashSet<u64> = std::collections::HashSet::new();
    for sentence in &train_sentences {
        let words: Vec<&str> = sentence.split(' ').collect();
        for start in 0..words.len() {
            for end in start + 1..=words.len() {
                if end - start == words.len() {
                    continue; // the sentence itself is already included
                }
                let span = words[start..end].join(" ");
                if let Some(&pid) = dictionary.get(&span) {
                    if own_ids.contains(&pid) || !seen.insert(pid) {
                        continue;
                    }
                    if let Some(&score) = scores.get(&pid) {
                        if let Some(label) = label_of(score) {
                            extra.push((label, span));
                        }
                    }
                }
            }
        }
    }

    let name = if binary { "sst2" } else { "sst1" };
    Dataset::from_labeled(name, train, Some(test), extra)
}

/// Repairs the double-encoded UTF-8 found in the treebank's sentence
/// table (UTF-8 bytes that were decoded as Latin-1 and re-encoded).
fn fix_double_encoding(text: &str) -> String {
    if text.chars().all(|c| (c as u32) < 0x80) {
        return text.to_string();
    }
    if text.chars().any(|c| (c as u32) > 0xFF) {
        return text.to_string();
    }
    let bytes: Vec<u8> = text.chars().map(|c| c as u8).collect();
    match String::from_utf8(bytes) {
        Ok(fixed) => fixed,
        Err(_) => text.to_string(),
    }
}

/// Converts scored examples into binary politeness labels, splitting at
/// the median score with ties going to the polite class.
pub fn binarize_by_median(scored: Vec<(f64, String)>) -> Result<Vec<LabeledText>> {
    if scored.is_empty() {
        return Err(Error::InvalidInput("no scored examples".into()));
    }
    let mut values: Vec<f64> = scored.iter().map(|(s, _)| *s).collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = values[values.len() / 2];
    Ok(scored
        .into_iter()
        .map(|(score, text)| {
            let label = if score >= median { "polite" } else { "impolite" };
            (label.to_string(), text)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, content: &str) {
        fs::write(dir.join(name), content).unwrap();
    }

    #[test]
    fn mr_importer_reads_both_polarity_files() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "rt-polarity.pos", "a fine film\nanother good one\n");
        write(dir.path(), "rt-polarity.neg", "a dull film\n");
        let ds = import_dataset(DatasetKind::Mr, dir.path()).unwrap();
        assert_eq!(ds.train.len(), 3);
        assert_eq!(ds.num_classes(), 2);
        assert!(ds.test.is_none());
        assert_eq!(ds.class_names, vec!["neg", "pos"]);
    }

    #[test]
    fn mr_importer_decodes_legacy_bytes() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("rt-polarity.pos"), b"caf\xe9 scene\n").unwrap();
        write(dir.path(), "rt-polarity.neg", "plain\n");
        let ds = import_dataset(DatasetKind::Mr, dir.path()).unwrap();
        assert_eq!(ds.train.len(), 2);
        assert!(ds.train[0].text.contains('é'));
    }

    #[test]
    fn trec_importer_splits_coarse_labels() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "train_5500.label",
            "NUM:count How many people ?\nLOC:city Where is it ?\nHUM:ind Who did it ?\n",
        );
        write(dir.path(), "TREC_10.label", "NUM:date When was it ?\n");
        let ds = import_dataset(DatasetKind::Trec, dir.path()).unwrap();
        assert_eq!(ds.train.len(), 3);
        assert_eq!(ds.test.as_ref().unwrap().len(), 1);
        assert_eq!(ds.class_names, vec!["HUM", "LOC", "NUM"]);
    }

    #[test]
    fn trec_line_without_colon_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "train_5500.label", "NUM:count ok ?\nBROKEN no colon\n");
        write(dir.path(), "TREC_10.label", "NUM:count fine ?\n");
        let err = import_dataset(DatasetKind::Trec, dir.path()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn missing_file_is_a_descriptive_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = import_dataset(DatasetKind::Mr, dir.path()).unwrap_err();
        assert!(err.to_string().contains("rt-polarity.pos"));
    }

    #[test]
    fn canonical_fallback_applies_to_any_kind() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "train.tsv", "alice\thello there\nbob\tbye now\n");
        let ds = import_dataset(DatasetKind::Tweet, dir.path()).unwrap();
        assert_eq!(ds.train.len(), 2);
        assert_eq!(ds.class_names, vec!["alice", "bob"]);
    }

    #[test]
    fn sst_importer_buckets_and_mines_phrases() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "datasetSentences.txt",
            "sentence_index\tsentence\n1\tgreat fun for everyone\n2\tterribly dull affair\n3\theld for testing\n",
        );
        write(
            dir.path(),
            "datasetSplit.txt",
            "sentence_index,splitset_label\n1,1\n2,3\n3,2\n",
        );
        // ids: full sentences 10,11,12; sub-phrases 20 ("great fun"), 21 ("dull affair")
        write(
            dir.path(),
            "dictionary.txt",
            "great fun for everyone|10\nterribly dull affair|11\nheld for testing|12\ngreat fun|20\ndull affair|21\n",
        );
        write(
            dir.path(),
            "sentiment_labels.txt",
            "phrase ids|sentiment values\n10|0.9\n11|0.1\n12|0.5\n20|0.7\n21|0.3\n",
        );
        let ds = import_dataset(DatasetKind::Sst1, dir.path()).unwrap();
        // sentence 1 (train) + sentence 2 (dev joins train)
        assert_eq!(ds.train.len(), 2);
        assert_eq!(ds.test.as_ref().unwrap().len(), 1);
        // phrases mined from train sentences only (scores 0.7 -> "3", 0.3 -> "1")
        assert_eq!(ds.extra_train.len(), 2);
        assert_eq!(ds.class_names, vec!["0", "1", "2", "3", "4"]);

        // binary variant drops the neutral test sentence (score 0.5)
        let err = import_dataset(DatasetKind::Sst2, dir.path());
        // only one class remains in train+test after dropping neutral?
        // train has 0.9 (pos) and 0.1 (neg) so it still builds fine
        let ds2 = err.unwrap();
        assert_eq!(ds2.train.len(), 2);
        assert_eq!(ds2.test.as_ref().unwrap().len(), 0);
        assert_eq!(ds2.class_names, vec!["negative", "positive"]);
    }

    #[test]
    fn sst_bucket_boundaries() {
        assert_eq!(sst_bucket(0.0), 0);
        assert_eq!(sst_bucket(0.2), 0);
        assert_eq!(sst_bucket(0.20001), 1);
        assert_eq!(sst_bucket(0.4), 1);
        assert_eq!(sst_bucket(0.5), 2);
        assert_eq!(sst_bucket(0.6), 2);
        assert_eq!(sst_bucket(0.8), 3);
        assert_eq!(sst_bucket(1.0), 4);
    }

    #[test]
    fn double_encoding_repair() {
        // "é" (C3 A9) decoded as Latin-1 shows up as "Ã©"
        assert_eq!(fix_double_encoding("cafÃ©"), "café");
        assert_eq!(fix_double_encoding("plain"), "plain");
    }

    #[test]
    fn median_binarization_ties_go_polite() {
        let rows = binarize_by_median(vec![
            (0.1, "a".into()),
            (0.5, "b".into()),
            (0.9, "c".into()),
        ])
        .unwrap();
        assert_eq!(rows[0].0, "impolite");
        assert_eq!(rows[1].0, "polite"); // median itself
        assert_eq!(rows[2].0, "polite");
    }
}
