//! Token vocabulary with reserved padding and unknown ids.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub const PAD_ID: u32 = 0;
pub const UNK_ID: u32 = 1;
pub const PAD_TOKEN: &str = "<pad>";
pub const UNK_TOKEN: &str = "<unk>";
/// Number of reserved ids (padding + unknown).
pub const RESERVED: usize = 2;

/// Bidirectional token<->id map with frequency counts.
///
/// Ids are dense in `[0, len)`. Id 0 is the padding token and id 1 the
/// unknown token; neither takes part in frequency-based sampling. Real
/// words get ids in descending count order (ties broken alphabetically),
/// which makes vocabulary construction deterministic.
#[derive(Clone, Debug)]
pub struct Vocabulary {
    index: HashMap<String, u32>,
    tokens: Vec<String>,
    counts: Vec<u64>,
}

impl Vocabulary {
    /// Builds a vocabulary from exact token counts, keeping tokens whose
    /// count is at least `min_count`. Dropped tokens fold their counts
    /// into the unknown id.
    pub fn from_counts(counts: HashMap<String, u64>, min_count: u64) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidInput("empty corpus: no tokens".into()));
        }
        let mut kept: Vec<(String, u64)> = Vec::new();
        let mut dropped: u64 = 0;
        for (token, count) in counts {
            if count >= min_count.max(1) {
                kept.push((token, count));
            } else {
                dropped += count;
            }
        }
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

        let mut tokens = Vec::with_capacity(kept.len() + RESERVED);
        tokens.push(PAD_TOKEN.to_string());
        tokens.push(UNK_TOKEN.to_string());
        let mut counts_vec = vec![0, dropped];
        let mut index = HashMap::with_capacity(kept.len());
        for (token, count) in kept {
            index.insert(token.clone(), tokens.len() as u32);
            tokens.push(token);
            counts_vec.push(count);
        }
        Ok(Vocabulary {
            index,
            tokens,
            counts: counts_vec,
        })
    }

    pub fn id_of(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    /// Id of `token`, or the unknown id when absent.
    pub fn id_or_unk(&self, token: &str) -> u32 {
        self.id_of(token).unwrap_or(UNK_ID)
    }

    pub fn token_of(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn count_of(&self, id: u32) -> u64 {
        self.counts[id as usize]
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// Total number of ids, including the two reserved ones.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word_count() == 0
    }

    /// Number of real words (reserved ids excluded). This is the |V|
    /// reported in dataset statistics.
    pub fn word_count(&self) -> usize {
        self.tokens.len() - RESERVED
    }

    /// Sum of counts over real words.
    pub fn total_word_count(&self) -> u64 {
        self.counts[RESERVED..].iter().sum()
    }

    /// Real words in id order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.tokens[RESERVED..].iter().map(String::as_str)
    }

    /// `(id, count)` pairs for real words, in id order.
    pub fn word_ids(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        (RESERVED..self.tokens.len()).map(|i| (i as u32, self.counts[i]))
    }

    pub fn encode(&self, tokens: &[String]) -> Vec<u32> {
        tokens.iter().map(|t| self.id_or_unk(t)).collect()
    }
}

/// Counts tokens across example sequences and builds the vocabulary.
pub fn build_vocab<'a, I>(token_seqs: I, min_count: u64) -> Result<Vocabulary>
where
    I: IntoIterator<Item = &'a [String]>,
{
    let mut counts: HashMap<String, u64> = HashMap::new();
    for seq in token_seqs {
        for token in seq {
            *counts.entry(token.clone()).or_insert(0) += 1;
        }
    }
    Vocabulary::from_counts(counts, min_count)
}
