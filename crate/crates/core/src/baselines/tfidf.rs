//! TF-IDF feature extraction.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

/// Sparse feature vector: `(term id, weight)` sorted by term id.
pub type SparseVec = Vec<(u32, f64)>;

/// Fitted TF-IDF weighting: raw term counts scaled by the smoothed
/// inverse document frequency `ln((1+N)/(1+df)) + 1`, then
/// L2-normalized.
#[derive(Clone, Debug)]
pub struct TfidfModel {
    terms: HashMap<String, u32>,
    term_names: Vec<String>,
    pub doc_freq: Vec<u32>,
    pub idf: Vec<f64>,
    /// Marker for the idf convention in use; only the smoothed form is
    /// implemented.
    pub smoothed: bool,
}

impl TfidfModel {
    pub fn num_terms(&self) -> usize {
        self.term_names.len()
    }

    pub fn term_id(&self, term: &str) -> Option<u32> {
        self.terms.get(term).copied()
    }

    /// Weights a tokenized document. Unknown terms are skipped; an empty
    /// or fully-unknown document yields the zero vector.
    pub fn transform(&self, tokens: &[String]) -> SparseVec {
        let mut counts: BTreeMap<u32, f64> = BTreeMap::new();
        for token in tokens {
            if let Some(&id) = self.terms.get(token) {
                *counts.entry(id).or_insert(0.0) += 1.0;
            }
        }
        let mut vec: SparseVec = counts
            .into_iter()
            .map(|(id, tf)| (id, tf * self.idf[id as usize]))
            .collect();
        l2_normalize(&mut vec);
        vec
    }
}

/// Fits the model on tokenized training documents and returns their
/// feature vectors.
pub fn tfidf_fit_transform(docs: &[Vec<String>]) -> Result<(TfidfModel, Vec<SparseVec>)> {
    if docs.is_empty() {
        return Err(Error::InvalidInput("empty corpus".into()));
    }
    // term -> document frequency, with deterministic term ids by name
    let mut df: BTreeMap<&str, u32> = BTreeMap::new();
    for doc in docs {
        let mut seen: Vec<&str> = doc.iter().map(String::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        for term in seen {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    let n = docs.len() as f64;
    let mut terms = HashMap::with_capacity(df.len());
    let mut term_names = Vec::with_capacity(df.len());
    let mut doc_freq = Vec::with_capacity(df.len());
    let mut idf = Vec::with_capacity(df.len());
    for (term, freq) in df {
        terms.insert(term.to_string(), term_names.len() as u32);
        term_names.push(term.to_string());
        doc_freq.push(freq);
        idf.push(((1.0 + n) / (1.0 + freq as f64)).ln() + 1.0);
    }
    let model = TfidfModel {
        terms,
        term_names,
        doc_freq,
        idf,
        smoothed: true,
    };
    let vectors = docs.iter().map(|d| model.transform(d)).collect();
    Ok((model, vectors))
}

fn l2_normalize(vec: &mut SparseVec) {
    let norm = vec.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for (_, v) in vec.iter_mut() {
            *v /= norm;
        }
    }
}
