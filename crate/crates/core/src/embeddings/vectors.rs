//! Word-vector store with similarity, neighbor, and analogy queries.

use std::borrow::Cow;
use std::collections::HashMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numerics::matrix::{dot, Matrix};
use crate::numerics::scalar::Scalar;
use crate::text::vocab::Vocabulary;

/// One k-dimensional vector per word.
///
/// Words are stored as raw bytes: lookups match on bytes and display uses
/// lossy UTF-8 decoding, so vector files with non-UTF-8 tokens survive a
/// read/write round trip. Queries rank by cosine over a lazily built
/// unit-normalized copy; zero vectors are excluded from rankings.
#[derive(Debug)]
pub struct WordVectors<T> {
    words: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, u32>,
    matrix: Matrix<T>,
    normalized: OnceLock<Matrix<T>>,
}

impl<T: Scalar> Clone for WordVectors<T> {
    fn clone(&self) -> Self {
        WordVectors {
            words: self.words.clone(),
            index: self.index.clone(),
            matrix: self.matrix.clone(),
            normalized: OnceLock::new(),
        }
    }
}

impl<T: Scalar> WordVectors<T> {
    pub fn from_raw(words: Vec<Vec<u8>>, matrix: Matrix<T>) -> Result<Self> {
        if words.len() != matrix.rows() {
            return Err(Error::InvalidInput(format!(
                "{} words but {} vector rows",
                words.len(),
                matrix.rows()
            )));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            index.insert(w.clone(), i as u32);
        }
        Ok(WordVectors {
            words,
            index,
            matrix,
            normalized: OnceLock::new(),
        })
    }

    /// Exports the real-word rows of an embedding matrix indexed by a
    /// vocabulary (the reserved padding/unknown rows are dropped).
    pub fn from_vocab(vocab: &Vocabulary, embedding: &Matrix<T>) -> Result<Self> {
        if embedding.rows() != vocab.len() {
            return Err(Error::InvalidInput(format!(
                "embedding has {} rows for a vocabulary of {}",
                embedding.rows(),
                vocab.len()
            )));
        }
        let mut matrix = Matrix::zeros(vocab.word_count(), embedding.cols());
        let mut words = Vec::with_capacity(vocab.word_count());
        for (out_row, (id, _)) in vocab.word_ids().enumerate() {
            matrix
                .row_mut(out_row)
                .copy_from_slice(embedding.row(id as usize));
            words.push(vocab.token_of(id).as_bytes().to_vec());
        }
        Self::from_raw(words, matrix)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn word_bytes(&self, id: u32) -> &[u8] {
        &self.words[id as usize]
    }

    /// Word for display; non-UTF-8 bytes are replaced.
    pub fn word(&self, id: u32) -> Cow<'_, str> {
        String::from_utf8_lossy(&self.words[id as usize])
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word.as_bytes()).copied()
    }

    pub fn get(&self, word: &str) -> Option<&[T]> {
        self.id(word).map(|id| self.matrix.row(id as usize))
    }

    /// Unit-normalized copy of the matrix; zero rows stay zero.
    fn normalized(&self) -> &Matrix<T> {
        self.normalized.get_or_init(|| {
            let mut m = self.matrix.clone();
            for r in 0..m.rows() {
                let norm = dot(m.row(r), m.row(r)).sqrt();
                if norm > T::zero() {
                    for v in m.row_mut(r) {
                        *v = *v / norm;
                    }
                }
            }
            m
        })
    }

    /// Top `n` words by cosine similarity to `word`. The query word and
    /// any id in `exclude` never appear; ties break toward lower ids.
    pub fn nearest_neighbors(
        &self,
        word: &str,
        n: usize,
        exclude: &[u32],
    ) -> Result<Vec<(String, T)>> {
        let query = self
            .id(word)
            .ok_or_else(|| Error::NotFound(format!("word {word:?} not in vocabulary")))?;
        let normalized = self.normalized();
        let query_row = normalized.row(query as usize).to_vec();
        if dot(&query_row, &query_row) == T::zero() {
            return Err(Error::InvalidInput(format!(
                "word {word:?} has a zero vector"
            )));
        }
        let mut skip: Vec<u32> = exclude.to_vec();
        skip.push(query);
        Ok(self.rank_by_cosine(&query_row, &skip, n))
    }

    /// "a is to b as c is to ?" by ranking cosine against
    /// `v_b - v_a + v_c` over unit-normalized vectors.
    pub fn analogy(&self, a: &str, b: &str, c: &str, n: usize) -> Result<Vec<(String, T)>> {
        let ids = [a, b, c]
            .iter()
            .map(|w| {
                self.id(w)
                    .ok_or_else(|| Error::NotFound(format!("word {w:?} not in vocabulary")))
            })
            .collect::<Result<Vec<u32>>>()?;
        let normalized = self.normalized();
        let mut target = vec![T::zero(); self.dim()];
        for (i, v) in target.iter_mut().enumerate() {
            *v = normalized.get(ids[1] as usize, i) - normalized.get(ids[0] as usize, i)
                + normalized.get(ids[2] as usize, i);
        }
        let norm = dot(&target, &target).sqrt();
        if norm > T::zero() {
            for v in &mut target {
                *v = *v / norm;
            }
        }
        Ok(self.rank_by_cosine(&target, &ids, n))
    }

    fn rank_by_cosine(&self, target: &[T], exclude: &[u32], n: usize) -> Vec<(String, T)> {
        let normalized = self.normalized();
        let mut scored: Vec<(u32, T)> = (0..self.len() as u32)
            .filter(|id| !exclude.contains(id))
            .filter_map(|id| {
                let row = normalized.row(id as usize);
                if dot(row, row) == T::zero() {
                    return None; // unnormalizable zero vector
                }
                Some((id, clamp_cosine(dot(target, row))))
            })
            .collect();
        scored.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.0.cmp(&b.0))
        });
        scored.truncate(n);
        scored
            .into_iter()
            .map(|(id, score)| (self.word(id).into_owned(), score))
            .collect()
    }
}

/// Cosine similarity of two non-zero vectors, clamped to [-1, 1].
pub fn cosine_similarity<T: Scalar>(u: &[T], v: &[T]) -> Result<T> {
    if u.len() != v.len() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} vs {}",
            u.len(),
            v.len()
        )));
    }
    let nu = dot(u, u).sqrt();
    let nv = dot(v, v).sqrt();
    if nu == T::zero() || nv == T::zero() {
        return Err(Error::InvalidInput("cosine of a zero vector".into()));
    }
    Ok(clamp_cosine(dot(u, v) / (nu * nv)))
}

fn clamp_cosine<T: Scalar>(x: T) -> T {
    x.max(-T::one()).min(T::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wv(words: &[&str], rows: &[Vec<f64>]) -> WordVectors<f64> {
        WordVectors::from_raw(
            words.iter().map(|w| w.as_bytes().to_vec()).collect(),
            Matrix::from_rows(rows).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn cosine_basics() {
        assert_eq!(cosine_similarity(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[-1.0, 0.0]).unwrap(), -1.0);
    }

    #[test]
    fn cosine_is_scale_invariant() {
        let u = [0.3, -0.7, 1.1];
        let v = [0.9, 0.2, -0.4];
        let doubled: Vec<f64> = u.iter().map(|x| 2.0 * x).collect();
        assert_eq!(
            cosine_similarity(&u, &v).unwrap(),
            cosine_similarity(&doubled, &v).unwrap()
        );
    }

    #[test]
    fn cosine_rejects_zero_vectors() {
        assert!(cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn neighbors_rank_by_hand_checkable_cosines() {
        // q=(1,0); a=(1,0.1) nearly parallel; b=(0,1) orthogonal; c=(-1,0) opposite
        let v = wv(
            &["q", "a", "b", "c"],
            &[
                vec![1.0, 0.0],
                vec![1.0, 0.1],
                vec![0.0, 1.0],
                vec![-1.0, 0.0],
            ],
        );
        let got = v.nearest_neighbors("q", 3, &[]).unwrap();
        let names: Vec<&str> = got.iter().map(|(w, _)| w.as_str()).collect();
        assert_eq!(names, ["a", "b", "c"]);
        assert!(got[0].1 > 0.99 && got[1].1.abs() < 1e-12 && got[2].1 == -1.0);
    }

    #[test]
    fn query_word_never_in_results_and_top_n_caps() {
        let v = wv(
            &["q", "a", "b"],
            &[vec![1.0, 0.0], vec![0.5, 0.5], vec![0.0, 1.0]],
        );
        let got = v.nearest_neighbors("q", 10, &[]).unwrap();
        assert_eq!(got.len(), 2);
        assert!(got.iter().all(|(w, _)| w != "q"));
    }

    #[test]
    fn oov_is_not_found() {
        let v = wv(&["a"], &[vec![1.0]]);
        assert!(matches!(
            v.nearest_neighbors("missing", 1, &[]),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn analogy_recovers_exact_orthonormal_relation() {
        // d = b - a + c exactly, in an orthonormal toy basis
        let v = wv(
            &["a", "b", "c", "d", "e"],
            &[
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
                vec![-1.0, 1.0, 1.0, 0.0],
                vec![0.0, 0.0, 0.0, 1.0],
            ],
        );
        let got = v.analogy("a", "b", "c", 2).unwrap();
        assert_eq!(got[0].0, "d");
    }

    #[test]
    fn analogy_with_equal_a_b_reduces_to_neighbors_of_c() {
        let v = wv(
            &["a", "c", "x", "y"],
            &[
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.1, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
        );
        let analogy = v.analogy("a", "a", "c", 5).unwrap();
        let neighbors = v.nearest_neighbors("c", 5, &[v.id("a").unwrap()]).unwrap();
        let names = |items: &[(String, f64)]| {
            items.iter().map(|(w, _)| w.clone()).collect::<Vec<_>>()
        };
        assert_eq!(names(&analogy), names(&neighbors));
    }

    #[test]
    fn analogy_ranking_is_scale_invariant() {
        let rows = vec![
            vec![0.3, 0.1, -0.2],
            vec![-0.5, 0.9, 0.4],
            vec![0.8, -0.3, 0.6],
            vec![0.2, 0.7, -0.9],
            vec![-0.1, -0.6, 0.5],
        ];
        let words = ["a", "b", "c", "d", "e"];
        let v1 = wv(&words, &rows);
        let scaled: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|x| 3.5 * x).collect())
            .collect();
        let v2 = wv(&words, &scaled);
        let names = |items: Vec<(String, f64)>| {
            items.into_iter().map(|(w, _)| w).collect::<Vec<_>>()
        };
        assert_eq!(
            names(v1.analogy("a", "b", "c", 2).unwrap()),
            names(v2.analogy("a", "b", "c", 2).unwrap())
        );
    }

    #[test]
    fn normalized_rows_are_unit_length() {
        let v = wv(
            &["a", "b", "zero"],
            &[vec![3.0, 4.0], vec![0.1, 0.0], vec![0.0, 0.0]],
        );
        let n = v.normalized();
        for r in 0..2 {
            let norm = dot(n.row(r), n.row(r)).sqrt();
            assert!((norm - 1.0).abs() < 1e-6);
        }
        // zero rows stay zero and never rank
        assert_eq!(n.row(2), &[0.0, 0.0]);
        let got = v.nearest_neighbors("a", 5, &[]).unwrap();
        assert!(got.iter().all(|(w, _)| w != "zero"));
    }
}
