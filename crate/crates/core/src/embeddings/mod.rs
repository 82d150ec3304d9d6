//! Skip-gram negative-sampling embeddings: training, vector file I/O,
//! and similarity/analogy queries.

pub mod io;
pub mod noise;
pub mod pairs;
pub mod sgns;
pub mod vectors;

pub use io::{read_vector_words, read_vectors_binary, write_vectors_binary};
pub use noise::NoiseTable;
pub use pairs::{count_pairs, generate_pairs, subsample_keep_prob, subsample_tokens};
pub use sgns::{
    encode_corpus, train_sgns, train_sgns_parallel, SgnsConfig, SgnsOutcome, SkipGramModel,
};
pub use vectors::{cosine_similarity, WordVectors};
