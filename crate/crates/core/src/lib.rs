//! Word embeddings and convolutional sentence classification.
//!
//! The crate is organized around five subsystems:
//!
//! * [`numerics`] — dense matrices, the Adam optimizer with its stepped
//!   learning-rate schedule, seeded randomness, and a finite-difference
//!   gradient checker.
//! * [`text`] — tokenization, vocabularies, dataset importers for the
//!   sentence-classification benchmarks, cross-validation splits, and
//!   class balancing.
//! * [`embeddings`] — skip-gram negative-sampling training, the binary
//!   word-vector file format, and similarity/analogy queries.
//! * [`classifier`] — the single-channel convolutional sentence
//!   classifier (rand / static / non-static variants) with hand-derived
//!   backpropagation.
//! * [`baselines`] — a TF-IDF + linear-SVM reference classifier.
//!
//! [`experiment`] wires these together into reproducible runs driven by a
//! flat config-file format.
//!
//! All numeric kernels are generic over the scalar type ([`Scalar`], i.e.
//! `f32` or `f64`). Training uses `f32` for speed; gradient tests
//! instantiate the identical code paths at `f64`.

pub mod baselines;
pub mod classifier;
pub mod embeddings;
pub mod error;
pub mod experiment;
pub mod numerics;
pub mod text;

pub use error::{Error, Result};
pub use numerics::scalar::Scalar;

/// Scalar type used for training.
pub type Real = f32;

/// Training-precision matrix.
pub type Matrix32 = numerics::Matrix<f32>;
/// Test/oracle-precision matrix.
pub type Matrix64 = numerics::Matrix<f64>;

/// Training-precision word vectors.
pub type WordVectors32 = embeddings::WordVectors<f32>;
/// Training-precision classifier model.
pub type CnnModel32 = classifier::CnnModel<f32>;
