//! TF-IDF + linear-SVM reference classifier.

pub mod svm;
pub mod tfidf;

pub use svm::{
    hinge_objective, svm_accuracy, svm_predict, svm_train, LinearSvm, DEFAULT_EPOCHS, DEFAULT_REG,
};
pub use tfidf::{tfidf_fit_transform, SparseVec, TfidfModel};
