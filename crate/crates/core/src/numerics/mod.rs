//! Dense linear algebra, optimizer, seeded randomness, and the
//! finite-difference gradient checker shared by all training code.
//!
//! Everything here is pure or operates on caller-owned state; nothing
//! keeps internal shared mutable state.

pub mod adam;
pub mod gradcheck;
pub mod matrix;
pub mod ops;
pub mod rng;
pub mod scalar;
pub mod schedule;

pub use adam::{adam_step, adam_step_rows, AdamState};
pub use gradcheck::finite_diff_check;
pub use matrix::{axpy, dot, Matrix};
pub use ops::{log_sigmoid, sigmoid, softmax_cross_entropy};
pub use rng::SeededRng;
pub use scalar::Scalar;
pub use schedule::LrSchedule;
