//! Elementwise activation functions and the softmax cross-entropy loss.

use crate::error::{Error, Result};
use crate::numerics::scalar::Scalar;

/// Logistic sigmoid, evaluated so it saturates instead of overflowing.
#[inline]
pub fn sigmoid<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// `ln(sigmoid(x))`, stable for large |x|.
#[inline]
pub fn log_sigmoid<T: Scalar>(x: T) -> T {
    // ln σ(x) = -softplus(-x) = min(x, 0) - ln(1 + e^{-|x|})
    x.min(T::zero()) - (-x.abs()).exp().ln_1p()
}

/// Softmax cross-entropy against a single target class.
///
/// Returns `(loss, probabilities)` where `loss = -ln p[label]`. The
/// computation shifts by the max logit so it is stable for arbitrarily
/// large inputs.
pub fn softmax_cross_entropy<T: Scalar>(logits: &[T], label: usize) -> Result<(T, Vec<T>)> {
    if logits.is_empty() {
        return Err(Error::InvalidInput("empty logits vector".into()));
    }
    if label >= logits.len() {
        return Err(Error::InvalidInput(format!(
            "label {label} out of range for {} classes",
            logits.len()
        )));
    }
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let mut probs: Vec<T> = logits.iter().map(|&x| (x - max).exp()).collect();
    let z: T = probs.iter().copied().sum();
    for p in &mut probs {
        *p = *p / z;
    }
    let loss = z.ln() - (logits[label] - max);
    Ok((loss, probs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_symmetry_point() {
        assert_eq!(sigmoid(0.0f64), 0.5);
    }

    #[test]
    fn sigmoid_saturates_without_overflow() {
        assert!((sigmoid(40.0f64) - 1.0).abs() < 1e-15);
        assert!((sigmoid(1e6f64) - 1.0).abs() < 1e-15);
        assert!(sigmoid(-1e6f64) >= 0.0);
        assert!(sigmoid(f64::MAX).is_finite());
    }

    #[test]
    fn sigmoid_closed_form() {
        // σ(ln 3) = 3/4
        assert!((sigmoid(3.0f64.ln()) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn sigmoid_complement_identity() {
        for &x in &[-7.5, -0.3, 0.0, 0.9, 12.0] {
            let lhs: f64 = sigmoid(-x);
            let rhs = 1.0 - sigmoid(x);
            assert!((lhs - rhs).abs() < 1e-15, "x={x}");
        }
    }

    #[test]
    fn log_sigmoid_matches_direct_evaluation() {
        for &x in &[-30.0, -1.0, 0.0, 1.0, 30.0] {
            let direct = sigmoid(x).ln();
            assert!((log_sigmoid(x) - direct).abs() < 1e-12, "x={x}");
        }
        // far in the tails the direct form underflows but ours stays finite
        assert!(log_sigmoid(-1000.0f64).is_finite());
        assert!((log_sigmoid(-1000.0f64) + 1000.0).abs() < 1e-9);
    }

    #[test]
    fn softmax_uniform_two_classes() {
        let (loss, probs) = softmax_cross_entropy(&[1.0f64, 1.0], 0).unwrap();
        assert!((loss - 2.0f64.ln()).abs() < 1e-12);
        assert!((probs[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn softmax_uniform_six_classes() {
        let (loss, _) = softmax_cross_entropy(&[0.0f64; 6], 3).unwrap();
        assert!((loss - 6.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn softmax_is_shift_stable() {
        // With a 1000-unit gap the correct-class loss is e^{-1000} ≈ 0; an
        // unshifted evaluation would overflow instead.
        let (loss, probs) = softmax_cross_entropy(&[1000.0f64, 0.0], 0).unwrap();
        assert!(loss >= 0.0 && loss < 1e-12);
        assert!((probs[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn softmax_rejects_bad_input() {
        assert!(softmax_cross_entropy::<f64>(&[], 0).is_err());
        assert!(softmax_cross_entropy(&[1.0f64], 1).is_err());
    }
}
