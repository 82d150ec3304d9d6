//! Finite-difference gradient checking.
//!
//! Used as the oracle for every hand-derived backward pass in the crate.
//! Callers must evaluate the loss deterministically (dropout disabled or
//! its mask frozen), otherwise the comparison is meaningless.

use crate::error::{Error, Result};
use crate::numerics::matrix::Matrix;
use crate::numerics::scalar::Scalar;

/// Compares `analytic` against central finite differences of `loss_fn`
/// around `param`, returning the maximum relative error
/// `|g_fd - g_an| / max(|g_fd|, |g_an|, 1e-8)` over all coordinates.
pub fn finite_diff_check<T, F>(
    mut loss_fn: F,
    param: &Matrix<T>,
    analytic: &Matrix<T>,
    h: T,
) -> Result<T>
where
    T: Scalar,
    F: FnMut(&Matrix<T>) -> T,
{
    if param.shape() != analytic.shape() {
        return Err(Error::InvalidInput(format!(
            "gradient shape {:?} does not match parameter shape {:?}",
            analytic.shape(),
            param.shape()
        )));
    }
    let floor = T::from_f64(1e-8);
    let two = T::from_f64(2.0);
    let mut probe = param.clone();
    let mut worst = T::zero();
    for i in 0..param.len() {
        let orig = probe.data()[i];
        probe.data_mut()[i] = orig + h;
        let plus = loss_fn(&probe);
        probe.data_mut()[i] = orig - h;
        let minus = loss_fn(&probe);
        probe.data_mut()[i] = orig;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::OracleFailure(format!(
                "non-finite loss at coordinate {i}: f(+h)={plus}, f(-h)={minus}"
            )));
        }
        let fd = (plus - minus) / (two * h);
        let an = analytic.data()[i];
        let denom = fd.abs().max(an.abs()).max(floor);
        worst = worst.max((fd - an).abs() / denom);
    }
    Ok(worst)
}
