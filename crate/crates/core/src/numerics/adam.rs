//! Adam optimizer with bias correction.

use crate::error::{Error, Result};
use crate::numerics::matrix::Matrix;
use crate::numerics::scalar::Scalar;

/// Per-parameter Adam accumulators. `t` counts completed update steps.
#[derive(Clone, Debug)]
pub struct AdamState<T> {
    pub m: Matrix<T>,
    pub v: Matrix<T>,
    pub t: u64,
    pub beta1: T,
    pub beta2: T,
    pub epsilon: T,
}

impl<T: Scalar> AdamState<T> {
    /// Fresh state for a `rows x cols` parameter with the optimizer's
    /// standard constants (β1=0.9, β2=0.999, ε=1e-8).
    pub fn new(rows: usize, cols: usize) -> Self {
        AdamState {
            m: Matrix::zeros(rows, cols),
            v: Matrix::zeros(rows, cols),
            t: 0,
            beta1: T::from_f64(0.9),
            beta2: T::from_f64(0.999),
            epsilon: T::from_f64(1e-8),
        }
    }
}

/// One dense Adam update: every coordinate of `param` moves by
/// `-lr * m̂ / (sqrt(v̂) + ε)` with bias-corrected moments.
pub fn adam_step<T: Scalar>(
    param: &mut Matrix<T>,
    grad: &Matrix<T>,
    state: &mut AdamState<T>,
    lr: T,
) -> Result<()> {
    if param.shape() != grad.shape() || param.shape() != state.m.shape() {
        return Err(Error::InvalidInput(format!(
            "adam shape mismatch: param {:?}, grad {:?}, state {:?}",
            param.shape(),
            grad.shape(),
            state.m.shape()
        )));
    }
    state.t += 1;
    let (c1, c2) = correction_factors(state);
    let (beta1, beta2, eps) = (state.beta1, state.beta2, state.epsilon);
    let one = T::one();
    for ((p, &g), (m, v)) in param
        .data_mut()
        .iter_mut()
        .zip(grad.data())
        .zip(state.m.data_mut().iter_mut().zip(state.v.data_mut()))
    {
        *m = beta1 * *m + (one - beta1) * g;
        *v = beta2 * *v + (one - beta2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p = *p - lr * m_hat / (v_hat.sqrt() + eps);
    }
    Ok(())
}

/// Row-sparse Adam update for embedding-style parameters.
///
/// Only the listed rows have their moments and values touched; the step
/// counter still advances once per call so bias correction matches the
/// batch count. Rows must be in range and `grad` slices must span `cols`.
pub fn adam_step_rows<T: Scalar>(
    param: &mut Matrix<T>,
    rows: &[(usize, Vec<T>)],
    state: &mut AdamState<T>,
    lr: T,
) -> Result<()> {
    if param.shape() != state.m.shape() {
        return Err(Error::InvalidInput(format!(
            "adam shape mismatch: param {:?}, state {:?}",
            param.shape(),
            state.m.shape()
        )));
    }
    state.t += 1;
    let (c1, c2) = correction_factors(state);
    let (beta1, beta2, eps) = (state.beta1, state.beta2, state.epsilon);
    let one = T::one();
    for (row, grad) in rows {
        if *row >= param.rows() || grad.len() != param.cols() {
            return Err(Error::InvalidInput(format!(
                "adam row update out of range: row {row}, grad len {}",
                grad.len()
            )));
        }
        let p_row = param.row_mut(*row);
        let m_row = state.m.row_mut(*row);
        let v_row = state.v.row_mut(*row);
        for (((p, &g), m), v) in p_row
            .iter_mut()
            .zip(grad.iter())
            .zip(m_row.iter_mut())
            .zip(v_row.iter_mut())
        {
            *m = beta1 * *m + (one - beta1) * g;
            *v = beta2 * *v + (one - beta2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p = *p - lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}

fn correction_factors<T: Scalar>(state: &AdamState<T>) -> (T, T) {
    let t = state.t as i32;
    (
        T::one() - state.beta1.powi(t),
        T::one() - state.beta2.powi(t),
    )
}
