use crate::error::{Error, Result};

/// Potential of the simplex instance after `i − 1` iterations that each hit a
/// distinct `v_j` with `j < k`: `2((k − i + 1)k − 1) + 1 − 1/k`.
///
/// Uncovered clusters contribute `k` points at squared distance 2 each, minus
/// the lighter `v_k`, plus `o` at `(k − 1)/k`.
pub fn phi_i_closed_form(k: usize, i: usize) -> Result<f64> {
    if k < 4 {
        return Err(Error::input(format!("k must be >= 4, got {k}")));
    }
    if i < 1 || i > k {
        return Err(Error::input(format!("i must lie in [1, {k}], got {i}")));
    }
    let (k, i) = (k as f64, i as f64);
    Ok(2.0 * ((k - i + 1.0) * k - 1.0) + 1.0 - 1.0 / k)
}
