//! Normalized elementary symmetric means.

use crate::error::{Error, Result};

/// `E_k(v) = C(d, k)^{-1} sum_{|I| = k} prod_{i in I} v_i`.
///
/// Evaluated with the normalized prefix recurrence
/// `E_j^{(i)} = ((i - j) / i) E_j^{(i-1)} + (j / i) v_i E_{j-1}^{(i-1)}`,
/// which keeps every intermediate a convex combination of products and never
/// forms a binomial coefficient.
pub fn elementary_symmetric(values: &[f64], k: usize) -> Result<f64> {
    let d = values.len();
    if k > d {
        return Err(Error::InvalidInput(format!("k = {k} exceeds the number of values {d}")));
    }
    if values.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput("values must be finite and non-negative".into()));
    }
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for (i, &v) in values.iter().enumerate() {
        let i = (i + 1) as f64;
        for j in (1..=k).rev() {
            let jf = j as f64;
            e[j] = ((i - jf) / i) * e[j] + (jf / i) * v * e[j - 1];
        }
    }
    Ok(e[k])
}
