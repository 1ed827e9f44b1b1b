//! Truncated X and X∞ norms of modal representations.

use crate::linalg::{CMat, CVec};
use crate::C64;
use crate::modal::FourierBasis;

/// Default relative truncation of the X∞ power series.
pub const SERIES_TOL: f64 = 1e-16;

/// Cap on the number of series terms; reached only for modes whose norm
/// overflows anyway.
const MAX_TERMS: usize = 100_000;

/// `‖v‖²` in the weighted norm of mode `n`.
pub fn weighted_norm_sq(v: &CVec, weights: &[f64; 3]) -> f64 {
    (0..3).map(|k| weights[k] * v[k].norm_sqr()).sum()
}

/// X norm of `Σ_n V_n Φ_n`.
pub fn x_norm(values: &[CVec], basis: &FourierBasis) -> f64 {
    values
        .iter()
        .enumerate()
        .map(|(n, v)| weighted_norm_sq(v, &basis.component_weights(n)))
        .sum::<f64>()
        .sqrt()
}

/// `Σ_k ‖B^k v‖²/k!` for one mode, truncated once a term falls below `tol`
/// times the partial sum after the terms have started to decrease.
pub fn mode_x_inf_norm_sq(b: &CMat, v: &CVec, weights: &[f64; 3], tol: f64) -> f64 {
    // w holds B^k v / sqrt(k!), so its squared norm is the k-th term
    let mut w = v.clone();
    let mut sum = weighted_norm_sq(&w, weights);
    if sum == 0.0 {
        return 0.0;
    }
    let peak = crate::linalg::frobenius(b).powi(2);
    for k in 1..MAX_TERMS {
        w = (b * w) / C64::new((k as f64).sqrt(), 0.0);
        let term = weighted_norm_sq(&w, weights);
        sum += term;
        if !sum.is_finite() {
            return f64::INFINITY;
        }
        if term <= tol * sum && k as f64 > peak {
            break;
        }
    }
    sum
}

/// X∞ norm `(Σ_n Σ_k ‖B_n^k V_n‖²_w / k!)^{1/2}`.
pub fn x_inf_norm(values: &[CVec], matrices: &[&CMat], basis: &FourierBasis, tol: f64) -> f64 {
    values
        .iter()
        .zip(matrices)
        .enumerate()
        .map(|(n, (v, b))| mode_x_inf_norm_sq(b, v, &basis.component_weights(n), tol))
        .sum::<f64>()
        .sqrt()
}
