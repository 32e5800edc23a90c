//! Distance-ratio estimators that need only sorted neighbour distances.

/// Two-radius estimate `log 2 / (log r_K - log r_{ceil(K/2)})`.
///
/// `None` when the two radii coincide or the inner one is zero.
pub fn mada_local(distances: &[f64]) -> Option<f64> {
    let k = distances.len();
    if k < 2 {
        return None;
    }
    let r1 = distances[k.div_ceil(2) - 1];
    let r2 = distances[k - 1];
    if !(r1 > 0.0) || !(r2 > r1) {
        return None;
    }
    Some(std::f64::consts::LN_2 / (r2.ln() - r1.ln()))
}

/// Inverse mean of `log(R / r_l)` with `R` the `K`-th distance.
///
/// The `l = K` term is zero but still counted, so the divisor is `K` (or
/// `K - 1` when `unbiased`). Zero distances are removed first and reduce the
/// divisor; returns the estimate and how many were removed.
pub fn mle_local(distances: &[f64], unbiased: bool) -> (Option<f64>, usize) {
    let positive: Vec<f64> = distances.iter().copied().filter(|&r| r > 0.0).collect();
    let zeros = distances.len() - positive.len();
    let Some(&big_r) = positive.last() else {
        return (None, zeros);
    };
    let k = positive.len();
    let divisor = if unbiased { k as f64 - 1.0 } else { k as f64 };
    if divisor <= 0.0 {
        return (None, zeros);
    }
    let ln_r = big_r.ln();
    let s: f64 = positive.iter().map(|r| ln_r - r.ln()).sum();
    if !(s > 0.0) {
        return (None, zeros);
    }
    (Some(divisor / s), zeros)
}
