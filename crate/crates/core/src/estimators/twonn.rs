//! Two-nearest-neighbour ratio estimator.

use crate::numerics::ls_through_origin;
use crate::{Error, Result};

/// Fit `-log(1 - F(mu)) = d log mu` through the origin.
///
/// `ratios` are `r2 / r1` per usable point. With `N` ratios sorted ascending
/// the empirical CDF is `i / N`; the last point (where it reaches one) is
/// dropped.
pub fn twonn_from_ratios(ratios: &[f64]) -> Result<f64> {
    let n = ratios.len();
    if n < 2 {
        return Err(Error::Degenerate(format!(
            "TwoNN needs at least 2 usable points, got {n}"
        )));
    }
    let mut mu = ratios.to_vec();
    mu.sort_by(f64::total_cmp);
    let nf = n as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = mu[..n - 1]
        .iter()
        .enumerate()
        .map(|(i, &m)| (m.ln(), -(1.0 - (i + 1) as f64 / nf).ln()))
        .unzip();
    let d = ls_through_origin(&xs, &ys).map_err(|_| {
        Error::Degenerate("TwoNN ratios are all one; slope is undefined".into())
    })?;
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Degenerate(format!("TwoNN slope {d} is not positive")));
    }
    Ok(d)
}
