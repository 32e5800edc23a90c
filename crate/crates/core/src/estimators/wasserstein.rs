//! Dimension from the convergence rate of the empirical 1-Wasserstein
//! distance: `W1(P_m, P'_m) ~ m^{-1/d}`.

use crate::geometry::PointCloud;
use crate::numerics::RngStream;
use crate::transport::{w1_empirical, GroundMetric};
use crate::{Error, Result};

const SPLIT_STREAM: u64 = 0x5753_504c_4954;

/// Part sizes `(m, floor(alpha m))` for a sample of `n` points.
pub fn split_sizes(n: usize, alpha: f64) -> Result<(usize, usize)> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("alpha must exceed 1, got {alpha}")));
    }
    let m = (n as f64 / (2.0 + 2.0 * alpha)).floor() as usize;
    let big = (alpha * m as f64).floor() as usize;
    if m < 1 || big < 1 {
        return Err(Error::Infeasible(format!(
            "n={n} is too small for alpha={alpha} (m={m})"
        )));
    }
    Ok((m, big))
}

/// `log alpha / (log w_small - log w_big)`, or `None` when the log difference
/// is not positive.
pub fn split_estimate(w_small: f64, w_big: f64, alpha: f64) -> Option<f64> {
    if !(w_small > 0.0 && w_big > 0.0) {
        return None;
    }
    let diff = w_small.ln() - w_big.ln();
    (diff > 0.0 && diff.is_finite()).then(|| alpha.ln() / diff)
}

/// Per-split estimates (`None` for invalid splits).
pub fn wasserstein_splits(
    cloud: &PointCloud,
    alpha: f64,
    splits: usize,
    metric: GroundMetric,
    seed: u64,
) -> Result<Vec<Option<f64>>> {
    let n = cloud.n();
    let p = cloud.p();
    let (m, big) = split_sizes(n, alpha)?;
    let base = RngStream::new(seed, SPLIT_STREAM);
    let gather = |idx: &[usize]| -> Vec<f64> {
        let mut v = Vec::with_capacity(idx.len() * p);
        for &i in idx {
            v.extend_from_slice(cloud.row(i));
        }
        v
    };
    let mut out = Vec::with_capacity(splits);
    for s in 0..splits {
        let mut perm: Vec<usize> = (0..n).collect();
        base.child(s as u64).shuffle(&mut perm);
        let a = gather(&perm[..m]);
        let b = gather(&perm[m..2 * m]);
        let c = gather(&perm[2 * m..2 * m + big]);
        let d = gather(&perm[2 * m + big..2 * m + 2 * big]);
        let w_small = w1_empirical(&a, &b, p, metric)?;
        let w_big = w1_empirical(&c, &d, p, metric)?;
        out.push(split_estimate(w_small, w_big, alpha));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plug_in() {
        assert!((split_estimate(4.0, 2.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(split_estimate(2.0, 2.0, 2.0), None);
        assert_eq!(split_estimate(1.0, 2.0, 2.0), None);
        assert_eq!(split_estimate(0.0, 2.0, 2.0), None);
    }

    #[test]
    fn sizes() {
        assert_eq!(split_sizes(1000, 5.0).unwrap(), (83, 415));
        assert_eq!(split_sizes(1000, 1.01).unwrap(), (248, 250));
        assert!(split_sizes(3, 2.0).is_err());
        assert!(split_sizes(100, 1.0).is_err());
    }
}
