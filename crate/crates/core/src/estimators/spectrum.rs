//! Covariance-spectrum estimators: Local PCA and CA-PCA.

use crate::geometry::PointCloud;
use crate::neighbors::NeighborSet;
use crate::numerics::{sym_eigenvalues, EigenSpectrum};
use crate::{Error, Result};

/// Local PCA keeps eigenvalues strictly above this fraction of the largest.
pub const PCA_THRESHOLD: f64 = 0.05;
/// Eigenvalues below this fraction of the largest count as exact zeros when
/// capping the CA-PCA candidate range.
pub const CAPCA_RANK_TOL: f64 = 1e-10;

/// Spectrum of `(1/K) sum_{l=0..K} (x_l - mean)(x_l - mean)^T` over the centre
/// and its `K` neighbours. Note the divisor is `K`, not `K + 1`.
///
/// When `K + 1 < p` the nonzero spectrum is taken from the smaller Gram matrix
/// and padded with zeros, so the result always has length `p`.
pub fn local_cov_spectrum(ns: &NeighborSet, cloud: &PointCloud) -> Result<EigenSpectrum> {
    local_cov_spectrum_with(ns, cloud, true)
}

/// As [`local_cov_spectrum`]; with `include_center = false` the centre is
/// left out and the covariance of the `K` neighbours alone uses divisor
/// `K - 1`.
pub fn local_cov_spectrum_with(
    ns: &NeighborSet,
    cloud: &PointCloud,
    include_center: bool,
) -> Result<EigenSpectrum> {
    let k = ns.k();
    let m = if include_center { k + 1 } else { k };
    if k == 0 || m < 2 {
        return Err(Error::invalid("local covariance needs at least two points"));
    }
    let p = cloud.p();
    let mut x = Vec::with_capacity(m * p);
    if include_center {
        x.extend_from_slice(cloud.row(ns.center));
    }
    for &j in &ns.indices {
        x.extend_from_slice(cloud.row(j));
    }
    let mut mean = vec![0.0; p];
    for row in x.chunks_exact(p) {
        for (a, v) in mean.iter_mut().zip(row) {
            *a += v;
        }
    }
    for a in &mut mean {
        *a /= m as f64;
    }
    for row in x.chunks_exact_mut(p) {
        for (v, a) in row.iter_mut().zip(&mean) {
            *v -= a;
        }
    }
    let scale = 1.0 / (m - 1) as f64;
    let spectrum = if m < p {
        let mut g = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let v: f64 = x[i * p..(i + 1) * p]
                    .iter()
                    .zip(&x[j * p..(j + 1) * p])
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    * scale;
                g[i * m + j] = v;
                g[j * m + i] = v;
            }
        }
        let mut values = sym_eigenvalues(&g, m)?.values;
        values.resize(p, 0.0);
        EigenSpectrum::from_values(values)
    } else {
        let mut c = vec![0.0; p * p];
        for row in x.chunks_exact(p) {
            for a in 0..p {
                let ra = row[a];
                if ra == 0.0 {
                    continue;
                }
                for b in a..p {
                    c[a * p + b] += ra * row[b];
                }
            }
        }
        for a in 0..p {
            for b in a..p {
                let v = c[a * p + b] * scale;
                c[a * p + b] = v;
                c[b * p + a] = v;
            }
        }
        sym_eigenvalues(&c, p)?
    };
    Ok(spectrum.clamp_psd())
}

/// Number of eigenvalues strictly above `0.05 * lambda_1`.
pub fn pca_threshold_dim(spec: &EigenSpectrum) -> Result<usize> {
    let l1 = spec.values.first().copied().unwrap_or(0.0);
    if !(l1 > 0.0) {
        return Err(Error::Degenerate("spectrum has no positive eigenvalue".into()));
    }
    let cut = PCA_THRESHOLD * l1;
    Ok(spec.values.iter().rposition(|&v| v > cut).map_or(0, |i| i + 1))
}

/// The curvature-adjusted objective for a single `q`.
pub fn capca_objective(values: &[f64], r: f64, q: usize) -> f64 {
    let r2 = r * r;
    let tail: f64 = values[q..].iter().sum();
    let qf = q as f64;
    let coef = (3.0 * qf + 4.0) / (qf * (qf + 4.0));
    let target = 1.0 / (qf + 2.0);
    let fit: f64 = values[..q]
        .iter()
        .map(|&l| {
            let e = target - (l + coef * tail) / r2;
            e * e
        })
        .sum();
    fit.sqrt() + 2.0 * tail / r2
}

/// Minimiser of the curvature-adjusted objective over `q = 1..=p`; the first
/// (smallest) `q` wins ties.
pub fn capca_select_q(spec: &EigenSpectrum, r: f64, p: usize) -> Result<usize> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("CA-PCA radius must be positive, got {r}")));
    }
    if p == 0 || p > spec.dim() {
        return Err(Error::invalid(format!(
            "CA-PCA needs 1 <= p <= {} eigenvalues, got p={p}",
            spec.dim()
        )));
    }
    let values = &spec.values[..p];
    let mut best = (f64::INFINITY, 1);
    for q in 1..=p {
        let obj = capca_objective(values, r, q);
        if obj < best.0 {
            best = (obj, q);
        }
    }
    Ok(best.1)
}

/// Local PCA estimate for one neighbourhood; `None` when the neighbourhood
/// collapses to a single point.
pub(crate) fn local_pca_at(
    ns: &NeighborSet,
    cloud: &PointCloud,
    include_center: bool,
) -> Result<Option<f64>> {
    let spec = local_cov_spectrum_with(ns, cloud, include_center)?;
    match pca_threshold_dim(&spec) {
        Ok(q) => Ok(Some(q as f64)),
        Err(Error::Degenerate(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// CA-PCA estimate for one neighbourhood, with `R` the mean of the two
/// largest neighbour distances.
pub(crate) fn ca_pca_at(
    ns: &NeighborSet,
    cloud: &PointCloud,
    include_center: bool,
) -> Result<Option<f64>> {
    let k = ns.k();
    if k < 2 {
        return Err(Error::invalid("CA-PCA needs K >= 2"));
    }
    let r = 0.5 * (ns.distances[k - 1] + ns.distances[k - 2]);
    if !(r > 0.0) {
        return Ok(None);
    }
    let spec = local_cov_spectrum_with(ns, cloud, include_center)?;
    // Directions with zero variance (e.g. from a linear embedding) would
    // otherwise pull the argmin towards q = p: fitting zeros to 1/(q+2) costs
    // only about sqrt(q)/(q+2).
    let top = spec.values.first().copied().unwrap_or(0.0);
    if !(top > 0.0) {
        return Ok(None);
    }
    let rank = spec.values.iter().filter(|&&v| v > CAPCA_RANK_TOL * top).count();
    Ok(Some(capca_select_q(&spec, r, rank.clamp(1, cloud.p()))? as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_set(cloud: &PointCloud) -> NeighborSet {
        let x = cloud.row(0);
        let indices: Vec<usize> = (1..cloud.n()).collect();
        let distances = indices
            .iter()
            .map(|&j| crate::neighbors::sq_dist(x, cloud.row(j)).sqrt())
            .collect();
        NeighborSet { center: 0, indices, distances }
    }

    #[test]
    fn collinear_is_rank_one() {
        let c = PointCloud::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        let s = local_cov_spectrum(&full_set(&c), &c).unwrap();
        assert!(s.values[0] > 1.0);
        assert!(s.values[1].abs() < 1e-14);
    }

    #[test]
    fn right_triangle() {
        // Centre at the right angle, legs of length one. Mean (1/3, 1/3);
        // scatter matrix [[2/3, -1/3], [-1/3, 2/3]], divided by K = 2.
        let c = PointCloud::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = local_cov_spectrum(&full_set(&c), &c).unwrap();
        assert!((s.values[0] - 0.5).abs() < 1e-14);
        assert!((s.values[1] - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn gram_path_matches_covariance_path() {
        let mut s = crate::numerics::rng::RngStream::new(3, 0);
        let rows: Vec<Vec<f64>> = (0..4).map(|_| (0..6).map(|_| s.normal()).collect()).collect();
        let c = PointCloud::from_rows(&rows).unwrap();
        let small = local_cov_spectrum(&full_set(&c), &c).unwrap();
        assert_eq!(small.dim(), 6);
        // 4 points in R^6 take the Gram route; check against the Jacobi solver
        // on the full covariance.
        let m = 4;
        let mean: Vec<f64> = (0..6).map(|a| rows.iter().map(|r| r[a]).sum::<f64>() / m as f64).collect();
        let mut cov = vec![0.0; 36];
        for r in &rows {
            for a in 0..6 {
                for b in 0..6 {
                    cov[a * 6 + b] += (r[a] - mean[a]) * (r[b] - mean[b]) / 3.0;
                }
            }
        }
        let direct = crate::numerics::sym_eigen(&cov, 6).unwrap().clamp_psd();
        for (a, b) in small.values.iter().zip(&direct.values) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn threshold_examples() {
        let f = |v: Vec<f64>| pca_threshold_dim(&EigenSpectrum::from_values(v)).unwrap();
        assert_eq!(f(vec![1.0, 0.0, 0.0]), 1);
        assert_eq!(f(vec![1.0, 0.06, 0.04]), 2);
        assert_eq!(f(vec![1.0, 0.050000001, 0.05]), 2);
        assert!(pca_threshold_dim(&EigenSpectrum::from_values(vec![0.0, 0.0])).is_err());
    }

    #[test]
    fn capca_flat_profiles() {
        let r = 1.7;
        let s = EigenSpectrum::from_values(vec![r * r / 4.0, r * r / 4.0, 0.0, 0.0]);
        assert_eq!(capca_select_q(&s, r, 4).unwrap(), 2);
        let s = EigenSpectrum::from_values(vec![r * r / 3.0, 0.0, 0.0, 0.0]);
        assert_eq!(capca_select_q(&s, r, 4).unwrap(), 1);
        assert!(capca_select_q(&s, 0.0, 4).is_err());
    }
}
