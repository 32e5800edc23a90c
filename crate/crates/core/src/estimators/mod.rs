//! The eight dimension estimators behind one entry point, [`estimate`].
//!
//! Neighbourhood-based methods report one local estimate per retained point
//! and average them (or vote, for MADA). Degenerate neighbourhoods, such as
//! those made of duplicate points, are dropped and counted rather than
//! failing the whole estimate.

mod config;
pub mod danco;
pub mod distance;
pub mod spectrum;
pub mod tle;
pub mod twonn;
pub mod wasserstein;

use std::collections::BTreeMap;

pub use config::{Aggregation, DancoOptions, DensityForm, EstimatorConfig, Method};
pub use spectrum::{capca_select_q, local_cov_spectrum, local_cov_spectrum_with, pca_threshold_dim};

use crate::geometry::PointCloud;
use crate::neighbors::{knn_all, NeighborSet};
use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    /// Points whose local estimate was undefined.
    pub dropped_locals: usize,
    /// Zero-distance neighbours removed (MLE) or skipped pair terms (TLE).
    pub skipped_terms: usize,
    pub invalid_splits: usize,
    /// Method-specific values, e.g. DanCo's `d_norm` and `tau`.
    pub extra: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub d_hat: f64,
    /// Per-point estimates, `NaN` where dropped. Length `n` when present.
    pub locals: Option<Vec<f64>>,
    pub method: Method,
    pub config: EstimatorConfig,
    pub diagnostics: Diagnostics,
}

impl EstimateReport {
    /// The retained (finite) local estimates.
    pub fn retained_locals(&self) -> Vec<f64> {
        self.locals
            .as_deref()
            .map(|l| l.iter().copied().filter(|v| v.is_finite()).collect())
            .unwrap_or_default()
    }
}

/// Neighbourhood size the method needs from the search.
pub fn required_k(cfg: &EstimatorConfig) -> Option<usize> {
    match cfg.method {
        Method::Wasserstein => None,
        Method::Twonn => Some(2),
        _ => Some(cfg.k),
    }
}

/// Estimate the intrinsic dimension of `cloud`.
pub fn estimate(cloud: &PointCloud, cfg: &EstimatorConfig) -> Result<EstimateReport> {
    cfg.validate(cloud.n())?;
    let nbrs = match required_k(cfg) {
        Some(k) => knn_all(cloud, k)?,
        None => Vec::new(),
    };
    estimate_with_neighbors(cloud, &nbrs, cfg)
}

/// As [`estimate`], reusing neighbour sets computed with at least the
/// required `K` (only the first `K` neighbours of each set are read).
pub fn estimate_with_neighbors(
    cloud: &PointCloud,
    nbrs: &[NeighborSet],
    cfg: &EstimatorConfig,
) -> Result<EstimateReport> {
    cfg.validate(cloud.n())?;
    if let Some(k) = required_k(cfg) {
        if nbrs.len() != cloud.n() {
            return Err(Error::invalid(format!(
                "expected {} neighbour sets, got {}",
                cloud.n(),
                nbrs.len()
            )));
        }
        if let Some(short) = nbrs.iter().find(|ns| ns.k() < k) {
            return Err(Error::invalid(format!(
                "neighbour set of point {} has {} entries, need {k}",
                short.center,
                short.k()
            )));
        }
    }
    let mut diag = Diagnostics::default();
    let (d_hat, locals) = match cfg.method {
        Method::LocalPca => per_point(nbrs, cfg, &mut diag, |ns, _| {
            spectrum::local_pca_at(&ns.truncated(cfg.k), cloud, cfg.include_center)
        })?,
        Method::CaPca => per_point(nbrs, cfg, &mut diag, |ns, _| {
            spectrum::ca_pca_at(&ns.truncated(cfg.k), cloud, cfg.include_center)
        })?,
        Method::Mada => per_point(nbrs, cfg, &mut diag, |ns, _| {
            Ok(distance::mada_local(&ns.distances[..cfg.k]))
        })?,
        Method::Mle => per_point(nbrs, cfg, &mut diag, |ns, d| {
            let (v, zeros) = distance::mle_local(&ns.distances[..cfg.k], cfg.mle_unbiased);
            d.skipped_terms += zeros;
            Ok(v)
        })?,
        Method::Tle => per_point(nbrs, cfg, &mut diag, |ns, d| {
            let t = tle::tle_local(&ns.truncated(cfg.k), cloud);
            d.skipped_terms += t.skipped;
            Ok(t.value)
        })?,
        Method::Twonn => {
            let mut ratios = Vec::with_capacity(nbrs.len());
            for ns in nbrs {
                let (r1, r2) = (ns.distances[0], ns.distances[1]);
                if r1 > 0.0 {
                    ratios.push(r2 / r1);
                } else {
                    diag.dropped_locals += 1;
                }
            }
            (twonn::twonn_from_ratios(&ratios)?, None)
        }
        Method::Danco => {
            let out = danco::danco_run(cloud, nbrs, cfg.k, &cfg.danco, cfg.seed)?;
            diag.dropped_locals = out.stats.dropped;
            diag.extra.push(("d_norm".into(), out.stats.d_norm as f64));
            diag.extra.push(("nu".into(), out.stats.angles.nu));
            diag.extra.push(("tau".into(), out.stats.angles.tau));
            diag.extra.push(("d_max".into(), out.d_max as f64));
            (out.d_hat as f64, None)
        }
        Method::Wasserstein => {
            let splits = wasserstein::wasserstein_splits(
                cloud,
                cfg.alpha,
                cfg.splits,
                cfg.ground_metric,
                cfg.seed,
            )?;
            let valid: Vec<f64> = splits.iter().flatten().copied().collect();
            diag.invalid_splits = splits.len() - valid.len();
            if valid.is_empty() {
                return Err(Error::Degenerate(format!(
                    "all {} Wasserstein splits are invalid",
                    splits.len()
                )));
            }
            (valid.iter().sum::<f64>() / valid.len() as f64, None)
        }
    };
    if !(d_hat > 0.0 && d_hat.is_finite()) {
        return Err(Error::Degenerate(format!(
            "{} produced a non-positive estimate {d_hat}",
            cfg.method
        )));
    }
    Ok(EstimateReport {
        d_hat,
        locals,
        method: cfg.method,
        config: *cfg,
        diagnostics: diag,
    })
}

fn per_point<F>(
    nbrs: &[NeighborSet],
    cfg: &EstimatorConfig,
    diag: &mut Diagnostics,
    mut local: F,
) -> Result<(f64, Option<Vec<f64>>)>
where
    F: FnMut(&NeighborSet, &mut Diagnostics) -> Result<Option<f64>>,
{
    let mut locals = Vec::with_capacity(nbrs.len());
    for ns in nbrs {
        match local(ns, diag)? {
            Some(v) if v > 0.0 && v.is_finite() => locals.push(v),
            _ => {
                diag.dropped_locals += 1;
                locals.push(f64::NAN);
            }
        }
    }
    let kept: Vec<f64> = locals.iter().copied().filter(|v| v.is_finite()).collect();
    if kept.is_empty() {
        return Err(Error::Degenerate(format!(
            "{}: every neighbourhood is degenerate",
            cfg.method
        )));
    }
    let d = match cfg.aggregation {
        Aggregation::Mean => kept.iter().sum::<f64>() / kept.len() as f64,
        Aggregation::Vote => majority_vote(&kept),
    };
    Ok((d, Some(locals)))
}

/// Most frequent rounded value; ties go to the smaller value.
pub fn majority_vote(values: &[f64]) -> f64 {
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v.round() as i64).or_default() += 1;
    }
    let mut best = (0usize, 0i64);
    for (&key, &c) in &counts {
        if c > best.0 {
            best = (c, key);
        }
    }
    best.1 as f64
}
