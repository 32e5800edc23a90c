//! Stable-window hyperparameter selection.
//!
//! Estimates over an increasing hyperparameter grid are scanned with a
//! width-3 window. If the least variable window is clearly calmer than the
//! most variable one (`s_max > 1.25 s_min`) the estimate is the mean over that
//! window; otherwise it is the mean over the whole grid.

use rayon::prelude::*;

use crate::estimators::{estimate_with_neighbors, required_k, EstimateReport, EstimatorConfig, Method};
use crate::geometry::PointCloud;
use crate::neighbors::knn_all;
use crate::numerics::stats::population_sd;
use crate::{Error, Result};

pub const WINDOW: usize = 3;
pub const STABILITY_RATIO: f64 = 1.25;

/// Default neighbourhood sizes, before clipping to `n / 4`.
pub const K_GRID: [f64; 7] = [5.0, 10.0, 20.0, 30.0, 40.0, 50.0, 100.0];
pub const DANCO_K_GRID: [f64; 9] = [4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0];
pub const ALPHA_GRID: [f64; 7] = [1.2, 1.6, 2.0, 4.0, 6.0, 8.0, 10.0];

#[derive(Clone, Debug, PartialEq)]
pub struct TuningGrid {
    pub values: Vec<f64>,
    pub estimates: Vec<f64>,
}

impl TuningGrid {
    pub fn new(values: Vec<f64>, estimates: Vec<f64>) -> Result<Self> {
        if values.len() != estimates.len() {
            return Err(Error::invalid(format!(
                "{} grid values but {} estimates",
                values.len(),
                estimates.len()
            )));
        }
        if values.len() < WINDOW {
            return Err(Error::Infeasible(format!(
                "tuning needs at least {WINDOW} grid values, got {}",
                values.len()
            )));
        }
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("grid values must be strictly increasing"));
        }
        Ok(Self { values, estimates })
    }
}

/// 1-based inclusive index range `(k1, k2)` selected from the estimates.
pub fn stable_window(estimates: &[f64]) -> Result<(usize, usize)> {
    let k_max = estimates.len();
    if k_max < WINDOW {
        return Err(Error::Infeasible(format!(
            "stable window needs at least {WINDOW} estimates, got {k_max}"
        )));
    }
    let mut s_min = f64::INFINITY;
    let mut s_max = f64::NEG_INFINITY;
    let mut k_star = 0;
    for (k, w) in estimates.windows(WINDOW).enumerate() {
        let s = population_sd(w).unwrap_or(f64::NAN);
        if s < s_min {
            s_min = s;
            k_star = k;
        }
        if s > s_max {
            s_max = s;
        }
    }
    if s_max > STABILITY_RATIO * s_min {
        Ok((k_star + 1, k_star + WINDOW))
    } else {
        Ok((1, k_max))
    }
}

/// Mean of the estimates over the selected window.
pub fn windowed_mean(estimates: &[f64]) -> Result<(f64, (usize, usize))> {
    let (k1, k2) = stable_window(estimates)?;
    let sel = &estimates[k1 - 1..k2];
    Ok((sel.iter().sum::<f64>() / sel.len() as f64, (k1, k2)))
}

/// Default grid for a method and sample size; `None` for TwoNN.
pub fn default_grid(method: Method, n: usize) -> Option<Vec<f64>> {
    match method {
        Method::Twonn => None,
        Method::Wasserstein => Some(
            ALPHA_GRID
                .iter()
                .copied()
                .filter(|a| n >= 2 + 2 * a.ceil() as usize)
                .collect(),
        ),
        Method::Danco => Some(DANCO_K_GRID.iter().copied().filter(|&k| (k as usize) < n).collect()),
        _ => Some(
            K_GRID
                .iter()
                .copied()
                .filter(|&k| k <= n as f64 / 4.0 && (k as usize) < n)
                .collect(),
        ),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TunedEstimate {
    /// Report of the tuned estimate; `d_hat` is the windowed mean.
    pub report: EstimateReport,
    /// Grid and per-value estimates; `None` for parameter-free methods.
    pub grid: Option<TuningGrid>,
    pub window: Option<(usize, usize)>,
}

impl TunedEstimate {
    pub fn d_hat(&self) -> f64 {
        self.report.d_hat
    }
}

fn with_value(base: &EstimatorConfig, v: f64) -> EstimatorConfig {
    let mut cfg = *base;
    if base.method == Method::Wasserstein {
        cfg.alpha = v;
    } else {
        cfg.k = v as usize;
    }
    cfg
}

/// Run `base.method` at every grid value and average over the stable window.
///
/// `grid` defaults to [`default_grid`]. K values must be integers.
pub fn tuned_estimate(cloud: &PointCloud, base: &EstimatorConfig, grid: Option<&[f64]>) -> Result<TunedEstimate> {
    let values = match grid {
        Some(g) => g.to_vec(),
        None => match default_grid(base.method, cloud.n()) {
            Some(g) => g,
            None => {
                let report = crate::estimators::estimate(cloud, base)?;
                return Ok(TunedEstimate { report, grid: None, window: None });
            }
        },
    };
    if base.method == Method::Twonn {
        return Err(Error::invalid("TwoNN has no hyperparameter to tune"));
    }
    if base.method != Method::Wasserstein && values.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
        return Err(Error::invalid("K grid values must be positive integers"));
    }
    if values.len() < WINDOW {
        return Err(Error::Infeasible(format!(
            "grid has {} usable values for n={}, need at least {WINDOW}",
            values.len(),
            cloud.n()
        )));
    }
    let configs: Vec<EstimatorConfig> = values.iter().map(|&v| with_value(base, v)).collect();
    for c in &configs {
        c.validate(cloud.n())?;
    }
    let max_k = configs.iter().filter_map(required_k).max();
    let nbrs = match max_k {
        Some(k) => knn_all(cloud, k)?,
        None => Vec::new(),
    };
    let reports: Vec<EstimateReport> = configs
        .par_iter()
        .map(|c| estimate_with_neighbors(cloud, &nbrs, c))
        .collect::<Result<_>>()?;
    let estimates: Vec<f64> = reports.iter().map(|r| r.d_hat).collect();
    let grid = TuningGrid::new(values, estimates)?;
    let (d_hat, window) = windowed_mean(&grid.estimates)?;
    let mut report = reports[window.0 - 1].clone();
    report.d_hat = d_hat;
    report.locals = None;
    report.config = *base;
    Ok(TunedEstimate { report, grid: Some(grid), window: Some(window) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_examples() {
        assert_eq!(stable_window(&[6.0, 5.5, 5.0, 5.0, 5.0, 4.5, 4.0]).unwrap(), (3, 5));
        assert_eq!(stable_window(&[5.0; 7]).unwrap(), (1, 7));
        assert_eq!(stable_window(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap(), (1, 6));
        assert!(stable_window(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn windowed_means() {
        assert_eq!(windowed_mean(&[6.0, 5.5, 5.0, 5.0, 5.0, 4.5, 4.0]).unwrap().0, 5.0);
        assert_eq!(windowed_mean(&[5.0; 7]).unwrap(), (5.0, (1, 7)));
    }

    #[test]
    fn first_window_wins_ties() {
        // Two zero-variance windows: the first is chosen.
        assert_eq!(stable_window(&[1.0, 1.0, 1.0, 9.0, 2.0, 2.0, 2.0]).unwrap(), (1, 3));
    }

    #[test]
    fn grids_clip_with_n() {
        assert_eq!(default_grid(Method::Mle, 1000).unwrap().len(), 7);
        assert_eq!(default_grid(Method::Mle, 100).unwrap(), vec![5.0, 10.0, 20.0]);
        assert_eq!(default_grid(Method::Twonn, 100), None);
        assert_eq!(default_grid(Method::Wasserstein, 10).unwrap(), vec![1.2, 1.6, 2.0, 4.0]);
    }

    #[test]
    fn grid_validation() {
        assert!(TuningGrid::new(vec![1.0, 2.0, 2.0], vec![0.0; 3]).is_err());
        assert!(TuningGrid::new(vec![1.0, 2.0], vec![0.0; 2]).is_err());
        assert!(TuningGrid::new(vec![1.0, 2.0, 3.0], vec![0.0; 2]).is_err());
    }
}
