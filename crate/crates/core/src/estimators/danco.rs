//! DanCo: joint norm and angle statistics matched against simulated balls.
//!
//! Three summaries describe a neighbourhood configuration: the integer MLE of
//! `d` from the min/max neighbour-distance ratios, and the von Mises fit
//! `(nu, tau)` to pairwise angles between neighbour offsets. The same
//! summaries are computed on uniform samples from the unit `q`-ball and the
//! `q` with the smallest total KL divergence wins.

use std::f64::consts::PI;

use super::config::{DancoOptions, DensityForm};
use crate::geometry::PointCloud;
use crate::neighbors::{knn_all, NeighborSet};
use crate::numerics::circular::TAU_CAP;
use crate::numerics::{fit_von_mises, quad_1d, sym_eigenvalues, RngStream, VonMisesFit};
use crate::{Error, Result};

/// Default cap on candidate dimensions.
pub const DEFAULT_D_MAX: usize = 30;
/// Relative eigenvalue cut for the affine rank of a cloud.
const RANK_TOL: f64 = 1e-10;
const SIM_STREAM: u64 = 0x44_414e_434f;

/// `log f_norm(r; d)` for `K` neighbours.
pub fn ln_f_norm(r: f64, d: f64, k: usize, form: DensityForm) -> f64 {
    if !(r > 0.0 && r < 1.0) {
        return f64::NEG_INFINITY;
    }
    let ln_r = r.ln();
    let tail_exp = match form {
        DensityForm::Corrected => d,
        DensityForm::AsPrinted => d - 1.0,
    };
    let tail = (-(tail_exp * ln_r).exp()).ln_1p();
    (k as f64).ln() + d.ln() + (d - 1.0) * ln_r + (k as f64 - 1.0) * tail
}

pub fn f_norm(r: f64, d: f64, k: usize, form: DensityForm) -> f64 {
    ln_f_norm(r, d, k, form).exp()
}

/// Integer `d` in `1..=d_max` maximising the norm-ratio log-likelihood.
/// Ties go to the smaller `d`.
pub fn danco_norm_mle(ratios: &[f64], k: usize, d_max: usize, form: DensityForm) -> Result<usize> {
    if ratios.is_empty() {
        return Err(Error::invalid("norm MLE needs at least one ratio"));
    }
    if d_max == 0 || k == 0 {
        return Err(Error::invalid("norm MLE needs d_max >= 1 and K >= 1"));
    }
    if let Some(r) = ratios.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
        return Err(Error::invalid(format!("distance ratio {r} outside (0, 1]")));
    }
    let mut best = (f64::NEG_INFINITY, 1);
    for d in 1..=d_max {
        let ll: f64 = ratios.iter().map(|&r| ln_f_norm(r, d as f64, k, form)).sum();
        if ll > best.0 {
            best = (ll, d);
        }
    }
    Ok(best.1)
}

/// `KL(f_norm(.; d1) || f_norm(.; d2))` by quadrature on `(0, 1)`.
pub fn kl_norm(d1: f64, d2: f64, k: usize, form: DensityForm) -> Result<f64> {
    quad_1d(
        |r| {
            let l1 = ln_f_norm(r, d1, k, form);
            if l1 == f64::NEG_INFINITY {
                return 0.0;
            }
            let l2 = ln_f_norm(r, d2, k, form);
            let v = l1.exp() * (l1 - l2);
            if v.is_nan() {
                0.0
            } else {
                v
            }
        },
        0.0,
        1.0,
    )
}

/// `KL(vM(a) || vM(b))` by quadrature over one period, with extra breakpoints
/// around the mode of `a` so that sharp peaks are resolved.
pub fn kl_von_mises(a: &VonMisesFit, b: &VonMisesFit) -> Result<f64> {
    let w = 1.0 / a.tau.max(1.0).sqrt();
    let mut cuts = vec![-PI, PI, 0.0];
    for s in [0.5, 2.0, 8.0, 32.0] {
        if s * w < PI {
            cuts.push(s * w);
            cuts.push(-s * w);
        }
    }
    cuts.sort_by(f64::total_cmp);
    let f = |phi: f64| {
        let th = a.nu + phi;
        let la = a.ln_pdf(th);
        la.exp() * (la - b.ln_pdf(th))
    };
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        total += quad_1d(f, pair[0], pair[1])?;
    }
    Ok(total)
}

/// Pairwise angles in `[0, pi]` between the offsets `x_i - x` of a
/// neighbourhood; zero offsets are skipped.
pub fn neighborhood_angles(ns: &NeighborSet, cloud: &PointCloud) -> Vec<f64> {
    let p = cloud.p();
    let x = cloud.row(ns.center);
    let mut offs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(ns.k());
    for (&j, &dist) in ns.indices.iter().zip(&ns.distances) {
        if dist > 0.0 {
            offs.push((dist, cloud.row(j).iter().zip(x).map(|(a, b)| a - b).collect()));
        }
    }
    let mut out = Vec::with_capacity(offs.len() * offs.len().saturating_sub(1) / 2);
    for i in 0..offs.len() {
        for j in i + 1..offs.len() {
            let dot: f64 = (0..p).map(|c| offs[i].1[c] * offs[j].1[c]).sum();
            let cos = (dot / (offs[i].0 * offs[j].0)).clamp(-1.0, 1.0);
            out.push(cos.acos());
        }
    }
    out
}

/// Summary statistics of a cloud at neighbourhood size `K`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DancoStats {
    pub d_norm: usize,
    pub angles: VonMisesFit,
    /// Neighbourhoods left out of the ratio or angle averages.
    pub dropped: usize,
}

pub fn danco_stats(
    cloud: &PointCloud,
    nbrs: &[NeighborSet],
    k: usize,
    d_max: usize,
    form: DensityForm,
) -> Result<DancoStats> {
    let mut ratios = Vec::with_capacity(nbrs.len());
    let mut nu = 0.0;
    let mut tau = 0.0;
    let mut fits = 0usize;
    let mut dropped = 0usize;
    for ns in nbrs {
        let dist = &ns.distances[..k];
        let r = dist[0] / dist[k - 1];
        if r > 0.0 && r < 1.0 {
            ratios.push(r);
        } else {
            dropped += 1;
        }
        let angles = neighborhood_angles(&ns.truncated(k), cloud);
        let fit = match angles.len() {
            0 => None,
            // K = 2: a single angle is the R = 1 limit of the fit.
            1 => Some(VonMisesFit { nu: angles[0], tau: TAU_CAP }),
            _ => Some(fit_von_mises(&angles)?),
        };
        if let Some(fit) = fit {
            nu += fit.nu;
            tau += fit.tau;
            fits += 1;
        } else {
            dropped += 1;
        }
    }
    if ratios.is_empty() || fits == 0 {
        return Err(Error::Degenerate(
            "every neighbourhood is degenerate for DanCo".into(),
        ));
    }
    Ok(DancoStats {
        d_norm: danco_norm_mle(&ratios, k, d_max, form)?,
        angles: VonMisesFit {
            nu: nu / fits as f64,
            tau: tau / fits as f64,
        },
        dropped,
    })
}

/// Dimension of the affine hull of the cloud, from the covariance spectrum.
pub fn affine_rank(cloud: &PointCloud) -> Result<usize> {
    let (n, p) = (cloud.n(), cloud.p());
    let mut mean = vec![0.0; p];
    for row in cloud.rows() {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut c = vec![0.0; p * p];
    let mut centred = vec![0.0; p];
    for row in cloud.rows() {
        for ((z, v), m) in centred.iter_mut().zip(row).zip(&mean) {
            *z = v - m;
        }
        for a in 0..p {
            for b in a..p {
                c[a * p + b] += centred[a] * centred[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            c[a * p + b] = c[b * p + a];
        }
    }
    let spec = sym_eigenvalues(&c, p)?;
    let top = spec.values[0];
    if !(top > 0.0) {
        return Ok(0);
    }
    Ok(spec.values.iter().filter(|&&v| v > RANK_TOL * top).count())
}

/// `n` uniform points in the unit `q`-ball.
pub fn sample_unit_ball(n: usize, q: usize, stream: &mut RngStream) -> Result<PointCloud> {
    let mut data = Vec::with_capacity(n * q);
    let mut z = vec![0.0; q];
    for _ in 0..n {
        let norm = loop {
            for v in &mut z {
                *v = stream.normal();
            }
            let s = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            if s > 0.0 {
                break s;
            }
        };
        let r = stream.uniform().powf(1.0 / q as f64);
        data.extend(z.iter().map(|v| v * r / norm));
    }
    PointCloud::new(n, q, data)
}

/// Outcome of a full DanCo run.
#[derive(Clone, Debug, PartialEq)]
pub struct DancoOutcome {
    pub d_hat: usize,
    pub stats: DancoStats,
    /// Total KL divergence per candidate `q = 1..`; empty when skipped.
    pub kl: Vec<f64>,
    pub d_max: usize,
}

pub fn danco_run(
    cloud: &PointCloud,
    nbrs: &[NeighborSet],
    k: usize,
    opts: &DancoOptions,
    seed: u64,
) -> Result<DancoOutcome> {
    let rank = affine_rank(cloud)?;
    if rank == 0 {
        return Err(Error::Degenerate("all points coincide".into()));
    }
    let d_max = opts.d_max.unwrap_or(DEFAULT_D_MAX).min(rank);
    if d_max == 0 {
        return Err(Error::invalid("DanCo d_max must be at least 1"));
    }
    let form = opts.density_form;
    let stats = danco_stats(cloud, nbrs, k, d_max, form)?;
    if opts.skip_threshold.is_some_and(|t| stats.d_norm <= t) {
        return Ok(DancoOutcome { d_hat: stats.d_norm, stats, kl: Vec::new(), d_max });
    }
    let n = cloud.n();
    let base = RngStream::new(seed, SIM_STREAM);
    let mut kl = Vec::with_capacity(d_max);
    for q in 1..=d_max {
        let mut total = 0.0;
        for rep in 0..opts.n_sim_reps {
            let mut s = base.child(q as u64).child(rep as u64);
            let sim = sample_unit_ball(n, q, &mut s)?;
            let sim_nbrs = knn_all(&sim, k)?;
            let sim_stats = danco_stats(&sim, &sim_nbrs, k, d_max, form)?;
            total += kl_norm(stats.d_norm as f64, sim_stats.d_norm as f64, k, form)?
                + kl_von_mises(&stats.angles, &sim_stats.angles)?;
        }
        kl.push(total / opts.n_sim_reps as f64);
    }
    let mut best = 0;
    for (i, v) in kl.iter().enumerate() {
        if *v < kl[best] {
            best = i;
        }
    }
    Ok(DancoOutcome { d_hat: best + 1, stats, kl, d_max })
}
