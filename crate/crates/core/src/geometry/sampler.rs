//! Hausdorff-uniform sampling by rejection in chart coordinates, plus the
//! coordinate-space Beta sampler used for the nonuniform suites.

use std::f64::consts::PI;

use super::charts::{chart_domain, deformed_speed, eval, volume_distortion_unchecked};
use super::{embed_linear, Distribution, ManifoldKind, ManifoldSpec, PointCloud, SampleConfig};
use crate::numerics::rng::{sample_beta, RngStream};
use crate::{Error, Result};

const SAFETY: f64 = 1.1;
const MAX_PROPOSALS: u64 = 10_000_000;
const SCAN_POINTS: usize = 40_000;
const LINE_SCAN_POINTS: usize = 100_001;

const POINT_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

/// Upper bound `M` on `J_d` over the chart box, including a 10% margin.
///
/// Closed-form maxima are used where they exist; otherwise the maximum of a
/// dense grid scan.
pub fn jacobian_bound(spec: &ManifoldSpec) -> f64 {
    let p = &spec.params;
    let d = spec.d as i32;
    let max = match spec.kind {
        ManifoldKind::Sphere | ManifoldKind::Ball => p.radius.powi(d),
        ManifoldKind::GaussianSurface => {
            // |grad h| peaks at |u| = sigma with value h(0) e^{-1/2} / sigma.
            let h0 = (2.0 * PI * p.sigma_g * p.sigma_g).powf(-0.5 * spec.d as f64);
            let g = h0 * (-0.5f64).exp() / p.sigma_g;
            (1.0 + g * g).sqrt()
        }
        ManifoldKind::DeformedSphere => {
            let best = (0..LINE_SCAN_POINTS)
                .map(|i| {
                    let u = -PI + 2.0 * PI * i as f64 / (LINE_SCAN_POINTS - 1) as f64;
                    deformed_speed(spec, u)
                })
                .fold(0.0, f64::max);
            best.powi(d)
        }
        ManifoldKind::Cylinder | ManifoldKind::Helix => volume_distortion_unchecked(spec, &[0.0; 2][..spec.d]),
        ManifoldKind::Torus => p.tube * (p.radius + p.tube),
        ManifoldKind::SwissRoll | ManifoldKind::Mobius | ManifoldKind::Hyperboloid => grid_scan_max(spec),
    };
    SAFETY * max
}

fn grid_scan_max(spec: &ManifoldSpec) -> f64 {
    let dom = chart_domain(spec);
    let d = dom.len();
    let per_axis = ((SCAN_POINTS as f64).powf(1.0 / d as f64).floor() as usize).max(2);
    let total = per_axis.pow(d as u32);
    let mut u = vec![0.0; d];
    let mut best = 0.0f64;
    for mut idx in 0..total {
        for (k, &(lo, hi)) in dom.iter().enumerate() {
            let i = idx % per_axis;
            idx /= per_axis;
            u[k] = lo + (hi - lo) * i as f64 / (per_axis - 1) as f64;
        }
        best = best.max(volume_distortion_unchecked(spec, &u));
    }
    best
}

/// `J_d(u) / M`, the Algorithm-1 acceptance probability for the uniform law.
pub fn acceptance_probability(spec: &ManifoldSpec, u: &[f64], bound: f64) -> f64 {
    volume_distortion_unchecked(spec, u) / bound
}

fn uniform_in_box(stream: &mut RngStream, dom: &[(f64, f64)], u: &mut [f64]) {
    for (x, &(lo, hi)) in u.iter_mut().zip(dom) {
        *x = stream.uniform_range(lo, hi);
    }
}

/// Draw `cfg.n` points in native coordinates (row-major, `native_dim` wide).
pub fn sample_native(spec: &ManifoldSpec, cfg: &SampleConfig, stream: &mut RngStream) -> Result<Vec<f64>> {
    spec.validate()?;
    cfg.validate()?;
    let w = spec.native_dim();
    let n = cfg.n;
    let mut out = vec![0.0; n * w];
    let dom = chart_domain(spec);
    let mut u = vec![0.0; dom.len()];
    match (cfg.distribution, spec.kind) {
        (Distribution::Uniform, ManifoldKind::Sphere) => {
            for row in out.chunks_exact_mut(w) {
                gaussian_direction(stream, row);
                row.iter_mut().for_each(|x| *x *= spec.params.radius);
            }
        }
        (Distribution::Uniform, ManifoldKind::Ball) => {
            let inv_d = 1.0 / spec.d as f64;
            for row in out.chunks_exact_mut(w) {
                gaussian_direction(stream, row);
                let r = spec.params.radius * stream.uniform().powf(inv_d);
                row.iter_mut().for_each(|x| *x *= r);
            }
        }
        (Distribution::Uniform, _) => {
            let bound = jacobian_bound(spec);
            let mut clipped = false;
            for row in out.chunks_exact_mut(w) {
                let mut proposals = 0u64;
                loop {
                    if proposals == MAX_PROPOSALS {
                        return Err(Error::RejectionBudget(MAX_PROPOSALS));
                    }
                    proposals += 1;
                    uniform_in_box(stream, &dom, &mut u);
                    let accept = acceptance_probability(spec, &u, bound);
                    if accept > 1.0 && !clipped {
                        log::warn!("{} acceptance probability {accept} exceeds 1; bound too small", spec.kind);
                        clipped = true;
                    }
                    if stream.uniform() < accept {
                        break;
                    }
                }
                eval(spec, &u, row);
            }
        }
        (Distribution::Beta { a, b }, _) => {
            for row in out.chunks_exact_mut(w) {
                for (x, &(lo, hi)) in u.iter_mut().zip(&dom) {
                    *x = lo + (hi - lo) * sample_beta(stream, a, b)?;
                }
                eval(spec, &u, row);
            }
        }
    }
    Ok(out)
}

/// Normalised standard Gaussian vector; redrawn in the (measure-zero) case
/// of an all-zero draw.
fn gaussian_direction(stream: &mut RngStream, row: &mut [f64]) {
    loop {
        row.iter_mut().for_each(|x| *x = stream.normal());
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|x| *x /= norm);
            return;
        }
    }
}

/// Sample, embed into `R^{ambient_p}`, then add isotropic Gaussian noise.
pub fn sample_manifold(spec: &ManifoldSpec, cfg: &SampleConfig) -> Result<PointCloud> {
    let base = RngStream::new(cfg.seed, cfg.stream);
    let mut points = base.child(POINT_STREAM);
    let native = sample_native(spec, cfg, &mut points)?;
    let cloud = embed_linear(&native, spec.native_dim(), spec.ambient_p, spec.embed_seed)?;
    let cloud = if cfg.noise_sigma > 0.0 {
        let mut noise = base.child(NOISE_STREAM);
        let data = cloud
            .data()
            .iter()
            .map(|x| x + cfg.noise_sigma * noise.normal())
            .collect();
        PointCloud::new(cloud.n(), cloud.p(), data)?
    } else {
        cloud
    };
    Ok(cloud.with_provenance(spec.clone(), *cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_rows_have_unit_norm() {
        let spec = ManifoldSpec::sphere(5, 1.0, 10);
        let cloud = sample_manifold(&spec, &SampleConfig::uniform(200, 3)).unwrap();
        for row in cloud.rows() {
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic() {
        let spec = ManifoldSpec::new(ManifoldKind::Mobius, 2).with_ambient(4);
        let cfg = SampleConfig::uniform(50, 11).with_noise(0.1);
        assert_eq!(sample_manifold(&spec, &cfg).unwrap(), sample_manifold(&spec, &cfg).unwrap());
        let other = cfg.with_stream(1);
        assert_ne!(sample_manifold(&spec, &cfg).unwrap(), sample_manifold(&spec, &other).unwrap());
    }

    #[test]
    fn beta_pushforward_stays_in_domain() {
        let spec = ManifoldSpec::new(ManifoldKind::Torus, 2);
        let cfg = SampleConfig {
            distribution: Distribution::DEFAULT_BETA,
            ..SampleConfig::uniform(100, 5)
        };
        let native = sample_native(&spec, &cfg, &mut RngStream::new(5, 0)).unwrap();
        for row in native.chunks_exact(3) {
            let rho = row[0].hypot(row[1]) - 2.0;
            assert!((rho * rho + row[2] * row[2] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn ball_radius_law() {
        // P(|x| <= 1/2) = 2^{-d} for the uniform d-ball.
        let spec = ManifoldSpec::new(ManifoldKind::Ball, 3);
        let cloud = sample_manifold(&spec, &SampleConfig::uniform(40_000, 1)).unwrap();
        let inside = cloud
            .rows()
            .filter(|r| r.iter().map(|x| x * x).sum::<f64>() <= 0.25)
            .count() as f64
            / 40_000.0;
        assert!((inside - 0.125).abs() < 0.01, "{inside}");
    }
}
