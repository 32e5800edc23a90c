//! Inverse charts and volume distortion factors.
//!
//! Every kind is parametrised over a closed box of chart coordinates so that
//! the coordinate-space Beta sampler has somewhere to put its draws.
//!
//! | kind | coordinates | image |
//! |---|---|---|
//! | sphere | colatitudes `θ_1..θ_{d-1}` in `[0, π]`, longitude `φ` in `[0, 2π]` | `R`-sphere in `R^{d+1}`, `θ = 0` at `+e_{d+1}` |
//! | ball | `s` in `[0, 1]`, then sphere angles of `S^{d-1}` (`d = 1`: `s` in `[-1, 1]`) | `R s ω` |
//! | gaussian_surface | `u` in `[-1, 1]^d` | graph of the `N(0, σ_g² I)` density |
//! | deformed_sphere | `u` in `[-π, π]^d` | the `2d`-dimensional radially modulated torus |
//! | cylinder | `t` in `[0, 2π]`, `h` in `[0, 1]` | `(R cos t, R sin t, h)` |
//! | helix | `t` in `[0, 1]` | `(R cos 6πt, R sin 6πt, t)` |
//! | swiss_roll | `v` in `[1.5π, 4.5π]`, `h` in `[0, 10]` | `(v cos v, v sin v, h)` |
//! | mobius | `t` in `[0, 2π]`, `w` in `[-1, 1]` | half-twisted band of width 1 |
//! | torus | `a, v` in `[0, 2π]` | centre radius `R`, tube `r` |
//! | hyperboloid | `u` in `[-1, 1]`, `v` in `[0, 2π]` | `(√(1+u²) cos v, √(1+u²) sin v, u)` |

use std::f64::consts::PI;

use super::{ManifoldKind, ManifoldSpec};
use crate::{Error, Result};

const TAU: f64 = 2.0 * PI;
const FD_STEP: f64 = 1e-6;

/// Closed coordinate box `[lo_i, hi_i]` of the chart.
pub fn chart_domain(spec: &ManifoldSpec) -> Vec<(f64, f64)> {
    let d = spec.d;
    match spec.kind {
        ManifoldKind::Sphere => sphere_angle_box(d),
        ManifoldKind::Ball => {
            if d == 1 {
                vec![(-1.0, 1.0)]
            } else {
                let mut b = vec![(0.0, 1.0)];
                b.extend(sphere_angle_box(d - 1));
                b
            }
        }
        ManifoldKind::GaussianSurface => vec![(-1.0, 1.0); d],
        ManifoldKind::DeformedSphere => vec![(-PI, PI); d],
        ManifoldKind::Cylinder => vec![(0.0, TAU), (0.0, 1.0)],
        ManifoldKind::Helix => vec![(0.0, 1.0)],
        ManifoldKind::SwissRoll => vec![(1.5 * PI, 4.5 * PI), (0.0, 10.0)],
        ManifoldKind::Mobius => vec![(0.0, TAU), (-1.0, 1.0)],
        ManifoldKind::Torus => vec![(0.0, TAU), (0.0, TAU)],
        ManifoldKind::Hyperboloid => vec![(-1.0, 1.0), (0.0, TAU)],
    }
}

fn sphere_angle_box(d: usize) -> Vec<(f64, f64)> {
    let mut b = vec![(0.0, PI); d.saturating_sub(1)];
    b.push((0.0, TAU));
    b
}

fn check_domain(spec: &ManifoldSpec, u: &[f64]) -> Result<()> {
    let dom = chart_domain(spec);
    if u.len() != dom.len() {
        return Err(Error::invalid(format!(
            "{} chart takes {} coordinates, got {}",
            spec.kind,
            dom.len(),
            u.len()
        )));
    }
    for (i, (&x, &(lo, hi))) in u.iter().zip(&dom).enumerate() {
        if !(x >= lo && x <= hi) {
            return Err(Error::OutOfDomain(format!(
                "coordinate {i} = {x} not in [{lo}, {hi}] for {}",
                spec.kind
            )));
        }
    }
    Ok(())
}

/// Map chart coordinates to a point of the manifold in native coordinates.
pub fn chart_inverse(spec: &ManifoldSpec, u: &[f64]) -> Result<Vec<f64>> {
    check_domain(spec, u)?;
    let mut out = vec![0.0; spec.native_dim()];
    eval(spec, u, &mut out);
    Ok(out)
}

/// Unit sphere `S^m` in `R^{m+1}` from `m - 1` colatitudes and a longitude.
fn unit_sphere(angles: &[f64], out: &mut [f64]) {
    let m = angles.len();
    debug_assert_eq!(out.len(), m + 1);
    let mut s = 1.0;
    for (i, &theta) in angles[..m - 1].iter().enumerate() {
        out[m - i] = s * theta.cos();
        s *= theta.sin();
    }
    let phi = angles[m - 1];
    out[0] = s * phi.cos();
    out[1] = s * phi.sin();
}

/// Evaluate the inverse chart without checking the domain. Used directly by
/// finite differences, which step slightly outside the box at its faces.
pub(crate) fn eval(spec: &ManifoldSpec, u: &[f64], out: &mut [f64]) {
    let p = &spec.params;
    match spec.kind {
        ManifoldKind::Sphere => {
            unit_sphere(u, out);
            out.iter_mut().for_each(|x| *x *= p.radius);
        }
        ManifoldKind::Ball => {
            if spec.d == 1 {
                out[0] = p.radius * u[0];
            } else {
                unit_sphere(&u[1..], out);
                let scale = p.radius * u[0];
                out.iter_mut().for_each(|x| *x *= scale);
            }
        }
        ManifoldKind::GaussianSurface => {
            out[..spec.d].copy_from_slice(u);
            out[spec.d] = gaussian_height(u, p.sigma_g);
        }
        ManifoldKind::DeformedSphere => {
            let d = spec.d;
            for (j, &uj) in u.iter().enumerate() {
                let rho = p.radius + p.tube * (TAU * p.freq * uj).cos();
                out[j] = rho * (TAU * uj).cos();
                out[j + d] = rho * (TAU * uj).sin();
            }
        }
        ManifoldKind::Cylinder => {
            out[0] = p.radius * u[0].cos();
            out[1] = p.radius * u[0].sin();
            out[2] = u[1];
        }
        ManifoldKind::Helix => {
            let a = 3.0 * TAU * u[0];
            out[0] = p.radius * a.cos();
            out[1] = p.radius * a.sin();
            out[2] = u[0];
        }
        ManifoldKind::SwissRoll => {
            let v = u[0];
            out[0] = v * v.cos();
            out[1] = v * v.sin();
            out[2] = u[1];
        }
        ManifoldKind::Mobius => {
            let (t, w) = (u[0], u[1]);
            let rho = 1.0 + 0.5 * w * (0.5 * t).cos();
            out[0] = rho * t.cos();
            out[1] = rho * t.sin();
            out[2] = 0.5 * w * (0.5 * t).sin();
        }
        ManifoldKind::Torus => {
            let (a, v) = (u[0], u[1]);
            let rho = p.radius + p.tube * v.cos();
            out[0] = rho * a.cos();
            out[1] = rho * a.sin();
            out[2] = p.tube * v.sin();
        }
        ManifoldKind::Hyperboloid => {
            let (s, v) = (u[0], u[1]);
            let rho = (1.0 + s * s).sqrt();
            out[0] = rho * v.cos();
            out[1] = rho * v.sin();
            out[2] = s;
        }
    }
}

fn gaussian_height(u: &[f64], sigma: f64) -> f64 {
    let d = u.len() as f64;
    let r2: f64 = u.iter().map(|x| x * x).sum();
    (TAU * sigma * sigma).powf(-0.5 * d) * (-0.5 * r2 / (sigma * sigma)).exp()
}

/// Product of `sin^{m-i}(θ_i)` over the colatitudes of `S^m`.
fn sphere_angle_factor(angles: &[f64]) -> f64 {
    let m = angles.len();
    angles[..m - 1]
        .iter()
        .enumerate()
        .map(|(i, t)| t.sin().abs().powi((m - 1 - i) as i32))
        .product()
}

/// Speed of one deformed-sphere coordinate circle at `u_j`.
pub(crate) fn deformed_speed(spec: &ManifoldSpec, uj: f64) -> f64 {
    let p = &spec.params;
    let rho = p.radius + p.tube * (TAU * p.freq * uj).cos();
    let drho = -TAU * p.freq * p.tube * (TAU * p.freq * uj).sin();
    drho.hypot(TAU * rho)
}

/// `J_d = sqrt(det(Dφ⁻¹ᵀ Dφ⁻¹))`; analytic where the chart allows it,
/// Richardson-extrapolated central differences otherwise.
pub fn volume_distortion(spec: &ManifoldSpec, u: &[f64]) -> Result<f64> {
    check_domain(spec, u)?;
    Ok(volume_distortion_unchecked(spec, u))
}

pub(crate) fn volume_distortion_unchecked(spec: &ManifoldSpec, u: &[f64]) -> f64 {
    let p = &spec.params;
    let d = spec.d;
    match spec.kind {
        ManifoldKind::Sphere => {
            if d == 1 {
                p.radius
            } else {
                p.radius.powi(d as i32) * sphere_angle_factor(u)
            }
        }
        ManifoldKind::Ball => {
            if d == 1 {
                p.radius
            } else {
                let s = u[0].abs();
                let ang = if d == 2 { 1.0 } else { sphere_angle_factor(&u[1..]) };
                p.radius.powi(d as i32) * s.powi(d as i32 - 1) * ang
            }
        }
        ManifoldKind::DeformedSphere => u.iter().map(|&uj| deformed_speed(spec, uj)).product(),
        ManifoldKind::Cylinder => p.radius,
        ManifoldKind::Helix => (3.0 * TAU * p.radius).hypot(1.0),
        ManifoldKind::Torus => p.tube * (p.radius + p.tube * u[1].cos()).abs(),
        ManifoldKind::GaussianSurface
        | ManifoldKind::SwissRoll
        | ManifoldKind::Mobius
        | ManifoldKind::Hyperboloid => volume_distortion_fd_unchecked(spec, u),
    }
}

/// Finite-difference `J_d` for any kind (step 1e-6, one Richardson step).
pub fn volume_distortion_fd(spec: &ManifoldSpec, u: &[f64]) -> Result<f64> {
    check_domain(spec, u)?;
    Ok(volume_distortion_fd_unchecked(spec, u))
}

fn volume_distortion_fd_unchecked(spec: &ManifoldSpec, u: &[f64]) -> f64 {
    let jac = jacobian_fd(spec, u);
    gram_sqrt_det(&jac, spec.native_dim(), u.len())
}

/// Jacobian of the inverse chart, row-major `w x d`.
pub(crate) fn jacobian_fd(spec: &ManifoldSpec, u: &[f64]) -> Vec<f64> {
    let w = spec.native_dim();
    let d = u.len();
    let mut jac = vec![0.0; w * d];
    let mut plus = vec![0.0; w];
    let mut minus = vec![0.0; w];
    let mut x = u.to_vec();
    let mut central = |x: &mut Vec<f64>, j: usize, h: f64, out: &mut [f64]| {
        let orig = x[j];
        x[j] = orig + h;
        eval(spec, x, &mut plus);
        x[j] = orig - h;
        eval(spec, x, &mut minus);
        x[j] = orig;
        for i in 0..w {
            out[i] = (plus[i] - minus[i]) / (2.0 * h);
        }
    };
    let mut coarse = vec![0.0; w];
    let mut fine = vec![0.0; w];
    for j in 0..d {
        central(&mut x, j, FD_STEP, &mut coarse);
        central(&mut x, j, 0.5 * FD_STEP, &mut fine);
        for i in 0..w {
            jac[i * d + j] = (4.0 * fine[i] - coarse[i]) / 3.0;
        }
    }
    jac
}

/// `sqrt(det(JᵀJ))` for a row-major `w x d` matrix.
pub(crate) fn gram_sqrt_det(jac: &[f64], w: usize, d: usize) -> f64 {
    let mut g = vec![0.0; d * d];
    for a in 0..d {
        for b in a..d {
            let s: f64 = (0..w).map(|i| jac[i * d + a] * jac[i * d + b]).sum();
            g[a * d + b] = s;
            g[b * d + a] = s;
        }
    }
    let det = nalgebra::DMatrix::from_row_slice(d, d, &g).determinant();
    det.max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ManifoldKind;

    #[test]
    fn deformed_circle_at_zero() {
        let mut spec = ManifoldSpec::deformed_sphere(1, 1.0);
        spec.params.tube = 0.5;
        let x = chart_inverse(&spec, &[0.0]).unwrap();
        assert!((x[0] - 1.5).abs() < 1e-15 && x[1].abs() < 1e-15);
    }

    #[test]
    fn sphere_north_pole() {
        let spec = ManifoldSpec::sphere(2, 1.0, 3);
        let x = chart_inverse(&spec, &[0.0, 0.0]).unwrap();
        assert_eq!(x, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let spec = ManifoldSpec::sphere(2, 1.0, 3);
        assert!(matches!(chart_inverse(&spec, &[4.0, 0.0]), Err(Error::OutOfDomain(_))));
        assert!(chart_inverse(&spec, &[0.0]).is_err());
        assert!(volume_distortion(&spec, &[0.1, -1.0]).is_err());
    }

    #[test]
    fn cylinder_is_isometric() {
        let spec = ManifoldSpec::new(ManifoldKind::Cylinder, 2);
        for u in [[0.0, 0.0], [1.0, 0.5], [6.0, 1.0]] {
            assert_eq!(volume_distortion(&spec, &u).unwrap(), 1.0);
            assert!((volume_distortion_fd(&spec, &u).unwrap() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn sphere_jacobian_is_sin_colatitude() {
        let spec = ManifoldSpec::sphere(2, 1.0, 3);
        for theta in [0.1, 0.7, 1.5, 2.9] {
            let j = volume_distortion(&spec, &[theta, 1.0]).unwrap();
            assert!((j - f64::sin(theta)).abs() < 1e-6);
        }
    }

    #[test]
    fn analytic_and_fd_agree_everywhere() {
        let specs = [
            ManifoldSpec::sphere(4, 1.7, 5),
            ManifoldSpec::new(ManifoldKind::Ball, 3),
            ManifoldSpec::new(ManifoldKind::Ball, 2),
            ManifoldSpec::deformed_sphere(3, 0.3),
            ManifoldSpec::new(ManifoldKind::Helix, 1),
            ManifoldSpec::new(ManifoldKind::Torus, 2),
        ];
        for spec in &specs {
            let dom = chart_domain(spec);
            let u: Vec<f64> = dom.iter().map(|(lo, hi)| lo + 0.37 * (hi - lo)).collect();
            let a = volume_distortion(spec, &u).unwrap();
            let f = volume_distortion_fd(spec, &u).unwrap();
            assert!((a - f).abs() <= 1e-6 * a.max(1.0), "{:?}: {a} vs {f}", spec.kind);
        }
    }

    #[test]
    fn hyperboloid_closed_form() {
        let spec = ManifoldSpec::new(ManifoldKind::Hyperboloid, 2);
        for s in [-1.0, -0.3, 0.0, 0.8] {
            let j = volume_distortion(&spec, &[s, 2.0]).unwrap();
            assert!((j - (1.0 + 2.0 * s * s).sqrt()).abs() < 1e-7);
        }
    }
}
