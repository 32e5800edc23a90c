//! Numerical check that a deformed sphere spans all of `R^{2d}`.
//!
//! The spanning argument evaluates the tangent vectors `v_j = dφ⁻¹(e_j)` at
//! `u = ±e_j` (or `±e_j / 2` when `2c` is not an integer). When `2c` is an
//! integer those two points give parallel vectors, since the modulation is
//! then 1-periodic like the angle itself, so the rank check adds the
//! quarter points `e_j / 4` and `e_j / 8`. The rank is taken over the union.

use std::f64::consts::PI;

use super::{ManifoldKind, ManifoldSpec};
use crate::numerics::sym_eigen;
use crate::{Error, Result};

const TAU: f64 = 2.0 * PI;
const RANK_TOL: f64 = 1e-8;

/// Exact derivative of the inverse chart along `e_j`, evaluated at `u`.
pub fn deformed_tangent(spec: &ManifoldSpec, u: &[f64], j: usize) -> Vec<f64> {
    let d = spec.d;
    let p = &spec.params;
    let uj = u[j];
    let rho = p.radius + p.tube * (TAU * p.freq * uj).cos();
    let drho = -TAU * p.freq * p.tube * (TAU * p.freq * uj).sin();
    let mut v = vec![0.0; 2 * d];
    v[j] = drho * (TAU * uj).cos() - TAU * rho * (TAU * uj).sin();
    v[j + d] = drho * (TAU * uj).sin() + TAU * rho * (TAU * uj).cos();
    v
}

fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() < 1e-12
}

/// Numeric rank of the collected tangent vectors (singular values above
/// `1e-8` of the largest).
pub fn tangent_rank_check(spec: &ManifoldSpec) -> Result<usize> {
    if spec.kind != ManifoldKind::DeformedSphere {
        return Err(Error::invalid("tangent rank check applies to deformed spheres only"));
    }
    let d = spec.d;
    let base = if is_integer(2.0 * spec.params.freq) { 1.0 } else { 0.5 };
    let offsets = [base, -base, 0.25, 0.125];
    let mut vectors = Vec::new();
    for j in 0..d {
        for &t in &offsets {
            let mut u = vec![0.0; d];
            u[j] = t;
            vectors.push(deformed_tangent(spec, &u, j));
        }
    }
    let w = 2 * d;
    // Singular values of the stacked matrix are square roots of the Gram
    // eigenvalues.
    let mut gram = vec![0.0; w * w];
    for v in &vectors {
        for a in 0..w {
            for b in 0..w {
                gram[a * w + b] += v[a] * v[b];
            }
        }
    }
    let spec_vals = sym_eigen(&gram, w)?.values;
    let sv: Vec<f64> = spec_vals.iter().map(|l| l.max(0.0).sqrt()).collect();
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|s| **s > RANK_TOL * top).count())
}
