//! Maximum-likelihood fitting of the von Mises distribution.

use std::f64::consts::PI;

use super::special::{bessel_ratio_a, ln_bessel_i0};
use crate::{Error, Result};

/// Concentration reported when the sample is (numerically) a point mass.
pub const TAU_CAP: f64 = 1e4;
const NEWTON_TOL: f64 = 1e-10;

/// Mean direction `nu` in `(-pi, pi]` and concentration `tau >= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VonMisesFit {
    pub nu: f64,
    pub tau: f64,
}

impl VonMisesFit {
    /// Log-density at `theta`, normalised by `2 pi I_0(tau)`.
    pub fn ln_pdf(&self, theta: f64) -> f64 {
        self.tau * (theta - self.nu).cos() - (2.0 * PI).ln() - ln_bessel_i0(self.tau).unwrap_or(f64::INFINITY)
    }
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Solve `I_1(tau) / I_0(tau) = r_bar` for `tau`.
pub fn concentration_from_resultant(r_bar: f64) -> Result<f64> {
    if !(0.0..=1.0 + 1e-12).contains(&r_bar) {
        return Err(Error::invalid(format!("mean resultant length {r_bar} outside [0, 1]")));
    }
    if r_bar < 1e-14 {
        return Ok(0.0);
    }
    let a_cap = bessel_ratio_a(TAU_CAP)?;
    if r_bar >= a_cap {
        return Ok(TAU_CAP);
    }
    // Best & Fisher starting value.
    let mut tau = if r_bar < 0.53 {
        2.0 * r_bar + r_bar.powi(3) + 5.0 * r_bar.powi(5) / 6.0
    } else if r_bar < 0.85 {
        -0.4 + 1.39 * r_bar + 0.43 / (1.0 - r_bar)
    } else {
        1.0 / (r_bar.powi(3) - 4.0 * r_bar.powi(2) + 3.0 * r_bar)
    };
    let (mut lo, mut hi) = (0.0f64, TAU_CAP);
    tau = tau.clamp(1e-12, TAU_CAP);
    for _ in 0..200 {
        let a = bessel_ratio_a(tau)?;
        let f = a - r_bar;
        if f > 0.0 {
            hi = tau;
        } else {
            lo = tau;
        }
        let deriv = 1.0 - a / tau - a * a;
        let mut next = tau - f / deriv;
        if !next.is_finite() || next <= lo || next >= hi || deriv <= 0.0 {
            next = 0.5 * (lo + hi);
        }
        if (next - tau).abs() <= NEWTON_TOL * tau.max(1.0) {
            return Ok(next);
        }
        tau = next;
    }
    Err(Error::NotConverged {
        what: "von Mises concentration",
        iterations: 200,
    })
}

/// Fit `(nu, tau)` to a sample of angles in radians.
pub fn fit_von_mises(angles: &[f64]) -> Result<VonMisesFit> {
    if angles.len() < 2 {
        return Err(Error::invalid("von Mises fit needs at least 2 angles"));
    }
    if angles.iter().any(|a| !a.is_finite()) {
        return Err(Error::NonFinite("von Mises angles"));
    }
    let n = angles.len() as f64;
    let (s, c) = angles
        .iter()
        .fold((0.0, 0.0), |(s, c), &a| (s + a.sin(), c + a.cos()));
    let (s, c) = (s / n, c / n);
    let r_bar = s.hypot(c).min(1.0);
    let nu = if r_bar == 0.0 { 0.0 } else { wrap_angle(s.atan2(c)) };
    let tau = concentration_from_resultant(r_bar)?;
    Ok(VonMisesFit { nu, tau })
}
