//! Modified Bessel functions of the first kind, orders 0 and 1.
//!
//! Power series below `x = 15`, Hankel asymptotic expansion above. The
//! exponentially scaled forms `e^{-x} I_n(x)` stay finite for any argument
//! and are what the von Mises code uses.

use crate::{Error, Result};

const SERIES_LIMIT: f64 = 15.0;

fn series(x: f64, order: u32) -> f64 {
    let q = 0.25 * x * x;
    let (mut term, mut sum) = if order == 0 { (1.0, 1.0) } else { (0.5 * x, 0.5 * x) };
    let mut k = 1.0f64;
    loop {
        let denom = if order == 0 { k * k } else { k * (k + 1.0) };
        term *= q / denom;
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
        k += 1.0;
    }
    sum
}

/// `sqrt(2 pi x) e^{-x} I_nu(x)` via the asymptotic series, truncated at its
/// smallest term.
fn asymptotic_scaled(x: f64, order: u32) -> f64 {
    let mu = 4.0 * (order as f64).powi(2);
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut k = 1.0f64;
    loop {
        let next = -term * (mu - (2.0 * k - 1.0).powi(2)) / (k * 8.0 * x);
        if next.abs() >= term.abs() || next.abs() < 1e-17 * sum.abs() {
            break;
        }
        sum += next;
        term = next;
        k += 1.0;
    }
    sum
}

fn check(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::invalid(format!("Bessel argument must be finite and >= 0, got {x}")));
    }
    Ok(())
}

/// `I_0(x)` for `x >= 0`.
pub fn bessel_i0(x: f64) -> Result<f64> {
    check(x)?;
    if x < SERIES_LIMIT {
        Ok(series(x, 0))
    } else {
        Ok(x.exp() * asymptotic_scaled(x, 0) / (2.0 * std::f64::consts::PI * x).sqrt())
    }
}

/// `I_1(x)` for `x >= 0`.
pub fn bessel_i1(x: f64) -> Result<f64> {
    check(x)?;
    if x < SERIES_LIMIT {
        Ok(series(x, 1))
    } else {
        Ok(x.exp() * asymptotic_scaled(x, 1) / (2.0 * std::f64::consts::PI * x).sqrt())
    }
}

/// `e^{-x} I_0(x)`.
pub fn bessel_i0e(x: f64) -> Result<f64> {
    check(x)?;
    if x < SERIES_LIMIT {
        Ok(series(x, 0) * (-x).exp())
    } else {
        Ok(asymptotic_scaled(x, 0) / (2.0 * std::f64::consts::PI * x).sqrt())
    }
}

/// `e^{-x} I_1(x)`.
pub fn bessel_i1e(x: f64) -> Result<f64> {
    check(x)?;
    if x < SERIES_LIMIT {
        Ok(series(x, 1) * (-x).exp())
    } else {
        Ok(asymptotic_scaled(x, 1) / (2.0 * std::f64::consts::PI * x).sqrt())
    }
}

/// `ln I_0(x)`, finite for arguments where `I_0` itself overflows.
pub fn ln_bessel_i0(x: f64) -> Result<f64> {
    Ok(bessel_i0e(x)?.ln() + x)
}

/// Mean resultant length of a von Mises law: `A(x) = I_1(x) / I_0(x)`.
pub fn bessel_ratio_a(x: f64) -> Result<f64> {
    if x == 0.0 {
        check(x)?;
        return Ok(0.0);
    }
    Ok(bessel_i1e(x)? / bessel_i0e(x)?)
}
