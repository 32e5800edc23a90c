//! Adaptive Simpson quadrature on a finite interval.

use crate::{Error, Result};

const ABS_TOL: f64 = 1e-9;
const ENDPOINT_OFFSET: f64 = 1e-12;
const MAX_SUBDIVISIONS: usize = 1_000_000;
const MAX_DEPTH: u32 = 50;
const INITIAL_PANELS: usize = 32;

/// Integrate `f` over `(a, b)`.
///
/// The integrand is never evaluated at the endpoints themselves; they are
/// approached to within `1e-12`, so integrable endpoint singularities are
/// fine. The interval is first split into 32 panels so narrow peaks are not
/// missed by the initial Simpson estimate.
pub fn quad_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("quadrature bounds must be finite"));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return quad_1d(f, b, a).map(|v| -v);
    }
    let lo = a + ENDPOINT_OFFSET;
    let hi = b - ENDPOINT_OFFSET;
    if lo >= hi {
        return Ok(0.0);
    }
    let mut budget = MAX_SUBDIVISIONS;
    let h = (hi - lo) / INITIAL_PANELS as f64;
    let tol = ABS_TOL / INITIAL_PANELS as f64;
    let mut total = 0.0;
    for k in 0..INITIAL_PANELS {
        let x0 = lo + h * k as f64;
        let x1 = if k + 1 == INITIAL_PANELS { hi } else { lo + h * (k + 1) as f64 };
        let xm = 0.5 * (x0 + x1);
        let (f0, fm, f1) = (f(x0), f(xm), f(x1));
        let whole = simpson(x0, x1, f0, fm, f1);
        total += refine(&f, x0, x1, f0, fm, f1, whole, tol, MAX_DEPTH, &mut budget)?;
    }
    if !total.is_finite() {
        return Err(Error::NonFinite("quadrature"));
    }
    Ok(total)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut usize,
) -> Result<f64> {
    if *budget == 0 {
        return Err(Error::NotConverged {
            what: "adaptive Simpson quadrature",
            iterations: MAX_SUBDIVISIONS,
        });
    }
    *budget -= 1;
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if depth == 0 || delta.abs() <= 15.0 * tol || delta.abs() <= floor {
        return Ok(left + right + delta / 15.0);
    }
    Ok(refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget)?
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, budget)?)
}
