//! Tight-locality estimator.
//!
//! Everything is computed from the Gram matrix of the offsets `a_i = v_i - x`.
//! With `D = R^2 - |a_v|^2`, `t = (x - v).(w - v)` and `V = |w - v|`, the pair
//! radius is `(R / D) (sqrt(t^2 + V^2 D) - t)`. For `t > 0` it is evaluated as
//! the algebraically equal `R V^2 / (sqrt(t^2 + V^2 D) + t)`, which avoids
//! cancellation. When `v` sits on the outer sphere (`D = 0`) the boundary form
//! `R V^2 / (2 t)` applies.

use crate::geometry::PointCloud;
use crate::neighbors::NeighborSet;

/// Local estimate plus the number of skipped terms out of `2K(K-1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TleLocal {
    pub value: Option<f64>,
    pub skipped: usize,
    pub terms: usize,
}

/// Radius of the circle through `v` and `w` centred on the segment `[x, v]`,
/// or `None` where the construction is undefined.
pub fn pair_radius(r: f64, d: f64, t: f64, v2: f64) -> Option<f64> {
    if !(v2 > 0.0) {
        return None;
    }
    let radius = if d > 0.0 {
        let arg = t * t + v2 * d;
        if arg < 0.0 {
            return None;
        }
        let s = arg.sqrt();
        if t > 0.0 {
            r * v2 / (s + t)
        } else {
            (r / d) * (s - t)
        }
    } else if t > 0.0 {
        r * v2 / (2.0 * t)
    } else {
        return None;
    };
    (radius > 0.0 && radius.is_finite()).then_some(radius)
}

pub fn tle_local(ns: &NeighborSet, cloud: &PointCloud) -> TleLocal {
    let k = ns.k();
    let terms = 2 * k * k.saturating_sub(1);
    let fail = TleLocal { value: None, skipped: terms, terms };
    if k < 2 {
        return fail;
    }
    let r = ns.distances[k - 1];
    if !(r > 0.0) {
        return fail;
    }
    let p = cloud.p();
    let x = cloud.row(ns.center);
    let mut offs = Vec::with_capacity(k * p);
    for &j in &ns.indices {
        offs.extend(cloud.row(j).iter().zip(x).map(|(a, b)| a - b));
    }
    let mut gram = vec![0.0; k * k];
    for i in 0..k {
        for j in i + 1..k {
            let g: f64 = offs[i * p..(i + 1) * p]
                .iter()
                .zip(&offs[j * p..(j + 1) * p])
                .map(|(a, b)| a * b)
                .sum();
            gram[i * k + j] = g;
            gram[j * k + i] = g;
        }
    }
    let r2 = r * r;
    let ln_r = r.ln();
    let sq: Vec<f64> = ns.distances.iter().map(|d| d * d).collect();
    let mut sum = 0.0;
    let mut used = 0usize;
    for v in 0..k {
        let dv = r2 - sq[v];
        for w in 0..k {
            if v == w {
                continue;
            }
            let g = gram[v * k + w];
            let base = sq[v] + sq[w];
            // v and its reflection 2x - v through the centre
            for (t, v2) in [(sq[v] - g, base - 2.0 * g), (sq[v] + g, base + 2.0 * g)] {
                if let Some(rad) = pair_radius(r, dv, t, v2) {
                    sum += rad.ln() - ln_r;
                    used += 1;
                }
            }
        }
    }
    let skipped = terms - used;
    if 2 * skipped > terms || used == 0 || sum == 0.0 {
        return TleLocal { value: None, skipped, terms };
    }
    let value = -(used as f64) / sum;
    TleLocal {
        value: (value > 0.0 && value.is_finite()).then_some(value),
        skipped,
        terms,
    }
}
