//! Symmetric eigendecomposition.
//!
//! [`sym_eigen`] is the reference solver: cyclic Jacobi rotations, which are
//! slow but unconditionally stable and return orthonormal eigenvectors.
//! [`sym_eigenvalues`] computes the spectrum alone through Householder
//! tridiagonalisation and implicit QR; the estimators call it once per
//! neighbourhood, where Jacobi would dominate the run time.

use crate::{Error, Result};

/// Eigenvalues below zero but above `-EIG_CLAMP * max(1, |lambda_1|)` are
/// treated as rounding noise when a spectrum is known to be PSD.
pub const EIG_CLAMP: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;
const OFF_DIAG_TOL: f64 = 1e-14;
const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues sorted non-increasing, with optional eigenvectors.
///
/// `vectors` is row-major `p x p`; column `j` is the unit eigenvector for
/// `values[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSpectrum {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<f64>>,
}

impl EigenSpectrum {
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values, vectors: None }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Clamp negative eigenvalues to zero, as appropriate for covariance
    /// matrices.
    pub fn clamp_psd(mut self) -> Self {
        for v in &mut self.values {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        self
    }

    pub fn vector(&self, j: usize) -> Option<Vec<f64>> {
        let p = self.dim();
        self.vectors
            .as_ref()
            .map(|q| (0..p).map(|i| q[i * p + j]).collect())
    }
}

fn check_input(a: &[f64], p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::invalid("matrix dimension must be at least 1"));
    }
    if a.len() != p * p {
        return Err(Error::invalid(format!(
            "expected {} entries for a {p}x{p} matrix, got {}",
            p * p,
            a.len()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("symmetric eigensolver input"));
    }
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..p {
        for j in (i + 1)..p {
            let gap = (a[i * p + j] - a[j * p + i]).abs();
            if gap > SYMMETRY_TOL * scale {
                return Err(Error::NotSymmetric { row: i, col: j, gap });
            }
        }
    }
    Ok(())
}

/// Full spectrum of a symmetric matrix (row-major, `p x p`) by cyclic Jacobi.
pub fn sym_eigen(a: &[f64], p: usize) -> Result<EigenSpectrum> {
    check_input(a, p)?;
    let mut m = a.to_vec();
    // Symmetrise exactly so rotations act on a truly symmetric matrix.
    for i in 0..p {
        for j in (i + 1)..p {
            let avg = 0.5 * (m[i * p + j] + m[j * p + i]);
            m[i * p + j] = avg;
            m[j * p + i] = avg;
        }
    }
    let mut v = vec![0.0; p * p];
    for i in 0..p {
        v[i * p + i] = 1.0;
    }
    let fro = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = OFF_DIAG_TOL * fro;

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&m, p);
        if off <= threshold {
            converged = true;
            break;
        }
        for r in 0..p {
            for s in (r + 1)..p {
                let ars = m[r * p + s];
                if ars == 0.0 {
                    continue;
                }
                let arr = m[r * p + r];
                let ass = m[s * p + s];
                let theta = (ass - arr) / (2.0 * ars);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                m[r * p + r] = arr - t * ars;
                m[s * p + s] = ass + t * ars;
                m[r * p + s] = 0.0;
                m[s * p + r] = 0.0;
                for k in 0..p {
                    if k == r || k == s {
                        continue;
                    }
                    let akr = m[k * p + r];
                    let aks = m[k * p + s];
                    let nr = c * akr - sn * aks;
                    let ns = sn * akr + c * aks;
                    m[k * p + r] = nr;
                    m[r * p + k] = nr;
                    m[k * p + s] = ns;
                    m[s * p + k] = ns;
                }
                for k in 0..p {
                    let vkr = v[k * p + r];
                    let vks = v[k * p + s];
                    v[k * p + r] = c * vkr - sn * vks;
                    v[k * p + s] = sn * vkr + c * vks;
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&m, p) > threshold {
        return Err(Error::NotConverged {
            what: "Jacobi eigensolver",
            iterations: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| m[j * p + j].total_cmp(&m[i * p + i]).then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| m[i * p + i]).collect();
    let mut vectors = vec![0.0; p * p];
    for (col, &src) in order.iter().enumerate() {
        for row in 0..p {
            vectors[row * p + col] = v[row * p + src];
        }
    }
    Ok(EigenSpectrum {
        values,
        vectors: Some(vectors),
    })
}

fn off_diagonal_norm(m: &[f64], p: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..p {
        for j in (i + 1)..p {
            s += 2.0 * m[i * p + j] * m[i * p + j];
        }
    }
    s.sqrt()
}

/// Eigenvalues only, sorted non-increasing.
pub fn sym_eigenvalues(a: &[f64], p: usize) -> Result<EigenSpectrum> {
    check_input(a, p)?;
    let m = nalgebra::DMatrix::from_fn(p, p, |i, j| 0.5 * (a[i * p + j] + a[j * p + i]));
    let values = m
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or(Error::NotConverged {
            what: "tridiagonal QR eigensolver",
            iterations: 0,
        })?
        .eigenvalues;
    Ok(EigenSpectrum::from_values(values.iter().copied().collect()))
}
