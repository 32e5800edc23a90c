use nalgebra::DMatrix;

use super::PointCloud;
use crate::numerics::rng::RngStream;
use crate::{Error, Result};

const EMBED_STREAM: u64 = 0x45_4d42_4544;

/// Seeded Haar-random orthogonal `p x p` matrix, row-major.
///
/// QR of a standard Gaussian matrix with the signs of `R`'s diagonal folded
/// into `Q`, which makes the factorisation unique and the law uniform.
pub fn random_orthogonal(p: usize, seed: u64) -> Vec<f64> {
    let mut stream = RngStream::new(seed, EMBED_STREAM);
    let g: Vec<f64> = (0..p * p).map(|_| stream.normal()).collect();
    let qr = DMatrix::from_row_slice(p, p, &g).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut out = vec![0.0; p * p];
    for j in 0..p {
        let sign = if r[(j, j)] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..p {
            out[i * p + j] = q[(i, j)] * sign;
        }
    }
    out
}

/// Zero-pad each row of a `n x w` matrix to `ambient_p` coordinates, then
/// rotate by [`random_orthogonal`]. Pairwise distances are preserved.
pub fn embed_linear(points: &[f64], width: usize, ambient_p: usize, embed_seed: u64) -> Result<PointCloud> {
    if width == 0 || points.len() % width != 0 {
        return Err(Error::invalid("point matrix is not a whole number of rows"));
    }
    if ambient_p < width {
        return Err(Error::invalid(format!(
            "cannot embed width-{width} points into R^{ambient_p}"
        )));
    }
    let n = points.len() / width;
    let q = random_orthogonal(ambient_p, embed_seed);
    let mut out = vec![0.0; n * ambient_p];
    for (x, y) in points.chunks_exact(width).zip(out.chunks_exact_mut(ambient_p)) {
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &q[i * ambient_p..i * ambient_p + width];
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
    PointCloud::new(n, ambient_p, out)
}
