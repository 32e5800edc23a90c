//! Exact k-nearest-neighbour search.

use rayon::prelude::*;

use crate::geometry::PointCloud;
use crate::{Error, Result};

/// Neighbours of one point, nearest first. Ties in distance are broken by
/// ascending point index, and the centre itself is never included.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborSet {
    pub center: usize,
    pub indices: Vec<usize>,
    pub distances: Vec<f64>,
}

impl NeighborSet {
    pub fn k(&self) -> usize {
        self.indices.len()
    }

    /// The first `k` neighbours.
    pub fn truncated(&self, k: usize) -> NeighborSet {
        let k = k.min(self.k());
        NeighborSet {
            center: self.center,
            indices: self.indices[..k].to_vec(),
            distances: self.distances[..k].to_vec(),
        }
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn query(cloud: &PointCloud, i: usize, k: usize, scratch: &mut Vec<(f64, usize)>) -> NeighborSet {
    let x = cloud.row(i);
    scratch.clear();
    scratch.extend(
        (0..cloud.n())
            .filter(|&j| j != i)
            .map(|j| (sq_dist(x, cloud.row(j)), j)),
    );
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < scratch.len() {
        scratch.select_nth_unstable_by(k - 1, cmp);
        scratch.truncate(k);
    }
    scratch.sort_unstable_by(cmp);
    NeighborSet {
        center: i,
        indices: scratch.iter().map(|e| e.1).collect(),
        distances: scratch.iter().map(|e| e.0.sqrt()).collect(),
    }
}

/// Brute-force `K` nearest neighbours of every point, `O(n² p)`.
pub fn knn_all(cloud: &PointCloud, k: usize) -> Result<Vec<NeighborSet>> {
    let n = cloud.n();
    if k == 0 || k >= n {
        return Err(Error::invalid(format!("K must lie in 1..={}, got {k}", n - 1)));
    }
    Ok((0..n)
        .into_par_iter()
        .map_init(Vec::new, |scratch, i| query(cloud, i, k, scratch))
        .collect())
}
