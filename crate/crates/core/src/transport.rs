//! Exact 1-Wasserstein distance between equal-size empirical measures.
//!
//! With uniform weights on `m` atoms each, optimal transport reduces to a
//! linear assignment problem, solved here by the shortest augmenting path
//! method (Jonker-Volgenant style Hungarian algorithm with potentials).

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum GroundMetric {
    /// Sum of absolute coordinate differences.
    L1,
    /// Euclidean distance.
    #[default]
    L2,
}

impl GroundMetric {
    pub fn name(self) -> &'static str {
        match self {
            GroundMetric::L1 => "l1",
            GroundMetric::L2 => "l2",
        }
    }

    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            GroundMetric::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            GroundMetric::L2 => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
        }
    }
}

impl fmt::Display for GroundMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroundMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l1" => Ok(GroundMetric::L1),
            "l2" => Ok(GroundMetric::L2),
            _ => Err(Error::Unknown {
                kind: "ground metric",
                name: s.to_string(),
            }),
        }
    }
}

/// Square matrix of non-negative transport costs, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CostMatrix {
    m: usize,
    entries: Vec<f64>,
}

impl CostMatrix {
    pub fn new(m: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != m * m {
            return Err(Error::invalid(format!("cost matrix needs {} entries, got {}", m * m, entries.len())));
        }
        if entries.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::invalid("costs must be finite and non-negative"));
        }
        Ok(Self { m, entries })
    }

    /// Pairwise ground distances between the rows of `a` and `b` (`m x p` each).
    pub fn between(a: &[f64], b: &[f64], p: usize, metric: GroundMetric) -> Result<Self> {
        if p == 0 || a.len() % p != 0 || a.len() != b.len() {
            return Err(Error::invalid("point sets must have equal size and width"));
        }
        if a.iter().chain(b).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("transport coordinates"));
        }
        let m = a.len() / p;
        let mut entries = Vec::with_capacity(m * m);
        for x in a.chunks_exact(p) {
            for y in b.chunks_exact(p) {
                entries.push(metric.distance(x, y));
            }
        }
        Ok(Self { m, entries })
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.m + j]
    }
}

/// Minimum-cost perfect matching; returns `(total cost, assignment)` where
/// row `i` is matched to column `assignment[i]`.
pub fn solve_assignment(cost: &CostMatrix) -> (f64, Vec<usize>) {
    let m = cost.m;
    if m == 0 {
        return (0.0, Vec::new());
    }
    // 1-based potentials with a virtual column 0, following the classic
    // O(m^3) shortest augmenting path formulation.
    let mut u = vec![0.0; m + 1];
    let mut v = vec![0.0; m + 1];
    let mut row_of = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    let mut minv = vec![0.0; m + 1];
    let mut used = vec![false; m + 1];
    for i in 1..=m {
        row_of[0] = i;
        let mut j0 = 0;
        minv.iter_mut().for_each(|x| *x = f64::INFINITY);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            let row = &cost.entries[(i0 - 1) * m..i0 * m];
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = row[j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; m];
    for j in 1..=m {
        assignment[row_of[j] - 1] = j - 1;
    }
    // Sum the matched entries directly rather than trusting the potentials.
    let total = assignment.iter().enumerate().map(|(i, &j)| cost.get(i, j)).sum();
    (total, assignment)
}

/// `W1` between the empirical measures on the rows of `a` and `b`.
pub fn w1_empirical(a: &[f64], b: &[f64], p: usize, metric: GroundMetric) -> Result<f64> {
    let cost = CostMatrix::between(a, b, p, metric)?;
    if cost.m == 0 {
        return Err(Error::invalid("empirical measures must have at least one atom"));
    }
    let (total, _) = solve_assignment(&cost);
    Ok(total / cost.m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_clouds() {
        let a = [0.0, 1.0, 2.0, 5.0, -1.0, 3.0];
        assert_eq!(w1_empirical(&a, &a, 2, GroundMetric::L1).unwrap(), 0.0);
    }

    #[test]
    fn single_atoms() {
        assert_eq!(w1_empirical(&[0.0], &[1.0], 1, GroundMetric::L2).unwrap(), 1.0);
    }

    #[test]
    fn metrics_differ() {
        let a = [0.0, 0.0];
        let b = [3.0, 4.0];
        assert_eq!(w1_empirical(&a, &b, 2, GroundMetric::L1).unwrap(), 7.0);
        assert_eq!(w1_empirical(&a, &b, 2, GroundMetric::L2).unwrap(), 5.0);
    }

    #[test]
    fn crossing_is_uncrossed() {
        let cost = CostMatrix::new(2, vec![10.0, 1.0, 1.0, 10.0]).unwrap();
        assert_eq!(solve_assignment(&cost), (2.0, vec![1, 0]));
    }

    #[test]
    fn size_mismatch() {
        assert!(w1_empirical(&[0.0, 1.0], &[0.0], 1, GroundMetric::L1).is_err());
        assert!(w1_empirical(&[f64::NAN], &[0.0], 1, GroundMetric::L1).is_err());
        assert!(CostMatrix::new(1, vec![-1.0]).is_err());
    }

    #[test]
    fn metric_names() {
        assert_eq!("L1".parse::<GroundMetric>().unwrap(), GroundMetric::L1);
        assert!("l3".parse::<GroundMetric>().is_err());
    }
}
