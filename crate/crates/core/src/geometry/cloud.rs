use super::{ManifoldSpec, SampleConfig};
use crate::{Error, Result};

/// `n x p` row-major matrix of observations.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    n: usize,
    p: usize,
    data: Vec<f64>,
    provenance: Option<Box<(ManifoldSpec, SampleConfig)>>,
}

impl PointCloud {
    pub fn new(n: usize, p: usize, data: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("a point cloud needs at least 2 points, got {n}")));
        }
        if p == 0 {
            return Err(Error::invalid("a point cloud needs at least 1 coordinate"));
        }
        if data.len() != n * p {
            return Err(Error::invalid(format!(
                "data length {} does not match {n} x {p}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("point cloud"));
        }
        Ok(Self {
            n,
            p,
            data,
            provenance: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != p) {
            return Err(Error::invalid(format!("row {i} has {} values, expected {p}", r.len())));
        }
        Self::new(rows.len(), p, rows.concat())
    }

    pub fn with_provenance(mut self, spec: ManifoldSpec, cfg: SampleConfig) -> Self {
        self.provenance = Some(Box::new((spec, cfg)));
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.p)
    }

    pub fn provenance(&self) -> Option<(&ManifoldSpec, &SampleConfig)> {
        self.provenance.as_deref().map(|(s, c)| (s, c))
    }

    /// Multiply every coordinate by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            p: self.p,
            data: self.data.iter().map(|v| v * c).collect(),
            provenance: None,
        }
    }

    /// Select rows by index, in the given order.
    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(idx.len() * self.p);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self::new(idx.len(), self.p, data)
    }
}
