use std::fmt;
use std::str::FromStr;

use crate::transport::GroundMetric;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    LocalPca,
    Mada,
    Mle,
    Danco,
    Tle,
    Twonn,
    CaPca,
    Wasserstein,
}

impl Method {
    /// Column order of the comparative tables.
    pub const ALL: [Method; 8] = [
        Method::LocalPca,
        Method::Mada,
        Method::Mle,
        Method::Danco,
        Method::Tle,
        Method::Twonn,
        Method::CaPca,
        Method::Wasserstein,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::LocalPca => "local_pca",
            Method::Mada => "mada",
            Method::Mle => "mle",
            Method::Danco => "danco",
            Method::Tle => "tle",
            Method::Twonn => "twonn",
            Method::CaPca => "ca_pca",
            Method::Wasserstein => "wasserstein",
        }
    }

    /// Whether the method is driven by a neighbourhood size `K`.
    pub fn uses_k(self) -> bool {
        !matches!(self, Method::Twonn | Method::Wasserstein)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, '_' | '-' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        let m = match key.as_str() {
            "localpca" | "lpca" | "pca" => Method::LocalPca,
            "mada" => Method::Mada,
            "mle" => Method::Mle,
            "danco" => Method::Danco,
            "tle" => Method::Tle,
            "twonn" => Method::Twonn,
            "capca" => Method::CaPca,
            "wasserstein" | "w1" => Method::Wasserstein,
            _ => {
                return Err(Error::Unknown {
                    kind: "method",
                    name: s.to_string(),
                })
            }
        };
        Ok(m)
    }
}

/// Which norm-ratio density DanCo maximises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DensityForm {
    /// `K d r^{d-1} (1 - r^d)^{K-1}`, a proper density on `(0, 1)`.
    #[default]
    Corrected,
    /// `K d r^{d-1} (1 - r^{d-1})^{K-1}`, which does not integrate to one.
    AsPrinted,
}

impl FromStr for DensityForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "corrected" => Ok(DensityForm::Corrected),
            "as_printed" => Ok(DensityForm::AsPrinted),
            _ => Err(Error::Unknown {
                kind: "density form",
                name: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DancoOptions {
    /// Largest candidate dimension; `None` means `min(affine rank, 30)`.
    pub d_max: Option<usize>,
    /// Simulated reference samples per candidate dimension.
    pub n_sim_reps: usize,
    /// Return the norm estimate directly when it is at most this value.
    pub skip_threshold: Option<usize>,
    pub density_form: DensityForm,
}

impl Default for DancoOptions {
    fn default() -> Self {
        Self {
            d_max: None,
            n_sim_reps: 1,
            skip_threshold: None,
            density_form: DensityForm::Corrected,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Aggregation {
    #[default]
    Mean,
    /// Most frequent rounded local estimate; ties go to the smaller value.
    Vote,
}

impl FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mean" => Ok(Aggregation::Mean),
            "vote" => Ok(Aggregation::Vote),
            _ => Err(Error::Unknown {
                kind: "aggregation",
                name: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorConfig {
    pub method: Method,
    pub k: usize,
    pub alpha: f64,
    pub danco: DancoOptions,
    pub ground_metric: GroundMetric,
    pub splits: usize,
    pub aggregation: Aggregation,
    /// Divide the MLE log sum by `K - 1` instead of `K`.
    pub mle_unbiased: bool,
    /// Whether the local covariance of Local PCA and CA-PCA includes the
    /// centre point. Off reproduces libraries that use the neighbours alone.
    pub include_center: bool,
    /// Seed for the randomised methods (DanCo simulations, Wasserstein splits).
    pub seed: u64,
}

impl EstimatorConfig {
    /// Defaults of the factor experiments: `K = 100` (`10` for DanCo),
    /// `alpha = 5`, ten Wasserstein splits.
    pub fn new(method: Method) -> Self {
        Self {
            method,
            k: if method == Method::Danco { 10 } else { 100 },
            alpha: 5.0,
            danco: DancoOptions::default(),
            ground_metric: GroundMetric::default(),
            splits: 10,
            aggregation: Aggregation::Mean,
            mle_unbiased: false,
            include_center: true,
            seed: 0,
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Check the hyperparameters against a sample of `n` points.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self.method {
            Method::Twonn => {
                if n < 3 {
                    return Err(Error::Infeasible(format!("TwoNN needs n >= 3, got {n}")));
                }
            }
            Method::Wasserstein => {
                if !(self.alpha > 1.0 && self.alpha.is_finite()) {
                    return Err(Error::invalid(format!("alpha must exceed 1, got {}", self.alpha)));
                }
                if self.splits == 0 {
                    return Err(Error::invalid("at least one split is required"));
                }
                let need = 2 + 2 * self.alpha.ceil() as usize;
                if n < need {
                    return Err(Error::Infeasible(format!(
                        "Wasserstein with alpha={} needs n >= {need}, got {n}",
                        self.alpha
                    )));
                }
            }
            _ => {
                if self.k < 2 {
                    return Err(Error::invalid(format!("K must be at least 2, got {}", self.k)));
                }
                if self.k >= n {
                    return Err(Error::Infeasible(format!("K={} needs more than {n} points", self.k)));
                }
                if self.method == Method::Danco {
                    if self.danco.d_max == Some(0) {
                        return Err(Error::invalid("DanCo d_max must be at least 1"));
                    }
                    if self.danco.n_sim_reps == 0 {
                        return Err(Error::invalid("DanCo needs at least one simulation"));
                    }
                }
            }
        }
        Ok(())
    }
}
