//! Benchmark manifolds: charts, volume distortion, samplers and embeddings.

mod catalog;
mod charts;
mod cloud;
mod embed;
mod sampler;
mod tangent;

pub use catalog::{catalog, catalog_ids, lookup};
pub use charts::{chart_domain, chart_inverse, volume_distortion, volume_distortion_fd};
pub use cloud::PointCloud;
pub use embed::{embed_linear, random_orthogonal};
pub use sampler::{acceptance_probability, jacobian_bound, sample_manifold, sample_native};
pub use tangent::{deformed_tangent, tangent_rank_check};

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ManifoldKind {
    Sphere,
    Ball,
    GaussianSurface,
    DeformedSphere,
    Cylinder,
    Helix,
    SwissRoll,
    Mobius,
    Torus,
    Hyperboloid,
}

impl ManifoldKind {
    pub const ALL: [ManifoldKind; 10] = [
        ManifoldKind::Sphere,
        ManifoldKind::Ball,
        ManifoldKind::GaussianSurface,
        ManifoldKind::DeformedSphere,
        ManifoldKind::Cylinder,
        ManifoldKind::Helix,
        ManifoldKind::SwissRoll,
        ManifoldKind::Mobius,
        ManifoldKind::Torus,
        ManifoldKind::Hyperboloid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ManifoldKind::Sphere => "sphere",
            ManifoldKind::Ball => "ball",
            ManifoldKind::GaussianSurface => "gaussian_surface",
            ManifoldKind::DeformedSphere => "deformed_sphere",
            ManifoldKind::Cylinder => "cylinder",
            ManifoldKind::Helix => "helix",
            ManifoldKind::SwissRoll => "swiss_roll",
            ManifoldKind::Mobius => "mobius",
            ManifoldKind::Torus => "torus",
            ManifoldKind::Hyperboloid => "hyperboloid",
        }
    }

    /// Intrinsic dimension forced by the kind, if any.
    pub fn fixed_dim(self) -> Option<usize> {
        match self {
            ManifoldKind::Helix => Some(1),
            ManifoldKind::Cylinder
            | ManifoldKind::SwissRoll
            | ManifoldKind::Mobius
            | ManifoldKind::Torus
            | ManifoldKind::Hyperboloid => Some(2),
            _ => None,
        }
    }
}

impl fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ManifoldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ManifoldKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Unknown {
                kind: "manifold kind",
                name: s.to_string(),
            })
    }
}

/// Geometric constants. Which ones matter depends on the kind:
/// `radius` is the sphere/ball/cylinder/helix radius, the deformed sphere's
/// `R` and the torus's centre-line radius; `tube` is the deformed sphere's
/// `r` and the torus tube radius; `freq` is the deformation frequency `c`;
/// `sigma_g` is the standard deviation of the Gaussian surface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManifoldParams {
    pub radius: f64,
    pub tube: f64,
    pub freq: f64,
    pub sigma_g: f64,
}

impl Default for ManifoldParams {
    fn default() -> Self {
        Self {
            radius: 1.0,
            tube: 0.5,
            freq: 1.0,
            sigma_g: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldSpec {
    pub kind: ManifoldKind,
    pub d: usize,
    pub params: ManifoldParams,
    pub ambient_p: usize,
    pub embed_seed: u64,
}

impl ManifoldSpec {
    /// A spec with default parameters and the smallest valid ambient space.
    pub fn new(kind: ManifoldKind, d: usize) -> Self {
        let mut params = ManifoldParams::default();
        if kind == ManifoldKind::Torus {
            params.radius = 2.0;
            params.tube = 1.0;
        }
        let mut spec = Self {
            kind,
            d,
            params,
            ambient_p: 0,
            embed_seed: 0,
        };
        spec.ambient_p = spec.native_dim();
        spec
    }

    pub fn sphere(d: usize, radius: f64, ambient_p: usize) -> Self {
        let mut s = Self::new(ManifoldKind::Sphere, d);
        s.params.radius = radius;
        s.ambient_p = ambient_p;
        s
    }

    pub fn deformed_sphere(d: usize, c: f64) -> Self {
        let mut s = Self::new(ManifoldKind::DeformedSphere, d);
        s.params.freq = c;
        s
    }

    pub fn with_ambient(mut self, p: usize) -> Self {
        self.ambient_p = p;
        self
    }

    pub fn with_embed_seed(mut self, seed: u64) -> Self {
        self.embed_seed = seed;
        self
    }

    /// Width of the chart image before embedding.
    pub fn native_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Sphere | ManifoldKind::GaussianSurface => self.d + 1,
            ManifoldKind::Ball => self.d,
            ManifoldKind::DeformedSphere => 2 * self.d,
            _ => 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::invalid("intrinsic dimension must be positive"));
        }
        if let Some(fixed) = self.kind.fixed_dim() {
            if self.d != fixed {
                return Err(Error::invalid(format!(
                    "{} has intrinsic dimension {fixed}, got d={}",
                    self.kind, self.d
                )));
            }
        }
        if self.ambient_p < self.native_dim() {
            return Err(Error::invalid(format!(
                "ambient dimension {} is below the native width {} of {}",
                self.ambient_p,
                self.native_dim(),
                self.kind
            )));
        }
        let p = &self.params;
        let finite = [p.radius, p.tube, p.freq, p.sigma_g].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFinite("manifold parameters"));
        }
        let ok = match self.kind {
            ManifoldKind::GaussianSurface => p.sigma_g > 0.0,
            ManifoldKind::DeformedSphere => p.radius > 0.0 && p.tube >= 0.0 && p.freq >= 0.0,
            ManifoldKind::Torus => p.radius > 0.0 && p.tube > 0.0,
            ManifoldKind::SwissRoll | ManifoldKind::Mobius | ManifoldKind::Hyperboloid => true,
            _ => p.radius > 0.0,
        };
        if !ok {
            return Err(Error::invalid(format!("parameters {p:?} are invalid for {}", self.kind)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Distribution {
    Uniform,
    /// Chart coordinates drawn i.i.d. Beta(a, b), rescaled to the domain.
    Beta { a: f64, b: f64 },
}

impl Distribution {
    pub const DEFAULT_BETA: Distribution = Distribution::Beta { a: 0.5, b: 3.0 };
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Uniform => f.write_str("uniform"),
            Distribution::Beta { a, b } => write!(f, "beta:{a},{b}"),
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    /// Accepts `uniform`, `beta` (default shapes) and `beta:a,b`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("uniform") {
            return Ok(Distribution::Uniform);
        }
        if s.eq_ignore_ascii_case("beta") {
            return Ok(Distribution::DEFAULT_BETA);
        }
        let Some(rest) = s.strip_prefix("beta:") else {
            return Err(Error::Unknown {
                kind: "distribution",
                name: s.to_string(),
            });
        };
        let (a, b) = rest
            .split_once(',')
            .ok_or_else(|| Error::invalid(format!("expected beta:a,b, got '{s}'")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad Beta shape '{t}'")))
        };
        let (a, b) = (parse(a)?, parse(b)?);
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::invalid(format!("Beta shapes must be positive, got ({a}, {b})")));
        }
        Ok(Distribution::Beta { a, b })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleConfig {
    pub n: usize,
    pub distribution: Distribution,
    pub noise_sigma: f64,
    pub seed: u64,
    /// Stream index within `seed`; replicate `r` of a benchmark uses `r`.
    pub stream: u64,
}

impl SampleConfig {
    pub fn uniform(n: usize, seed: u64) -> Self {
        Self {
            n,
            distribution: Distribution::Uniform,
            noise_sigma: 0.0,
            seed,
            stream: 0,
        }
    }

    pub fn with_noise(mut self, sigma: f64) -> Self {
        self.noise_sigma = sigma;
        self
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid(format!("sample size must be at least 2, got {}", self.n)));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::invalid(format!("noise sigma must be >= 0, got {}", self.noise_sigma)));
        }
        if let Distribution::Beta { a, b } = self.distribution {
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::invalid("Beta shapes must be positive"));
            }
        }
        Ok(())
    }
}
