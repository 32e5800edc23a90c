//! Named experiment designs matching the published factor tables and
//! comparative suites.

use super::{EstimatorChoice, ExperimentPlan, Factor, SuitePlan};
use crate::estimators::{EstimatorConfig, Method};
use crate::geometry::{Distribution, ManifoldSpec, SampleConfig};
use crate::{Error, Result};

pub const FULL_REPLICATES: usize = 100;
pub const DANCO_REPLICATES: usize = 25;
/// Noise level of the noisy comparative suites.
pub const SUITE_SIGMA: f64 = 0.05;

pub const K_VALUES: [f64; 10] = [5.0, 10.0, 20.0, 30.0, 40.0, 50.0, 100.0, 200.0, 500.0, 750.0];
pub const DANCO_K_VALUES: [f64; 10] = [2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0];
pub const ALPHA_VALUES: [f64; 10] = [1.01, 1.2, 1.4, 1.6, 1.8, 2.0, 4.0, 6.0, 8.0, 10.0];
pub const N_VALUES: [f64; 10] = [200.0, 400.0, 600.0, 800.0, 1000.0, 2000.0, 3000.0, 4000.0, 5000.0, 10000.0];
pub const P_VALUES: [f64; 10] = [6.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0];
pub const R_VALUES: [f64; 10] = [0.001, 0.01, 0.05, 0.1, 1.0, 5.0, 10.0, 20.0, 50.0, 100.0];
pub const D_VALUES: [f64; 10] = [2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0];
pub const C_VALUES: [f64; 10] = [0.0001, 0.001, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 4.0];
pub const SIGMA_VALUES: [f64; 10] = [0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09];

#[derive(Clone, Debug, PartialEq)]
pub enum Preset {
    Sweep(ExperimentPlan),
    Suite(SuitePlan),
}

impl Preset {
    pub fn set_replicates(&mut self, r: usize) {
        match self {
            Preset::Sweep(p) => p.replicates = r,
            Preset::Suite(s) => s.replicates = r,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Preset::Sweep(p) => {
                p.base_seed = seed;
                p.sample.seed = seed;
            }
            Preset::Suite(s) => s.base_seed = seed,
        }
    }

    /// Keep only the listed methods.
    pub fn restrict(&mut self, methods: &[Method]) -> Result<()> {
        let list = match self {
            Preset::Sweep(p) => &mut p.estimators,
            Preset::Suite(s) => &mut s.estimators,
        };
        list.retain(|e| methods.contains(&e.method()));
        if list.is_empty() {
            return Err(Error::invalid("none of the requested methods is part of this preset"));
        }
        Ok(())
    }
}

const NAMES: [&str; 16] = [
    "table-k",
    "table-k-danco",
    "table-alpha",
    "table-n",
    "table-p",
    "table-curvature",
    "table-d",
    "table-c",
    "table-noise",
    "table-noise-small",
    "suite-500u",
    "suite-2000u",
    "suite-500b",
    "suite-2000b",
    "suite-500n",
    "suite-2000n",
];

pub fn preset_names() -> &'static [&'static str] {
    &NAMES
}

fn fixed(methods: &[Method]) -> Vec<EstimatorChoice> {
    methods.iter().map(|&m| EstimatorChoice::Fixed(EstimatorConfig::new(m))).collect()
}

fn sphere_sweep(label: &str, spec: ManifoldSpec, est: Vec<EstimatorChoice>, factor: Factor, values: &[f64]) -> ExperimentPlan {
    let replicates = if est.iter().all(|e| e.method() == Method::Danco) {
        DANCO_REPLICATES
    } else {
        FULL_REPLICATES
    };
    ExperimentPlan {
        label: label.to_string(),
        manifold: spec,
        sample: SampleConfig::uniform(1000, 0),
        estimators: est,
        factor,
        values: values.to_vec(),
        replicates,
        base_seed: 0,
    }
}

fn suite(n: usize, distribution: Distribution, noise_sigma: f64) -> SuitePlan {
    SuitePlan {
        n,
        distribution,
        noise_sigma,
        estimators: Method::ALL
            .iter()
            .map(|&m| EstimatorChoice::Tuned(EstimatorConfig::new(m)))
            .collect(),
        replicates: FULL_REPLICATES,
        base_seed: 0,
        manifolds: Vec::new(),
    }
}

/// Look up a preset by name. `table-size` and `table-radius` are aliases of
/// `table-curvature` (curvature through the sphere radius).
pub fn preset(name: &str) -> Result<Preset> {
    let s5 = || ManifoldSpec::sphere(5, 1.0, 10);
    let all = || fixed(&Method::ALL);
    let beta = Distribution::DEFAULT_BETA;
    let p = match name.trim().to_ascii_lowercase().as_str() {
        "table-k" => Preset::Sweep(sphere_sweep(
            "sphere5",
            s5(),
            fixed(&[Method::LocalPca, Method::Mada, Method::Mle, Method::Tle, Method::CaPca]),
            Factor::K,
            &K_VALUES,
        )),
        "table-k-danco" => Preset::Sweep(sphere_sweep("sphere5", s5(), fixed(&[Method::Danco]), Factor::K, &DANCO_K_VALUES)),
        "table-alpha" => Preset::Sweep(sphere_sweep("sphere5", s5(), fixed(&[Method::Wasserstein]), Factor::Alpha, &ALPHA_VALUES)),
        "table-n" => Preset::Sweep(sphere_sweep("sphere5", s5(), all(), Factor::N, &N_VALUES)),
        "table-p" => Preset::Sweep(sphere_sweep("sphere5", s5(), all(), Factor::P, &P_VALUES)),
        "table-curvature" | "table-size" | "table-radius" => {
            Preset::Sweep(sphere_sweep("sphere5", s5(), all(), Factor::Radius, &R_VALUES))
        }
        "table-d" => Preset::Sweep(sphere_sweep("sphere", ManifoldSpec::sphere(2, 1.0, 4), all(), Factor::D, &D_VALUES)),
        "table-c" => Preset::Sweep(sphere_sweep(
            "deformed3",
            ManifoldSpec::deformed_sphere(3, 1.0),
            all(),
            Factor::C,
            &C_VALUES,
        )),
        "table-noise" => Preset::Sweep(sphere_sweep("sphere5", s5(), all(), Factor::Sigma, &SIGMA_VALUES)),
        "table-noise-small" => Preset::Sweep(sphere_sweep(
            "sphere5-r0.1",
            ManifoldSpec::sphere(5, 0.1, 10),
            all(),
            Factor::Sigma,
            &SIGMA_VALUES,
        )),
        "suite-500u" => Preset::Suite(suite(500, Distribution::Uniform, 0.0)),
        "suite-2000u" => Preset::Suite(suite(2000, Distribution::Uniform, 0.0)),
        "suite-500b" => Preset::Suite(suite(500, beta, 0.0)),
        "suite-2000b" => Preset::Suite(suite(2000, beta, 0.0)),
        "suite-500n" => Preset::Suite(suite(500, Distribution::Uniform, SUITE_SIGMA)),
        "suite-2000n" => Preset::Suite(suite(2000, Distribution::Uniform, SUITE_SIGMA)),
        _ => {
            return Err(Error::Unknown { kind: "preset", name: name.to_string() });
        }
    };
    Ok(p)
}
