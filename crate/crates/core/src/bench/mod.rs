//! Replicated Monte Carlo experiments: one-factor sweeps on a fixed manifold
//! and the 18-manifold comparative suites.
//!
//! Replicate `r` always samples from stream `r` of the plan's base seed, and
//! estimator seeds are derived from `(base_seed, r)` as well. Replicates are
//! independent tasks; results are folded in a fixed order, so parallel and
//! serial runs write identical CSV.

pub mod presets;

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

pub use presets::{preset, preset_names, Preset};

use crate::estimators::{estimate_with_neighbors, required_k, EstimatorConfig, Method};
use crate::geometry::{catalog, sample_manifold, Distribution, ManifoldSpec, PointCloud, SampleConfig};
use crate::neighbors::{knn_all, NeighborSet};
use crate::numerics::fmt::fmt_sig;
use crate::numerics::stats::{mean, sample_sd};
use crate::tuning::tuned_estimate;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "manifold,method,factor,factor_value,n,mean,sd,replicates,failures,seconds";
const CSV_DIGITS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    K,
    Alpha,
    N,
    P,
    Radius,
    D,
    C,
    Sigma,
}

impl Factor {
    pub fn name(self) -> &'static str {
        match self {
            Factor::K => "K",
            Factor::Alpha => "alpha",
            Factor::N => "n",
            Factor::P => "p",
            Factor::Radius => "R",
            Factor::D => "d",
            Factor::C => "c",
            Factor::Sigma => "sigma",
        }
    }

    /// Whether changing this factor changes the sampled cloud.
    fn affects_sample(self) -> bool {
        !matches!(self, Factor::K | Factor::Alpha)
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Factor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "K" | "k" => Factor::K,
            "alpha" => Factor::Alpha,
            "n" => Factor::N,
            "p" => Factor::P,
            "R" | "radius" => Factor::Radius,
            "d" => Factor::D,
            "c" => Factor::C,
            "sigma" => Factor::Sigma,
            _ => return Err(Error::Unknown { kind: "factor", name: s.to_string() }),
        })
    }
}

/// How an estimator's hyperparameter is set in an experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EstimatorChoice {
    Fixed(EstimatorConfig),
    /// Stable-window tuning over the default grid.
    Tuned(EstimatorConfig),
}

impl EstimatorChoice {
    pub fn config(&self) -> &EstimatorConfig {
        match self {
            EstimatorChoice::Fixed(c) | EstimatorChoice::Tuned(c) => c,
        }
    }

    pub fn method(&self) -> Method {
        self.config().method
    }

    fn config_mut(&mut self) -> &mut EstimatorConfig {
        match self {
            EstimatorChoice::Fixed(c) | EstimatorChoice::Tuned(c) => c,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    /// Manifold label written to the CSV.
    pub label: String,
    pub manifold: ManifoldSpec,
    /// Sample settings; `seed` and `stream` are replaced per replicate.
    pub sample: SampleConfig,
    pub estimators: Vec<EstimatorChoice>,
    pub factor: Factor,
    pub values: Vec<f64>,
    pub replicates: usize,
    pub base_seed: u64,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::invalid("replicates must be at least 1"));
        }
        if self.values.is_empty() {
            return Err(Error::invalid("the swept factor needs at least one value"));
        }
        if self.estimators.is_empty() {
            return Err(Error::invalid("no estimators requested"));
        }
        for &v in &self.values {
            let (spec, sample) = self.cell_sample(v)?;
            spec.validate()?;
            sample.validate()?;
        }
        Ok(())
    }

    /// Manifold and sample settings at one factor value.
    pub fn cell_sample(&self, v: f64) -> Result<(ManifoldSpec, SampleConfig)> {
        let mut spec = self.manifold.clone();
        let mut sample = self.sample;
        let as_count = |v: f64| -> Result<usize> {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::invalid(format!("{} must be a positive integer, got {v}", self.factor)))
            }
        };
        match self.factor {
            Factor::K | Factor::Alpha => {}
            Factor::N => sample.n = as_count(v)?,
            Factor::P => spec.ambient_p = as_count(v)?,
            Factor::Radius => spec.params.radius = v,
            Factor::D => {
                // spheres of growing d live in R^{2d}
                spec.d = as_count(v)?;
                spec.ambient_p = (2 * spec.d).max(spec.native_dim());
            }
            Factor::C => spec.params.freq = v,
            Factor::Sigma => sample.noise_sigma = v,
        }
        Ok((spec, sample))
    }

    /// Estimator settings at one factor value.
    pub fn cell_estimators(&self, v: f64) -> Vec<EstimatorChoice> {
        let mut out = self.estimators.clone();
        for e in &mut out {
            let c = e.config_mut();
            match self.factor {
                Factor::K if c.method.uses_k() => c.k = v as usize,
                Factor::Alpha if c.method == Method::Wasserstein => c.alpha = v,
                _ => {}
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub manifold: String,
    pub method: String,
    pub factor: String,
    pub factor_value: f64,
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub replicates: usize,
    pub failures: usize,
    pub seconds: f64,
}

impl SummaryRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.manifold,
            self.method,
            self.factor,
            fmt_sig(self.factor_value, CSV_DIGITS),
            self.n,
            fmt_sig(self.mean, CSV_DIGITS),
            fmt_sig(self.sd, CSV_DIGITS),
            self.replicates,
            self.failures,
            fmt_sig(self.seconds, CSV_DIGITS),
        )
    }
}

pub fn write_rows<W: Write>(rows: &[SummaryRow], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.to_csv_line())?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub parallel: bool,
    /// Record wall time per row; off writes `0`, keeping output reproducible.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { parallel: true, timing: false }
    }
}

/// Position of one estimator evaluation inside a plan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellContext {
    pub factor_value: f64,
    pub replicate: usize,
    /// Seed handed to randomised estimators.
    pub seed: u64,
}

/// Seed for the randomised estimators of replicate `r`.
pub fn replicate_seed(base_seed: u64, r: usize) -> u64 {
    let mut x = base_seed ^ (r as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// The estimator used by [`run_sweep`]: fixed or tuned, reusing the shared
/// neighbour table when one is supplied.
pub fn evaluate(
    cloud: &PointCloud,
    nbrs: Option<&[NeighborSet]>,
    choice: &EstimatorChoice,
    ctx: &CellContext,
) -> Result<f64> {
    let mut cfg = *choice.config();
    cfg.seed = ctx.seed;
    match choice {
        EstimatorChoice::Fixed(_) => match (nbrs, required_k(&cfg)) {
            (Some(nb), Some(k)) if nb.first().is_some_and(|s| s.k() >= k) => {
                Ok(estimate_with_neighbors(cloud, nb, &cfg)?.d_hat)
            }
            _ => Ok(crate::estimators::estimate(cloud, &cfg)?.d_hat),
        },
        EstimatorChoice::Tuned(_) => Ok(tuned_estimate(cloud, &cfg, None)?.d_hat()),
    }
}

type Outcome = (Result<f64>, f64);

fn run_replicate<F>(plan: &ExperimentPlan, r: usize, opts: &RunOptions, f: &F) -> Result<Vec<Vec<Outcome>>>
where
    F: Fn(&PointCloud, Option<&[NeighborSet]>, &EstimatorChoice, &CellContext) -> Result<f64> + Sync,
{
    let seed = replicate_seed(plan.base_seed, r);
    let mut cached: Option<(PointCloud, Option<Vec<NeighborSet>>)> = None;
    let mut out = Vec::with_capacity(plan.values.len());
    for &v in &plan.values {
        let choices = plan.cell_estimators(v);
        if plan.factor.affects_sample() || cached.is_none() {
            let (spec, mut sample) = plan.cell_sample(v)?;
            sample.seed = plan.base_seed;
            sample.stream = r as u64;
            let cloud = sample_manifold(&spec, &sample)?;
            // one neighbour table per cloud, large enough for every fixed
            // estimator at every factor value that shares the cloud
            let values: Vec<f64> = if plan.factor.affects_sample() { vec![v] } else { plan.values.clone() };
            let k_need = values
                .iter()
                .flat_map(|&w| plan.cell_estimators(w))
                .filter(|c| matches!(c, EstimatorChoice::Fixed(_)))
                .filter_map(|c| required_k(c.config()))
                .max();
            let nbrs = match k_need {
                Some(k) if k < cloud.n() => Some(knn_all(&cloud, k)?),
                _ => None,
            };
            cached = Some((cloud, nbrs));
        }
        let (cloud, nbrs) = cached.as_ref().expect("cloud cached above");
        let ctx = CellContext { factor_value: v, replicate: r, seed };
        let cell: Vec<Outcome> = choices
            .iter()
            .map(|c| {
                let t = opts.timing.then(Instant::now);
                let res = f(cloud, nbrs.as_deref(), c, &ctx);
                (res, t.map_or(0.0, |t| t.elapsed().as_secs_f64()))
            })
            .collect();
        out.push(cell);
    }
    Ok(out)
}

/// Run a sweep with the standard estimators.
pub fn run_sweep(plan: &ExperimentPlan, opts: &RunOptions) -> Result<Vec<SummaryRow>> {
    run_sweep_with(plan, opts, evaluate)
}

/// Run a sweep with a custom estimator function, e.g. a stub in tests.
pub fn run_sweep_with<F>(plan: &ExperimentPlan, opts: &RunOptions, f: F) -> Result<Vec<SummaryRow>>
where
    F: Fn(&PointCloud, Option<&[NeighborSet]>, &EstimatorChoice, &CellContext) -> Result<f64> + Sync,
{
    plan.validate()?;
    let per_rep: Vec<Vec<Vec<Outcome>>> = if opts.parallel {
        (0..plan.replicates)
            .into_par_iter()
            .map(|r| run_replicate(plan, r, opts, &f))
            .collect::<Result<_>>()?
    } else {
        (0..plan.replicates)
            .map(|r| run_replicate(plan, r, opts, &f))
            .collect::<Result<_>>()?
    };
    let mut rows = Vec::new();
    for (vi, &v) in plan.values.iter().enumerate() {
        let (_, sample) = plan.cell_sample(v)?;
        for (ei, choice) in plan.cell_estimators(v).iter().enumerate() {
            let mut values = Vec::with_capacity(plan.replicates);
            let mut failures = 0;
            let mut seconds = 0.0;
            for (r, rep) in per_rep.iter().enumerate() {
                let (res, t) = &rep[vi][ei];
                seconds += t;
                match res {
                    Ok(d) => values.push(*d),
                    Err(e) => {
                        failures += 1;
                        log::warn!(
                            "{} {} at {}={}: replicate {r} failed: {e}",
                            plan.label,
                            choice.method(),
                            plan.factor,
                            fmt_sig(v, CSV_DIGITS)
                        );
                    }
                }
            }
            let Some(m) = mean(&values) else {
                let first = per_rep[0][vi][ei].0.clone().err();
                return Err(first.unwrap_or_else(|| Error::Degenerate("no replicate succeeded".into())));
            };
            rows.push(SummaryRow {
                manifold: plan.label.clone(),
                method: method_label(choice),
                factor: plan.factor.name().to_string(),
                factor_value: v,
                n: sample.n,
                mean: m,
                sd: sample_sd(&values).unwrap_or(0.0),
                replicates: values.len(),
                failures,
                seconds,
            });
        }
    }
    Ok(rows)
}

fn method_label(choice: &EstimatorChoice) -> String {
    match choice {
        EstimatorChoice::Fixed(c) => c.method.name().to_string(),
        EstimatorChoice::Tuned(c) if c.method == Method::Twonn => c.method.name().to_string(),
        EstimatorChoice::Tuned(c) => format!("{}+tuned", c.method.name()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuitePlan {
    pub n: usize,
    pub distribution: Distribution,
    pub noise_sigma: f64,
    pub estimators: Vec<EstimatorChoice>,
    pub replicates: usize,
    pub base_seed: u64,
    /// Catalog ids to run; empty means all 18.
    pub manifolds: Vec<String>,
}

impl SuitePlan {
    /// One single-cell sweep per manifold, factor `n`.
    pub fn sweeps(&self) -> Result<Vec<ExperimentPlan>> {
        let entries: Vec<(String, ManifoldSpec)> = if self.manifolds.is_empty() {
            catalog().into_iter().map(|(id, s)| (id.to_string(), s)).collect()
        } else {
            self.manifolds
                .iter()
                .map(|id| Ok((id.to_ascii_uppercase(), crate::geometry::lookup(id)?)))
                .collect::<Result<_>>()?
        };
        Ok(entries
            .into_iter()
            .map(|(id, spec)| ExperimentPlan {
                label: id,
                manifold: spec,
                sample: SampleConfig {
                    n: self.n,
                    distribution: self.distribution,
                    noise_sigma: self.noise_sigma,
                    seed: self.base_seed,
                    stream: 0,
                },
                estimators: self.estimators.clone(),
                factor: Factor::N,
                values: vec![self.n as f64],
                replicates: self.replicates,
                base_seed: self.base_seed,
            })
            .collect())
    }
}

pub fn run_suite(plan: &SuitePlan, opts: &RunOptions) -> Result<Vec<SummaryRow>> {
    let mut rows = Vec::new();
    for sweep in plan.sweeps()? {
        rows.extend(run_sweep(&sweep, opts)?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_plan() -> ExperimentPlan {
        ExperimentPlan {
            label: "sphere".into(),
            manifold: ManifoldSpec::sphere(2, 1.0, 3),
            sample: SampleConfig::uniform(30, 0),
            estimators: vec![
                EstimatorChoice::Fixed(EstimatorConfig::new(Method::Mle).with_k(5)),
                EstimatorChoice::Fixed(EstimatorConfig::new(Method::Mada).with_k(5)),
            ],
            factor: Factor::N,
            values: vec![30.0, 40.0],
            replicates: 3,
            base_seed: 11,
        }
    }

    #[test]
    fn stub_rows_enumerate() {
        let plan = tiny_plan();
        let stub = |_: &PointCloud, _: Option<&[NeighborSet]>, c: &EstimatorChoice, ctx: &CellContext| {
            Ok(ctx.replicate as f64 + if c.method() == Method::Mle { 0.0 } else { 10.0 })
        };
        let rows = run_sweep_with(&plan, &RunOptions::default(), stub).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[0].method.as_str(), rows[0].factor_value, rows[0].mean, rows[0].sd), ("mle", 30.0, 1.0, 1.0));
        assert_eq!((rows[1].method.as_str(), rows[1].mean), ("mada", 11.0));
        assert_eq!((rows[3].n, rows[3].replicates, rows[3].failures), (40, 3, 0));
    }

    #[test]
    fn failures_are_counted() {
        let plan = tiny_plan();
        let stub = |_: &PointCloud, _: Option<&[NeighborSet]>, _: &EstimatorChoice, ctx: &CellContext| {
            if ctx.replicate == 1 {
                Err(Error::Degenerate("stub".into()))
            } else {
                Ok(2.0)
            }
        };
        let rows = run_sweep_with(&plan, &RunOptions::default(), stub).unwrap();
        assert!(rows.iter().all(|r| r.replicates == 2 && r.failures == 1 && r.sd == 0.0));
        let all_fail = |_: &PointCloud, _: Option<&[NeighborSet]>, _: &EstimatorChoice, _: &CellContext| {
            Err(Error::Degenerate("stub".into()))
        };
        assert!(run_sweep_with(&plan, &RunOptions::default(), all_fail).is_err());
    }

    #[test]
    fn parallel_equals_serial() {
        let plan = tiny_plan();
        let a = run_sweep(&plan, &RunOptions { parallel: true, timing: false }).unwrap();
        let b = run_sweep(&plan, &RunOptions { parallel: false, timing: false }).unwrap();
        let (mut x, mut y) = (Vec::new(), Vec::new());
        write_rows(&a, &mut x).unwrap();
        write_rows(&b, &mut y).unwrap();
        assert_eq!(x, y);
        assert!(String::from_utf8(x).unwrap().starts_with(CSV_HEADER));
    }

    #[test]
    fn factor_names_round_trip() {
        for f in [Factor::K, Factor::Alpha, Factor::N, Factor::P, Factor::Radius, Factor::D, Factor::C, Factor::Sigma] {
            assert_eq!(f.name().parse::<Factor>().unwrap(), f);
        }
    }

    #[test]
    fn single_replicate_has_zero_sd() {
        let mut plan = tiny_plan();
        plan.replicates = 1;
        let rows = run_sweep(&plan, &RunOptions::default()).unwrap();
        assert!(rows.iter().all(|r| r.sd == 0.0));
    }
}
