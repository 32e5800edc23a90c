use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use dimlab::bench::{preset, Preset};
use dimlab::bench::{run_suite, run_sweep, write_rows, EstimatorChoice, ExperimentPlan, Factor, RunOptions, SummaryRow};
use dimlab::dataset::{parse_delimiter, read_csv, write_csv, CsvOptions};
use dimlab::geometry::{lookup, sample_manifold, Distribution, SampleConfig};
use dimlab::numerics::fmt::fmt_sig;
use dimlab::transport::GroundMetric;
use dimlab::tuning::{tuned_estimate, TunedEstimate};
use dimlab::{estimate as run_estimate, EstimatorConfig, Error, Method, PointCloud, Result};

use crate::{EstimateArgs, RunArgs, SampleArgs, SuiteArgs, SweepArgs};

/// DanCo is left out of `--method all` above this ambient dimension.
const DANCO_MAX_P: usize = 100;

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn sample(a: &SampleArgs) -> Result<()> {
    let spec = lookup(&a.manifold)?;
    let cfg = SampleConfig {
        n: a.n,
        distribution: a.dist.parse::<Distribution>()?,
        noise_sigma: a.sigma,
        seed: a.seed,
        stream: 0,
    };
    let cloud = sample_manifold(&spec, &cfg)?;
    let mut out = open_out(a.out.as_deref())?;
    write_csv(&cloud, &mut out)?;
    out.flush()?;
    Ok(())
}

pub(crate) fn parse_methods(s: &str) -> Result<Vec<Method>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(Method::ALL.to_vec());
    }
    let methods: Vec<Method> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if methods.is_empty() {
        return Err(Error::InvalidArgument("no method given".into()));
    }
    Ok(methods)
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidArgument(format!("bad {what} value '{t}'")))
        })
        .collect()
}

/// One method's outcome: the estimate plus the tuning window, when tuned.
struct Outcome {
    method: Method,
    tuned: TunedEstimate,
}

fn param_name(m: Method) -> &'static str {
    match m {
        Method::Wasserstein => "alpha",
        Method::Twonn => "",
        _ => "K",
    }
}

fn window_values(t: &TunedEstimate) -> Option<(f64, f64)> {
    let (grid, (lo, hi)) = (t.grid.as_ref()?, t.window?);
    Some((grid.values[lo - 1], grid.values[hi - 1]))
}

pub fn estimate(a: &EstimateArgs) -> Result<()> {
    let opts = CsvOptions {
        delimiter: parse_delimiter(&a.delimiter)?,
        has_header: a.header,
    };
    let cloud = read_csv(&a.input, &opts)?;
    let all = a.method.trim().eq_ignore_ascii_case("all");
    let mut methods = parse_methods(&a.method)?;
    if all && cloud.p() > DANCO_MAX_P && !a.with_danco {
        methods.retain(|&m| m != Method::Danco);
        log::warn!("skipping DanCo for p = {} > {DANCO_MAX_P}; pass --with-danco to include it", cloud.p());
    }
    let grid = a.grid.as_deref().map(|g| parse_list(g, "grid")).transpose()?;
    let metric = a.metric.as_deref().map(str::parse::<GroundMetric>).transpose()?;

    let mut outcomes = Vec::with_capacity(methods.len());
    for &m in &methods {
        let mut cfg = EstimatorConfig::new(m).with_seed(a.seed);
        if let Some(g) = metric {
            cfg.ground_metric = g;
        }
        if a.neighbors_only {
            cfg.include_center = false;
        }
        let tuned = if a.tune {
            tuned_estimate(&cloud, &cfg, grid.as_deref())?
        } else {
            if let (Some(k), true) = (a.k, m.uses_k()) {
                cfg = cfg.with_k(k);
            }
            if let (Some(alpha), Method::Wasserstein) = (a.alpha, m) {
                cfg = cfg.with_alpha(alpha);
            }
            TunedEstimate { report: run_estimate(&cloud, &cfg)?, grid: None, window: None }
        };
        outcomes.push(Outcome { method: m, tuned });
    }

    let mut out = BufWriter::new(io::stdout().lock());
    if a.csv {
        print_csv(&mut out, &outcomes, a.tune)?;
    } else {
        print_text(&mut out, &cloud, &outcomes, a.tune)?;
    }
    out.flush()?;
    Ok(())
}

fn print_csv(out: &mut impl Write, outcomes: &[Outcome], tuned: bool) -> Result<()> {
    writeln!(out, "method,d_hat,parameter,value,window_start,window_end")?;
    for o in outcomes {
        let cfg = &o.tuned.report.config;
        let fixed_value = match o.method {
            Method::Twonn => String::new(),
            Method::Wasserstein if !tuned => fmt_sig(cfg.alpha, 17),
            _ if !tuned => cfg.k.to_string(),
            _ => String::new(),
        };
        let (lo, hi) = window_values(&o.tuned)
            .map(|(lo, hi)| (fmt_sig(lo, 17), fmt_sig(hi, 17)))
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            o.method.name(),
            fmt_sig(o.tuned.d_hat(), 17),
            param_name(o.method),
            fixed_value,
            lo,
            hi
        )?;
    }
    Ok(())
}

fn print_text(out: &mut impl Write, cloud: &PointCloud, outcomes: &[Outcome], tuned: bool) -> Result<()> {
    writeln!(out, "n = {}, p = {}", cloud.n(), cloud.p())?;
    for o in outcomes {
        let cfg = &o.tuned.report.config;
        let detail = match (window_values(&o.tuned), o.method) {
            (Some((lo, hi)), m) => format!("{} window {}..{}", param_name(m), fmt_sig(lo, 6), fmt_sig(hi, 6)),
            (None, Method::Twonn) => String::new(),
            (None, Method::Wasserstein) if !tuned => format!("alpha = {}", fmt_sig(cfg.alpha, 6)),
            (None, _) => format!("K = {}", cfg.k),
        };
        let d = &o.tuned.report.diagnostics;
        let mut notes = String::new();
        if d.dropped_locals > 0 {
            notes.push_str(&format!(", {} locals dropped", d.dropped_locals));
        }
        if d.invalid_splits > 0 {
            notes.push_str(&format!(", {} splits invalid", d.invalid_splits));
        }
        let line = format!("{:<12} {:>10}  {detail}{notes}", o.method.name(), fmt_sig(o.tuned.d_hat(), 6));
        writeln!(out, "{}", line.trim_end())?;
    }
    Ok(())
}

fn choices(methods: &[Method], tune: bool, seed: u64) -> Vec<EstimatorChoice> {
    methods
        .iter()
        .map(|&m| {
            let cfg = EstimatorConfig::new(m).with_seed(seed);
            if tune {
                EstimatorChoice::Tuned(cfg)
            } else {
                EstimatorChoice::Fixed(cfg)
            }
        })
        .collect()
}

fn run_options(c: &RunArgs) -> RunOptions {
    RunOptions {
        parallel: !c.serial,
        timing: c.timing,
    }
}

fn apply_common(p: &mut Preset, c: &RunArgs) -> Result<()> {
    if let Some(r) = c.replicates {
        p.set_replicates(r);
    }
    p.set_seed(c.seed);
    if let Some(list) = &c.estimators {
        p.restrict(&parse_methods(list)?)?;
    }
    Ok(())
}

fn run_preset(p: &Preset, c: &RunArgs) -> Result<Vec<SummaryRow>> {
    match p {
        Preset::Sweep(plan) => run_sweep(plan, &run_options(c)),
        Preset::Suite(plan) => run_suite(plan, &run_options(c)),
    }
}

fn emit(rows: &[SummaryRow], c: &RunArgs) -> Result<()> {
    let mut out = open_out(c.out.as_deref())?;
    write_rows(rows, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn sweep(a: &SweepArgs) -> Result<()> {
    let mut p = match &a.preset {
        Some(name) => preset(name)?,
        None => {
            let (Some(manifold), Some(factor), Some(values)) = (&a.manifold, &a.factor, &a.values) else {
                return Err(Error::InvalidArgument("--manifold, --factor and --values are required".into()));
            };
            let methods = match &a.common.estimators {
                Some(list) => parse_methods(list)?,
                None => Method::ALL.to_vec(),
            };
            let plan = ExperimentPlan {
                label: manifold.to_ascii_uppercase(),
                manifold: lookup(manifold)?,
                sample: SampleConfig {
                    n: a.n,
                    distribution: a.dist.parse()?,
                    noise_sigma: a.sigma,
                    seed: a.common.seed,
                    stream: 0,
                },
                estimators: choices(&methods, a.tune, a.common.seed),
                factor: factor.parse::<Factor>()?,
                values: parse_list(values, "factor")?,
                replicates: a.common.replicates.unwrap_or(10),
                base_seed: a.common.seed,
            };
            plan.validate()?;
            Preset::Sweep(plan)
        }
    };
    apply_common(&mut p, &a.common)?;
    let rows = run_preset(&p, &a.common)?;
    emit(&rows, &a.common)
}

pub fn suite(a: &SuiteArgs) -> Result<()> {
    let mut p = preset(&a.preset)?;
    let Preset::Suite(plan) = &mut p else {
        return Err(Error::InvalidArgument(format!("'{}' is a sweep preset; use `dimlab sweep`", a.preset)));
    };
    if let Some(ids) = &a.manifolds {
        plan.manifolds = ids.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    }
    apply_common(&mut p, &a.common)?;
    let rows = run_preset(&p, &a.common)?;
    emit(&rows, &a.common)
}
