//! Benchmark sweeps over observation probability and error ratio.
//!
//! Trial `t` of every grid point uses instance seed `base_seed + t`, and all
//! methods at a grid point see the same instance. Trials may run on a thread
//! pool; records are collected in (grid point, trial, method) order before
//! aggregation, so the output does not depend on scheduling.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{altmin_factorize, frobenius_manifold_solve, ALTMIN_MAX_ITERS, ALTMIN_REL_TOL};
use crate::datagen::{generate, Instance, InstanceSpec};
use crate::error::{Error, Result};
use crate::metrics::{haplotype_distance, mec, nmse};
use crate::model::{SolverConfig, SolverParams};
use crate::solver::{extract_haplotype, solve};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Method {
    ManifoldMec,
    ManifoldFro,
    Altmin,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::ManifoldMec, Method::ManifoldFro, Method::Altmin];

    pub fn name(self) -> &'static str {
        match self {
            Method::ManifoldMec => "manifold-mec",
            Method::ManifoldFro => "manifold-fro",
            Method::Altmin => "altmin",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method {s:?} (expected manifold-mec, manifold-fro or altmin)"))
    }
}

/// How `p` is chosen at each grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum PSchedule {
    /// Use the configured `p` everywhere.
    Fixed,
    /// Interpolate `p` linearly in the error ratio between two anchors,
    /// clamped outside them.
    Linear {
        err_lo: f64,
        err_hi: f64,
        p_lo: f64,
        p_hi: f64,
    },
}

impl PSchedule {
    /// 1.05 at error ratio 0.14 rising to 1.2 at 0.28.
    pub const LINEAR_DEFAULT: PSchedule = PSchedule::Linear {
        err_lo: 0.14,
        err_hi: 0.28,
        p_lo: 1.05,
        p_hi: 1.2,
    };

    pub fn p_at(&self, err_ratio: f64, fixed: f64) -> f64 {
        match *self {
            PSchedule::Fixed => fixed,
            PSchedule::Linear {
                err_lo,
                err_hi,
                p_lo,
                p_hi,
            } => {
                let t = ((err_ratio - err_lo) / (err_hi - err_lo)).clamp(0.0, 1.0);
                p_lo + t * (p_hi - p_lo)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    pub m: usize,
    pub n: usize,
    pub pds: Vec<f64>,
    pub err_ratios: Vec<f64>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub base_seed: u64,
    pub params: SolverParams,
    pub p_schedule: PSchedule,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridPoint {
    pub pd: f64,
    pub err_ratio: f64,
    pub p: f64,
}

impl SweepSpec {
    pub fn grid(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &pd in &self.pds {
            for &err_ratio in &self.err_ratios {
                out.push(GridPoint {
                    pd,
                    err_ratio,
                    p: self.p_schedule.p_at(err_ratio, self.params.p),
                });
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.pds.is_empty() || self.err_ratios.is_empty() || self.methods.is_empty() {
            return Err(Error::InvalidSpec(
                "sweep needs at least one pd, error ratio and method".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::InvalidSpec("trials must be positive".into()));
        }
        for g in self.grid() {
            InstanceSpec {
                m: self.m,
                n: self.n,
                pd: g.pd,
                err_ratio: g.err_ratio,
                seed: 0,
            }
            .validate()?;
            self.config_at(&g)?;
        }
        Ok(())
    }

    fn config_at(&self, g: &GridPoint) -> Result<SolverConfig> {
        SolverConfig::new(SolverParams { p: g.p, ..self.params })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialMetrics {
    pub nmse: f64,
    pub hd: usize,
    pub mec: usize,
    pub iterations: usize,
    pub wall_ms: f64,
    pub termination: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub method: Method,
    pub grid: GridPoint,
    pub trial: usize,
    pub seed: u64,
    pub outcome: std::result::Result<TrialMetrics, String>,
}

/// Runs one method on one instance and scores it against the truth.
pub fn evaluate(method: Method, inst: &Instance, cfg: &SolverConfig) -> Result<TrialMetrics> {
    let start = Instant::now();
    let (estimate, haplotype, iterations, termination) = match method {
        Method::ManifoldMec | Method::ManifoldFro => {
            let r = if method == Method::ManifoldMec {
                solve(&inst.rm, cfg)?
            } else {
                frobenius_manifold_solve(&inst.rm, cfg)?
            };
            (
                r.x_final.to_dense(),
                r.haplotype,
                r.iterations,
                format!("{:?}", r.termination),
            )
        }
        Method::Altmin => {
            let r = altmin_factorize(&inst.rm, ALTMIN_MAX_ITERS, ALTMIN_REL_TOL)?;
            let x = crate::model::RankOneFactors::from_outer(&r.u, &r.v)?;
            let h = extract_haplotype(&x).haplotype;
            let status = if r.iterations < ALTMIN_MAX_ITERS {
                "Converged"
            } else {
                "MaxIters"
            };
            (r.to_dense(), h, r.iterations, status.to_string())
        }
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(TrialMetrics {
        nmse: nmse(&inst.gt.full_matrix(), &estimate)?,
        hd: haplotype_distance(&inst.gt.h, &haplotype)?,
        mec: mec(&inst.rm, &haplotype)?,
        iterations,
        wall_ms,
        termination,
    })
}

fn run_point(spec: &SweepSpec, grid: GridPoint, trial: usize) -> Vec<TrialRecord> {
    let seed = spec.base_seed.wrapping_add(trial as u64);
    let inst = generate(&InstanceSpec {
        m: spec.m,
        n: spec.n,
        pd: grid.pd,
        err_ratio: grid.err_ratio,
        seed,
    });
    let cfg = spec.config_at(&grid);
    spec.methods
        .iter()
        .map(|&method| {
            let outcome = match (&inst, &cfg) {
                (Ok(inst), Ok(cfg)) => evaluate(method, inst, cfg).map_err(|e| e.to_string()),
                (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
            };
            TrialRecord {
                method,
                grid,
                trial,
                seed,
                outcome,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRow {
    pub method: Method,
    pub m: usize,
    pub n: usize,
    pub pd: f64,
    pub err_ratio: f64,
    pub p: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub trials: usize,
    pub failures: usize,
    pub mean_nmse: f64,
    pub sd_nmse: f64,
    pub mean_hd: f64,
    pub sd_hd: f64,
    pub mean_mec: f64,
    pub sd_mec: f64,
    pub mean_iters: f64,
    pub mean_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepOutput {
    pub rows: Vec<AggregateRow>,
    pub trials: Vec<TrialRecord>,
}

/// Sample mean and standard deviation (n − 1 denominator; 0 for one value).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn aggregate(spec: &SweepSpec, grid: GridPoint, method: Method, records: &[&TrialRecord]) -> AggregateRow {
    let ok: Vec<&TrialMetrics> = records.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
    let col = |f: fn(&TrialMetrics) -> f64| ok.iter().map(|t| f(t)).collect::<Vec<f64>>();
    let (mean_nmse, sd_nmse) = mean_sd(&col(|t| t.nmse));
    let (mean_hd, sd_hd) = mean_sd(&col(|t| t.hd as f64));
    let (mean_mec, sd_mec) = mean_sd(&col(|t| t.mec as f64));
    let (mean_iters, _) = mean_sd(&col(|t| t.iterations as f64));
    let (mean_ms, _) = mean_sd(&col(|t| t.wall_ms));
    AggregateRow {
        method,
        m: spec.m,
        n: spec.n,
        pd: grid.pd,
        err_ratio: grid.err_ratio,
        p: grid.p,
        gamma1: spec.params.gamma1,
        gamma2: spec.params.gamma2,
        trials: records.len(),
        failures: records.len() - ok.len(),
        mean_nmse,
        sd_nmse,
        mean_hd,
        sd_hd,
        mean_mec,
        sd_mec,
        mean_iters,
        mean_ms,
    }
}

/// Runs the sweep on `jobs` worker threads.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<SweepOutput> {
    spec.validate()?;
    let grid = spec.grid();
    let tasks: Vec<(GridPoint, usize)> = grid
        .iter()
        .flat_map(|&g| (0..spec.trials).map(move |t| (g, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidSpec(format!("thread pool: {e}")))?;
    let trials: Vec<TrialRecord> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(g, t)| run_point(spec, g, t))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    });

    let mut rows = Vec::new();
    for (gi, &g) in grid.iter().enumerate() {
        let block = &trials[gi * spec.trials * spec.methods.len()..(gi + 1) * spec.trials * spec.methods.len()];
        for &method in &spec.methods {
            let records: Vec<&TrialRecord> = block.iter().filter(|r| r.method == method).collect();
            rows.push(aggregate(spec, g, method, &records));
        }
    }
    Ok(SweepOutput { rows, trials })
}

pub const CSV_HEADER: [&str; 18] = [
    "method",
    "m",
    "n",
    "pd",
    "err_ratio",
    "p",
    "gamma1",
    "gamma2",
    "trials",
    "failures",
    "mean_nmse",
    "sd_nmse",
    "mean_hd",
    "sd_hd",
    "mean_mec",
    "sd_mec",
    "mean_iters",
    "mean_ms",
];

/// Columns that carry wall-clock time and so differ between runs.
pub const TIMING_COLUMNS: [&str; 2] = ["mean_ms", "ms"];

pub const TRIAL_CSV_HEADER: [&str; 17] = [
    "method",
    "m",
    "n",
    "pd",
    "err_ratio",
    "p",
    "gamma1",
    "gamma2",
    "trial",
    "seed",
    "status",
    "nmse",
    "hd",
    "mec",
    "iters",
    "ms",
    "termination",
];

fn aggregate_fields(r: &AggregateRow) -> Vec<String> {
    vec![
        r.method.to_string(),
        r.m.to_string(),
        r.n.to_string(),
        r.pd.to_string(),
        r.err_ratio.to_string(),
        r.p.to_string(),
        r.gamma1.to_string(),
        r.gamma2.to_string(),
        r.trials.to_string(),
        r.failures.to_string(),
        r.mean_nmse.to_string(),
        r.sd_nmse.to_string(),
        r.mean_hd.to_string(),
        r.sd_hd.to_string(),
        r.mean_mec.to_string(),
        r.sd_mec.to_string(),
        r.mean_iters.to_string(),
        r.mean_ms.to_string(),
    ]
}

/// Output layout for aggregate rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    /// Whitespace-separated columns with a `#` header line, one block per
    /// method.
    Gnuplot,
}

pub fn write_aggregate<W: Write>(rows: &[AggregateRow], format: TableFormat, out: &mut W) -> io::Result<()> {
    match format {
        TableFormat::Csv => {
            writeln!(out, "{}", CSV_HEADER.join(","))?;
            for r in rows {
                writeln!(out, "{}", aggregate_fields(r).join(","))?;
            }
        }
        TableFormat::Gnuplot => {
            writeln!(out, "# {}", CSV_HEADER.join(" "))?;
            let mut methods: Vec<Method> = Vec::new();
            for r in rows {
                if !methods.contains(&r.method) {
                    methods.push(r.method);
                }
            }
            // one block per method, two blank lines apart, for `index`
            for (k, &method) in methods.iter().enumerate() {
                if k > 0 {
                    writeln!(out, "\n")?;
                }
                for r in rows.iter().filter(|r| r.method == method) {
                    writeln!(out, "{}", aggregate_fields(r).join(" "))?;
                }
            }
        }
    }
    Ok(())
}

fn sanitize(s: &str) -> String {
    s.replace([',', '\n'], ";")
}

pub fn write_trials_csv<W: Write>(spec: &SweepSpec, trials: &[TrialRecord], out: &mut W) -> io::Result<()> {
    writeln!(out, "{}", TRIAL_CSV_HEADER.join(","))?;
    for t in trials {
        let prefix = format!(
            "{},{},{},{},{},{},{},{},{},{}",
            t.method,
            spec.m,
            spec.n,
            t.grid.pd,
            t.grid.err_ratio,
            t.grid.p,
            spec.params.gamma1,
            spec.params.gamma2,
            t.trial,
            t.seed
        );
        match &t.outcome {
            Ok(m) => writeln!(
                out,
                "{prefix},ok,{},{},{},{},{},{}",
                m.nmse, m.hd, m.mec, m.iterations, m.wall_ms, m.termination
            )?,
            Err(e) => writeln!(out, "{prefix},{},,,,,,", sanitize(&format!("error: {e}")))?,
        }
    }
    Ok(())
}

/// Drops the named columns from a CSV text, for comparisons that must
/// ignore timing.
pub fn strip_columns(csv: &str, drop: &[&str]) -> String {
    let mut lines = csv.lines();
    let Some(header) = lines.next() else {
        return String::new();
    };
    let keep: Vec<bool> = header.split(',').map(|h| !drop.contains(&h)).collect();
    let filter = |line: &str| {
        line.split(',')
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(f, _)| f)
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut out = filter(header);
    out.push('\n');
    for line in lines {
        out.push_str(&filter(line));
        out.push('\n');
    }
    out
}
