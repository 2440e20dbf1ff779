//! Scenario execution and CSV output.
//!
//! A scenario expands into one or more labelled configurations (sweeps),
//! each run under every scheme for `replications` seeds. Two CSV files are
//! produced:
//!
//! * `slots.csv`: one row per (label, scheme, replication, slot, SU) with
//!   columns `label,scheme,replication,slot,su_id,gamma,bid,action,payment,jain_f,channel,valuation`;
//! * `summary.csv`: one row per (label, scheme, SU) plus an `all` row, with
//!   columns `label,scheme,su_id,replications,mean_gamma,std_gamma,mean_jain,std_jain,gain_pct`.
//!
//! Runs may execute in parallel; rows are always written in
//! (label, scheme, replication) order so output bytes do not depend on the
//! thread count.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::agents::Strategy;
use crate::auction::Action;
use crate::config::{ScenarioConfig, Scheme};
use crate::error::Error;
use crate::sim::{self, MetricsSeries};

pub const SLOTS_HEADER: [&str; 12] = [
    "label",
    "scheme",
    "replication",
    "slot",
    "su_id",
    "gamma",
    "bid",
    "action",
    "payment",
    "jain_f",
    "channel",
    "valuation",
];

pub const SUMMARY_HEADER: [&str; 9] = [
    "label",
    "scheme",
    "su_id",
    "replications",
    "mean_gamma",
    "std_gamma",
    "mean_jain",
    "std_jain",
    "gain_pct",
];

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Sim(#[from] Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("thread pool: {0}")]
    Threads(String),
}

/// Outcome of one replication, reduced to what the summary needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub label: String,
    pub scheme: String,
    pub replication: u32,
    pub final_gamma: Vec<f64>,
    pub final_jain: f64,
}

impl RunResult {
    pub fn from_series(label: &str, scheme: &Scheme, replication: u32, series: &MetricsSeries) -> Self {
        Self {
            label: label.to_string(),
            scheme: scheme.name(),
            replication,
            final_gamma: series.final_gamma(),
            final_jain: series.final_jain(),
        }
    }
}

/// Aggregate over replications. Values are rounded to 9 significant digits,
/// exactly the precision written to CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub label: String,
    pub scheme: String,
    /// `None` for the row pooling every SU.
    pub su: Option<usize>,
    pub replications: u32,
    pub mean_gamma: f64,
    pub std_gamma: f64,
    pub mean_jain: f64,
    pub std_jain: f64,
    /// Relative gain of this scheme's mean utility over the myopic scheme in
    /// the same label, in percent.
    pub gain_pct: Option<f64>,
}

impl SummaryRow {
    pub fn to_record(&self) -> Vec<String> {
        vec![
            self.label.clone(),
            self.scheme.clone(),
            self.su.map_or_else(|| "all".to_string(), |i| i.to_string()),
            self.replications.to_string(),
            self.mean_gamma.to_string(),
            self.std_gamma.to_string(),
            self.mean_jain.to_string(),
            self.std_jain.to_string(),
            self.gain_pct.map_or_else(String::new, |g| g.to_string()),
        ]
    }

    pub fn from_record(record: &csv::StringRecord) -> Option<Self> {
        if record.len() != SUMMARY_HEADER.len() {
            return None;
        }
        let num = |i: usize| record[i].parse::<f64>().ok();
        Some(Self {
            label: record[0].to_string(),
            scheme: record[1].to_string(),
            su: match &record[2] {
                "all" => None,
                s => Some(s.parse().ok()?),
            },
            replications: record[3].parse().ok()?,
            mean_gamma: num(4)?,
            std_gamma: num(5)?,
            mean_jain: num(6)?,
            std_jain: num(7)?,
            gain_pct: match &record[8] {
                "" => None,
                _ => Some(num(8)?),
            },
        })
    }
}

pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Builds summary rows from results grouped by label then scheme, in the
/// order they first appear.
pub fn summarize(results: &[RunResult]) -> Vec<SummaryRow> {
    let mut groups: Vec<(&str, &str, Vec<&RunResult>)> = Vec::new();
    for r in results {
        match groups
            .iter_mut()
            .find(|(l, s, _)| *l == r.label && *s == r.scheme)
        {
            Some(g) => g.2.push(r),
            None => groups.push((&r.label, &r.scheme, vec![r])),
        }
    }
    let pooled = |runs: &[&RunResult], su: Option<usize>| -> Vec<f64> {
        runs.iter()
            .flat_map(|r| match su {
                Some(i) => vec![r.final_gamma[i]],
                None => r.final_gamma.clone(),
            })
            .collect()
    };
    let myopic = Strategy::Myopic.name();
    let mut rows = Vec::new();
    for (label, scheme, runs) in &groups {
        let baseline = groups
            .iter()
            .find(|(l, s, _)| l == label && *s == myopic)
            .filter(|_| *scheme != myopic)
            .map(|g| &g.2);
        let jains: Vec<f64> = runs.iter().map(|r| r.final_jain).collect();
        let (mean_jain, std_jain) = mean_std(&jains);
        let n = runs[0].final_gamma.len();
        let targets = (0..n).map(Some).chain(std::iter::once(None));
        for su in targets {
            let (mean_gamma, std_gamma) = mean_std(&pooled(runs, su));
            let gain_pct = baseline.and_then(|base| {
                if base[0].final_gamma.len() != n {
                    return None;
                }
                let (base_mean, _) = mean_std(&pooled(base, su));
                Some(100.0 * (mean_gamma - base_mean) / base_mean)
            });
            rows.push(SummaryRow {
                label: label.to_string(),
                scheme: scheme.to_string(),
                su,
                replications: runs.len() as u32,
                mean_gamma: round_sig(mean_gamma, 9),
                std_gamma: round_sig(std_gamma, 9),
                mean_jain: round_sig(mean_jain, 9),
                std_jain: round_sig(std_jain, 9),
                gain_pct: gain_pct.map(|g| round_sig(g, 9)),
            });
        }
    }
    rows
}

pub fn slots_header() -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SLOTS_HEADER)
        .expect("writing to memory cannot fail");
    w.into_inner().expect("writing to memory cannot fail")
}

/// Serializes one run's per-slot rows (no header).
pub fn trace_rows(label: &str, scheme: &str, replication: u32, series: &MetricsSeries) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    let rep = replication.to_string();
    for t in 0..series.len() {
        let slot = t.to_string();
        let jain = series.jain[t].to_string();
        for (i, a) in series.slot(t).iter().enumerate() {
            let (bid, action) = match a.action {
                Action::Bid(v) => (v.to_string(), "bid"),
                Action::StayOut => (String::new(), "so"),
            };
            w.write_record([
                label,
                scheme,
                &rep,
                &slot,
                &i.to_string(),
                &a.gamma.to_string(),
                &bid,
                action,
                &a.payment.to_string(),
                &jain,
                &a.channel.map_or_else(String::new, |c| c.to_string()),
                &a.valuation.to_string(),
            ])
            .expect("writing to memory cannot fail");
        }
    }
    w.into_inner().expect("writing to memory cannot fail")
}

struct Job<'a> {
    label: &'a str,
    config: &'a ScenarioConfig,
    scheme: &'a Scheme,
    replication: u32,
}

/// A finished run and, when requested, its encoded slot rows.
type Executed = (RunResult, Option<Vec<u8>>);

fn execute(job: &Job<'_>, keep_trace: bool) -> Result<Executed, Error> {
    let series = sim::run(job.config, job.scheme, job.replication)?;
    let trace = keep_trace.then(|| trace_rows(job.label, &job.scheme.name(), job.replication, &series));
    Ok((
        RunResult::from_series(job.label, job.scheme, job.replication, &series),
        trace,
    ))
}

#[cfg(feature = "parallel")]
fn execute_all(
    jobs: &[Job<'_>],
    keep_trace: bool,
    threads: Option<usize>,
) -> Result<Vec<Executed>, ReportError> {
    use rayon::prelude::*;
    let work = || {
        jobs.par_iter()
            .map(|j| execute(j, keep_trace))
            .collect::<Result<Vec<_>, _>>()
    };
    let out = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ReportError::Threads(e.to_string()))?
            .install(work),
        None => work(),
    };
    Ok(out?)
}

#[cfg(not(feature = "parallel"))]
fn execute_all(
    jobs: &[Job<'_>],
    keep_trace: bool,
    _threads: Option<usize>,
) -> Result<Vec<Executed>, ReportError> {
    Ok(jobs
        .iter()
        .map(|j| execute(j, keep_trace))
        .collect::<Result<Vec<_>, _>>()?)
}

/// Runs every replication of every expanded config and scheme, streaming
/// per-slot rows into `slots` (when given and the config asks for a trace).
///
/// `threads = None` uses the global pool.
pub fn simulate<W: Write>(
    config: &ScenarioConfig,
    mut slots: Option<&mut W>,
    threads: Option<usize>,
) -> Result<Vec<RunResult>, ReportError> {
    config.validate().map_err(Error::from)?;
    let keep_trace = config.write_trace && slots.is_some();
    let mut results = Vec::new();
    for (label, cfg) in config.expand() {
        let jobs: Vec<Job<'_>> = cfg
            .schemes
            .iter()
            .flat_map(|scheme| {
                (0..cfg.replications).map(move |replication| (scheme, replication))
            })
            .map(|(scheme, replication)| Job {
                label: &label,
                config: &cfg,
                scheme,
                replication,
            })
            .collect();
        for (result, trace) in execute_all(&jobs, keep_trace, threads)? {
            if let (Some(w), Some(bytes)) = (slots.as_deref_mut(), trace) {
                w.write_all(&bytes)
                    .map_err(|source| ReportError::Io {
                        path: PathBuf::from("slots.csv"),
                        source,
                    })?;
            }
            results.push(result);
        }
    }
    Ok(results)
}

/// Writes the summary table, header first.
pub fn write_summary<W: Write>(w: &mut csv::Writer<W>, rows: &[SummaryRow]) -> csv::Result<()> {
    w.write_record(SUMMARY_HEADER)?;
    for row in rows {
        w.write_record(row.to_record())?;
    }
    w.flush()?;
    Ok(())
}

/// Files produced by [`run_scenario`].
#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub summary: Vec<SummaryRow>,
    pub summary_path: PathBuf,
    pub slots_path: Option<PathBuf>,
    pub config_path: PathBuf,
}

/// Runs a scenario and writes `scenario.toml`, `summary.csv` and (when
/// tracing) `slots.csv` into `out_dir`.
pub fn run_scenario(
    config: &ScenarioConfig,
    out_dir: &Path,
    threads: Option<usize>,
) -> Result<ScenarioReport, ReportError> {
    config.validate().map_err(Error::from)?;
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ReportError::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;

    let config_path = out_dir.join("scenario.toml");
    fs::write(&config_path, config.to_toml_string()).map_err(io_err(&config_path))?;

    let slots_path = out_dir.join("slots.csv");
    let results = if config.write_trace {
        let file = File::create(&slots_path).map_err(io_err(&slots_path))?;
        let mut w = BufWriter::new(file);
        w.write_all(&slots_header()).map_err(io_err(&slots_path))?;
        let results = simulate(config, Some(&mut w), threads).map_err(|e| match e {
            ReportError::Io { source, .. } => ReportError::Io {
                path: slots_path.clone(),
                source,
            },
            other => other,
        })?;
        w.flush().map_err(io_err(&slots_path))?;
        results
    } else {
        simulate::<io::Sink>(config, None, threads)?
    };

    let summary = summarize(&results);
    let summary_path = out_dir.join("summary.csv");
    let file = File::create(&summary_path).map_err(io_err(&summary_path))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    write_summary(&mut w, &summary).map_err(|source| ReportError::Csv {
        path: summary_path.clone(),
        source,
    })?;

    Ok(ScenarioReport {
        summary,
        summary_path,
        slots_path: config.write_trace.then_some(slots_path),
        config_path,
    })
}
