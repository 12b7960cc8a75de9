use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::run;
use super::metrics::MetricsReport;
use super::{ConfigError, SimConfig};
use crate::routing::RoutingMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SweepAxis {
    NodeCount,
    Speed,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::NodeCount => "node_count",
            SweepAxis::Speed => "speed",
        }
    }

    pub fn apply(self, base: &SimConfig, value: f64) -> Result<SimConfig, ConfigError> {
        let mut cfg = base.clone();
        match self {
            SweepAxis::NodeCount => {
                if base.nodes.is_some() {
                    return Err(ConfigError::new("nodes", "cannot sweep node_count over a fixed node table"));
                }
                if value.fract() != 0.0 || value < 2.0 {
                    return Err(ConfigError::new("node_count", format!("sweep value {value} is not an integer ≥ 2")));
                }
                cfg.node_count = value as usize;
            }
            SweepAxis::Speed => {
                if base.nodes.is_some() {
                    return Err(ConfigError::new("nodes", "cannot sweep speed over a fixed node table"));
                }
                cfg.speed = value;
            }
        }
        Ok(cfg)
    }
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    Some((mean, var.sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub runs: usize,
    pub pdr: Option<(f64, f64)>,
    pub energy_rate: (f64, f64),
    pub hello: f64,
    pub reply_hello: f64,
    pub rreq: f64,
    pub rrep: f64,
    /// Base seed; repetition `i` runs with `seed + i`.
    pub seed: u64,
}

/// Runs `cfg` once per repetition with seeds `cfg.seed + i`, in parallel,
/// returning reports in repetition order.
pub fn run_repetitions(cfg: &SimConfig, repetitions: usize) -> Result<Vec<MetricsReport>, ConfigError> {
    (0..repetitions as u64)
        .into_par_iter()
        .map(|i| run(&SimConfig { seed: cfg.seed.wrapping_add(i), ..cfg.clone() }))
        .collect()
}

pub fn summarize(value: f64, seed: u64, reports: &[MetricsReport]) -> SweepRow {
    let pdrs: Vec<f64> = reports.iter().filter_map(|r| r.pdr).collect();
    let energy: Vec<f64> = reports.iter().map(|r| r.avg_energy_consumption_rate).collect();
    let n = reports.len().max(1) as f64;
    let avg = |f: fn(&MetricsReport) -> u64| reports.iter().map(|r| f(r) as f64).sum::<f64>() / n;
    SweepRow {
        value,
        runs: reports.len(),
        pdr: mean_std(&pdrs),
        energy_rate: mean_std(&energy).unwrap_or((0.0, 0.0)),
        hello: avg(|r| r.control.hello),
        reply_hello: avg(|r| r.control.reply_hello),
        rreq: avg(|r| r.control.rreq),
        rrep: avg(|r| r.control.rrep),
        seed,
    }
}

/// Every (value, repetition) pair runs independently; rows come back in `values` order.
pub fn sweep(base: &SimConfig, axis: SweepAxis, values: &[f64], repetitions: usize) -> Result<Vec<SweepRow>, ConfigError> {
    if values.is_empty() {
        return Err(ConfigError::new("values", "at least one sweep value is required"));
    }
    if repetitions == 0 {
        return Err(ConfigError::new("repetitions", "must be at least 1"));
    }
    let configs = values.iter().map(|&v| axis.apply(base, v)).collect::<Result<Vec<_>, _>>()?;
    let jobs: Vec<(usize, u64)> =
        (0..configs.len()).flat_map(|c| (0..repetitions as u64).map(move |r| (c, r))).collect();
    let reports = jobs
        .par_iter()
        .map(|&(c, r)| run(&SimConfig { seed: configs[c].seed.wrapping_add(r), ..configs[c].clone() }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(reports
        .chunks(repetitions)
        .zip(values)
        .map(|(chunk, &v)| summarize(v, base.seed, chunk))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub seed: u64,
    pub multipath_pdr: Option<f64>,
    pub single_pdr: Option<f64>,
    pub multipath_energy_rate: f64,
    pub single_energy_rate: f64,
}

/// Runs multipath and single-best-path routing on identical seeds.
pub fn compare(base: &SimConfig, repetitions: usize) -> Result<Vec<CompareRow>, ConfigError> {
    if repetitions == 0 {
        return Err(ConfigError::new("repetitions", "must be at least 1"));
    }
    let with_mode = |mode| {
        let mut cfg = base.clone();
        cfg.protocol.mode = mode;
        run_repetitions(&cfg, repetitions)
    };
    let (multi, single) = rayon::join(|| with_mode(RoutingMode::Multipath), || with_mode(RoutingMode::Single));
    let (multi, single) = (multi?, single?);
    Ok(multi
        .iter()
        .zip(&single)
        .enumerate()
        .map(|(i, (m, s))| CompareRow {
            seed: base.seed.wrapping_add(i as u64),
            multipath_pdr: m.pdr,
            single_pdr: s.pdr,
            multipath_energy_rate: m.avg_energy_consumption_rate,
            single_energy_rate: s.avg_energy_consumption_rate,
        })
        .collect())
}
