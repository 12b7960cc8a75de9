use std::path::Path;

use super::CliError;
use crate::simulator::{CompareRow, SweepRow};

pub const SWEEP_COLUMNS: [&str; 10] = [
    "axis_value",
    "pdr_mean",
    "pdr_std",
    "energy_rate_mean",
    "energy_rate_std",
    "hello",
    "reply_hello",
    "rreq",
    "rrep",
    "seed",
];

pub const COMPARE_COLUMNS: [&str; 5] =
    ["seed", "multipath_pdr", "single_pdr", "multipath_energy_rate", "single_energy_rate"];

/// Formats like C's `%.6g`: six significant digits, trailing zeros dropped,
/// exponent form outside `1e-4 ..< 1e6`.
pub fn format_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    } else {
        trim_fraction(&format!("{x:.*}", (5 - exp) as usize)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_g6).unwrap_or_default()
}

/// A CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultsTable {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl ResultsTable {
    /// One row per sweep value. A single run uses the same layout with an
    /// empty `axis_value`.
    pub fn from_sweep(rows: &[SweepRow]) -> Self {
        Self::sweep_like(rows.iter().map(|r| (Some(r.value), r)))
    }

    pub fn from_run(row: &SweepRow) -> Self {
        Self::sweep_like(std::iter::once((None, row)))
    }

    fn sweep_like<'a>(rows: impl Iterator<Item = (Option<f64>, &'a SweepRow)>) -> Self {
        let rows = rows
            .map(|(axis, r)| {
                vec![
                    opt(axis),
                    opt(r.pdr.map(|p| p.0)),
                    opt(r.pdr.map(|p| p.1)),
                    format_g6(r.energy_rate.0),
                    format_g6(r.energy_rate.1),
                    format_g6(r.hello),
                    format_g6(r.reply_hello),
                    format_g6(r.rreq),
                    format_g6(r.rrep),
                    r.seed.to_string(),
                ]
            })
            .collect();
        ResultsTable { header: SWEEP_COLUMNS.to_vec(), rows }
    }

    pub fn from_compare(rows: &[CompareRow]) -> Self {
        let rows = rows
            .iter()
            .map(|r| {
                vec![
                    r.seed.to_string(),
                    opt(r.multipath_pdr),
                    opt(r.single_pdr),
                    format_g6(r.multipath_energy_rate),
                    format_g6(r.single_energy_rate),
                ]
            })
            .collect();
        ResultsTable { header: COMPARE_COLUMNS.to_vec(), rows }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8")
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_csv()).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
    }
}
