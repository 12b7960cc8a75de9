use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::{load_scenario, sweep_svg, CliError, ResultsTable};
use crate::routing::RoutingMode;
use crate::simulator::{compare, mean_std, summarize, sweep, MetricsReport, SimConfig, Simulation, SweepAxis};

#[derive(Debug, Parser)]
#[command(name = "amr", version, about = "Simulate energy- and link-stability-aware multipath routing in a MANET")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and print its metrics.
    Run(RunArgs),
    /// Repeat the simulation across values of one parameter.
    Sweep(SweepArgs),
    /// Run multipath and single-path routing on the same seeds.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario JSON; built-in defaults when omitted.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<RoutingMode>,
    /// Also write the full metrics report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<RoutingMode>,
    #[arg(long, value_enum)]
    pub axis: SweepAxis,
    /// Comma-separated axis values, e.g. 20,40,60.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub values: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    pub repetitions: usize,
    /// Write an SVG chart of the sweep here.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub repetitions: usize,
}

fn base_config(scenario: Option<&Path>, seed: Option<u64>, mode: Option<RoutingMode>) -> Result<SimConfig, CliError> {
    let mut cfg = match scenario {
        Some(path) => load_scenario(path)?,
        None => SimConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(mode) = mode {
        cfg.protocol.mode = mode;
    }
    Ok(cfg.validate()?)
}

fn emit(table: &ResultsTable, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => table.write(path),
        None => stdout.write_all(table.to_csv().as_bytes()).map_err(|e| CliError::Runtime(e.to_string())),
    }
}

fn fmt_pdr(p: Option<f64>) -> String {
    p.map(|p| format!("{p:.4}")).unwrap_or_else(|| "n/a".into())
}

pub fn cmd_run(args: &RunArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = base_config(args.scenario.as_deref(), args.seed, args.mode)?;
    let mut sim = Simulation::new(cfg.clone())?;
    sim.run_to_end();
    let report = sim.report();
    write_summary(&report, &cfg, stdout).map_err(|e| CliError::Runtime(e.to_string()))?;
    if let Some(path) = &args.report {
        let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Runtime(e.to_string()))?;
        std::fs::write(path, json + "\n").map_err(|source| CliError::Write { path: path.clone(), source })?;
    }
    emit(&ResultsTable::from_run(&summarize(0.0, cfg.seed, &[report])), args.out.as_deref(), stdout)
}

fn write_summary(r: &MetricsReport, cfg: &SimConfig, w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "seed {}  nodes {}  mode {:?}", cfg.seed, cfg.node_count, cfg.protocol.mode)?;
    writeln!(w, "packets: {} sent, {} delivered, {} lost  (PDR {})", r.packets_sent, r.packets_delivered, r.packets_lost, fmt_pdr(r.pdr))?;
    writeln!(w, "energy consumption rate: {:.4}%  dead nodes: {}", r.avg_energy_consumption_rate, r.dead_nodes)?;
    let c = &r.control;
    writeln!(
        w,
        "control: hello {}  reply_hello {}  rreq {}  rrep {}  (loop drops {}, dominated {})",
        c.hello, c.reply_hello, c.rreq, c.rrep, c.rreq_loop_drops, c.rreq_discarded
    )?;
    writeln!(w, "discoveries {}  route failures {}  paths found {}", r.discoveries, r.route_failures, r.paths_discovered)?;
    for f in &r.flows {
        writeln!(w, "flow {} -> {}: {}/{} delivered (PDR {})", f.source, f.destination, f.delivered, f.sent, fmt_pdr(f.pdr))?;
        for p in &f.paths {
            writeln!(w, "  {}  stability {:.4}  {}/{}", p.nodes.join("-"), p.stability, p.delivered, p.sent)?;
        }
    }
    Ok(())
}

pub fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if let Some(v) = args.values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(CliError::Usage(format!("--values: {v} is not a positive number")));
    }
    if args.repetitions == 0 {
        return Err(CliError::Usage("--repetitions must be at least 1".into()));
    }
    let base = base_config(args.scenario.as_deref(), args.seed, args.mode)?;
    let rows = sweep(&base, args.axis, &args.values, args.repetitions)?;
    if let Some(path) = &args.plot {
        std::fs::write(path, sweep_svg(args.axis.name(), &rows))
            .map_err(|source| CliError::Write { path: path.clone(), source })?;
    }
    if args.out.is_some() {
        let mut text = format!("{:>12}  {:>8}  {:>8}  {:>10}\n", args.axis.name(), "pdr", "pdr_std", "energy_%");
        for r in &rows {
            let (m, s) = r.pdr.map_or(("n/a".into(), "n/a".into()), |(m, s)| (format!("{m:.4}"), format!("{s:.4}")));
            text += &format!("{:>12}  {m:>8}  {s:>8}  {:>10.4}\n", r.value, r.energy_rate.0);
        }
        stdout.write_all(text.as_bytes()).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    emit(&ResultsTable::from_sweep(&rows), args.out.as_deref(), stdout)
}

pub fn cmd_compare(args: &CompareArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if args.repetitions == 0 {
        return Err(CliError::Usage("--repetitions must be at least 1".into()));
    }
    let base = base_config(args.scenario.as_deref(), args.seed, None)?;
    let rows = compare(&base, args.repetitions)?;
    if args.out.is_some() {
        let mean = |f: fn(&crate::simulator::CompareRow) -> Option<f64>| {
            mean_std(&rows.iter().filter_map(f).collect::<Vec<_>>()).map(|p| p.0)
        };
        let text = format!(
            "mean PDR over {} seeds: multipath {}  single {}\n",
            rows.len(),
            fmt_pdr(mean(|r| r.multipath_pdr)),
            fmt_pdr(mean(|r| r.single_pdr))
        );
        stdout.write_all(text.as_bytes()).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    emit(&ResultsTable::from_compare(&rows), args.out.as_deref(), stdout)
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to `stderr`.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                1
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::Compare(a) => cmd_compare(a, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
