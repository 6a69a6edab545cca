use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use gmtlab::{
    build_partition, emit, estimate_hm, minkowski_steiner, parse_suite, partition_defect, proof_trace,
    quotient_search, report_label, run_suite, trace_series, DomainSpec, Format, FunctionSpec, GridFunction, PlotSeries, Region,
    RunManifest, RunOptions,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "gmt", version, about = "Grid experiments for isoperimetric and Sobolev-type inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a check suite and report pass/fail per check.
    Verify {
        suite: PathBuf,
        /// Report path: `.json`, `.csv`, or a directory for TSV plot data.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Grid spacing used for every entry.
        #[arg(long)]
        h: Option<f64>,
        /// Relative tolerance used for every check.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Estimate the Hausdorff measure of a domain boundary.
    EstimateHm {
        domain: PathBuf,
        #[arg(long)]
        d: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Split a domain boundary into pieces of small diameter.
    Partition {
        domain: PathBuf,
        #[arg(long)]
        delta: f64,
        /// Measure dimension; defaults to one less than the domain dimension.
        #[arg(long)]
        d: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        plots: Option<PathBuf>,
    },
    /// Replay the covering argument step by step.
    Trace {
        domain: PathBuf,
        function: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        plots: Option<PathBuf>,
    },
    /// Search for functions with a large boundary-term quotient.
    Search {
        domain: PathBuf,
        function: PathBuf,
        #[arg(long)]
        iters: usize,
        #[arg(long)]
        step: f64,
        #[arg(long)]
        plots: Option<PathBuf>,
    },
    /// Perimeter from parallel-set growth.
    Steiner {
        domain: PathBuf,
        /// Comma-separated decreasing radii.
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long)]
        plots: Option<PathBuf>,
    },
}

fn read_domain(path: &Path) -> anyhow::Result<DomainSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    DomainSpec::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_function(path: &Path) -> anyhow::Result<FunctionSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    FunctionSpec::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    print_text(&(serde_json::to_string_pretty(value)? + "\n"))
}

/// Writes to stdout, treating a closed pipe as success.
fn print_text(text: &str) -> anyhow::Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn write_plots(dir: &Option<PathBuf>, series: Vec<PlotSeries>) -> anyhow::Result<()> {
    if let Some(dir) = dir {
        let mut m = RunManifest::new("", "");
        m.series = series;
        emit(&m, Format::TsvPlots, dir).with_context(|| format!("writing plots to {}", dir.display()))?;
    }
    Ok(())
}

fn function_on(domain: &Path, function: &Path) -> anyhow::Result<GridFunction> {
    let region = Region::new(read_domain(domain)?.build()?)?;
    Ok(read_function(function)?.grid_function(&region)?)
}

fn seed() -> anyhow::Result<u64> {
    match std::env::var("GMT_SEED") {
        Ok(v) => v.trim().parse().with_context(|| format!("GMT_SEED must be an unsigned integer, got `{v}`")),
        Err(_) => Ok(0),
    }
}

fn verify(suite: &Path, out: Option<&Path>, opts: RunOptions) -> anyhow::Result<bool> {
    let spec = parse_suite(suite)?;
    let mut manifest = run_suite(&spec, opts);
    manifest.timestamp = Some(chrono::Utc::now().to_rfc3339());
    for e in &manifest.entries {
        for r in &e.reports {
            let verdict = if r.holds { "PASS" } else { "FAIL" };
            println!("{verdict} {:<20} {} / {}  ratio={:.6}", report_label(r), e.domain, e.function, r.ratio);
        }
        for err in &e.errors {
            let check = err.check.map_or_else(|| "setup".to_owned(), |c| c.to_string());
            println!("ERROR {check:<19} {} / {}  {}", e.domain, e.function, err.message);
        }
    }
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(path) = out {
        emit(&manifest, Format::from_path(path), path).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{} failures in {} entries", manifest.failures(), manifest.entries.len());
    Ok(manifest.exit_code() == 0)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Verify { suite, out, h, tol } => verify(&suite, out.as_deref(), RunOptions { h, tol }),
        Command::EstimateHm { domain, d, delta } => {
            let region = Region::new(read_domain(&domain)?.build()?)?;
            print_json(&estimate_hm(region.cloud(), d, delta)?)?;
            Ok(true)
        }
        Command::Partition { domain, delta, d, out, plots } => {
            let region = Region::new(read_domain(&domain)?.build()?)?;
            let d = d.unwrap_or(region.dim() as f64 - 1.0);
            let partition = build_partition(&region.calibrated_cloud()?, d, delta)?;
            partition.validate()?;
            let defect = partition_defect(&partition)?;
            match out {
                Some(path) => std::fs::write(&path, partition.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?,
                None => print_text(&(partition.to_json() + "\n"))?,
            }
            eprintln!("{} pieces, max half-diameter {:.6}, defect {:.6e}", partition.cells.len(), partition.rd_max(), defect);
            write_plots(
                &plots,
                vec![PlotSeries { name: "defect".into(), columns: vec!["delta".into(), "defect".into()], rows: vec![vec![delta, defect]] }],
            )?;
            Ok(true)
        }
        Command::Trace { domain, function, eps, s, plots } => {
            let u = function_on(&domain, &function)?;
            let report = proof_trace(&u, eps, s)?;
            print_json(&report)?;
            write_plots(&plots, trace_series(&report, ""))?;
            Ok(report.holds)
        }
        Command::Search { domain, function, iters, step, plots } => {
            let u = function_on(&domain, &function)?;
            let result = quotient_search(&u, iters, step, seed()?)?;
            let summary = result.summary();
            print_json(&summary)?;
            let rows = std::iter::once(result.initial).chain(result.history.iter().copied()).enumerate().map(|(i, q)| vec![i as f64, q]).collect();
            write_plots(&plots, vec![PlotSeries { name: "quotient".into(), columns: vec!["sweep".into(), "q".into()], rows }])?;
            Ok(summary.within_bound)
        }
        Command::Steiner { domain, eps, plots } => {
            if eps.is_empty() {
                bail!("--eps needs at least one radius");
            }
            let est = minkowski_steiner(&read_domain(&domain)?.build()?, &eps)?;
            print_json(&est)?;
            let rows = est.points.iter().map(|p| vec![p.eps, p.quotient]).collect();
            write_plots(&plots, vec![PlotSeries { name: "steiner".into(), columns: vec!["eps".into(), "quotient".into()], rows }])?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
