//! `harvest`: single points, grids and size scans from the command line.

use clap::{Args, Parser, Subcommand};
use harvest::config::{ConfigFile, RunConfig};
use harvest::correlations::{correlation_report, with_fourth_order, CorrelationReport};
use harvest::model::validate;
use harvest::sweep::{emit, run_sweep, sidecar_path, size_scan, AxisSpec, Param, Quantity, SweepSpec};
use harvest::Error;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const EXIT_INVALID: u8 = 1;
const EXIT_CELL_FAILURES: u8 = 2;

#[derive(Parser)]
#[command(name = "harvest", version, about = "Entanglement and mutual information harvested by two detectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one configuration and print the report
    Point {
        #[command(flatten)]
        setup: SetupArgs,
        /// Also compute the fourth-order population (3+1, switchings far apart)
        #[arg(long)]
        fourth_order: bool,
    },
    /// Evaluate a 2-D grid and write it as CSV
    Sweep {
        #[command(flatten)]
        setup: SetupArgs,
        /// First axis as param:min:max[:steps]
        #[arg(long, default_value = "beta:0.5:10:100", value_parser = parse_axis)]
        axis1: AxisSpec,
        /// Second axis as param:min:max[:steps]
        #[arg(long, default_value = "gamma:0:14:100", value_parser = parse_axis)]
        axis2: AxisSpec,
        #[arg(long, default_value = "n2", value_delimiter = ',')]
        quantities: Vec<Quantity>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// N2 against detector size for several gaps
    SizeScan {
        #[command(flatten)]
        setup: SetupArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        deltas: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<f64>,
        /// Write the table here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a configuration without computing anything
    Validate {
        #[command(flatten)]
        setup: SetupArgs,
    },
}

#[derive(Args)]
struct SetupArgs {
    /// Key-value config file; flags given here take precedence
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// 3+1 or 1+1
    #[arg(long)]
    dimension: Option<String>,
    /// gaussian or sudden
    #[arg(long)]
    switching: Option<String>,
    /// gaussian or pointlike
    #[arg(long)]
    smearing: Option<String>,
    /// Gap times switching time
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Separation over switching time
    #[arg(long)]
    beta: Option<f64>,
    /// Delay over switching time
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Smearing width over switching time
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Infrared cutoff (1+1 only)
    #[arg(long)]
    cutoff: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
}

impl SetupArgs {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let file = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let flags = ConfigFile {
            dimension: self.dimension.clone(),
            switching: self.switching.clone(),
            smearing: self.smearing.clone(),
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            delta: self.delta,
            lambda: self.lambda,
            cutoff: self.cutoff,
            tol: self.tol,
        };
        file.overlay(&flags).resolve()
    }
}

fn parse_axis(s: &str) -> Result<AxisSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(format!("expected param:min:max[:steps], got '{s}'"));
    }
    let param: Param = parts[0].parse().map_err(|e: Error| e.to_string())?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    let steps = match parts.get(3) {
        Some(t) => t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}"))?,
        None => 100,
    };
    Ok(AxisSpec::new(param, num(parts[1])?, num(parts[2])?, steps))
}

#[derive(Serialize)]
struct PointOutput {
    config: ConfigFile,
    report: CorrelationReport,
}

fn invalid(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_INVALID)
}

fn failed(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_CELL_FAILURES)
}

fn point(setup: &SetupArgs, fourth_order: bool) -> ExitCode {
    let run = match setup.resolve() {
        Ok(r) => r,
        Err(e) => return invalid(e),
    };
    let cfg = match validate(run.setup) {
        Ok(c) => c,
        Err(e) => return invalid(e),
    };
    let report = correlation_report(&cfg, run.tol).and_then(|r| if fourth_order { with_fourth_order(&cfg, r, run.tol) } else { Ok(r) });
    match report {
        Ok(report) => {
            let out = PointOutput { config: ConfigFile::from_run(&run), report };
            match toml::to_string(&out) {
                Ok(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                Err(e) => failed(e),
            }
        }
        Err(e) => failed(e),
    }
}

fn sweep(setup: &SetupArgs, axis1: AxisSpec, axis2: AxisSpec, quantities: Vec<Quantity>, output: &PathBuf) -> ExitCode {
    let run = match setup.resolve() {
        Ok(r) => r,
        Err(e) => return invalid(e),
    };
    let spec = SweepSpec { base: run.setup, axis1, axis2, quantities, tol: run.tol };
    let start = Instant::now();
    let grid = match run_sweep(&spec) {
        Ok(g) => g,
        Err(e) => return invalid(e),
    };
    if let Err(e) = emit(&grid, output, start.elapsed()) {
        return failed(e);
    }
    let bad = grid.failures();
    eprintln!(
        "wrote {} cells to {} ({}), {} failed, {:.1}s",
        grid.cells.len(),
        output.display(),
        sidecar_path(output).display(),
        bad,
        start.elapsed().as_secs_f64()
    );
    if bad > 0 {
        for c in grid.cells.iter().filter_map(|c| c.report.as_ref().err().map(|e| (c.x, c.y, e))).take(5) {
            eprintln!("  ({}, {}): {}", c.0, c.1, c.2);
        }
        return ExitCode::from(EXIT_CELL_FAILURES);
    }
    ExitCode::SUCCESS
}

fn scan(setup: &SetupArgs, deltas: &[f64], alphas: &[f64], output: Option<&PathBuf>) -> ExitCode {
    let run = match setup.resolve() {
        Ok(r) => r,
        Err(e) => return invalid(e),
    };
    let rows = match size_scan(&run.setup, deltas, alphas, run.tol) {
        Ok(rows) => rows,
        Err(e @ (Error::InvalidParameter(_) | Error::RegimeUnsupported(_) | Error::UvDivergent(_))) => return invalid(e),
        Err(e) => return failed(e),
    };
    let result = match output {
        Some(p) => csv::Writer::from_path(p).map_err(|e| format!("{}: {e}", p.display())).and_then(|mut w| {
            rows.iter().try_for_each(|r| w.serialize(r)).and_then(|_| w.flush().map_err(Into::into)).map_err(|e| format!("{}: {e}", p.display()))
        }),
        None => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            rows.iter().try_for_each(|r| w.serialize(r)).and_then(|_| w.flush().map_err(Into::into)).map_err(|e| e.to_string())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => failed(e),
    }
}

fn check(setup: &SetupArgs) -> ExitCode {
    match setup.resolve().and_then(|r| validate(r.setup).map(|c| (c, r.tol))) {
        Ok((cfg, tol)) => {
            println!("ok: {} alpha={} beta={} gamma={} delta={} tol={tol:e}", cfg.case(), cfg.alpha, cfg.beta, cfg.gamma, cfg.delta());
            ExitCode::SUCCESS
        }
        Err(e) => invalid(e),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match &cli.command {
        Command::Point { setup, fourth_order } => point(setup, *fourth_order),
        Command::Sweep { setup, axis1, axis2, quantities, output } => sweep(setup, *axis1, *axis2, quantities.clone(), output),
        Command::SizeScan { setup, deltas, alphas, output } => scan(setup, deltas, alphas, output.as_ref()),
        Command::Validate { setup } => check(setup),
    }
}
