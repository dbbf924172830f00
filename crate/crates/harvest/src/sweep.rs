//! Two-parameter grids over detector configurations.

use crate::config::{ConfigFile, RunConfig};
use crate::correlations::{correlation_report, with_fourth_order, CorrelationReport};
use crate::error::{Error, Result};
use crate::model::{validate, Dimension, SetupConfig, SmearingProfile, SwitchingProfile, GAUSSIAN_SEPARATION};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Param {
    Alpha,
    Beta,
    Gamma,
    Delta,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::Alpha => "alpha",
            Param::Beta => "beta",
            Param::Gamma => "gamma",
            Param::Delta => "delta",
        }
    }

    fn apply(self, cfg: &mut SetupConfig, v: f64) -> Result<()> {
        match self {
            Param::Alpha => cfg.alpha = v,
            Param::Beta => cfg.beta = v,
            Param::Gamma => cfg.gamma = v,
            Param::Delta => match cfg.smearing {
                SmearingProfile::Gaussian(_) => cfg.smearing = SmearingProfile::Gaussian(v),
                SmearingProfile::Pointlike => {
                    return Err(Error::InvalidParameter("cannot sweep delta for pointlike detectors".into()))
                }
            },
        }
        Ok(())
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "alpha" | "omega" => Ok(Param::Alpha),
            "beta" | "d" => Ok(Param::Beta),
            "gamma" | "delay" => Ok(Param::Gamma),
            "delta" | "sigma" => Ok(Param::Delta),
            other => Err(Error::InvalidParameter(format!("unknown sweep parameter '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisSpec {
    pub param: Param,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisSpec {
    pub fn new(param: Param, min: f64, max: f64, steps: usize) -> Self {
        AxisSpec { param, min, max, steps }
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            return self.max;
        }
        self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.value(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Quantity {
    N2,
    Negativity,
    MutualInfo,
    Xi3,
    LAbSq,
    E2,
    LAa,
    MAbs,
}

impl Quantity {
    pub const ALL: [Quantity; 8] = [
        Quantity::N2,
        Quantity::Negativity,
        Quantity::MutualInfo,
        Quantity::Xi3,
        Quantity::LAbSq,
        Quantity::E2,
        Quantity::LAa,
        Quantity::MAbs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::N2 => "n2",
            Quantity::Negativity => "negativity",
            Quantity::MutualInfo => "mutual_info",
            Quantity::Xi3 => "xi3",
            Quantity::LAbSq => "l_ab_sq",
            Quantity::E2 => "e2",
            Quantity::LAa => "l_aa",
            Quantity::MAbs => "m_abs",
        }
    }

    fn needs_fourth_order(self) -> bool {
        matches!(self, Quantity::Xi3 | Quantity::E2)
    }

    /// `None` when the report lacks the fourth-order block.
    pub fn extract(self, r: &CorrelationReport) -> Option<f64> {
        let e = &r.elements;
        Some(match self {
            Quantity::N2 => r.n2,
            Quantity::Negativity => r.negativity,
            Quantity::MutualInfo => r.mutual_info,
            Quantity::Xi3 => r.fourth_order?.xi3,
            Quantity::LAbSq => e.l_ab.norm_sqr(),
            Quantity::E2 => r.fourth_order?.e2,
            Quantity::LAa => e.l_aa,
            Quantity::MAbs => e.m.norm(),
        })
    }
}

impl FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown quantity '{s}'")))
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub base: SetupConfig,
    pub axis1: AxisSpec,
    pub axis2: AxisSpec,
    pub quantities: Vec<Quantity>,
    pub tol: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        for a in [&self.axis1, &self.axis2] {
            if a.steps < 2 {
                return Err(Error::InvalidParameter(format!("axis {} needs at least 2 steps", a.param)));
            }
            if !a.min.is_finite() || !a.max.is_finite() {
                return Err(Error::InvalidParameter(format!("axis {} has a non-finite bound", a.param)));
            }
        }
        if self.axis1.param == self.axis2.param {
            return Err(Error::InvalidParameter(format!("both axes sweep {}", self.axis1.param)));
        }
        if self.quantities.is_empty() {
            return Err(Error::InvalidParameter("no quantities requested".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }

    pub fn config_at(&self, i: usize, j: usize) -> Result<SetupConfig> {
        let mut cfg = self.base;
        self.axis1.param.apply(&mut cfg, self.axis1.value(i))?;
        self.axis2.param.apply(&mut cfg, self.axis2.value(j))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    Timelike,
    LightContact,
    Spacelike,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::Timelike => "timelike",
            Region::LightContact => "lightcontact",
            Region::Spacelike => "spacelike",
        }
    }
}

/// Half-width of the band of delays around `|γ| = β` in which the two
/// switchings are in light contact.
pub fn band_half_width(cfg: &SetupConfig) -> f64 {
    match cfg.switching {
        SwitchingProfile::Sudden if cfg.delta() < 0.1 => 1.0,
        _ => GAUSSIAN_SEPARATION,
    }
}

pub fn classify(cfg: &SetupConfig) -> Region {
    let w = band_half_width(cfg);
    let g = cfg.gamma.abs();
    if cfg.beta > g + w {
        Region::Spacelike
    } else if cfg.beta < g - w {
        Region::Timelike
    } else {
        Region::LightContact
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub x: f64,
    pub y: f64,
    pub region: Region,
    pub report: std::result::Result<CorrelationReport, Error>,
}

impl Cell {
    pub fn value(&self, q: Quantity) -> Option<f64> {
        self.report.as_ref().ok().and_then(|r| q.extract(r))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub spec: SweepSpec,
    /// Row-major: `cells[i * steps2 + j]` sits at `(axis1[i], axis2[j])`.
    pub cells: Vec<Cell>,
}

impl SweepGrid {
    pub fn cell(&self, i: usize, j: usize) -> &Cell {
        &self.cells[i * self.spec.axis2.steps + j]
    }

    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.report.is_err()).count()
    }
}

fn evaluate(cfg: SetupConfig, quantities: &[Quantity], tol: f64) -> Result<CorrelationReport> {
    let cfg = validate(cfg)?;
    let report = correlation_report(&cfg, tol)?;
    if quantities.iter().any(|q| q.needs_fourth_order()) {
        with_fourth_order(&cfg, report, tol)
    } else {
        Ok(report)
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepGrid> {
    spec.validate()?;
    let (n1, n2) = (spec.axis1.steps, spec.axis2.steps);
    let cells = (0..n1 * n2)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n2, k % n2);
            let (x, y) = (spec.axis1.value(i), spec.axis2.value(j));
            match spec.config_at(i, j) {
                Ok(cfg) => Cell { x, y, region: classify(&cfg), report: evaluate(cfg, &spec.quantities, spec.tol) },
                Err(e) => Cell { x, y, region: classify(&spec.base), report: Err(e) },
            }
        })
        .collect();
    Ok(SweepGrid { spec: spec.clone(), cells })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeScanRow {
    pub alpha: f64,
    pub delta: f64,
    pub n2: f64,
    pub overlap: bool,
}

/// `N⁽²⁾` against detector size, one curve per gap.
pub fn size_scan(base: &SetupConfig, deltas: &[f64], alphas: &[f64], tol: f64) -> Result<Vec<SizeScanRow>> {
    if base.dimension != Dimension::ThreePlusOne || base.switching != SwitchingProfile::Gaussian {
        return Err(Error::RegimeUnsupported("size scans use 3+1 dimensions with Gaussian switching".into()));
    }
    let points: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| deltas.iter().map(move |&d| (a, d))).collect();
    points
        .into_par_iter()
        .map(|(alpha, delta)| {
            let mut cfg = *base;
            cfg.alpha = alpha;
            cfg.smearing = SmearingProfile::Gaussian(delta);
            let r = correlation_report(&validate(cfg)?, tol)?;
            Ok(SizeScanRow { alpha, delta, n2: r.n2, overlap: r.overlap })
        })
        .collect()
}

fn io_err(path: &Path, e: impl fmt::Display) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

/// Path of the metadata file written next to `csv`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

fn format_value(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:e}"),
        None => "NaN".into(),
    }
}

/// Writes the grid as CSV to `path` and its metadata to [`sidecar_path`].
pub fn emit(grid: &SweepGrid, path: &Path, wall_time: Duration) -> Result<()> {
    let spec = &grid.spec;
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    let mut header = vec![spec.axis1.param.name().to_string(), spec.axis2.param.name().to_string(), "region".into()];
    header.extend(spec.quantities.iter().map(|q| q.name().to_string()));
    w.write_record(&header).map_err(|e| io_err(path, e))?;
    for c in &grid.cells {
        let mut row = vec![format!("{:e}", c.x), format!("{:e}", c.y), c.region.name().to_string()];
        row.extend(spec.quantities.iter().map(|&q| format_value(c.value(q))));
        w.write_record(&row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))?;

    let meta = sidecar_path(path);
    let mut f = std::fs::File::create(&meta).map_err(|e| io_err(&meta, e))?;
    f.write_all(metadata(grid, wall_time).as_bytes()).map_err(|e| io_err(&meta, e))
}

fn metadata(grid: &SweepGrid, wall_time: Duration) -> String {
    let spec = &grid.spec;
    let run = RunConfig { setup: spec.base, tol: spec.tol };
    let mut out = ConfigFile::from_run(&run).to_text();
    let axis = |a: &AxisSpec| format!("{{ param = \"{}\", min = {:?}, max = {:?}, steps = {} }}", a.param, a.min, a.max, a.steps);
    let quantities: Vec<String> = spec.quantities.iter().map(|q| format!("\"{q}\"")).collect();
    out.push_str(&format!("axis1 = {}\n", axis(&spec.axis1)));
    out.push_str(&format!("axis2 = {}\n", axis(&spec.axis2)));
    out.push_str(&format!("quantities = [{}]\n", quantities.join(", ")));
    out.push_str(&format!("failed_cells = {}\n", grid.failures()));
    out.push_str(&format!("version = \"{}\"\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("wall_time_s = {:?}\n", wall_time.as_secs_f64()));
    out
}
