//! Flat key-value run configuration.
//!
//! ```text
//! dimension = "3+1"      # or "1+1"
//! switching = "gaussian" # or "sudden"
//! smearing = "gaussian"  # or "pointlike"
//! alpha = 7.0
//! beta = 3.0
//! gamma = 0.0
//! delta = 1.0
//! lambda = 0.01
//! cutoff = 0.001
//! tol = 1e-8
//! ```

use crate::error::{Error, Result};
use crate::model::{Dimension, SetupConfig, SmearingProfile, SwitchingProfile, DEFAULT_COUPLING, DEFAULT_CUTOFF};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const DEFAULT_TOL: f64 = 1e-8;

/// Every key is optional; missing keys fall back to defaults or to an
/// earlier layer.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub dimension: Option<String>,
    pub switching: Option<String>,
    pub smearing: Option<String>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub lambda: Option<f64>,
    pub cutoff: Option<f64>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub setup: SetupConfig,
    pub tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            setup: SetupConfig::new(Dimension::ThreePlusOne, SwitchingProfile::Gaussian, SmearingProfile::Gaussian(1.0)),
            tol: DEFAULT_TOL,
        }
    }
}

pub fn parse_dimension(s: &str) -> Result<Dimension> {
    match s.trim().to_ascii_lowercase().as_str() {
        "3+1" | "3" | "3d" => Ok(Dimension::ThreePlusOne),
        "1+1" | "1" | "1d" => Ok(Dimension::OnePlusOne),
        other => Err(Error::InvalidParameter(format!("unknown dimension '{other}' (use 3+1 or 1+1)"))),
    }
}

pub fn parse_switching(s: &str) -> Result<SwitchingProfile> {
    match s.trim().to_ascii_lowercase().as_str() {
        "gaussian" => Ok(SwitchingProfile::Gaussian),
        "sudden" => Ok(SwitchingProfile::Sudden),
        other => Err(Error::InvalidParameter(format!("unknown switching '{other}' (use gaussian or sudden)"))),
    }
}

fn dimension_name(d: Dimension) -> &'static str {
    match d {
        Dimension::ThreePlusOne => "3+1",
        Dimension::OnePlusOne => "1+1",
    }
}

fn switching_name(s: SwitchingProfile) -> &'static str {
    match s {
        SwitchingProfile::Gaussian => "gaussian",
        SwitchingProfile::Sudden => "sudden",
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text).map_err(|e| match e {
            Error::InvalidParameter(m) => Error::InvalidParameter(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Keys set in `other` replace the ones here.
    pub fn overlay(mut self, other: &ConfigFile) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(dimension, switching, smearing, alpha, beta, gamma, delta, lambda, cutoff, tol);
        self
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let mut run = RunConfig::default();
        let s = &mut run.setup;
        if let Some(d) = &self.dimension {
            s.dimension = parse_dimension(d)?;
        }
        if let Some(v) = &self.switching {
            s.switching = parse_switching(v)?;
        }
        let delta = self.delta.unwrap_or(1.0);
        s.smearing = match self.smearing.as_deref().map(|v| v.trim().to_ascii_lowercase()) {
            None => SmearingProfile::Gaussian(delta),
            Some(v) if v == "gaussian" => SmearingProfile::Gaussian(delta),
            Some(v) if v == "pointlike" => SmearingProfile::Pointlike,
            Some(v) => return Err(Error::InvalidParameter(format!("unknown smearing '{v}' (use gaussian or pointlike)"))),
        };
        s.alpha = self.alpha.unwrap_or(s.alpha);
        s.beta = self.beta.unwrap_or(s.beta);
        s.gamma = self.gamma.unwrap_or(s.gamma);
        s.coupling = self.lambda.unwrap_or(DEFAULT_COUPLING);
        s.cutoff = self.cutoff.unwrap_or(DEFAULT_CUTOFF);
        run.tol = self.tol.unwrap_or(DEFAULT_TOL);
        if !(run.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", run.tol)));
        }
        Ok(run)
    }

    pub fn from_run(run: &RunConfig) -> Self {
        let s = &run.setup;
        let (smearing, delta) = match s.smearing {
            SmearingProfile::Gaussian(d) => ("gaussian", Some(d)),
            SmearingProfile::Pointlike => ("pointlike", None),
        };
        ConfigFile {
            dimension: Some(dimension_name(s.dimension).into()),
            switching: Some(switching_name(s.switching).into()),
            smearing: Some(smearing.into()),
            alpha: Some(s.alpha),
            beta: Some(s.beta),
            gamma: Some(s.gamma),
            delta,
            lambda: Some(s.coupling),
            cutoff: Some(s.cutoff),
            tol: Some(run.tol),
        }
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let run = ConfigFile::default().resolve().unwrap();
        assert_eq!(run, RunConfig::default());
        assert_eq!(run.setup.coupling, 0.01);
        assert_eq!(run.setup.cutoff, 0.001);
    }

    #[test]
    fn parse_and_round_trip() {
        let text = "dimension = \"1+1\"\nswitching = \"sudden\"\nsmearing = \"pointlike\"\nalpha = 2.5\ntol = 1e-6\n";
        let file = ConfigFile::parse(text).unwrap();
        let run = file.resolve().unwrap();
        assert_eq!(run.setup.dimension, Dimension::OnePlusOne);
        assert_eq!(run.setup.smearing, SmearingProfile::Pointlike);
        assert_eq!(run.setup.alpha, 2.5);
        let again = ConfigFile::parse(&ConfigFile::from_run(&run).to_text()).unwrap().resolve().unwrap();
        assert_eq!(again, run);
    }

    #[test]
    fn rejects_unknown_key() {
        assert!(ConfigFile::parse("omega = 3.0").is_err());
        assert!(ConfigFile::parse("switching = \"smooth\"").unwrap().resolve().is_err());
    }

    #[test]
    fn overlay_prefers_later_layer() {
        let base = ConfigFile::parse("alpha = 1.0\nbeta = 2.0").unwrap();
        let flags = ConfigFile { beta: Some(5.0), ..Default::default() };
        let run = base.overlay(&flags).resolve().unwrap();
        assert_eq!((run.setup.alpha, run.setup.beta), (1.0, 5.0));
    }
}
