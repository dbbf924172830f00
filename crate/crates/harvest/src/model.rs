//! Detector configurations in units of the switching time `T`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Deref;

/// Separation (in units of `T`) beyond which two Gaussian switchings are
/// treated as non-overlapping.
pub const GAUSSIAN_SEPARATION: f64 = 4.949_747_468_305_833;
pub const DEFAULT_CUTOFF: f64 = 1e-3;
pub const DEFAULT_COUPLING: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dimension {
    ThreePlusOne,
    OnePlusOne,
}

/// Both detectors share the profile and the duration `T`; detector A is
/// centred at `τ = 0` and detector B at `τ = γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SwitchingProfile {
    /// `χ(τ) = exp(-(τ - τ_c)²)`.
    Gaussian,
    /// Unit top-hat on `[τ_c - 1/2, τ_c + 1/2]`.
    Sudden,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SmearingProfile {
    /// Gaussian of width `δ = σ/T`.
    Gaussian(f64),
    Pointlike,
}

impl SmearingProfile {
    pub fn delta(&self) -> f64 {
        match *self {
            SmearingProfile::Gaussian(d) => d,
            SmearingProfile::Pointlike => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    A1,
    A2,
    A3,
    A4,
    B1,
    B2,
    B3,
    B4,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Switching window `[on, off]` in units of `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub on: f64,
    pub off: f64,
}

impl Window {
    pub fn centered(center: f64) -> Self {
        Window { on: center - 0.5, off: center + 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SetupConfig {
    pub dimension: Dimension,
    pub switching: SwitchingProfile,
    pub smearing: SmearingProfile,
    /// `ΩT`
    pub alpha: f64,
    /// `d/T`
    pub beta: f64,
    /// `Δ/T`
    pub gamma: f64,
    /// `λ` in 3+1 dimensions, `λT` in 1+1.
    pub coupling: f64,
    /// `ΛT`, used only in 1+1 dimensions.
    pub cutoff: f64,
}

impl SetupConfig {
    pub fn new(dimension: Dimension, switching: SwitchingProfile, smearing: SmearingProfile) -> Self {
        SetupConfig {
            dimension,
            switching,
            smearing,
            alpha: 1.0,
            beta: 1.0,
            gamma: 0.0,
            coupling: DEFAULT_COUPLING,
            cutoff: DEFAULT_CUTOFF,
        }
    }

    pub fn for_case(case: Case, delta: f64) -> Self {
        use Dimension::*;
        use SwitchingProfile as S;
        let smeared = SmearingProfile::Gaussian(delta);
        let point = SmearingProfile::Pointlike;
        match case {
            Case::A1 => Self::new(ThreePlusOne, S::Gaussian, smeared),
            Case::A2 => Self::new(ThreePlusOne, S::Gaussian, point),
            Case::A3 => Self::new(ThreePlusOne, S::Sudden, smeared),
            Case::A4 => Self::new(ThreePlusOne, S::Sudden, point),
            Case::B1 => Self::new(OnePlusOne, S::Gaussian, smeared),
            Case::B2 => Self::new(OnePlusOne, S::Gaussian, point),
            Case::B3 => Self::new(OnePlusOne, S::Sudden, smeared),
            Case::B4 => Self::new(OnePlusOne, S::Sudden, point),
        }
    }

    pub fn with(mut self, alpha: f64, beta: f64, gamma: f64) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self.gamma = gamma;
        self
    }

    pub fn case(&self) -> Case {
        use SmearingProfile::*;
        use SwitchingProfile as S;
        match (self.dimension, self.switching, self.smearing) {
            (Dimension::ThreePlusOne, S::Gaussian, Gaussian(_)) => Case::A1,
            (Dimension::ThreePlusOne, S::Gaussian, Pointlike) => Case::A2,
            (Dimension::ThreePlusOne, S::Sudden, Gaussian(_)) => Case::A3,
            (Dimension::ThreePlusOne, S::Sudden, Pointlike) => Case::A4,
            (Dimension::OnePlusOne, S::Gaussian, Gaussian(_)) => Case::B1,
            (Dimension::OnePlusOne, S::Gaussian, Pointlike) => Case::B2,
            (Dimension::OnePlusOne, S::Sudden, Gaussian(_)) => Case::B3,
            (Dimension::OnePlusOne, S::Sudden, Pointlike) => Case::B4,
        }
    }

    pub fn delta(&self) -> f64 {
        self.smearing.delta()
    }

    pub fn windows(&self) -> (Window, Window) {
        (Window::centered(0.0), Window::centered(self.gamma))
    }

    /// True when the two switchings can be treated as disjoint in time.
    pub fn switchings_disjoint(&self) -> bool {
        match self.switching {
            SwitchingProfile::Gaussian => self.gamma.abs() >= GAUSSIAN_SEPARATION,
            SwitchingProfile::Sudden => self.gamma.abs() >= 1.0,
        }
    }

    /// Smeared detectors closer than six widths overlap in space.
    pub fn overlap(&self) -> bool {
        self.beta < 6.0 * self.delta()
    }
}

/// A configuration that passed [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidatedConfig(SetupConfig);

impl Deref for ValidatedConfig {
    type Target = SetupConfig;
    fn deref(&self) -> &SetupConfig {
        &self.0
    }
}

impl ValidatedConfig {
    pub fn into_inner(self) -> SetupConfig {
        self.0
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

pub fn validate(config: SetupConfig) -> Result<ValidatedConfig> {
    if config.case() == Case::A4 {
        return Err(Error::UvDivergent(
            "pointlike detectors with sudden switching in 3+1 dimensions".into(),
        ));
    }
    finite("alpha", config.alpha)?;
    finite("gamma", config.gamma)?;
    positive("beta", config.beta)?;
    if !(config.coupling >= 0.0 && config.coupling.is_finite()) {
        return Err(Error::InvalidParameter(format!("coupling must be non-negative, got {}", config.coupling)));
    }
    if let SmearingProfile::Gaussian(d) = config.smearing {
        positive("delta", d)?;
    }
    if config.dimension == Dimension::OnePlusOne {
        positive("cutoff", config.cutoff)?;
    }
    Ok(ValidatedConfig(config))
}
