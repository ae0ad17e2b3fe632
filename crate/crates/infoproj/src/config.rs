//! Validated run configuration, independent of how it was parsed.

use std::path::PathBuf;

use infoproj_core::synth::SynthSpec;
use infoproj_core::{scale_measure, DataMatrix, TailPrior};

use crate::csvio::LoadOptions;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Pca,
    TpcaPower,
    TpcaRelax,
}

impl MethodChoice {
    pub fn name(self) -> &'static str {
        match self {
            MethodChoice::Pca => "pca",
            MethodChoice::TpcaPower => "tpca-power",
            MethodChoice::TpcaRelax => "tpca-relax",
        }
    }
}

/// How `ρ` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoPolicy {
    Absolute(f64),
    /// `ρ = factor · scale_measure(X̂)`.
    Relative(f64),
}

impl Default for RhoPolicy {
    fn default() -> Self {
        RhoPolicy::Relative(1e-5)
    }
}

impl RhoPolicy {
    /// The resolved `ρ` and the data scale it was computed from.
    pub fn resolve(self, x: &DataMatrix) -> (f64, f64) {
        let scale = scale_measure(x);
        match self {
            RhoPolicy::Absolute(rho) => (rho, scale),
            RhoPolicy::Relative(f) => (f * scale, scale),
        }
    }

    fn validate(self) -> Result<()> {
        let v = match self {
            RhoPolicy::Absolute(v) | RhoPolicy::Relative(v) => v,
        };
        if v >= 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::Config(format!("rho must be nonnegative, got {v}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    Csv { path: PathBuf, load: LoadOptions },
    Synth(SynthSpec),
}

/// Optimizer settings; `None` leaves the method's default in place.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverOverrides {
    /// Power-method `α`, or the relaxation's initial step.
    pub alpha: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub restarts: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub input: InputSource,
    pub method: MethodChoice,
    pub r: usize,
    pub rho: RhoPolicy,
    pub sigma: f64,
    pub tail: TailPrior,
    /// One value for every axis, or one per axis.
    pub deltas: Vec<f64>,
    pub solver: SolverOverrides,
    pub seed: u64,
    pub out_report: Option<PathBuf>,
    pub out_proj: Option<PathBuf>,
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        self.rho.validate()?;
        if self.r == 0 {
            return Err(Error::Config("r must be at least 1".into()));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::Config(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
            return Err(Error::Config("every delta must be positive".into()));
        }
        if self.deltas.len() != 1 && self.deltas.len() != self.r {
            return Err(Error::Config(format!(
                "give one delta or r = {} of them, got {}",
                self.r,
                self.deltas.len()
            )));
        }
        if let Some(a) = self.solver.alpha {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::Config(format!("alpha must be positive, got {a}")));
            }
        }
        if let Some(t) = self.solver.tol {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::Config(format!("tol must be positive, got {t}")));
            }
        }
        if self.solver.max_iter == Some(0) {
            return Err(Error::Config("max-iter must be at least 1".into()));
        }
        if self.method == MethodChoice::TpcaRelax && self.rho == RhoPolicy::Absolute(0.0) {
            return Err(Error::Config("tpca-relax needs rho > 0".into()));
        }
        Ok(())
    }

    pub fn deltas_for(&self, r: usize) -> Vec<f64> {
        if self.deltas.len() == 1 {
            vec![self.deltas[0]; r]
        } else {
            self.deltas.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub spec: SynthSpec,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SicConfig {
    pub input: InputSource,
    /// CSV with one direction per row.
    pub weights: PathBuf,
    pub rho: RhoPolicy,
    pub sigma: f64,
    pub tail: TailPrior,
    pub deltas: Vec<f64>,
    pub out_report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunConfig {
    Fit(FitConfig),
    Gen(GenConfig),
    Sic(SicConfig),
}
