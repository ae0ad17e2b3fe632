//! JSON fit reports.
//!
//! Field order is fixed by the struct definitions and no field depends on
//! the clock, so identical runs serialize to identical bytes. Non-finite
//! numbers (an objective of `−∞` at `ρ = 0`) serialize as `null`.

use serde::Serialize;

use infoproj_core::power::{BoundKind, ComponentFit, UpperBound};
use infoproj_core::synth::{SynthSpec, Variant};
use infoproj_core::SicValue;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: &'static str,
    pub method: Option<&'static str>,
    pub input: InputInfo,
    pub params: Params,
    /// One entry per direction (columns of the basis).
    pub directions: Vec<Vec<f64>>,
    /// `Σᵢ log(ρ + ‖Wᵀx̂ᵢ‖²)` for the returned basis.
    pub tpca_objective: f64,
    pub sic: SicReport,
    /// Top eigenvalues of the scatter matrix (PCA only).
    pub eigenvalues: Option<Vec<f64>>,
    pub components: Vec<ComponentReport>,
    pub upper_bound: Option<BoundReport>,
    pub eigenvalue_tie: bool,
    pub converged: bool,
    pub iterations: usize,
    pub kkt_residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputInfo {
    pub source: &'static str,
    pub path: Option<String>,
    pub synth: Option<SynthInfo>,
    pub n: usize,
    pub d: usize,
    pub centered: bool,
    pub labelled: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthInfo {
    pub variant: &'static str,
    pub seed: u64,
    pub n_large: usize,
    pub n_small: usize,
    pub d: usize,
    pub scale_factor: f64,
    pub scale_minority: bool,
}

impl From<&SynthSpec> for SynthInfo {
    fn from(s: &SynthSpec) -> Self {
        Self {
            variant: variant_name(s.variant),
            seed: s.seed,
            n_large: s.n_large,
            n_small: s.n_small,
            d: s.d,
            scale_factor: s.scale_factor,
            scale_minority: s.scale_minority,
        }
    }
}

pub fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::TwoScale => "two-scale",
        Variant::OutlierPair => "outlier-pair",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Params {
    pub r: usize,
    pub rho: f64,
    pub rho_policy: RhoPolicyReport,
    pub sigma: f64,
    pub tail: TailReport,
    pub deltas: Vec<f64>,
    pub solver: Option<SolverReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RhoPolicyReport {
    /// `"absolute"` or `"relative"`.
    pub kind: &'static str,
    /// Multiplier of the data scale for the relative policy.
    pub factor: Option<f64>,
    /// Square root of the mean squared row norm.
    pub scale: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TailReport {
    /// `"nu"` or `"expectation"`.
    pub kind: &'static str,
    pub value: f64,
    /// Degrees of freedom used.
    pub nu: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverReport {
    /// `None` means the automatic step policy.
    pub step: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub restarts: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SicReport {
    pub gaussian: SicTerms,
    /// Absent when `ρ = 0`, where the t density is undefined.
    pub t: Option<SicTerms>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SicTerms {
    pub total: f64,
    pub data: f64,
    pub resolution: f64,
    pub constant: f64,
}

impl From<SicValue> for SicTerms {
    fn from(v: SicValue) -> Self {
        Self {
            total: v.total,
            data: v.data_term,
            resolution: v.resolution_term,
            constant: v.constant_term,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub kkt_residual: f64,
    pub step_size: f64,
    pub backtracks: usize,
    pub start: usize,
    pub objective_trace: Vec<f64>,
}

impl From<&ComponentFit> for ComponentReport {
    fn from(c: &ComponentFit) -> Self {
        Self {
            objective: c.objective,
            iterations: c.iterations,
            converged: c.converged,
            kkt_residual: c.kkt_residual,
            step_size: c.step_size,
            backtracks: c.backtracks,
            start: c.start,
            objective_trace: c.objective_trace.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub value: f64,
    /// `"converged"` or `"heuristic"`.
    pub kind: &'static str,
    pub relaxed_objective: f64,
    pub duality_gap: f64,
    pub gradient_mapping_norm: f64,
}

impl From<&UpperBound> for BoundReport {
    fn from(b: &UpperBound) -> Self {
        Self {
            value: b.value,
            kind: match b.kind {
                BoundKind::Converged => "converged",
                BoundKind::Heuristic => "heuristic",
            },
            relaxed_objective: b.relaxed_objective,
            duality_gap: b.duality_gap,
            gradient_mapping_norm: b.gradient_mapping_norm,
        }
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
