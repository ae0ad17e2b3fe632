//! Subjective information content (SIC) of projection patterns.
//!
//! The SIC of a projection is `−log p(X̂W) − n Σ log Δᵢ`: minus the log
//! density of the projected data under the user's background distribution,
//! plus the resolution term for a scatter plot with bin widths `Δ`. Each
//! value is returned split into the part that depends on the data, the
//! resolution part, and the normalization constant, so callers can rank
//! projections by the data term alone or compare absolute values.

use alloc::format;
use alloc::vec::Vec;

use core::f64::consts::PI;
use libm::{log, log1p};

use crate::data::{DataMatrix, OrthonormalBasis, UnitVector};
use crate::error::{invalid, Error, Result};
use crate::special::log_gamma_unchecked;

/// A SIC value in nats, with `total = data_term + resolution_term + constant_term`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SicValue {
    pub total: f64,
    pub data_term: f64,
    pub resolution_term: f64,
    pub constant_term: f64,
}

impl SicValue {
    fn from_parts(data_term: f64, resolution_term: f64, constant_term: f64) -> Self {
        Self {
            total: data_term + resolution_term + constant_term,
            data_term,
            resolution_term,
            constant_term,
        }
    }
}

fn positive(x: f64, name: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

fn resolution_term(n: usize, deltas: &[f64], r: usize) -> Result<f64> {
    if deltas.len() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: deltas.len(),
        });
    }
    for &d in deltas {
        positive(d, "resolution")?;
    }
    // 0.0 - x rather than -x, so Δ = 1 gives +0
    Ok(0.0 - n as f64 * deltas.iter().map(|&d| log(d)).sum::<f64>())
}

/// SIC of a 1-D projection under the Gaussian prior `N(0, σ²I)`.
pub fn sic_gaussian_1d(x: &DataMatrix, w: &UnitVector, sigma: f64, delta: f64) -> Result<SicValue> {
    positive(sigma, "sigma")?;
    let p = x.project(w.as_slice())?;
    let quad: f64 = p.iter().map(|v| v * v).sum();
    let n = x.n() as f64;
    Ok(SicValue::from_parts(
        quad / (2.0 * sigma * sigma),
        resolution_term(x.n(), &[delta], 1)?,
        0.5 * n * log(2.0 * PI * sigma * sigma),
    ))
}

/// SIC of an `r`-dimensional projection under the Gaussian prior.
pub fn sic_gaussian_rd(
    x: &DataMatrix,
    w: &OrthonormalBasis,
    sigma: f64,
    deltas: &[f64],
) -> Result<SicValue> {
    positive(sigma, "sigma")?;
    let resolution = resolution_term(x.n(), deltas, w.r())?;
    let trace: f64 = w.captured_norms(x)?.iter().sum();
    let n = x.n() as f64;
    Ok(SicValue::from_parts(
        trace / (2.0 * sigma * sigma),
        resolution,
        0.5 * n * w.r() as f64 * log(2.0 * PI * sigma * sigma),
    ))
}

/// `−log` of the normalization of an `r`-variate t density with scale `ρ`
/// and `ν` degrees of freedom, per data point.
fn t_log_normalizer(rho: f64, nu: f64, r: usize) -> f64 {
    let r = r as f64;
    log_gamma_unchecked(0.5 * nu) - log_gamma_unchecked(0.5 * (nu + r)) + 0.5 * r * log(PI * rho)
}

/// SIC of a 1-D projection under the multivariate-t prior.
///
/// The density of each projected point is
/// `Γ((ν+1)/2) / (√(πρ) Γ(ν/2)) · (1 + p²/ρ)^(−(ν+1)/2)`.
pub fn sic_t_1d(x: &DataMatrix, w: &UnitVector, rho: f64, nu: f64, delta: f64) -> Result<SicValue> {
    positive(rho, "rho")?;
    positive(nu, "nu")?;
    let p = x.project(w.as_slice())?;
    let data: f64 = p.iter().map(|v| log1p(v * v / rho)).sum();
    Ok(SicValue::from_parts(
        0.5 * (nu + 1.0) * data,
        resolution_term(x.n(), &[delta], 1)?,
        x.n() as f64 * t_log_normalizer(rho, nu, 1),
    ))
}

/// SIC of an `r`-dimensional projection under the multivariate-t prior.
pub fn sic_t_rd(
    x: &DataMatrix,
    w: &OrthonormalBasis,
    rho: f64,
    nu: f64,
    deltas: &[f64],
) -> Result<SicValue> {
    positive(rho, "rho")?;
    positive(nu, "nu")?;
    let resolution = resolution_term(x.n(), deltas, w.r())?;
    let data: f64 = w.captured_norms(x)?.iter().map(|q| log1p(q / rho)).sum();
    Ok(SicValue::from_parts(
        0.5 * (nu + w.r() as f64) * data,
        resolution,
        x.n() as f64 * t_log_normalizer(rho, nu, w.r()),
    ))
}

/// The t-PCA objective `Σᵢ log(ρ + (x̂ᵢ'w)²)`.
///
/// With `ρ = 0` and a row orthogonal to `w` the result is `−∞`.
pub fn tpca_objective(x: &DataMatrix, w: &UnitVector, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(objective_from_projections(&x.project(w.as_slice())?, rho))
}

/// `Σᵢ log(ρ + x̂ᵢ'WW'x̂ᵢ)`, the `r`-dimensional t-PCA objective.
pub fn tpca_objective_basis(x: &DataMatrix, w: &OrthonormalBasis, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(w.captured_norms(x)?.iter().map(|q| log(rho + q)).sum())
}

pub(crate) fn objective_from_projections(p: &[f64], rho: f64) -> f64 {
    p.iter().map(|v| log(rho + v * v)).sum()
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if rho >= 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!(
            "rho must be nonnegative and finite, got {rho}"
        )))
    }
}

/// `w'X̂'X̂w − 2σ²n · log(max(X̂w) − min(X̂w))`: the Gaussian SIC ranking when
/// the plot axes are stretched to the data range, so that `Δ` scales with
/// the range. Evaluation only.
///
/// A constant projection (zero range) returns `−∞`.
pub fn stretched_sic_objective(x: &DataMatrix, w: &UnitVector, sigma: f64) -> Result<f64> {
    positive(sigma, "sigma")?;
    if x.n() < 2 {
        return Err(invalid("the stretched objective needs at least two points"));
    }
    let p: Vec<f64> = x.project(w.as_slice())?;
    let quad: f64 = p.iter().map(|v| v * v).sum();
    let max = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = p.iter().copied().fold(f64::INFINITY, f64::min);
    let range = max - min;
    if !(range > 0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(quad - 2.0 * sigma * sigma * x.n() as f64 * log(range))
}
