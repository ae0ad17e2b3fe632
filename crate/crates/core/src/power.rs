//! t-PCA by a modified power method.
//!
//! Stationary points of `max Σᵢ log(ρ + (x̂ᵢ'w)²)` subject to `w'w = 1`
//! satisfy `A(w) w = λ w` with the weighted scatter
//!
//! ```text
//! A(w) = Σᵢ x̂ᵢx̂ᵢ' / (ρ + (x̂ᵢ'w)²)
//! ```
//!
//! in which points that project close to zero get the largest weight. The
//! iteration takes a gradient step and renormalizes:
//!
//! ```text
//! v = (I + α A(w)) w,    w ← v / ‖v‖
//! ```
//!
//! It starts from the dominant eigenvector of `Σᵢ x̂ᵢx̂ᵢ' / (ρ + x̂ᵢ'x̂ᵢ)`,
//! which replaces `(x̂ᵢ'w)²` by its upper bound `x̂ᵢ'x̂ᵢ`. Further components
//! are found on deflated data.
//!
//! Step size: unless fixed by the caller, `α = 1 / λ_max(A(w₀))`, halved
//! whenever a step would lower the objective or realizes less than a tenth
//! of its first-order predicted gain, and otherwise doubled after every
//! accepted step. Rejected steps are retried from the same iterate, so every
//! recorded objective trace is nondecreasing. For large `α` the update is
//! plain power iteration on `A(w)`.
//!
//! With `ρ = 0` the weights blow up for points orthogonal to `w`; the
//! iteration then runs with `ρ = 1e-12 · scale²` while the reported objective
//! is evaluated at `ρ = 0`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use libm::sqrt;

use crate::data::{scale_measure, DataMatrix, OrthonormalBasis, UnitVector};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Matrix};
use crate::sic::{check_rho, objective_from_projections};
use crate::synth::NormalSampler;

/// Relative size of the substitute `ρ` used when iterating at `ρ = 0`.
pub const ZERO_RHO_SUBSTITUTE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    /// `α = 1/λ_max(A(w₀))` per start, halved on any objective decrease
    /// or weak step and doubled after every other accepted step.
    Auto,
    /// A fixed `α`, still halved on any objective decrease or weak step.
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerOptions {
    pub step: StepSize,
    pub max_iter: usize,
    /// Stop once `‖w⁽ᵏ⁾ − w⁽ᵏ⁻¹⁾‖ ≤ tol`.
    pub tol: f64,
    /// Extra starts drawn uniformly on the sphere, in addition to the
    /// deterministic initialization.
    pub restarts: usize,
    /// Seed for the restart directions.
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self {
            step: StepSize::Auto,
            max_iter: 10_000,
            tol: 1e-8,
            restarts: 4,
            seed: 0,
        }
    }
}

impl PowerOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter must be at least 1"));
        }
        if let StepSize::Fixed(a) = self.step {
            if !(a > 0.0) || !a.is_finite() {
                return Err(invalid(format!("step size must be positive, got {a}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Pca,
    TpcaPower,
    TpcaRelax,
}

/// Diagnostics for one fitted direction (power method) or for the whole
/// solve (relaxation).
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentFit {
    /// Objective at the requested `ρ`.
    pub objective: f64,
    /// Objective after every accepted step, starting with the initial point.
    pub objective_trace: Vec<f64>,
    /// Steps taken, including rejected ones.
    pub iterations: usize,
    pub converged: bool,
    /// Stationarity residual at the returned point.
    pub kkt_residual: f64,
    /// Step size in effect at termination.
    pub step_size: f64,
    /// Number of step halvings.
    pub backtracks: usize,
    /// Which start produced this result: 0 is the deterministic
    /// initialization, `k ≥ 1` the `k`-th random restart.
    pub start: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// The relaxation solver met its gradient-mapping criterion.
    Converged,
    /// The bound is the objective at the last iterate only.
    Heuristic,
}

/// Upper bound on the rank-`r` t-PCA optimum obtained from the relaxation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperBound {
    /// `relaxed_objective + duality_gap`. By concavity this bounds the
    /// relaxed optimum, and so every rank-`r` objective.
    pub value: f64,
    pub kind: BoundKind,
    /// Relaxation objective at the returned Fantope point.
    pub relaxed_objective: f64,
    /// Frank–Wolfe duality gap at the returned point.
    pub duality_gap: f64,
    pub gradient_mapping_norm: f64,
}

/// Result of a fit.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub method: Method,
    pub basis: OrthonormalBasis,
    pub components: Vec<ComponentFit>,
    pub upper_bound: Option<UpperBound>,
    /// Set when the basis came from eigenvectors with a tie at position `r`.
    pub eigenvalue_tie: bool,
}

impl FitReport {
    pub fn converged(&self) -> bool {
        self.components.iter().all(|c| c.converged)
    }

    pub fn iterations(&self) -> usize {
        self.components.iter().map(|c| c.iterations).sum()
    }

    pub fn kkt_residual(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.kkt_residual)
            .fold(0.0, f64::max)
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.objective).collect()
    }

    pub fn backtracked(&self) -> bool {
        self.components.iter().any(|c| c.backtracks > 0)
    }
}

fn weight(rho: f64, p: f64, row: usize) -> Result<f64> {
    let denom = rho + p * p;
    if denom > 0.0 {
        Ok(1.0 / denom)
    } else {
        Err(Error::Singular { row })
    }
}

/// `A(w) = Σᵢ x̂ᵢx̂ᵢ' / (ρ + (x̂ᵢ'w)²)`.
pub fn weighted_scatter(x: &DataMatrix, w: &UnitVector, rho: f64) -> Result<Matrix> {
    check_rho(rho)?;
    x.check_dim(w.dim())?;
    let mut a = Matrix::zeros(x.d(), x.d());
    for (i, row) in x.rows().enumerate() {
        let p = linalg::dot(row, w.as_slice());
        linalg::add_outer(&mut a, row, weight(rho, p, i)?);
    }
    Ok(a)
}

/// `A(w) w` without forming `A`, together with the projections `X̂w`.
fn weighted_apply(x: &DataMatrix, w: &[f64], rho: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut out = vec![0.0; x.d()];
    let mut proj = Vec::with_capacity(x.n());
    for (i, row) in x.rows().enumerate() {
        let p = linalg::dot(row, w);
        let s = p * weight(rho, p, i)?;
        for (o, v) in out.iter_mut().zip(row) {
            *o += s * v;
        }
        proj.push(p);
    }
    Ok((out, proj))
}

/// Dominant eigenvector of `Σᵢ x̂ᵢx̂ᵢ' / (ρ + x̂ᵢ'x̂ᵢ)`. Zero rows are skipped.
pub fn power_init(x: &DataMatrix, rho: f64) -> Result<UnitVector> {
    check_rho(rho)?;
    let mut a = Matrix::zeros(x.d(), x.d());
    let mut any = false;
    for row in x.rows() {
        let sq = linalg::dot(row, row);
        if sq == 0.0 {
            continue;
        }
        any = true;
        linalg::add_outer(&mut a, row, 1.0 / (rho + sq));
    }
    if !any {
        return Err(invalid("cannot initialize on all-zero data"));
    }
    let eig = linalg::symmetric_eigen(&a);
    UnitVector::normalized(eig.vector(0))
}

/// One update `w ← (I + αA(w))w / ‖(I + αA(w))w‖`.
pub fn power_step(x: &DataMatrix, w: &UnitVector, rho: f64, alpha: f64) -> Result<UnitVector> {
    check_rho(rho)?;
    x.check_dim(w.dim())?;
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(invalid(format!(
            "step size must be nonnegative, got {alpha}"
        )));
    }
    let (aw, _) = weighted_apply(x, w.as_slice(), rho)?;
    step_from(w.as_slice(), &aw, alpha)
}

fn step_from(w: &[f64], aw: &[f64], alpha: f64) -> Result<UnitVector> {
    let v: Vec<f64> = w.iter().zip(aw).map(|(wi, ai)| wi + alpha * ai).collect();
    let nrm = linalg::norm(&v);
    if !(nrm > 0.0) {
        return Err(Error::DegenerateStep);
    }
    UnitVector::normalized(v).map_err(|_| Error::DegenerateStep)
}

/// `‖A(w)w − (w'A(w)w) w‖₂`; zero exactly when `w` is an eigenvector of
/// `A(w)`. Minima and saddles satisfy this as well as maxima.
pub fn kkt_residual(x: &DataMatrix, w: &UnitVector, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    x.check_dim(w.dim())?;
    let (aw, _) = weighted_apply(x, w.as_slice(), rho)?;
    Ok(residual_from(w.as_slice(), &aw))
}

fn residual_from(w: &[f64], aw: &[f64]) -> f64 {
    let lambda = linalg::dot(w, aw);
    let sq: f64 = aw
        .iter()
        .zip(w)
        .map(|(a, wi)| {
            let r = a - lambda * wi;
            r * r
        })
        .sum();
    sqrt(sq)
}

/// Projects every row onto the orthogonal complement of `w`.
pub fn deflate(x: &DataMatrix, w: &UnitVector) -> Result<DataMatrix> {
    x.check_dim(w.dim())?;
    let mut values = x.values().clone();
    for i in 0..x.n() {
        let row = values.row_mut(i);
        let p = linalg::dot(row, w.as_slice());
        for (v, wi) in row.iter_mut().zip(w.as_slice()) {
            *v -= p * wi;
        }
    }
    DataMatrix::new(values)
}

fn effective_rho(rho: f64, scale: f64) -> f64 {
    if rho == 0.0 {
        ZERO_RHO_SUBSTITUTE * scale * scale
    } else {
        rho
    }
}

/// A single run of the iteration from `w0`.
#[derive(Debug, Clone)]
pub struct PowerRun {
    pub w: UnitVector,
    pub fit: ComponentFit,
}

/// Iterates from `w0` until the step length drops below `opts.tol` or
/// `opts.max_iter` steps have been taken. `opts.restarts` is ignored.
pub fn power_iterate(
    x: &DataMatrix,
    w0: UnitVector,
    rho: f64,
    opts: &PowerOptions,
) -> Result<PowerRun> {
    check_rho(rho)?;
    opts.validate()?;
    x.check_dim(w0.dim())?;
    let scale = scale_measure(x);
    if scale == 0.0 {
        return Err(invalid("cannot fit all-zero data"));
    }
    ascend(x, w0, effective_rho(rho, scale), rho, opts, 0)
}

/// Factor applied to an automatic step after every accepted step.
const GROWTH: f64 = 2.0;
/// Fraction of the first-order predicted gain below which an accepted step
/// still halves `α`.
const SUFFICIENT_GAIN: f64 = 0.1;

fn ascend(
    x: &DataMatrix,
    w0: UnitVector,
    rho_eff: f64,
    rho: f64,
    opts: &PowerOptions,
    start: usize,
) -> Result<PowerRun> {
    let mut alpha = match opts.step {
        StepSize::Fixed(a) => a,
        StepSize::Auto => {
            let top = linalg::symmetric_eigen(&weighted_scatter(x, &w0, rho_eff)?).values[0];
            if top > 0.0 {
                1.0 / top
            } else {
                1.0
            }
        }
    };

    let mut w = w0;
    let (mut aw, proj) = weighted_apply(x, w.as_slice(), rho_eff)?;
    let mut f = objective_from_projections(&proj, rho_eff);
    let mut trace = vec![f];
    let mut backtracks = 0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iter {
        iterations += 1;
        let next = step_from(w.as_slice(), &aw, alpha)?;
        let (next_aw, next_proj) = weighted_apply(x, next.as_slice(), rho_eff)?;
        let next_f = objective_from_projections(&next_proj, rho_eff);
        let delta: Vec<f64> = next
            .as_slice()
            .iter()
            .zip(w.as_slice())
            .map(|(a, b)| a - b)
            .collect();
        let moved = linalg::norm(&delta);
        // the Riemannian gradient of the objective is 2(Aw − (w'Aw)w)
        let lambda = linalg::dot(w.as_slice(), &aw);
        let predicted: f64 = 2.0
            * aw.iter()
                .zip(w.as_slice())
                .zip(&delta)
                .map(|((a, wi), di)| (a - lambda * wi) * di)
                .sum::<f64>();
        let gain = next_f - f;
        if gain < 0.0 {
            alpha *= 0.5;
            backtracks += 1;
            if alpha < f64::MIN_POSITIVE {
                break;
            }
            continue;
        }
        w = next;
        aw = next_aw;
        f = next_f;
        trace.push(f);
        if moved <= opts.tol {
            converged = true;
            break;
        }
        // a step that overshoots across a maximum can keep the objective
        // level without approaching it, so shrink instead of growing
        if gain < SUFFICIENT_GAIN * predicted {
            alpha *= 0.5;
            backtracks += 1;
        } else if opts.step == StepSize::Auto {
            alpha *= GROWTH;
        }
    }

    let objective = if rho == rho_eff {
        f
    } else {
        objective_from_projections(&x.project(w.as_slice())?, rho)
    };
    let fit = ComponentFit {
        objective,
        objective_trace: trace,
        iterations,
        converged,
        kkt_residual: residual_from(w.as_slice(), &aw),
        step_size: alpha,
        backtracks,
        start,
    };
    Ok(PowerRun { w, fit })
}

fn project_out(v: &mut [f64], found: &[UnitVector]) {
    for f in found {
        let p = linalg::dot(v, f.as_slice());
        for (x, fi) in v.iter_mut().zip(f.as_slice()) {
            *x -= p * fi;
        }
    }
}

/// A unit vector orthogonal to `found`, taken from the standard basis in
/// index order.
fn complete_basis(d: usize, found: &[UnitVector]) -> Result<UnitVector> {
    let mut best: Option<Vec<f64>> = None;
    let mut best_norm = 0.0;
    for i in 0..d {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        project_out(&mut v, found);
        project_out(&mut v, found);
        let nrm = linalg::norm(&v);
        if nrm > 0.5 {
            return UnitVector::normalized(v);
        }
        if nrm > best_norm {
            best_norm = nrm;
            best = Some(v);
        }
    }
    best.ok_or_else(|| invalid("no direction left to complete the basis"))
        .and_then(UnitVector::normalized)
}

/// Fits `r` t-PCA directions with deflation between components.
///
/// Each component keeps the best of `1 + opts.restarts` runs (ties go to
/// the lower start index). Components are reported with their objective on
/// the data as deflated at that stage. The returned basis is
/// re-orthonormalized, and each column has its largest-magnitude entry
/// positive.
pub fn fit_tpca_power(
    x: &DataMatrix,
    rho: f64,
    r: usize,
    opts: &PowerOptions,
) -> Result<FitReport> {
    check_rho(rho)?;
    opts.validate()?;
    if r == 0 || r > x.d() {
        return Err(invalid(format!(
            "need 1 <= r <= d = {}, got r = {r}",
            x.d()
        )));
    }
    let scale = scale_measure(x);
    if scale == 0.0 {
        return Err(invalid("cannot fit all-zero data"));
    }
    let rho_eff = effective_rho(rho, scale);
    let mut sampler = NormalSampler::new(opts.seed);
    let mut current = x.clone();
    let mut found: Vec<UnitVector> = Vec::with_capacity(r);
    let mut components = Vec::with_capacity(r);

    for _ in 0..r {
        if scale_measure(&current) <= 1e-12 * scale {
            // nothing left to explain; any orthogonal direction is optimal
            let w = complete_basis(x.d(), &found)?;
            let objective = objective_from_projections(&current.project(w.as_slice())?, rho);
            components.push(ComponentFit {
                objective,
                objective_trace: vec![objective],
                iterations: 0,
                converged: true,
                kkt_residual: 0.0,
                step_size: 0.0,
                backtracks: 0,
                start: 0,
            });
            current = deflate(&current, &w)?;
            found.push(w);
            continue;
        }

        let mut starts = Vec::with_capacity(1 + opts.restarts);
        starts.push(power_init(&current, rho)?);
        for _ in 0..opts.restarts {
            let mut v = sampler.unit_vector(x.d()).into_inner();
            project_out(&mut v, &found);
            starts.push(UnitVector::normalized(v)?);
        }

        let mut best: Option<PowerRun> = None;
        for (k, w0) in starts.into_iter().enumerate() {
            let run = ascend(&current, w0, rho_eff, rho, opts, k)?;
            let better = match &best {
                None => true,
                Some(b) => run.fit.objective_trace.last() > b.fit.objective_trace.last(),
            };
            if better {
                best = Some(run);
            }
        }
        let best = best.expect("at least one start");
        current = deflate(&current, &best.w)?;
        components.push(best.fit);
        found.push(best.w);
    }

    let mut columns: Vec<Vec<f64>> = found.into_iter().map(UnitVector::into_inner).collect();
    for c in &mut columns {
        linalg::canonical_sign(c);
    }
    let basis = OrthonormalBasis::orthonormalize(&Matrix::from_columns(&columns))?;
    Ok(FitReport {
        method: Method::TpcaPower,
        basis,
        components,
        upper_bound: None,
        eigenvalue_tie: false,
    })
}
