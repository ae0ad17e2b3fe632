//! Convex relaxation of rank-`r` t-PCA over the Fantope.
//!
//! With `M = WWᵀ` the t-PCA objective becomes `Σᵢ log(ρ + x̂ᵢ'Mx̂ᵢ)`, which
//! is concave in `M`. The rank-`r` projection matrices are exactly the
//! points of
//!
//! ```text
//! { M symmetric : trace M = r, 0 ⪯ M ⪯ I, rank M = r }
//! ```
//!
//! and dropping the rank constraint leaves the Fantope, a convex set. The
//! relaxation is solved here by projected gradient ascent; its value bounds
//! every rank-`r` solution from above, and the dominant eigenvectors of the
//! maximizer give a feasible basis.
//!
//! Step sizes start at `1/L̂` with `L̂ = Σᵢ ‖x̂ᵢ‖⁴ / (ρ + x̂ᵢ'M₀x̂ᵢ)²`, the
//! curvature of the objective at the starting point. A step is accepted when
//! it satisfies the usual sufficient-ascent test for projected gradient
//! methods; otherwise the step is halved. After an accepted step the trial
//! step grows by half again.
//!
//! The solve stops once the Frank–Wolfe duality gap
//! `max_F ⟨∇f(M), F − M⟩` over the Fantope is below `tol · max(1, |f|)`. By
//! concavity `f(M) + gap` bounds the relaxed optimum, and this is the value
//! reported as the upper bound.

use alloc::format;
use alloc::vec::Vec;

use libm::log;

use crate::data::{DataMatrix, OrthonormalBasis};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Matrix};
use crate::power::{BoundKind, ComponentFit, FitReport, Method, UpperBound};
use crate::sic::check_rho;

/// Tolerance on `|trace M − r|` for a [`FantopeMatrix`].
pub const TRACE_TOL: f64 = 1e-8;
/// Tolerance on eigenvalues leaving `[0, 1]` for a [`FantopeMatrix`].
pub const SPECTRUM_TOL: f64 = 1e-9;

/// A symmetric `d × d` matrix with `0 ⪯ M ⪯ I` and `trace M = r`.
#[derive(Debug, Clone, PartialEq)]
pub struct FantopeMatrix {
    m: Matrix,
    r: usize,
}

impl FantopeMatrix {
    pub fn new(m: Matrix, r: usize) -> Result<Self> {
        let check = feasibility_check(&m, r, SPECTRUM_TOL)?;
        if check.asymmetry > 1e-10 * m.max_abs().max(1.0) {
            return Err(invalid("matrix is not symmetric"));
        }
        if check.trace_violation > TRACE_TOL
            || check.psd_violation > SPECTRUM_TOL
            || check.cap_violation > SPECTRUM_TOL
        {
            return Err(invalid(format!(
                "matrix is outside the Fantope (trace off by {:e}, eigenvalues in [{}, {}])",
                check.trace_violation,
                check.eigenvalues.last().copied().unwrap_or(0.0),
                check.eigenvalues.first().copied().unwrap_or(0.0),
            )));
        }
        Ok(Self { m, r })
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    #[inline]
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn into_matrix(self) -> Matrix {
        self.m
    }
}

fn check_square_rank(a: &Matrix, r: usize) -> Result<()> {
    if a.rows() != a.cols() {
        return Err(invalid(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if r == 0 || r > a.rows() {
        return Err(invalid(format!(
            "need 1 <= r <= d = {}, got r = {r}",
            a.rows()
        )));
    }
    if !a.is_finite() {
        return Err(invalid("matrix has non-finite entries"));
    }
    Ok(())
}

/// Frobenius-nearest point of the Fantope: eigenvalues `λᵢ` are replaced by
/// `clip(λᵢ − θ, 0, 1)` with `θ` chosen so that they sum to `r`.
pub fn fantope_project(a: &Matrix, r: usize) -> Result<FantopeMatrix> {
    check_square_rank(a, r)?;
    let m = project_with(a, r, true);
    FantopeMatrix::new(m, r)
}

/// Projection onto `{trace M = r, M ⪰ 0}` (no upper cap). For `r = 1` this
/// coincides with the Fantope.
pub fn spectraplex_project(a: &Matrix, r: usize) -> Result<Matrix> {
    check_square_rank(a, r)?;
    Ok(project_with(a, r, false))
}

fn project_with(a: &Matrix, r: usize, cap: bool) -> Matrix {
    let eig = linalg::symmetric_eigen(a);
    let theta = spectrum_shift(&eig.values, r as f64, cap);
    let clip = |l: f64| {
        let v = (l - theta).max(0.0);
        if cap {
            v.min(1.0)
        } else {
            v
        }
    };
    eig.reconstruct_with(clip).symmetrized()
}

fn clipped_sum(values: &[f64], theta: f64, cap: bool) -> f64 {
    values
        .iter()
        .map(|&l| {
            let v = (l - theta).max(0.0);
            if cap {
                v.min(1.0)
            } else {
                v
            }
        })
        .sum()
}

/// Finds `θ` with `Σ clip(λᵢ − θ) = target` by bisection, then solves the
/// linear piece containing the root exactly.
fn spectrum_shift(values: &[f64], target: f64, cap: bool) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    // sum(lo) = d ≥ target, sum(hi) = 0 ≤ target
    let mut lo = min - 1.0;
    let mut hi = max;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if clipped_sum(values, mid, cap) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);

    // On the piece containing θ the sum is Σ_free (λ − θ) + #capped.
    let (mut free_sum, mut free_count, mut capped) = (0.0, 0usize, 0usize);
    for &l in values {
        let v = l - theta;
        if v >= 1.0 && cap {
            capped += 1;
        } else if v > 0.0 {
            free_sum += l;
            free_count += 1;
        }
    }
    if free_count > 0 {
        let exact = (free_sum + capped as f64 - target) / free_count as f64;
        if exact >= lo - 1e-12 * (1.0 + exact.abs()) && exact <= hi + 1e-12 * (1.0 + exact.abs()) {
            return exact;
        }
    }
    theta
}

fn quadratic_forms(x: &DataMatrix, m: &Matrix) -> Result<Vec<f64>> {
    if m.rows() != x.d() || m.cols() != x.d() {
        return Err(Error::DimensionMismatch {
            expected: x.d(),
            found: m.rows(),
        });
    }
    let xm = x.values().matmul(m);
    Ok(x.rows()
        .zip(xm.row_iter())
        .map(|(a, b)| linalg::dot(a, b))
        .collect())
}

/// `Σᵢ log(ρ + x̂ᵢ'Mx̂ᵢ)`. Returns `−∞` if some `ρ + x̂ᵢ'Mx̂ᵢ` is zero.
pub fn relax_objective(x: &DataMatrix, m: &Matrix, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(quadratic_forms(x, m)?.iter().map(|q| log(rho + q)).sum())
}

/// `∇ Σᵢ log(ρ + x̂ᵢ'Mx̂ᵢ) = Σᵢ x̂ᵢx̂ᵢ' / (ρ + x̂ᵢ'Mx̂ᵢ)`.
pub fn relax_gradient(x: &DataMatrix, m: &Matrix, rho: f64) -> Result<Matrix> {
    check_rho(rho)?;
    let q = quadratic_forms(x, m)?;
    gradient_from(x, &q, rho)
}

fn gradient_from(x: &DataMatrix, q: &[f64], rho: f64) -> Result<Matrix> {
    let mut g = Matrix::zeros(x.d(), x.d());
    for (i, (row, qi)) in x.rows().zip(q).enumerate() {
        let denom = rho + qi;
        if !(denom > 0.0) {
            return Err(Error::Singular { row: i });
        }
        linalg::add_outer(&mut g, row, 1.0 / denom);
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxOptions {
    /// Initial step; `None` uses the curvature estimate at the start.
    pub step: Option<f64>,
    /// Relative duality-gap tolerance.
    pub tol: f64,
    pub max_iter: usize,
    /// For `r = 1`, project onto `{trace M = 1, M ⪰ 0}` without the
    /// redundant `M ⪯ I` cap.
    pub drop_cap_for_rank_one: bool,
    /// Gradient-mapping norm below which the bound is labelled converged.
    pub bound_tol: f64,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self {
            step: None,
            tol: 1e-7,
            max_iter: 5_000,
            drop_cap_for_rank_one: false,
            bound_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RelaxSolution {
    pub fantope: FantopeMatrix,
    pub report: FitReport,
    /// Frank–Wolfe duality gap at the returned point.
    pub duality_gap: f64,
}

/// `max_F ⟨G, F⟩` over the Fantope (or the spectraplex when uncapped):
/// the sum of the `r` largest eigenvalues of `G`.
fn support_value(g: &Matrix, r: usize, cap: bool) -> f64 {
    let eig = linalg::symmetric_eigen(g);
    if cap {
        eig.values[..r].iter().sum()
    } else {
        r as f64 * eig.values[0].max(0.0)
    }
}

/// Projected gradient ascent on the Fantope from `M₀ = (r/d) I`.
pub fn solve_relaxation(
    x: &DataMatrix,
    rho: f64,
    r: usize,
    opts: &RelaxOptions,
) -> Result<RelaxSolution> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(invalid(format!("the relaxation needs rho > 0, got {rho}")));
    }
    let d = x.d();
    if r == 0 || r > d {
        return Err(invalid(format!("need 1 <= r <= d = {d}, got r = {r}")));
    }
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(invalid("tol must be positive and max_iter at least 1"));
    }
    if let Some(s) = opts.step {
        if !(s > 0.0) || !s.is_finite() {
            return Err(invalid(format!("step must be positive, got {s}")));
        }
    }
    let cap = !(opts.drop_cap_for_rank_one && r == 1);
    let project = |a: &Matrix| project_with(a, r, cap);

    let mut m = Matrix::identity(d).scale(r as f64 / d as f64);
    let mut q = quadratic_forms(x, &m)?;
    let mut f: f64 = q.iter().map(|qi| log(rho + qi)).sum();
    let mut g = gradient_from(x, &q, rho)?;

    let mut eta = match opts.step {
        Some(s) => s,
        None => {
            let curvature: f64 = x
                .rows()
                .zip(&q)
                .map(|(row, qi)| {
                    let sq = linalg::dot(row, row);
                    (sq / (rho + qi)) * (sq / (rho + qi))
                })
                .sum();
            if curvature > 0.0 {
                1.0 / curvature
            } else {
                1.0
            }
        }
    };

    let mut trace = alloc::vec![f];
    let mut iterations = 0;
    let mut backtracks = 0;
    let mut grad_map = f64::INFINITY;
    let mut gap = support_value(&g, r, cap) - g.frobenius_dot(&m);
    let mut converged = gap <= opts.tol * f.abs().max(1.0);

    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let (next, next_q, next_f, step) = loop {
            let candidate = project(&m.add(&g.scale(eta)));
            let step = candidate.sub(&m);
            let cq = quadratic_forms(x, &candidate)?;
            let cf: f64 = cq.iter().map(|qi| log(rho + qi)).sum();
            let model = f + g.frobenius_dot(&step) - step.frobenius_dot(&step) / (2.0 * eta);
            if cf.is_finite() && cf >= model {
                break (candidate, cq, cf, step);
            }
            eta *= 0.5;
            backtracks += 1;
            if eta < f64::MIN_POSITIVE {
                return Err(invalid("relaxation step size underflowed"));
            }
        };
        grad_map = step.frobenius_norm() / eta;
        m = next;
        q = next_q;
        f = next_f;
        g = gradient_from(x, &q, rho)?;
        trace.push(f);
        gap = (support_value(&g, r, cap) - g.frobenius_dot(&m)).max(0.0);
        converged = gap <= opts.tol * f.abs().max(1.0);
        eta *= 1.5;
    }
    if iterations == 0 {
        grad_map = 0.0;
    }

    let fantope = FantopeMatrix::new(m, r)?;
    let extracted = extract_basis(&fantope, r)?;
    let kind = if grad_map <= opts.bound_tol {
        BoundKind::Converged
    } else {
        BoundKind::Heuristic
    };
    let report = FitReport {
        method: Method::TpcaRelax,
        basis: extracted.basis,
        components: alloc::vec![ComponentFit {
            objective: f,
            objective_trace: trace,
            iterations,
            converged,
            kkt_residual: grad_map,
            step_size: eta,
            backtracks,
            start: 0,
        }],
        upper_bound: Some(UpperBound {
            value: f + gap,
            kind,
            relaxed_objective: f,
            duality_gap: gap,
            gradient_mapping_norm: grad_map,
        }),
        eigenvalue_tie: extracted.tie,
    };
    Ok(RelaxSolution {
        fantope,
        report,
        duality_gap: gap,
    })
}

#[derive(Debug, Clone)]
pub struct ExtractedBasis {
    pub basis: OrthonormalBasis,
    /// Eigenvalues `r` and `r + 1` of `M` coincide, so the span is not
    /// determined by `M`.
    pub tie: bool,
}

/// Tolerance under which eigenvalues `r` and `r + 1` count as tied.
pub const TIE_TOL: f64 = 1e-9;

/// The `r` dominant eigenvectors of `M`.
pub fn extract_basis(m: &FantopeMatrix, r: usize) -> Result<ExtractedBasis> {
    let d = m.matrix().rows();
    if r == 0 || r > d {
        return Err(invalid(format!("need 1 <= r <= d = {d}, got r = {r}")));
    }
    let eig = linalg::symmetric_eigen(m.matrix());
    let cols: Vec<Vec<f64>> = (0..r).map(|k| eig.vector(k)).collect();
    let tie = r < d && (eig.values[r - 1] - eig.values[r]).abs() <= TIE_TOL;
    Ok(ExtractedBasis {
        basis: OrthonormalBasis::new(Matrix::from_columns(&cols))?,
        tie,
    })
}

/// Constraint violations of a candidate `M` for the rank-`r` problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub asymmetry: f64,
    /// `|trace M − r|`.
    pub trace_violation: f64,
    /// `max(0, −λ_min)`.
    pub psd_violation: f64,
    /// `max(0, λ_max − 1)`.
    pub cap_violation: f64,
    /// Largest distance of the spectrum from `{1 (×r), 0 (×(d−r))}`.
    pub rank_violation: f64,
    /// Eigenvalues of the symmetric part, descending.
    pub eigenvalues: Vec<f64>,
}

impl Feasibility {
    /// Trace, PSD and cap constraints all hold within `tol`.
    pub fn relaxed_feasible(&self, tol: f64) -> bool {
        self.asymmetry <= tol
            && self.trace_violation <= tol
            && self.psd_violation <= tol
            && self.cap_violation <= tol
    }

    /// All constraints of the rank-constrained problem hold within `tol`.
    pub fn rank_feasible(&self, tol: f64) -> bool {
        self.relaxed_feasible(tol) && self.rank_violation <= tol
    }
}

pub fn feasibility_check(m: &Matrix, r: usize, _tol: f64) -> Result<Feasibility> {
    check_square_rank(m, r)?;
    let asymmetry = m.max_abs_diff(&m.transpose());
    let eig = linalg::symmetric_eigen(m);
    let values = eig.values;
    let rank_violation = values
        .iter()
        .enumerate()
        .map(|(k, &l)| if k < r { (l - 1.0).abs() } else { l.abs() })
        .fold(0.0, f64::max);
    Ok(Feasibility {
        asymmetry,
        trace_violation: (m.trace() - r as f64).abs(),
        psd_violation: (-values[values.len() - 1]).max(0.0),
        cap_violation: (values[0] - 1.0).max(0.0),
        rank_violation,
        eigenvalues: values,
    })
}
