//! Brute-force references for small instances.
//!
//! On each cell `{w : sign(X̂w) = s}` the t-PCA objective is concave, and the
//! number of such cells for `n` points in general position in `ℝᵈ` is
//! [`cover_count`]. In two dimensions the cells are arcs between the normals
//! of the data points, which [`enumerate_dichotomies_2d`] sweeps directly.
//! [`grid_best_w`] maximizes the objective over a dense set of directions.

use alloc::format;
use alloc::vec::Vec;

use core::f64::consts::PI;
use libm::{atan2, cos, sin, sqrt};

use crate::data::{DataMatrix, UnitVector};
use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::sic::{check_rho, objective_from_projections};

/// A sign pattern with entries in `{−1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(s: Vec<i8>) -> Result<Self> {
        if s.iter().any(|&v| v != 1 && v != -1) {
            return Err(invalid("sign vector entries must be +1 or -1"));
        }
        Ok(Self(s))
    }

    /// `sign(X̂w)`, or `None` if some projection is zero.
    pub fn of(x: &DataMatrix, w: &[f64]) -> Result<Option<Self>> {
        let p = x.project(w)?;
        if p.contains(&0.0) {
            return Ok(None);
        }
        Ok(Some(Self(
            p.iter().map(|&v| if v > 0.0 { 1 } else { -1 }).collect(),
        )))
    }

    #[inline]
    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|v| -v).collect())
    }
}

/// `2 Σ_{k<d} C(n−1, k)`, the number of dichotomies of `n` points in general
/// position in `ℝᵈ` realizable by a hyperplane through the origin.
pub fn cover_count(n: u64, d: u64) -> Result<u128> {
    if n == 0 || d == 0 {
        return Err(invalid("cover_count needs n >= 1 and d >= 1"));
    }
    if n > 60 {
        return Err(Error::OutOfRange(format!(
            "cover_count is limited to n <= 60, got {n}"
        )));
    }
    let m = n - 1;
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for k in 0..d.min(m + 1) {
        if k > 0 {
            binom = binom * u128::from(m - k + 1) / u128::from(k);
        }
        total += binom;
    }
    Ok(2 * total)
}

/// One open cell of directions with a constant sign pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Dichotomy {
    pub signs: SignVector,
    /// A direction inside the cell.
    pub witness: UnitVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dichotomies {
    pub cells: Vec<Dichotomy>,
    /// Some rows are parallel, so fewer than `cover_count(n, 2)` cells exist.
    pub degenerate: bool,
}

/// Angles closer than this are treated as one critical angle.
pub const ANGLE_MERGE_TOL: f64 = 1e-12;

/// Every sign pattern `sign(X̂w)` over unit `w ∈ ℝ²` with no zero entry.
pub fn enumerate_dichotomies_2d(x: &DataMatrix) -> Result<Dichotomies> {
    if x.d() != 2 {
        return Err(invalid(format!(
            "dichotomy sweep needs d = 2, got {}",
            x.d()
        )));
    }
    // w ⟂ x̂ᵢ at angle atan2(x̂ᵢ) + π/2, taken modulo π
    let mut angles = Vec::with_capacity(x.n());
    for (i, row) in x.rows().enumerate() {
        if row[0] == 0.0 && row[1] == 0.0 {
            return Err(invalid(format!("row {i} is zero")));
        }
        let mut a = atan2(row[1], row[0]) + PI / 2.0;
        while a >= PI {
            a -= PI;
        }
        while a < 0.0 {
            a += PI;
        }
        angles.push(a);
    }
    angles.sort_by(f64::total_cmp);
    let mut critical: Vec<f64> = Vec::with_capacity(angles.len());
    for a in angles {
        match critical.last() {
            Some(&last) if a - last <= ANGLE_MERGE_TOL => {}
            _ => critical.push(a),
        }
    }
    // the last angle may sit just below π, next to the first one at 0
    if critical.len() > 1 && critical[0] + PI - critical[critical.len() - 1] <= ANGLE_MERGE_TOL {
        critical.pop();
    }

    let m = critical.len();
    let mut cells = Vec::with_capacity(2 * m);
    for k in 0..m {
        let next = if k + 1 < m {
            critical[k + 1]
        } else {
            critical[0] + PI
        };
        let mid = 0.5 * (critical[k] + next);
        let w = [cos(mid), sin(mid)];
        let signs =
            SignVector::of(x, &w)?.ok_or_else(|| invalid("cell midpoint lies on a data normal"))?;
        let neg = [-w[0], -w[1]];
        cells.push(Dichotomy {
            signs: signs.negated(),
            witness: UnitVector::normalized(neg.to_vec())?,
        });
        cells.push(Dichotomy {
            signs,
            witness: UnitVector::normalized(w.to_vec())?,
        });
    }
    Ok(Dichotomies {
        cells,
        degenerate: m < x.n(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridOptimum {
    pub w: UnitVector,
    pub objective: f64,
}

pub const MIN_GRID_RESOLUTION: usize = 1000;

/// Best direction for `Σᵢ log(ρ + (x̂ᵢ'w)²)` over a grid of unit vectors.
///
/// For `d = 2` the grid is the angles `kπ/resolution`, `k < resolution`, so
/// doubling the resolution refines the previous grid. For `d = 3` it is a
/// Fibonacci lattice of `resolution` points on the upper hemisphere. Ties go
/// to the earliest grid point.
pub fn grid_best_w(x: &DataMatrix, rho: f64, resolution: usize) -> Result<GridOptimum> {
    check_rho(rho)?;
    if resolution < MIN_GRID_RESOLUTION {
        return Err(invalid(format!(
            "grid resolution must be at least {MIN_GRID_RESOLUTION}, got {resolution}"
        )));
    }
    let d = x.d();
    let point = |k: usize| -> [f64; 3] {
        if d == 2 {
            let t = k as f64 * PI / resolution as f64;
            [cos(t), sin(t), 0.0]
        } else {
            let golden = PI * (3.0 - sqrt(5.0));
            let z = 1.0 - (k as f64 + 0.5) / resolution as f64;
            let radius = sqrt((1.0 - z * z).max(0.0));
            let phi = k as f64 * golden;
            [radius * cos(phi), radius * sin(phi), z]
        }
    };
    match d {
        2 | 3 => {}
        _ => {
            return Err(Error::Unsupported(format!(
                "grid search supports d = 2 or 3, got {d}"
            )))
        }
    }

    let mut p = alloc::vec![0.0; x.n()];
    let mut best = (f64::NEG_INFINITY, 0usize);
    for k in 0..resolution {
        let w = point(k);
        for (pi, row) in p.iter_mut().zip(x.rows()) {
            *pi = linalg::dot(row, &w[..d]);
        }
        let f = objective_from_projections(&p, rho);
        if f > best.0 || k == 0 {
            best = (f, k);
        }
    }
    let w = point(best.1);
    Ok(GridOptimum {
        w: UnitVector::normalized(w[..d].to_vec())?,
        objective: best.0,
    })
}
