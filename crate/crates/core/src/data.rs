//! Dataset representation and the small value types shared by every solver.
//!
//! Rows are data points throughout: an `n × d` matrix holds `n` points in
//! `d` dimensions.

use alloc::format;
use alloc::vec::Vec;

use libm::sqrt;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Matrix};
use crate::special;

/// An `n × d` matrix of observations with `n, d ≥ 1` and finite entries.
///
/// `is_centered` is computed from the data, never asserted by the caller: a
/// column counts as centered when its mean is at most `1e-9` times its RMS
/// (or `1e-12` in absolute terms for an all-zero column).
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Matrix,
    centered: bool,
}

impl DataMatrix {
    pub fn new(values: Matrix) -> Result<Self> {
        if values.rows() == 0 || values.cols() == 0 {
            return Err(invalid(format!(
                "data must have at least one row and column, got {}x{}",
                values.rows(),
                values.cols()
            )));
        }
        if let Some(pos) = values.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!(
                "non-finite entry at row {}, column {}",
                pos / values.cols(),
                pos % values.cols()
            )));
        }
        let centered = columns_centered(&values);
        Ok(Self { values, centered })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        if let Some(first) = rows.first() {
            let d = first.as_ref().len();
            if let Some(i) = rows.iter().position(|r| r.as_ref().len() != d) {
                return Err(invalid(format!("row {i} has a different length")));
            }
        }
        Self::new(Matrix::from_rows(rows))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.values.rows()
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.values.cols()
    }

    #[inline]
    pub fn values(&self) -> &Matrix {
        &self.values
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values.row_iter()
    }

    #[inline]
    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub fn into_matrix(self) -> Matrix {
        self.values
    }

    /// Projections `X̂w`, one per row.
    pub fn project(&self, w: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(w.len())?;
        Ok(self.rows().map(|r| linalg::dot(r, w)).collect())
    }

    /// The projected coordinates `X̂W` as an `n × r` matrix.
    pub fn project_basis(&self, basis: &OrthonormalBasis) -> Result<Matrix> {
        self.check_dim(basis.d())?;
        Ok(self.values.matmul(basis.matrix()))
    }

    /// Keeps the listed rows in order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let rows: Vec<&[f64]> = indices.iter().map(|&i| self.row(i)).collect();
        Self::from_rows(&rows)
    }

    pub(crate) fn check_dim(&self, len: usize) -> Result<()> {
        if len == self.d() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.d(),
                found: len,
            })
        }
    }
}

fn columns_centered(m: &Matrix) -> bool {
    let n = m.rows() as f64;
    (0..m.cols()).all(|j| {
        let (sum, sq) = m
            .row_iter()
            .map(|r| r[j])
            .fold((0.0, 0.0), |(s, q), v| (s + v, q + v * v));
        let mean = sum / n;
        let rms = sqrt(sq / n);
        if rms == 0.0 {
            mean.abs() <= 1e-12
        } else {
            mean.abs() <= 1e-9 * rms
        }
    })
}

/// Subtracts the column means.
pub fn center(x: &DataMatrix) -> Result<DataMatrix> {
    let n = x.n() as f64;
    let d = x.d();
    let mut means = alloc::vec![0.0; d];
    for r in x.rows() {
        for (m, v) in means.iter_mut().zip(r) {
            *m += v;
        }
    }
    for m in means.iter_mut() {
        *m /= n;
    }
    let mut values = x.values.clone();
    for i in 0..x.n() {
        for (v, m) in values.row_mut(i).iter_mut().zip(&means) {
            *v -= m;
        }
    }
    DataMatrix::new(values)
}

/// `sqrt((1/n) Σᵢ x̂ᵢ'x̂ᵢ)`; zero for all-zero data.
pub fn scale_measure(x: &DataMatrix) -> f64 {
    let total: f64 = x.rows().map(|r| linalg::dot(r, r)).sum();
    sqrt(total / x.n() as f64)
}

/// Outcome of [`validate_orthonormal`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orthonormality {
    pub ok: bool,
    /// `‖WᵀW − I‖_max`.
    pub deviation: f64,
}

pub fn validate_orthonormal(w: &Matrix, tol: f64) -> Result<Orthonormality> {
    if w.cols() > w.rows() {
        return Err(invalid(format!(
            "{} columns cannot be orthonormal in dimension {}",
            w.cols(),
            w.rows()
        )));
    }
    if !w.is_finite() {
        return Err(invalid("basis has non-finite entries"));
    }
    let deviation = w.gram().max_abs_diff(&Matrix::identity(w.cols()));
    Ok(Orthonormality {
        ok: deviation <= tol,
        deviation,
    })
}

const UNIT_TOL: f64 = 1e-10;
const BASIS_TOL: f64 = 1e-9;

/// A direction `w` with `|‖w‖ − 1| ≤ 1e-10`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        let nrm = linalg::norm(&w);
        if w.is_empty() || !nrm.is_finite() || (nrm - 1.0).abs() > UNIT_TOL {
            return Err(invalid(format!("expected a unit vector, norm is {nrm}")));
        }
        Ok(Self(w))
    }

    /// Rescales a nonzero vector to unit length.
    pub fn normalized(mut w: Vec<f64>) -> Result<Self> {
        let nrm = linalg::norm(&w);
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        for x in w.iter_mut() {
            *x /= nrm;
        }
        Ok(Self(w))
    }

    /// The `i`-th standard basis vector of `ℝᵈ`.
    pub fn axis(d: usize, i: usize) -> Self {
        let mut w = alloc::vec![0.0; d];
        w[i] = 1.0;
        Self(w)
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl core::ops::Neg for UnitVector {
    type Output = UnitVector;

    fn neg(self) -> UnitVector {
        UnitVector(self.0.into_iter().map(|x| -x).collect())
    }
}

impl AsRef<[f64]> for UnitVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A `d × r` matrix with orthonormal columns, `1 ≤ r ≤ d`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis(Matrix);

impl OrthonormalBasis {
    pub fn new(w: Matrix) -> Result<Self> {
        if w.cols() == 0 {
            return Err(invalid("a basis needs at least one column"));
        }
        let check = validate_orthonormal(&w, BASIS_TOL)?;
        if !check.ok {
            return Err(invalid(format!(
                "columns are not orthonormal (deviation {:e})",
                check.deviation
            )));
        }
        Ok(Self(w))
    }

    pub fn from_columns(columns: &[UnitVector]) -> Result<Self> {
        let cols: Vec<&[f64]> = columns.iter().map(UnitVector::as_slice).collect();
        Self::new(Matrix::from_columns(&cols))
    }

    /// Gram–Schmidt re-orthonormalization of nearly orthonormal columns.
    pub fn orthonormalize(w: &Matrix) -> Result<Self> {
        let q = linalg::orthonormalize_columns(w)
            .ok_or_else(|| invalid("columns are linearly dependent"))?;
        Self::new(q)
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.0.rows()
    }

    #[inline]
    pub fn r(&self) -> usize {
        self.0.cols()
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.0.column(j)
    }

    pub fn unit_column(&self, j: usize) -> UnitVector {
        UnitVector(self.0.column(j))
    }

    /// `WWᵀ`.
    pub fn projector(&self) -> Matrix {
        self.0.matmul(&self.0.transpose())
    }

    /// `x'WW'x = ‖Wᵀx‖²` for every row of `x`.
    pub fn captured_norms(&self, x: &DataMatrix) -> Result<Vec<f64>> {
        let p = x.project_basis(self)?;
        Ok(p.row_iter().map(|r| linalg::dot(r, r)).collect())
    }
}

/// How the user expresses their heavy-tailed prior: directly through the
/// degrees of freedom `ν`, or through the expectation `c` with `ν = κ⁻¹(c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailPrior {
    Nu(f64),
    Expectation(f64),
}

/// Prior-belief and display parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SicParams {
    /// Gaussian prior scale σ.
    pub sigma: f64,
    /// t prior scale ρ.
    pub rho: f64,
    pub tail: TailPrior,
    /// Plot resolution per projected axis.
    pub deltas: Vec<f64>,
}

impl SicParams {
    pub fn new(sigma: f64, rho: f64, tail: TailPrior, deltas: Vec<f64>) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(invalid(format!("sigma must be positive, got {sigma}")));
        }
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(invalid(format!("rho must be nonnegative, got {rho}")));
        }
        match tail {
            TailPrior::Nu(v) | TailPrior::Expectation(v) if !(v > 0.0) || !v.is_finite() => {
                return Err(invalid(format!("tail parameter must be positive, got {v}")));
            }
            _ => {}
        }
        if deltas.is_empty() || deltas.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
            return Err(invalid("resolutions must be positive"));
        }
        Ok(Self {
            sigma,
            rho,
            tail,
            deltas,
        })
    }

    /// Degrees of freedom for data of dimension `d`.
    pub fn nu(&self, d: usize) -> Result<f64> {
        match self.tail {
            TailPrior::Nu(nu) => Ok(nu),
            TailPrior::Expectation(c) => special::kappa_inverse(c, d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn dm<const D: usize>(rows: &[[f64; D]]) -> DataMatrix {
        DataMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn center_subtracts_means() {
        let c = center(&dm(&[[1.0, 0.0], [3.0, 0.0]])).unwrap();
        assert_eq!(c.values(), &Matrix::from_rows(&[[-1.0, 0.0], [1.0, 0.0]]));
        assert!(c.is_centered());
    }

    #[test]
    fn center_single_row_is_zero() {
        let c = center(&dm(&[[5.0, 2.0]])).unwrap();
        assert_eq!(c.row(0), &[0.0, 0.0]);
        assert!(c.is_centered());
    }

    #[test]
    fn center_leaves_centered_data_alone() {
        let x = dm(&[[1.0, -2.0], [-1.0, 2.0], [0.5, 0.0], [-0.5, 0.0]]);
        assert!(x.is_centered());
        let c = center(&x).unwrap();
        assert!(c.values().max_abs_diff(x.values()) <= 1e-12);
    }

    #[test]
    fn centered_flag_is_relative_to_column_scale() {
        // mean 1 on a column of magnitude 1e12 is within 1e-9 RMS
        let x = dm(&[[1e12 + 1.0], [-1e12 + 1.0]]);
        assert!(x.is_centered());
        assert!(!dm(&[[1.0], [2.0]]).is_centered());
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(DataMatrix::from_rows(&[[f64::NAN, 0.0]]).is_err());
        assert!(DataMatrix::from_rows::<[f64; 2]>(&[]).is_err());
        assert!(DataMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn scale_measure_examples() {
        assert_eq!(scale_measure(&dm(&[[3.0, 4.0]])), 5.0);
        assert_eq!(scale_measure(&dm(&[[1.0, 0.0], [0.0, 1.0]])), 1.0);
        assert!((scale_measure(&dm(&[[2.0, 0.0], [0.0, 0.0]])) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(scale_measure(&dm(&[[0.0, 0.0]])), 0.0);
    }

    #[test]
    fn orthonormality_examples() {
        let id = Matrix::from_columns(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let ok = validate_orthonormal(&id, 1e-9).unwrap();
        assert!(ok.ok);
        assert_eq!(ok.deviation, 0.0);

        let rep = Matrix::from_columns(&[[1.0, 0.0], [1.0, 0.0]]);
        assert!(!validate_orthonormal(&rep, 1e-9).unwrap().ok);

        let (s, c) = (0.5, 0.75f64.sqrt());
        let rot = Matrix::from_columns(&[[c, s], [-s, c]]);
        assert!(validate_orthonormal(&rot, 1e-9).unwrap().ok);

        let wide = Matrix::zeros(2, 3);
        assert!(matches!(
            validate_orthonormal(&wide, 1e-9),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn unit_vector_checks_norm() {
        assert!(UnitVector::new(vec![1.0, 0.0]).is_ok());
        assert!(UnitVector::new(vec![1.0, 1e-4]).is_err());
        assert!(UnitVector::normalized(vec![0.0, 0.0]).is_err());
        let w = UnitVector::normalized(vec![3.0, 4.0]).unwrap();
        assert_eq!(w.as_slice(), &[0.6, 0.8]);
    }

    #[test]
    fn sic_params_validation() {
        assert!(SicParams::new(1.0, 0.0, TailPrior::Nu(1.0), vec![1.0]).is_ok());
        assert!(SicParams::new(0.0, 1.0, TailPrior::Nu(1.0), vec![1.0]).is_err());
        assert!(SicParams::new(1.0, -1.0, TailPrior::Nu(1.0), vec![1.0]).is_err());
        assert!(SicParams::new(1.0, 1.0, TailPrior::Expectation(0.0), vec![1.0]).is_err());
        assert!(SicParams::new(1.0, 1.0, TailPrior::Nu(1.0), vec![1.0, 0.0]).is_err());
        let p = SicParams::new(1.0, 1.0, TailPrior::Expectation(0.5), vec![1.0]).unwrap();
        assert!((p.nu(2).unwrap() - 4.0).abs() < 1e-8);
    }
}
