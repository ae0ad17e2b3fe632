//! Small dense linear algebra: a row-major matrix and a cyclic Jacobi
//! eigensolver for symmetric matrices.
//!
//! The matrices handled here are `d × d` with `d` in the tens to low
//! hundreds, so Jacobi's `O(d³)` sweeps are cheap and its high relative
//! accuracy on small eigenvalues is worth more than raw speed.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use libm::sqrt;

/// Dense row-major `f64` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds a matrix from a row-major buffer.
    ///
    /// # Panics
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "buffer does not match shape");
        Self { rows, cols, data }
    }

    /// Builds a matrix from equally long rows.
    ///
    /// # Panics
    ///
    /// Panics on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Self {
        let rows = columns.first().map_or(0, |c| c.as_ref().len());
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            assert_eq!(c.len(), rows, "ragged columns");
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        // chunks_exact panics on a zero chunk size
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// # Panics
    ///
    /// Panics on incompatible shapes.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "incompatible shapes");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "incompatible shapes");
        self.row_iter().map(|r| dot(r, v)).collect()
    }

    /// `AᵀA`, the Gram matrix of the columns.
    pub fn gram(&self) -> Self {
        let mut g = Self::zeros(self.cols, self.cols);
        for r in self.row_iter() {
            add_outer(&mut g, r, 1.0);
        }
        g
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius inner product `⟨A, B⟩ = trace(AᵀB)`.
    pub fn frobenius_dot(&self, other: &Self) -> f64 {
        dot(&self.data, &other.data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        sqrt(self.frobenius_dot(self))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    /// `(A + Aᵀ) / 2`.
    pub fn symmetrized(&self) -> Self {
        assert_eq!(self.rows, self.cols, "matrix is not square");
        let mut s = self.clone();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        s
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

/// `m += s · v vᵀ`.
pub fn add_outer(m: &mut Matrix, v: &[f64], s: f64) {
    let d = v.len();
    for i in 0..d {
        let si = s * v[i];
        if si == 0.0 {
            continue;
        }
        let row = m.row_mut(i);
        for j in 0..d {
            row[j] += si * v[j];
        }
    }
}

/// Flips `v` so that its largest-magnitude entry is positive. The first
/// index wins among exactly equal magnitudes.
pub fn canonical_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// `values` are sorted in descending order; `vectors` holds the matching
/// unit eigenvectors as columns, each with its largest-magnitude entry
/// positive. Equal eigenvalues keep the order in which Jacobi produced them,
/// so an already-diagonal input yields the standard basis in index order.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl SymmetricEigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }

    /// Reassembles `V diag(f(λ)) Vᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let mut out = Matrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let mu = f(lambda);
            if mu == 0.0 {
                continue;
            }
            add_outer(&mut out, &self.vector(k), mu);
        }
        out
    }
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition of the symmetric part of `a`.
///
/// # Panics
///
/// Panics if `a` is not square.
pub fn symmetric_eigen(a: &Matrix) -> SymmetricEigen {
    let n = a.rows();
    assert_eq!(n, a.cols(), "matrix is not square");
    let mut m = a.symmetrized();
    let mut v = Matrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let total = m.frobenius_dot(&m);
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off == 0.0 || off <= 1e-36 * total {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let t = 1.0 / (theta.abs() + sqrt(theta * theta + 1.0));
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                rotate_columns(&mut m, p, q, c, s);
                rotate_rows(&mut m, p, q, c, s);
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                rotate_columns(&mut v, p, q, c, s);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep Jacobi order
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));

    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut col = v.column(i);
        canonical_sign(&mut col);
        for (r, x) in col.into_iter().enumerate() {
            vectors[(r, k)] = x;
        }
    }
    SymmetricEigen { values, vectors }
}

fn rotate_columns(m: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..m.rows() {
        let a = m[(k, p)];
        let b = m[(k, q)];
        m[(k, p)] = c * a - s * b;
        m[(k, q)] = s * a + c * b;
    }
}

fn rotate_rows(m: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..m.cols() {
        let a = m[(p, k)];
        let b = m[(q, k)];
        m[(p, k)] = c * a - s * b;
        m[(q, k)] = s * a + c * b;
    }
}

/// Modified Gram–Schmidt, applied twice, on the columns of `a`.
///
/// Returns `None` if a column is (numerically) dependent on its
/// predecessors.
pub fn orthonormalize_columns(a: &Matrix) -> Option<Matrix> {
    let mut cols: Vec<Vec<f64>> = (0..a.cols()).map(|j| a.column(j)).collect();
    for j in 0..cols.len() {
        let original = norm(&cols[j]);
        for _ in 0..2 {
            for k in 0..j {
                let proj = dot(&cols[j], &cols[k]);
                let (done, rest) = cols.split_at_mut(j);
                for (x, y) in rest[0].iter_mut().zip(&done[k]) {
                    *x -= proj * y;
                }
            }
        }
        let nrm = norm(&cols[j]);
        if !(nrm > 1e-12 * original.max(f64::MIN_POSITIVE)) {
            return None;
        }
        for x in cols[j].iter_mut() {
            *x /= nrm;
        }
    }
    Some(Matrix::from_columns(&cols))
}
