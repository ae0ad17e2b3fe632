#![allow(dead_code)]

use infoproj_core::linalg::{orthonormalize_columns, Matrix};
use infoproj_core::synth::NormalSampler;
use infoproj_core::{center, DataMatrix, UnitVector};

/// Centered `n × d` matrix of standard normal entries, each column scaled by
/// the matching entry of `scales` (cycled).
pub fn gaussian_data(seed: u64, n: usize, d: usize, scales: &[f64]) -> DataMatrix {
    let mut rng = NormalSampler::new(seed);
    let values: Vec<f64> = (0..n * d)
        .map(|k| scales[(k % d) % scales.len()] * rng.standard_normal())
        .collect();
    center(&DataMatrix::new(Matrix::from_vec(n, d, values)).unwrap()).unwrap()
}

/// Like [`gaussian_data`] but without centering.
pub fn raw_gaussian_data(seed: u64, n: usize, d: usize, scales: &[f64]) -> DataMatrix {
    let mut rng = NormalSampler::new(seed);
    let values: Vec<f64> = (0..n * d)
        .map(|k| scales[(k % d) % scales.len()] * rng.standard_normal())
        .collect();
    DataMatrix::new(Matrix::from_vec(n, d, values)).unwrap()
}

pub fn random_unit(rng: &mut NormalSampler, d: usize) -> UnitVector {
    rng.unit_vector(d)
}

/// `d × r` matrix with orthonormal columns drawn from the Gaussian ensemble.
pub fn random_orthonormal(rng: &mut NormalSampler, d: usize, r: usize) -> Matrix {
    loop {
        let cols: Vec<Vec<f64>> = (0..r)
            .map(|_| (0..d).map(|_| rng.standard_normal()).collect())
            .collect();
        if let Some(q) = orthonormalize_columns(&Matrix::from_columns(&cols)) {
            return q;
        }
    }
}

pub fn random_symmetric(rng: &mut NormalSampler, d: usize, scale: f64) -> Matrix {
    let a = Matrix::from_vec(
        d,
        d,
        (0..d * d).map(|_| scale * rng.standard_normal()).collect(),
    );
    a.add(&a.transpose()).scale(0.5)
}

/// Random Fantope point `Q diag(μ) Qᵀ` with `μ ∈ [0,1]`, `Σμ = r`.
pub fn random_fantope(rng: &mut NormalSampler, d: usize, r: usize) -> Matrix {
    let q = random_orthonormal(rng, d, d);
    // start at r/d and move mass between random pairs while staying in [0, 1]
    let mut mu = vec![r as f64 / d as f64; d];
    for _ in 0..4 * d {
        let i = (rng.uniform() * d as f64) as usize % d;
        let j = (rng.uniform() * d as f64) as usize % d;
        if i == j {
            continue;
        }
        let room = mu[i].min(1.0 - mu[j]);
        let t = rng.uniform() * room;
        mu[i] -= t;
        mu[j] += t;
    }
    let mut m = Matrix::zeros(d, d);
    for (k, &mk) in mu.iter().enumerate() {
        infoproj_core::linalg::add_outer(&mut m, &q.column(k), mk);
    }
    m.symmetrized()
}

/// Largest principal angle between the column spans of two orthonormal
/// matrices of equal rank, via the spectral norm of `(I − BBᵀ)A`.
pub fn span_angle(a: &Matrix, b: &Matrix) -> f64 {
    let residual = a.sub(&b.matmul(&b.transpose().matmul(a)));
    let eig = infoproj_core::linalg::symmetric_eigen(&residual.gram());
    eig.values[0].max(0.0).sqrt().min(1.0).asin()
}

/// Angle between the lines spanned by `a` and `b`.
pub fn vector_angle(a: &[f64], b: &[f64]) -> f64 {
    let c: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let off: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - c * y).powi(2))
        .sum::<f64>()
        .sqrt();
    off.atan2(c.abs())
}
