//! PCA as the exact maximizer of the Gaussian-belief SIC.
//!
//! For a fixed resolution the Gaussian SIC of `W` only varies through
//! `trace(WᵀX̂ᵀX̂W)`, so the most informative `r`-dimensional projection is
//! spanned by the top `r` eigenvectors of the scatter matrix.

use alloc::format;
use alloc::vec::Vec;

use crate::data::{DataMatrix, OrthonormalBasis};
use crate::error::{invalid, Result};
use crate::linalg::{self, Matrix};

/// The scatter matrix `X̂ᵀX̂` (not divided by `n`).
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterMatrix(Matrix);

impl ScatterMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

pub fn scatter(x: &DataMatrix) -> ScatterMatrix {
    ScatterMatrix(x.values().gram())
}

#[derive(Debug, Clone)]
pub struct PrincipalComponents {
    pub basis: OrthonormalBasis,
    /// Top `r` eigenvalues of the scatter matrix, descending.
    pub eigenvalues: Vec<f64>,
}

/// The `r` dominant eigenvectors of `X̂ᵀX̂`, each with its largest-magnitude
/// entry positive.
pub fn top_components(x: &DataMatrix, r: usize) -> Result<PrincipalComponents> {
    if r == 0 || r > x.d() {
        return Err(invalid(format!(
            "need 1 <= r <= d = {}, got r = {r}",
            x.d()
        )));
    }
    let eig = linalg::symmetric_eigen(scatter(x).matrix());
    let cols: Vec<Vec<f64>> = (0..r).map(|k| eig.vector(k)).collect();
    Ok(PrincipalComponents {
        basis: OrthonormalBasis::new(Matrix::from_columns(&cols))?,
        eigenvalues: eig.values[..r].to_vec(),
    })
}
