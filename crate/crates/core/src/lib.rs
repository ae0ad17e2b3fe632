//! # infoproj-core
//!
//! Projection indices that measure how much a linear projection of a dataset
//! tells a particular user, given what that user already believes about the
//! data.
//!
//! Two belief models are supported:
//!
//! - **Gaussian beliefs** (an expected average squared norm). The most
//!   informative projections are exactly the principal components; see
//!   [`pca`].
//! - **Heavy-tailed beliefs** (an expected order of magnitude of the norms,
//!   giving a multivariate-t background). Maximizing the information content
//!   becomes `max Σᵢ log(ρ + (xᵢ'w)²)` over unit `w`, a robust PCA variant
//!   referred to as *t-PCA*. It is solved by a modified power method
//!   ([`power`]) and by a convex relaxation over the Fantope ([`relax`]).
//!
//! The information content values themselves live in [`sic`], the special
//! functions they need in [`special`], small-instance brute-force references
//! in [`oracle`], and seeded synthetic workloads in [`synth`].
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the
//! command-line tool live in the companion `infoproj` crate.
//!
//! ```
//! use infoproj_core::{DataMatrix, power::{fit_tpca_power, PowerOptions}};
//!
//! let x = DataMatrix::from_rows(&[
//!     [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0],
//! ])?;
//! let fit = fit_tpca_power(&x, 1.0, 1, &PowerOptions::default())?;
//! let w = fit.basis.column(0);
//! assert!((w[0].abs() - 0.5f64.sqrt()).abs() < 1e-3);
//! # Ok::<(), infoproj_core::Error>(())
//! ```

#![no_std]
#![warn(missing_debug_implementations)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;

pub mod data;
pub mod linalg;
pub mod oracle;
pub mod pca;
pub mod power;
pub mod relax;
pub mod sic;
pub mod special;
pub mod synth;

pub use data::{
    center, scale_measure, validate_orthonormal, DataMatrix, OrthonormalBasis, Orthonormality,
    SicParams, TailPrior, UnitVector,
};
pub use error::{Error, Result};
pub use linalg::{Matrix, SymmetricEigen};
pub use power::{ComponentFit, FitReport, Method, PowerOptions, StepSize};
pub use relax::{FantopeMatrix, RelaxOptions};
pub use sic::SicValue;
