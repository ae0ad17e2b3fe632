//! # infoproj
//!
//! File formats, JSON reports, and the `infoproj` command-line tool built on
//! [`infoproj_core`].
//!
//! ```text
//! infoproj gen --variant outlier-pair --seed 7 --out pair.csv
//! infoproj fit --input pair.csv --has-header --label-last --method tpca-power --rho 1
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod csvio;
mod error;
pub mod report;
pub mod run;

pub use error::{Error, Result};
