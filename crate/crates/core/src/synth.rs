//! Seeded synthetic datasets.
//!
//! Two designs are provided:
//!
//! - [`gen_two_scale_gaussians`]: two zero-mean diagonal-covariance Gaussian
//!   populations in `d` dimensions whose per-axis variances are χ²₁ draws,
//!   with one population's covariance multiplied by `scale_factor`.
//! - [`gen_outlier_pair`]: 1000 inliers from `N(0, [[4,0],[0,1]])` and 100
//!   outliers from `N(0, [[16,12],[12,13]])`.
//!
//! Uniform bits come from ChaCha8 seeded with [`SeedableRng::seed_from_u64`];
//! normals use the Box–Muller transform evaluated with `libm`, so a seed
//! produces the same bytes on every platform.

use alloc::format;
use alloc::vec::Vec;

use core::f64::consts::PI;
use libm::{cos, log, sin, sqrt};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::data::{center, DataMatrix, UnitVector};
use crate::error::{invalid, Result};
use crate::linalg::Matrix;

/// Standard normal draws via Box–Muller, using both outputs of each pair.
#[derive(Debug, Clone)]
pub struct NormalSampler {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - U lies in (0, 1], keeping the log finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = sqrt(-2.0 * log(u1));
        let angle = 2.0 * PI * u2;
        self.spare = Some(radius * sin(angle));
        radius * cos(angle)
    }

    /// A direction drawn uniformly from the unit sphere in `ℝᵈ`.
    pub fn unit_vector(&mut self, d: usize) -> UnitVector {
        loop {
            let v: Vec<f64> = (0..d).map(|_| self.standard_normal()).collect();
            if let Ok(u) = UnitVector::normalized(v) {
                return u;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    TwoScale,
    OutlierPair,
}

/// Parameters of a synthetic dataset.
///
/// For [`Variant::TwoScale`], `n_large` is the size of the majority
/// population and `n_small` of the minority. `scale_minority` selects which
/// of the two has its covariance multiplied by `scale_factor`. For
/// [`Variant::OutlierPair`], `n_large` counts inliers, `n_small` outliers,
/// `d` must be 2, and the scale settings are unused.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub seed: u64,
    pub variant: Variant,
    pub n_large: usize,
    pub n_small: usize,
    pub d: usize,
    pub scale_factor: f64,
    pub scale_minority: bool,
}

impl SynthSpec {
    /// 8000 + 2000 points in 100 dimensions, minority scaled by 100.
    pub fn two_scale(seed: u64) -> Self {
        Self {
            seed,
            variant: Variant::TwoScale,
            n_large: 8000,
            n_small: 2000,
            d: 100,
            scale_factor: 100.0,
            scale_minority: true,
        }
    }

    /// 800 + 200 points in 20 dimensions.
    pub fn two_scale_desk(seed: u64) -> Self {
        Self {
            n_large: 800,
            n_small: 200,
            d: 20,
            ..Self::two_scale(seed)
        }
    }

    pub fn outlier_pair(seed: u64) -> Self {
        Self {
            seed,
            variant: Variant::OutlierPair,
            n_large: 1000,
            n_small: 100,
            d: 2,
            scale_factor: 1.0,
            scale_minority: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_large == 0 || self.n_small == 0 || self.d == 0 {
            return Err(invalid("synthetic counts and dimension must be >= 1"));
        }
        if !(self.scale_factor > 0.0) || !self.scale_factor.is_finite() {
            return Err(invalid(format!(
                "scale factor must be positive, got {}",
                self.scale_factor
            )));
        }
        Ok(())
    }
}

/// Population label of each synthetic row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Population {
    /// The larger population (`n_large` rows); inliers for the outlier pair.
    Majority,
    /// The smaller population (`n_small` rows); outliers for the outlier pair.
    Minority,
}

impl Population {
    pub fn index(self) -> u8 {
        match self {
            Population::Majority => 0,
            Population::Minority => 1,
        }
    }
}

/// A centered synthetic dataset with one label per row. Majority rows come
/// first.
#[derive(Debug, Clone)]
pub struct SynthData {
    pub data: DataMatrix,
    pub labels: Vec<Population>,
}

impl SynthData {
    pub fn rows_of(&self, population: Population) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == population)
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn generate(spec: &SynthSpec) -> Result<SynthData> {
    match spec.variant {
        Variant::TwoScale => gen_two_scale_gaussians(spec),
        Variant::OutlierPair => gen_outlier_pair(spec),
    }
}

pub fn gen_two_scale_gaussians(spec: &SynthSpec) -> Result<SynthData> {
    if spec.variant != Variant::TwoScale {
        return Err(invalid("spec is not a two-scale design"));
    }
    spec.validate()?;
    let mut rng = NormalSampler::new(spec.seed);
    let d = spec.d;

    // χ²₁ variances, one set per population
    let mut major_var: Vec<f64> = (0..d).map(|_| chi2_1(&mut rng)).collect();
    let mut minor_var: Vec<f64> = (0..d).map(|_| chi2_1(&mut rng)).collect();
    let scaled = if spec.scale_minority {
        &mut minor_var
    } else {
        &mut major_var
    };
    for v in scaled.iter_mut() {
        *v *= spec.scale_factor;
    }

    let n = spec.n_large + spec.n_small;
    let mut values = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for (count, vars, label) in [
        (spec.n_large, &major_var, Population::Majority),
        (spec.n_small, &minor_var, Population::Minority),
    ] {
        for _ in 0..count {
            values.extend(vars.iter().map(|&v| sqrt(v) * rng.standard_normal()));
            labels.push(label);
        }
    }
    finish(Matrix::from_vec(n, d, values), labels)
}

fn chi2_1(rng: &mut NormalSampler) -> f64 {
    let z = rng.standard_normal();
    z * z
}

pub fn gen_outlier_pair(spec: &SynthSpec) -> Result<SynthData> {
    if spec.variant != Variant::OutlierPair {
        return Err(invalid("spec is not an outlier-pair design"));
    }
    spec.validate()?;
    if spec.d != 2 {
        return Err(invalid(format!(
            "the outlier pair is 2-D, got d = {}",
            spec.d
        )));
    }
    let mut rng = NormalSampler::new(spec.seed);
    let n = spec.n_large + spec.n_small;
    let mut values = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    // inliers: diag(4, 1) = diag(2, 1)²
    for _ in 0..spec.n_large {
        let (z1, z2) = (rng.standard_normal(), rng.standard_normal());
        values.extend([2.0 * z1, z2]);
        labels.push(Population::Majority);
    }
    // outliers: [[16,12],[12,13]] = L Lᵀ with L = [[4,0],[3,2]]
    for _ in 0..spec.n_small {
        let (z1, z2) = (rng.standard_normal(), rng.standard_normal());
        values.extend([4.0 * z1, 3.0 * z1 + 2.0 * z2]);
        labels.push(Population::Minority);
    }
    finish(Matrix::from_vec(n, 2, values), labels)
}

fn finish(values: Matrix, labels: Vec<Population>) -> Result<SynthData> {
    let data = center(&DataMatrix::new(values)?)?;
    Ok(SynthData { data, labels })
}
