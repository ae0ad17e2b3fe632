mod common;

use infoproj_core::linalg::Matrix;
use infoproj_core::sic::{
    sic_gaussian_1d, sic_gaussian_rd, sic_t_1d, sic_t_rd, tpca_objective, SicValue,
};
use infoproj_core::synth::NormalSampler;
use infoproj_core::{center, scale_measure, DataMatrix, OrthonormalBasis, UnitVector};
use proptest::prelude::*;

fn matrix_strategy() -> impl Strategy<Value = DataMatrix> {
    (1usize..12, 1usize..6).prop_flat_map(|(n, d)| {
        prop::collection::vec(-10.0f64..10.0, n * d)
            .prop_map(move |v| DataMatrix::new(Matrix::from_vec(n, d, v)).unwrap())
    })
}

fn decomposes(v: &SicValue) -> bool {
    let sum = v.data_term + v.resolution_term + v.constant_term;
    (v.total - sum).abs() <= 1e-10 * v.total.abs().max(1.0)
}

proptest! {
    #[test]
    fn center_is_idempotent(x in matrix_strategy()) {
        let once = center(&x).unwrap();
        let twice = center(&once).unwrap();
        prop_assert!(once.values().max_abs_diff(twice.values()) <= 1e-12);
    }

    #[test]
    fn scale_is_rotation_invariant(x in matrix_strategy(), seed in any::<u64>()) {
        let mut rng = NormalSampler::new(seed);
        let r = common::random_orthonormal(&mut rng, x.d(), x.d());
        let rotated = DataMatrix::new(x.values().matmul(&r)).unwrap();
        prop_assert!((scale_measure(&rotated) - scale_measure(&x)).abs() <= 1e-10);
    }

    #[test]
    fn scale_is_linear(x in matrix_strategy(), a in -5.0f64..5.0) {
        let scaled = DataMatrix::new(x.values().scale(a)).unwrap();
        prop_assert!((scale_measure(&scaled) - a.abs() * scale_measure(&x)).abs() <= 1e-10);
    }

    #[test]
    fn sic_values_decompose(seed in any::<u64>(), n in 2usize..30, d in 1usize..5) {
        let x = common::gaussian_data(seed, n, d, &[1.0, 3.0, 0.5]);
        let mut rng = NormalSampler::new(seed ^ 1);
        let w = common::random_unit(&mut rng, d);
        let r = 1 + (seed as usize) % d;
        let basis = OrthonormalBasis::new(common::random_orthonormal(&mut rng, d, r)).unwrap();
        let deltas = vec![0.1; r];
        prop_assert!(decomposes(&sic_gaussian_1d(&x, &w, 1.3, 0.2).unwrap()));
        prop_assert!(decomposes(&sic_gaussian_rd(&x, &basis, 0.7, &deltas).unwrap()));
        prop_assert!(decomposes(&sic_t_1d(&x, &w, 0.5, 3.0, 0.2).unwrap()));
        prop_assert!(decomposes(&sic_t_rd(&x, &basis, 2.0, 1.0, &deltas).unwrap()));
    }

    #[test]
    fn sigma_does_not_change_the_ranking(seed in any::<u64>(), s1 in 0.01f64..100.0, s2 in 0.01f64..100.0) {
        let x = common::gaussian_data(seed, 25, 3, &[1.0, 2.0, 4.0]);
        let mut rng = NormalSampler::new(seed ^ 7);
        let cands: Vec<UnitVector> = (0..15).map(|_| common::random_unit(&mut rng, 3)).collect();
        let best = |sigma: f64| argmax(cands.iter().map(|w| sic_gaussian_1d(&x, w, sigma, 0.05).unwrap().total));
        prop_assert_eq!(best(s1), best(s2));
    }

    #[test]
    fn nu_does_not_change_the_ranking(seed in any::<u64>(), n1 in 0.05f64..100.0, n2 in 0.05f64..100.0) {
        let x = common::gaussian_data(seed, 25, 3, &[1.0, 2.0, 4.0]);
        let mut rng = NormalSampler::new(seed ^ 9);
        let cands: Vec<UnitVector> = (0..15).map(|_| common::random_unit(&mut rng, 3)).collect();
        let best = |nu: f64| argmax(cands.iter().map(|w| sic_t_1d(&x, w, 0.3, nu, 0.05).unwrap().total));
        prop_assert_eq!(best(n1), best(n2));
    }

    #[test]
    fn zero_rho_is_the_geometric_mean(seed in any::<u64>(), n in 1usize..20) {
        let x = common::gaussian_data(seed, n, 3, &[1.0, 0.5, 2.0]);
        let mut rng = NormalSampler::new(seed ^ 3);
        let w = common::random_unit(&mut rng, 3);
        let p = x.project(w.as_slice()).unwrap();
        let product: f64 = p.iter().map(|v| v * v).product();
        prop_assume!(product > 1e-250 && product < 1e250);
        let geometric = product.powf(1.0 / n as f64);
        let from_objective = (tpca_objective(&x, &w, 0.0).unwrap() / n as f64).exp();
        prop_assert!((from_objective - geometric).abs() <= 1e-10 * geometric);
    }

    #[test]
    fn huge_rho_is_the_arithmetic_mean(seed in any::<u64>(), n in 1usize..30) {
        let x = common::gaussian_data(seed, n, 3, &[1.0, 0.5, 2.0]);
        let mut rng = NormalSampler::new(seed ^ 5);
        let w = common::random_unit(&mut rng, 3);
        let p = x.project(w.as_slice()).unwrap();
        let max_sq = p.iter().map(|v| v * v).fold(0.0, f64::max);
        prop_assume!(max_sq > 1e-6);
        let rho = 1e6 * max_sq;
        let nf = n as f64;
        let limit = rho / nf * tpca_objective(&x, &w, rho).unwrap() - rho * rho.ln();
        let arithmetic = p.iter().map(|v| v * v).sum::<f64>() / nf;
        prop_assert!((limit - arithmetic).abs() <= 1e-3 * arithmetic);
    }
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, v) in values.enumerate() {
        if v > best.0 {
            best = (v, i);
        }
    }
    best.1
}

#[test]
fn gaussian_sic_by_hand() {
    // N(0,1) density of p = ±1 is e^{-1/2}/√(2π); boxes of width 0.1
    let x = DataMatrix::from_rows(&[[1.0, 5.0], [-1.0, -5.0]]).unwrap();
    let v = sic_gaussian_1d(&x, &UnitVector::axis(2, 0), 1.0, 0.1).unwrap();
    let per_point = 0.5 + 0.5 * (2.0 * std::f64::consts::PI).ln() - 0.1f64.ln();
    assert!((v.total - 2.0 * per_point).abs() < 1e-12);
}

#[test]
fn t_sic_with_cauchy_prior_by_hand() {
    // ν = ρ = 1 gives a standard Cauchy marginal 1/(π(1+p²))
    let x = DataMatrix::from_rows(&[[2.0], [-0.5]]).unwrap();
    let v = sic_t_1d(&x, &UnitVector::axis(1, 0), 1.0, 1.0, 1.0).unwrap();
    let expected: f64 = [2.0f64, -0.5]
        .iter()
        .map(|p| (std::f64::consts::PI * (1.0 + p * p)).ln())
        .sum();
    assert!((v.total - expected).abs() < 1e-12);
}
