mod common;

use infoproj_core::linalg::{self, Matrix};
use infoproj_core::oracle::{cover_count, enumerate_dichotomies_2d, grid_best_w, SignVector};
use infoproj_core::power::fit_tpca_power;
use infoproj_core::relax::{
    extract_basis, fantope_project, feasibility_check, relax_gradient, relax_objective,
    solve_relaxation, spectraplex_project,
};
use infoproj_core::sic::tpca_objective;
use infoproj_core::synth::NormalSampler;
use infoproj_core::{DataMatrix, PowerOptions, RelaxOptions};
use proptest::prelude::*;

fn outer(w: &[f64]) -> Matrix {
    let mut m = Matrix::zeros(w.len(), w.len());
    linalg::add_outer(&mut m, w, 1.0);
    m
}

#[test]
fn analytic_projection_on_a_one_parameter_family() {
    // diag(t, 1 − t) is the only diagonal Fantope family for d = 2, r = 1
    let a = Matrix::diag(&[0.8, 0.8]);
    let p = fantope_project(&a, 1).unwrap();
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..=100_000 {
        let t = k as f64 / 100_000.0;
        let dist = a.sub(&Matrix::diag(&[t, 1.0 - t])).frobenius_norm();
        if dist < best.0 {
            best = (dist, t);
        }
    }
    assert!((best.1 - 0.5).abs() <= 1e-5);
    assert!(
        p.matrix()
            .max_abs_diff(&Matrix::diag(&[best.1, 1.0 - best.1]))
            <= 1e-5
    );
    assert!(p.matrix().max_abs_diff(&Matrix::diag(&[0.5, 0.5])) <= 1e-12);

    let q = fantope_project(&Matrix::diag(&[2.0, 0.0]), 1).unwrap();
    assert!(q.matrix().max_abs_diff(&Matrix::diag(&[1.0, 0.0])) <= 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn projection_is_nearest(seed in any::<u64>(), d in 2usize..6, r_off in 0usize..5) {
        let r = 1 + r_off % d;
        let mut rng = NormalSampler::new(seed);
        let a = common::random_symmetric(&mut rng, d, 1.5);
        let p = fantope_project(&a, r).unwrap();
        let dist = a.sub(p.matrix()).frobenius_norm();
        for _ in 0..1000 {
            let f = common::random_fantope(&mut rng, d, r);
            prop_assert!(dist <= a.sub(&f).frobenius_norm() + 1e-10);
        }
    }

    #[test]
    fn projection_is_idempotent(seed in any::<u64>(), d in 1usize..7, r_off in 0usize..6) {
        let r = 1 + r_off % d;
        let mut rng = NormalSampler::new(seed);
        let f = common::random_fantope(&mut rng, d, r);
        let p = fantope_project(&f, r).unwrap();
        prop_assert!(p.matrix().max_abs_diff(&f) <= 1e-10);
    }

    #[test]
    fn rank_one_projection_ignores_the_cap(seed in any::<u64>(), d in 1usize..7) {
        let mut rng = NormalSampler::new(seed);
        let a = common::random_symmetric(&mut rng, d, 3.0);
        let capped = fantope_project(&a, 1).unwrap();
        let free = spectraplex_project(&a, 1).unwrap();
        prop_assert!(capped.matrix().max_abs_diff(&free) <= 1e-12);
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = NormalSampler::new(77);
    for case in 0..20u64 {
        let d = 2 + (case as usize % 4);
        let x = common::gaussian_data(case, 15 + case as usize, d, &[1.0, 2.0, 0.5]);
        let m = common::random_fantope(&mut rng, d, 1 + case as usize % d);
        let rho = 0.1 + rng.uniform() * 2.0;
        let g = relax_gradient(&x, &m, rho).unwrap();
        for _ in 0..5 {
            let e = common::random_symmetric(&mut rng, d, 1.0);
            let e = e.scale(1.0 / e.frobenius_norm());
            let h = 1e-5;
            let up = relax_objective(&x, &m.add(&e.scale(h)), rho).unwrap();
            let down = relax_objective(&x, &m.sub(&e.scale(h)), rho).unwrap();
            let numeric = (up - down) / (2.0 * h);
            let exact = g.frobenius_dot(&e);
            let rel = (numeric - exact).abs() / exact.abs().max(1e-8);
            assert!(rel <= 1e-5, "case {case}: {numeric} vs {exact}");
        }
    }
}

#[test]
fn rank_one_matrices_reproduce_the_tpca_objective() {
    let x = common::gaussian_data(5, 30, 4, &[1.0, 3.0]);
    let mut rng = NormalSampler::new(5);
    for _ in 0..20 {
        let w = common::random_unit(&mut rng, 4);
        let a = relax_objective(&x, &outer(w.as_slice()), 0.4).unwrap();
        let b = tpca_objective(&x, &w, 0.4).unwrap();
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
    }
    let full = relax_objective(&x, &Matrix::identity(4), 0.4).unwrap();
    let direct: f64 = x.rows().map(|r| (0.4 + linalg::dot(r, r)).ln()).sum();
    assert!((full - direct).abs() <= 1e-12 * direct.abs());
}

#[test]
fn relaxation_ascends_and_bounds_every_direction() {
    let mut rng = NormalSampler::new(21);
    for seed in 0..6 {
        let x = common::gaussian_data(seed, 80, 5, &[1.0, 4.0, 0.3, 2.0, 0.7]);
        let rho = 0.05 + 0.5 * seed as f64;
        let sol = solve_relaxation(&x, rho, 1, &RelaxOptions::default()).unwrap();
        let trace = &sol.report.components[0].objective_trace;
        for pair in trace.windows(2) {
            assert!(pair[1] - pair[0] >= -1e-12 * pair[0].abs().max(1.0));
        }
        let bound = sol.report.upper_bound.unwrap().value;
        let power = fit_tpca_power(&x, rho, 1, &PowerOptions::default()).unwrap();
        assert!(bound >= power.components[0].objective - 1e-8);
        for _ in 0..1000 {
            let w = common::random_unit(&mut rng, 5);
            assert!(bound >= tpca_objective(&x, &w, rho).unwrap() - 1e-8);
        }
    }
}

#[test]
fn capped_and_uncapped_rank_one_solves_agree() {
    let x = common::gaussian_data(9, 60, 4, &[2.0, 1.0, 0.5, 3.0]);
    let capped = solve_relaxation(&x, 0.5, 1, &RelaxOptions::default()).unwrap();
    let free = solve_relaxation(
        &x,
        0.5,
        1,
        &RelaxOptions {
            drop_cap_for_rank_one: true,
            ..RelaxOptions::default()
        },
    )
    .unwrap();
    assert!(capped.fantope.matrix().max_abs_diff(free.fantope.matrix()) <= 1e-8);
}

#[test]
fn relaxation_is_tight_on_rank_deficient_data() {
    // rank one: points on a line in ℝ³
    let line = [0.48, -0.6, 0.64];
    let scales = [3.0, -1.0, 0.5, -2.5, 1.2, -0.2];
    let rows: Vec<Vec<f64>> = scales
        .iter()
        .map(|s| line.iter().map(|v| s * v).collect())
        .collect();
    let x = infoproj_core::center(&DataMatrix::from_rows(&rows).unwrap()).unwrap();
    let sol = solve_relaxation(&x, 0.5, 1, &RelaxOptions::default()).unwrap();
    let w = sol.report.basis.unit_column(0);
    let bound = sol.report.upper_bound.unwrap().value;
    assert!((bound - tpca_objective(&x, &w, 0.5).unwrap()).abs() <= 1e-6);
    assert!(common::vector_angle(w.as_slice(), &line) <= 1e-6);

    // rank two inside ℝ⁴
    let mut rng = NormalSampler::new(3);
    let u = common::random_orthonormal(&mut rng, 4, 2);
    let coeffs = common::gaussian_data(4, 40, 2, &[2.0, 1.0]);
    let x = DataMatrix::new(coeffs.values().matmul(&u.transpose())).unwrap();
    let sol = solve_relaxation(&x, 0.3, 2, &RelaxOptions::default()).unwrap();
    assert!(common::span_angle(sol.report.basis.matrix(), &u) <= 1e-6);
}

#[test]
fn full_rank_relaxation_returns_identity() {
    let x = common::gaussian_data(1, 20, 3, &[1.0]);
    let sol = solve_relaxation(&x, 1.0, 3, &RelaxOptions::default()).unwrap();
    assert!(sol.fantope.matrix().max_abs_diff(&Matrix::identity(3)) <= 1e-12);
}

#[test]
fn projection_matrices_and_the_rank_test() {
    let mut rng = NormalSampler::new(8);
    for case in 0..100 {
        let d = 1 + case % 6;
        let r = 1 + (case / 6) % d;
        let w = common::random_orthonormal(&mut rng, d, r);
        let m = w.matmul(&w.transpose());
        let check = feasibility_check(&m, r, 1e-8).unwrap();
        assert!(check.rank_feasible(1e-8), "case {case}: {check:?}");

        // converse: a matrix with spectrum {1×r, 0×(d−r)} is WWᵀ
        let q = common::random_orthonormal(&mut rng, d, d);
        let mut spectral = Matrix::zeros(d, d);
        for k in 0..r {
            linalg::add_outer(&mut spectral, &q.column(k), 1.0);
        }
        let check = feasibility_check(&spectral, r, 1e-8).unwrap();
        assert!(check.rank_feasible(1e-8));
        let fantope = infoproj_core::FantopeMatrix::new(spectral.clone(), r).unwrap();
        let basis = extract_basis(&fantope, r).unwrap().basis;
        let rebuilt = basis.matrix().matmul(&basis.matrix().transpose());
        assert!(rebuilt.max_abs_diff(&spectral) <= 1e-7);
    }
    let half = feasibility_check(&Matrix::identity(2).scale(0.5), 1, 1e-8).unwrap();
    assert!(half.relaxed_feasible(1e-8) && !half.rank_feasible(1e-8));
}

#[test]
fn sweep_count_matches_cover_count() {
    for n in 2..=10u64 {
        for seed in 0..5 {
            // centering would make the two rows of an n = 2 instance parallel
            let x = common::raw_gaussian_data(1000 * n + seed, n as usize, 2, &[1.0, 1.7]);
            let dich = enumerate_dichotomies_2d(&x).unwrap();
            assert!(!dich.degenerate);
            assert_eq!(dich.cells.len() as u128, cover_count(n, 2).unwrap());
            let mut seen: Vec<&SignVector> = dich.cells.iter().map(|c| &c.signs).collect();
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len(), dich.cells.len());
            for cell in &dich.cells {
                let s = SignVector::of(&x, cell.witness.as_slice())
                    .unwrap()
                    .unwrap();
                assert_eq!(s, cell.signs);
            }
        }
    }
}

#[test]
fn sweep_finds_every_sampled_pattern() {
    let x = common::gaussian_data(31, 7, 2, &[1.0, 1.0]);
    let dich = enumerate_dichotomies_2d(&x).unwrap();
    let mut rng = NormalSampler::new(4);
    for _ in 0..5000 {
        let w = common::random_unit(&mut rng, 2);
        let s = SignVector::of(&x, w.as_slice()).unwrap().unwrap();
        assert!(dich.cells.iter().any(|c| c.signs == s));
    }
}

#[test]
fn grid_search_respects_the_bound_and_refines() {
    for seed in 0..5 {
        let x = common::gaussian_data(seed, 12, 2, &[1.0, 2.0]);
        let bound = solve_relaxation(&x, 0.5, 1, &RelaxOptions::default())
            .unwrap()
            .report
            .upper_bound
            .unwrap()
            .value;
        let mut last = f64::NEG_INFINITY;
        for res in [1000, 2000, 4000, 8000, 16000] {
            let g = grid_best_w(&x, 0.5, res).unwrap();
            assert!(g.objective >= last);
            assert!(g.objective <= bound + 1e-6);
            last = g.objective;
        }

        let x3 = common::gaussian_data(seed, 10, 3, &[1.0, 2.0, 0.5]);
        let bound3 = solve_relaxation(&x3, 0.5, 1, &RelaxOptions::default())
            .unwrap()
            .report
            .upper_bound
            .unwrap()
            .value;
        assert!(grid_best_w(&x3, 0.5, 20_000).unwrap().objective <= bound3 + 1e-6);
    }
}
