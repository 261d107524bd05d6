//! Randomized invariants of the Gaussian closed forms: λ → 0 consistency,
//! eigenvalue monotonicity, large-λ asymptotics, symmetry, marginal
//! correctness, extremal alignment, and the Newton–Schulz/eigen agreement.

mod common;

use entrot::gaussian::{
    coupling_eigenvalues, entropic_cost, extremal_alignment, optimal_coupling, sigma_lambda,
    transport_term, wasserstein2_sq, Gaussian,
};
use entrot::spd::{NEWTON_SCHULZ_EPS, NEWTON_SCHULZ_MAX_ITER, NEWTON_SCHULZ_TOL};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use proptest::prelude::*;
use rand::Rng;

fn random_gaussian(rng: &mut impl Rng, dim: usize) -> Gaussian {
    let mean = DVector::from_fn(dim, |_, _| rng.random_range(-2.0..2.0));
    Gaussian::new(mean, common::random_spd(rng, dim, 20.0)).unwrap()
}

#[test]
fn transport_term_converges_to_wasserstein() {
    let mut rng = common::rng(101);
    for trial in 0..50 {
        let dim = rng.random_range(1..=5);
        let p = random_gaussian(&mut rng, dim);
        let q = random_gaussian(&mut rng, dim);
        let w2 = wasserstein2_sq(&p, &q).unwrap();
        let coupling = optimal_coupling(&p, &q, 1e-8).unwrap();
        let transport = transport_term(&coupling);
        assert!(
            (transport - w2).abs() <= 1e-5 * (1.0 + w2),
            "trial {trial}: transport {transport} vs W₂² {w2}"
        );
    }
}

#[test]
fn wasserstein_matches_general_eigenvalue_route() {
    // Independent route: tr((Σ₁^{1/2}Σ₂Σ₁^{1/2})^{1/2}) equals Σᵢ√λᵢ(Σ₁Σ₂),
    // eigenvalues of the (nonsymmetric) product.
    let mut rng = common::rng(102);
    for _ in 0..100 {
        let dim = rng.random_range(1..=5);
        let p = random_gaussian(&mut rng, dim);
        let q = random_gaussian(&mut rng, dim);
        let product = p.cov().entries() * q.cov().entries();
        let cross: f64 = product
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re.max(0.0).sqrt())
            .sum();
        let reference = (p.mean() - q.mean()).norm_squared() + p.cov().trace()
            + q.cov().trace()
            - 2.0 * cross;
        let w2 = wasserstein2_sq(&p, &q).unwrap();
        assert!(
            (w2 - reference).abs() <= 1e-8 * (1.0 + reference.abs()),
            "{w2} vs {reference}"
        );
    }
}

#[test]
fn coupling_eigenvalues_decrease_strictly_in_lambda() {
    let mut rng = common::rng(103);
    let grid = [0.0, 0.1, 0.5, 1.0, 5.0];
    for _ in 0..100 {
        let dim = rng.random_range(1..=4);
        let s1 = common::random_spd(&mut rng, dim, 10.0);
        let s2 = common::random_spd(&mut rng, dim, 10.0);
        let mut previous: Option<Vec<f64>> = None;
        for &lambda in &grid {
            let eig = coupling_eigenvalues(&s1, &s2, lambda).unwrap();
            if let Some(prev) = &previous {
                for (cur, old) in eig.iter().zip(prev) {
                    assert!(cur < old, "eigenvalue did not decrease: {cur} vs {old}");
                }
            }
            previous = Some(eig);
        }
    }
}

#[test]
fn coupling_eigenvalues_match_sigma_lambda_spectrum() {
    let mut rng = common::rng(104);
    for _ in 0..50 {
        let dim = rng.random_range(1..=4);
        let s1 = common::random_spd(&mut rng, dim, 10.0);
        let s2 = common::random_spd(&mut rng, dim, 10.0);
        let lambda = rng.random_range(0.0..2.0);
        let closed = coupling_eigenvalues(&s1, &s2, lambda).unwrap();
        // Σ_λ is similar to a symmetric matrix; its eigenvalues are real.
        let mut direct: Vec<f64> = sigma_lambda(&s1, &s2, lambda)
            .unwrap()
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .collect();
        direct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (c, d) in closed.iter().zip(&direct) {
            assert!((c - d).abs() <= 1e-9 * (1.0 + c.abs()), "{c} vs {d}");
        }
    }
}

#[test]
fn sigma_lambda_large_lambda_asymptotics() {
    // Σ_λ ≈ Σ₁Σ₂/(2λ): the deviation falls off as 1/λ² (ratio test).
    let mut rng = common::rng(105);
    let s1 = common::random_spd(&mut rng, 3, 5.0);
    let s2 = common::random_spd(&mut rng, 3, 5.0);
    let product = s1.entries() * s2.entries();
    let mut errors = Vec::new();
    for lambda in [1e2, 1e3, 1e4] {
        let s = sigma_lambda(&s1, &s2, lambda).unwrap();
        errors.push((s - &product / (2.0 * lambda)).norm());
    }
    for w in errors.windows(2) {
        // One decade in λ should buy about two decades in error.
        let ratio = w[0] / w[1];
        assert!(
            (30.0..3000.0).contains(&ratio),
            "error ratio {ratio} outside the 1/λ² regime: {errors:?}"
        );
    }
}

#[test]
fn cost_symmetry_randomized() {
    let mut rng = common::rng(106);
    for _ in 0..50 {
        let dim = rng.random_range(1..=4);
        let p = random_gaussian(&mut rng, dim);
        let q = random_gaussian(&mut rng, dim);
        let lambda = rng.random_range(0.05..3.0);
        let pq = entropic_cost(&p, &q, lambda).unwrap();
        let qp = entropic_cost(&q, &p, lambda).unwrap();
        assert!(
            (pq.total - qp.total).abs() <= 1e-10 * (1.0 + pq.total.abs()),
            "{} vs {}",
            pq.total,
            qp.total
        );
        assert!(
            (pq.total - (pq.transport_term + pq.entropy_term)).abs()
                <= 1e-10 * (1.0 + pq.total.abs())
        );
    }
}

#[test]
fn coupling_marginals_and_positive_semidefiniteness() {
    let mut rng = common::rng(107);
    for _ in 0..50 {
        let dim = rng.random_range(1..=4);
        let p = random_gaussian(&mut rng, dim);
        let q = random_gaussian(&mut rng, dim);
        let lambda = rng.random_range(0.0..4.0);
        let coupling = optimal_coupling(&p, &q, lambda).unwrap();
        assert_eq!(coupling.block_11().entries(), p.cov().entries());
        assert_eq!(coupling.block_22().entries(), q.cov().entries());
        let assembled = coupling.assembled();
        let min_eig = SymmetricEigen::new(assembled)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        assert!(min_eig >= -1e-9, "assembled coupling eigenvalue {min_eig}");
    }
}

#[test]
fn extremal_alignment_beats_random_rotations() {
    let mut rng = common::rng(3);
    let dim = 3;
    for _ in 0..5 {
        let s1 = common::random_spd(&mut rng, dim, 12.0);
        let spectrum: Vec<f64> = (0..dim).map(|_| rng.random_range(0.3..4.0)).collect();
        let (argmin, argmax) = match extremal_alignment(&s1, &spectrum) {
            Ok(pair) => pair,
            // Regenerate on a (rare) near-degenerate draw.
            Err(_) => continue,
        };
        let zero = DVector::zeros(dim);
        let p = Gaussian::new(zero.clone(), s1.clone()).unwrap();
        for lambda in [0.01, 0.5, 2.0] {
            let lo = entropic_cost(
                &p,
                &Gaussian::new(zero.clone(), argmin.clone()).unwrap(),
                lambda,
            )
            .unwrap()
            .total;
            let hi = entropic_cost(
                &p,
                &Gaussian::new(zero.clone(), argmax.clone()).unwrap(),
                lambda,
            )
            .unwrap()
            .total;
            let diag = DMatrix::from_diagonal(&DVector::from_row_slice(&spectrum));
            for _ in 0..200 {
                let rot = common::random_orthogonal(&mut rng, dim);
                let conjugated =
                    entrot::SpdMatrix::new(&rot * &diag * rot.transpose()).unwrap();
                let value = entropic_cost(
                    &p,
                    &Gaussian::new(zero.clone(), conjugated).unwrap(),
                    lambda,
                )
                .unwrap()
                .total;
                assert!(value >= lo - 1e-9, "rotation beat the minimizer: {value} < {lo}");
                assert!(value <= hi + 1e-9, "rotation beat the maximizer: {value} > {hi}");
            }
        }
    }
}

#[test]
fn newton_schulz_agrees_with_eigen_over_seeds() {
    for seed in 0..100 {
        let mut rng = common::rng(seed);
        let dim = rng.random_range(2..=16);
        let cond = rng.random_range(1.0..1e4_f64);
        let a = common::random_spd(&mut rng, dim, cond);
        let ns = a
            .sqrt_newton_schulz(NEWTON_SCHULZ_EPS, NEWTON_SCHULZ_MAX_ITER, NEWTON_SCHULZ_TOL)
            .unwrap();
        let eig = a.sqrt_eigen();
        let rel = (ns.entries() - eig.entries()).norm() / eig.entries().norm();
        assert!(rel <= 1e-8, "seed {seed} (dim {dim}, cond {cond:.1}): gap {rel:.3e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// sqrt_eigen squares back for arbitrary well-conditioned SPD matrices.
    #[test]
    fn prop_sqrt_squares_back(seed in 0u64..1000, dim in 1usize..6) {
        let mut rng = common::rng(seed);
        let a = common::random_spd(&mut rng, dim, 100.0);
        let s = a.sqrt_eigen();
        let rel = (s.entries() * s.entries() - a.entries()).norm() / a.entries().norm();
        prop_assert!(rel <= 1e-10);
    }

    /// W₂² is zero iff the arguments coincide, and positive otherwise.
    #[test]
    fn prop_wasserstein_separates_points(seed in 0u64..1000, dim in 1usize..5) {
        let mut rng = common::rng(seed.wrapping_mul(2654435761).wrapping_add(17));
        let p = random_gaussian(&mut rng, dim);
        let q = random_gaussian(&mut rng, dim);
        prop_assert!(wasserstein2_sq(&p, &p).unwrap().abs() <= 1e-9);
        let w = wasserstein2_sq(&p, &q).unwrap();
        prop_assert!(w > 0.0);
    }
}
