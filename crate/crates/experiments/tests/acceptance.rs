//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Criterion 9 reproduces the reference covariance-benchmark tables; its
//! MLE-row values are not attainable under the documented protocol (see the
//! printed per-cell report), so that test is expected to stay red — the
//! assertions are kept faithful rather than loosened.

mod common;

use entrot::barycenter::{barycenter, euclidean_grad_cost, BarycenterProblem};
use entrot::gaussian::{
    coupling_eigenvalues, entropic_cost, extremal_alignment, optimal_coupling, sigma_lambda,
    transport_term, wasserstein2_sq, Gaussian,
};
use entrot::kantorovich::{
    dual_potential_alpha, kantorovich_estimator_density, kantorovich_estimator_gaussian,
    DensityFn,
};
use entrot::qnormal::{
    lambda_tilde_residual, qnormal_coupling, qnormal_coupling_with, solve_lambda_tilde, QNormal,
    QTildeConvention,
};
use entrot::spd::{NEWTON_SCHULZ_EPS, NEWTON_SCHULZ_MAX_ITER, NEWTON_SCHULZ_TOL};
use entrot::{quad, SpdMatrix};
use entrot_experiments::config::{ExperimentConfig, ExperimentKind};
use entrot_experiments::runners::{
    run_cost_curve, run_cov_benchmark, run_barycenter_benchmark_with_m, run_verify_oracle,
};
use nalgebra::{dvector, DMatrix, DVector};
use rand::Rng;

#[test]
fn criterion_01_closed_form_vs_sinkhorn_oracle() {
    let (rows, pass) = run_verify_oracle().expect("oracle run completes");
    let mut worst_cross = 0.0_f64;
    let mut worst_total = 0.0_f64;
    for row in &rows {
        worst_cross = worst_cross.max(row.cross_rel_err);
        worst_total = worst_total.max(row.total_rel_err);
        println!(
            "  ({}, {}) λ={}: cross rel {:.3e}, total rel {:.3e}, entropy-constant gap {:.5}",
            row.var1, row.var2, row.lambda, row.cross_rel_err, row.total_rel_err,
            row.entropy_constant_gap
        );
    }
    println!(
        "  measured entropy-constant gap ≈ log π = {:.5} on every cell: the oracle confirms the \
         −2λn·log(2λ) constant (log-det coefficient −2λ) used by entropic_cost",
        std::f64::consts::PI.ln()
    );
    if pass {
        println!(
            "criterion 1: PASS — oracle within 5% (worst cross {worst_cross:.3e}, worst total \
             {worst_total:.3e})"
        );
    } else {
        println!("criterion 1: FAIL — oracle disagreement beyond 5%");
        panic!("criterion 1 failed");
    }
}

#[test]
fn criterion_02_lambda_zero_limit() {
    let mut rng = common::rng(2);
    let mut worst_formula = 0.0_f64;
    let mut worst_limit = 0.0_f64;
    for _ in 0..100 {
        let dim = rng.random_range(1..=5);
        let p = common::random_gaussian(&mut rng, dim);
        let q = common::random_gaussian(&mut rng, dim);
        let w2 = wasserstein2_sq(&p, &q).unwrap();

        // Literature Fréchet formula via an independent eigenvalue route:
        // tr((Σ₁^{1/2}Σ₂Σ₁^{1/2})^{1/2}) = Σᵢ √λᵢ(Σ₁Σ₂).
        let cross: f64 = (p.cov().entries() * q.cov().entries())
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re.max(0.0).sqrt())
            .sum();
        let frechet = (p.mean() - q.mean()).norm_squared() + p.cov().trace()
            + q.cov().trace()
            - 2.0 * cross;
        worst_formula = worst_formula.max((w2 - frechet).abs() / (1.0 + frechet.abs()));

        let coupling = optimal_coupling(&p, &q, 1e-8).unwrap();
        let gap = (transport_term(&coupling) - w2).abs() / (1.0 + w2);
        worst_limit = worst_limit.max(gap);
    }
    let ok = worst_formula <= 1e-8 && worst_limit <= 1e-5;
    if ok {
        println!(
            "criterion 2: PASS — Fréchet formula gap {worst_formula:.3e}, λ→0 transport gap \
             {worst_limit:.3e}"
        );
    } else {
        println!(
            "criterion 2: FAIL — Fréchet formula gap {worst_formula:.3e}, λ→0 transport gap \
             {worst_limit:.3e}"
        );
        panic!("criterion 2 failed");
    }
}

#[test]
fn criterion_03_eigenvalue_monotonicity() {
    let mut rng = common::rng(3);
    let grid = [0.0, 0.1, 0.5, 1.0, 5.0];
    let mut worst_match = 0.0_f64;
    for _ in 0..100 {
        let dim = rng.random_range(1..=4);
        let s1 = common::random_spd(&mut rng, dim, 10.0);
        let s2 = common::random_spd(&mut rng, dim, 10.0);
        let mut previous: Option<Vec<f64>> = None;
        for &lambda in &grid {
            let closed = coupling_eigenvalues(&s1, &s2, lambda).unwrap();
            if let Some(prev) = &previous {
                for (cur, old) in closed.iter().zip(prev) {
                    assert!(
                        cur < old,
                        "criterion 3: FAIL — eigenvalue did not strictly decrease ({cur} vs {old})"
                    );
                }
            }
            let mut direct: Vec<f64> = sigma_lambda(&s1, &s2, lambda)
                .unwrap()
                .complex_eigenvalues()
                .iter()
                .map(|z| z.re)
                .collect();
            direct.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (c, d) in closed.iter().zip(&direct) {
                worst_match = worst_match.max((c - d).abs());
            }
            previous = Some(closed);
        }
    }
    if worst_match <= 1e-9 {
        println!(
            "criterion 3: PASS — strict decrease over the λ grid; closed-form vs direct spectrum \
             gap {worst_match:.3e}"
        );
    } else {
        println!("criterion 3: FAIL — spectrum gap {worst_match:.3e} exceeds 1e-9");
        panic!("criterion 3 failed");
    }
}

#[test]
fn criterion_04_extremal_alignment() {
    let mut rng = common::rng(4);
    let dim = 3;
    let mut checked = 0;
    while checked < 20 {
        let s1 = common::random_spd(&mut rng, dim, 12.0);
        let spectrum: Vec<f64> = (0..dim).map(|_| rng.random_range(0.3..4.0)).collect();
        let Ok((argmin, argmax)) = extremal_alignment(&s1, &spectrum) else {
            continue; // near-degenerate draw, resample
        };
        checked += 1;
        let zero = DVector::zeros(dim);
        let p = Gaussian::new(zero.clone(), s1.clone()).unwrap();
        let diag = DMatrix::from_diagonal(&DVector::from_row_slice(&spectrum));
        for lambda in [0.01, 1.0] {
            let lo = entropic_cost(&p, &Gaussian::new(zero.clone(), argmin.clone()).unwrap(), lambda)
                .unwrap()
                .total;
            let hi = entropic_cost(&p, &Gaussian::new(zero.clone(), argmax.clone()).unwrap(), lambda)
                .unwrap()
                .total;
            for _ in 0..200 {
                let rot = common::random_orthogonal(&mut rng, dim);
                let conjugated = SpdMatrix::new(&rot * &diag * rot.transpose()).unwrap();
                let value =
                    entropic_cost(&p, &Gaussian::new(zero.clone(), conjugated).unwrap(), lambda)
                        .unwrap()
                        .total;
                assert!(
                    value >= lo - 1e-9,
                    "criterion 4: FAIL — rotation beat the aligned-descending cost by {}",
                    lo - value
                );
                assert!(
                    value <= hi + 1e-9,
                    "criterion 4: FAIL — rotation beat the aligned-ascending cost by {}",
                    value - hi
                );
            }
        }
    }
    println!(
        "criterion 4: PASS — 20 instances × 2 λ × 200 rotations bracketed by the aligned \
         configurations (margin 1e-9)"
    );
}

#[test]
fn criterion_05_newton_schulz_agreement() {
    let mut worst = 0.0_f64;
    for seed in 0..100 {
        let mut rng = common::rng(500 + seed);
        let dim = rng.random_range(2..=16);
        let cond = rng.random_range(1.0..1e4_f64);
        let a = common::random_spd(&mut rng, dim, cond);
        let ns = a
            .sqrt_newton_schulz(NEWTON_SCHULZ_EPS, NEWTON_SCHULZ_MAX_ITER, NEWTON_SCHULZ_TOL)
            .unwrap();
        let eig = a.sqrt_eigen();
        let rel = (ns.entries() - eig.entries()).norm() / eig.entries().norm();
        worst = worst.max(rel);
    }
    if worst <= 1e-8 {
        println!("criterion 5: PASS — Newton–Schulz vs eigen square root, worst gap {worst:.3e}");
    } else {
        println!("criterion 5: FAIL — Newton–Schulz gap {worst:.3e} exceeds 1e-8");
        panic!("criterion 5 failed");
    }
}

#[test]
fn criterion_06_smoothing_estimator() {
    // Closed form is exact: Σ + (λ/2)I entry for entry.
    let p = Gaussian::new(
        dvector![0.4, -1.0],
        SpdMatrix::new(DMatrix::from_row_slice(2, 2, &[1.3, 0.2, 0.2, 0.9])).unwrap(),
    )
    .unwrap();
    let lambda = 0.1;
    let estimator = kantorovich_estimator_gaussian(&p, lambda).unwrap();
    let mut expected = p.cov().entries().clone();
    expected[(0, 0)] += 0.05;
    expected[(1, 1)] += 0.05;
    assert_eq!(estimator.cov().entries(), &expected, "criterion 6: FAIL — not exact");

    // The estimator's λ is the smoothing weight: it minimizes the entropic
    // cost at parameter λ/4 (ε = 4λ_cost convention). No jittered competitor
    // may beat it by more than 1e−8.
    let p1 = Gaussian::scalar(0.3, 1.7).unwrap();
    let best = kantorovich_estimator_gaussian(&p1, lambda).unwrap();
    let best_cost = entropic_cost(&p1, &best, lambda / 4.0).unwrap().total;
    let mut rng = common::rng(6);
    let mut closest = f64::INFINITY;
    for _ in 0..100 {
        let mean = best.mean()[0] * (1.0 + rng.random_range(-0.2..0.2))
            + rng.random_range(-0.2..0.2);
        let var = best.cov().entries()[(0, 0)] * (1.0 + rng.random_range(-0.2..0.2));
        let candidate = Gaussian::scalar(mean, var).unwrap();
        let cost = entropic_cost(&p1, &candidate, lambda / 4.0).unwrap().total;
        closest = closest.min(cost - best_cost);
    }
    assert!(
        closest >= -1e-8,
        "criterion 6: FAIL — a jittered Gaussian beat the estimator by {closest:.3e}"
    );

    // Independent numerical argmin over the isotropic family for N(0, I₂):
    // golden-section on s ↦ C(N(0,I), N(0,sI)) at parameter λ/4.
    let p2 = Gaussian::standard(2);
    let objective = |s: f64| {
        let q = Gaussian::new(
            DVector::zeros(2),
            SpdMatrix::from_diagonal(&[s, s]).unwrap(),
        )
        .unwrap();
        entropic_cost(&p2, &q, lambda / 4.0).unwrap().total
    };
    let (mut lo, mut hi) = (0.5_f64, 2.0_f64);
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        if objective(a) < objective(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let argmin = 0.5 * (lo + hi);
    assert!(
        (argmin - 1.05).abs() <= 1e-3,
        "criterion 6: FAIL — numerical argmin {argmin} is not 1.05"
    );

    // Density-convolution path agrees with the closed form pointwise (1D).
    let density = DensityFn::from_gaussian(&p1);
    let smoothed = kantorovich_estimator_gaussian(&p1, 0.8).unwrap();
    let mut worst = 0.0_f64;
    for y in [-3.0, -1.0, 0.0, 0.3, 1.5, 4.0] {
        let got = kantorovich_estimator_density(&density, 0.8, &[y]).unwrap();
        let want = smoothed.density(&dvector![y]);
        worst = worst.max((got - want).abs() / want);
    }
    assert!(
        worst <= 1e-5,
        "criterion 6: FAIL — convolution path off by {worst:.3e}"
    );

    // Dual potential spot check: α*(x) − λ·log p(x) is constant.
    let a0 = dual_potential_alpha(&density, 0.8, &[0.0]).unwrap()
        - 0.8 * density.eval(&[0.0]).ln();
    let a1 = dual_potential_alpha(&density, 0.8, &[2.0]).unwrap()
        - 0.8 * density.eval(&[2.0]).ln();
    assert!((a0 - a1).abs() <= 1e-12);

    println!(
        "criterion 6: PASS — exact closed form, jitter margin {closest:.3e}, isotropic argmin \
         {argmin:.5}, convolution gap {worst:.3e}"
    );
}

#[test]
fn criterion_07_tsallis_coupling() {
    // λ̃ residual at the returned root.
    let mut rng = common::rng(7);
    let mut worst_residual = 0.0_f64;
    for _ in 0..10 {
        let dim = rng.random_range(1..=3);
        let s1 = common::random_spd(&mut rng, dim, 5.0);
        let s2 = common::random_spd(&mut rng, dim, 5.0);
        let q = 1.0 + rng.random_range(0.1..0.9) * 2.0 / (dim as f64 + 2.0);
        let lambda = rng.random_range(0.1..1.5);
        let lt = solve_lambda_tilde(&s1, &s2, q, lambda).unwrap();
        let t = q - 1.0;
        let qt = -2.0 * t / (2.0 + dim as f64 * t);
        let u = (lt * (qt.abs() / t) / (lambda * (1.0 + qt))).ln();
        let f = lambda_tilde_residual(&s1, &s2, q, lambda, qt);
        worst_residual = worst_residual.max(f(u).abs());
    }
    assert!(
        worst_residual <= 1e-10,
        "criterion 7: FAIL — solver residual {worst_residual:.3e}"
    );

    // Gaussian limit of the coupling cross block.
    let s1 = SpdMatrix::from_diagonal(&[1.0]).unwrap();
    let s2 = SpdMatrix::from_diagonal(&[2.0]).unwrap();
    let q_near_1 = 1.0 + 1e-6;
    let p = QNormal::new(dvector![0.0], s1.clone(), q_near_1).unwrap();
    let qd = QNormal::new(dvector![0.0], s2.clone(), q_near_1).unwrap();
    let coupling = qnormal_coupling(&p, &qd, 0.5).unwrap();
    let gauss = sigma_lambda(&s1, &s2, 0.5).unwrap()[(0, 0)];
    let limit_gap = (coupling.block_12()[(0, 0)] - gauss).abs();
    assert!(
        limit_gap <= 1e-4,
        "criterion 7: FAIL — Gaussian limit gap {limit_gap:.3e}"
    );

    // Grid marginalization for q ∈ {1.05, 1.2}; both offset conventions are
    // evaluated and the outcome recorded — this resolves the
    // coupling-parameter question.
    let sup_gap = |q: f64, s2v: f64, convention: QTildeConvention| -> f64 {
        let p = QNormal::new(
            dvector![0.0],
            SpdMatrix::from_diagonal(&[1.0]).unwrap(),
            q,
        )
        .unwrap();
        let qd = QNormal::new(
            dvector![0.0],
            SpdMatrix::from_diagonal(&[s2v]).unwrap(),
            q,
        )
        .unwrap();
        let coupling = qnormal_coupling_with(&p, &qd, 0.5, convention).unwrap();
        let mut sup = 0.0_f64;
        for k in 0..=32 {
            let x = -8.0 + 16.0 * k as f64 / 32.0;
            let marginal = quad::integrate(
                &|y| coupling.density(&dvector![x], &dvector![y]).unwrap(),
                -120.0 * s2v.sqrt(),
                120.0 * s2v.sqrt(),
                1e-10,
            )
            .unwrap();
            sup = sup.max((marginal - p.density(&dvector![x]).unwrap()).abs());
        }
        sup
    };
    let mut consistent_worst = 0.0_f64;
    let mut verbatim_best = f64::INFINITY;
    for (q, s2v) in [(1.05, 1.5), (1.2, 2.0)] {
        let plus = sup_gap(q, s2v, QTildeConvention::PlusDenominator);
        let minus = sup_gap(q, s2v, QTildeConvention::MinusDenominator);
        println!(
            "  q={q}: marginalization sup gap {plus:.3e} (offset 2+n(q−1) denominator) vs \
             {minus:.3e} (offset 2−n(q−1) denominator)"
        );
        consistent_worst = consistent_worst.max(plus);
        verbatim_best = verbatim_best.min(minus);
    }
    println!(
        "  coupling-parameter resolution: q̃ = −2(q−1)/(2+n(q−1)) (coupling parameter \
         1+2(q−1)/(2+n(q−1))) passes the 1e−3 guard; the printed-denominator variant fails"
    );
    assert!(
        consistent_worst <= 1e-3,
        "criterion 7: FAIL — marginalization sup gap {consistent_worst:.3e}"
    );
    assert!(verbatim_best > 1e-3, "criterion 7: unexpected verbatim-offset pass");

    println!(
        "criterion 7: PASS — residual {worst_residual:.3e}, Gaussian-limit gap {limit_gap:.3e}, \
         marginalization sup {consistent_worst:.3e}"
    );
}

#[test]
fn criterion_08_barycenter() {
    // Gradient vs independent directional finite differences on 50 triples.
    let mut rng = common::rng(8);
    let mut worst_grad = 0.0_f64;
    for _ in 0..50 {
        let dim = rng.random_range(1..=4);
        let s = common::random_spd(&mut rng, dim, 8.0);
        let q = common::random_gaussian(&mut rng, dim);
        let lambda = rng.random_range(0.0..1.5);
        let grad = euclidean_grad_cost(&s, &q, lambda).unwrap();
        // Random symmetric direction.
        let raw = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
        let dir = (&raw + raw.transpose()) * 0.5;
        let pairing = (grad.entries() * &dir).trace();
        // Independent central difference along `dir` with its own step.
        let h = 3e-6 * (s.trace() / dim as f64);
        let cost = |m: DMatrix<f64>| {
            let g = Gaussian::new(DVector::zeros(dim), SpdMatrix::new(m).unwrap()).unwrap();
            if lambda == 0.0 {
                wasserstein2_sq(&g, &q).unwrap() - (q.mean()).norm_squared()
            } else {
                entropic_cost(&g, &q, lambda).unwrap().total - (q.mean()).norm_squared()
            }
        };
        let fd = (cost(s.entries() + &dir * h) - cost(s.entries() - &dir * h)) / (2.0 * h);
        worst_grad = worst_grad.max((pairing - fd).abs() / (1.0 + fd.abs()));
    }
    assert!(
        worst_grad <= 1e-5,
        "criterion 8: FAIL — gradient vs directional FD gap {worst_grad:.3e}"
    );

    // m = 1 reduction to the closed-form smoothing estimator.
    let q = Gaussian::new(
        dvector![0.5, -0.2],
        SpdMatrix::new(DMatrix::from_row_slice(2, 2, &[1.1, 0.3, 0.3, 0.8])).unwrap(),
    )
    .unwrap();
    let lambda = 0.3;
    let problem = BarycenterProblem::new(vec![q.clone()], lambda).unwrap();
    let result = barycenter(&problem).unwrap();
    let expected = kantorovich_estimator_gaussian(&q, lambda).unwrap();
    let reduction_gap = (result.barycenter.cov().entries() - expected.cov().entries()).norm();
    assert!(
        reduction_gap <= 1e-6,
        "criterion 8: FAIL — m=1 reduction gap {reduction_gap:.3e}"
    );

    // 1D two-input unregularized case: variance ((1+2)/2)² = 2.25.
    let a = Gaussian::scalar(0.0, 1.0).unwrap();
    let b = Gaussian::scalar(0.0, 4.0).unwrap();
    let problem = BarycenterProblem::new(vec![a, b], 0.0).unwrap();
    let result = barycenter(&problem).unwrap();
    let variance = result.barycenter.cov().entries()[(0, 0)];
    assert!(
        (variance - 2.25).abs() <= 1e-5,
        "criterion 8: FAIL — barycenter variance {variance}"
    );

    println!(
        "criterion 8: PASS — gradient gap {worst_grad:.3e}, m=1 reduction {reduction_gap:.3e}, \
         1D variance {variance:.7}"
    );
}

#[test]
fn criterion_09_benchmark_table_reproduction() {
    // Documented protocol: Σ_true = I, centered MLE (1/N), estimated mean in
    // the KL. The reference MLE rows are Σ-invariant yet are not reproduced
    // by this (or any standard) protocol — see the per-cell report; the
    // assertions below state the criterion faithfully and are expected red.
    let mut config = ExperimentConfig::default_for(ExperimentKind::CovBenchmark);
    config.seed = 42;
    config.replications = 1000;
    let rows = run_cov_benchmark(&config).expect("benchmark runs");
    let cell = |dim: usize, n: usize, lambda: f64| {
        rows.iter()
            .find(|r| r.dim == dim && r.sample_size == n && r.lambda == lambda)
            .expect("cell exists")
    };

    let paper: [(usize, usize, f64, f64); 6] = [
        (5, 60, 0.062, 0.005),
        (15, 60, 1.346, 0.022),
        (30, 60, 10.69, 0.112),
        (5, 120, 0.024, 0.002),
        (15, 120, 0.490, 0.007),
        (30, 120, 2.810, 0.021),
    ];
    let mut mle_ok = true;
    for (dim, n, value, halfwidth) in paper {
        let row = cell(dim, n, 0.0);
        let within = (row.mean_error - value).abs() <= 3.0 * halfwidth;
        mle_ok &= within;
        println!(
            "  MLE row n={dim}, N={n}: measured {:.4} ± {:.4} vs reference {value} ± {halfwidth} \
             → {}",
            row.mean_error,
            row.ci_halfwidth,
            if within { "within 3 halfwidths" } else { "OUTSIDE 3 halfwidths" }
        );
    }

    // Qualitative ordering at N = 60.
    let beats = |dim: usize| cell(dim, 60, 0.1).mean_error < cell(dim, 60, 0.0).mean_error;
    let ordering_hi = beats(15) && beats(30);
    let ordering_lo = !beats(5);
    println!(
        "  λ=0.1 vs MLE at N=60: beats at n=15 {} / n=30 {}; beats at n=5 {} (criterion expects \
         it NOT to beat at n=5; under Σ_true = I a small ridge shrinks toward the true \
         covariance, so it always helps)",
        beats(15),
        beats(30),
        beats(5)
    );
    let n30 = (
        cell(30, 60, 0.1).mean_error,
        cell(30, 60, 0.01).mean_error,
        cell(30, 60, 0.0).mean_error,
    );
    let headline = n30.0 < n30.1 && n30.1 < n30.2;
    println!(
        "  n=30, N=60 ordering λ=0.1 < λ=0.01 < MLE: {} ({:.3} < {:.3} < {:.3})",
        headline, n30.0, n30.1, n30.2
    );

    let pass = mle_ok && ordering_hi && ordering_lo && headline;
    if pass {
        println!("criterion 9: PASS — tables reproduced within 3 halfwidths with the expected orderings");
    } else {
        println!(
            "criterion 9: FAIL — MLE rows within 3 halfwidths: {mle_ok}; λ=0.1 beats MLE at \
             n=15,30: {ordering_hi}; does not beat at n=5: {ordering_lo}; n=30 ordering: \
             {headline}. The reference MLE values are below every standard protocol variant by \
             ≈1.1·n/N and the n=5 clause contradicts Σ_true = I; see the project notes."
        );
        panic!("criterion 9 failed (expected: reference table values are not reproducible under the documented protocol)");
    }
}

#[test]
fn criterion_09_supplement_barycenter_benchmark_cross_checks() {
    // The barycenter tables are not hard gates; the m = 1 reduction and the
    // fixed-point sanity check stand in as the property-based acceptance.
    let mut config = ExperimentConfig::default_for(ExperimentKind::BarycenterBenchmark);
    config.dims = vec![5];
    config.sample_sizes = vec![60];
    config.lambdas = vec![0.0, 0.1];
    config.replications = 20;
    config.seed = 11;
    let bary_rows = run_barycenter_benchmark_with_m(&config, 1).expect("benchmark runs");

    let mut cov_config = ExperimentConfig::default_for(ExperimentKind::CovBenchmark);
    cov_config.dims = vec![5];
    cov_config.sample_sizes = vec![60];
    cov_config.lambdas = vec![0.0, 0.1];
    cov_config.replications = 20;
    cov_config.seed = 11;
    let cov_rows = run_cov_benchmark(&cov_config).expect("benchmark runs");

    let mut worst = 0.0_f64;
    for (b, c) in bary_rows.iter().zip(&cov_rows) {
        assert_eq!(b.lambda, c.lambda);
        worst = worst.max((b.mean_error - c.mean_error).abs());
    }
    assert!(
        worst <= 1e-4,
        "criterion 9 supplement: FAIL — m=1 barycenter benchmark deviates from the estimator \
         rows by {worst:.3e}"
    );

    // Identical inputs at the true covariance, λ = 0 → zero prediction error.
    let truth = Gaussian::standard(3);
    let problem =
        BarycenterProblem::new(vec![truth.clone(), truth.clone(), truth.clone()], 0.0).unwrap();
    let result = barycenter(&problem).unwrap();
    let err = entrot_experiments::metrics::kl_gaussian(&truth, &result.barycenter).unwrap();
    assert!(err <= 1e-10, "criterion 9 supplement: FAIL — fixed point error {err:.3e}");

    println!(
        "criterion 9 supplement: PASS — m=1 benchmark matches the estimator rows \
         (gap {worst:.3e}); identical-input fixed point error {err:.3e}"
    );
}

#[test]
fn criterion_10_cost_curve_properties() {
    let mut config = ExperimentConfig::default_for(ExperimentKind::CostCurve);
    config.lambdas = (0..=100).map(|k| k as f64 * 0.1).collect();
    let rows = run_cost_curve(&config).expect("curve runs");

    let intercept = rows[0].total;
    let expected = 4.0 - 2.0 * 3.0_f64.sqrt();
    assert!(
        (intercept - expected).abs() <= 1e-9,
        "criterion 10: FAIL — λ=0 intercept {intercept} vs {expected}"
    );

    // Transport stays below the independent-coupling bound tr(Σ₁)+tr(Σ₂) = 6;
    // the entropy term grows without bound.
    let max_transport = rows
        .iter()
        .map(|r| r.transport_term)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(
        max_transport <= 6.0 + 1e-9,
        "criterion 10: FAIL — transport term {max_transport} exceeds the bound"
    );
    let entropy_at = |lambda: f64| {
        rows.iter()
            .find(|r| (r.lambda - lambda).abs() < 1e-12)
            .and_then(|r| r.entropy_term)
            .expect("entropy recorded for positive λ")
    };
    let growth = entropy_at(10.0).abs() / entropy_at(1.0).abs();
    assert!(
        growth > 5.0,
        "criterion 10: FAIL — entropy term growth factor {growth} too small for unboundedness"
    );
    for r in &rows {
        let value = r.relative_total.expect("relative total recorded");
        assert!(
            value >= 0.0,
            "criterion 10: FAIL — relative total {value} negative at λ={}",
            r.lambda
        );
    }
    println!(
        "criterion 10: PASS — intercept {intercept:.12}, max transport {max_transport:.6} ≤ 6, \
         entropy growth ×{growth:.1}, relative total nonnegative"
    );
}
