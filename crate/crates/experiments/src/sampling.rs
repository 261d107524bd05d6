//! Seeded sampling for the Monte Carlo benchmarks.
//!
//! Reproducibility contract: replication r of a benchmark cell draws from the
//! counter-derived substream seed ⊕ r, so results are independent of
//! evaluation order and identical across runs.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use entrot::{Gaussian, SpdMatrix};

use crate::config::SigmaTrue;
use crate::error::{Error, Result};

/// Per-replication RNG substream.
pub fn substream(seed: u64, replication: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ replication)
}

/// Lower Cholesky factor used to color standard-normal draws.
pub fn cholesky_factor(cov: &SpdMatrix) -> DMatrix<f64> {
    Cholesky::new(cov.entries().clone())
        .expect("validated SPD matrix has a Cholesky factor")
        .l()
}

/// One sample x = L·z with z standard normal.
pub fn sample_gaussian(rng: &mut impl Rng, factor: &DMatrix<f64>) -> DVector<f64> {
    let z = DVector::from_fn(factor.nrows(), |_, _| rng.sample(StandardNormal));
    factor * z
}

/// Maximum-likelihood fit of `count` samples from N(0, Σ_true): sample mean
/// and the 1/N centered covariance. Errors when N ≤ dim (singular Σ̂).
pub fn sample_mle(
    rng: &mut impl Rng,
    factor: &DMatrix<f64>,
    count: usize,
) -> Result<(DVector<f64>, SpdMatrix)> {
    let dim = factor.nrows();
    if count <= dim {
        return Err(Error::Config(format!(
            "sample size {count} with dimension {dim} gives a singular covariance estimate"
        )));
    }
    let samples: Vec<DVector<f64>> = (0..count).map(|_| sample_gaussian(rng, factor)).collect();
    let mut mean = DVector::zeros(dim);
    for s in &samples {
        mean += s;
    }
    mean /= count as f64;
    let mut cov = DMatrix::zeros(dim, dim);
    for s in &samples {
        let d = s - &mean;
        cov += &d * d.transpose();
    }
    cov /= count as f64;
    Ok((mean, SpdMatrix::new(cov)?))
}

/// The benchmark's true distribution N(0, Σ_true) in the given dimension.
pub fn true_distribution(sigma: SigmaTrue, dim: usize) -> Result<Gaussian> {
    let cov = match sigma {
        SigmaTrue::Identity => SpdMatrix::identity(dim),
        SigmaTrue::Wishart { seed } => {
            // Wishart-style draw with 2·dim degrees of freedom, mean I.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dof = 2 * dim;
            let mut acc = DMatrix::zeros(dim, dim);
            for _ in 0..dof {
                let z = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
                acc += &z * z.transpose();
            }
            SpdMatrix::new(acc / dof as f64)?
        }
    };
    Ok(Gaussian::new(DVector::zeros(dim), cov)?)
}

/// 95% normal-approximation confidence halfwidth: 1.96·s/√n with the
/// unbiased sample standard deviation.
pub fn ci_halfwidth(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    1.96 * (var / n as f64).sqrt()
}
