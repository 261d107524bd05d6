use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use entrot::SpdMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random SPD matrix with log-uniform spectrum spanning roughly `cond`.
pub fn random_spd(rng: &mut impl Rng, dim: usize, cond: f64) -> SpdMatrix {
    let q = random_orthogonal(rng, dim);
    let half = cond.sqrt();
    let diag: Vec<f64> = (0..dim)
        .map(|i| {
            if dim == 1 {
                rng.random_range(0.5..2.0)
            } else {
                let t = i as f64 / (dim - 1) as f64;
                (half.ln() * (2.0 * t - 1.0)).exp()
            }
        })
        .collect();
    let d = DMatrix::from_diagonal(&DVector::from_row_slice(&diag));
    SpdMatrix::new(&q * d * q.transpose()).expect("construction is SPD")
}

pub fn random_orthogonal(rng: &mut impl Rng, dim: usize) -> DMatrix<f64> {
    let raw = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
    raw.qr().q()
}

pub fn random_gaussian(rng: &mut impl Rng, dim: usize) -> entrot::Gaussian {
    let mean = DVector::from_fn(dim, |_, _| rng.random_range(-2.0..2.0));
    entrot::Gaussian::new(mean, random_spd(rng, dim, 20.0)).unwrap()
}
