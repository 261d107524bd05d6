//! The 10×10 family of rotated anisotropic covariances used by the embedding
//! experiment: Σ_{r,k} = R(2πk/10)ᵀ·diag(1, √(r/10))·R(2πk/10).

use nalgebra::DMatrix;

use entrot::error::{Error, Result};
use entrot::SpdMatrix;

/// Σ_{r,k} for r, k ∈ 1..=10; eigenvalues are exactly {1, √(r/10)}.
pub fn sigma_grid(r: usize, k: usize) -> Result<SpdMatrix> {
    if !(1..=10).contains(&r) || !(1..=10).contains(&k) {
        return Err(Error::InvalidParameter {
            name: "r,k",
            message: format!("indices must be in 1..=10, got ({r}, {k})"),
        });
    }
    let theta = 2.0 * std::f64::consts::PI * k as f64 / 10.0;
    let (sin, cos) = theta.sin_cos();
    let rot = DMatrix::from_row_slice(2, 2, &[cos, -sin, sin, cos]);
    let diag = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, (r as f64 / 10.0).sqrt()]);
    SpdMatrix::new(rot.transpose() * diag * rot)
}
