//! Gaussian KL divergence, the benchmarks' prediction-error metric.

use entrot::error::{Error, Result};
use entrot::Gaussian;

/// KL(P‖Q) between Gaussians:
/// ½[tr(Σ_Q⁻¹Σ_P) + (μ_Q−μ_P)ᵀΣ_Q⁻¹(μ_Q−μ_P) − n + log(|Σ_Q|/|Σ_P|)].
pub fn kl_gaussian(p: &Gaussian, q: &Gaussian) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    let n = p.dim() as f64;
    let q_inv = q.cov().inverse();
    let d = q.mean() - p.mean();
    let trace = (q_inv.entries() * p.cov().entries()).trace();
    let quad = d.dot(&(q_inv.entries() * &d));
    Ok(0.5 * (trace + quad - n + q.cov().logdet() - p.cov().logdet()))
}
