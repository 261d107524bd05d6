//! Entropy-regularized optimal transport on multivariate normal and q-normal
//! distributions, in closed form.
//!
//! The crate provides:
//!
//! - [`spd`]: validated SPD/symmetric matrix types and the matrix-analysis
//!   kernel (eigendecomposition-based functions, Newton–Schulz square root).
//! - [`gaussian`]: the entropic optimal coupling Σ_λ of two Gaussians, the
//!   cost C_λ with its transport/entropy split, the relative-entropy variant
//!   C̃_λ, the λ = 0 Bures–Wasserstein closed form, eigenvalue structure, and
//!   the cost-extremal spectrum alignments.
//! - [`qnormal`]: q-exponential calculus, multivariate q-normal densities via
//!   the t correspondence, and the Tsallis-entropy-regularized coupling with
//!   the λ̃ self-consistency solve.
//! - [`kantorovich`]: the smoothing estimator argmin_Q C_λ(P, Q) — closed
//!   form for Gaussians, quadrature convolution for general densities — and
//!   its dual potential.
//! - [`barycenter`]: entropic Wasserstein barycenters of Gaussians by
//!   Riemannian gradient descent on the SPD manifold.
//! - [`sinkhorn`]: an independent grid-discretization Sinkhorn oracle used to
//!   cross-validate every closed form (convention: ε = 4λ).
//! - [`quad`]: adaptive Gauss–Kronrod quadrature used by the density paths.
//!
//! All operations are pure functions over immutable values and safe to call
//! concurrently.

pub mod barycenter;
pub mod error;
pub mod gaussian;
pub mod kantorovich;
pub mod qnormal;
pub mod quad;
pub mod sinkhorn;
pub mod spd;

pub use error::{Error, Result};
pub use gaussian::{
    coupling_eigenvalues, entropic_cost, extremal_alignment, optimal_coupling, sigma_lambda,
    transport_term, wasserstein2_sq, CostBreakdown, Gaussian, GaussianCoupling,
};
pub use spd::{SpdMatrix, SymMatrix};
