//! Validated symmetric / symmetric positive definite matrix types and the
//! eigendecomposition-based matrix-function kernel built on them.
//!
//! `SpdMatrix` is the workhorse of every closed form in this crate: it owns a
//! dense symmetric matrix whose smallest eigenvalue was checked to be strictly
//! positive at construction. `SymMatrix` relaxes definiteness and is used for
//! tangent vectors and gradients.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative tolerance for the symmetry check at construction. Matrices failing
/// symmetry by less are symmetrized as (A + Aᵀ)/2; larger violations are errors.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Default ε of the Newton–Schulz scaling `Y ← A/((1+ε)‖A‖)`. Keeps the
/// spectral radius of the scaled iterate strictly below one.
pub const NEWTON_SCHULZ_EPS: f64 = 1e-2;
/// Default relative stagnation tolerance ‖Y_{k+1}−Y_k‖_F ≤ tol·‖Y_k‖_F.
pub const NEWTON_SCHULZ_TOL: f64 = 1e-12;
/// Default iteration cap for the Newton–Schulz loop.
pub const NEWTON_SCHULZ_MAX_ITER: usize = 100;

fn check_square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

/// Validates symmetry to `SYMMETRY_TOLERANCE` and returns the symmetrized matrix.
fn symmetrize_checked(m: DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_square(&m)?;
    let mut violation = 0.0_f64;
    let mut magnitude = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..i {
            violation = violation.max((m[(i, j)] - m[(j, i)]).abs());
        }
        for j in 0..m.ncols() {
            magnitude = magnitude.max(m[(i, j)].abs());
        }
    }
    let tolerance = SYMMETRY_TOLERANCE * magnitude.max(1.0);
    if violation > tolerance {
        return Err(Error::NotSymmetric {
            violation,
            tolerance,
        });
    }
    Ok((&m + m.transpose()) * 0.5)
}

/// Symmetric matrix, not necessarily definite.
///
/// Houses tangent vectors and Euclidean gradients on the SPD manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    entries: DMatrix<f64>,
}

impl SymMatrix {
    /// Validates symmetry (same tolerance as [`SpdMatrix`]) and symmetrizes.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        Ok(Self {
            entries: symmetrize_checked(entries)?,
        })
    }

    /// Symmetrizes without the violation check. For internal results that are
    /// symmetric by construction up to rounding.
    pub(crate) fn from_unchecked(entries: DMatrix<f64>) -> Self {
        let sym = (&entries + entries.transpose()) * 0.5;
        Self { entries: sym }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: DMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Matrix exponential of a symmetric matrix, via eigendecomposition.
    ///
    /// The exponential of a symmetric matrix is SPD; `exp(0) = I`.
    pub fn matrix_exp(&self) -> SpdMatrix {
        let eig = SymmetricEigen::new(self.entries.clone());
        let d = eig.eigenvalues.map(f64::exp);
        let m = &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose();
        SpdMatrix::from_unchecked(m)
    }
}

/// Symmetric positive definite matrix.
///
/// Construction symmetrizes (within tolerance) and rejects any matrix whose
/// smallest eigenvalue is not strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    entries: DMatrix<f64>,
}

impl SpdMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let sym = symmetrize_checked(entries)?;
        let min_eigenvalue = SymmetricEigen::new(sym.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if !(min_eigenvalue > 0.0) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue });
        }
        Ok(Self { entries: sym })
    }

    /// Wraps a matrix that is SPD by construction (e.g. recomposed from a
    /// positive spectrum), skipping the eigenvalue check but symmetrizing
    /// against rounding.
    pub(crate) fn from_unchecked(entries: DMatrix<f64>) -> Self {
        let sym = (&entries + entries.transpose()) * 0.5;
        Self { entries: sym }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        if let Some(&d) = diag.iter().find(|d| !(**d > 0.0)) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: d });
        }
        Ok(Self {
            entries: DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(diag)),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    fn eigen(&self) -> SymmetricEigen<f64, nalgebra::Dyn> {
        SymmetricEigen::new(self.entries.clone())
    }

    /// Applies `f` to the spectrum and recomposes. The caller guarantees `f`
    /// maps the positive axis to positive values.
    fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> SpdMatrix {
        let eig = self.eigen();
        let d = eig.eigenvalues.map(f);
        let m = &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose();
        SpdMatrix::from_unchecked(m)
    }

    /// Principal square root via eigendecomposition: the accuracy reference
    /// for the Newton–Schulz route.
    pub fn sqrt_eigen(&self) -> SpdMatrix {
        self.map_spectrum(f64::sqrt)
    }

    /// Inverse principal square root via eigendecomposition.
    pub fn invsqrt_eigen(&self) -> SpdMatrix {
        self.map_spectrum(|x| 1.0 / x.sqrt())
    }

    /// Square root and inverse square root from a single eigendecomposition.
    pub(crate) fn sqrt_pair(&self) -> (SpdMatrix, SpdMatrix) {
        let eig = self.eigen();
        let sq = eig.eigenvalues.map(f64::sqrt);
        let inv = sq.map(|x| 1.0 / x);
        let vt = eig.eigenvectors.transpose();
        let root = &eig.eigenvectors * DMatrix::from_diagonal(&sq) * &vt;
        let inv_root = &eig.eigenvectors * DMatrix::from_diagonal(&inv) * &vt;
        (
            SpdMatrix::from_unchecked(root),
            SpdMatrix::from_unchecked(inv_root),
        )
    }

    /// Coupled Newton–Schulz iteration for the principal square root.
    ///
    /// Initializes `Y ← A/((1+eps)·‖A‖_F)`, `Z ← I`, repeats
    /// `T ← (3I − ZY)/2; Y ← YT; Z ← TZ` until ‖Y_{k+1}−Y_k‖_F ≤ tol·‖Y_k‖_F,
    /// and returns √((1+eps)·‖A‖_F)·Y. Non-convergence within `max_iter`
    /// signals ill-conditioned input.
    pub fn sqrt_newton_schulz(&self, eps: f64, max_iter: usize, tol: f64) -> Result<SpdMatrix> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                message: format!("must be positive, got {eps}"),
            });
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tol",
                message: format!("must be positive, got {tol}"),
            });
        }
        let n = self.dim();
        let scale = (1.0 + eps) * self.entries.norm();
        let identity = DMatrix::<f64>::identity(n, n);
        let mut y = &self.entries / scale;
        let mut z = identity.clone();
        let mut residual = f64::INFINITY;
        for iteration in 0..max_iter {
            let t = (&identity * 3.0 - &z * &y) * 0.5;
            let y_next = &y * &t;
            z = &t * z;
            residual = (&y_next - &y).norm() / y.norm().max(f64::MIN_POSITIVE);
            let diverged = !residual.is_finite();
            y = y_next;
            if diverged {
                return Err(Error::DidNotConverge {
                    what: "Newton-Schulz square root",
                    iterations: iteration + 1,
                    residual,
                });
            }
            if residual <= tol {
                return Ok(SpdMatrix::from_unchecked(y * scale.sqrt()));
            }
        }
        Err(Error::DidNotConverge {
            what: "Newton-Schulz square root",
            iterations: max_iter,
            residual,
        })
    }

    /// Newton–Schulz square root with the default ε, iteration cap and tolerance.
    pub fn sqrt_newton_schulz_default(&self) -> Result<SpdMatrix> {
        self.sqrt_newton_schulz(NEWTON_SCHULZ_EPS, NEWTON_SCHULZ_MAX_ITER, NEWTON_SCHULZ_TOL)
    }

    /// Log-determinant; `logdet(I) = 0`.
    pub fn logdet(&self) -> f64 {
        match nalgebra::Cholesky::new(self.entries.clone()) {
            Some(chol) => 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>(),
            // Near-singular but validated-positive input: fall back to the spectrum.
            None => self.eigenvalues().iter().map(|v| v.ln()).sum(),
        }
    }

    /// Inverse via Cholesky, symmetrized.
    pub fn inverse(&self) -> SpdMatrix {
        match nalgebra::Cholesky::new(self.entries.clone()) {
            Some(chol) => SpdMatrix::from_unchecked(chol.inverse()),
            None => self.map_spectrum(|x| 1.0 / x),
        }
    }

    /// Eigenvalues sorted ascending; all positive for a valid `SpdMatrix`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = self.eigen();
        let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
        v
    }

    /// Eigendecomposition with eigenvalues sorted descending and the
    /// eigenvector columns permuted to match.
    pub(crate) fn eigen_descending(&self) -> (Vec<f64>, DMatrix<f64>) {
        let eig = self.eigen();
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&i, &j| {
            eig.eigenvalues[j]
                .partial_cmp(&eig.eigenvalues[i])
                .expect("eigenvalues are finite")
        });
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = DMatrix::zeros(self.dim(), self.dim());
        for (col, &i) in order.iter().enumerate() {
            vectors.set_column(col, &eig.eigenvectors.column(i));
        }
        (values, vectors)
    }
}

impl From<&SpdMatrix> for SymMatrix {
    fn from(value: &SpdMatrix) -> Self {
        SymMatrix {
            entries: value.entries.clone(),
        }
    }
}
