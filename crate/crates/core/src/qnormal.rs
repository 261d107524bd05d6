//! q-exponential calculus, multivariate q-normal densities, and the
//! Tsallis-entropy-regularized optimal coupling with its λ̃ self-consistency
//! solve.
//!
//! A q-normal N_q(μ, Σ) has density (1/C_q(Σ))·exp_q(−(x−μ)ᵀΣ⁻¹(x−μ)). For
//! 1 < q < 1+2/n it is a multivariate t distribution with ν = 2/(q−1) − n
//! degrees of freedom and t-scale Σ/(2−n(q−1)); the q < 1 branch has bounded
//! support and a quadrature normalizer (n ≤ 2). In the t picture the optimal
//! coupling of two n-variate q-normals is the 2n-variate t with the *same* ν
//! and scale [[Σ₁, Σ_λ̃], [Σ_λ̃ᵀ, Σ₂]]/(2−n(q−1)): marginalization preserves ν
//! and the scale blocks, so the marginals are exactly the inputs.

use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::gaussian::sigma_lambda;
use crate::quad;
use crate::spd::SpdMatrix;

/// q-logarithm: (u^{1−q} − 1)/(1−q) for q ≠ 1, log u at q = 1. Requires u > 0.
pub fn q_log(u: f64, q: f64) -> f64 {
    assert!(u > 0.0, "q_log requires a positive argument, got {u}");
    if q == 1.0 {
        u.ln()
    } else {
        ((1.0 - q) * u.ln()).exp_m1() / (1.0 - q)
    }
}

/// q-exponential: [1 + (1−q)u]₊^{1/(1−q)} for q ≠ 1, exp(u) at q = 1.
///
/// The positive-part clamp makes this total: a nonpositive bracket maps to 0.
pub fn q_exp(u: f64, q: f64) -> f64 {
    if q == 1.0 {
        u.exp()
    } else {
        let bracket = 1.0 + (1.0 - q) * u;
        if bracket <= 0.0 {
            0.0
        } else {
            (bracket.ln() / (1.0 - q)).exp()
        }
    }
}

/// Parameter of the p-dimensional marginal of an n-dimensional q-normal:
/// 1 + 2(q−1)/(2−(n−p)(q−1)). In the t picture the degrees of freedom are
/// preserved and only the dimension changes.
pub fn marginal_q_parameter(n: usize, p: usize, q: f64) -> Result<f64> {
    check_coupling_range(n, q)?;
    if p < 1 || p > n {
        return Err(Error::InvalidParameter {
            name: "p",
            message: format!("marginal dimension must be in 1..={n}, got {p}"),
        });
    }
    let t = q - 1.0;
    Ok(1.0 + 2.0 * t / (2.0 - (n - p) as f64 * t))
}

/// The regularizer's offset parameter q̃ = −2(q−1)/(2−n(q−1));
/// negative throughout the admissible range 1 < q < 1+2/(n+2).
pub fn q_tilde(n: usize, q: f64) -> Result<f64> {
    check_coupling_range(n, q)?;
    let t = q - 1.0;
    Ok(-2.0 * t / (2.0 - n as f64 * t))
}

/// Sign convention of the denominator in the coupling offset q̃.
///
/// The grid-marginalization guard adjudicates between the two: only
/// [`QTildeConvention::PlusDenominator`] yields a coupling whose marginals
/// reproduce the input q-normals (the t-picture requires the coupling to keep
/// the inputs' degrees of freedom).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QTildeConvention {
    /// q̃ = −2(q−1)/(2−n(q−1)): the coupling's marginals come out heavier-
    /// tailed than the inputs.
    MinusDenominator,
    /// q̃ = −2(q−1)/(2+n(q−1)): marginalization is exact. Default.
    PlusDenominator,
}

fn offset_for(n: usize, q: f64, convention: QTildeConvention) -> Result<f64> {
    check_coupling_range(n, q)?;
    let t = q - 1.0;
    let denom = match convention {
        QTildeConvention::MinusDenominator => 2.0 - n as f64 * t,
        QTildeConvention::PlusDenominator => 2.0 + n as f64 * t,
    };
    let qt = -2.0 * t / denom;
    // The 2n-dimensional coupling normalizes only for |q̃| < 1/n.
    if qt.abs() >= 1.0 / n as f64 {
        return Err(Error::InvalidParameter {
            name: "q",
            message: format!(
                "offset {qt:.6} has |q̃| ≥ 1/n: the coupling density does not normalize"
            ),
        });
    }
    Ok(qt)
}

fn check_coupling_range(n: usize, q: f64) -> Result<()> {
    let upper = 1.0 + 2.0 / (n as f64 + 2.0);
    if !(q > 1.0 && q < upper) {
        return Err(Error::InvalidParameter {
            name: "q",
            message: format!("requires 1 < q < {upper} in dimension {n}, got {q}"),
        });
    }
    Ok(())
}

/// Multivariate q-normal distribution (location, SPD scale, parameter q).
#[derive(Debug, Clone)]
pub struct QNormal {
    loc: DVector<f64>,
    scale: SpdMatrix,
    q: f64,
    /// Normalizing constant C_q(Σ); for q ≤ 1 computed eagerly (quadrature on
    /// the bounded-support branch), for q > 1 via the t correspondence.
    log_normalizer: f64,
}

impl QNormal {
    pub fn new(loc: DVector<f64>, scale: SpdMatrix, q: f64) -> Result<Self> {
        let n = scale.dim();
        if loc.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: loc.len(),
            });
        }
        if q > 1.0 && q >= 1.0 + 2.0 / n as f64 {
            return Err(Error::InvalidParameter {
                name: "q",
                message: format!("needs q < 1 + 2/n = {} for normalizability", 1.0 + 2.0 / n as f64),
            });
        }
        if q < 1.0 && n > 2 {
            return Err(Error::InvalidParameter {
                name: "q",
                message: "the bounded-support branch (q < 1) is only supported for n ≤ 2".into(),
            });
        }
        let log_normalizer = log_normalizer(&scale, q)?;
        Ok(Self {
            loc,
            scale,
            q,
            log_normalizer,
        })
    }

    pub fn dim(&self) -> usize {
        self.loc.len()
    }

    pub fn loc(&self) -> &DVector<f64> {
        &self.loc
    }

    pub fn scale(&self) -> &SpdMatrix {
        &self.scale
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Degrees of freedom of the equivalent t distribution (1 < q < 1+2/n).
    pub fn t_dof(&self) -> Option<f64> {
        (self.q > 1.0).then(|| 2.0 / (self.q - 1.0) - self.dim() as f64)
    }

    /// Density (1/C_q(Σ))·exp_q(−(x−μ)ᵀΣ⁻¹(x−μ)).
    pub fn density(&self, x: &DVector<f64>) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let d = x - &self.loc;
        let quad = d.dot(&(self.scale.inverse().entries() * &d));
        Ok(q_exp(-quad, self.q) * (-self.log_normalizer).exp())
    }
}

/// log C_q(Σ) for the density (1/C_q)·exp_q(−dᵀΣ⁻¹d).
fn log_normalizer(scale: &SpdMatrix, q: f64) -> Result<f64> {
    let n = scale.dim() as f64;
    if q == 1.0 {
        // exp(−dᵀΣ⁻¹d) integrates to π^{n/2}|Σ|^{1/2}.
        return Ok(0.5 * n * std::f64::consts::PI.ln() + 0.5 * scale.logdet());
    }
    if q > 1.0 {
        // t correspondence: C_q(Σ) = 1/K_t with the t constant at scale Σ_t.
        let nu = 2.0 / (q - 1.0) - n;
        let logdet_t = scale.logdet() - n * (nu * (q - 1.0)).ln();
        let log_kt = ln_gamma((nu + n) / 2.0)
            - ln_gamma(nu / 2.0)
            - 0.5 * n * (nu * std::f64::consts::PI).ln()
            - 0.5 * logdet_t;
        return Ok(-log_kt);
    }
    // Bounded support: C_q(Σ) = |Σ|^{1/2} · ∫ exp_q(−wᵀw) dw over the ball
    // wᵀw ≤ 1/(1−q), by quadrature (n ≤ 2, enforced at construction).
    let radius = (1.0 / (1.0 - q)).sqrt();
    let n_int = scale.dim();
    let unit = if n_int == 1 {
        quad::integrate(&|w| q_exp(-w * w, q), -radius, radius, 1e-12)?
    } else {
        // radial reduction: ∫_{R²} f(‖w‖²) dw = 2π ∫₀^R r f(r²) dr
        2.0 * std::f64::consts::PI
            * quad::integrate(&|r| r * q_exp(-r * r, q), 0.0, radius, 1e-12)?
    };
    Ok(0.5 * scale.logdet() + unit.ln())
}

/// Optimal Tsallis-entropic coupling of two q-normals: a 2n-dimensional
/// q-normal (equivalently a 2n-variate t) with cross block Σ_λ̃.
#[derive(Debug, Clone)]
pub struct QNormalCoupling {
    loc: DVector<f64>,
    block_11: SpdMatrix,
    block_22: SpdMatrix,
    block_12: DMatrix<f64>,
    q_coupling: f64,
    lambda_tilde: f64,
    /// Degrees of freedom of the coupling in the t picture.
    t_dof: f64,
    /// Divisor converting the displayed scale blocks to the t scale.
    t_scale_divisor: f64,
}

impl QNormalCoupling {
    pub fn dim(&self) -> usize {
        self.block_11.dim()
    }

    pub fn loc(&self) -> &DVector<f64> {
        &self.loc
    }

    pub fn block_11(&self) -> &SpdMatrix {
        &self.block_11
    }

    pub fn block_22(&self) -> &SpdMatrix {
        &self.block_22
    }

    pub fn block_12(&self) -> &DMatrix<f64> {
        &self.block_12
    }

    /// Parameter of the coupling distribution (2n-dimensional).
    pub fn q_coupling(&self) -> f64 {
        self.q_coupling
    }

    pub fn lambda_tilde(&self) -> f64 {
        self.lambda_tilde
    }

    /// Assembled 2n×2n scale matrix as displayed: [[Σ₁, Σ_λ̃], [Σ_λ̃ᵀ, Σ₂]].
    pub fn assembled_scale(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut full = DMatrix::zeros(2 * n, 2 * n);
        full.view_mut((0, 0), (n, n)).copy_from(self.block_11.entries());
        full.view_mut((n, n), (n, n)).copy_from(self.block_22.entries());
        full.view_mut((0, n), (n, n)).copy_from(&self.block_12);
        full.view_mut((n, 0), (n, n))
            .copy_from(&self.block_12.transpose());
        full
    }

    /// Coupling density at the stacked point (x, y), evaluated in the t
    /// picture (dim 2n, dof `t_dof`, scale `assembled/t_scale_divisor`).
    pub fn density(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        let n = self.dim();
        if x.len() != n || y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.len().max(y.len()),
            });
        }
        let m = 2.0 * n as f64;
        let nu = self.t_dof;
        let scale_t = self.assembled_scale() / self.t_scale_divisor;
        let scale_t = SpdMatrix::new(scale_t)
            .map_err(|e| Error::InternalInconsistency(format!("coupling scale: {e}")))?;
        let mut z = DVector::zeros(2 * n);
        z.rows_mut(0, n).copy_from(x);
        z.rows_mut(n, n).copy_from(y);
        let d = &z - &self.loc;
        let quad = d.dot(&(scale_t.inverse().entries() * &d));
        let log_k = ln_gamma((nu + m) / 2.0)
            - ln_gamma(nu / 2.0)
            - 0.5 * m * (nu * std::f64::consts::PI).ln()
            - 0.5 * scale_t.logdet();
        Ok((log_k - 0.5 * (nu + m) * (1.0 + quad / nu).ln()).exp())
    }
}

/// Solves the λ̃ self-consistency equation for the coupling cross block,
/// under the default (marginal-consistent) offset convention.
///
/// Writing c for the separated normalization constant, the fixed point is
/// c = C^{|q̃|} with C the coupling normalizer at λ̃(c) = λ(1+q̃)c/κ,
/// κ = |q̃|/(q−1). The log-residual f(log c) = |q̃|·log C − log c is strictly
/// decreasing with f → +∞ as c → 0 and f → −∞ as c → ∞, so a doubling
/// bracket plus bisection always converges; a safeguarded Newton step
/// sharpens the root. Residual at the returned point is ≤ 1e−10.
pub fn solve_lambda_tilde(s1: &SpdMatrix, s2: &SpdMatrix, q: f64, lambda: f64) -> Result<f64> {
    solve_lambda_tilde_with(s1, s2, q, lambda, QTildeConvention::PlusDenominator)
}

/// λ̃ solve under an explicit offset convention (see [`QTildeConvention`]).
pub fn solve_lambda_tilde_with(
    s1: &SpdMatrix,
    s2: &SpdMatrix,
    q: f64,
    lambda: f64,
    convention: QTildeConvention,
) -> Result<f64> {
    if s1.dim() != s2.dim() {
        return Err(Error::DimensionMismatch {
            expected: s1.dim(),
            found: s2.dim(),
        });
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            message: format!("must be positive, got {lambda}"),
        });
    }
    let n = s1.dim();
    let qt = offset_for(n, q, convention)?;
    let residual_fn = lambda_tilde_residual(s1, s2, q, lambda, qt);

    // Doubling bracket around c = 1 (u = log c); f is decreasing, so the
    // bracket satisfies f(lo) > 0 > f(hi).
    const MAX_DOUBLINGS: usize = 200;
    let step = std::f64::consts::LN_2;
    let f0 = residual_fn(0.0);
    let (mut lo, mut hi) = (0.0_f64, 0.0_f64);
    if f0 > 0.0 {
        let mut expanded = None;
        for k in 1..=MAX_DOUBLINGS {
            let u = k as f64 * step;
            if residual_fn(u) <= 0.0 {
                expanded = Some(u);
                break;
            }
            lo = u;
        }
        hi = expanded.ok_or(Error::DidNotConverge {
            what: "lambda-tilde bracket expansion",
            iterations: MAX_DOUBLINGS,
            residual: residual_fn(MAX_DOUBLINGS as f64 * step),
        })?;
    } else if f0 < 0.0 {
        let mut expanded = None;
        for k in 1..=MAX_DOUBLINGS {
            let u = -(k as f64) * step;
            if residual_fn(u) >= 0.0 {
                expanded = Some(u);
                break;
            }
            hi = u;
        }
        lo = expanded.ok_or(Error::DidNotConverge {
            what: "lambda-tilde bracket expansion",
            iterations: MAX_DOUBLINGS,
            residual: residual_fn(-(MAX_DOUBLINGS as f64) * step),
        })?;
    }

    // Bisection on the monotone decreasing residual.
    let mut u = 0.5 * (lo + hi);
    for _ in 0..200 {
        u = 0.5 * (lo + hi);
        let f = residual_fn(u);
        if f.abs() <= 1e-13 || (hi - lo) < 1e-15 {
            break;
        }
        if f > 0.0 {
            lo = u;
        } else {
            hi = u;
        }
    }
    // Safeguarded Newton refinement with a numerical slope.
    for _ in 0..4 {
        let f = residual_fn(u);
        let h = 1e-7;
        let slope = (residual_fn(u + h) - residual_fn(u - h)) / (2.0 * h);
        if slope == 0.0 {
            break;
        }
        let candidate = u - f / slope;
        if candidate.is_finite() && candidate > lo && candidate < hi {
            u = candidate;
        } else {
            break;
        }
    }
    let residual = residual_fn(u).abs();
    if residual > 1e-10 {
        return Err(Error::DidNotConverge {
            what: "lambda-tilde self-consistency",
            iterations: 200,
            residual,
        });
    }
    let t = q - 1.0;
    let kappa = qt.abs() / t;
    Ok(lambda * (1.0 + qt) * u.exp() / kappa)
}

/// Residual f(log c) of the self-consistency equation, as a closure.
///
/// Exposed to the tests that scan f on a log grid and check monotonicity.
pub fn lambda_tilde_residual(
    s1: &SpdMatrix,
    s2: &SpdMatrix,
    q: f64,
    lambda: f64,
    qt: f64,
) -> impl Fn(f64) -> f64 {
    let n = s1.dim();
    let t = q - 1.0;
    let kappa = qt.abs() / t;
    let aq = qt.abs();
    let root = s1.sqrt_eigen();
    let nu0 = SpdMatrix::from_unchecked(root.entries() * s2.entries() * root.entries())
        .eigenvalues();
    let log_k = n as f64 * std::f64::consts::PI.ln() + ln_gamma(1.0 / aq - n as f64)
        - ln_gamma(1.0 / aq);
    move |u: f64| {
        let lt = lambda * (1.0 + qt) * u.exp() / kappa;
        // |Σ̄| = κ^{2n} · ∏ᵢ 2λ̃·(√(ν₀ᵢ + λ̃²) − λ̃)
        let logdet: f64 = 2.0 * n as f64 * kappa.ln()
            + nu0
                .iter()
                .map(|v| (2.0 * lt * crate::gaussian::shifted_sqrt_gap(*v, lt)).ln())
                .sum::<f64>();
        let log_c_norm = -(n as f64) * aq.ln() + log_k + 0.5 * logdet;
        aq * log_c_norm - u
    }
}

/// Optimal Tsallis-entropic coupling of P and Q (shared q and dimension,
/// 1 < q < 1+2/(n+2)), under the marginal-consistent convention.
pub fn qnormal_coupling(p: &QNormal, q_dist: &QNormal, lambda: f64) -> Result<QNormalCoupling> {
    qnormal_coupling_with(p, q_dist, lambda, QTildeConvention::PlusDenominator)
}

/// Coupling construction under an explicit offset convention. The
/// `MinusDenominator` variant exists so the marginalization guard can
/// demonstrate which convention reproduces the input marginals.
pub fn qnormal_coupling_with(
    p: &QNormal,
    q_dist: &QNormal,
    lambda: f64,
    convention: QTildeConvention,
) -> Result<QNormalCoupling> {
    if p.dim() != q_dist.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q_dist.dim(),
        });
    }
    if p.q() != q_dist.q() {
        return Err(Error::InvalidParameter {
            name: "q",
            message: format!("marginals must share q, got {} and {}", p.q(), q_dist.q()),
        });
    }
    let n = p.dim();
    let q = p.q();
    let t = q - 1.0;
    let qt = offset_for(n, q, convention)?;
    let q_coupling = 1.0 - qt;
    // t picture of the coupling: dof and display→t-scale divisor. Both reduce
    // to (2/(q_c−1) − 2n, exp_q-scale/(…)) of the 2n-dim coupling; under the
    // consistent convention they equal the inputs' (ν, 2−n(q−1)).
    let nu_c = 2.0 / (q_coupling - 1.0) - 2.0 * n as f64;
    let kappa = qt.abs() / t;
    let t_scale_divisor = (2.0 - 2.0 * n as f64 * (q_coupling - 1.0)) / kappa;
    if !(nu_c > 0.0 && t_scale_divisor > 0.0) {
        return Err(Error::InvalidParameter {
            name: "q",
            message: format!(
                "coupling parameter {q_coupling} has no valid t representation (dof {nu_c})"
            ),
        });
    }
    let lambda_tilde = solve_lambda_tilde_with(p.scale(), q_dist.scale(), q, lambda, convention)?;
    let block_12 = sigma_lambda(p.scale(), q_dist.scale(), lambda_tilde)?;
    let mut loc = DVector::zeros(2 * n);
    loc.rows_mut(0, n).copy_from(p.loc());
    loc.rows_mut(n, n).copy_from(q_dist.loc());
    let coupling = QNormalCoupling {
        loc,
        block_11: p.scale().clone(),
        block_22: q_dist.scale().clone(),
        block_12,
        q_coupling,
        lambda_tilde,
        t_dof: nu_c,
        t_scale_divisor,
    };
    // λ̃ > 0 makes the assembled scale positive definite; verify.
    SpdMatrix::new(coupling.assembled_scale())
        .map_err(|e| Error::InternalInconsistency(format!("assembled coupling scale: {e}")))?;
    Ok(coupling)
}
