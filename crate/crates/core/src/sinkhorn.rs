//! Grid-discretization Sinkhorn oracle.
//!
//! Independent numerical verifier for the closed forms: Gaussian marginals
//! are discretized on cell-center grids, standard Sinkhorn scaling iterations
//! solve the discrete entropic problem at ε = 4λ, and the resulting coupling's
//! moments and objective (with the cell-volume entropy correction) are
//! compared against the analytic formulas. Deliberately plain — no
//! acceleration — so it shares no code path with what it checks.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::Gaussian;

/// Grids must cover at least this many standard deviations of a marginal.
pub const COVERAGE_SIGMAS: f64 = 6.0;

/// Uniform 1D cell-center grid.
#[derive(Debug, Clone, Copy)]
pub struct Grid1d {
    lo: f64,
    hi: f64,
    points: usize,
}

impl Grid1d {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::InvalidParameter {
                name: "bounds",
                message: format!("needs hi > lo, got [{lo}, {hi}]"),
            });
        }
        if points < 16 {
            return Err(Error::InvalidParameter {
                name: "points",
                message: format!("needs at least 16 points per axis, got {points}"),
            });
        }
        Ok(Self { lo, hi, points })
    }

    /// Symmetric grid covering ±`COVERAGE_SIGMAS` standard deviations of a 1D
    /// Gaussian.
    pub fn covering(p: &Gaussian, points: usize) -> Result<Self> {
        let sigma = p.cov().entries()[(0, 0)].sqrt();
        let mu = p.mean()[0];
        Self::new(
            mu - COVERAGE_SIGMAS * sigma,
            mu + COVERAGE_SIGMAS * sigma,
            points,
        )
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn cell_volume(&self) -> f64 {
        (self.hi - self.lo) / self.points as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        let w = self.cell_volume();
        (0..self.points).map(|i| self.lo + (i as f64 + 0.5) * w).collect()
    }
}

/// Uniform 2D cell-center grid (flattened index ix·points + iy). Capped at 64
/// points per axis: the pairwise cost matrix is (points²)² entries.
#[derive(Debug, Clone, Copy)]
pub struct Grid2d {
    lo: [f64; 2],
    hi: [f64; 2],
    points_per_axis: usize,
}

impl Grid2d {
    pub fn new(lo: [f64; 2], hi: [f64; 2], points_per_axis: usize) -> Result<Self> {
        for axis in 0..2 {
            if !(hi[axis] > lo[axis]) {
                return Err(Error::InvalidParameter {
                    name: "bounds",
                    message: format!(
                        "axis {axis} needs hi > lo, got [{}, {}]",
                        lo[axis], hi[axis]
                    ),
                });
            }
        }
        if points_per_axis < 16 || points_per_axis > 64 {
            return Err(Error::InvalidParameter {
                name: "points_per_axis",
                message: format!("needs 16..=64 points per axis, got {points_per_axis}"),
            });
        }
        Ok(Self {
            lo,
            hi,
            points_per_axis,
        })
    }

    pub fn covering(p: &Gaussian, points_per_axis: usize) -> Result<Self> {
        let s0 = p.cov().entries()[(0, 0)].sqrt();
        let s1 = p.cov().entries()[(1, 1)].sqrt();
        Self::new(
            [
                p.mean()[0] - COVERAGE_SIGMAS * s0,
                p.mean()[1] - COVERAGE_SIGMAS * s1,
            ],
            [
                p.mean()[0] + COVERAGE_SIGMAS * s0,
                p.mean()[1] + COVERAGE_SIGMAS * s1,
            ],
            points_per_axis,
        )
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn cell_volume(&self) -> f64 {
        let n = self.points_per_axis as f64;
        (self.hi[0] - self.lo[0]) / n * ((self.hi[1] - self.lo[1]) / n)
    }

    fn axis_centers(&self, axis: usize) -> Vec<f64> {
        let w = (self.hi[axis] - self.lo[axis]) / self.points_per_axis as f64;
        (0..self.points_per_axis)
            .map(|i| self.lo[axis] + (i as f64 + 0.5) * w)
            .collect()
    }

    /// Flattened cell centers.
    pub fn centers(&self) -> Vec<[f64; 2]> {
        let xs = self.axis_centers(0);
        let ys = self.axis_centers(1);
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for &x in &xs {
            for &y in &ys {
                out.push([x, y]);
            }
        }
        out
    }
}

/// Cell weights proportional to the density at cell centers, normalized.
/// Rejects grids that do not cover ±6σ of the marginal.
pub fn discretize(p: &Gaussian, grid: &Grid1d) -> Result<DVector<f64>> {
    if p.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: p.dim(),
        });
    }
    let sigma = p.cov().entries()[(0, 0)].sqrt();
    let mu = p.mean()[0];
    if grid.lo > mu - COVERAGE_SIGMAS * sigma || grid.hi < mu + COVERAGE_SIGMAS * sigma {
        return Err(Error::GridCoverage(format!(
            "grid [{}, {}] does not span {mu} ± {COVERAGE_SIGMAS}·{sigma}",
            grid.lo, grid.hi
        )));
    }
    let mut w = DVector::from_iterator(
        grid.points,
        grid.centers()
            .iter()
            .map(|&x| p.density(&DVector::from_element(1, x))),
    );
    let total = w.sum();
    w /= total;
    Ok(w)
}

/// 2D analogue of [`discretize`], flattened in the [`Grid2d`] index order.
pub fn discretize_2d(p: &Gaussian, grid: &Grid2d) -> Result<DVector<f64>> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: p.dim(),
        });
    }
    for axis in 0..2 {
        let sigma = p.cov().entries()[(axis, axis)].sqrt();
        let mu = p.mean()[axis];
        if grid.lo[axis] > mu - COVERAGE_SIGMAS * sigma
            || grid.hi[axis] < mu + COVERAGE_SIGMAS * sigma
        {
            return Err(Error::GridCoverage(format!(
                "axis {axis} of grid does not span {mu} ± {COVERAGE_SIGMAS}·{sigma}"
            )));
        }
    }
    let centers = grid.centers();
    let mut w = DVector::from_iterator(
        centers.len(),
        centers
            .iter()
            .map(|c| p.density(&DVector::from_row_slice(c))),
    );
    let total = w.sum();
    w /= total;
    Ok(w)
}

/// Squared-distance cost matrix between two 1D point sets.
pub fn squared_cost_1d(xs: &[f64], ys: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(xs.len(), ys.len(), |i, j| (xs[i] - ys[j]).powi(2))
}

/// Squared-distance cost matrix between two 2D point sets.
pub fn squared_cost_2d(xs: &[[f64; 2]], ys: &[[f64; 2]]) -> DMatrix<f64> {
    DMatrix::from_fn(xs.len(), ys.len(), |i, j| {
        (xs[i][0] - ys[j][0]).powi(2) + (xs[i][1] - ys[j][1]).powi(2)
    })
}

/// Discrete coupling produced by the Sinkhorn iterations, carrying its target
/// marginals.
#[derive(Debug, Clone)]
pub struct DiscreteCoupling {
    weights: DMatrix<f64>,
    row_marginal: DVector<f64>,
    col_marginal: DVector<f64>,
}

impl DiscreteCoupling {
    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn row_marginal(&self) -> &DVector<f64> {
        &self.row_marginal
    }

    pub fn col_marginal(&self) -> &DVector<f64> {
        &self.col_marginal
    }

    /// L1 deviation of the realized marginals from the targets.
    pub fn marginal_violation(&self) -> f64 {
        let rows = self.weights.column_sum(); // sums over columns → per-row mass
        let cols = self.weights.row_sum();
        let row_err: f64 = rows
            .iter()
            .zip(self.row_marginal.iter())
            .map(|(a, b)| (a - b).abs())
            .sum();
        let col_err: f64 = cols
            .iter()
            .zip(self.col_marginal.iter())
            .map(|(a, b)| (a - b).abs())
            .sum();
        row_err + col_err
    }

    /// Transport cost Σᵢⱼ cᵢⱼ πᵢⱼ.
    pub fn transport_cost(&self, cost: &DMatrix<f64>) -> f64 {
        self.weights.component_mul(cost).sum()
    }

    /// Cross-covariance Σᵢⱼ πᵢⱼ (xᵢ − x̄)(yⱼ − ȳ) for 1D supports.
    pub fn cross_covariance_1d(&self, xs: &[f64], ys: &[f64]) -> f64 {
        let rows = self.weights.column_sum();
        let cols = self.weights.row_sum();
        let mean_x: f64 = rows.iter().zip(xs).map(|(w, x)| w * x).sum();
        let mean_y: f64 = cols.iter().zip(ys).map(|(w, y)| w * y).sum();
        let mut acc = 0.0;
        for i in 0..xs.len() {
            for j in 0..ys.len() {
                acc += self.weights[(i, j)] * (xs[i] - mean_x) * (ys[j] - mean_y);
            }
        }
        acc
    }

    /// Cross-covariance block Σᵢⱼ πᵢⱼ (xᵢ − x̄)(yⱼ − ȳ)ᵀ for 2D supports.
    pub fn cross_covariance_2d(&self, xs: &[[f64; 2]], ys: &[[f64; 2]]) -> DMatrix<f64> {
        let rows = self.weights.column_sum();
        let cols = self.weights.row_sum();
        let mut mean_x = [0.0; 2];
        let mut mean_y = [0.0; 2];
        for (w, x) in rows.iter().zip(xs) {
            mean_x[0] += w * x[0];
            mean_x[1] += w * x[1];
        }
        for (w, y) in cols.iter().zip(ys) {
            mean_y[0] += w * y[0];
            mean_y[1] += w * y[1];
        }
        let mut acc = DMatrix::zeros(2, 2);
        for i in 0..xs.len() {
            for j in 0..ys.len() {
                let w = self.weights[(i, j)];
                if w == 0.0 {
                    continue;
                }
                for a in 0..2 {
                    for b in 0..2 {
                        acc[(a, b)] += w * (xs[i][a] - mean_x[a]) * (ys[j][b] - mean_y[b]);
                    }
                }
            }
        }
        acc
    }
}

/// Standard Sinkhorn scaling iterations for the discrete entropic problem
/// with kernel exp(−cost/ε).
///
/// Switches to log-domain updates when ε < 1e−2·max(cost), where the plain
/// kernel underflows. Stops when the L1 marginal violation drops to `tol`;
/// exceeding `max_iter` reports the final violation.
pub fn sinkhorn(
    a: &DVector<f64>,
    b: &DVector<f64>,
    cost: &DMatrix<f64>,
    epsilon: f64,
    tol: f64,
    max_iter: usize,
) -> Result<DiscreteCoupling> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            message: format!("must be positive, got {epsilon}"),
        });
    }
    if cost.nrows() != a.len() || cost.ncols() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: cost.nrows(),
        });
    }
    let max_cost = cost.iter().fold(0.0_f64, |m, &c| m.max(c));
    if !max_cost.is_finite() {
        return Err(Error::InvalidParameter {
            name: "cost",
            message: "entries must be finite".into(),
        });
    }
    for (name, v) in [("a", a), ("b", b)] {
        if v.iter().any(|x| *x < 0.0) || (v.sum() - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidParameter {
                name,
                message: "marginal must be a probability vector".into(),
            });
        }
    }

    let log_domain = epsilon < 1e-2 * max_cost;
    let coupling = if log_domain {
        sinkhorn_log_domain(a, b, cost, epsilon, tol, max_iter)?
    } else {
        sinkhorn_scaling(a, b, cost, epsilon, tol, max_iter)?
    };
    Ok(coupling)
}

fn violation(p: &DMatrix<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let rows = p.column_sum();
    let cols = p.row_sum();
    rows.iter().zip(a.iter()).map(|(x, y)| (x - y).abs()).sum::<f64>()
        + cols.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

fn sinkhorn_scaling(
    a: &DVector<f64>,
    b: &DVector<f64>,
    cost: &DMatrix<f64>,
    epsilon: f64,
    tol: f64,
    max_iter: usize,
) -> Result<DiscreteCoupling> {
    let kernel = cost.map(|c| (-c / epsilon).exp());
    let kernel_t = kernel.transpose();
    let mut v = DVector::from_element(b.len(), 1.0);
    let mut last_violation = f64::INFINITY;
    for _ in 0..max_iter {
        let kv = &kernel * &v;
        let u = a.component_div(&kv);
        let ktu = &kernel_t * &u;
        v = b.component_div(&ktu);
        let p = DMatrix::from_fn(a.len(), b.len(), |i, j| u[i] * kernel[(i, j)] * v[j]);
        last_violation = violation(&p, a, b);
        if last_violation <= tol {
            return Ok(DiscreteCoupling {
                weights: p,
                row_marginal: a.clone(),
                col_marginal: b.clone(),
            });
        }
    }
    Err(Error::DidNotConverge {
        what: "Sinkhorn scaling",
        iterations: max_iter,
        residual: last_violation,
    })
}

fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

fn sinkhorn_log_domain(
    a: &DVector<f64>,
    b: &DVector<f64>,
    cost: &DMatrix<f64>,
    epsilon: f64,
    tol: f64,
    max_iter: usize,
) -> Result<DiscreteCoupling> {
    let n = a.len();
    let m = b.len();
    let log_a = a.map(|x| x.ln());
    let log_b = b.map(|x| x.ln());
    let mut f = DVector::<f64>::zeros(n);
    let mut g = DVector::<f64>::zeros(m);
    let mut last_violation = f64::INFINITY;
    for _ in 0..max_iter {
        for i in 0..n {
            let lse = log_sum_exp((0..m).map(|j| (g[j] - cost[(i, j)]) / epsilon));
            f[i] = epsilon * (log_a[i] - lse);
        }
        for j in 0..m {
            let lse = log_sum_exp((0..n).map(|i| (f[i] - cost[(i, j)]) / epsilon));
            g[j] = epsilon * (log_b[j] - lse);
        }
        let p = DMatrix::from_fn(n, m, |i, j| ((f[i] + g[j] - cost[(i, j)]) / epsilon).exp());
        last_violation = violation(&p, a, b);
        if last_violation <= tol {
            return Ok(DiscreteCoupling {
                weights: p,
                row_marginal: a.clone(),
                col_marginal: b.clone(),
            });
        }
    }
    Err(Error::DidNotConverge {
        what: "Sinkhorn (log domain)",
        iterations: max_iter,
        residual: last_violation,
    })
}

/// Discrete entropic objective with the differential-entropy correction:
/// Σ cᵢⱼπᵢⱼ − 4λ·(−Σ πᵢⱼ·log(πᵢⱼ/V)), where V is the product of the two
/// marginal cell volumes, so the discrete entropy approximates the
/// differential entropy of the continuous coupling.
pub fn entropic_objective(
    coupling: &DiscreteCoupling,
    cost: &DMatrix<f64>,
    lambda: f64,
    cell_volume: f64,
) -> f64 {
    let transport = coupling.transport_cost(cost);
    let entropy: f64 = coupling
        .weights
        .iter()
        .filter(|w| **w > 0.0)
        .map(|w| -w * (w / cell_volume).ln())
        .sum();
    transport - 4.0 * lambda * entropy
}
