//! Adaptive Gauss–Kronrod quadrature (G7–K15) on finite intervals.
//!
//! Used by the density-convolution estimator and the q-normal normalizer.
//! Intervals whose K15−G7 discrepancy exceeds their share of the tolerance
//! budget are bisected, worst-first.

use crate::error::{Error, Result};

// 15-point Kronrod nodes on [-1, 1] (symmetric; nonnegative half listed).
const XK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
// Embedded 7-point Gauss weights (matching XK[1], XK[3], XK[5], XK[7]).
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One G7–K15 pass over [a, b]: returns (K15 estimate, |K15 − G7|).
fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for i in 0..8 {
        let (lo, hi) = (f(center - half * XK[i]), f(center + half * XK[i]));
        let pair = if XK[i] == 0.0 { lo } else { lo + hi };
        kronrod += WK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        } else if XK[i] == 0.0 {
            gauss += WG[3] * pair;
        }
    }
    (kronrod * half, (kronrod - gauss).abs() * half)
}

/// Adaptive integral of `f` over [a, b] to absolute tolerance `abs_tol`.
///
/// Errors with [`Error::DidNotConverge`] if the subdivision budget is
/// exhausted before the summed error estimate drops below the tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    const MAX_INTERVALS: usize = 4096;
    if !(abs_tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "abs_tol",
            message: format!("must be positive, got {abs_tol}"),
        });
    }
    if a == b {
        return Ok(0.0);
    }
    let (value, err) = gauss_kronrod(f, a, b);
    let mut intervals = vec![(a, b, value, err)];
    loop {
        let total_err: f64 = intervals.iter().map(|s| s.3).sum();
        if total_err <= abs_tol {
            return Ok(intervals.iter().map(|s| s.2).sum());
        }
        if intervals.len() >= MAX_INTERVALS {
            return Err(Error::DidNotConverge {
                what: "adaptive quadrature",
                iterations: intervals.len(),
                residual: total_err,
            });
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).expect("finite error estimates"))
            .map(|(i, _)| i)
            .expect("nonempty interval list");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gauss_kronrod(f, lo, mid);
        let (v2, e2) = gauss_kronrod(f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Iterated 2D integral over the rectangle [a0,b0]×[a1,b1].
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: &F,
    a: [f64; 2],
    b: [f64; 2],
    abs_tol: f64,
) -> Result<f64> {
    // Inner integrals get a tighter budget so their errors do not accumulate
    // past the outer tolerance.
    let inner_tol = abs_tol / (4.0 * (b[0] - a[0]).abs().max(1.0));
    integrate(
        &|x| integrate(&|y| f(x, y), a[1], b[1], inner_tol).unwrap_or(f64::NAN),
        a[0],
        b[0],
        abs_tol,
    )
}
