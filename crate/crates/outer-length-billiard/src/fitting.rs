//! Least-squares helpers for the asymptotic drivers: log-log slopes for
//! order checks and weighted fits in inverse powers of the period.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Condition-number gate for [`inverse_power_fit`]. Beyond this the normal
/// directions of the design are numerically unresolved even after column
/// equilibration, and the fit is refused instead of silently denoised.
const MAX_CONDITION: f64 = 1e13;

/// Slope of the least-squares line through (ln x, ln |y|). Points with
/// y = 0 are skipped (they sit at −∞ and would otherwise poison the fit of
/// a remainder that happens to cross zero); NaN when fewer than two nonzero
/// samples remain, e.g. when the measured remainder is identically zero.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "slope needs paired samples");
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(_, y)| **y != 0.0)
        .map(|(x, y)| (x.ln(), y.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in &pts {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Weighted least-squares fit of `values[i] ≈ Σ_j c_j · qs[i]^(−powers[j])`.
///
/// Rows are scaled by `weights`, columns equilibrated to unit 2-norm before
/// the SVD solve so the returned condition reflects the genuine geometry of
/// the basis, not its scaling. Errors with [`Error::IllConditionedFit`] when
/// the equilibrated design is numerically rank-deficient.
pub fn inverse_power_fit(
    qs: &[f64],
    values: &[f64],
    powers: &[u32],
    weights: &[f64],
) -> Result<Vec<f64>> {
    let m = qs.len();
    let n = powers.len();
    assert_eq!(values.len(), m, "fit needs one value per abscissa");
    assert_eq!(weights.len(), m, "fit needs one weight per abscissa");
    assert!(m >= n, "fit needs at least as many samples as coefficients");

    let mut a = DMatrix::<f64>::zeros(m, n);
    let mut b = DVector::<f64>::zeros(m);
    for i in 0..m {
        for (j, &p) in powers.iter().enumerate() {
            a[(i, j)] = weights[i] * qs[i].powi(-(p as i32));
        }
        b[i] = weights[i] * values[i];
    }

    let mut col_norms = vec![0.0f64; n];
    for (j, norm) in col_norms.iter_mut().enumerate() {
        *norm = a.column(j).norm();
        assert!(*norm > 0.0, "degenerate fit column");
        for i in 0..m {
            a[(i, j)] /= *norm;
        }
    }

    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = smax / smin;
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(Error::IllConditionedFit { cond });
    }
    let x = svd
        .solve(&b, 0.0)
        .expect("SVD solve on a full-rank design cannot fail");
    Ok((0..n).map(|j| x[j] / col_norms[j]).collect())
}
