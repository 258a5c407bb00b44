//! Measures the convergence orders behind the map's small-gap asymptotics
//! by log-log slope fits on computed remainders.
//!
//! Four expansions are probed on the perturbed circle h = 1 + 0.05 cos 3θ:
//!
//! * the generating function H(s, s+δ) minus its degree-5 Taylor polynomial
//!   is O(δ⁶);
//! * the map in gap form, ε₁ = ε₀ + Aε₀² + Bε₀³ + Cε₀⁴ + O(ε₀⁵);
//! * the Lazutkin conjugation, whose gap variable is conserved up to O(y⁴)
//!   per step;
//! * minimal q-periodic orbits, which settle onto the Lazutkin profile at
//!   order q⁻² in shape and q⁻³ in the gaps, with an empirical comparison
//!   of the q⁻² correction term a₂ against its closed form.
//!
//! Run with: cargo run --example expansion_slopes

use outer_length_billiard::fitting::loglog_slope;
use outer_length_billiard::lazutkin::lazutkin_drift_profile;
use outer_length_billiard::{
    build_curve, map_expansion_remainder, orbit_asymptotics_check, taylor_remainder, CurveModel,
    CurveSpec, Result,
};

/// Geometric ladder of n points from lo to hi.
fn ladder(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// Worst remainder over a few anchor points per scale.
fn worst_over_anchors(
    curve: &CurveModel,
    scales: &[f64],
    f: impl Fn(f64, f64) -> Result<f64>,
) -> Result<Vec<f64>> {
    let ell = curve.total_length();
    let mut out = Vec::with_capacity(scales.len());
    for &scale in scales {
        let mut worst = 0.0f64;
        for i in 0..8 {
            let s = (i as f64 + 0.31) * ell / 8.0;
            worst = worst.max(f(s, scale)?.abs());
        }
        out.push(worst);
    }
    Ok(out)
}

fn main() -> Result<()> {
    let curve = build_curve(&CurveSpec::cos_harmonic(3, 0.05), 512)?;

    // H-Taylor remainder: expected slope 6. The window stays below
    // δ ≈ 1.5e-2 so the next order of the series does not bend the fit.
    let deltas = ladder(1e-3, 1.5e-2, 9);
    let rem = worst_over_anchors(&curve, &deltas, |s, d| {
        taylor_remainder(&curve, s, d).map(|(_, r)| r)
    })?;
    println!(
        "H Taylor remainder slope      = {:.4}  (expected 6)",
        loglog_slope(&deltas, &rem)
    );

    // Map expansion remainder: expected slope 5.
    let epss = ladder(1e-2, 1e-1, 9);
    let rem = worst_over_anchors(&curve, &epss, |s, e| {
        map_expansion_remainder(&curve, s, e).map(|(_, r)| r)
    })?;
    println!(
        "map expansion remainder slope = {:.4}  (expected 5)",
        loglog_slope(&epss, &rem)
    );

    // Lazutkin drift: y is conserved up to O(y⁴) under one conjugated step.
    let ys = ladder(1e-3, 5e-2, 8);
    let drift = lazutkin_drift_profile(&curve, &ys, 16)?;
    println!(
        "lazutkin drift slope          = {:.4}  (expected 4)",
        loglog_slope(&ys, &drift)
    );

    // Orbit asymptotics: shape deviation O(q⁻²), gap deviation O(q⁻³).
    let report = orbit_asymptotics_check(&curve, &[32, 64, 128, 256])?;
    println!(
        "orbit shape deviation slope   = {:.4}  (expected 2)",
        report.order_s
    );
    println!(
        "orbit gap deviation slope     = {:.4}  (expected 3)",
        report.order_eps
    );

    // The a₂ term of the orbit-shape expansion, compared against its closed
    // form. The fitted amplitude ratio lands at −1 on every curve measured:
    // the formula matches the orbits up to a global sign, so the comparison
    // is reported, never asserted.
    println!(
        "a2 term at q = {}: signal {:.3e}, raw discrepancy {:.3e}, fitted amplitude ratio {:.4}, residual after fit {:.3e}",
        report.q_big,
        report.a2_scale,
        report.a2_discrepancy,
        report.a2_amplitude_ratio,
        report.a2_discrepancy_adjusted
    );
    Ok(())
}
