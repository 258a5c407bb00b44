//! Builds one curve of each supported kind and prints its geometric
//! invariants: perimeter ℓ, Lazutkin constant L = ∮ k^{2/3} ds, curvature
//! range, total turning (2π for any closed convex curve), and the
//! isoperimetric defect L³/4 − π²ℓ, which vanishes exactly on circles and
//! is strictly negative otherwise.
//!
//! Run with: cargo run --example curve_info

use outer_length_billiard::{build_curve, isoperimetric_defect, CurveModel, CurveSpec, Result};

fn describe(name: &str, curve: &CurveModel) {
    let (k_min, k_max) = curve.curvature_bounds();
    let turning = curve.periodic_quadrature(|jet| jet.k);
    println!("{name}");
    println!("  perimeter ell        = {:.16}", curve.total_length());
    println!("  lazutkin constant L  = {:.16}", curve.lazutkin_constant());
    println!("  curvature range      = [{k_min:.6}, {k_max:.6}]");
    println!(
        "  total turning / 2pi  = {:.16}",
        turning / std::f64::consts::TAU
    );
    println!(
        "  isoperimetric defect = {:.6e}",
        isoperimetric_defect(curve)
    );
    println!();
}

fn main() -> Result<()> {
    let resolution = 512;

    let circle = build_curve(&CurveSpec::circle(1.0), resolution)?;
    describe("unit circle", &circle);

    let ellipse = build_curve(&CurveSpec::ellipse(2.0, 1.0), resolution)?;
    describe("ellipse a = 2, b = 1", &ellipse);

    // Support function h(θ) = 1 + 0.05 cos 3θ: a convex three-bump curve.
    let wiggly = build_curve(&CurveSpec::cos_harmonic(3, 0.05), resolution)?;
    describe("perturbed circle h = 1 + 0.05 cos 3θ", &wiggly);

    // The defect separates circles from everything else: near-circular
    // ellipses approach zero from below like −(a−b)².
    println!("defect along the ellipse family a = 1 + t, b = 1:");
    for t in [0.5, 0.1, 0.02, 0.004] {
        let e = build_curve(&CurveSpec::ellipse(1.0 + t, 1.0), resolution)?;
        println!("  t = {t:<6} defect = {:+.6e}", isoperimetric_defect(&e));
    }
    Ok(())
}
