//! Evaluates the generating function of the outer length billiard and its
//! structural identities.
//!
//! H(s₀, s₁) is the sum of the two tangent segments from the vertex P
//! (where the tangent lines at γ(s₀) and γ(s₁) cross) to the tangency
//! points. Three independent routes to the same numbers are compared:
//!
//! * H from the support function (2h̄·tan d + Δh′, cancellation-free)
//!   against H from raw vertex geometry;
//! * the variational law H₂(s₀,s₁) + H₁(s₁,s₂) = 0 along a map step, which
//!   is how orbits of the map become critical points of the total length;
//! * the twist identity H₁₂ = −k₀k₁H / (2 sin²(φ/2)), φ the interior
//!   vertex angle — negative twist, so the map is a monotone twist map in
//!   the (s, tangent-length) coordinates.
//!
//! Run with: cargo run --example generating_function

use outer_length_billiard::{
    build_curve, eval_h, eval_h_geometric, eval_h_jet, step, taylor_h, taylor_remainder, CurveSpec,
    PhasePair, Result,
};

fn main() -> Result<()> {
    let curve = build_curve(&CurveSpec::ellipse(2.0, 1.0), 512)?;
    let ell = curve.total_length();

    // Two routes to H agree to rounding over a sweep of gaps.
    println!(
        "{:>8}  {:>22}  {:>14}",
        "gap/ell", "H(s0, s1)", "two routes"
    );
    let s0 = 0.23 * ell;
    for f in [0.05, 0.15, 0.3, 0.45] {
        let s1 = s0 + f * ell;
        let a = eval_h(&curve, s0, s1)?;
        let b = eval_h_geometric(&curve, s0, s1)?;
        println!("{f:>8.2}  {a:>22.16}  {:>14.3e}", (a - b).abs());
    }

    // The variational law along a map step.
    let pair = PhasePair::new(&curve, s0, s0 + 0.2 * ell)?;
    let next = step(&curve, &pair)?;
    let jet01 = eval_h_jet(&curve, pair.s0, pair.s1)?;
    let jet12 = eval_h_jet(&curve, next.s0, next.s1)?;
    println!("\nvariational law across one step:");
    println!("  H2(s0,s1) = {:+.16}", jet01.h2);
    println!("  H1(s1,s2) = {:+.16}", jet12.h1);
    println!("  residual  = {:.3e}", (jet01.h2 + jet12.h1).abs());

    // Twist: H12 < 0, and the closed form matches the finite-difference
    // value of the jet.
    println!("\ntwist across the same pair:");
    println!("  H12 = {:+.12}  (negative twist)", jet01.h12);
    println!(
        "  |H12 - closed form| = {:.3e}",
        outer_length_billiard::twist_formula_check(&curve, pair.s0, pair.s1)?
    );

    // Small-gap Taylor polynomial H = δ + c₃δ³ + c₄δ⁴ + c₅δ⁵ + O(δ⁶).
    let delta = 1e-2;
    let (gap, rem) = taylor_remainder(&curve, s0, delta)?;
    println!("\nsmall-gap Taylor at delta = {delta}:");
    println!("  taylor_h   = {:.16}", taylor_h(&curve, s0, gap));
    println!(
        "  remainder  = {:.3e}  (order delta^6 = {:.1e})",
        rem,
        delta.powi(6)
    );
    Ok(())
}
