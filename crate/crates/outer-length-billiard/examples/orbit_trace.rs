//! Iterates the outer length billiard map and prints the trajectory.
//!
//! The map sends a pair of tangency points (s₀, s₁) to (s₁, s₂): the
//! tangent lines at γ(s₀) and γ(s₁) cross in an exterior vertex P, and s₂
//! is fixed by the circle tangent to the boundary at γ(s₁) and to the line
//! through P and γ(s₀). Each step is verified against the variational
//! characterization H₂(s₀,s₁) + H₁(s₁,s₂) = 0, where H is the
//! tangent-length sum; the residual column reports that defect.
//!
//! Run with: cargo run --example orbit_trace

use outer_length_billiard::{
    build_curve, iterate, pair_from_exterior_point, tangent_intersection, CurveSpec, PhasePair,
    Result, Vec2,
};

fn main() -> Result<()> {
    let curve = build_curve(&CurveSpec::cos_harmonic(3, 0.05), 512)?;
    let ell = curve.total_length();

    // Start from two boundary points a third of the perimeter apart.
    let pair = PhasePair::new(&curve, 0.11 * ell, 0.44 * ell)?;
    let trace = iterate(&curve, &pair, 12)?;

    println!(
        "{:>4}  {:>12}  {:>12}  {:>10}  {:>24}  {:>10}",
        "step", "s0", "s1", "gap", "vertex P", "residual"
    );
    for (i, p) in trace.pairs.iter().enumerate() {
        let v = trace.vertices[i];
        println!(
            "{i:>4}  {:>12.6}  {:>12.6}  {:>10.6}  ({:>10.6}, {:>9.6})  {:>10.3e}",
            p.s0,
            p.s1,
            p.eps(),
            v.x,
            v.y,
            trace.residuals[i],
        );
    }
    println!("max variational residual = {:.3e}", trace.max_residual());

    // A pair can also be recovered from an exterior vertex: the two
    // tangency points of the tangent lines through P, ordered so the
    // vertex is on the positive side.
    let p = Vec2::new(2.0, 0.5);
    let from_p = pair_from_exterior_point(&curve, p)?;
    let back = tangent_intersection(&curve, from_p.s0, from_p.s1)?;
    println!(
        "\nexterior point ({}, {}) -> pair (s0, s1) = ({:.6}, {:.6}), reconstructed P = ({:.12}, {:.12})",
        p.x, p.y, from_p.s0, from_p.s1, back.x, back.y
    );
    Ok(())
}
