//! The generating function H of the outer length billiard and its jets.
//!
//! H(s₀,s₁) is the tangent-length sum |Pγ(s₀)| + |Pγ(s₁)| at the vertex P of
//! the pair, equal to the wedge ratio
//!
//! ```text
//!   H = (Δγ ∧ Δγ′) / (γ′(s₀) ∧ γ′(s₁)),        Δγ = γ(s₁) − γ(s₀).
//! ```
//!
//! The map (s₀,s₁) ↦ (s₁,s₂) is exactly the discrete variational law
//! H₂(s₀,s₁) + H₁(s₁,s₂) = 0, so first partials drive the dynamics, the
//! second partials carry the twist (H₁₂ < 0) and Mather's caustic
//! obstruction. Everything here is evaluated through the support-function
//! pair forms of [`ThetaPair`], which keep full relative precision down to
//! the diagonal; the historical wedge-ratio and tangent-length routes are
//! retained as independent cross-checks.

use crate::curve::{CurveModel, ThetaPair};
use crate::error::Result;
use crate::map::{step, PhasePair};

/// H with its first and second partial derivatives with respect to the two
/// arclength arguments.
#[derive(Debug, Clone, Copy)]
pub struct HJet {
    pub value: f64,
    pub h1: f64,
    pub h2: f64,
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
}

fn theta_pair<'a>(curve: &'a CurveModel, s0: f64, s1: f64) -> Result<ThetaPair<'a>> {
    ThetaPair::new(curve, curve.theta_of_s(s0), curve.theta_of_s(s1))
}

/// The generating function H(s₀,s₁) (wedge ratio, evaluated in the
/// cancellation-free support form 2h̄·tan d + Δh′).
pub fn eval_h(curve: &CurveModel, s0: f64, s1: f64) -> Result<f64> {
    Ok(theta_pair(curve, s0, s1)?.gen_h())
}

/// H(s₀,s₁) as the literal tangent-length sum t − u, with the vertex found
/// by intersecting the Cartesian tangent lines. Numerically independent of
/// [`eval_h`]; used to validate it.
pub fn eval_h_geometric(curve: &CurveModel, s0: f64, s1: f64) -> Result<f64> {
    let pair = theta_pair(curve, s0, s1)?;
    let (t, u) = pair.tangent_params();
    Ok(t - u)
}

/// H₁(a,b) = ∂H/∂a via the closed form in boundary derivatives,
///
/// ```text
///   H₁ = −1 − (Δγ ∧ γ″(a))/D − (Δγ ∧ Δγ′)(γ″(a) ∧ γ′(b))/D²,
///   D = γ′(a) ∧ γ′(b).
/// ```
///
/// Kept alongside the support form as a transcription check.
pub fn h1_wedge_form(curve: &CurveModel, a: f64, b: f64) -> f64 {
    let ja = curve.jet_at(a, 3);
    let jb = curve.jet_at(b, 1);
    let dg = jb.point - ja.point;
    let dgp = jb.tangent - ja.tangent;
    let d = ja.tangent.wedge(jb.tangent);
    let b2 = dg.wedge(ja.derivs[2]);
    let e = ja.derivs[2].wedge(jb.tangent);
    let n = dg.wedge(dgp);
    -1.0 - b2 / d - n * e / (d * d)
}

/// H₁₁(a,b) = ∂²H/∂a² via the closed form in boundary derivatives (the
/// derivative of [`h1_wedge_form`] in its first argument):
///
/// ```text
///   H₁₁ = S/D − P₃/D + 2BE/D² + E/D − N·E₃/D² + 2N·E²/D³
/// ```
///
/// with S = γ′∧γ″, B = Δγ∧γ″, E = γ″(a)∧γ′(b), N = Δγ∧Δγ′, P₃ = Δγ∧γ‴,
/// E₃ = γ‴(a)∧γ′(b), all curve derivatives at a.
pub fn h11_wedge_form(curve: &CurveModel, a: f64, b: f64) -> f64 {
    let ja = curve.jet_at(a, 3);
    let jb = curve.jet_at(b, 1);
    let dg = jb.point - ja.point;
    let dgp = jb.tangent - ja.tangent;
    let gpp = ja.derivs[2];
    let gppp = ja.derivs[3];
    let d = ja.tangent.wedge(jb.tangent);
    let s = ja.tangent.wedge(gpp);
    let b2 = dg.wedge(gpp);
    let e = gpp.wedge(jb.tangent);
    let n = dg.wedge(dgp);
    let p3 = dg.wedge(gppp);
    let e3 = gppp.wedge(jb.tangent);
    s / d - p3 / d + 2.0 * b2 * e / (d * d) + e / d - n * e3 / (d * d)
        + 2.0 * n * e * e / (d * d * d)
}

/// Richardson-extrapolated centered difference of `f` at `x` with base
/// step `h`: (4·D(h/2) − D(h))/3, error O(h⁴).
fn richardson_derivative<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    let central = |f: &mut F, h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let d1 = central(&mut f, h);
    let d2 = central(&mut f, 0.5 * h);
    (4.0 * d2 - d1) / 3.0
}

/// H together with its first and second partials at (s₀,s₁).
///
/// First partials and H₁₁ come from closed forms; H₁₂ and H₂₂ are
/// Richardson-extrapolated centered differences (step 1e−5·ℓ, shrunk near
/// the phase-space boundary) of the closed-form first partials.
pub fn eval_h_jet(curve: &CurveModel, s0: f64, s1: f64) -> Result<HJet> {
    let pair = theta_pair(curve, s0, s1)?;
    let value = pair.gen_h();
    let h1 = pair.h1_s();
    let h2 = pair.h2_s();
    let h11 = h11_wedge_form(curve, s0, s1);

    // Steps in s1 must keep (s0, s1 ± h) inside the phase space.
    let gap = s1 - s0;
    let margin = curve.s_of_theta(curve.theta_of_s(s0) + std::f64::consts::PI) - s1;
    let h = (1e-5 * curve.total_length())
        .min(gap / 8.0)
        .min(margin / 8.0);

    let h12 = richardson_derivative(
        |x| {
            theta_pair(curve, s0, x)
                .expect("offset pair stays in phase space")
                .h1_s()
        },
        s1,
        h,
    );
    let h22 = richardson_derivative(
        |x| {
            theta_pair(curve, s0, x)
                .expect("offset pair stays in phase space")
                .h2_s()
        },
        s1,
        h,
    );

    Ok(HJet {
        value,
        h1,
        h2,
        h11,
        h12,
        h22,
    })
}

/// Degree-5 Taylor polynomial of δ ↦ H(s₀, s₀+δ) with curvature jets at s₀:
///
/// ```text
///   δ + k²/12·δ³ + kk′/12·δ⁴ + (2k⁴ + 4k′² + 7kk″)/240·δ⁵.
/// ```
pub fn taylor_h(curve: &CurveModel, s0: f64, delta: f64) -> f64 {
    let jet = curve.jet_at(s0, 1);
    let (k, k1, k2) = (jet.k, jet.k1, jet.k2);
    let c3 = k * k / 12.0;
    let c4 = k * k1 / 12.0;
    let c5 = (2.0 * k.powi(4) + 4.0 * k1 * k1 + 7.0 * k * k2) / 240.0;
    delta + (c3 + (c4 + c5 * delta) * delta) * delta * delta * delta
}

/// The defect H(s₀,s₀+δ) − taylor_h(s₀,δ) = O(δ⁶), evaluated without
/// cancellation: both sides drop the common leading δ explicitly (the left
/// side through the excess identity of [`ThetaPair::excess_and_gap`]).
/// Returns the realized arclength gap and the remainder.
pub fn taylor_remainder(curve: &CurveModel, s0: f64, delta: f64) -> Result<(f64, f64)> {
    let pair = theta_pair(curve, s0, s0 + delta)?;
    let (excess, gap) = pair.excess_and_gap();
    let jet = curve.jet_at(s0, 1);
    let (k, k1, k2) = (jet.k, jet.k1, jet.k2);
    let c3 = k * k / 12.0;
    let c4 = k * k1 / 12.0;
    let c5 = (2.0 * k.powi(4) + 4.0 * k1 * k1 + 7.0 * k * k2) / 240.0;
    let poly_excess = (c3 + (c4 + c5 * gap) * gap) * gap * gap * gap;
    Ok((gap, excess - poly_excess))
}

/// Mather's caustic obstruction at one phase point: with s₂ the step image
/// of (s₀,s₁), returns M = −(H₂₂(s₀,s₁) + H₁₁(s₁,s₂)). Strict convexity
/// forces M < 0 everywhere; M reaches toward 0 as the curvature degenerates,
/// and a curvature zero kills every caustic.
pub fn mather_criterion(curve: &CurveModel, s0: f64, s1: f64) -> Result<f64> {
    let pair = PhasePair::new(curve, s0, s1)?;
    let next = step(curve, &pair)?;
    let tp01 = ThetaPair::new(curve, pair.theta0, pair.theta1)?;
    let tp12 = ThetaPair::new(curve, next.theta0, next.theta1)?;
    Ok(-(tp01.h22_s() + tp12.h11_s()))
}

/// Defect of the twist formula: |H₁₂ − (−k₀k₁H/(2 sin²(φ/2)))| with
/// φ = π − (θ(s₁) − θ(s₀)) the interior angle between the tangent lines at
/// the vertex. H₁₂ is the finite-difference value of [`eval_h_jet`], so this
/// bounds the discrepancy between two independent routes.
pub fn twist_formula_check(curve: &CurveModel, s0: f64, s1: f64) -> Result<f64> {
    let jet = eval_h_jet(curve, s0, s1)?;
    let pair = theta_pair(curve, s0, s1)?;
    let k0 = 1.0 / pair.rho0();
    let k1 = 1.0 / pair.rho1();
    // sin(φ/2) = cos d for φ = π − 2d.
    let formula = -k0 * k1 * jet.value / (2.0 * pair.cd * pair.cd);
    Ok((jet.h12 - formula).abs())
}
