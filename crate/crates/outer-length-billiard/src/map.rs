//! The outer length billiard map T: (s₀,s₁) ↦ (s₁,s₂).
//!
//! Geometrically: the tangent lines at γ(s₀) and γ(s₁) meet in an exterior
//! vertex P; the construction circle is tangent to the boundary at γ(s₁) and
//! to the line Pγ(s₀); the image parameter s₂ is the unique s > s₁ whose
//! tangent line touches that same circle. Equating the two radius formulas
//! for the circle gives the root equation solved here:
//!
//! ```text
//!   (γ(s₂)−γ(s₁)) ∧ γ′(s₂) − ℛ·(1 + γ′(s₂)·γ′(s₁)) = 0,
//!   ℛ = ((γ(s₀)−γ(s₁)) ∧ γ′(s₀)) / (1 + γ′(s₀)·γ′(s₁))
//! ```
//!
//! Variationally: the same s₂ is the zero of H₂(s₀,s₁) + H₁(s₁,·), where H
//! is the tangent-length sum; [`step_variational`] solves that equation
//! instead and serves as an independent cross-check of [`step`].
//!
//! Orbits live on the lift: s values increase monotonically through the
//! iteration and are reduced modulo ℓ only for display.

use crate::curve::{CurveModel, ThetaPair};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::solver::{brent, newton_bisect};

use std::f64::consts::PI;

/// Tolerances for the map solvers. The defaults match the documented
/// contract: phase-space margin 1e−8·ℓ, variational residual 1e−9,
/// root refinement to machine precision.
#[derive(Debug, Clone, Copy)]
pub struct MapConfig {
    /// Minimum distance of a pair from the boundary of the phase space,
    /// as a fraction of the total length.
    pub delta_min_rel: f64,
    /// Bound on the scaled variational residual |H₂+H₁| accepted from a
    /// geometric step.
    pub tol_residual: f64,
    /// Absolute θ-space tolerance for root refinement.
    pub tol_root: f64,
}

impl Default for MapConfig {
    fn default() -> Self {
        MapConfig {
            delta_min_rel: 1e-8,
            tol_residual: 1e-9,
            tol_root: 1e-15,
        }
    }
}

/// State of the map: an ordered pair of lifted arclength parameters with
/// 0 < s₁ − s₀ < s₀* − s₀. The normal angles are carried along so repeated
/// stepping never re-inverts the arclength table for known points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePair {
    pub s0: f64,
    pub s1: f64,
    pub theta0: f64,
    pub theta1: f64,
}

impl PhasePair {
    /// Validates the phase-space condition and caches the normal angles.
    pub fn new(curve: &CurveModel, s0: f64, s1: f64) -> Result<PhasePair> {
        let theta0 = curve.theta_of_s(s0);
        let theta1 = curve.theta_of_s(s1);
        let gap = theta1 - theta0;
        if gap <= 0.0 {
            return Err(Error::DegeneratePair {
                eps: s1 - s0,
                margin: curve.s_of_theta(theta0 + PI) - s1,
            });
        }
        if gap >= PI - 1e-12 {
            return Err(Error::ParallelTangents { gap });
        }
        Ok(PhasePair {
            s0,
            s1,
            theta0,
            theta1,
        })
    }

    /// ε = s₁ − s₀.
    pub fn eps(&self) -> f64 {
        self.s1 - self.s0
    }
}

/// Intersection P of the tangent lines at s₀ and s₁ (the exterior vertex of
/// the pair): P = γ(s₀) + t·γ′(s₀) = γ(s₁) + u·γ′(s₁) with t > 0 > u.
pub fn tangent_intersection(curve: &CurveModel, s0: f64, s1: f64) -> Result<Vec2> {
    let pair = PhasePair::new(curve, s0, s1)?;
    Ok(ThetaPair::new(curve, pair.theta0, pair.theta1)?.vertex())
}

/// Radius ℛ of the construction circle of the pair: tangent to the curve at
/// γ(s₁) and to the tangent line at s₀, lying outside the domain.
pub fn tangent_circle_radius(curve: &CurveModel, s0: f64, s1: f64) -> Result<f64> {
    let pair = PhasePair::new(curve, s0, s1)?;
    Ok(ThetaPair::new(curve, pair.theta0, pair.theta1)?.radius_back())
}

/// Margin-checked ingredients shared by the two step variants: the incoming
/// pair in θ-form and the antipodal arclength bound s₀*.
fn checked_pair<'a>(
    curve: &'a CurveModel,
    pair: &PhasePair,
    cfg: &MapConfig,
) -> Result<ThetaPair<'a>> {
    let delta_min = cfg.delta_min_rel * curve.total_length();
    let eps = pair.eps();
    let margin = curve.s_of_theta(pair.theta0 + PI) - pair.s1;
    if eps < delta_min || margin < delta_min {
        return Err(Error::DegeneratePair { eps, margin });
    }
    ThetaPair::new(curve, pair.theta0, pair.theta1)
}

/// Solves for θ₂ ∈ (θ₁, θ₁+π) with a guarded bracket: f must be negative at
/// the low end and positive (after sign) at some candidate high margin.
fn solve_forward<F>(
    theta0: f64,
    theta1: f64,
    mut fdf: F,
    want_positive_at_hi: bool,
    tol_root: f64,
    context: &'static str,
) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let gap = theta1 - theta0;
    let mut lo = theta1 + 1e-3 * gap;
    if sign_bad(fdf(lo).0, !want_positive_at_hi) {
        lo = theta1 + 1e-6 * gap;
        if sign_bad(fdf(lo).0, !want_positive_at_hi) {
            return Err(Error::RootBracketFailure {
                context,
                lo,
                hi: theta1 + PI,
            });
        }
    }
    let mut hi = theta1 + PI;
    let mut found = false;
    for margin in [1e-2, 1e-4, 1e-6, 1e-9] {
        hi = theta1 + PI - margin;
        if !sign_bad(fdf(hi).0, want_positive_at_hi) {
            found = true;
            break;
        }
    }
    if !found {
        return Err(Error::RootBracketFailure { context, lo, hi });
    }
    // The image of a shift-like map is near θ₁ + (θ₁−θ₀); clamp into the
    // bracket for the initial Newton iterate.
    let guess = (theta1 + gap).clamp(lo, hi);
    let xtol = tol_root * (1.0 + hi.abs());
    newton_bisect(fdf, lo, hi, guess, xtol, context)
}

fn sign_bad(value: f64, want_positive: bool) -> bool {
    if want_positive {
        value <= 0.0
    } else {
        value >= 0.0
    }
}

/// One application of the map via the tangent-circle construction, with the
/// default tolerances.
pub fn step(curve: &CurveModel, pair: &PhasePair) -> Result<PhasePair> {
    step_with(curve, pair, &MapConfig::default())
}

/// One application of the map via the tangent-circle construction.
pub fn step_with(curve: &CurveModel, pair: &PhasePair, cfg: &MapConfig) -> Result<PhasePair> {
    let tp01 = checked_pair(curve, pair, cfg)?;
    let radius = tp01.radius_back();

    let theta2 = solve_forward(
        pair.theta0,
        pair.theta1,
        |t2| {
            let pr = ThetaPair::new_unchecked(curve, pair.theta1, t2);
            let (p, q) = (pr.p(), pr.q());
            let g = p * pr.cd + q * pr.sd - 2.0 * radius * pr.cd * pr.cd;
            let dg = q * pr.cd - p * pr.sd + 2.0 * radius * pr.cd * pr.sd;
            (g, dg)
        },
        true,
        cfg.tol_root,
        "geometric step",
    )?;

    finish_step(curve, pair, tp01, theta2, cfg)
}

/// One application of the map by solving the variational law
/// H₂(s₀,s₁) + H₁(s₁,s₂) = 0 directly, with default tolerances.
pub fn step_variational(curve: &CurveModel, pair: &PhasePair) -> Result<PhasePair> {
    step_variational_with(curve, pair, &MapConfig::default())
}

/// One application of the map by solving the variational law directly.
pub fn step_variational_with(
    curve: &CurveModel,
    pair: &PhasePair,
    cfg: &MapConfig,
) -> Result<PhasePair> {
    let tp01 = checked_pair(curve, pair, cfg)?;
    // θ-form of H₂(s₀,s₁) + H₁(s₁,·) = 0, cleared of the common 1/ρ(s₁):
    // F(θ₂) = M(θ₀,θ₁) + N(θ₁,θ₂); F is strictly decreasing (∂N/∂θ₂ < 0).
    let m01 = tp01.d2();
    let theta2 = solve_forward(
        pair.theta0,
        pair.theta1,
        |t2| {
            let pr = ThetaPair::new_unchecked(curve, pair.theta1, t2);
            (m01 + pr.d1(), pr.d12())
        },
        false,
        cfg.tol_root,
        "variational step",
    )?;

    finish_step(curve, pair, tp01, theta2, cfg)
}

/// Residual check and assembly of the image pair.
fn finish_step(
    curve: &CurveModel,
    pair: &PhasePair,
    tp01: ThetaPair<'_>,
    theta2: f64,
    cfg: &MapConfig,
) -> Result<PhasePair> {
    let tp12 = ThetaPair::new(curve, pair.theta1, theta2)?;
    let h2 = tp01.h2_s();
    let h1 = tp12.h1_s();
    let scale = 1.0f64.max(h1.abs()).max(h2.abs());
    if (h2 + h1).abs() > cfg.tol_residual * scale {
        return Err(Error::RootNoConvergence {
            context: "step residual",
        });
    }
    Ok(PhasePair {
        s0: pair.s1,
        s1: curve.s_of_theta(theta2),
        theta0: pair.theta1,
        theta1: theta2,
    })
}

/// A forward orbit: chained phase pairs, their exterior vertices, and the
/// per-step variational residuals (raw |H₂+H₁|; row 0 is 0 by convention).
#[derive(Debug, Clone)]
pub struct OrbitTrace {
    pub pairs: Vec<PhasePair>,
    pub vertices: Vec<Vec2>,
    pub residuals: Vec<f64>,
}

impl OrbitTrace {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    /// CSV export: step,s0,s1,eps,Px,Py,residual with full double precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,s0,s1,eps,Px,Py,residual\n");
        for (i, pair) in self.pairs.iter().enumerate() {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                i,
                pair.s0,
                pair.s1,
                pair.eps(),
                self.vertices[i].x,
                self.vertices[i].y,
                self.residuals[i],
            ));
        }
        out
    }
}

/// n applications of [`step`], recording vertices and residuals, with the
/// default tolerances.
pub fn iterate(curve: &CurveModel, pair: &PhasePair, n: usize) -> Result<OrbitTrace> {
    iterate_with(curve, pair, n, &MapConfig::default())
}

/// n applications of [`step`], recording vertices and residuals.
pub fn iterate_with(
    curve: &CurveModel,
    pair: &PhasePair,
    n: usize,
    cfg: &MapConfig,
) -> Result<OrbitTrace> {
    if n < 1 {
        return Err(Error::BadParams(
            "iterate requires at least one step".into(),
        ));
    }
    let mut pairs = Vec::with_capacity(n + 1);
    let mut vertices = Vec::with_capacity(n + 1);
    let mut residuals = Vec::with_capacity(n + 1);

    let mut prev = ThetaPair::new(curve, pair.theta0, pair.theta1)?;
    pairs.push(*pair);
    vertices.push(prev.vertex());
    residuals.push(0.0);

    let mut cur = *pair;
    for index in 0..n {
        let next = step_with(curve, &cur, cfg).map_err(|e| Error::StepFailed {
            index,
            source: Box::new(e),
        })?;
        let tp = ThetaPair::new(curve, next.theta0, next.theta1)?;
        residuals.push((prev.h2_s() + tp.h1_s()).abs());
        vertices.push(tp.vertex());
        pairs.push(next);
        prev = tp;
        cur = next;
    }
    Ok(OrbitTrace {
        pairs,
        vertices,
        residuals,
    })
}

/// Recovers the phase pair of an exterior point: the two tangency
/// parameters (s₀, s₁) with P on the forward tangent ray at s₀ and on the
/// backward ray at s₁.
pub fn pair_from_exterior_point(curve: &CurveModel, p: Vec2) -> Result<PhasePair> {
    // Tangency from P at normal angle θ  ⟺  g(θ) = P·u(θ) − h(θ) = 0,
    // and g > 0 exactly on the arc of normals visible from P. Locate the
    // maximum of g, reject interior points, then bracket one root on each
    // side of the maximum.
    let n = 256;
    let step_t = 2.0 * PI / n as f64;
    let g = |t: f64| p.dot(Vec2::dir(t)) - curve.h(t);
    let mut best = f64::NEG_INFINITY;
    let mut best_j = 0;
    for j in 0..n {
        let v = g(j as f64 * step_t);
        if v > best {
            best = v;
            best_j = j;
        }
    }
    let tc = best_j as f64 * step_t;
    // Refine the maximum through the stationarity of g.
    let dg = |t: f64| {
        let h = curve.h_jet(t);
        p.dot(Vec2::dir(t).rot90()) - h[1]
    };
    let t_star = if dg(tc - step_t) > 0.0 && dg(tc + step_t) < 0.0 {
        brent(
            dg,
            tc - step_t,
            tc + step_t,
            1e-13,
            "exterior point projection",
        )?
    } else {
        tc
    };
    if g(t_star) <= 0.0 {
        return Err(Error::InsidePoint { x: p.x, y: p.y });
    }

    let lo = brent(g, t_star - PI, t_star, 1e-15, "negative tangency")?;
    let hi = brent(g, t_star, t_star + PI, 1e-15, "positive tangency")?;
    debug_assert!(
        (p - curve.point_at_theta(lo)).dot(curve.tangent_at_theta(lo)) > 0.0,
        "first tangency must see P forward along the tangent"
    );
    Ok(PhasePair {
        s0: curve.s_of_theta(lo),
        s1: curve.s_of_theta(hi),
        theta0: lo,
        theta1: hi,
    })
}

/// Coefficients (A, B, C) of the small-gap expansion of the map,
/// ε₁ = ε₀ + Aε₀² + Bε₀³ + Cε₀⁴ + O(ε₀⁵), from the curvature jet at s.
pub fn expansion_coeffs(curve: &CurveModel, s: f64) -> (f64, f64, f64) {
    let jet = curve.jet_at(s, 1);
    let (k, k1, k2, k3) = (jet.k, jet.k1, jet.k2, jet.k3);
    let a = -2.0 * k1 / (3.0 * k);
    let b = 10.0 * k1 * k1 / (9.0 * k * k) - 2.0 * k2 / (3.0 * k);
    let c = (-24.0 * k.powi(4) * k1 - 1160.0 * k1.powi(3) + 1200.0 * k * k1 * k2
        - 216.0 * k * k * k3)
        / (540.0 * k.powi(3));
    (a, b, c)
}

/// Defect of the degree-4 map expansion at one phase point, evaluated in
/// gap variables so nothing is lost to cancellation. Returns the realized
/// gap ε₀ and ε₁ − (ε₀ + Aε₀² + Bε₀³ + Cε₀⁴) = O(ε₀⁵).
pub fn map_expansion_remainder(curve: &CurveModel, s0: f64, eps0: f64) -> Result<(f64, f64)> {
    let pair = PhasePair::new(curve, s0, s0 + eps0)?;
    let next = step(curve, &pair)?;
    let eps0 = ThetaPair::new(curve, pair.theta0, pair.theta1)?
        .excess_and_gap()
        .1;
    let eps1 = ThetaPair::new(curve, next.theta0, next.theta1)?
        .excess_and_gap()
        .1;
    let (a, b, c) = expansion_coeffs(curve, s0);
    let predicted = eps0 + a * eps0 * eps0 + b * eps0.powi(3) + c * eps0.powi(4);
    Ok((eps0, eps1 - predicted))
}
