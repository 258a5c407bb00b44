//! Lazutkin coordinates, near-integrability, and confocal-ellipse caustics.
//!
//! The boundary reparametrization x(s) = (1/L)∫₀^s k^{2/3} dr conjugates the
//! outer length billiard near the boundary to the near-integrable normal
//! form x ↦ x + y, y ↦ y + O(y⁴): the x-advance is *exactly* y by
//! construction, and the whole dynamical content sits in the fourth-order
//! drift of y. On a disk the drift vanishes identically; on an ellipse the
//! dynamics is totally integrable in a different sense — every confocal
//! ellipse is an invariant curve (caustic) of the map, which
//! [`caustic_drift`] verifies by direct long iteration, together with the
//! right-angle lemma behind it ([`orthogonality_check`]).

use crate::curve::{CurveKind, CurveModel, CurveSpec};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::map::{pair_from_exterior_point, step, tangent_intersection, PhasePair};
use crate::solver::brent;

use std::f64::consts::{PI, TAU};

/// The Lazutkin chart of a curve: the weighted boundary coordinate
/// x(s) = (1/L)∫₀^s k^{2/3} dr and its inverse, sharing the curve's
/// precomputed tables with the orbit asymptotics.
#[derive(Debug, Clone, Copy)]
pub struct LazutkinChart<'a> {
    curve: &'a CurveModel,
}

impl<'a> LazutkinChart<'a> {
    pub fn new(curve: &'a CurveModel) -> Self {
        LazutkinChart { curve }
    }

    /// Forward coordinate, 1-periodic lift: x(s + ℓ) = x(s) + 1.
    pub fn x(&self, s: f64) -> f64 {
        self.curve.lazutkin_of_s(s)
    }

    /// Inverse coordinate (the a₀ profile of the orbit asymptotics).
    pub fn s(&self, x: f64) -> f64 {
        self.curve.arc_of_lazutkin(x)
    }

    /// Normalization constant L = ∫ k^{2/3} ds.
    pub fn constant(&self) -> f64 {
        self.curve.lazutkin_constant()
    }
}

/// Lazutkin coordinate of s (1-periodic lift behavior).
pub fn lazutkin_x(curve: &CurveModel, s: f64) -> f64 {
    curve.lazutkin_of_s(s)
}

/// One map step in Lazutkin coordinates. The state (x, y) is pulled back to
/// the phase pair (s, s+ε) with s = x⁻¹(x), ε = x⁻¹(x+y) − s, stepped, and
/// pushed forward: x′ = x + y holds exactly by construction, and the return
/// value exposes the O(y⁴) drift in y′.
pub fn conjugated_step(curve: &CurveModel, x: f64, y: f64) -> Result<(f64, f64)> {
    if y <= 0.0 {
        return Err(Error::BadParams(format!(
            "conjugated step needs y > 0, got {y}"
        )));
    }
    let th0 = curve.theta_of_lazutkin(x);
    let th1 = curve.theta_of_lazutkin(x + y);
    let gap = th1 - th0;
    if gap >= PI - 1e-12 {
        return Err(Error::ParallelTangents { gap });
    }
    let pair = PhasePair {
        s0: curve.s_of_theta(th0),
        s1: curve.s_of_theta(th1),
        theta0: th0,
        theta1: th1,
    };
    let next = step(curve, &pair)?;
    let x1 = x + y;
    let y1 = curve.lazutkin_of_theta(next.theta1) - x1;
    Ok((x1, y1))
}

/// max over `anchors` starting positions of |y′ − y|, for each y in
/// `y_list` — the data behind the O(y⁴) remainder slope.
pub fn lazutkin_drift_profile(
    curve: &CurveModel,
    y_list: &[f64],
    anchors: usize,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(y_list.len());
    for &y in y_list {
        let mut worst = 0.0f64;
        for i in 0..anchors {
            let x = i as f64 / anchors as f64;
            let (_, y1) = conjugated_step(curve, x, y)?;
            worst = worst.max((y1 - y).abs());
        }
        out.push(worst);
    }
    Ok(out)
}

/// The confocal ellipse Γ with the same foci as the (a, b) ellipse, grown
/// by λ: semi-axes √(a²+λ), √(b²+λ).
pub fn confocal_ellipse(a: f64, b: f64, lambda: f64) -> Result<CurveSpec> {
    if !(a.is_finite() && b.is_finite() && a >= b && b > 0.0) {
        return Err(Error::BadParams(format!(
            "confocal family needs a ≥ b > 0, got a={a}, b={b}"
        )));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::BadParams(format!(
            "confocal parameter must be positive, got {lambda}"
        )));
    }
    Ok(CurveSpec::ellipse(
        (a * a + lambda).sqrt(),
        (b * b + lambda).sqrt(),
    ))
}

/// Record of a long orbit checked against a candidate invariant curve.
#[derive(Debug, Clone)]
pub struct CausticProbe {
    /// Confocal parameter of the candidate caustic.
    pub lambda: f64,
    /// Number of map steps taken.
    pub steps: usize,
    /// Orbit vertices P_0 … P_n.
    pub points: Vec<Vec2>,
    /// Unsigned distance of each vertex from the candidate curve.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
}

impl CausticProbe {
    /// CSV export: step,Px,Py,deviation.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,Px,Py,deviation\n");
        for (i, p) in self.points.iter().enumerate() {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e}\n",
                i, p.x, p.y, self.deviations[i]
            ));
        }
        out
    }
}

/// Axes of the origin-centered axis-aligned ellipse behind a spec, if it is
/// one (circles count with a = b).
fn ellipse_axes(spec: &CurveSpec) -> Option<(f64, f64)> {
    match spec.kind {
        CurveKind::Circle => {
            let r = spec.radius.unwrap_or(f64::NAN);
            Some((r, r))
        }
        CurveKind::Ellipse => Some((spec.a?, spec.b?)),
        CurveKind::FourierSupport => None,
    }
}

/// Unsigned distance from `p` to the origin-centered ellipse with semi-axes
/// (a, b), through the support residual: for p outside the ellipse,
/// max_θ (p·u(θ) − h(θ)) is exactly the distance; inside, its magnitude is
/// the distance to the boundary.
fn ellipse_deviation(a: f64, b: f64, p: Vec2) -> f64 {
    let h = |t: f64| {
        let (s, c) = t.sin_cos();
        (a * a * c * c + b * b * s * s).sqrt()
    };
    let g = |t: f64| p.dot(Vec2::dir(t)) - h(t);
    let n = 128;
    let mut best = f64::NEG_INFINITY;
    let mut best_j = 0;
    for j in 0..n {
        let v = g(j as f64 * TAU / n as f64);
        if v > best {
            best = v;
            best_j = j;
        }
    }
    // Refine the maximum via the stationarity equation g′ = 0.
    let dg = |t: f64| {
        let (s, c) = t.sin_cos();
        let hp = (b * b - a * a) * s * c / (a * a * c * c + b * b * s * s).sqrt();
        p.dot(Vec2::dir(t).rot90()) - hp
    };
    let tc = best_j as f64 * TAU / n as f64;
    let dt = TAU / n as f64;
    let refined = if dg(tc - dt) > 0.0 && dg(tc + dt) < 0.0 {
        brent(dg, tc - dt, tc + dt, 1e-13, "caustic deviation")
            .map(g)
            .unwrap_or(best)
    } else {
        best
    };
    refined.max(best).abs()
}

/// Iterates the outer length billiard around the inner ellipse ℰ from a
/// point of the confocal candidate Γ and records the distance of every
/// vertex from Γ. Exact invariance (the total integrability of the ellipse)
/// shows up as a deviation sequence at solver-noise level.
pub fn caustic_drift(inner: &CurveModel, lambda: f64, p0: Vec2, n: usize) -> Result<CausticProbe> {
    if n < 1 {
        return Err(Error::BadParams(
            "caustic probe needs at least one step".into(),
        ));
    }
    let (a, b) = ellipse_axes(inner.spec()).ok_or_else(|| {
        Error::BadParams("caustic probe requires an ellipse or circle inner curve".into())
    })?;
    let gamma = confocal_ellipse(a, b, lambda)?;
    let (ga, gb) = ellipse_axes(&gamma).expect("confocal curve is an ellipse");
    let on_gamma = (p0.x / ga).powi(2) + (p0.y / gb).powi(2) - 1.0;
    if on_gamma.abs() > 1e-12 {
        return Err(Error::BadParams(format!(
            "start point is not on the confocal ellipse (residual {on_gamma:.3e})"
        )));
    }

    let mut pair = pair_from_exterior_point(inner, p0)?;
    let mut points = Vec::with_capacity(n + 1);
    let mut deviations = Vec::with_capacity(n + 1);
    points.push(tangent_intersection(inner, pair.s0, pair.s1)?);
    deviations.push(ellipse_deviation(ga, gb, points[0]));

    let ell = inner.total_length();
    for index in 0..n {
        pair = step(inner, &pair).map_err(|e| Error::StepFailed {
            index,
            source: Box::new(e),
        })?;
        // Reduce to the base window once per winding: the θ-subtraction is
        // exact (Sterbenz) and keeps the lift from eroding root precision
        // over 10⁴ steps.
        if pair.theta0 >= TAU {
            pair = PhasePair {
                s0: pair.s0 - ell,
                s1: pair.s1 - ell,
                theta0: pair.theta0 - TAU,
                theta1: pair.theta1 - TAU,
            };
        }
        let vertex = tangent_intersection(inner, pair.s0, pair.s1)?;
        points.push(vertex);
        deviations.push(ellipse_deviation(ga, gb, vertex));
    }
    let max_deviation = deviations.iter().cloned().fold(0.0, f64::max);
    Ok(CausticProbe {
        lambda,
        steps: n,
        points,
        deviations,
        max_deviation,
    })
}

/// The right-angle lemma behind ellipse integrability: for a chord P₀P₁ of
/// Γ tangent to the confocal inner ellipse ℰ at Q, and R the pole of the
/// chord (intersection of the Γ-tangents at P₀ and P₁), the lines P₀P₁ and
/// QR are orthogonal. Returns the normalized residual
/// |(P₁−P₀)·(Q−R)| / (|P₁−P₀||Q−R|).
pub fn orthogonality_check(inner: &CurveModel, gamma: &CurveModel, p0: Vec2) -> Result<f64> {
    let (ga, gb) = ellipse_axes(gamma.spec()).ok_or_else(|| {
        Error::BadParams("orthogonality check requires an ellipse or circle outer curve".into())
    })?;
    let on_gamma = (p0.x / ga).powi(2) + (p0.y / gb).powi(2) - 1.0;
    if on_gamma.abs() > 1e-12 {
        return Err(Error::BadParams(format!(
            "chord start is not on the outer ellipse (residual {on_gamma:.3e})"
        )));
    }

    let pair = pair_from_exterior_point(inner, p0)?;
    let next = step(inner, &pair)?;
    let p1 = tangent_intersection(inner, next.s0, next.s1)?;
    // The chord P₀P₁ runs along the tangent line of ℰ at the shared
    // parameter s₁ — that tangency point is Q.
    let q = inner.jet_at(pair.s1, 0).point;

    // Tangent directions of Γ at P₀, P₁ via the ellipse normal angles.
    let tangent_of = |p: Vec2| Vec2::new(p.x / (ga * ga), p.y / (gb * gb)).rot90();
    let t0 = tangent_of(p0);
    let t1 = tangent_of(p1);
    let denom = t0.wedge(t1);
    if denom.abs() < 1e-14 {
        return Err(Error::DegenerateGeometry(
            "tangent lines at the chord ends are parallel".into(),
        ));
    }
    let r = p0 + ((p1 - p0).wedge(t1) / denom) * t0;

    let chord = p1 - p0;
    let spoke = q - r;
    let scale = chord.norm() * spoke.norm();
    if scale < 1e-14 {
        return Err(Error::DegenerateGeometry("degenerate chord or pole".into()));
    }
    Ok(chord.dot(spoke).abs() / scale)
}
