//! Curve specification: the serializable description of a boundary.
//!
//! Curves are given by their support function h(theta), parametrized by the
//! outward normal angle. Three kinds are supported:
//! * `circle`    - h = radius
//! * `ellipse`   - h = sqrt(a^2 cos^2 theta + b^2 sin^2 theta)
//! * `fourier_support` - truncated Fourier series
//!     h = sum_n (c_n cos n theta + s_n sin n theta)
//!
//! The JSON wire format is
//! `{"kind": "circle"|"ellipse"|"fourier_support", "radius": r, "a": a,
//!   "b": b, "coeffs": [[n, cn, sn], ...]}` with unknown fields rejected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Circle,
    Ellipse,
    FourierSupport,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub kind: CurveKind,
    /// Circle radius (`circle` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Semi-major axis (`ellipse` only), a >= b > 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// Semi-minor axis (`ellipse` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Support-function harmonics `(n, cos amplitude, sin amplitude)`
    /// (`fourier_support` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<(u32, f64, f64)>>,
}

impl CurveSpec {
    pub fn circle(radius: f64) -> Self {
        CurveSpec {
            kind: CurveKind::Circle,
            radius: Some(radius),
            a: None,
            b: None,
            coeffs: None,
        }
    }

    pub fn ellipse(a: f64, b: f64) -> Self {
        CurveSpec {
            kind: CurveKind::Ellipse,
            radius: None,
            a: Some(a),
            b: Some(b),
            coeffs: None,
        }
    }

    pub fn fourier(coeffs: Vec<(u32, f64, f64)>) -> Self {
        CurveSpec {
            kind: CurveKind::FourierSupport,
            radius: None,
            a: None,
            b: None,
            coeffs: Some(coeffs),
        }
    }

    /// Unit-mean support with a single cosine harmonic:
    /// h = 1 + amp * cos(n theta). The perturbed circle used throughout the
    /// test suite is `cos_harmonic(3, 0.05)`.
    pub fn cos_harmonic(n: u32, amp: f64) -> Self {
        CurveSpec::fourier(vec![(0, 1.0, 0.0), (n, amp, 0.0)])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: CurveSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization cannot fail")
    }

    /// Kind-dependent field checks. Convexity (rho > 0) is checked later by
    /// model construction on a fine grid; this only rejects structurally
    /// invalid specs.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::BadSpec(msg));
        match self.kind {
            CurveKind::Circle => {
                if self.a.is_some() || self.b.is_some() || self.coeffs.is_some() {
                    return fail("circle accepts only the `radius` field".into());
                }
                match self.radius {
                    Some(r) if r.is_finite() && r > 0.0 => Ok(()),
                    Some(r) => fail(format!("circle radius must be positive, got {r}")),
                    None => fail("circle requires `radius`".into()),
                }
            }
            CurveKind::Ellipse => {
                if self.radius.is_some() || self.coeffs.is_some() {
                    return fail("ellipse accepts only the `a`, `b` fields".into());
                }
                match (self.a, self.b) {
                    (Some(a), Some(b)) if a.is_finite() && b.is_finite() && a >= b && b > 0.0 => {
                        Ok(())
                    }
                    (Some(a), Some(b)) => {
                        fail(format!("ellipse requires a >= b > 0, got a = {a}, b = {b}"))
                    }
                    _ => fail("ellipse requires both `a` and `b`".into()),
                }
            }
            CurveKind::FourierSupport => {
                if self.radius.is_some() || self.a.is_some() || self.b.is_some() {
                    return fail("fourier_support accepts only the `coeffs` field".into());
                }
                let coeffs = match &self.coeffs {
                    Some(c) if !c.is_empty() => c,
                    _ => return fail("fourier_support requires non-empty `coeffs`".into()),
                };
                let mut seen = std::collections::BTreeSet::new();
                for &(n, c, s) in coeffs {
                    if !c.is_finite() || !s.is_finite() {
                        return fail(format!("non-finite amplitude at harmonic {n}"));
                    }
                    if !seen.insert(n) {
                        return fail(format!("duplicate harmonic index {n}"));
                    }
                    if n == 0 && s != 0.0 {
                        return fail("harmonic 0 cannot carry a sine amplitude".into());
                    }
                }
                Ok(())
            }
        }
    }
}
