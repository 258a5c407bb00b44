//! Two-point primitives in normal-angle form.
//!
//! Every generating-function quantity for a pair of boundary points is a
//! short closed form in the half-gap d = (θ₁−θ₀)/2, the midpoint angle m,
//! the support jets at the two ends, and the stable differences (Δh, Δh′).
//! Working in these variables keeps full relative precision all the way to
//! the diagonal θ₁ → θ₀: the chord decomposes as
//!
//! ```text
//!   γ(θ₁) − γ(θ₀) = p·u(m) + q·u′(m)
//!   p = Δh·cos d − (h′₀+h′₁)·sin d          (O(d³), mildly cancelling)
//!   q = (h₀+h₁)·sin d + Δh′·cos d           (O(d), no cancellation)
//! ```
//!
//! and the tangent-length sum, its partials, and the two tangent-circle
//! radii are all rational in p, q and the end jets.

use crate::curve::CurveModel;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::quad::integrate;

use std::f64::consts::PI;

/// Coefficients of tan d − d = Σ cₖ d^{2k+1}, k = 1..14. Enough terms for
/// relative error below 1e−20 at the switch point d = 1/4; beyond that the
/// direct difference keeps 15 digits.
const TAN_MINUS_D: [f64; 14] = [
    3.33333333333333315e-01,
    1.33333333333333331e-01,
    5.39682539682539708e-02,
    2.18694885361552030e-02,
    8.86323552990219733e-03,
    3.59212803657248114e-03,
    1.45583438705131833e-03,
    5.90027440945585947e-04,
    2.39129114243552478e-04,
    9.69153795692945095e-05,
    3.92783238833168327e-05,
    1.59189050693289637e-05,
    6.45168921565543065e-06,
    2.61477115129075465e-06,
];

/// tan d − d without cancellation (series below d = 1/4, direct above).
pub fn tan_minus_identity(d: f64) -> f64 {
    if d.abs() < 0.25 {
        let d2 = d * d;
        let mut acc = 0.0;
        for c in TAN_MINUS_D.iter().rev() {
            acc = acc * d2 + c;
        }
        acc * d2 * d
    } else {
        d.tan() - d
    }
}

/// One pair of boundary points in normal-angle variables, with everything a
/// generating-function evaluation needs precomputed.
#[derive(Debug, Clone)]
pub struct ThetaPair<'a> {
    model: &'a CurveModel,
    pub th0: f64,
    pub th1: f64,
    /// Half-gap d = (θ₁−θ₀)/2 ∈ (0, π/2).
    pub d: f64,
    /// Midpoint angle (θ₀+θ₁)/2.
    pub m: f64,
    pub sd: f64,
    pub cd: f64,
    pub td: f64,
    /// sec²d.
    pub sec2: f64,
    /// Support jet (to order 3 used here; order 6 available) at θ₀ and θ₁.
    pub h0: [f64; 7],
    pub h1: [f64; 7],
    /// Stable h(θ₁) − h(θ₀).
    pub dh: f64,
    /// Stable h′(θ₁) − h′(θ₀).
    pub dhp: f64,
}

impl<'a> ThetaPair<'a> {
    /// Builds the pair; requires the open phase-space condition
    /// 0 < θ₁ − θ₀ < π.
    pub fn new(model: &'a CurveModel, th0: f64, th1: f64) -> Result<Self> {
        let gap = th1 - th0;
        if gap <= 0.0 {
            return Err(Error::DegeneratePair {
                eps: gap,
                margin: PI - gap,
            });
        }
        if gap >= PI - 1e-12 {
            return Err(Error::ParallelTangents { gap });
        }
        Ok(Self::new_unchecked(model, th0, th1))
    }

    /// Builds the pair without the phase-space check. For solver closures
    /// whose brackets already guarantee 0 < θ₁ − θ₀ < π.
    pub(crate) fn new_unchecked(model: &'a CurveModel, th0: f64, th1: f64) -> Self {
        let d = 0.5 * (th1 - th0);
        let (sd, cd) = d.sin_cos();
        let (dh, dhp) = model.delta_h(th0, th1);
        ThetaPair {
            model,
            th0,
            th1,
            d,
            m: 0.5 * (th0 + th1),
            sd,
            cd,
            td: sd / cd,
            sec2: 1.0 / (cd * cd),
            h0: model.h_jet(th0),
            h1: model.h_jet(th1),
            dh,
            dhp,
        }
    }

    #[inline]
    pub fn h_mean(&self) -> f64 {
        0.5 * (self.h0[0] + self.h1[0])
    }

    #[inline]
    fn hp_mean(&self) -> f64 {
        0.5 * (self.h0[1] + self.h1[1])
    }

    /// Radii of curvature at the two ends.
    #[inline]
    pub fn rho0(&self) -> f64 {
        self.h0[0] + self.h0[2]
    }

    #[inline]
    pub fn rho1(&self) -> f64 {
        self.h1[0] + self.h1[2]
    }

    /// Chord component along u(m).
    #[inline]
    pub fn p(&self) -> f64 {
        self.dh * self.cd - 2.0 * self.hp_mean() * self.sd
    }

    /// Chord component along u′(m).
    #[inline]
    pub fn q(&self) -> f64 {
        2.0 * self.h_mean() * self.sd + self.dhp * self.cd
    }

    /// Chord γ(θ₁) − γ(θ₀).
    pub fn chord(&self) -> Vec2 {
        let um = Vec2::dir(self.m);
        self.p() * um + self.q() * um.rot90()
    }

    /// Generating function H = |Pγ(θ₀)| + |Pγ(θ₁)| = 2h̄·tan d + Δh′.
    pub fn gen_h(&self) -> f64 {
        2.0 * self.h_mean() * self.td + self.dhp
    }

    /// ∂H/∂θ₀ (θ-form; divide by ρ₀ for the arclength partial).
    pub fn d1(&self) -> f64 {
        self.h0[1] * self.td - self.h_mean() * self.sec2 - self.h0[2]
    }

    /// ∂H/∂θ₁.
    pub fn d2(&self) -> f64 {
        self.h1[1] * self.td + self.h_mean() * self.sec2 + self.h1[2]
    }

    /// ∂²H/∂θ₀².
    pub fn d11(&self) -> f64 {
        self.h0[2] * self.td - self.h0[1] * self.sec2 + self.h_mean() * self.sec2 * self.td
            - self.h0[3]
    }

    /// ∂²H/∂θ₁².
    pub fn d22(&self) -> f64 {
        self.h1[2] * self.td
            + self.h1[1] * self.sec2
            + self.h_mean() * self.sec2 * self.td
            + self.h1[3]
    }

    /// ∂²H/∂θ₀∂θ₁ = −H·sec²d/2; strictly negative on the phase space.
    pub fn d12(&self) -> f64 {
        -0.5 * self.gen_h() * self.sec2
    }

    /// Arclength partial H₁ = ∂H/∂s₀.
    pub fn h1_s(&self) -> f64 {
        self.d1() / self.rho0()
    }

    /// Arclength partial H₂ = ∂H/∂s₁.
    pub fn h2_s(&self) -> f64 {
        self.d2() / self.rho1()
    }

    /// Arclength partial H₁₁ = ∂²H/∂s₀².
    pub fn h11_s(&self) -> f64 {
        let rho = self.rho0();
        let rho_p = self.h0[1] + self.h0[3];
        self.d11() / (rho * rho) - self.d1() * rho_p / (rho * rho * rho)
    }

    /// Arclength partial H₂₂ = ∂²H/∂s₁².
    pub fn h22_s(&self) -> f64 {
        let rho = self.rho1();
        let rho_p = self.h1[1] + self.h1[3];
        self.d22() / (rho * rho) - self.d2() * rho_p / (rho * rho * rho)
    }

    /// Arclength mixed partial H₁₂ = −k₀k₁H/(2cos²d).
    pub fn h12_s(&self) -> f64 {
        self.d12() / (self.rho0() * self.rho1())
    }

    /// Radius of the circle tangent to the curve at γ(θ₀) and to the
    /// tangent line at θ₁, on the domain side of that line.
    pub fn radius_fwd(&self) -> f64 {
        (self.p() * self.cd + self.q() * self.sd) / (2.0 * self.cd * self.cd)
    }

    /// Radius of the circle tangent to the curve at γ(θ₁) and to the
    /// tangent line at θ₀ — the construction circle of the pair.
    pub fn radius_back(&self) -> f64 {
        (self.q() * self.sd - self.p() * self.cd) / (2.0 * self.cd * self.cd)
    }

    /// Signed parameters of the tangent-line intersection:
    /// P = γ₀ + t·γ′₀ = γ₁ + u·γ′₁ with t > 0 > u on the phase space.
    pub fn tangent_params(&self) -> (f64, f64) {
        let sin2d = 2.0 * self.sd * self.cd;
        let t = (self.p() * self.cd + self.q() * self.sd) / sin2d;
        let u = (self.p() * self.cd - self.q() * self.sd) / sin2d;
        (t, u)
    }

    /// The tangent-line intersection point itself.
    pub fn vertex(&self) -> Vec2 {
        let (t, _) = self.tangent_params();
        self.model.point_at_theta(self.th0) + t * self.model.tangent_at_theta(self.th0)
    }

    /// Peano-kernel integral ½∫ h″(t)·(t−θ₀)(θ₁−t) dt, the trapezoid
    /// correction of ∫h over the gap. O(d³), always computable to full
    /// relative precision.
    fn kernel_integral(&self) -> f64 {
        let (a, b) = (self.th0, self.th1);
        0.5 * integrate(|t| self.model.h_jet(t)[2] * (t - a) * (b - t), a, b)
    }

    /// (H − δ, δ) where δ = s(θ₁) − s(θ₀) is the arc gap: the positive
    /// perimeter excess of the pair and the gap itself, both cancellation
    /// free. H̄ = 2h̄(tan d − d) + kernel, δ = 2h̄·d + Δh′ − kernel.
    pub fn excess_and_gap(&self) -> (f64, f64) {
        let kernel = self.kernel_integral();
        let hbar2 = 2.0 * self.h_mean();
        let excess = hbar2 * tan_minus_identity(self.d) + kernel;
        let gap = hbar2 * self.d + self.dhp - kernel;
        (excess, gap)
    }

    /// Perimeter excess H − (s₁−s₀) alone.
    pub fn excess(&self) -> f64 {
        self.excess_and_gap().0
    }
}
