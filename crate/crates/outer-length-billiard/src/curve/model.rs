//! Immutable curve model built from a [`CurveSpec`].
//!
//! Everything is organized around the support function h(θ) of the body,
//! with θ the outward normal angle. The boundary point and its arclength
//! derivatives come from the exact relations
//!
//! ```text
//!   γ(θ)  = h·u(θ) + h′·u′(θ),   u(θ) = (cos θ, sin θ),  u′ = Ju
//!   dγ/ds = u′(θ),               ds/dθ = ρ(θ) = h + h″ > 0,   k = 1/ρ
//! ```
//!
//! so tangent, curvature and curvature jets are obtained by differentiating
//! h in θ and chaining through ds = ρ dθ — no finite differences anywhere.
//!
//! Arclength s(θ) and the Lazutkin primitive ∫ρ^{1/3} dθ are tabulated on a
//! uniform θ-grid with one Gauss–Legendre panel per cell, which makes both
//! the anchors and any mid-panel value accurate to machine precision. The
//! inverses (θ from s, θ from Lazutkin x) run bracketed Newton inside the
//! panel located by binary search.

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::quad::gl_panel;
use crate::solver::newton_bisect;

use super::spec::{CurveKind, CurveSpec};

use std::f64::consts::{PI, TAU};

/// Grid size used for convexity validation and extremum bracketing,
/// independent of the table resolution (well beyond the bandwidth of any
/// admissible Fourier spec).
const VALIDATION_GRID: usize = 4096;

/// Evaluation kernel for the support function, reduced from the spec once at
/// build time.
#[derive(Debug, Clone)]
enum Profile {
    /// h = r.
    Circle { r: f64 },
    /// h = √w with w(θ) = (a²+b²)/2 + e·cos 2θ, e = (a²−b²)/2.
    Ellipse { q0: f64, e: f64 },
    /// h = Σ cₙ cos nθ + sₙ sin nθ, with precomputed float harmonics.
    Fourier { terms: Vec<(f64, f64, f64)> },
}

impl Profile {
    fn from_spec(spec: &CurveSpec) -> Self {
        match spec.kind {
            CurveKind::Circle => Profile::Circle {
                r: spec.radius.unwrap(),
            },
            CurveKind::Ellipse => {
                let (a, b) = (spec.a.unwrap(), spec.b.unwrap());
                Profile::Ellipse {
                    q0: 0.5 * (a * a + b * b),
                    e: 0.5 * (a * a - b * b),
                }
            }
            CurveKind::FourierSupport => Profile::Fourier {
                terms: spec
                    .coeffs
                    .as_ref()
                    .unwrap()
                    .iter()
                    .map(|&(n, c, s)| (f64::from(n), c, s))
                    .collect(),
            },
        }
    }

    /// h and its first six θ-derivatives.
    fn h_jet(&self, theta: f64) -> [f64; 7] {
        match self {
            Profile::Circle { r } => [*r, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            Profile::Ellipse { q0, e } => {
                // w = h², so h⁽ⁿ⁾ = (w⁽ⁿ⁾ − Σ_{0<j<n} C(n,j) h⁽ʲ⁾ h⁽ⁿ⁻ʲ⁾)/(2h).
                let (s2, c2) = (2.0 * theta).sin_cos();
                let w = [
                    q0 + e * c2,
                    -2.0 * e * s2,
                    -4.0 * e * c2,
                    8.0 * e * s2,
                    16.0 * e * c2,
                    -32.0 * e * s2,
                    -64.0 * e * c2,
                ];
                let mut h = [0.0; 7];
                h[0] = w[0].sqrt();
                for n in 1..7 {
                    let mut conv = 0.0;
                    for j in 1..n {
                        conv += BINOMIAL[n][j] * h[j] * h[n - j];
                    }
                    h[n] = (w[n] - conv) / (2.0 * h[0]);
                }
                h
            }
            Profile::Fourier { terms } => {
                let mut h = [0.0; 7];
                for &(n, c0, s0) in terms {
                    let (sn, cn) = (n * theta).sin_cos();
                    // (c, s) amplitudes of the m-th derivative of
                    // c₀·cos nθ + s₀·sin nθ: rotate by n each step.
                    let (mut c, mut s) = (c0, s0);
                    for hm in &mut h {
                        *hm += c * cn + s * sn;
                        let next_c = n * s;
                        let next_s = -n * c;
                        c = next_c;
                        s = next_s;
                    }
                }
                h
            }
        }
    }

    /// h(θ) alone (hot path for quadratures and scans).
    fn h(&self, theta: f64) -> f64 {
        match self {
            Profile::Circle { r } => *r,
            Profile::Ellipse { q0, e } => (q0 + e * (2.0 * theta).cos()).sqrt(),
            Profile::Fourier { terms } => {
                let mut h = 0.0;
                for &(n, c, s) in terms {
                    let (sn, cn) = (n * theta).sin_cos();
                    h += c * cn + s * sn;
                }
                h
            }
        }
    }

    /// ρ = h + h″ alone.
    fn rho(&self, theta: f64) -> f64 {
        match self {
            Profile::Circle { r } => *r,
            Profile::Ellipse { q0, e } => {
                // ρ = a²b²/w^{3/2}; note a²b² = q0² − e².
                let w = q0 + e * (2.0 * theta).cos();
                (q0 * q0 - e * e) / (w * w.sqrt())
            }
            Profile::Fourier { terms } => {
                let mut rho = 0.0;
                for &(n, c, s) in terms {
                    let (sn, cn) = (n * theta).sin_cos();
                    rho += (1.0 - n * n) * (c * cn + s * sn);
                }
                rho
            }
        }
    }

    /// Exact support-function difference (h(θ1)−h(θ0), h′(θ1)−h′(θ0)),
    /// factored so every term carries an explicit sin(n·d) — full relative
    /// accuracy even for nearly coincident angles.
    fn delta_h(&self, theta0: f64, theta1: f64) -> (f64, f64) {
        let m = 0.5 * (theta0 + theta1);
        let d = 0.5 * (theta1 - theta0);
        match self {
            Profile::Circle { .. } => (0.0, 0.0),
            Profile::Ellipse { q0, e } => {
                let (s2m, c2m) = (2.0 * m).sin_cos();
                let (s2d, c2d) = (2.0 * d).sin_cos();
                let h0 = (q0 + e * (2.0 * theta0).cos()).sqrt();
                let h1 = (q0 + e * (2.0 * theta1).cos()).sqrt();
                // Δw = −2e sin2m sin2d, and h = √w.
                let dw = -2.0 * e * s2m * s2d;
                let dh = dw / (h0 + h1);
                // h′ = A/(2h) with A = w′ = −2e sin 2θ.
                let da = -4.0 * e * c2m * s2d;
                let abar = -2.0 * e * s2m * c2d;
                let dhp = (da * 0.5 * (h0 + h1) - abar * dh) / (2.0 * h0 * h1);
                (dh, dhp)
            }
            Profile::Fourier { terms } => {
                let mut dh = 0.0;
                let mut dhp = 0.0;
                for &(n, c, s) in terms {
                    let (snm, cnm) = (n * m).sin_cos();
                    let snd = (n * d).sin();
                    dh += 2.0 * snd * (-c * snm + s * cnm);
                    dhp += -2.0 * n * snd * (c * cnm + s * snm);
                }
                (dh, dhp)
            }
        }
    }
}

/// Pascal's triangle up to row 6, for the ellipse h-jet recursion.
const BINOMIAL: [[f64; 7]; 7] = [
    [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0, 0.0, 0.0],
    [1.0, 5.0, 10.0, 10.0, 5.0, 1.0, 0.0],
    [1.0, 6.0, 15.0, 20.0, 15.0, 6.0, 1.0],
];

/// Position, tangent and curvature data at one boundary point.
///
/// `derivs[n]` holds γ⁽ⁿ⁾ (derivatives with respect to arclength) up to the
/// order requested from [`CurveModel::jet_at`]; `derivs[0]` is the point and
/// `derivs[1]` the unit tangent. The curvature block k, k′, k″, k‴ is always
/// present.
#[derive(Debug, Clone)]
pub struct CurveJet {
    pub s: f64,
    /// Outward normal angle at the point.
    pub theta: f64,
    pub point: Vec2,
    /// Unit tangent γ′.
    pub tangent: Vec2,
    pub k: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    /// γ, γ′, …, γ⁽ᵒʳᵈᵉʳ⁾.
    pub derivs: Vec<Vec2>,
}

/// Strictly convex closed curve with precomputed arclength and Lazutkin
/// tables. Immutable after construction; all methods are `&self` and
/// thread-safe.
#[derive(Debug, Clone)]
pub struct CurveModel {
    spec: CurveSpec,
    profile: Profile,
    resolution: usize,
    /// Grid spacing 2π/resolution.
    dtheta: f64,
    /// s(θ_j) at θ_j = j·2π/resolution, j = 0..=resolution.
    s_anchor: Vec<f64>,
    /// ∫₀^{θ_j} ρ^{1/3} dθ (unnormalized Lazutkin primitive).
    x_anchor: Vec<f64>,
    total_length: f64,
    /// L = ∫₀^ℓ k^{2/3} ds = ∫₀^{2π} ρ^{1/3} dθ.
    lazutkin_constant: f64,
    k_min: f64,
    k_max: f64,
}

/// Validates the spec, checks strict convexity on the validation grid and
/// builds the quadrature tables. `resolution` is the number of θ-panels
/// (minimum 256).
pub fn build_curve(spec: &CurveSpec, resolution: usize) -> Result<CurveModel> {
    spec.validate()?;
    if resolution < 256 {
        return Err(Error::BadSpec(format!(
            "resolution must be at least 256, got {resolution}"
        )));
    }
    let profile = Profile::from_spec(spec);

    // Strict convexity: ρ > 0 everywhere. Locate the grid minimum, refine it
    // with a parabola through the three neighboring samples, and reject
    // non-positive values. The same sweep yields the curvature bounds.
    let n = VALIDATION_GRID;
    let mut rho_min = f64::INFINITY;
    let mut rho_max = f64::NEG_INFINITY;
    let mut arg_min = 0usize;
    let mut arg_max = 0usize;
    let grid_step = TAU / n as f64;
    for j in 0..n {
        let rho = profile.rho(j as f64 * grid_step);
        if rho < rho_min {
            rho_min = rho;
            arg_min = j;
        }
        if rho > rho_max {
            rho_max = rho;
            arg_max = j;
        }
    }
    let refine = |j: usize| -> (f64, f64) {
        let tc = j as f64 * grid_step;
        let (fm, f0, fp) = (
            profile.rho(tc - grid_step),
            profile.rho(tc),
            profile.rho(tc + grid_step),
        );
        let denom = fm - 2.0 * f0 + fp;
        if denom.abs() < 1e-300 {
            return (tc, f0);
        }
        let shift = 0.5 * (fm - fp) / denom;
        let shift = shift.clamp(-1.0, 1.0);
        (tc + shift * grid_step, f0 - 0.25 * (fm - fp) * shift)
    };
    let (theta_min, rho_min) = refine(arg_min);
    let (_, rho_max) = refine(arg_max);
    if !(rho_min > 0.0) {
        return Err(Error::NonConvex {
            min_rho: rho_min,
            theta: theta_min.rem_euclid(TAU),
        });
    }

    // One Gauss–Legendre panel per grid cell for both primitives.
    let dtheta = TAU / resolution as f64;
    let mut s_anchor = Vec::with_capacity(resolution + 1);
    let mut x_anchor = Vec::with_capacity(resolution + 1);
    s_anchor.push(0.0);
    x_anchor.push(0.0);
    let (mut s_acc, mut s_comp) = (0.0_f64, 0.0_f64);
    let (mut x_acc, mut x_comp) = (0.0_f64, 0.0_f64);
    let kahan = |acc: &mut f64, comp: &mut f64, term: f64| {
        let y = term - *comp;
        let t = *acc + y;
        *comp = (t - *acc) - y;
        *acc = t;
    };
    for j in 0..resolution {
        // Both endpoints as multiples of dtheta so that b - a telescopes
        // exactly across panels (b here is the next panel's a).
        let a = j as f64 * dtheta;
        let b = (j + 1) as f64 * dtheta;
        kahan(&mut s_acc, &mut s_comp, gl_panel(|t| profile.rho(t), a, b));
        kahan(
            &mut x_acc,
            &mut x_comp,
            gl_panel(|t| profile.rho(t).cbrt(), a, b),
        );
        s_anchor.push(s_acc);
        x_anchor.push(x_acc);
    }
    let total_length = s_anchor[resolution];
    let lazutkin_constant = x_anchor[resolution];

    Ok(CurveModel {
        spec: spec.clone(),
        profile,
        resolution,
        dtheta,
        s_anchor,
        x_anchor,
        total_length,
        lazutkin_constant,
        k_min: 1.0 / rho_max,
        k_max: 1.0 / rho_min,
    })
}

impl CurveModel {
    pub fn spec(&self) -> &CurveSpec {
        &self.spec
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Total boundary length ℓ.
    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    /// Lazutkin normalization L = ∫ k^{2/3} ds.
    pub fn lazutkin_constant(&self) -> f64 {
        self.lazutkin_constant
    }

    pub fn curvature_bounds(&self) -> (f64, f64) {
        (self.k_min, self.k_max)
    }

    /// h(θ) and its θ-derivatives up to order six.
    pub fn h_jet(&self, theta: f64) -> [f64; 7] {
        self.profile.h_jet(theta)
    }

    pub fn h(&self, theta: f64) -> f64 {
        self.profile.h(theta)
    }

    /// Radius of curvature ρ(θ) = h + h″ = 1/k.
    pub fn rho(&self, theta: f64) -> f64 {
        self.profile.rho(theta)
    }

    /// Stable (Δh, Δh′) between two normal angles; every term carries an
    /// explicit factor sin(n·(θ1−θ0)/2), so nearby angles lose no digits.
    pub fn delta_h(&self, theta0: f64, theta1: f64) -> (f64, f64) {
        self.profile.delta_h(theta0, theta1)
    }

    /// Boundary point at normal angle θ.
    pub fn point_at_theta(&self, theta: f64) -> Vec2 {
        let h = self.profile.h_jet(theta);
        let u = Vec2::dir(theta);
        h[0] * u + h[1] * u.rot90()
    }

    /// Unit tangent at normal angle θ (this is u′(θ) exactly).
    pub fn tangent_at_theta(&self, theta: f64) -> Vec2 {
        Vec2::dir(theta).rot90()
    }

    /// ρ and its first four θ-derivatives.
    pub fn rho_jet(&self, theta: f64) -> [f64; 5] {
        let h = self.profile.h_jet(theta);
        [
            h[0] + h[2],
            h[1] + h[3],
            h[2] + h[4],
            h[3] + h[5],
            h[4] + h[6],
        ]
    }

    /// Curvature and its first three arclength derivatives, chained through
    /// d/ds = (1/ρ)·d/dθ.
    pub fn curvature_jet_at_theta(&self, theta: f64) -> [f64; 4] {
        let r = self.rho_jet(theta);
        curvature_jets(&r)
    }

    /// Full jet at normal angle θ; `order` is the highest γ-derivative
    /// requested (0..=6).
    pub fn jet_at_theta(&self, theta: f64, order: usize) -> CurveJet {
        assert!(order <= 6, "jet order must be at most 6, got {order}");
        let h = self.profile.h_jet(theta);
        let r = [
            h[0] + h[2],
            h[1] + h[3],
            h[2] + h[4],
            h[3] + h[5],
            h[4] + h[6],
        ];
        let kj = curvature_jets(&r);
        let [k, k1, k2, k3] = kj;
        // Fourth arclength derivative of k, needed only for γ⁽⁶⁾.
        let k4 = if order >= 6 {
            let p = 1.0 / r[0];
            let (p6, p7, p8, p9) = (p.powi(6), p.powi(7), p.powi(8), p.powi(9));
            -r[4] * p6 + 15.0 * r[3] * r[1] * p7 + 10.0 * r[2] * r[2] * p7
                - 105.0 * r[2] * r[1] * r[1] * p8
                + 105.0 * r[1].powi(4) * p9
        } else {
            0.0
        };

        let u = Vec2::dir(theta);
        let up = u.rot90();
        let point = h[0] * u + h[1] * up;

        let mut derivs = Vec::with_capacity(order + 1);
        derivs.push(point);
        if order >= 1 {
            derivs.push(up);
        }
        if order >= 2 {
            derivs.push(-k * u);
        }
        if order >= 3 {
            derivs.push(-k1 * u - (k * k) * up);
        }
        if order >= 4 {
            derivs.push((k.powi(3) - k2) * u - 3.0 * k * k1 * up);
        }
        if order >= 5 {
            derivs.push(
                (6.0 * k * k * k1 - k3) * u + (k.powi(4) - 4.0 * k * k2 - 3.0 * k1 * k1) * up,
            );
        }
        if order >= 6 {
            derivs.push(
                -(k.powi(5) - 10.0 * k * k * k2 - 15.0 * k * k1 * k1 + k4) * u
                    + (10.0 * k.powi(3) * k1 - 10.0 * k1 * k2 - 5.0 * k * k3) * up,
            );
        }

        CurveJet {
            s: self.s_of_theta(theta),
            theta,
            point,
            tangent: up,
            k,
            k1,
            k2,
            k3,
            derivs,
        }
    }

    /// Full jet at arclength s (wraps modulo ℓ on the lift).
    pub fn jet_at(&self, s: f64, order: usize) -> CurveJet {
        let theta = self.theta_of_s(s);
        let mut jet = self.jet_at_theta(theta, order);
        jet.s = s;
        jet
    }

    /// Arclength of the point with normal angle θ, on the lift:
    /// s(θ + 2π) = s(θ) + ℓ.
    pub fn s_of_theta(&self, theta: f64) -> f64 {
        let wraps = (theta / TAU).floor();
        let t = theta - wraps * TAU;
        let j = ((t / self.dtheta) as usize).min(self.resolution - 1);
        let a = j as f64 * self.dtheta;
        self.s_anchor[j] + gl_panel(|x| self.profile.rho(x), a, t) + wraps * self.total_length
    }

    /// Normal angle of the point at arclength s, on the lift:
    /// θ(s + ℓ) = θ(s) + 2π.
    pub fn theta_of_s(&self, s: f64) -> f64 {
        let wraps = (s / self.total_length).floor();
        let target = s - wraps * self.total_length;
        // Binary-search the anchor table for the enclosing panel.
        let j = match self
            .s_anchor
            .binary_search_by(|v| v.partial_cmp(&target).unwrap())
        {
            Ok(j) => j.min(self.resolution - 1),
            Err(j) => j.saturating_sub(1).min(self.resolution - 1),
        };
        let a = j as f64 * self.dtheta;
        let b = (j + 1) as f64 * self.dtheta;
        let local = target - self.s_anchor[j];
        // The anchor table and the in-panel integral are accumulated in
        // different rounding streams, so a target within an ulp of a panel
        // boundary can fall outside the integral's range over the panel.
        // Clamp those slivers to the boundary instead of asking the solver
        // for a sign change the panel does not contain.
        if local <= 0.0 {
            return a + wraps * TAU;
        }
        if local >= gl_panel(|x| self.profile.rho(x), a, b) {
            return b + wraps * TAU;
        }
        let guess = a + (local / (self.s_anchor[j + 1] - self.s_anchor[j])) * self.dtheta;
        let theta = newton_bisect(
            |t| {
                (
                    gl_panel(|x| self.profile.rho(x), a, t) - local,
                    self.profile.rho(t),
                )
            },
            a,
            b,
            guess,
            4.0 * f64::EPSILON * (1.0 + b.abs()),
            "arclength inversion",
        )
        .expect("monotone panel inversion cannot lose its bracket");
        theta + wraps * TAU
    }

    /// Lazutkin coordinate of the normal angle θ, 1-periodic on the lift.
    pub fn lazutkin_of_theta(&self, theta: f64) -> f64 {
        let wraps = (theta / TAU).floor();
        let t = theta - wraps * TAU;
        let j = ((t / self.dtheta) as usize).min(self.resolution - 1);
        let a = j as f64 * self.dtheta;
        (self.x_anchor[j] + gl_panel(|x| self.profile.rho(x).cbrt(), a, t)) / self.lazutkin_constant
            + wraps
    }

    /// Lazutkin coordinate of the point at arclength s.
    pub fn lazutkin_of_s(&self, s: f64) -> f64 {
        self.lazutkin_of_theta(self.theta_of_s(s))
    }

    /// Normal angle with Lazutkin coordinate x (inverse of
    /// [`lazutkin_of_theta`](Self::lazutkin_of_theta), on the lift).
    pub fn theta_of_lazutkin(&self, x: f64) -> f64 {
        let wraps = x.floor();
        let target = (x - wraps) * self.lazutkin_constant;
        let j = match self
            .x_anchor
            .binary_search_by(|v| v.partial_cmp(&target).unwrap())
        {
            Ok(j) => j.min(self.resolution - 1),
            Err(j) => j.saturating_sub(1).min(self.resolution - 1),
        };
        let a = j as f64 * self.dtheta;
        let b = (j + 1) as f64 * self.dtheta;
        let local = target - self.x_anchor[j];
        // Same boundary-sliver clamp as in theta_of_s.
        if local <= 0.0 {
            return a + wraps * TAU;
        }
        if local >= gl_panel(|x| self.profile.rho(x).cbrt(), a, b) {
            return b + wraps * TAU;
        }
        let guess = a + (local / (self.x_anchor[j + 1] - self.x_anchor[j])) * self.dtheta;
        let theta = newton_bisect(
            |t| {
                (
                    gl_panel(|x| self.profile.rho(x).cbrt(), a, t) - local,
                    self.profile.rho(t).cbrt(),
                )
            },
            a,
            b,
            guess,
            4.0 * f64::EPSILON * (1.0 + b.abs()),
            "lazutkin inversion",
        )
        .expect("monotone panel inversion cannot lose its bracket");
        theta + wraps * TAU
    }

    /// Arclength with Lazutkin coordinate x (the orbit-seeding map a₀).
    pub fn arc_of_lazutkin(&self, x: f64) -> f64 {
        self.s_of_theta(self.theta_of_lazutkin(x))
    }

    /// Parameter of the antipodal point: same tangent direction, opposite
    /// orientation. Returned on the lift, s < s* < s + ℓ.
    pub fn antipodal(&self, s: f64) -> f64 {
        self.s_of_theta(self.theta_of_s(s) + PI)
    }

    /// ∫₀^ℓ f(jet(s)) ds as a trapezoid sum in θ with weight ρ(θ), using the
    /// table grid (spectrally accurate for smooth periodic integrands).
    /// Jets are built with γ-derivative order 1; the curvature block is
    /// always filled.
    pub fn periodic_quadrature<F: Fn(&CurveJet) -> f64>(&self, integrand: F) -> f64 {
        let n = self.resolution;
        let (mut acc, mut comp) = (0.0_f64, 0.0_f64);
        for j in 0..n {
            let theta = j as f64 * self.dtheta;
            let mut jet = self.jet_at_theta(theta, 1);
            jet.s = self.s_anchor[j];
            let term = integrand(&jet) * self.profile.rho(theta);
            let y = term - comp;
            let t = acc + y;
            comp = (t - acc) - y;
            acc = t;
        }
        acc * self.dtheta
    }
}

/// k, k′, k″, k‴ (arclength derivatives) from ρ and its θ-derivatives.
fn curvature_jets(r: &[f64; 5]) -> [f64; 4] {
    let p = 1.0 / r[0];
    let (p3, p4, p5, p6, p7) = (p.powi(3), p.powi(4), p.powi(5), p.powi(6), p.powi(7));
    [
        p,
        -r[1] * p3,
        -r[2] * p4 + 3.0 * r[1] * r[1] * p5,
        -r[3] * p5 + 10.0 * r[2] * r[1] * p6 - 15.0 * r[1].powi(3) * p7,
    ]
}
