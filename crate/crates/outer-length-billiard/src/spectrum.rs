//! Minimal circumscribed q-gons, Mather's β function, and the asymptotic
//! structure of the periodic orbits.
//!
//! A q-periodic orbit of rotation number 1/q is a critical configuration of
//! the action Σ H(s_i, s_{i+1}) over circumscribed q-gons; the minimal one
//! realizes β(1/q)·q, the minimal perimeter. The minimizer is found by a
//! damped Newton method in the normal-angle chart, where the Hessian is
//! cyclic tridiagonal.
//!
//! β(1/q) expands in odd powers of 1/q:
//!
//! ```text
//!   β(1/q) ~ ℓ/q + (L³/12)/q³ + β₅/q⁵ + …,   L = ∫ k^(2/3) ds,
//! ```
//!
//! which this module verifies two ways: a weighted inverse-power fit of
//! computed β values against the quadrature values of β₁, β₃, β₅, and the
//! isoperimetric defect D = L³/4 − π²ℓ that recognizes circles (D = 0 only
//! for circles). Orbit shapes themselves converge to Lazutkin-equidistributed
//! points at rate 1/q², checked by [`orbit_asymptotics_check`].

use crate::curve::{CurveModel, ThetaPair};
use crate::error::{Error, Result};
use crate::fitting::{inverse_power_fit, loglog_slope};
use crate::quad;
use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

/// A circumscribed q-gon configuration on the lift.
#[derive(Debug, Clone)]
pub struct OrbitConfig {
    /// Period (number of tangency points), ≥ 3.
    pub q: usize,
    /// Strictly increasing tangency arclengths s_0 < … < s_{q−1}, with the
    /// cyclic closure s_q = s_0 + ℓ implicit.
    pub s: Vec<f64>,
    /// Σ H(s_i, s_{i+1}) — the perimeter of the circumscribed polygon.
    pub action: f64,
    /// Σ (H(s_i,s_{i+1}) − (s_{i+1}−s_i)) = action − ℓ, accumulated without
    /// cancellation. β(1/q) − ℓ/q = excess/q to full relative precision.
    pub excess: f64,
    /// max_i |H₂(s_{i−1},s_i) + H₁(s_i,s_{i+1})| at the returned point.
    pub residual: f64,
}

/// β-expansion report: computed β values, the inverse-power fit, and the
/// theoretical quadrature coefficients.
#[derive(Debug, Clone)]
pub struct BetaReport {
    pub q: Vec<usize>,
    pub beta: Vec<f64>,
    /// β(1/q) − ℓ/q, cancellation-free.
    pub beta_excess: Vec<f64>,
    /// (power, coefficient) pairs of the fitted expansion Σ c_p q^{−p}.
    pub fitted: Vec<(u32, f64)>,
    /// Quadrature values (β₁, β₃, β₅).
    pub theoretical: (f64, f64, f64),
    /// Isoperimetric defect L³/4 − π²ℓ.
    pub defect: f64,
}

impl BetaReport {
    pub fn fitted_coeff(&self, power: u32) -> Option<f64> {
        self.fitted
            .iter()
            .find(|(p, _)| *p == power)
            .map(|(_, c)| *c)
    }

    /// CSV rows q,beta,beta_minus_ell_over_q.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,beta,beta_minus_ell_over_q\n");
        for i in 0..self.q.len() {
            out.push_str(&format!(
                "{},{:.16e},{:.16e}\n",
                self.q[i], self.beta[i], self.beta_excess[i]
            ));
        }
        out
    }

    /// JSON document with the fitted and theoretical coefficients.
    pub fn to_json(&self) -> String {
        let mut fitted = serde_json::Map::new();
        for (p, c) in &self.fitted {
            fitted.insert(format!("b{p}"), serde_json::json!(c));
        }
        let doc = serde_json::json!({
            "q": self.q,
            "beta": self.beta,
            "fitted": fitted,
            "theoretical": {
                "b1": self.theoretical.0,
                "b3": self.theoretical.1,
                "b5": self.theoretical.2,
            },
            "defect": self.defect,
        });
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }
}

/// Maximum Newton iterations for one orbit minimization.
const MAX_ITERS: usize = 60;
/// Armijo halvings before declaring the ordering unrecoverable.
const MAX_HALVINGS: usize = 40;

/// Tridiagonal solve (Thomas algorithm), uniform symmetric off-diagonal.
fn thomas(diag: &[f64], off: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut piv = diag[0];
    if piv.abs() < 1e-300 {
        return None;
    }
    c[0] = off.first().copied().unwrap_or(0.0) / piv;
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - off[i - 1] * c[i - 1];
        if piv.abs() < 1e-300 {
            return None;
        }
        if i < n - 1 {
            c[i] = off[i] / piv;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

/// Symmetric cyclic-tridiagonal solve via the Sherman–Morrison correction:
/// `off[i]` couples i and i+1 for i < n−1, `off[n−1]` couples n−1 and 0.
fn solve_cyclic(diag: &[f64], off: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    debug_assert!(n >= 3);
    let corner = off[n - 1];
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= corner * corner / gamma;
    let inner_off = &off[..n - 1];
    let y = thomas(&d, inner_off, rhs)?;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = corner;
    let z = thomas(&d, inner_off, &u)?;
    let denom = 1.0 + z[0] + corner * z[n - 1] / gamma;
    if denom.abs() < 1e-300 {
        return None;
    }
    let fact = (y[0] + corner * y[n - 1] / gamma) / denom;
    Some((0..n).map(|i| y[i] - fact * z[i]).collect())
}

/// Gradient, Hessian bands, and action pieces of the cyclic configuration.
struct Assembled {
    grad: Vec<f64>,
    diag: Vec<f64>,
    off: Vec<f64>,
    /// max_i |G_i|/ρ_i — the arclength-form residual.
    residual: f64,
    /// Σ excess over the q sides (Kahan).
    excess: f64,
}

fn assemble(curve: &CurveModel, thetas: &[f64]) -> Assembled {
    let q = thetas.len();
    let pair = |i: usize| {
        let (a, b) = if i + 1 < q {
            (thetas[i], thetas[i + 1])
        } else {
            (thetas[q - 1], thetas[0] + TAU)
        };
        ThetaPair::new_unchecked(curve, a, b)
    };

    let mut d1 = vec![0.0; q];
    let mut d2 = vec![0.0; q];
    let mut d11 = vec![0.0; q];
    let mut d22 = vec![0.0; q];
    let mut off = vec![0.0; q];
    let mut excess = 0.0;
    let mut comp = 0.0;
    for i in 0..q {
        let p = pair(i);
        d1[i] = p.d1();
        d2[i] = p.d2();
        d11[i] = p.d11();
        d22[i] = p.d22();
        off[i] = p.d12();
        let term = p.excess() - comp;
        let sum = excess + term;
        comp = (sum - excess) - term;
        excess = sum;
    }

    let mut grad = vec![0.0; q];
    let mut diag = vec![0.0; q];
    let mut residual = 0.0f64;
    for i in 0..q {
        let prev = if i == 0 { q - 1 } else { i - 1 };
        grad[i] = d2[prev] + d1[i];
        diag[i] = d22[prev] + d11[i];
        residual = residual.max(grad[i].abs() / curve.rho(thetas[i]));
    }
    Assembled {
        grad,
        diag,
        off,
        residual,
        excess,
    }
}

fn action_value(curve: &CurveModel, thetas: &[f64]) -> f64 {
    let q = thetas.len();
    let mut total = 0.0;
    for i in 0..q {
        let (a, b) = if i + 1 < q {
            (thetas[i], thetas[i + 1])
        } else {
            (thetas[q - 1], thetas[0] + TAU)
        };
        total += ThetaPair::new_unchecked(curve, a, b).gen_h();
    }
    total
}

fn ordering_ok(thetas: &[f64]) -> bool {
    let q = thetas.len();
    const MARGIN: f64 = 1e-9;
    for i in 0..q {
        let gap = if i + 1 < q {
            thetas[i + 1] - thetas[i]
        } else {
            thetas[0] + TAU - thetas[q - 1]
        };
        if gap <= MARGIN || gap >= PI - MARGIN {
            return false;
        }
    }
    true
}

/// Newton minimization from a given angle configuration.
fn minimize_from(curve: &CurveModel, mut thetas: Vec<f64>) -> Result<OrbitConfig> {
    let q = thetas.len();
    let tol = 1e-12 * curve.total_length();

    let mut asm = assemble(curve, &thetas);
    let mut iters = 0;
    while asm.residual >= tol {
        if iters >= MAX_ITERS {
            return Err(Error::NoConvergence {
                q,
                residual: asm.residual,
                iters,
            });
        }
        iters += 1;

        // Solve (Hess + λ)·dθ = −grad, escalating the Levenberg shift until
        // the step is a finite descent direction.
        let scale = asm.diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let mut lambda = 0.0;
        let rhs: Vec<f64> = asm.grad.iter().map(|g| -g).collect();
        let mut step = None;
        for _ in 0..18 {
            let shifted: Vec<f64> = asm.diag.iter().map(|d| d + lambda).collect();
            if let Some(dth) = solve_cyclic(&shifted, &asm.off, &rhs) {
                let descent: f64 = dth.iter().zip(&asm.grad).map(|(d, g)| d * g).sum();
                if dth.iter().all(|v| v.is_finite()) && descent < 0.0 {
                    step = Some(dth);
                    break;
                }
            }
            lambda = if lambda == 0.0 {
                1e-10 * scale.max(1.0)
            } else {
                lambda * 10.0
            };
        }
        let dth = step.ok_or(Error::NoConvergence {
            q,
            residual: asm.residual,
            iters,
        })?;

        // Far from the minimizer require Armijo decrease of the action; in
        // the quadratic basin accept the guarded Newton step outright (the
        // action itself is flat to roundoff there).
        let check_decrease = asm.residual > 1e-6;
        let phi0 = if check_decrease {
            action_value(curve, &thetas)
        } else {
            0.0
        };
        let slope: f64 = dth.iter().zip(&asm.grad).map(|(d, g)| d * g).sum();
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = thetas.iter().zip(&dth).map(|(th, d)| th + t * d).collect();
            if ordering_ok(&trial)
                && (!check_decrease || action_value(curve, &trial) <= phi0 + 1e-4 * t * slope)
            {
                thetas = trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::MonotonicityLoss { q });
        }
        asm = assemble(curve, &thetas);
    }

    let s: Vec<f64> = thetas.iter().map(|&t| curve.s_of_theta(t)).collect();
    Ok(OrbitConfig {
        q,
        s,
        action: curve.total_length() + asm.excess,
        excess: asm.excess,
        residual: asm.residual,
    })
}

/// Smallest eigenvalue of the dense symmetric cyclic-tridiagonal Hessian.
fn hessian_min_eig(asm: &Assembled) -> f64 {
    let q = asm.diag.len();
    let mut m = DMatrix::<f64>::zeros(q, q);
    for i in 0..q {
        m[(i, i)] = asm.diag[i];
        let j = (i + 1) % q;
        m[(i, j)] += asm.off[i];
        m[(j, i)] += asm.off[i];
    }
    let eig = SymmetricEigen::new(m);
    eig.eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Finds the minimal circumscribed q-gon (the action minimizer with
/// rotation number 1/q). Seeds from `init` when given, otherwise from
/// Lazutkin-equidistributed points, which sit within O(q⁻²) of the true
/// orbit (see [`orbit_asymptotics_check`], which measures exactly that).
/// Verifies second-order minimality through the spectrum of the cyclic
/// Hessian.
pub fn minimize_orbit(
    curve: &CurveModel,
    q: usize,
    init: Option<&OrbitConfig>,
) -> Result<OrbitConfig> {
    if q < 3 {
        return Err(Error::BadParams(format!(
            "orbit period must be at least 3, got {q}"
        )));
    }
    if let Some(seed) = init {
        if seed.s.len() != q {
            return Err(Error::BadParams(format!(
                "init has {} points but q = {q}",
                seed.s.len()
            )));
        }
        let thetas: Vec<f64> = seed.s.iter().map(|&s| curve.theta_of_s(s)).collect();
        if !ordering_ok(&thetas) {
            return Err(Error::BadParams("init violates cyclic monotonicity".into()));
        }
        return minimize_checked(curve, thetas);
    }
    // Lazutkin seeds; on a second-order check failure restart from rotated
    // anchors (a saddle between two symmetric minimizers can trap the exact
    // symmetric seed).
    let mut last_err = None;
    for anchor in [0.0, 0.37, 0.61] {
        let thetas: Vec<f64> = (0..q)
            .map(|i| curve.theta_of_lazutkin(anchor / q as f64 + i as f64 / q as f64))
            .collect();
        match minimize_checked(curve, thetas) {
            Ok(orbit) => return Ok(orbit),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one anchor attempted"))
}

fn minimize_checked(curve: &CurveModel, thetas: Vec<f64>) -> Result<OrbitConfig> {
    let q = thetas.len();
    let orbit = minimize_from(curve, thetas)?;
    let thetas: Vec<f64> = orbit.s.iter().map(|&s| curve.theta_of_s(s)).collect();
    let asm = assemble(curve, &thetas);
    let scale = asm.diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let min_eig = hessian_min_eig(&asm);
    // Semidefinite with slack: integrable families carry exact zero modes.
    if min_eig < -1e-8 * scale {
        return Err(Error::NoConvergence {
            q,
            residual: min_eig,
            iters: MAX_ITERS,
        });
    }
    Ok(orbit)
}

/// β(1/q) = action/q of the minimal orbit.
pub fn beta_of(curve: &CurveModel, q: usize) -> Result<f64> {
    Ok(minimize_orbit(curve, q, None)?.action / q as f64)
}

/// The quadrature values of the first three odd β-coefficients:
/// β₁ = ℓ, β₃ = L³/12, β₅ = L⁴ ∫ (k^{4/3}/120 + k^{−8/3}k′²/2160) ds.
pub fn theoretical_coeffs(curve: &CurveModel) -> (f64, f64, f64) {
    let ell = curve.total_length();
    let l = curve.lazutkin_constant();
    let b3 = l * l * l / 12.0;
    let integral = curve.periodic_quadrature(|jet| {
        jet.k.powf(4.0 / 3.0) / 120.0 + jet.k.powf(-8.0 / 3.0) * jet.k1 * jet.k1 / 2160.0
    });
    (ell, b3, l.powi(4) * integral)
}

/// Isoperimetric defect D = L³/4 − π²ℓ ≤ 0, zero exactly on circles.
pub fn isoperimetric_defect(curve: &CurveModel) -> f64 {
    let l = curve.lazutkin_constant();
    l * l * l / 4.0 - PI * PI * curve.total_length()
}

/// Minimizes orbits for every q in `q_list` (concurrently), fits
/// β(1/q) against inverse odd powers, and bundles the theoretical
/// coefficients and defect.
pub fn fit_coeffs(curve: &CurveModel, q_list: &[usize]) -> Result<BetaReport> {
    if q_list.len() < 4 {
        return Err(Error::BadParams("fit needs at least 4 periods".into()));
    }
    let qmin = *q_list.iter().min().expect("nonempty");
    let qmax = *q_list.iter().max().expect("nonempty");
    if qmin < 3 {
        return Err(Error::BadParams(format!(
            "orbit period must be at least 3, got {qmin}"
        )));
    }
    if (qmax as f64) < 8.0 * qmin as f64 {
        return Err(Error::BadParams(
            "fit periods must span at least a factor of 8".into(),
        ));
    }

    let orbits: Vec<OrbitConfig> = q_list
        .par_iter()
        .map(|&q| minimize_orbit(curve, q, None))
        .collect::<Result<_>>()?;

    let qs: Vec<f64> = q_list.iter().map(|&q| q as f64).collect();
    let beta: Vec<f64> = orbits.iter().map(|o| o.action / o.q as f64).collect();
    let beta_excess: Vec<f64> = orbits.iter().map(|o| o.excess / o.q as f64).collect();

    let all_powers = [1u32, 3, 5, 7, 9];
    let n_coeff = all_powers.len().min(q_list.len());
    let powers = &all_powers[..n_coeff];
    let weights: Vec<f64> = qs.iter().map(|q| q.powi(5)).collect();
    let coeffs = inverse_power_fit(&qs, &beta, powers, &weights)?;

    Ok(BetaReport {
        q: q_list.to_vec(),
        beta,
        beta_excess,
        fitted: powers.iter().cloned().zip(coeffs).collect(),
        theoretical: theoretical_coeffs(curve),
        defect: isoperimetric_defect(curve),
    })
}

/// Convergence report of minimized orbits toward the Lazutkin asymptotics.
#[derive(Debug, Clone)]
pub struct AsymptoticsReport {
    pub qs: Vec<usize>,
    /// max_k |s_k − s_0 − (a₀(x₀+k/q) − a₀(x₀))| per q.
    pub s_dev: Vec<f64>,
    /// max_k |ε_k − b₁(x₀+k/q)/q − b₂(x₀+k/q)/q²| per q.
    pub eps_dev: Vec<f64>,
    /// Fitted decay order of s_dev (expected 2).
    pub order_s: f64,
    /// Fitted decay order of eps_dev (expected 3).
    pub order_eps: f64,
    /// Period used for the a₂ comparison (largest in the list).
    pub q_big: usize,
    /// max_k |a₂(x₀+k/q) − a₂(x₀)| — the scale of the a₂ signal.
    pub a2_scale: f64,
    /// rms(q²·s-deviation − formula a₂ difference) at q_big, with the
    /// formula taken exactly as printed.
    pub a2_discrepancy: f64,
    /// Fitted amplitude of the formula in the measured q²·s-deviation
    /// (least squares together with the phase direction). Comes out ≈ −1 on
    /// every curve measured: the closed form matches the orbits up to a
    /// global sign. NaN when there is no a₂ signal (constant curvature).
    pub a2_amplitude_ratio: f64,
    /// rms residual after fitting out the phase direction (the orbit's
    /// phase in x is only fixed up to O(q⁻²), which feeds through
    /// b₁-differences) and the formula amplitude.
    pub a2_discrepancy_adjusted: f64,
}

/// The a₂ profile of the orbit-shape expansion, from the closed form with
/// the zero-mean constant: a₂(x) = k^{−2/3}(a₀(x))·(∫₀ˣ G(a₀(t))dt + c·x),
/// G = L³·((9k″k^{−7/3} − 12k′²k^{−10/3})/810 + k^{2/3}/15), c = −mean(G∘a₀).
/// Returns a₂ at the 1-periodic coordinates `xs` (ascending, within one
/// period of each other).
fn a2_profile(curve: &CurveModel, xs: &[f64]) -> Vec<f64> {
    let l = curve.lazutkin_constant();
    let g_of_theta = |theta: f64| {
        let kj = curve.curvature_jet_at_theta(theta);
        let (k, k1, k2) = (kj[0], kj[1], kj[2]);
        l.powi(3)
            * ((9.0 * k2 * k.powf(-7.0 / 3.0) - 12.0 * k1 * k1 * k.powf(-10.0 / 3.0)) / 810.0
                + k.powf(2.0 / 3.0) / 15.0)
    };
    // dt = k^{2/3}/L ds = ρ^{1/3}/L dθ.
    let mean = curve.periodic_quadrature(|jet| g_of_theta(jet.theta) * jet.k.powf(2.0 / 3.0)) / l;
    let c = -mean;

    // Cumulative ∫₀ˣ G(a₀(t)) dt, advanced panel by panel along the
    // ascending xs (dt = ρ^{1/3}/L dθ).
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    let mut theta_prev = curve.theta_of_lazutkin(0.0);
    for &x in xs {
        let theta = curve.theta_of_lazutkin(x);
        acc += quad::integrate(
            |t| g_of_theta(t) * curve.rho(t).powf(1.0 / 3.0) / l,
            theta_prev,
            theta,
        );
        theta_prev = theta;
        let k = 1.0 / curve.rho(theta);
        out.push(k.powf(-2.0 / 3.0) * (acc + c * x));
    }
    out
}

/// Measures how fast minimized orbits settle onto the Lazutkin profile:
/// s_k → a₀(x₀ + k/q) at order q⁻², ε_k → b₁/q + b₂/q² at order q⁻³, and an
/// empirical-vs-formula comparison of the a₂ correction (reported, never
/// asserted: see [`AsymptoticsReport::a2_amplitude_ratio`] for what the
/// measurement says about the closed form).
pub fn orbit_asymptotics_check(curve: &CurveModel, q_list: &[usize]) -> Result<AsymptoticsReport> {
    if q_list.len() < 2 {
        return Err(Error::BadParams(
            "asymptotics needs at least 2 periods".into(),
        ));
    }
    let l = curve.lazutkin_constant();
    let ell = curve.total_length();

    let orbits: Vec<OrbitConfig> = q_list
        .par_iter()
        .map(|&q| minimize_orbit(curve, q, None))
        .collect::<Result<_>>()?;

    let mut s_dev = Vec::with_capacity(orbits.len());
    let mut eps_dev = Vec::with_capacity(orbits.len());
    for orbit in &orbits {
        let q = orbit.q;
        let x0 = curve.lazutkin_of_s(orbit.s[0]);
        let a0_x0 = curve.arc_of_lazutkin(x0);
        let mut dmax = 0.0f64;
        let mut rmax = 0.0f64;
        for k in 0..q {
            let xk = x0 + k as f64 / q as f64;
            let d = (orbit.s[k] - orbit.s[0]) - (curve.arc_of_lazutkin(xk) - a0_x0);
            dmax = dmax.max(d.abs());

            let eps_k = if k + 1 < q {
                orbit.s[k + 1] - orbit.s[k]
            } else {
                orbit.s[0] + ell - orbit.s[q - 1]
            };
            let theta = curve.theta_of_lazutkin(xk);
            let kj = curve.curvature_jet_at_theta(theta);
            let b1 = l * kj[0].powf(-2.0 / 3.0);
            let b2 = -l * l * kj[1] * kj[0].powf(-7.0 / 3.0) / 3.0;
            let r = eps_k - b1 / q as f64 - b2 / (q as f64 * q as f64);
            rmax = rmax.max(r.abs());
        }
        s_dev.push(dmax);
        eps_dev.push(rmax);
    }

    let qs_f: Vec<f64> = q_list.iter().map(|&q| q as f64).collect();
    let order_s = -loglog_slope(&qs_f, &s_dev);
    let order_eps = -loglog_slope(&qs_f, &eps_dev);

    // a₂ comparison at the largest period.
    let (big_idx, _) = q_list
        .iter()
        .enumerate()
        .max_by_key(|(_, &q)| q)
        .expect("nonempty");
    let orbit = &orbits[big_idx];
    let qb = orbit.q as f64;
    let x0 = curve.lazutkin_of_s(orbit.s[0]);
    let xs: Vec<f64> = (0..orbit.q).map(|k| x0 + k as f64 / qb).collect();
    let a2 = a2_profile(curve, &xs);
    let a0_x0 = curve.arc_of_lazutkin(x0);

    // Empirical q²·d against the formula. Two nuisance directions are
    // calibrated away: the orbit's phase in x is pinned only to O(q⁻²), which
    // feeds the residual along b₁-differences, and the formula's overall
    // amplitude is fitted rather than fixed (on every curve measured here the
    // fit returns ≈ −1: the printed closed form matches the orbits up to a
    // global sign).
    let mut measured = Vec::with_capacity(orbit.q);
    let mut predicted = Vec::with_capacity(orbit.q);
    let mut phase_dir = Vec::with_capacity(orbit.q);
    let mut a2_scale = 0.0f64;
    let k0 = 1.0 / curve.rho(curve.theta_of_lazutkin(xs[0]));
    let b1_0 = l * k0.powf(-2.0 / 3.0);
    for k in 0..orbit.q {
        let d = (orbit.s[k] - orbit.s[0]) - (curve.arc_of_lazutkin(xs[k]) - a0_x0);
        measured.push(qb * qb * d);
        predicted.push(a2[k] - a2[0]);
        a2_scale = a2_scale.max((a2[k] - a2[0]).abs());
        let kk = 1.0 / curve.rho(curve.theta_of_lazutkin(xs[k]));
        phase_dir.push(l * kk.powf(-2.0 / 3.0) - b1_0);
    }
    let rms = |v: &[f64]| (v.iter().map(|r| r * r).sum::<f64>() / v.len() as f64).sqrt();
    let a2_discrepancy = rms(&measured
        .iter()
        .zip(&predicted)
        .map(|(m, p)| m - p)
        .collect::<Vec<f64>>());

    // Least squares for measured ≈ alpha·phase_dir + ratio·predicted.
    let vv: f64 = phase_dir.iter().map(|v| v * v).sum();
    let pp: f64 = predicted.iter().map(|p| p * p).sum();
    let vp: f64 = phase_dir.iter().zip(&predicted).map(|(v, p)| v * p).sum();
    let vm: f64 = phase_dir.iter().zip(&measured).map(|(v, m)| v * m).sum();
    let pm: f64 = predicted.iter().zip(&measured).map(|(p, m)| p * m).sum();
    let det = vv * pp - vp * vp;
    let (alpha, ratio) = if det > 1e-14 * vv.max(pp).powi(2) {
        ((pp * vm - vp * pm) / det, (vv * pm - vp * vm) / det)
    } else if pp > 0.0 {
        (0.0, pm / pp)
    } else {
        (0.0, f64::NAN)
    };
    let adjusted: Vec<f64> = measured
        .iter()
        .zip(&predicted)
        .zip(&phase_dir)
        .map(|((m, p), v)| m - alpha * v - ratio * p)
        .collect();

    Ok(AsymptoticsReport {
        qs: q_list.to_vec(),
        s_dev,
        eps_dev,
        order_s,
        order_eps,
        q_big: orbit.q,
        a2_scale,
        a2_discrepancy,
        a2_amplitude_ratio: ratio,
        a2_discrepancy_adjusted: if ratio.is_nan() {
            a2_discrepancy
        } else {
            rms(&adjusted)
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{build_curve, CurveSpec};
    use crate::map::tangent_intersection;

    fn circle() -> CurveModel {
        build_curve(&CurveSpec::circle(1.0), 512).unwrap()
    }

    fn ellipse() -> CurveModel {
        build_curve(&CurveSpec::ellipse(2.0, 1.0), 512).unwrap()
    }

    fn wiggly() -> CurveModel {
        build_curve(&CurveSpec::cos_harmonic(3, 0.05), 512).unwrap()
    }

    #[test]
    fn circumscribed_square_and_hexagon() {
        let c = circle();
        let sq = minimize_orbit(&c, 4, None).unwrap();
        assert!(
            (sq.action - 8.0).abs() < 1e-12,
            "square action {}",
            sq.action
        );
        for w in sq.s.windows(2) {
            assert!((w[1] - w[0] - PI / 2.0).abs() < 1e-10);
        }
        let hex = minimize_orbit(&c, 6, None).unwrap();
        assert!((hex.action - 12.0 * (PI / 6.0).tan()).abs() < 1e-12);
        assert!(hex.residual < 1e-12 * c.total_length());
    }

    #[test]
    fn beta_circle_closed_form() {
        let c = circle();
        for q in [5usize, 17, 100] {
            let b = beta_of(&c, q).unwrap();
            let exact = 2.0 * (PI / q as f64).tan();
            assert!((b - exact).abs() < 1e-12 * exact, "q={q}: {b} vs {exact}");
        }
    }

    #[test]
    fn beta_rejects_degenerate_periods() {
        let c = circle();
        assert!(matches!(beta_of(&c, 2), Err(Error::BadParams(_))));
    }

    #[test]
    fn action_matches_polygon_perimeter() {
        let e = ellipse();
        let orbit = minimize_orbit(&e, 7, None).unwrap();
        let mut verts = Vec::new();
        for i in 0..7 {
            let (a, b) = if i + 1 < 7 {
                (orbit.s[i], orbit.s[i + 1])
            } else {
                (orbit.s[6], orbit.s[0] + e.total_length())
            };
            verts.push(tangent_intersection(&e, a, b).unwrap());
        }
        let mut per = 0.0;
        for i in 0..7 {
            per += (verts[(i + 1) % 7] - verts[i]).norm();
        }
        assert!(
            (per - orbit.action).abs() < 1e-10 * orbit.action,
            "perimeter {per} vs action {}",
            orbit.action
        );
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let e = wiggly();
        let orbit = minimize_orbit(&e, 5, None).unwrap();
        // Perturb the converged configuration to a generic nearby one.
        let mut s = orbit.s.clone();
        for (i, v) in s.iter_mut().enumerate() {
            *v += 0.03 * ((i * 37 % 11) as f64 / 11.0 - 0.4);
        }
        let action_of = |s: &[f64]| {
            let mut total = 0.0;
            for i in 0..s.len() {
                let (a, b) = if i + 1 < s.len() {
                    (s[i], s[i + 1])
                } else {
                    (s[s.len() - 1], s[0] + e.total_length())
                };
                total += crate::genfunc::eval_h(&e, a, b).unwrap();
            }
            total
        };
        // Analytic gradient component at site 2: H₂(s₁,s₂) + H₁(s₂,s₃).
        let g2 = crate::genfunc::eval_h_jet(&e, s[1], s[2]).unwrap().h2
            + crate::genfunc::eval_h_jet(&e, s[2], s[3]).unwrap().h1;
        let h = 1e-6;
        let mut sp = s.clone();
        sp[2] += h;
        let mut sm = s.clone();
        sm[2] -= h;
        let fd = (action_of(&sp) - action_of(&sm)) / (2.0 * h);
        assert!((g2 - fd).abs() < 1e-7 * g2.abs().max(1.0), "{g2} vs {fd}");
    }

    #[test]
    fn ellipse_action_invariant_under_seed_rotation() {
        let e = ellipse();
        let reference = minimize_orbit(&e, 3, None).unwrap().action;
        for anchor in [0.21, 0.52, 0.83] {
            let thetas: Vec<f64> = (0..3)
                .map(|i| e.theta_of_lazutkin(anchor + i as f64 / 3.0))
                .collect();
            let orbit = minimize_from(&e, thetas).unwrap();
            assert!(
                (orbit.action - reference).abs() < 1e-10 * reference,
                "anchor {anchor}: {} vs {reference}",
                orbit.action
            );
        }
    }

    #[test]
    fn minimize_accepts_explicit_init() {
        let e = ellipse();
        let first = minimize_orbit(&e, 5, None).unwrap();
        let again = minimize_orbit(&e, 5, Some(&first)).unwrap();
        assert!((again.action - first.action).abs() < 1e-12);
        assert!(matches!(
            minimize_orbit(&e, 6, Some(&first)),
            Err(Error::BadParams(_))
        ));
    }

    #[test]
    fn theoretical_coeffs_on_circle() {
        let c = circle();
        let (b1, b3, b5) = theoretical_coeffs(&c);
        assert!((b1 - TAU).abs() < 1e-12);
        assert!((b3 - 2.0 * PI.powi(3) / 3.0).abs() < 1e-11);
        assert!((b5 - 4.0 * PI.powi(5) / 15.0).abs() < 1e-10);
    }

    #[test]
    fn theoretical_coeffs_frozen_oracles() {
        let w = build_curve(&CurveSpec::cos_harmonic(3, 0.05), 1024).unwrap();
        let (b1, b3, b5) = theoretical_coeffs(&w);
        assert!((b1 - TAU).abs() < 1e-12);
        assert!((b3 - 20.09843598618908289795609).abs() < 1e-11, "b3 {b3}");
        assert!((b5 - 83.84747642355530148175383).abs() < 1e-10, "b5 {b5}");
        assert!(b3 < 2.0 * PI.powi(3) / 3.0);

        let e = build_curve(&CurveSpec::ellipse(2.0, 1.0), 1024).unwrap();
        let (b1, b3, b5) = theoretical_coeffs(&e);
        assert!(
            (b1 - 9.688448220547676198428503).abs() < 1e-12,
            "ell b1 {b1}"
        );
        assert!(
            (b3 - 26.74401291849731175278784).abs() < 1e-10,
            "ell b3 {b3}"
        );
        assert!((b5 - 124.374629708930055160856).abs() < 1e-9, "ell b5 {b5}");
    }

    #[test]
    fn defect_recognizes_circles() {
        for r in [0.5, 1.0, 2.0] {
            let c = build_curve(&CurveSpec::circle(r), 512).unwrap();
            assert!(isoperimetric_defect(&c).abs() < 1e-10, "radius {r}");
        }
        let e = ellipse();
        let d = isoperimetric_defect(&e);
        assert!((d - -15.38911244175177473160701).abs() < 1e-9, "defect {d}");
        let w = wiggly();
        assert!((isoperimetric_defect(&w) - -1.71724540203239165708437).abs() < 1e-10);
        // |D| grows with the perturbation amplitude.
        let w2 = build_curve(&CurveSpec::cos_harmonic(3, 0.08), 512).unwrap();
        assert!(isoperimetric_defect(&w2) < isoperimetric_defect(&w));
    }

    #[test]
    fn beta_excess_positive_and_decreasing() {
        let w = wiggly();
        let mut prev = f64::INFINITY;
        for q in [8usize, 16, 32, 64] {
            let orbit = minimize_orbit(&w, q, None).unwrap();
            let excess = orbit.excess / q as f64;
            assert!(excess > 0.0);
            assert!(excess < prev);
            prev = excess;
        }
    }

    #[test]
    fn circle_fit_recovers_oracle_coefficients() {
        let c = circle();
        let report = fit_coeffs(&c, &[8, 16, 32, 64, 128]).unwrap();
        let b1 = report.fitted_coeff(1).unwrap();
        let b3 = report.fitted_coeff(3).unwrap();
        let b5 = report.fitted_coeff(5).unwrap();
        assert!((b1 - TAU).abs() < 1e-8 * TAU, "b1 {b1}");
        let b3_exact = 2.0 * PI.powi(3) / 3.0;
        assert!((b3 - b3_exact).abs() < 1e-8 * b3_exact, "b3 {b3}");
        let b5_exact = 4.0 * PI.powi(5) / 15.0;
        assert!((b5 - b5_exact).abs() < 1e-5 * b5_exact, "b5 {b5}");
    }

    #[test]
    fn fit_rejects_narrow_ladders() {
        let c = circle();
        assert!(matches!(fit_coeffs(&c, &[8, 16]), Err(Error::BadParams(_))));
        assert!(matches!(
            fit_coeffs(&c, &[8, 10, 12, 14]),
            Err(Error::BadParams(_))
        ));
    }

    #[test]
    fn circle_orbits_sit_exactly_on_lazutkin_points() {
        let c = circle();
        let report = orbit_asymptotics_check(&c, &[8, 16, 32]).unwrap();
        for d in &report.s_dev {
            assert!(*d < 1e-11, "circle s deviation {d}");
        }
        for r in &report.eps_dev {
            assert!(*r < 1e-11, "circle eps deviation {r}");
        }
        assert!(report.a2_scale < 1e-10);
    }

    #[test]
    fn perturbed_circle_asymptotic_orders() {
        let w = wiggly();
        let report = orbit_asymptotics_check(&w, &[32, 64, 128, 256]).unwrap();
        assert!(
            (report.order_s - 2.0).abs() < 0.3,
            "s order {} (devs {:?})",
            report.order_s,
            report.s_dev
        );
        assert!(
            (report.order_eps - 3.0).abs() < 0.3,
            "eps order {} (devs {:?})",
            report.order_eps,
            report.eps_dev
        );
        // The a₂ comparison is informative, never asserted against the
        // closed form; just check the signal exists and the fit ran.
        assert!(report.a2_scale > 0.0);
        assert!(report.a2_amplitude_ratio.is_finite());
    }

    #[test]
    fn report_serialization_schema() {
        let c = circle();
        let report = fit_coeffs(&c, &[8, 16, 32, 64, 128]).unwrap();
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert!(json["fitted"]["b3"].is_number());
        assert!(json["theoretical"]["b5"].is_number());
        assert!(json["defect"].is_number());
        assert_eq!(json["q"].as_array().unwrap().len(), 5);
        let csv = report.to_csv();
        assert!(csv.starts_with("q,beta,beta_minus_ell_over_q\n"));
        assert_eq!(csv.lines().count(), 6);
    }
}
