//! Bracketed scalar root finding.
//!
//! Every inversion in the crate (arclength <-> normal angle, prescribed-arc
//! gaps, the map step, variational roots, support-line contact) goes through
//! one of these two safeguarded solvers. Nothing here ever iterates outside
//! a verified sign-change bracket: an unguarded Newton on these geometries
//! can silently converge to a root outside the phase space.

use crate::error::{Error, Result};

/// Brent's method on a verified bracket `[a, b]` with `f(a) * f(b) <= 0`.
///
/// `xtol` is an absolute tolerance on the root location; iteration also
/// stops when the function value underflows to zero. `context` labels any
/// failure for error messages.
pub fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    xtol: f64,
    context: &'static str,
) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::RootBracketFailure {
            context,
            lo: a,
            hi: b,
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // attempt inverse quadratic interpolation / secant
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::RootNoConvergence { context })
}

/// Newton iteration safeguarded by bisection on a verified bracket.
///
/// `fdf` returns `(f(x), f'(x))`. The iterate falls back to bisection
/// whenever the Newton step leaves the current bracket or the derivative
/// is too small, so convergence is guaranteed for continuous `f` with a
/// sign change. Preferred over [`brent`] when the derivative is cheap
/// (e.g. arclength inversion, where f' = rho).
pub fn newton_bisect<F: FnMut(f64) -> (f64, f64)>(
    mut fdf: F,
    lo: f64,
    hi: f64,
    x0: f64,
    xtol: f64,
    context: &'static str,
) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let (flo, _) = fdf(lo);
    if flo == 0.0 {
        return Ok(lo);
    }
    let (fhi, _) = fdf(hi);
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::RootBracketFailure { context, lo, hi });
    }
    let increasing = fhi > 0.0;

    let mut x = x0.clamp(lo, hi);
    for _ in 0..100 {
        let (fx, dfx) = fdf(x);
        if fx == 0.0 {
            return Ok(x);
        }
        // shrink the bracket around the sign change
        if (fx > 0.0) == increasing {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let dx = (next - x).abs();
        x = next;
        // Converged when the bracket collapsed, or when Newton's own steps
        // stalled (one-sided convergence never moves the far bracket end).
        let scale = xtol + 2.0 * f64::EPSILON * x.abs();
        if hi - lo <= scale || dx <= scale {
            return Ok(x);
        }
    }
    Err(Error::RootNoConvergence { context })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cos_root() {
        let r = brent(|x| x.cos(), 1.0, 2.0, 1e-14, "test").unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
    }

    #[test]
    fn brent_rejects_bad_bracket() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-14, "test").is_err());
    }

    #[test]
    fn newton_bisect_handles_flat_derivative() {
        // f = x^3 has zero derivative at the root; bisection safeguard kicks in
        let r = newton_bisect(|x| (x * x * x, 3.0 * x * x), -1.0, 2.0, 1.9, 1e-14, "test").unwrap();
        assert!(r.abs() < 1e-13);
    }

    #[test]
    fn newton_bisect_quadratic_convergence() {
        let r = newton_bisect(
            |x: f64| (x.sin() - 0.5, x.cos()),
            0.0,
            1.5,
            0.7,
            1e-15,
            "test",
        )
        .unwrap();
        assert!((r - std::f64::consts::FRAC_PI_6).abs() < 1e-14);
    }
}
