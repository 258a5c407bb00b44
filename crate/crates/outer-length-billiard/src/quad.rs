//! Fixed quadrature rules.
//!
//! Two rules cover every integral in the crate:
//! * 20-point Gauss-Legendre panels for integrals between arbitrary
//!   endpoints (arclength between angles, Peano-kernel integrals). A single
//!   panel is exact to machine precision for the smooth, low-bandwidth
//!   integrands used here as long as the panel is no wider than ~0.5 rad;
//!   wider ranges are chunked.
//! * the periodic trapezoid rule (equal-weight sum on a uniform grid) for
//!   full-period integrals of smooth periodic functions, where it is
//!   spectrally accurate.

/// 20-point Gauss-Legendre nodes and weights on [-1, 1].
pub const GL20: [(f64, f64); 20] = [
    (-9.93128599185094885e-01, 1.76140071391532732e-02),
    (-9.63971927277913809e-01, 4.06014298003862170e-02),
    (-9.12234428251325835e-01, 6.26720483341094425e-02),
    (-8.39116971822218782e-01, 8.32767415767046715e-02),
    (-7.46331906460150796e-01, 1.01930119817240261e-01),
    (-6.36053680726515025e-01, 1.18194531961518245e-01),
    (-5.10867001950827126e-01, 1.31688638449176526e-01),
    (-3.73706088715419549e-01, 1.42096109318381875e-01),
    (-2.27785851141645096e-01, 1.49172986472603658e-01),
    (-7.65265211334973383e-02, 1.52753387130725782e-01),
    (7.65265211334973383e-02, 1.52753387130725782e-01),
    (2.27785851141645096e-01, 1.49172986472603658e-01),
    (3.73706088715419549e-01, 1.42096109318381875e-01),
    (5.10867001950827126e-01, 1.31688638449176526e-01),
    (6.36053680726515025e-01, 1.18194531961518245e-01),
    (7.46331906460150796e-01, 1.01930119817240261e-01),
    (8.39116971822218782e-01, 8.32767415767046715e-02),
    (9.12234428251325835e-01, 6.26720483341094425e-02),
    (9.63971927277913809e-01, 4.06014298003862170e-02),
    (9.93128599185094885e-01, 1.76140071391532732e-02),
];

/// Maximum Gauss-Legendre panel width (radians) before chunking.
pub const MAX_PANEL: f64 = 0.5;

/// Single 20-point Gauss-Legendre panel over [a, b].
pub fn gl_panel<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for &(x, w) in &GL20 {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Gauss-Legendre integral over [a, b], split into panels of width at most
/// [`MAX_PANEL`]. Handles b < a with the usual sign convention.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let width = (b - a).abs();
    let n = (width / MAX_PANEL).ceil() as usize;
    let h = (b - a) / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let lo = a + i as f64 * h;
        acc += gl_panel(&mut f, lo, lo + h);
    }
    acc
}

/// Periodic trapezoid rule for `integral of f over [0, period)` with `n`
/// uniformly spaced samples. Spectrally accurate for smooth periodic `f`.
pub fn periodic_trapezoid<F: FnMut(f64) -> f64>(mut f: F, period: f64, n: usize) -> f64 {
    let h = period / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        acc += f(i as f64 * h);
    }
    acc * h
}
