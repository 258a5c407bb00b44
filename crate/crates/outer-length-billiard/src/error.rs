//! Error taxonomy shared by every module.
//!
//! Variants are grouped by how the CLI reports them: spec problems (bad
//! input files or parameters), dynamics problems (the map cannot be
//! evaluated at the requested state), and numerical problems (a solver or
//! fit failed to converge to tolerance).

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    /// Curve specification is syntactically valid but semantically broken
    /// (missing fields for the kind, non-positive radius, duplicate
    /// harmonics, ...).
    #[error("bad curve spec: {0}")]
    BadSpec(String),

    /// Curvature radius h + h'' is not strictly positive on the validation
    /// grid; the spec does not describe a strictly convex curve.
    #[error("curve is not strictly convex: min rho = {min_rho:.6e} at theta = {theta:.6}")]
    NonConvex { min_rho: f64, theta: f64 },

    /// Invalid scalar parameters to a geometric constructor.
    #[error("bad parameters: {0}")]
    BadParams(String),

    /// Tangent lines at the two parameters are (anti)parallel: the phase
    /// point sits on the boundary of the phase space.
    #[error("parallel tangents: theta gap {gap:.6e} outside (0, pi)")]
    ParallelTangents { gap: f64 },

    /// Phase pair too close to the diagonal or to the antipodal boundary
    /// for the root solvers to operate.
    #[error("degenerate pair: eps = {eps:.6e} violates the delta_min margin {margin:.6e}")]
    DegeneratePair { eps: f64, margin: f64 },

    /// A bracketed root solve found no sign change on its interval.
    #[error("root bracket failure: {context} on [{lo:.6e}, {hi:.6e}]")]
    RootBracketFailure {
        context: &'static str,
        lo: f64,
        hi: f64,
    },

    /// Bracketed solver exhausted its iteration budget.
    #[error("root solve did not converge: {context}")]
    RootNoConvergence { context: &'static str },

    /// The point has no pair of tangent lines: it lies inside or on the curve.
    #[error("point ({x:.6}, {y:.6}) is not strictly outside the curve")]
    InsidePoint { x: f64, y: f64 },

    /// A step inside an orbit failed; carries the step index for diagnosis.
    #[error("orbit step {index} failed: {source}")]
    StepFailed { index: usize, source: Box<Error> },

    /// Geometric and variational constructions of the map disagree beyond
    /// tolerance: a solver bug, not a modeling choice.
    #[error("map consistency failure: geometric s2 = {s2_geometric:.12}, variational s2 = {s2_variational:.12}, residual = {residual:.3e}")]
    MapInconsistency {
        s2_geometric: f64,
        s2_variational: f64,
        residual: f64,
    },

    /// Orbit minimization ran out of iterations.
    #[error("orbit minimization did not converge for q = {q}: residual {residual:.3e} after {iters} iterations")]
    NoConvergence {
        q: usize,
        residual: f64,
        iters: usize,
    },

    /// Damped Newton could not restore the cyclic ordering of the orbit.
    #[error("orbit minimization lost cyclic monotonicity for q = {q}")]
    MonotonicityLoss { q: usize },

    /// Least-squares design matrix condition number exceeded the threshold.
    #[error("ill-conditioned fit: condition number {cond:.3e}")]
    IllConditionedFit { cond: f64 },

    /// Degenerate configuration in a geometric predicate (parallel lines,
    /// coincident points).
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// I/O error surfaced from reading specs or writing reports.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON in a curve spec file.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code classification: 2 spec, 3 dynamics, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BadSpec(_)
            | Error::NonConvex { .. }
            | Error::BadParams(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::ParallelTangents { .. }
            | Error::DegeneratePair { .. }
            | Error::InsidePoint { .. }
            | Error::DegenerateGeometry(_) => 3,
            Error::StepFailed { source, .. } => source.exit_code(),
            Error::RootBracketFailure { .. }
            | Error::RootNoConvergence { .. }
            | Error::MapInconsistency { .. }
            | Error::NoConvergence { .. }
            | Error::MonotonicityLoss { .. }
            | Error::IllConditionedFit { .. } => 4,
        }
    }
}
