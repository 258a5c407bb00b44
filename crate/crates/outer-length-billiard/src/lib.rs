//! Numerical laboratory for the outer length billiard on strictly convex
//! planar domains.
//!
//! The map acts on pairs of boundary points: the tangent lines at γ(s₀) and
//! γ(s₁) meet in an exterior vertex P, and the next point γ(s₂) is selected
//! by the circle tangent to the boundary at γ(s₁) and to the line Pγ(s₀).
//! Equivalently, the dynamics is generated by the tangent-length sum
//! H(s₀,s₁) = |Pγ(s₀)| + |Pγ(s₁)|: orbits are critical configurations of
//! Σ H(sᵢ, sᵢ₊₁), and minimal q-periodic configurations are the
//! circumscribed q-gons of least perimeter.
//!
//! The crate provides:
//!
//! * [`curve`] — support-function curve models with exact jets, arclength
//!   and Lazutkin tables ([`CurveSpec`], [`CurveModel`]);
//! * [`map`] — the billiard map itself: geometric and variational steps,
//!   orbit iteration, exterior-point conversion, and the small-gap
//!   expansion of the map ([`PhasePair`], [`OrbitTrace`]);
//! * [`genfunc`] — the generating function H with first and second partials,
//!   its small-gap Taylor polynomial, the twist formula, and the Mather
//!   caustic-obstruction criterion ([`HJet`]);
//! * [`spectrum`] — minimal-perimeter periodic orbits, the Mather
//!   β-function table, coefficient fitting against theoretical quadratures,
//!   and orbit asymptotics ([`OrbitConfig`], [`BetaReport`]);
//! * [`lazutkin`] — Lazutkin coordinates, the conjugated near-integrable
//!   map, confocal-ellipse caustic probes and the orthogonality check
//!   ([`CausticProbe`]);
//! * [`fitting`] — weighted power-basis fits and log-log slope extraction
//!   shared by the verification drivers.
//!
//! All state is immutable after construction and every operation is a pure
//! function, so models can be shared freely across threads.

pub mod cli;
pub mod curve;
pub mod error;
pub mod fitting;
pub mod genfunc;
pub mod geometry;
pub mod lazutkin;
pub mod map;
pub mod quad;
pub mod solver;
pub mod spectrum;

pub use curve::{build_curve, CurveJet, CurveModel, CurveSpec};
pub use error::{Error, Result};
pub use genfunc::{
    eval_h, eval_h_geometric, eval_h_jet, mather_criterion, taylor_h, taylor_remainder,
    twist_formula_check, HJet,
};
pub use geometry::Vec2;
pub use lazutkin::{
    caustic_drift, confocal_ellipse, conjugated_step, lazutkin_x, orthogonality_check,
    CausticProbe, LazutkinChart,
};
pub use map::{
    expansion_coeffs, iterate, map_expansion_remainder, pair_from_exterior_point, step,
    step_variational, tangent_circle_radius, tangent_intersection, MapConfig, OrbitTrace,
    PhasePair,
};
pub use spectrum::{
    beta_of, fit_coeffs, isoperimetric_defect, minimize_orbit, orbit_asymptotics_check,
    theoretical_coeffs, AsymptoticsReport, BetaReport, OrbitConfig,
};
