//! Strictly convex boundary curves: specification, model, and two-point
//! primitives.

mod model;
mod pair;
mod spec;

pub use model::{build_curve, CurveJet, CurveModel};
pub use pair::{tan_minus_identity, ThetaPair};
pub use spec::{CurveKind, CurveSpec};
