//! Closed geodesics winding around a cusp of a hyperbolic n-manifold.
//!
//! Starting from the standard-position data of a cusp (the stabilizer group of
//! the horoball `{x_n >= 1}`, the tangency point `A0 = (0, .., 0, 1)` and the
//! connecting isometry `g0 = h2 . h1 . V`), the crate builds the isometries
//! `g_t = t . g0` for `t` in the stabilizer, solves for their axes, and
//! certifies that no stabilizer element identifies two points of the part of
//! the axis lying inside the horoball. Families of such certified axes with
//! strictly increasing lengths are generated for translation lattices of any
//! rank and for the rank-2 glide group.
//!
//! All computation happens in the upper half-space model with `f64`
//! coordinates and explicit tolerances (see [`Tolerances`]).

pub mod axis;
pub mod certify;
pub mod config;
pub mod cusp_group;
pub mod error;
pub mod family;
pub mod halfspace;
pub mod isometry;
pub mod linalg;
pub mod normalize;
pub mod plot;

pub use axis::{build_gt, lemma1_scan, solve_axis, AxisResult, CuspConfiguration, ScanRow};
pub use certify::{
    certify, check_glide, check_translation, sampling_oracle, SimplicityCertificate, Verdict,
    Witness,
};
pub use cusp_group::{AffineAction, CuspGroup, GroupElement};
pub use error::{Error, Result};
pub use family::{enumerate_simple, plan_family, plans_for, FamilyCase, FamilyPlan, FamilyReport};
pub use halfspace::{
    arc_between_crossings, crossings_at_height, geodesic_between, hyperbolic_distance,
    BoundaryPoint, Geodesic, Horoball, HorosphereArc, InteriorPoint,
};
pub use isometry::{classify, from_matrix, Classification, IsometryWord, Primitive};
pub use linalg::{Matrix, Vector};
pub use normalize::normalize_configuration;

/// Numerical tolerances shared by the solver, certifier and family generator.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Absolute tolerance for closed-form algebra.
    pub algebra: f64,
    /// Absolute tolerance for iterative results and witness re-verification.
    pub iterative: f64,
    /// Successive-iterate chordal distance at which fixed-point iteration stops.
    pub convergence: f64,
    pub max_iterations: usize,
    /// Smallest `||t||` for which the certifier attempts a verdict.
    pub min_norm: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebra: 1e-12,
            iterative: 1e-9,
            convergence: 1e-13,
            max_iterations: 10_000,
            min_norm: 10.0,
        }
    }
}
