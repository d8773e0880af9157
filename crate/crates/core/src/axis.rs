//! Axes of `g_t = t ∘ h2 ∘ h1 ∘ V` for `t` in the cusp group.
//!
//! Coordinates in results are in the chart of `∂H∞` centered at `A0`, so `A0`
//! projects to the origin and `h1` is the unit inversion there.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cusp_group::{AffineAction, CuspGroup, GroupElement};
use crate::error::{Error, Result};
use crate::halfspace::{
    arc_between_crossings, chordal_distance, crossings_at_height, geodesic_between,
    hyperbolic_distance, BoundaryPoint, Geodesic, GeodesicShape, HorosphereArc, InteriorPoint,
};
use crate::isometry::{
    classify, classify_with_seeds, generic_seeds, Classification, ClassifyOptions, IsometryWord,
    Primitive,
};
use crate::linalg::{orthogonality_residual, serde_matrix, serde_vector, Matrix, Vector};
use crate::Tolerances;

/// Products `d_E(C_t, A0)·||t||` and `d_E(D_t, B_t)·||t||` above this are flagged.
pub const LOCALIZATION_SLACK: f64 = 5.0;

/// Standard-position data of a cusp.
///
/// `a0` and `b0` are the projections of `A0` and `B0 = g0(A0)` in the group's
/// own coordinates (adapted coordinates for the glide group, where the
/// reflection axes sit at `y = kβ/2`). For lattices `a0` is the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspConfiguration {
    group: CuspGroup,
    #[serde(with = "serde_vector")]
    a0: Vector,
    #[serde(with = "serde_vector")]
    b0: Vector,
    #[serde(with = "serde_matrix")]
    v: Matrix,
}

impl CuspConfiguration {
    /// Validates and builds a configuration. `b0` must already lie in the
    /// fundamental domain; see [`CuspGroup::reduce_to_fundamental_domain`].
    pub fn new(group: CuspGroup, a0: Vector, b0: Vector, v: Matrix) -> Result<Self> {
        let dim = group.dim();
        for (name, len) in [("A0", a0.len()), ("B0", b0.len()), ("V", v.nrows()), ("V", v.ncols())] {
            if len != dim {
                return Err(Error::ConfigurationInvalid(format!(
                    "{name} has dimension {len}, expected {dim}"
                )));
            }
        }
        let residual = orthogonality_residual(&v);
        if residual > 1e-12 {
            return Err(Error::NonOrthogonal { residual });
        }
        if (&b0 - &a0).norm() < 1e-12 {
            return Err(Error::BaseAtOrigin);
        }
        for (name, p) in [("A0", &a0), ("B0", &b0)] {
            if !group.in_fundamental_domain(p, 1e-12) {
                return Err(Error::ConfigurationInvalid(format!(
                    "{name} = {:?} is outside the fundamental domain",
                    p.as_slice()
                )));
            }
        }
        Ok(Self { group, a0, b0, v })
    }

    /// Lattice configuration with `A0` at the origin.
    pub fn lattice(group: CuspGroup, b0: Vector, v: Matrix) -> Result<Self> {
        let a0 = Vector::zeros(group.dim());
        Self::new(group, a0, b0, v)
    }

    /// Dimension `n` of the hyperbolic space.
    pub fn dimension(&self) -> usize {
        self.group.dim() + 1
    }

    pub fn group(&self) -> &CuspGroup {
        &self.group
    }

    pub fn a0(&self) -> &Vector {
        &self.a0
    }

    pub fn b0(&self) -> &Vector {
        &self.b0
    }

    pub fn v(&self) -> &Matrix {
        &self.v
    }

    /// `b = A0B0` in the `A0`-centered chart.
    pub fn b(&self) -> Vector {
        &self.b0 - &self.a0
    }

    /// Action of `e` in the `A0`-centered chart.
    pub fn chart_action(&self, e: &GroupElement) -> Result<AffineAction> {
        Ok(self.group.element_action(e)?.recentered(&self.a0))
    }

    /// `B_t = t(B0)` in the `A0`-centered chart.
    pub fn b_t(&self, e: &GroupElement) -> Result<Vector> {
        Ok(self.chart_action(e)?.apply(&self.b()))
    }

    /// `||t|| = d_E(A0, B_t)`.
    pub fn norm_t(&self, e: &GroupElement) -> Result<f64> {
        self.group.norm_from(e, &self.a0, &self.b0)
    }

    /// `h = h2 ∘ h1`, sending `H0` to `H∞` and `A0` to `B0`.
    pub fn h(&self) -> Result<IsometryWord> {
        let dim = self.group.dim();
        IsometryWord::from_primitives(
            dim,
            vec![
                Primitive::bisector_reflection(&self.b())?,
                Primitive::unit_inversion(dim),
            ],
        )
    }

    /// `g0 = h ∘ V`.
    pub fn g0(&self) -> Result<IsometryWord> {
        build_gt(self, &self.group.identity())
    }
}

/// `g_t = t ∘ h2 ∘ h1 ∘ V`.
pub fn build_gt(cfg: &CuspConfiguration, e: &GroupElement) -> Result<IsometryWord> {
    let dim = cfg.group.dim();
    let t = cfg.chart_action(e)?.to_primitive();
    let v = Primitive::similarity(1.0, cfg.v.clone(), Vector::zeros(dim))?;
    IsometryWord::from_primitives(
        dim,
        vec![
            t,
            Primitive::bisector_reflection(&cfg.b())?,
            Primitive::unit_inversion(dim),
            v,
        ],
    )
}

/// Everything known about the axis `γ_t` of one `g_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisResult {
    pub element: GroupElement,
    #[serde(with = "serde_vector")]
    pub b_t: Vector,
    pub norm_t: f64,
    pub classification: Classification,
    /// Repelling fixed point, near `a0` for large `||t||`.
    pub repelling: BoundaryPoint,
    /// Attracting fixed point, near `b_t` for large `||t||`.
    pub attracting: BoundaryPoint,
    /// `γ_t`, oriented from the repelling to the attracting fixed point.
    pub geodesic: Geodesic,
    pub c_t: InteriorPoint,
    pub d_t: InteriorPoint,
    /// `C_t D_t`: the part of `γ_t` inside `H∞`.
    pub l_t: HorosphereArc,
    /// From `g_t⁻¹(D_t)` to `C_t`: a fundamental piece of `γ_t` outside `H∞`.
    pub s_t: HorosphereArc,
    pub translation_length: f64,
    pub d_c_a0: f64,
    pub d_d_bt: f64,
    /// Largest chordal distance between a fixed point and its image.
    pub fixed_point_residual: f64,
    /// Set when either localization product exceeds [`LOCALIZATION_SLACK`].
    pub localization_flagged: bool,
}

impl AxisResult {
    /// `(O, r, u)` of the semicircle `γ_t`.
    pub fn semicircle(&self) -> (Vector, f64, Vector) {
        match self.geodesic.shape() {
            GeodesicShape::Semicircle {
                center,
                radius,
                direction,
            } => (center, radius, direction),
            GeodesicShape::Vertical { .. } => unreachable!("solve_axis rejects vertical axes"),
        }
    }

    /// `sqrt(r² - 1)`: half the length of the projected segment `C_t D_t`.
    pub fn half_width(&self) -> f64 {
        let (_, r, _) = self.semicircle();
        (r * r - 1.0).sqrt()
    }

    pub fn s_t_diameter(&self) -> f64 {
        self.s_t.euclidean_diameter()
    }
}

fn classify_options(tol: &Tolerances) -> ClassifyOptions {
    ClassifyOptions {
        max_iterations: tol.max_iterations,
        convergence_tol: tol.convergence,
        agreement_tol: tol.iterative,
    }
}

/// Solves for the axis of `g_t` and its horosphere crossings.
pub fn solve_axis(cfg: &CuspConfiguration, e: &GroupElement, tol: &Tolerances) -> Result<AxisResult> {
    let g = build_gt(cfg, e)?;
    let dim = cfg.group.dim();
    let b_t = cfg.b_t(e)?;
    let norm_t = b_t.norm();
    let opts = classify_options(tol);

    let nudge = Vector::from_element(dim, 0.01);
    let mut seeds = vec![
        BoundaryPoint::Finite(nudge.clone()),
        BoundaryPoint::Finite(&b_t + &nudge),
    ];
    seeds.extend(generic_seeds(dim).into_iter().take(1));
    let classification = match classify_with_seeds(&g, &seeds, &opts) {
        Ok(c) => c,
        Err(Error::ClassificationInconclusive { .. }) => classify(&g, &opts)?,
        Err(other) => return Err(other),
    };
    let Classification::Hyperbolic {
        attracting,
        repelling,
    } = &classification
    else {
        return Err(Error::NonHyperbolic {
            classification: classification.name().into(),
        });
    };
    let (attracting, repelling) = (attracting.clone(), repelling.clone());

    let geodesic = geodesic_between(&repelling, &attracting)?;
    let radius = match geodesic.shape() {
        GeodesicShape::Semicircle { radius, .. } => radius,
        GeodesicShape::Vertical { .. } => {
            return Err(Error::InvalidInput("axis ends at ∞; g_t fixes the cusp point".into()))
        }
    };
    if radius <= 1.0 {
        return Err(Error::AxisTooShallow { radius });
    }

    let mut crossings = crossings_at_height(&geodesic, 1.0)?;
    let second = crossings.pop().expect("two crossings");
    let first = crossings.pop().expect("two crossings");
    let (c_t, d_t) = if first.horizontal().norm() <= second.horizontal().norm() {
        (first, second)
    } else {
        (second, first)
    };
    let l_t = arc_between_crossings(&geodesic, 1.0)?;
    let l_t = if l_t.start() == &c_t {
        l_t
    } else {
        HorosphereArc::new(geodesic.clone(), c_t.clone(), d_t.clone(), tol.iterative)?
    };

    let back = g.invert().apply_interior(&d_t);
    let s_t = HorosphereArc::new(
        geodesic.clone(),
        back,
        c_t.clone(),
        tol.iterative * radius.max(1.0),
    )?;

    let apex = geodesic.apex();
    let translation_length = hyperbolic_distance(&apex, &g.apply_interior(&apex));

    let d_c_a0 = c_t.horizontal().norm();
    let d_d_bt = (d_t.horizontal() - &b_t).norm();
    let fixed_point_residual = [&attracting, &repelling]
        .iter()
        .map(|x| chordal_distance(x, &g.apply_boundary(x)))
        .fold(0.0, f64::max);
    let localization_flagged =
        d_c_a0 * norm_t > LOCALIZATION_SLACK || d_d_bt * norm_t > LOCALIZATION_SLACK;

    Ok(AxisResult {
        element: e.clone(),
        b_t,
        norm_t,
        classification,
        repelling,
        attracting,
        geodesic,
        c_t,
        d_t,
        l_t,
        s_t,
        translation_length,
        d_c_a0,
        d_d_bt,
        fixed_point_residual,
        localization_flagged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum ScanOutcome {
    Solved {
        d_c_a0: f64,
        d_d_bt: f64,
        length: f64,
    },
    Failed {
        error: String,
    },
}

/// One row of the convergence table: how far the axis sits from `A0` and `B_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub element: GroupElement,
    pub norm_t: f64,
    pub outcome: ScanOutcome,
}

/// Solves every element of `family`; failures are recorded per row.
pub fn lemma1_scan(cfg: &CuspConfiguration, family: &[GroupElement], tol: &Tolerances) -> Vec<ScanRow> {
    family
        .par_iter()
        .map(|e| {
            let norm_t = cfg.norm_t(e).unwrap_or(f64::NAN);
            let outcome = match solve_axis(cfg, e, tol) {
                Ok(ax) => ScanOutcome::Solved {
                    d_c_a0: ax.d_c_a0,
                    d_d_bt: ax.d_d_bt,
                    length: ax.translation_length,
                },
                Err(err) => ScanOutcome::Failed {
                    error: err.to_string(),
                },
            };
            ScanRow {
                element: e.clone(),
                norm_t,
                outcome,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    fn standard() -> CuspConfiguration {
        CuspConfiguration::lattice(
            CuspGroup::lattice(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
            vector(&[0.3, 0.4]),
            Matrix::identity(2, 2),
        )
        .unwrap()
    }

    #[test]
    fn g0_sends_a0_to_b0() {
        let cfg = standard();
        let a0 = InteriorPoint::from_coords(&[0.0, 0.0, 1.0]).unwrap();
        let img = cfg.g0().unwrap().apply_interior(&a0);
        assert!((img.horizontal() - vector(&[0.3, 0.4])).amax() < 1e-15);
        assert!((img.height() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gt_sends_a0_to_bt() {
        let cfg = standard();
        let e = GroupElement::Lattice(vec![10, 0]);
        let g = build_gt(&cfg, &e).unwrap();
        let a0 = InteriorPoint::from_coords(&[0.0, 0.0, 1.0]).unwrap();
        let img = g.apply_interior(&a0);
        assert!((img.horizontal() - vector(&[10.3, 0.4])).amax() < 1e-13);
        assert!((img.height() - 1.0).abs() < 1e-13);
        assert_eq!(g.parity(), 1);
    }

    #[test]
    fn parity_follows_the_group_element() {
        let cfg = CuspConfiguration::new(
            CuspGroup::glide(1.0, 1.4).unwrap(),
            vector(&[0.0, -0.3]),
            vector(&[0.0, 0.3]),
            Matrix::identity(2, 2),
        )
        .unwrap();
        for (n, m) in [(1, 0), (2, 3), (3, -1)] {
            let e = GroupElement::Glide { n, m };
            let g = build_gt(&cfg, &e).unwrap();
            assert_eq!(g.is_orientation_reversing(), e.is_orientation_reversing());
        }
    }

    #[test]
    fn solve_standard_axis() {
        let cfg = standard();
        let ax = solve_axis(&cfg, &GroupElement::Lattice(vec![10, 0]), &Tolerances::default()).unwrap();
        let rep = ax.repelling.as_finite().unwrap();
        let att = ax.attracting.as_finite().unwrap();
        assert!(rep.norm() < 0.3);
        assert!((att - vector(&[10.3, 0.4])).norm() < 0.3);
        assert!(ax.fixed_point_residual < 1e-9);
        assert_eq!(ax.c_t.height(), 1.0);
        assert_eq!(ax.d_t.height(), 1.0);
        assert!(ax.translation_length > 0.0);
        assert!(!ax.localization_flagged);
        assert!(ax.s_t_diameter() < ax.l_t.projected_length());
    }

    #[test]
    fn configuration_validation() {
        let lat = CuspGroup::lattice(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(
            CuspConfiguration::lattice(lat.clone(), vector(&[0.0, 0.0]), Matrix::identity(2, 2)),
            Err(Error::BaseAtOrigin)
        );
        let skew = Matrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(
            CuspConfiguration::lattice(lat.clone(), vector(&[0.3, 0.4]), skew),
            Err(Error::NonOrthogonal { .. })
        ));
        assert!(matches!(
            CuspConfiguration::lattice(lat, vector(&[1.3, 0.4]), Matrix::identity(2, 2)),
            Err(Error::ConfigurationInvalid(_))
        ));
    }

    #[test]
    fn identity_element_with_short_b_is_not_hyperbolic() {
        // |b| = 0.5 < 2: g0 is elliptic.
        let err = solve_axis(&standard(), &GroupElement::Lattice(vec![0, 0]), &Tolerances::default())
            .unwrap_err();
        assert!(matches!(err, Error::NonHyperbolic { .. }), "{err:?}");
    }

    #[test]
    fn scan_matches_single_solve() {
        let cfg = standard();
        let e = GroupElement::Lattice(vec![12, 0]);
        let rows = lemma1_scan(&cfg, std::slice::from_ref(&e), &Tolerances::default());
        let ax = solve_axis(&cfg, &e, &Tolerances::default()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(
            rows[0].outcome,
            ScanOutcome::Solved {
                d_c_a0: ax.d_c_a0,
                d_d_bt: ax.d_d_bt,
                length: ax.translation_length
            }
        );
        assert_eq!(rows[0].norm_t, ax.norm_t);
    }
}
