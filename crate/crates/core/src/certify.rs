//! Deciding whether some nonidentity stabilizer element identifies two points
//! of `l_t`, the part of an axis inside `{x_n >= 1}`.
//!
//! The stabilizer preserves heights, so an identified pair `M̄ ↦ N̄` has equal
//! heights, and the points of `l_t` at a common height are `O ± x u`. Each
//! element class then reduces to a closed-form test for `x`.

use serde::{Deserialize, Serialize};

use crate::axis::{AxisResult, CuspConfiguration};
use crate::cusp_group::{AffineAction, GroupElement};
use crate::error::{Error, Result};
use crate::halfspace::InteriorPoint;
use crate::linalg::{angle_between, serde_vector, Vector};
use crate::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ConditionHolds,
    ConditionFails,
    BelowNormThreshold,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::ConditionHolds => "condition-holds",
            Verdict::ConditionFails => "condition-fails",
            Verdict::BelowNormThreshold => "below-norm-threshold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Translation,
    Glide,
}

/// `τ` sends `m_bar` to `n_bar`, both on `l_t`. Coordinates are in the
/// `A0`-centered chart; `offset` is the signed `x` with `m_bar = O + x u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub element: GroupElement,
    pub kind: WitnessKind,
    pub offset: f64,
    pub m_bar: InteriorPoint,
    pub n_bar: InteriorPoint,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplicityCertificate {
    pub verdict: Verdict,
    pub norm_t: f64,
    pub min_norm: f64,
    /// Displacement bound used for the element search, measured at `O`.
    pub searched_radius: f64,
    pub elements_checked: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Euclidean diameter of `s_t`; reported only.
    pub s_t_diameter: f64,
}

/// The semicircle carrying `l_t`: center `O`, radius `r > 1`, unit direction
/// `u`. `l_t` projects onto `O + x u` for `|x| <= sqrt(r² - 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcFrame {
    #[serde(with = "serde_vector")]
    pub center: Vector,
    pub radius: f64,
    #[serde(with = "serde_vector")]
    pub direction: Vector,
}

impl ArcFrame {
    pub fn new(center: Vector, radius: f64, direction: Vector) -> Result<Self> {
        if !(radius > 1.0) {
            return Err(Error::AxisTooShallow { radius });
        }
        if center.len() != direction.len() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                found: direction.len(),
            });
        }
        let len = direction.norm();
        if !(len > 0.0) {
            return Err(Error::InvalidInput("zero direction".into()));
        }
        Ok(Self {
            center,
            radius,
            direction: direction / len,
        })
    }

    pub fn of_axis(axis: &AxisResult) -> Self {
        let (center, radius, direction) = axis.semicircle();
        Self {
            center,
            radius,
            direction,
        }
    }

    pub fn half_width(&self) -> f64 {
        (self.radius * self.radius - 1.0).sqrt()
    }

    /// The point of the semicircle above `O + x u`.
    pub fn point(&self, x: f64) -> InteriorPoint {
        let h = (self.radius * self.radius - x * x).max(0.0).sqrt();
        InteriorPoint::new(&self.center + &self.direction * x, h).expect("positive height")
    }

    fn witness(&self, element: &GroupElement, kind: WitnessKind, x: f64) -> Witness {
        let m_bar = self.point(x);
        let n_bar = self.point(-x);
        Witness {
            element: element.clone(),
            kind,
            offset: x,
            height: m_bar.height(),
            m_bar,
            n_bar,
        }
    }
}

const PARALLEL_TOL: f64 = 1e-9;
const RESIDUAL_TOL: f64 = 1e-9;

/// Translation by `v`: a witness exists iff `v = -2x u` with
/// `0 < |x| <= sqrt(r² - 1)`.
pub fn check_translation(element: &GroupElement, v: &Vector, frame: &ArcFrame) -> Option<Witness> {
    let len = v.norm();
    if len == 0.0 {
        return None;
    }
    let angle = angle_between(v, &frame.direction);
    if angle.min(std::f64::consts::PI - angle) >= PARALLEL_TOL {
        return None;
    }
    if len > 2.0 * frame.half_width() + RESIDUAL_TOL {
        return None;
    }
    let x = (-v.dot(&frame.direction) / 2.0).clamp(-frame.half_width(), frame.half_width());
    Some(frame.witness(element, WitnessKind::Translation, x))
}

/// Glide `X ↦ R X + v` in the chart: solves `R(O + x u) + v = O - x u`.
pub fn check_glide(element: &GroupElement, action: &AffineAction, frame: &ArcFrame) -> Result<Option<Witness>> {
    if frame.center.len() != 2 || action.rotation.determinant() > 0.0 {
        return Err(Error::NotAGlide);
    }
    let (o, u) = (&frame.center, &frame.direction);
    let r_mat = &action.rotation;
    let w = o - r_mat * o - &action.translation;
    let d = r_mat * u + u;
    let half = frame.half_width();
    let dd = d.norm_squared();
    if dd < 1e-24 {
        // u is perpendicular to the reflection axis: R u = -u, and the whole
        // segment is carried onto itself or misses it entirely.
        return Ok((w.norm() < RESIDUAL_TOL).then(|| frame.witness(element, WitnessKind::Glide, half / 2.0)));
    }
    let x = w.dot(&d) / dd;
    let residual = (&d * x - &w).norm();
    if residual >= RESIDUAL_TOL || x == 0.0 || x.abs() > half + RESIDUAL_TOL {
        return Ok(None);
    }
    Ok(Some(frame.witness(element, WitnessKind::Glide, x.clamp(-half, half))))
}

/// Re-verifies a witness: `τ(proj M̄) = proj N̄`, equal heights, both on `l_t`.
pub fn verify_witness(cfg: &CuspConfiguration, frame: &ArcFrame, w: &Witness, tol: f64) -> Result<bool> {
    let action = cfg.chart_action(&w.element)?;
    let image = action.apply(w.m_bar.horizontal());
    let on_arc = |p: &InteriorPoint| {
        let rel = p.horizontal() - &frame.center;
        let x = rel.dot(&frame.direction);
        let off_line = (&rel - &frame.direction * x).norm();
        off_line < tol
            && x.abs() <= frame.half_width() + tol
            && ((x * x + p.height() * p.height()).sqrt() - frame.radius).abs() < tol * frame.radius.max(1.0)
            && p.height() >= 1.0 - tol
    };
    Ok((image - w.n_bar.horizontal()).norm() < tol
        && (w.m_bar.height() - w.n_bar.height()).abs() < tol
        && on_arc(&w.m_bar)
        && on_arc(&w.n_bar))
}

/// Certifies the arc `l_t` of `axis`.
///
/// Any element identifying `O + x u` with `O - x u` moves `O` by at most
/// `2|x| <= 2 sqrt(r² - 1)`, so the search covers every element whose
/// displacement of `O` is within that bound plus `2·tol`. For translations this
/// is the norm of the translation vector.
pub fn certify(cfg: &CuspConfiguration, axis: &AxisResult, tol: &Tolerances) -> Result<SimplicityCertificate> {
    let frame = ArcFrame::of_axis(axis);
    let mut cert = SimplicityCertificate {
        verdict: Verdict::BelowNormThreshold,
        norm_t: axis.norm_t,
        min_norm: tol.min_norm,
        searched_radius: 0.0,
        elements_checked: 0,
        witness: None,
        s_t_diameter: axis.s_t_diameter(),
    };
    if axis.norm_t < tol.min_norm {
        return Ok(cert);
    }
    let radius = 2.0 * frame.half_width() + 2.0 * tol.iterative;
    cert.searched_radius = radius;
    let center = &frame.center + cfg.a0();
    let mut first_error = None;
    cfg.group().for_each_near(&center, radius, |e, action| {
        if cert.witness.is_some() || first_error.is_some() {
            return;
        }
        cert.elements_checked += 1;
        // Recentering leaves translations unchanged.
        let found = if action.is_translation() {
            Ok(check_translation(e, &action.translation, &frame))
        } else {
            check_glide(e, &action.recentered(cfg.a0()), &frame)
        };
        match found {
            Ok(found) => cert.witness = found,
            Err(err) => first_error = Some(err),
        }
    });
    if let Some(err) = first_error {
        return Err(err);
    }
    cert.verdict = if cert.witness.is_some() {
        Verdict::ConditionFails
    } else {
        Verdict::ConditionHolds
    };
    Ok(cert)
}

/// Closest points of segments `[p0, p1]` and `[q0, q1]`, as parameters.
fn segment_params(p0: &Vector, p1: &Vector, q0: &Vector, q1: &Vector) -> (f64, f64) {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        return (0.0, 0.0);
    }
    if a <= f64::EPSILON {
        return (0.0, (f / e).clamp(0.0, 1.0));
    }
    let c = d1.dot(&r);
    if e <= f64::EPSILON {
        return ((-c / a).clamp(0.0, 1.0), 0.0);
    }
    let b = d1.dot(&d2);
    let denom = a * e - b * b;
    let mut s = if denom > 0.0 {
        ((b * f - c * e) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    (s, t)
}

fn lerp(p: &Vector, q: &Vector, s: f64) -> Vector {
    p + (q - p) * s
}

/// Brute-force check independent of the equal-height reduction.
///
/// `l_t` is sampled uniformly in angle; for every element moving `O` by at
/// most `2r + 1` the image polyline is compared segment by segment against
/// the sampled arc in `H^n`, and the first pair closer than `1e-6·r` is
/// reported. Few samples make the polyline sag exceed the tolerance, so small
/// sample counts can miss identifications.
pub fn sampling_oracle(cfg: &CuspConfiguration, axis: &AxisResult, samples: usize) -> Result<Option<Witness>> {
    if samples < 2 {
        return Err(Error::InvalidInput("sampling needs at least two samples".into()));
    }
    let frame = ArcFrame::of_axis(axis);
    let (o, r, u) = (&frame.center, frame.radius, &frame.direction);
    let angle_of = |p: &InteriorPoint| p.height().atan2((p.horizontal() - o).dot(u));
    let theta0 = angle_of(axis.l_t.start());
    let theta1 = angle_of(axis.l_t.end());
    let step = (theta1 - theta0) / (samples - 1) as f64;
    let at = |theta: f64| {
        let mut v = o + u * (r * theta.cos());
        v = v.push(r * theta.sin());
        v
    };
    let pts: Vec<Vector> = (0..samples).map(|i| at(theta0 + step * i as f64)).collect();
    let dim = o.len();
    let tol = 1e-6 * r;
    // The projected arc is the segment CD.
    let c = pts[0].rows(0, dim).into_owned();
    let d = pts[samples - 1].rows(0, dim).into_owned();

    // Candidate segment indices of the sampled arc with height in [lo, hi].
    let index_range = |theta_a: f64, theta_b: f64| {
        let (a, b) = ((theta_a - theta0) / step, (theta_b - theta0) / step);
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let lo = (a.floor() as i64 - 1).max(0) as usize;
        let hi = ((b.ceil() as i64 + 1).max(0) as usize).min(samples - 2);
        lo..=hi
    };

    let mut found = None;
    cfg.group().for_each_near(&(o + cfg.a0()), 2.0 * r + 1.0, |e, action| {
        if found.is_some() {
            return;
        }
        let act = action.recentered(cfg.a0());
        let (tc, td) = (act.apply(&c), act.apply(&d));
        let (s, t) = segment_params(&c, &d, &tc, &td);
        if (lerp(&c, &d, s) - lerp(&tc, &td, t)).norm() > tol + 1e-9 {
            return;
        }
        let image = |p: &Vector| {
            let mut q = act.apply(&p.rows(0, dim).into_owned());
            q = q.push(p[dim]);
            q
        };
        let moved: Vec<Vector> = pts.iter().map(image).collect();
        for j in 0..samples - 1 {
            let (h_lo, h_hi) = {
                let (a, b) = (moved[j][dim], moved[j + 1][dim]);
                (a.min(b), a.max(b))
            };
            let ta = (h_lo / r).clamp(-1.0, 1.0).asin();
            let tb = (h_hi / r).clamp(-1.0, 1.0).asin();
            let halves = [
                index_range(ta, tb),
                index_range(std::f64::consts::PI - tb, std::f64::consts::PI - ta),
            ];
            for range in halves {
                for i in range {
                    let (s, t) = segment_params(&pts[i], &pts[i + 1], &moved[j], &moved[j + 1]);
                    let on_arc = lerp(&pts[i], &pts[i + 1], s);
                    let hit = lerp(&moved[j], &moved[j + 1], t);
                    if (&on_arc - &hit).norm() <= tol {
                        let pre = lerp(&pts[j], &pts[j + 1], t);
                        let m_bar = InteriorPoint::new(pre.rows(0, dim).into_owned(), pre[dim])
                            .expect("positive height");
                        let n_bar = InteriorPoint::new(on_arc.rows(0, dim).into_owned(), on_arc[dim])
                            .expect("positive height");
                        found = Some(Witness {
                            element: e.clone(),
                            kind: if act.is_translation() {
                                WitnessKind::Translation
                            } else {
                                WitnessKind::Glide
                            },
                            offset: (m_bar.horizontal() - o).dot(u),
                            height: m_bar.height(),
                            m_bar,
                            n_bar,
                        });
                        return;
                    }
                }
            }
        }
    });
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axis::solve_axis;
    use crate::cusp_group::CuspGroup;
    use crate::linalg::{vector, Matrix};

    fn frame(o: &[f64], r: f64, u: &[f64]) -> ArcFrame {
        ArcFrame::new(vector(o), r, vector(u)).unwrap()
    }

    fn lattice_cfg(b0: &[f64]) -> CuspConfiguration {
        let g = CuspGroup::lattice(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        CuspConfiguration::lattice(g, vector(b0), Matrix::identity(2, 2)).unwrap()
    }

    #[test]
    fn parallel_translation_in_range_is_a_witness() {
        let f = frame(&[0.0, 0.0], 2.5, &[1.0, 0.0]);
        let e = GroupElement::Lattice(vec![2, 0]);
        let w = check_translation(&e, &vector(&[2.0, 0.0]), &f).unwrap();
        assert_eq!(w.offset.abs(), 1.0);
        assert!((w.height - 5.25f64.sqrt()).abs() < 1e-15);
        assert!((w.height - 2.29128784747792).abs() < 1e-12);
        assert!((&w.m_bar.horizontal().clone() + vector(&[2.0, 0.0]) - w.n_bar.horizontal()).norm() < 1e-15);
    }

    #[test]
    fn translations_out_of_range_or_skew_are_not() {
        let f = frame(&[0.0, 0.0], 2.5, &[1.0, 0.4]);
        let e = GroupElement::Lattice(vec![5, 2]);
        assert!(check_translation(&e, &vector(&[5.0, 2.0]), &f).is_none());
        let f = frame(&[0.0, 0.0], 2.5, &[1.0, 0.0]);
        assert!(check_translation(&e, &vector(&[0.0, 1.0]), &f).is_none());
    }

    #[test]
    fn glide_perpendicular_to_its_axis() {
        let f = frame(&[0.5, 0.7], 3.0, &[0.0, 1.0]);
        let g = CuspGroup::glide(1.0, 1.4).unwrap();
        let e = GroupElement::Glide { n: 1, m: 0 };
        let action = g.element_action(&e).unwrap();
        assert_eq!(action.translation, vector(&[1.0, 0.0]));
        assert!(check_glide(&e, &action, &f).unwrap().is_none());
    }

    #[test]
    fn glide_along_an_axis_through_o() {
        // Reflection across y = 0, translation (1, 0); O on the axis, u along it.
        let f = frame(&[0.3, 0.0], 3.0, &[1.0, 0.0]);
        let e = GroupElement::Glide { n: 1, m: 0 };
        let action = CuspGroup::glide(1.0, 1.4).unwrap().element_action(&e).unwrap();
        let w = check_glide(&e, &action, &f).unwrap().unwrap();
        assert!((w.offset + 0.5).abs() < 1e-15);
        assert!((action.apply(w.m_bar.horizontal()) - w.n_bar.horizontal()).norm() < 1e-12);
        // Off the axis there is none.
        let f = frame(&[0.3, 0.1], 3.0, &[1.0, 0.0]);
        assert!(check_glide(&e, &action, &f).unwrap().is_none());
    }

    #[test]
    fn glide_check_rejects_translations() {
        let f = frame(&[0.0, 0.0], 3.0, &[1.0, 0.0]);
        let e = GroupElement::Glide { n: 2, m: 0 };
        let action = CuspGroup::glide(1.0, 1.4).unwrap().element_action(&e).unwrap();
        assert_eq!(check_glide(&e, &action, &f), Err(Error::NotAGlide));
    }

    #[test]
    fn standard_family_member_certifies() {
        let cfg = lattice_cfg(&[0.3, 0.4]);
        let tol = Tolerances::default();
        let e = GroupElement::Lattice(vec![50, 0]);
        let axis = solve_axis(&cfg, &e, &tol).unwrap();
        let cert = certify(&cfg, &axis, &tol).unwrap();
        assert_eq!(cert.verdict, Verdict::ConditionHolds);
        assert!(cert.elements_checked > 0);
        assert!(sampling_oracle(&cfg, &axis, 10_000).unwrap().is_none());
    }

    #[test]
    fn symmetric_basepoint_fails_with_a_translation() {
        let cfg = lattice_cfg(&[0.5, 0.0]);
        let tol = Tolerances::default();
        let e = GroupElement::Lattice(vec![20, 0]);
        let axis = solve_axis(&cfg, &e, &tol).unwrap();
        let cert = certify(&cfg, &axis, &tol).unwrap();
        assert_eq!(cert.verdict, Verdict::ConditionFails);
        let w = cert.witness.unwrap();
        assert_eq!(w.kind, WitnessKind::Translation);
        let frame = ArcFrame::of_axis(&axis);
        assert!(verify_witness(&cfg, &frame, &w, 1e-9).unwrap());
        let oracle = sampling_oracle(&cfg, &axis, 10_000).unwrap().unwrap();
        assert_eq!(oracle.kind, WitnessKind::Translation);
    }

    #[test]
    fn small_norm_is_below_threshold() {
        let cfg = lattice_cfg(&[0.3, 0.4]);
        let tol = Tolerances::default();
        let e = GroupElement::Lattice(vec![2, 0]);
        let axis = solve_axis(&cfg, &e, &tol).unwrap();
        let cert = certify(&cfg, &axis, &tol).unwrap();
        assert_eq!(cert.verdict, Verdict::BelowNormThreshold);
        assert!(cert.witness.is_none());
    }

    #[test]
    fn oracle_needs_two_samples() {
        let cfg = lattice_cfg(&[0.3, 0.4]);
        let axis = solve_axis(&cfg, &GroupElement::Lattice(vec![10, 0]), &Tolerances::default()).unwrap();
        assert!(sampling_oracle(&cfg, &axis, 1).is_err());
        assert!(sampling_oracle(&cfg, &axis, 2).is_ok());
    }
}
