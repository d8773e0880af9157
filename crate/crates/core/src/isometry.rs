//! Isometries of `H^n` as words in geometric primitives.
//!
//! Every isometry of the upper half-space is the Poincaré extension of a
//! Möbius map of `R^(n-1) ∪ {∞}`. A word stores such a map as a composition of
//! sphere inversions, hyperplane reflections and Euclidean similarities and
//! evaluates it primitive by primitive, right to left.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfspace::{
    chordal_distance, geodesic_between, hyperbolic_distance, BoundaryPoint, Horoball, InteriorPoint,
};
use crate::linalg::{orthogonality_residual, serde_matrix, serde_vector, Matrix, Vector};

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Primitive {
    /// `X ↦ c + ρ² (X - c) / |X - c|²` for the sphere of radius `ρ` centered at
    /// `c` on the boundary.
    SphereInversion {
        #[serde(with = "serde_vector")]
        center: Vector,
        radius: f64,
    },
    /// Reflection in the vertical hyperplane `{ x · normal = offset }`.
    HyperplaneReflection {
        #[serde(with = "serde_vector")]
        normal: Vector,
        offset: f64,
    },
    /// `(x, h) ↦ (λ Q x + c, λ h)`.
    Similarity {
        scale: f64,
        #[serde(with = "serde_matrix")]
        rotation: Matrix,
        #[serde(with = "serde_vector")]
        translation: Vector,
    },
}

impl Primitive {
    pub fn inversion(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidPrimitive(format!("inversion radius {radius} is not positive")));
        }
        Ok(Primitive::SphereInversion { center, radius })
    }

    /// Inversion in the unit sphere about the origin of `R^dim`.
    pub fn unit_inversion(dim: usize) -> Self {
        Primitive::SphereInversion {
            center: Vector::zeros(dim),
            radius: 1.0,
        }
    }

    pub fn reflection(normal: Vector, offset: f64) -> Result<Self> {
        let norm = normal.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidPrimitive(format!(
                "reflection normal has norm {norm}, expected 1"
            )));
        }
        Ok(Primitive::HyperplaneReflection { normal, offset })
    }

    /// Reflection in the perpendicular bisector of `0` and `b`:
    /// `X ↦ X - 2 (X, b) / |b|² b + b`. Swaps the origin and `b`.
    pub fn bisector_reflection(b: &Vector) -> Result<Self> {
        let len = b.norm();
        if len == 0.0 {
            return Err(Error::InvalidPrimitive("bisector of coincident points".into()));
        }
        Ok(Primitive::HyperplaneReflection {
            normal: b / len,
            offset: len / 2.0,
        })
    }

    pub fn similarity(scale: f64, rotation: Matrix, translation: Vector) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::InvalidPrimitive(format!("similarity scale {scale} is not positive")));
        }
        if rotation.nrows() != translation.len() {
            return Err(Error::DimensionMismatch {
                expected: translation.len(),
                found: rotation.nrows(),
            });
        }
        let residual = orthogonality_residual(&rotation);
        if residual > UNIT_TOL {
            return Err(Error::InvalidPrimitive(format!(
                "similarity rotation is not orthogonal (residual {residual:e})"
            )));
        }
        Ok(Primitive::Similarity {
            scale,
            rotation,
            translation,
        })
    }

    pub fn translation(v: Vector) -> Self {
        let n = v.len();
        Primitive::Similarity {
            scale: 1.0,
            rotation: Matrix::identity(n, n),
            translation: v,
        }
    }

    pub fn dilation(dim: usize, scale: f64) -> Result<Self> {
        Self::similarity(scale, Matrix::identity(dim, dim), Vector::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        match self {
            Primitive::SphereInversion { center, .. } => center.len(),
            Primitive::HyperplaneReflection { normal, .. } => normal.len(),
            Primitive::Similarity { translation, .. } => translation.len(),
        }
    }

    /// `+1` for orientation-preserving, `-1` for orientation-reversing.
    pub fn parity(&self) -> i8 {
        match self {
            Primitive::SphereInversion { .. } | Primitive::HyperplaneReflection { .. } => -1,
            Primitive::Similarity { rotation, .. } => {
                if rotation.determinant() < 0.0 {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub fn inverse(&self) -> Primitive {
        match self {
            Primitive::SphereInversion { .. } | Primitive::HyperplaneReflection { .. } => self.clone(),
            Primitive::Similarity {
                scale,
                rotation,
                translation,
            } => {
                let qt = rotation.transpose();
                let translation = -(&qt * translation) / *scale;
                Primitive::Similarity {
                    scale: 1.0 / scale,
                    rotation: qt,
                    translation,
                }
            }
        }
    }

    pub fn apply_boundary(&self, x: &BoundaryPoint) -> BoundaryPoint {
        match (self, x) {
            (Primitive::SphereInversion { center, .. }, BoundaryPoint::Infinity) => {
                BoundaryPoint::Finite(center.clone())
            }
            (Primitive::SphereInversion { center, radius }, BoundaryPoint::Finite(x)) => {
                let rel = x - center;
                let n2 = rel.norm_squared();
                if n2 == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(center + rel * (radius * radius / n2))
                }
            }
            (Primitive::HyperplaneReflection { .. }, BoundaryPoint::Infinity)
            | (Primitive::Similarity { .. }, BoundaryPoint::Infinity) => BoundaryPoint::Infinity,
            (Primitive::HyperplaneReflection { normal, offset }, BoundaryPoint::Finite(x)) => {
                let s = x.dot(normal) - offset;
                BoundaryPoint::Finite(x - normal * (2.0 * s))
            }
            (
                Primitive::Similarity {
                    scale,
                    rotation,
                    translation,
                },
                BoundaryPoint::Finite(x),
            ) => BoundaryPoint::Finite(rotation * x * *scale + translation),
        }
    }

    pub fn apply_interior(&self, p: &InteriorPoint) -> InteriorPoint {
        let (x, h) = (p.horizontal(), p.height());
        let (x, h) = match self {
            Primitive::SphereInversion { center, radius } => {
                let rel = x - center;
                let k = radius * radius / (rel.norm_squared() + h * h);
                (center + rel * k, h * k)
            }
            Primitive::HyperplaneReflection { normal, offset } => {
                let s = x.dot(normal) - offset;
                (x - normal * (2.0 * s), h)
            }
            Primitive::Similarity {
                scale,
                rotation,
                translation,
            } => (rotation * x * *scale + translation, h * scale),
        };
        InteriorPoint::new(x, h).expect("isometries preserve the half-space")
    }
}

/// A composition `p_1 ∘ p_2 ∘ .. ∘ p_k`; `p_k` is applied first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsometryWord {
    dim: usize,
    primitives: Vec<Primitive>,
    parity: i8,
}

impl IsometryWord {
    /// The identity of `H^(dim+1)`.
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            primitives: Vec::new(),
            parity: 1,
        }
    }

    pub fn from_primitive(p: Primitive) -> Self {
        Self {
            dim: p.dim(),
            parity: p.parity(),
            primitives: vec![p],
        }
    }

    /// Builds `ps[0] ∘ ps[1] ∘ ..`.
    pub fn from_primitives(dim: usize, ps: Vec<Primitive>) -> Result<Self> {
        if let Some(bad) = ps.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        let parity = ps.iter().map(Primitive::parity).product();
        Ok(Self {
            dim,
            primitives: ps,
            parity,
        })
    }

    /// Boundary dimension `n - 1`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn is_orientation_reversing(&self) -> bool {
        self.parity < 0
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &IsometryWord) -> Result<IsometryWord> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut primitives = self.primitives.clone();
        primitives.extend(other.primitives.iter().cloned());
        Ok(IsometryWord {
            dim: self.dim,
            primitives,
            parity: self.parity * other.parity,
        })
    }

    pub fn invert(&self) -> IsometryWord {
        IsometryWord {
            dim: self.dim,
            primitives: self.primitives.iter().rev().map(Primitive::inverse).collect(),
            parity: self.parity,
        }
    }

    pub fn apply_boundary(&self, x: &BoundaryPoint) -> BoundaryPoint {
        self.primitives
            .iter()
            .rev()
            .fold(x.clone(), |acc, p| p.apply_boundary(&acc))
    }

    pub fn apply_interior(&self, p: &InteriorPoint) -> InteriorPoint {
        self.primitives
            .iter()
            .rev()
            .fold(p.clone(), |acc, prim| prim.apply_interior(&acc))
    }

    /// Image of a horoball: centered at the image of its center, bounded by the
    /// horosphere through the image of one of its horosphere points.
    pub fn apply_horoball(&self, ball: &Horoball) -> Horoball {
        let center = self.apply_boundary(&ball.center());
        let p = self.apply_interior(&ball.horosphere_point(self.dim));
        Horoball::through(&center, &p)
    }
}

/// Iteration-based classification of an isometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Classification {
    Hyperbolic {
        attracting: BoundaryPoint,
        repelling: BoundaryPoint,
    },
    Parabolic {
        fixed: BoundaryPoint,
    },
    EllipticOrIdentity,
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Classification::Hyperbolic { .. } => "hyperbolic",
            Classification::Parabolic { .. } => "parabolic",
            Classification::EllipticOrIdentity => "elliptic-or-identity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub max_iterations: usize,
    /// Chordal step size below which an orbit counts as converged.
    pub convergence_tol: f64,
    /// Chordal distance within which limits from different seeds agree.
    pub agreement_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            convergence_tol: 1e-13,
            agreement_tol: 1e-9,
        }
    }
}

/// Limits closer than this to `∞` (chordally) are reported as `∞`.
const INFINITY_SNAP: f64 = 1e-9;
/// Non-converged orbits whose end points all lie within this chordal diameter
/// are treated as creeping towards a single parabolic fixed point.
const PARABOLIC_CLUSTER: f64 = 5e-2;

#[derive(Debug, Clone)]
enum Orbit {
    Converged(BoundaryPoint),
    /// Every seed is moved by less than the convergence tolerance: the seed is
    /// itself fixed.
    Stationary,
    Wandering {
        samples: Vec<BoundaryPoint>,
    },
}

fn iterate(w: &IsometryWord, seed: &BoundaryPoint, opts: &ClassifyOptions) -> Orbit {
    let quarter = (opts.max_iterations / 4).max(1);
    let mut x = seed.clone();
    let mut samples = Vec::with_capacity(3);
    for k in 1..=opts.max_iterations {
        let next = w.apply_boundary(&x);
        let step = chordal_distance(&x, &next);
        if step < opts.convergence_tol {
            return if k == 1 {
                Orbit::Stationary
            } else {
                Orbit::Converged(snap(next))
            };
        }
        x = next;
        if k == quarter || k == 2 * quarter || k == 4 * quarter {
            samples.push(x.clone());
        }
    }
    Orbit::Wandering { samples }
}

fn snap(x: BoundaryPoint) -> BoundaryPoint {
    if chordal_distance(&x, &BoundaryPoint::Infinity) < INFINITY_SNAP {
        BoundaryPoint::Infinity
    } else {
        x
    }
}

/// Default generic seeds in `R^dim`.
pub fn generic_seeds(dim: usize) -> Vec<BoundaryPoint> {
    const A: [f64; 3] = [0.318_309_886, -0.707_106_781, 1.414_213_562];
    const B: [f64; 3] = [0.577_215_664, 0.271_828_182, -0.161_803_398];
    (0..3)
        .map(|s| {
            BoundaryPoint::Finite(Vector::from_fn(dim, |i, _| A[s] + B[s] * (i as f64 + 1.0)))
        })
        .collect()
}

/// Classifies `w` by iterating it forwards and backwards from generic seeds.
pub fn classify(w: &IsometryWord, opts: &ClassifyOptions) -> Result<Classification> {
    classify_with_seeds(w, &generic_seeds(w.dim()), opts)
}

/// Classification with caller-supplied seeds (used by the axis solver to start
/// near the expected fixed points).
///
/// * all forward orbits converge to one point and all backward orbits to
///   another: hyperbolic (to the same point: parabolic);
/// * every seed is fixed, or no orbit converges nor clusters: elliptic or
///   identity;
/// * orbits fail to converge but all crowd toward one point: parabolic, with
///   the fixed point extrapolated from the orbit;
/// * anything else is inconclusive.
pub fn classify_with_seeds(
    w: &IsometryWord,
    seeds: &[BoundaryPoint],
    opts: &ClassifyOptions,
) -> Result<Classification> {
    if seeds.is_empty() {
        return Err(Error::InvalidInput("no seeds".into()));
    }
    let inv = w.invert();
    let forward: Vec<Orbit> = seeds.iter().map(|s| iterate(w, s, opts)).collect();
    let backward: Vec<Orbit> = seeds.iter().map(|s| iterate(&inv, s, opts)).collect();

    let all_stationary = forward.iter().all(|o| matches!(o, Orbit::Stationary));
    if all_stationary {
        return Ok(Classification::EllipticOrIdentity);
    }

    let limits = |orbits: &[Orbit]| -> Option<Vec<BoundaryPoint>> {
        orbits
            .iter()
            .map(|o| match o {
                Orbit::Converged(p) => Some(p.clone()),
                _ => None,
            })
            .collect()
    };

    // A seed sitting exactly on a fixed point is stationary; drop such seeds
    // as long as at least one seed converges in each direction.
    let converged_or_fixed = |orbits: &[Orbit]| {
        orbits
            .iter()
            .all(|o| matches!(o, Orbit::Converged(_) | Orbit::Stationary))
            && orbits.iter().any(|o| matches!(o, Orbit::Converged(_)))
    };

    if converged_or_fixed(&forward) && converged_or_fixed(&backward) {
        let strip = |orbits: &[Orbit]| -> Vec<Orbit> {
            orbits
                .iter()
                .filter(|o| !matches!(o, Orbit::Stationary))
                .cloned()
                .collect()
        };
        let f = limits(&strip(&forward)).expect("filtered to converged");
        let b = limits(&strip(&backward)).expect("filtered to converged");
        let agree = |pts: &[BoundaryPoint]| {
            pts.iter()
                .all(|p| chordal_distance(p, &pts[0]) <= opts.agreement_tol)
        };
        if !agree(&f) || !agree(&b) {
            return Err(Error::ClassificationInconclusive {
                iterations: opts.max_iterations,
                detail: "seeds converged to different limits".into(),
            });
        }
        let (att, rep) = (f[0].clone(), b[0].clone());
        if chordal_distance(&att, &rep) <= opts.agreement_tol.sqrt() {
            return Ok(Classification::Parabolic { fixed: att });
        }
        return Ok(Classification::Hyperbolic {
            attracting: att,
            repelling: rep,
        });
    }

    let any_converged = forward
        .iter()
        .chain(&backward)
        .any(|o| matches!(o, Orbit::Converged(_)));
    if any_converged {
        return Err(Error::ClassificationInconclusive {
            iterations: opts.max_iterations,
            detail: "some orbits converged and others did not".into(),
        });
    }

    let ends: Vec<&BoundaryPoint> = forward
        .iter()
        .chain(&backward)
        .filter_map(|o| match o {
            Orbit::Wandering { samples } => samples.last(),
            _ => None,
        })
        .collect();
    let clustered = ends.len() == forward.len() + backward.len()
        && ends
            .iter()
            .all(|p| ends.iter().all(|q| chordal_distance(p, q) <= PARABOLIC_CLUSTER));
    if !clustered {
        return Ok(Classification::EllipticOrIdentity);
    }

    let fixed = if w.apply_boundary(&BoundaryPoint::Infinity).is_infinite()
        && chordal_distance(ends[0], &BoundaryPoint::Infinity) <= PARABOLIC_CLUSTER
    {
        BoundaryPoint::Infinity
    } else {
        match &forward[0] {
            Orbit::Wandering { samples } if samples.len() == 3 => {
                extrapolate_parabolic(&samples[0], &samples[1], &samples[2])
            }
            _ => ends[0].clone(),
        }
    };
    Ok(Classification::Parabolic { fixed })
}

/// Richardson extrapolation of an orbit creeping toward a parabolic fixed point
/// like `p + a/k + b/k² + ..`, from the iterates at `K`, `2K` and `4K`.
///
/// Works in the chart given by unit inversion when the orbit is far out, so
/// that the expansion is in bounded coordinates.
fn extrapolate_parabolic(x1: &BoundaryPoint, x2: &BoundaryPoint, x4: &BoundaryPoint) -> BoundaryPoint {
    let far = x4.as_finite().map_or(true, |v| v.norm() > 1.0);
    let dim = x4
        .as_finite()
        .or(x1.as_finite())
        .map_or(0, |v| v.len());
    let chart = Primitive::unit_inversion(dim);
    let to_chart = |x: &BoundaryPoint| if far { chart.apply_boundary(x) } else { x.clone() };
    let (Some(y1), Some(y2), Some(y4)) = (
        to_chart(x1).as_finite().cloned(),
        to_chart(x2).as_finite().cloned(),
        to_chart(x4).as_finite().cloned(),
    ) else {
        return x4.clone();
    };
    let p1 = &y2 * 2.0 - &y1;
    let p2 = &y4 * 2.0 - &y2;
    let p = (p2 * 4.0 - p1) / 3.0;
    let p = BoundaryPoint::Finite(p);
    snap(if far { chart.apply_boundary(&p) } else { p })
}

/// Translation length of a hyperbolic isometry: the displacement of a point on
/// its axis.
pub fn translation_length(w: &IsometryWord, class: &Classification) -> Result<f64> {
    match class {
        Classification::Hyperbolic {
            attracting,
            repelling,
        } => {
            let axis = geodesic_between(repelling, attracting)?;
            let p = axis.apex();
            Ok(hyperbolic_distance(&p, &w.apply_interior(&p)))
        }
        other => Err(Error::NonHyperbolic {
            classification: other.name().into(),
        }),
    }
}

/// A 2x2 complex matrix `[[a, b], [c, d]]`.
pub type ComplexMatrix = [[Complex64; 2]; 2];

fn complex_similarity(mult: Complex64, add: Complex64) -> Result<Primitive> {
    let scale = mult.norm();
    let (s, c) = (mult.im / scale, mult.re / scale);
    let rotation = Matrix::from_row_slice(2, 2, &[c, -s, s, c]);
    // Renormalize so rounding in (c, s) cannot trip the orthogonality check.
    let rotation = rotation / (c * c + s * s).sqrt();
    Primitive::similarity(scale, rotation, Vector::from_column_slice(&[add.re, add.im]))
}

/// Word for `z ↦ (a z + b) / (c z + d)` on `C ≅ R^2` (n = 3), precomposed with
/// complex conjugation when `orientation_reversing` is set.
pub fn from_matrix(m: &ComplexMatrix, orientation_reversing: bool) -> Result<IsometryWord> {
    let [[a, b], [c, d]] = *m;
    let det = a * d - b * c;
    if det.norm() == 0.0 {
        return Err(Error::SingularMatrix);
    }
    let mut ps = Vec::new();
    if c == Complex64::new(0.0, 0.0) {
        // z ↦ (a/d) z + b/d.
        ps.push(complex_similarity(a / d, b / d)?);
    } else {
        // (a z + b)/(c z + d) = a/c - (det/c²) / (z + d/c), and 1/z is the unit
        // inversion z ↦ 1/z̄ followed by conjugation.
        ps.push(complex_similarity(-det / (c * c), a / c)?);
        ps.push(Primitive::reflection(Vector::from_column_slice(&[0.0, 1.0]), 0.0)?);
        ps.push(Primitive::unit_inversion(2));
        ps.push(Primitive::translation(Vector::from_column_slice(&[(d / c).re, (d / c).im])));
    }
    if orientation_reversing {
        ps.push(Primitive::reflection(Vector::from_column_slice(&[0.0, 1.0]), 0.0)?);
    }
    IsometryWord::from_primitives(2, ps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;
    use approx::assert_abs_diff_eq;

    fn bp(c: &[f64]) -> BoundaryPoint {
        BoundaryPoint::finite(c)
    }

    fn assert_bp_close(a: &BoundaryPoint, b: &BoundaryPoint, tol: f64) {
        assert!(
            chordal_distance(a, b) < tol,
            "{a:?} vs {b:?} (chordal {})",
            chordal_distance(a, b)
        );
    }

    #[test]
    fn unit_inversion_on_boundary() {
        let h1 = IsometryWord::from_primitive(Primitive::unit_inversion(2));
        assert_eq!(h1.apply_boundary(&bp(&[2.0, 0.0])), bp(&[0.5, 0.0]));
        assert_eq!(h1.apply_boundary(&bp(&[0.0, 0.0])), BoundaryPoint::Infinity);
        assert_eq!(h1.apply_boundary(&BoundaryPoint::Infinity), bp(&[0.0, 0.0]));
    }

    #[test]
    fn bisector_reflection_sends_origin_to_b() {
        let h2 = Primitive::bisector_reflection(&vector(&[1.0, 0.0])).unwrap();
        assert_eq!(h2.apply_boundary(&bp(&[0.0, 0.0])), bp(&[1.0, 0.0]));
        let b = vector(&[0.3, 0.4]);
        let h2 = Primitive::bisector_reflection(&b).unwrap();
        assert_bp_close(&h2.apply_boundary(&bp(&[0.0, 0.0])), &BoundaryPoint::Finite(b), 1e-15);
    }

    #[test]
    fn interior_actions() {
        let p = InteriorPoint::from_coords(&[0.0, 0.0, 1.0]).unwrap();
        let dil = Primitive::dilation(2, 2.0).unwrap();
        assert_eq!(dil.apply_interior(&p).coords(), vec![0.0, 0.0, 2.0]);
        let h1 = Primitive::unit_inversion(2);
        assert_eq!(h1.apply_interior(&p).coords(), vec![0.0, 0.0, 1.0]);
        let q = InteriorPoint::from_coords(&[0.0, 0.0, 2.0]).unwrap();
        assert_eq!(h1.apply_interior(&q).coords(), vec![0.0, 0.0, 0.5]);
    }

    #[test]
    fn compose_h2_h1_sends_origin_to_b() {
        let b = vector(&[0.3, 0.4]);
        let h = IsometryWord::from_primitives(
            2,
            vec![
                Primitive::bisector_reflection(&b).unwrap(),
                Primitive::unit_inversion(2),
            ],
        )
        .unwrap();
        // h1 sends the origin to ∞, and h2 fixes ∞; A0 = (0, 0, 1) goes to (b, 1).
        let a0 = InteriorPoint::from_coords(&[0.0, 0.0, 1.0]).unwrap();
        let img = h.apply_interior(&a0);
        assert!((img.horizontal() - &b).amax() < 1e-15);
        assert_abs_diff_eq!(img.height(), 1.0, epsilon = 1e-15);
        assert_eq!(h.parity(), 1);
    }

    #[test]
    fn invert_similarity() {
        let s = Primitive::similarity(2.0, Matrix::identity(2, 2), vector(&[3.0, 0.0])).unwrap();
        let w = IsometryWord::from_primitive(s).invert();
        assert_bp_close(&w.apply_boundary(&bp(&[3.0, 0.0])), &bp(&[0.0, 0.0]), 1e-15);
    }

    #[test]
    fn primitive_validation() {
        assert!(Primitive::inversion(vector(&[0.0]), 0.0).is_err());
        assert!(Primitive::reflection(vector(&[1.0, 1.0]), 0.0).is_err());
        assert!(Primitive::similarity(-1.0, Matrix::identity(2, 2), vector(&[0.0, 0.0])).is_err());
        let shear = Matrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(Primitive::similarity(1.0, shear, vector(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn parity_of_words() {
        let refl = Primitive::reflection(vector(&[0.0, 1.0]), 0.0).unwrap();
        let flip = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let glide = Primitive::similarity(1.0, flip, vector(&[1.0, 0.0])).unwrap();
        assert_eq!(glide.parity(), -1);
        let w = IsometryWord::from_primitives(
            2,
            vec![glide, refl, Primitive::unit_inversion(2)],
        )
        .unwrap();
        assert_eq!(w.parity(), -1);
        assert_eq!(w.invert().parity(), -1);
    }

    #[test]
    fn classify_translation_as_parabolic_at_infinity() {
        let w = IsometryWord::from_primitive(Primitive::translation(vector(&[1.0, 0.0])));
        let c = classify(&w, &ClassifyOptions::default()).unwrap();
        assert_eq!(
            c,
            Classification::Parabolic {
                fixed: BoundaryPoint::Infinity
            }
        );
    }

    #[test]
    fn classify_dilation_as_hyperbolic() {
        let w = IsometryWord::from_primitive(Primitive::dilation(2, 2.0).unwrap());
        let Classification::Hyperbolic {
            attracting,
            repelling,
        } = classify(&w, &ClassifyOptions::default()).unwrap()
        else {
            panic!("expected hyperbolic")
        };
        assert_eq!(attracting, BoundaryPoint::Infinity);
        assert_bp_close(&repelling, &bp(&[0.0, 0.0]), 1e-9);
    }

    #[test]
    fn classify_rotation_as_elliptic() {
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let q = Matrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let w = IsometryWord::from_primitive(Primitive::similarity(1.0, q, vector(&[0.0, 0.0])).unwrap());
        assert_eq!(
            classify(&w, &ClassifyOptions::default()).unwrap(),
            Classification::EllipticOrIdentity
        );
        // Quarter turn: periodic orbits.
        let q = Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let w = IsometryWord::from_primitive(Primitive::similarity(1.0, q, vector(&[0.0, 0.0])).unwrap());
        assert_eq!(
            classify(&w, &ClassifyOptions::default()).unwrap(),
            Classification::EllipticOrIdentity
        );
        assert_eq!(
            classify(&IsometryWord::identity(2), &ClassifyOptions::default()).unwrap(),
            Classification::EllipticOrIdentity
        );
    }

    #[test]
    fn classify_parabolic_with_finite_fixed_point() {
        // z ↦ (2z - 1)/z has the double fixed point z = 1.
        let one = Complex64::new(1.0, 0.0);
        let m = [[one * 2.0, -one], [one, Complex64::new(0.0, 0.0)]];
        let w = from_matrix(&m, false).unwrap();
        let Classification::Parabolic { fixed } = classify(&w, &ClassifyOptions::default()).unwrap()
        else {
            panic!("expected parabolic")
        };
        assert_bp_close(&fixed, &bp(&[1.0, 0.0]), 1e-6);
    }

    #[test]
    fn inconclusive_when_iterations_exhausted() {
        let w = IsometryWord::from_primitive(Primitive::dilation(2, 1.0001).unwrap());
        let opts = ClassifyOptions {
            max_iterations: 10,
            ..ClassifyOptions::default()
        };
        // Ten steps of a weak dilation neither converge nor cluster at a fixed
        // point; orbits from spread seeds stay spread.
        let c = classify(&w, &opts);
        assert!(matches!(c, Ok(Classification::EllipticOrIdentity)) || c.is_err());
    }

    #[test]
    fn matrix_ingestion_examples() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let t = from_matrix(&[[one, one], [zero, one]], false).unwrap();
        assert_bp_close(&t.apply_boundary(&bp(&[2.0, 0.0])), &bp(&[3.0, 0.0]), 1e-15);

        let s = from_matrix(&[[zero, -one], [one, zero]], false).unwrap();
        assert_bp_close(&s.apply_boundary(&bp(&[2.0, 0.0])), &bp(&[-0.5, 0.0]), 1e-15);

        let r = std::f64::consts::SQRT_2;
        let d = from_matrix(&[[one * r, zero], [zero, one / r]], false).unwrap();
        assert_bp_close(&d.apply_boundary(&bp(&[1.0, 1.0])), &bp(&[2.0, 2.0]), 1e-14);
        let class = classify(&d, &ClassifyOptions::default()).unwrap();
        assert_eq!(class.name(), "hyperbolic");
        assert_abs_diff_eq!(translation_length(&d, &class).unwrap(), 2f64.ln(), epsilon = 1e-12);

        assert_eq!(from_matrix(&[[one, one], [one, one]], false), Err(Error::SingularMatrix));
    }

    #[test]
    fn horoball_images() {
        let h1 = IsometryWord::from_primitive(Primitive::unit_inversion(2));
        let h0 = Horoball::ball(Vector::zeros(2), 1.0).unwrap();
        let img = h1.apply_horoball(&h0);
        assert!(img.approx_eq(&Horoball::half_space(1.0).unwrap(), 1e-15));
    }
}
