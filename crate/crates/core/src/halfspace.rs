//! Points, geodesics and horoballs of the upper half-space model
//! `H^n = { x in R^n : x_n > 0 }`.
//!
//! The ideal boundary is `R^(n-1) ∪ {∞}`; `∞` is a first-class value of
//! [`BoundaryPoint`] and every boundary formula has an explicit branch for it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{serde_vector, Vector};

/// A point of `∂H^n = R^(n-1) ∪ {∞}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPoint {
    Finite(#[serde(with = "serde_vector")] Vector),
    Infinity,
}

impl PartialEq for BoundaryPoint {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => true,
            (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => a == b,
            _ => false,
        }
    }
}

impl BoundaryPoint {
    pub fn finite(coords: &[f64]) -> Self {
        BoundaryPoint::Finite(Vector::from_column_slice(coords))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<&Vector> {
        match self {
            BoundaryPoint::Finite(v) => Some(v),
            BoundaryPoint::Infinity => None,
        }
    }
}

/// Chordal distance on `R^k ∪ {∞}` induced by stereographic projection onto
/// the unit sphere. Bounded by 2 and treats `∞` like any other point.
pub fn chordal_distance(a: &BoundaryPoint, b: &BoundaryPoint) -> f64 {
    match (a, b) {
        (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => 0.0,
        (BoundaryPoint::Finite(x), BoundaryPoint::Infinity)
        | (BoundaryPoint::Infinity, BoundaryPoint::Finite(x)) => {
            2.0 / (1.0 + x.norm_squared()).sqrt()
        }
        (BoundaryPoint::Finite(x), BoundaryPoint::Finite(y)) => {
            let nx = 1.0 + x.norm_squared();
            let ny = 1.0 + y.norm_squared();
            if !nx.is_finite() || !ny.is_finite() {
                // Both coordinates are enormous; compare through the inversion.
                let ix = x / x.norm() / x.norm();
                let iy = y / y.norm() / y.norm();
                return 2.0 * (&ix - &iy).norm()
                    / ((1.0 + ix.norm_squared()) * (1.0 + iy.norm_squared())).sqrt();
            }
            2.0 * (x - y).norm() / (nx * ny).sqrt()
        }
    }
}

/// A point of `H^n`: horizontal coordinates in `R^(n-1)` and a positive height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteriorPoint {
    #[serde(with = "serde_vector")]
    horizontal: Vector,
    height: f64,
}

impl InteriorPoint {
    pub fn new(horizontal: Vector, height: f64) -> Result<Self> {
        if !(height > 0.0) || !height.is_finite() {
            return Err(Error::InvalidPoint(format!("height {height} is not positive")));
        }
        if horizontal.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        Ok(Self { horizontal, height })
    }

    /// Full coordinates `(x_1, .., x_n)` with the height last.
    pub fn from_coords(coords: &[f64]) -> Result<Self> {
        let (height, horizontal) = coords
            .split_last()
            .ok_or_else(|| Error::InvalidPoint("empty coordinate list".into()))?;
        Self::new(Vector::from_column_slice(horizontal), *height)
    }

    pub fn horizontal(&self) -> &Vector {
        &self.horizontal
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    /// Orthogonal projection to `∂H^n`.
    pub fn foot(&self) -> BoundaryPoint {
        BoundaryPoint::Finite(self.horizontal.clone())
    }

    pub fn coords(&self) -> Vec<f64> {
        let mut c: Vec<f64> = self.horizontal.iter().copied().collect();
        c.push(self.height);
        c
    }

    pub fn euclidean_distance(&self, other: &InteriorPoint) -> f64 {
        let dh = self.height - other.height;
        ((&self.horizontal - &other.horizontal).norm_squared() + dh * dh).sqrt()
    }
}

/// Hyperbolic distance, `cosh d = 1 + |p - q|^2 / (2 p_n q_n)`.
///
/// Evaluated as `2 asinh(|p - q| / (2 sqrt(p_n q_n)))`, which is the same
/// quantity without the cancellation near `d = 0`.
pub fn hyperbolic_distance(p: &InteriorPoint, q: &InteriorPoint) -> f64 {
    let e = p.euclidean_distance(q);
    2.0 * (e / (2.0 * (p.height * q.height).sqrt())).asinh()
}

/// Euclidean data of a geodesic.
#[derive(Debug, Clone, PartialEq)]
pub enum GeodesicShape {
    /// Semicircle orthogonal to the boundary: endpoints `center ± radius * direction`.
    Semicircle {
        center: Vector,
        radius: f64,
        direction: Vector,
    },
    /// Vertical ray over a finite boundary point.
    Vertical { foot: Vector },
}

/// A complete geodesic, stored by its ordered pair of ideal endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geodesic {
    start: BoundaryPoint,
    end: BoundaryPoint,
}

/// The unique geodesic from `p` to `q`.
pub fn geodesic_between(p: &BoundaryPoint, q: &BoundaryPoint) -> Result<Geodesic> {
    Geodesic::new(p.clone(), q.clone())
}

impl Geodesic {
    pub fn new(start: BoundaryPoint, end: BoundaryPoint) -> Result<Self> {
        if start == end {
            return Err(Error::DegenerateGeodesic);
        }
        if let (Some(a), Some(b)) = (start.as_finite(), end.as_finite()) {
            if a.len() != b.len() {
                return Err(Error::DimensionMismatch {
                    expected: a.len(),
                    found: b.len(),
                });
            }
            if (a - b).norm() == 0.0 {
                return Err(Error::DegenerateGeodesic);
            }
        }
        Ok(Self { start, end })
    }

    pub fn start(&self) -> &BoundaryPoint {
        &self.start
    }

    pub fn end(&self) -> &BoundaryPoint {
        &self.end
    }

    /// Center, radius and direction (from `start` to `end`), recomputed from
    /// the endpoints on every call.
    pub fn shape(&self) -> GeodesicShape {
        match (&self.start, &self.end) {
            (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => {
                let diff = b - a;
                let radius = diff.norm() / 2.0;
                GeodesicShape::Semicircle {
                    center: (a + b) / 2.0,
                    radius,
                    direction: diff / (2.0 * radius),
                }
            }
            (BoundaryPoint::Finite(f), BoundaryPoint::Infinity)
            | (BoundaryPoint::Infinity, BoundaryPoint::Finite(f)) => {
                GeodesicShape::Vertical { foot: f.clone() }
            }
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => {
                unreachable!("constructor rejects coincident endpoints")
            }
        }
    }

    /// Highest point of a semicircle; for a vertical line, the point at height 1.
    pub fn apex(&self) -> InteriorPoint {
        match self.shape() {
            GeodesicShape::Semicircle { center, radius, .. } => InteriorPoint {
                horizontal: center,
                height: radius,
            },
            GeodesicShape::Vertical { foot } => InteriorPoint {
                horizontal: foot,
                height: 1.0,
            },
        }
    }

    /// Euclidean deviation of `p` from the geodesic.
    pub fn deviation(&self, p: &InteriorPoint) -> f64 {
        match self.shape() {
            GeodesicShape::Semicircle {
                center,
                radius,
                direction,
            } => {
                let rel = &p.horizontal - &center;
                let along = rel.dot(&direction);
                let off_plane = (&rel - &direction * along).norm();
                let on_circle = ((along * along + p.height * p.height).sqrt() - radius).abs();
                off_plane.max(on_circle)
            }
            GeodesicShape::Vertical { foot } => (&p.horizontal - &foot).norm(),
        }
    }
}

/// Points where `g` meets the horizontal plane at height `h`.
///
/// Two points `O ∓ sqrt(r² - h²) u` (in that order) when `r > h`, the apex when
/// `r = h`, none when `r < h`; one point for a vertical geodesic.
pub fn crossings_at_height(g: &Geodesic, h: f64) -> Result<Vec<InteriorPoint>> {
    if !(h > 0.0) {
        return Err(Error::InvalidPoint(format!("height {h} is not positive")));
    }
    match g.shape() {
        GeodesicShape::Vertical { foot } => Ok(vec![InteriorPoint::new(foot, h)?]),
        GeodesicShape::Semicircle {
            center,
            radius,
            direction,
        } => {
            if radius < h {
                Ok(Vec::new())
            } else if radius == h {
                Ok(vec![InteriorPoint::new(center, h)?])
            } else {
                let half = (radius * radius - h * h).sqrt();
                Ok(vec![
                    InteriorPoint::new(&center - &direction * half, h)?,
                    InteriorPoint::new(&center + &direction * half, h)?,
                ])
            }
        }
    }
}

/// A closed sub-arc of a geodesic between two of its points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorosphereArc {
    geodesic: Geodesic,
    start: InteriorPoint,
    end: InteriorPoint,
}

impl HorosphereArc {
    /// Both endpoints must lie on `geodesic` within `tol` (Euclidean).
    pub fn new(geodesic: Geodesic, start: InteriorPoint, end: InteriorPoint, tol: f64) -> Result<Self> {
        for p in [&start, &end] {
            let dev = geodesic.deviation(p);
            if dev > tol {
                return Err(Error::InvalidPoint(format!(
                    "arc endpoint lies {dev:e} off its geodesic"
                )));
            }
        }
        Ok(Self {
            geodesic,
            start,
            end,
        })
    }

    pub fn geodesic(&self) -> &Geodesic {
        &self.geodesic
    }

    pub fn start(&self) -> &InteriorPoint {
        &self.start
    }

    pub fn end(&self) -> &InteriorPoint {
        &self.end
    }

    /// Length of the projection of the arc's chord to the boundary plane.
    pub fn projected_length(&self) -> f64 {
        (&self.start.horizontal - &self.end.horizontal).norm()
    }

    /// Euclidean diameter. Sub-arcs here never exceed a half circle, so the
    /// chord between the endpoints realizes it.
    pub fn euclidean_diameter(&self) -> f64 {
        self.start.euclidean_distance(&self.end)
    }

    pub fn hyperbolic_length(&self) -> f64 {
        hyperbolic_distance(&self.start, &self.end)
    }
}

/// The part of the semicircle `g` at height `>= h`, i.e. the arc between its
/// two crossings of the plane `x_n = h`.
pub fn arc_between_crossings(g: &Geodesic, h: f64) -> Result<HorosphereArc> {
    match g.shape() {
        GeodesicShape::Vertical { .. } => Err(Error::InvalidInput(
            "a vertical geodesic has an unbounded part above any height".into(),
        )),
        GeodesicShape::Semicircle { radius, .. } => {
            if radius <= h {
                return Err(Error::NoArc { radius, height: h });
            }
            let mut pts = crossings_at_height(g, h)?;
            let end = pts.pop().expect("two crossings");
            let start = pts.pop().expect("two crossings");
            Ok(HorosphereArc {
                geodesic: g.clone(),
                start,
                end,
            })
        }
    }
}

/// A horoball: `{x_n >= height}` or a Euclidean ball tangent to the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horoball {
    HalfSpace {
        height: f64,
    },
    Ball {
        #[serde(with = "serde_vector")]
        base: Vector,
        diameter: f64,
    },
}

impl Horoball {
    pub fn half_space(height: f64) -> Result<Self> {
        if !(height > 0.0) {
            return Err(Error::InvalidInput(format!("horoball height {height} is not positive")));
        }
        Ok(Horoball::HalfSpace { height })
    }

    pub fn ball(base: Vector, diameter: f64) -> Result<Self> {
        if !(diameter > 0.0) {
            return Err(Error::InvalidInput(format!(
                "horoball diameter {diameter} is not positive"
            )));
        }
        Ok(Horoball::Ball { base, diameter })
    }

    /// The horoball's point at infinity or base point.
    pub fn center(&self) -> BoundaryPoint {
        match self {
            Horoball::HalfSpace { .. } => BoundaryPoint::Infinity,
            Horoball::Ball { base, .. } => BoundaryPoint::Finite(base.clone()),
        }
    }

    /// Some point of the bounding horosphere, in a dimension-`dim` boundary.
    pub fn horosphere_point(&self, dim: usize) -> InteriorPoint {
        match self {
            Horoball::HalfSpace { height } => InteriorPoint {
                horizontal: Vector::zeros(dim),
                height: *height,
            },
            Horoball::Ball { base, diameter } => InteriorPoint {
                horizontal: base.clone(),
                height: *diameter,
            },
        }
    }

    /// The horoball centered at `center` whose horosphere passes through `p`.
    pub fn through(center: &BoundaryPoint, p: &InteriorPoint) -> Horoball {
        match center {
            BoundaryPoint::Infinity => Horoball::HalfSpace { height: p.height },
            BoundaryPoint::Finite(base) => {
                let h = p.height;
                let diameter = ((&p.horizontal - base).norm_squared() + h * h) / h;
                Horoball::Ball {
                    base: base.clone(),
                    diameter,
                }
            }
        }
    }

    pub fn contains(&self, p: &InteriorPoint) -> bool {
        match self {
            Horoball::HalfSpace { height } => p.height >= *height,
            Horoball::Ball { base, diameter } => {
                let r = diameter / 2.0;
                let dh = p.height - r;
                (&p.horizontal - base).norm_squared() + dh * dh <= r * r
            }
        }
    }

    /// Equality of shape parameters within `tol`.
    pub fn approx_eq(&self, other: &Horoball, tol: f64) -> bool {
        match (self, other) {
            (Horoball::HalfSpace { height: a }, Horoball::HalfSpace { height: b }) => {
                (a - b).abs() <= tol
            }
            (
                Horoball::Ball {
                    base: a,
                    diameter: da,
                },
                Horoball::Ball {
                    base: b,
                    diameter: db,
                },
            ) => a.len() == b.len() && (a - b).amax() <= tol && (da - db).abs() <= tol,
            _ => false,
        }
    }

    /// The point where two horoballs touch, if they are tangent within `tol`.
    pub fn tangency(&self, other: &Horoball, tol: f64) -> Option<InteriorPoint> {
        match (self, other) {
            (Horoball::HalfSpace { .. }, Horoball::HalfSpace { .. }) => None,
            (Horoball::HalfSpace { height }, Horoball::Ball { base, diameter })
            | (Horoball::Ball { base, diameter }, Horoball::HalfSpace { height }) => {
                ((diameter - height).abs() <= tol).then(|| InteriorPoint {
                    horizontal: base.clone(),
                    height: *height,
                })
            }
            (
                Horoball::Ball {
                    base: b1,
                    diameter: d1,
                },
                Horoball::Ball {
                    base: b2,
                    diameter: d2,
                },
            ) => {
                // Centers (b_i, d_i/2) at distance (d1 + d2)/2  <=>  |b1 - b2|^2 = d1 d2.
                let sep2 = (b1 - b2).norm_squared();
                if (sep2 - d1 * d2).abs() > tol * (1.0 + d1 * d2) {
                    return None;
                }
                let c1 = (b1, d1 / 2.0);
                let c2 = (b2, d2 / 2.0);
                let w = d1 / (d1 + d2);
                let horizontal = c1.0 + (c2.0 - c1.0) * w;
                let height = c1.1 + (c2.1 - c1.1) * w;
                Some(InteriorPoint { horizontal, height })
            }
        }
    }
}
