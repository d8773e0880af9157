//! The stabilizer of the horoball `{x_n >= 1}`: translation lattices of any
//! rank and the rank-2 glide group `<s, t>`.
//!
//! Group elements act on the boundary chart `R^(n-1)` by Euclidean isometries
//! and on `H^n` by the height-preserving extension.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isometry::Primitive;
use crate::linalg::{serde_matrix, serde_vector, Matrix, Vector};

/// Serializes a basis as the list of its generators (columns).
mod serde_generators {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::linalg::{matrix_from_rows, matrix_rows, Matrix};

    pub fn serialize<S: Serializer>(m: &Matrix, s: S) -> Result<S::Ok, S::Error> {
        matrix_rows(&m.transpose()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        matrix_from_rows(&rows)
            .map(|m| m.transpose())
            .ok_or_else(|| serde::de::Error::custom("ragged generator list"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum CuspGroup {
    /// Translations by integer combinations of the columns of `basis`.
    Lattice {
        #[serde(with = "serde_generators")]
        basis: Matrix,
    },
    /// `s(x, y) = (x + α, -y)` and `t(x, y) = (x, y + β)` in adapted coordinates.
    Glide { alpha: f64, beta: f64 },
}

/// `Lattice(w)` is `Σ w_i t_i`; `Glide { n, m }` is `s^n t^m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupElement {
    Lattice(Vec<i64>),
    Glide { n: i64, m: i64 },
}

impl GroupElement {
    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Lattice(w) => w.iter().all(|&c| c == 0),
            GroupElement::Glide { n, m } => *n == 0 && *m == 0,
        }
    }

    pub fn is_orientation_reversing(&self) -> bool {
        matches!(self, GroupElement::Glide { n, .. } if n.rem_euclid(2) == 1)
    }
}

impl std::fmt::Display for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupElement::Lattice(w) => {
                let parts: Vec<String> = w.iter().map(i64::to_string).collect();
                write!(f, "{}", parts.join(","))
            }
            GroupElement::Glide { n, m } => write!(f, "s^{n} t^{m}"),
        }
    }
}

/// `x ↦ R x + v` on the boundary chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineAction {
    #[serde(with = "serde_matrix")]
    pub rotation: Matrix,
    #[serde(with = "serde_vector")]
    pub translation: Vector,
}

impl AffineAction {
    pub fn apply(&self, x: &Vector) -> Vector {
        &self.rotation * x + &self.translation
    }

    pub fn is_translation(&self) -> bool {
        self.rotation
            .iter()
            .enumerate()
            .all(|(k, &x)| x == if k % (self.rotation.nrows() + 1) == 0 { 1.0 } else { 0.0 })
    }

    /// The same map written in the chart whose origin sits at `origin`:
    /// `y ↦ R (y + origin) + v - origin`.
    pub fn recentered(&self, origin: &Vector) -> AffineAction {
        AffineAction {
            rotation: self.rotation.clone(),
            translation: &self.rotation * origin + &self.translation - origin,
        }
    }

    /// Height-preserving extension to `H^n`.
    pub fn to_primitive(&self) -> Primitive {
        Primitive::Similarity {
            scale: 1.0,
            rotation: self.rotation.clone(),
            translation: self.translation.clone(),
        }
    }
}

fn flip() -> Matrix {
    Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

impl CuspGroup {
    /// A lattice from generator vectors (the rows of `generators`).
    pub fn lattice(generators: &[Vec<f64>]) -> Result<Self> {
        let k = generators.len();
        if k == 0 || generators.iter().any(|g| g.len() != k) {
            return Err(Error::ConfigurationInvalid(format!(
                "a rank-{k} lattice in R^{k} needs {k} generators of length {k}"
            )));
        }
        let basis = Matrix::from_fn(k, k, |i, j| generators[j][i]);
        let det = basis.determinant();
        if det.abs() < 1e-12 {
            return Err(Error::ConfigurationInvalid(format!(
                "lattice basis is degenerate (determinant {det:e})"
            )));
        }
        Ok(CuspGroup::Lattice { basis })
    }

    pub fn glide(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(Error::ConfigurationInvalid(format!(
                "glide parameters must be positive (alpha {alpha}, beta {beta})"
            )));
        }
        Ok(CuspGroup::Glide { alpha, beta })
    }

    /// Dimension of the boundary chart.
    pub fn dim(&self) -> usize {
        match self {
            CuspGroup::Lattice { basis } => basis.nrows(),
            CuspGroup::Glide { .. } => 2,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            CuspGroup::Lattice { basis } => GroupElement::Lattice(vec![0; basis.ncols()]),
            CuspGroup::Glide { .. } => GroupElement::Glide { n: 0, m: 0 },
        }
    }

    fn check(&self, e: &GroupElement) -> Result<()> {
        match (self, e) {
            (CuspGroup::Lattice { basis }, GroupElement::Lattice(w)) if w.len() == basis.ncols() => Ok(()),
            (CuspGroup::Lattice { basis }, GroupElement::Lattice(w)) => Err(Error::MalformedElement(format!(
                "{} coefficients for a rank-{} lattice",
                w.len(),
                basis.ncols()
            ))),
            (CuspGroup::Glide { .. }, GroupElement::Glide { .. }) => Ok(()),
            _ => Err(Error::MalformedElement(format!(
                "element {e} does not belong to this group type"
            ))),
        }
    }

    pub fn element_action(&self, e: &GroupElement) -> Result<AffineAction> {
        self.check(e)?;
        Ok(match (self, e) {
            (CuspGroup::Lattice { basis }, GroupElement::Lattice(w)) => {
                let k = basis.nrows();
                let coeffs = Vector::from_iterator(w.len(), w.iter().map(|&c| c as f64));
                AffineAction {
                    rotation: Matrix::identity(k, k),
                    translation: basis * coeffs,
                }
            }
            (CuspGroup::Glide { alpha, beta }, GroupElement::Glide { n, m }) => {
                let (nf, mf) = (*n as f64, *m as f64);
                if n.rem_euclid(2) == 0 {
                    AffineAction {
                        rotation: Matrix::identity(2, 2),
                        translation: Vector::from_column_slice(&[nf * alpha, mf * beta]),
                    }
                } else {
                    // Glide reflection in the line y = -mβ/2.
                    AffineAction {
                        rotation: flip(),
                        translation: Vector::from_column_slice(&[nf * alpha, -mf * beta]),
                    }
                }
            }
            _ => unreachable!("checked above"),
        })
    }

    /// Group product `a · b` (apply `b` first).
    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (a, b) {
            (GroupElement::Lattice(x), GroupElement::Lattice(y)) => {
                GroupElement::Lattice(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            // s^n1 t^m1 s^n2 t^m2 = s^(n1+n2) t^((-1)^n2 m1 + m2), from t s = s t^-1.
            (GroupElement::Glide { n: n1, m: m1 }, GroupElement::Glide { n: n2, m: m2 }) => {
                let sign = if n2.rem_euclid(2) == 0 { 1 } else { -1 };
                GroupElement::Glide {
                    n: n1 + n2,
                    m: sign * m1 + m2,
                }
            }
            _ => unreachable!("checked above"),
        })
    }

    pub fn inverse(&self, e: &GroupElement) -> Result<GroupElement> {
        self.check(e)?;
        Ok(match e {
            GroupElement::Lattice(w) => GroupElement::Lattice(w.iter().map(|c| -c).collect()),
            // (s^n t^m)^-1 = t^-m s^-n = s^-n t^((-1)^(n+1) m).
            GroupElement::Glide { n, m } => {
                let sign = if n.rem_euclid(2) == 0 { -1 } else { 1 };
                GroupElement::Glide { n: -n, m: sign * m }
            }
        })
    }

    /// Calls `visit` for every nonidentity element that moves `center` by at
    /// most `radius`, in a fixed deterministic order.
    ///
    /// For translations the displacement is `|v|` wherever `center` is; for a
    /// glide reflection it also depends on the distance from `center` to the
    /// reflection axis.
    pub fn for_each_near<F>(&self, center: &Vector, radius: f64, mut visit: F)
    where
        F: FnMut(&GroupElement, &AffineAction),
    {
        if !(radius > 0.0) {
            return;
        }
        match self {
            CuspGroup::Lattice { basis } => {
                let k = basis.ncols();
                let Some(inv) = basis.clone().try_inverse() else {
                    return;
                };
                // |w_i| = |(B^-1 v)_i| <= |row_i(B^-1)| |v|.
                let bounds: Vec<i64> = (0..k)
                    .map(|i| (inv.row(i).norm() * radius).floor() as i64)
                    .collect();
                let mut w: Vec<i64> = bounds.iter().map(|b| -b).collect();
                let r2 = radius * radius;
                let mut coeffs = Vector::zeros(k);
                let mut v = Vector::zeros(k);
                let mut action = AffineAction {
                    rotation: Matrix::identity(k, k),
                    translation: Vector::zeros(k),
                };
                loop {
                    if w.iter().any(|&c| c != 0) {
                        for (c, &wi) in coeffs.iter_mut().zip(&w) {
                            *c = wi as f64;
                        }
                        basis.mul_to(&coeffs, &mut v);
                        if v.norm_squared() <= r2 {
                            action.translation.copy_from(&v);
                            visit(&GroupElement::Lattice(w.clone()), &action);
                        }
                    }
                    // Odometer increment over the coefficient box.
                    let mut i = k;
                    loop {
                        if i == 0 {
                            return;
                        }
                        i -= 1;
                        if w[i] < bounds[i] {
                            w[i] += 1;
                            break;
                        }
                        w[i] = -bounds[i];
                    }
                }
            }
            CuspGroup::Glide { alpha, beta } => {
                let (cy, r2) = (center[1], radius * radius);
                let n_max = (radius / alpha).floor() as i64 + 1;
                let m_span = (radius / beta).floor() as i64 + 1;
                // Odd n: the y-displacement is -2 c_y - m β, centered at m = -2 c_y / β.
                let m_mid = (-2.0 * cy / beta).round() as i64;
                for n in -n_max..=n_max {
                    let odd = n.rem_euclid(2) == 1;
                    let (lo, hi) = if odd {
                        (m_mid - m_span - 1, m_mid + m_span + 1)
                    } else {
                        (-m_span, m_span)
                    };
                    for m in lo..=hi {
                        if n == 0 && m == 0 {
                            continue;
                        }
                        let e = GroupElement::Glide { n, m };
                        let action = self.element_action(&e).expect("glide element");
                        let moved = action.apply(center) - center;
                        if moved.norm_squared() <= r2 {
                            visit(&e, &action);
                        }
                    }
                }
            }
        }
    }

    /// Nonidentity elements moving `center` by at most `radius`.
    pub fn enumerate_near(&self, center: &Vector, radius: f64) -> Vec<GroupElement> {
        let mut out = Vec::new();
        self.for_each_near(center, radius, |e, _| out.push(e.clone()));
        out
    }

    /// Nonidentity elements whose translation part has norm at most `radius`.
    pub fn enumerate_within(&self, radius: f64) -> Vec<GroupElement> {
        self.enumerate_near(&Vector::zeros(self.dim()), radius)
    }

    /// Maps `x` into the half-open fundamental domain, returning the
    /// representative and the element that carries `x` to it.
    ///
    /// Lattice: basis coordinates in `[0, 1)`. Glide:
    /// `{ 0 <= x < α, -β/2 <= y < β/2 }`.
    pub fn reduce_to_fundamental_domain(&self, x: &Vector) -> Result<(Vector, GroupElement)> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        match self {
            CuspGroup::Lattice { basis } => {
                let inv = basis.clone().try_inverse().ok_or(Error::SingularMatrix)?;
                let coords = inv * x;
                let shift: Vec<i64> = coords
                    .iter()
                    .map(|c| {
                        let f = c.floor();
                        // Rounding can leave c - floor(c) == 1.
                        if c - f >= 1.0 { f as i64 + 1 } else { f as i64 }
                    })
                    .collect();
                let e = GroupElement::Lattice(shift.iter().map(|s| -s).collect());
                let rep = self.element_action(&e)?.apply(x);
                Ok((rep, e))
            }
            CuspGroup::Glide { alpha, beta } => {
                let n = (x[0] / alpha).floor() as i64;
                let y1 = if n.rem_euclid(2) == 0 { x[1] } else { -x[1] };
                let k = ((y1 + beta / 2.0) / beta).floor() as i64;
                // t^-k ∘ s^-n.
                let e = self.multiply(&GroupElement::Glide { n: 0, m: -k }, &GroupElement::Glide { n: -n, m: 0 })?;
                let rep = self.element_action(&e)?.apply(x);
                Ok((rep, e))
            }
        }
    }

    pub fn in_fundamental_domain(&self, x: &Vector, tol: f64) -> bool {
        match self {
            CuspGroup::Lattice { basis } => match basis.clone().try_inverse() {
                Some(inv) => (inv * x).iter().all(|&c| c >= -tol && c < 1.0),
                None => false,
            },
            CuspGroup::Glide { alpha, beta } => {
                x[0] >= -tol && x[0] < *alpha && x[1] >= -beta / 2.0 - tol && x[1] < beta / 2.0
            }
        }
    }

    /// `|e(b0) - a0|`: the Euclidean distance on `∂H∞` from `A0` to `B_t`.
    pub fn norm_from(&self, e: &GroupElement, a0: &Vector, b0: &Vector) -> Result<f64> {
        Ok((self.element_action(e)?.apply(b0) - a0).norm())
    }

    /// [`norm_from`](Self::norm_from) with `A0` at the chart origin.
    pub fn norm_of(&self, e: &GroupElement, b0: &Vector) -> Result<f64> {
        Ok(self.element_action(e)?.apply(b0).norm())
    }

    /// Vertices of the fundamental domain (parallelotope corners for lattices,
    /// rectangle corners for the glide group), in a closed boundary order for
    /// rank 2.
    pub fn fundamental_domain_vertices(&self) -> Vec<Vector> {
        match self {
            CuspGroup::Lattice { basis } => {
                let k = basis.ncols();
                if k == 2 {
                    let (a, b) = (basis.column(0).into_owned(), basis.column(1).into_owned());
                    return vec![Vector::zeros(2), a.clone(), &a + &b, b];
                }
                (0..(1usize << k))
                    .map(|mask| {
                        let coeffs = Vector::from_fn(k, |i, _| ((mask >> i) & 1) as f64);
                        basis * coeffs
                    })
                    .collect()
            }
            CuspGroup::Glide { alpha, beta } => vec![
                Vector::from_column_slice(&[0.0, -beta / 2.0]),
                Vector::from_column_slice(&[*alpha, -beta / 2.0]),
                Vector::from_column_slice(&[*alpha, beta / 2.0]),
                Vector::from_column_slice(&[0.0, beta / 2.0]),
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;
    use approx::assert_abs_diff_eq;

    fn unit_lattice() -> CuspGroup {
        CuspGroup::lattice(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    fn glide() -> CuspGroup {
        CuspGroup::glide(1.0, 1.4).unwrap()
    }

    #[test]
    fn glide_element_actions() {
        let a = glide().element_action(&GroupElement::Glide { n: 2, m: 1 }).unwrap();
        assert!(a.is_translation());
        assert_abs_diff_eq!(a.translation[0], 2.0);
        assert_abs_diff_eq!(a.translation[1], 1.4);

        let a = glide().element_action(&GroupElement::Glide { n: 1, m: 1 }).unwrap();
        assert_eq!(a.rotation, flip());
        assert_abs_diff_eq!(a.translation[0], 1.0);
        assert_abs_diff_eq!(a.translation[1], -1.4);
        // The reflection axis y = -0.7 is fixed up to the glide along x.
        let on_axis = a.apply(&vector(&[0.25, -0.7]));
        assert_abs_diff_eq!(on_axis[1], -0.7, epsilon = 1e-15);
    }

    #[test]
    fn lattice_element_action() {
        let a = unit_lattice().element_action(&GroupElement::Lattice(vec![3, 0])).unwrap();
        assert_eq!(a.translation, vector(&[3.0, 0.0]));
        assert!(unit_lattice().element_action(&GroupElement::Lattice(vec![1])).is_err());
        assert!(unit_lattice().element_action(&GroupElement::Glide { n: 1, m: 0 }).is_err());
    }

    #[test]
    fn enumerate_small_radius() {
        let mut els = unit_lattice().enumerate_within(1.5);
        els.sort_by_key(|e| format!("{e}"));
        assert_eq!(els.len(), 8);
        assert!(els.contains(&GroupElement::Lattice(vec![1, 1])));
        assert!(!els.contains(&GroupElement::Lattice(vec![0, 0])));

        let els = glide().enumerate_within(1.2);
        assert_eq!(
            els,
            vec![GroupElement::Glide { n: -1, m: 0 }, GroupElement::Glide { n: 1, m: 0 }]
        );

        assert!(unit_lattice().enumerate_within(0.0).is_empty());
        assert!(glide().enumerate_within(0.0).is_empty());
    }

    #[test]
    fn reduce_examples() {
        let (rep, e) = glide().reduce_to_fundamental_domain(&vector(&[1.3, 0.9])).unwrap();
        assert_abs_diff_eq!(rep[0], 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(rep[1], 0.5, epsilon = 1e-12);
        // t ∘ s^-1.
        assert_eq!(e, GroupElement::Glide { n: -1, m: -1 });

        let (rep, e) = unit_lattice().reduce_to_fundamental_domain(&vector(&[0.3, 0.4])).unwrap();
        assert_eq!(rep, vector(&[0.3, 0.4]));
        assert!(e.is_identity());

        let (rep, e) = unit_lattice().reduce_to_fundamental_domain(&vector(&[-0.2, 2.5])).unwrap();
        assert_abs_diff_eq!(rep[0], 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(rep[1], 0.5, epsilon = 1e-12);
        assert_eq!(e, GroupElement::Lattice(vec![1, -2]));
    }

    #[test]
    fn norm_examples() {
        let b0 = vector(&[0.3, 0.4]);
        assert_abs_diff_eq!(
            unit_lattice().norm_of(&GroupElement::Lattice(vec![3, 0]), &b0).unwrap(),
            11.05f64.sqrt(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            unit_lattice().norm_of(&GroupElement::Lattice(vec![0, 0]), &b0).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        let n = glide()
            .norm_of(&GroupElement::Glide { n: 1, m: 2 }, &vector(&[0.0, 0.3]))
            .unwrap();
        assert_abs_diff_eq!(n, (1.0f64 + 3.1 * 3.1).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(n, 3.257_299_494_980_466, epsilon = 1e-12);
    }

    #[test]
    fn glide_inverse_and_relation() {
        let g = glide();
        let t = GroupElement::Glide { n: 0, m: 1 };
        let s = GroupElement::Glide { n: 1, m: 0 };
        // t s t = s.
        let tst = g.multiply(&g.multiply(&t, &s).unwrap(), &t).unwrap();
        assert_eq!(tst, s);
        for e in [GroupElement::Glide { n: 3, m: -2 }, GroupElement::Glide { n: -2, m: 5 }] {
            let inv = g.inverse(&e).unwrap();
            assert!(g.multiply(&e, &inv).unwrap().is_identity());
            assert!(g.multiply(&inv, &e).unwrap().is_identity());
        }
    }

    #[test]
    fn degenerate_groups_rejected() {
        assert!(CuspGroup::lattice(&[vec![1.0, 2.0], vec![2.0, 4.0]]).is_err());
        assert!(CuspGroup::lattice(&[vec![1.0, 0.0]]).is_err());
        assert!(CuspGroup::glide(0.0, 1.0).is_err());
    }
}
