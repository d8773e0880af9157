//! Thin helpers over `nalgebra` dynamic vectors and matrices.

use nalgebra::{DMatrix, DVector};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

pub fn vector(entries: &[f64]) -> Vector {
    DVector::from_column_slice(entries)
}

/// Builds a matrix from row slices. All rows must have the same length.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Option<Matrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return None;
    }
    Some(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// Max-entry deviation of `QᵀQ` from the identity.
pub fn orthogonality_residual(q: &Matrix) -> f64 {
    if !q.is_square() {
        return f64::INFINITY;
    }
    let n = q.nrows();
    (q.transpose() * q - Matrix::identity(n, n)).amax()
}

/// Nearest orthogonal matrix (polar factor).
pub fn nearest_orthogonal(q: &Matrix) -> Matrix {
    let svd = q.clone().svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => u * v_t,
        _ => q.clone(),
    }
}

/// Angle between two nonzero vectors, in `[0, pi]`.
pub fn angle_between(a: &Vector, b: &Vector) -> f64 {
    let c = a.dot(b) / (a.norm() * b.norm());
    c.clamp(-1.0, 1.0).acos()
}

pub(crate) mod serde_vector {
    use super::Vector;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Vector, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector, D::Error> {
        let entries = Vec::<f64>::deserialize(d)?;
        Ok(Vector::from_vec(entries))
    }
}

pub(crate) mod serde_matrix {
    use super::{matrix_from_rows, matrix_rows, Matrix};
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Matrix, s: S) -> Result<S::Ok, S::Error> {
        matrix_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        matrix_from_rows(&rows).ok_or_else(|| D::Error::custom("ragged matrix rows"))
    }
}
