//! Conjugating a pair of tangent horoballs into standard position:
//! `H∞ = {x_n >= 1}`, `H0` the ball of diameter 1 on the origin, tangency at
//! `A0 = (0, .., 0, 1)`.

use crate::axis::CuspConfiguration;
use crate::cusp_group::CuspGroup;
use crate::error::{Error, Result};
use crate::halfspace::{chordal_distance, BoundaryPoint, Horoball, InteriorPoint};
use crate::isometry::{IsometryWord, Primitive};
use crate::linalg::{nearest_orthogonal, orthogonality_residual, Matrix, Vector};

const TOL: f64 = 1e-9;

fn invalid(msg: impl Into<String>) -> Error {
    Error::ConfigurationInvalid(msg.into())
}

/// The conjugator `φ` sending `ball2` to `{x_n >= 1}`, `ball1` to the unit
/// ball on the origin and their tangency point to `A0`.
fn standardizing_map(ball1: &Horoball, ball2: &Horoball, dim: usize) -> Result<IsometryWord> {
    let pre = match ball2 {
        Horoball::HalfSpace { .. } => IsometryWord::identity(dim),
        Horoball::Ball { base, .. } => {
            IsometryWord::from_primitive(Primitive::inversion(base.clone(), 1.0)?)
        }
    };
    let top = pre.apply_horoball(ball2);
    let low = pre.apply_horoball(ball1);
    let (Horoball::HalfSpace { height }, Horoball::Ball { base, .. }) = (&top, &low) else {
        return Err(invalid("horoballs share their center"));
    };
    let scale = 1.0 / height;
    let fit = Primitive::similarity(scale, Matrix::identity(dim, dim), -base * scale)?;
    IsometryWord::from_primitive(fit).compose(&pre)
}

/// Brings raw cusp data into standard position.
///
/// * `g` must map `ball1` onto `ball2`;
/// * `basepoint_image` is the claimed image under `g` of the tangency point;
/// * `group` and `a0` describe the stabilizer of `ball2` in the normalized
///   boundary chart, with `a0` the position of `A0` in the group's coordinates.
///
/// If `g(A0)` lands outside the fundamental domain, `g` is replaced by `t ∘ g`
/// for the reducing stabilizer element `t`.
pub fn normalize_configuration(
    ball1: &Horoball,
    ball2: &Horoball,
    g: &IsometryWord,
    basepoint_image: &InteriorPoint,
    group: &CuspGroup,
    a0: &Vector,
) -> Result<(IsometryWord, CuspConfiguration)> {
    let dim = g.dim();
    if group.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: group.dim(),
        });
    }
    let tangency = ball1
        .tangency(ball2, TOL)
        .ok_or_else(|| invalid("horoballs are not tangent"))?;
    if !g.apply_horoball(ball1).approx_eq(ball2, TOL) {
        return Err(invalid("g does not map the first horoball onto the second"));
    }
    let image = g.apply_interior(&tangency);
    if image.euclidean_distance(basepoint_image) > TOL * (1.0 + image.height()) {
        return Err(invalid("g does not send the tangency point to the given base point image"));
    }

    let phi = standardizing_map(ball1, ball2, dim)?;
    let a0_point = InteriorPoint::new(Vector::zeros(dim), 1.0)?;
    let check_ball = |b: &Horoball, target: Horoball, what: &str| {
        if phi.apply_horoball(b).approx_eq(&target, TOL) {
            Ok(())
        } else {
            Err(invalid(format!("normalization failed to standardize {what}")))
        }
    };
    check_ball(ball2, Horoball::half_space(1.0)?, "the cusp horoball")?;
    check_ball(ball1, Horoball::ball(Vector::zeros(dim), 1.0)?, "the tangent horoball")?;
    if phi.apply_interior(&tangency).euclidean_distance(&a0_point) > TOL {
        return Err(invalid("normalization failed to move the tangency point to A0"));
    }

    // g' = φ g φ⁻¹ in standard position.
    let mut conj = phi.compose(g)?.compose(&phi.invert())?;
    let b_img = conj.apply_interior(&a0_point);
    if (b_img.height() - 1.0).abs() > TOL {
        return Err(invalid("g does not carry A0 onto the cusp horosphere"));
    }
    let b0_group = b_img.horizontal() + a0;
    let (b0, t) = group.reduce_to_fundamental_domain(&b0_group)?;
    if !t.is_identity() {
        let shift = group.element_action(&t)?.recentered(a0).to_primitive();
        conj = IsometryWord::from_primitive(shift).compose(&conj)?;
    }
    let b = &b0 - a0;
    if b.norm() < 1e-12 {
        return Err(Error::BaseAtOrigin);
    }

    // V = h⁻¹ g' fixes 0 and ∞ and preserves heights: a linear orthogonal map
    // of the boundary.
    let h = IsometryWord::from_primitives(
        dim,
        vec![
            Primitive::bisector_reflection(&b)?,
            Primitive::unit_inversion(dim),
        ],
    )?;
    let v_word = h.invert().compose(&conj)?;
    if chordal_distance(&v_word.apply_boundary(&BoundaryPoint::Infinity), &BoundaryPoint::Infinity) > TOL {
        return Err(invalid("h⁻¹ g does not fix ∞"));
    }
    let origin = v_word.apply_boundary(&BoundaryPoint::Finite(Vector::zeros(dim)));
    if origin.as_finite().map_or(true, |o| o.norm() > TOL) {
        return Err(invalid("h⁻¹ g does not fix A0"));
    }
    let mut q = Matrix::zeros(dim, dim);
    for i in 0..dim {
        let e = BoundaryPoint::Finite(Vector::from_fn(dim, |j, _| if i == j { 1.0 } else { 0.0 }));
        let col = v_word
            .apply_boundary(&e)
            .as_finite()
            .cloned()
            .ok_or_else(|| invalid("h⁻¹ g sends a basis vector to ∞"))?;
        q.set_column(i, &col);
    }
    let residual = orthogonality_residual(&q);
    if residual > TOL {
        return Err(invalid(format!(
            "h⁻¹ g is not orthogonal on the boundary (residual {residual:e})"
        )));
    }
    let cfg = CuspConfiguration::new(group.clone(), a0.clone(), b0, nearest_orthogonal(&q))?;
    Ok((phi, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axis::build_gt;
    use crate::linalg::vector;

    fn lattice() -> CuspGroup {
        CuspGroup::lattice(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    fn rotation(theta: f64) -> Matrix {
        let (c, s) = (theta.cos(), theta.sin());
        Matrix::from_row_slice(2, 2, &[c, -s, s, c])
    }

    fn standard_g0(b0: &[f64], v: Matrix) -> (CuspConfiguration, IsometryWord) {
        let cfg = CuspConfiguration::lattice(lattice(), vector(b0), v).unwrap();
        let g0 = build_gt(&cfg, &lattice().identity()).unwrap();
        (cfg, g0)
    }

    #[test]
    fn standard_input_needs_no_conjugation() {
        let (expected, g0) = standard_g0(&[0.3, 0.4], rotation(0.7));
        let h0 = Horoball::ball(Vector::zeros(2), 1.0).unwrap();
        let hinf = Horoball::half_space(1.0).unwrap();
        let b = InteriorPoint::from_coords(&[0.3, 0.4, 1.0]).unwrap();
        let (phi, cfg) = normalize_configuration(&h0, &hinf, &g0, &b, &lattice(), &Vector::zeros(2)).unwrap();
        assert!(phi.primitives().iter().all(|p| match p {
            Primitive::Similarity {
                scale,
                rotation,
                translation,
            } => *scale == 1.0 && *rotation == Matrix::identity(2, 2) && translation.norm() == 0.0,
            _ => false,
        }));
        assert!((cfg.b0() - expected.b0()).amax() < 1e-12);
        assert!((cfg.v() - expected.v()).amax() < 1e-9);
    }

    #[test]
    fn scaled_configuration_uses_a_dilation() {
        let (expected, g0) = standard_g0(&[0.3, 0.4], Matrix::identity(2, 2));
        let d = IsometryWord::from_primitive(Primitive::dilation(2, 2.0).unwrap());
        let g = d.compose(&g0).unwrap().compose(&d.invert()).unwrap();
        let ball1 = Horoball::ball(Vector::zeros(2), 2.0).unwrap();
        let ball2 = Horoball::half_space(2.0).unwrap();
        let b = InteriorPoint::from_coords(&[0.6, 0.8, 2.0]).unwrap();
        let (phi, cfg) = normalize_configuration(&ball1, &ball2, &g, &b, &lattice(), &Vector::zeros(2)).unwrap();
        let p = InteriorPoint::from_coords(&[1.0, -2.0, 3.0]).unwrap();
        let img = phi.apply_interior(&p);
        assert!((img.horizontal() - vector(&[0.5, -1.0])).amax() < 1e-15);
        assert!((img.height() - 1.5).abs() < 1e-15);
        assert!((cfg.b0() - expected.b0()).amax() < 1e-12);
    }

    #[test]
    fn shifted_configuration_uses_a_translation() {
        let (_, g0) = standard_g0(&[0.3, 0.4], Matrix::identity(2, 2));
        let t = IsometryWord::from_primitive(Primitive::translation(vector(&[3.0, 0.0])));
        let g = t.compose(&g0).unwrap().compose(&t.invert()).unwrap();
        let ball1 = Horoball::ball(vector(&[3.0, 0.0]), 1.0).unwrap();
        let ball2 = Horoball::half_space(1.0).unwrap();
        let b = InteriorPoint::from_coords(&[3.3, 0.4, 1.0]).unwrap();
        let (phi, cfg) = normalize_configuration(&ball1, &ball2, &g, &b, &lattice(), &Vector::zeros(2)).unwrap();
        let moved = phi.apply_boundary(&BoundaryPoint::finite(&[3.0, 0.0]));
        assert!(moved.as_finite().unwrap().norm() < 1e-15);
        assert!((cfg.b0() - vector(&[0.3, 0.4])).amax() < 1e-12);
    }

    #[test]
    fn ball_cusp_goes_through_an_inversion() {
        // Swap the roles: the cusp horoball is a Euclidean ball.
        let (expected, g0) = standard_g0(&[0.3, 0.4], rotation(-0.4));
        let inv = IsometryWord::from_primitive(Primitive::inversion(vector(&[5.0, 1.0]), 2.0).unwrap());
        let g = inv.compose(&g0).unwrap().compose(&inv).unwrap();
        let ball1 = inv.apply_horoball(&Horoball::ball(Vector::zeros(2), 1.0).unwrap());
        let ball2 = inv.apply_horoball(&Horoball::half_space(1.0).unwrap());
        let a0 = InteriorPoint::from_coords(&[0.0, 0.0, 1.0]).unwrap();
        let b = g.apply_interior(&inv.apply_interior(&a0));
        let (_, cfg) = normalize_configuration(&ball1, &ball2, &g, &b, &lattice(), &Vector::zeros(2)).unwrap();
        // The chart is fixed only up to a rotation, which also conjugates V.
        assert!((cfg.b0().norm() - expected.b0().norm()).abs() < 1e-9);
    }

    #[test]
    fn reduces_b0_into_the_domain() {
        let (_, g0) = standard_g0(&[0.3, 0.4], Matrix::identity(2, 2));
        let t = IsometryWord::from_primitive(Primitive::translation(vector(&[1.0, 0.0])));
        let g = t.compose(&g0).unwrap();
        let h0 = Horoball::ball(Vector::zeros(2), 1.0).unwrap();
        let hinf = Horoball::half_space(1.0).unwrap();
        let b = InteriorPoint::from_coords(&[1.3, 0.4, 1.0]).unwrap();
        let (_, cfg) = normalize_configuration(&h0, &hinf, &g, &b, &lattice(), &Vector::zeros(2)).unwrap();
        assert!((cfg.b0() - vector(&[0.3, 0.4])).amax() < 1e-12);
        assert!((cfg.v() - Matrix::identity(2, 2)).amax() < 1e-9);
    }

    #[test]
    fn rejects_invalid_input() {
        let (_, g0) = standard_g0(&[0.3, 0.4], Matrix::identity(2, 2));
        let hinf = Horoball::half_space(1.0).unwrap();
        let b = InteriorPoint::from_coords(&[0.3, 0.4, 1.0]).unwrap();
        let far = Horoball::ball(Vector::zeros(2), 0.5).unwrap();
        assert!(matches!(
            normalize_configuration(&far, &hinf, &g0, &b, &lattice(), &Vector::zeros(2)),
            Err(Error::ConfigurationInvalid(_))
        ));
        let h0 = Horoball::ball(Vector::zeros(2), 1.0).unwrap();
        let wrong = IsometryWord::identity(2);
        assert!(matches!(
            normalize_configuration(&h0, &hinf, &wrong, &b, &lattice(), &Vector::zeros(2)),
            Err(Error::ConfigurationInvalid(_))
        ));
    }
}
