//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use cusp_geodesics::linalg::vector;
use cusp_geodesics::{CuspConfiguration, CuspGroup, Matrix, Vector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type C = Complex64;
pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `z ↦ (az + b)/(cz + d)`, precomposed with conjugation when `reversing`.
pub fn mobius_boundary(m: &[[C; 2]; 2], reversing: bool, z: C) -> C {
    let z = if reversing { z.conj() } else { z };
    (m[0][0] * z + m[0][1]) / (m[1][0] * z + m[1][1])
}

/// Action on `(z, t) ∈ H³` via the quaternion formula, after scaling the
/// matrix to determinant 1.
pub fn mobius_interior(m: &[[C; 2]; 2], reversing: bool, z: C, t: f64) -> (C, f64) {
    let s = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).sqrt();
    let (a, b, c, d) = (m[0][0] / s, m[0][1] / s, m[1][0] / s, m[1][1] / s);
    let z = if reversing { z.conj() } else { z };
    let den = (c * z + d).norm_sqr() + c.norm_sqr() * t * t;
    let num = (a * z + b) * (c * z + d).conj() + a * c.conj() * t * t;
    (num / den, t / den)
}

/// `2 ln|λ|` for the eigenvalue `|λ| >= 1` of the determinant-1 normalization.
pub fn matrix_translation_length(m: &[[C; 2]; 2]) -> f64 {
    let s = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).sqrt();
    let tr = (m[0][0] + m[1][1]) / s;
    let disc = (tr * tr - 4.0).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    2.0 * l1.norm().max(l2.norm()).ln()
}

/// The matrix of `g_t = t ∘ h2 ∘ h1 ∘ V` for `n = 3`, where `V` is the rotation
/// by `theta` (optionally followed by conjugation), `b = B0 - A0` and `c` the
/// translation part of `t`. Derived by hand:
/// `h2 h1 (z) = b - (b / b̄) / z`.
pub fn gt_matrix(b: C, c: C, theta: f64) -> [[C; 2]; 2] {
    let e = C::from_polar(1.0, theta);
    [[(b + c) * e, -(b / b.conj())], [e, C::new(0.0, 0.0)]]
}

pub fn random_complex<R: Rng>(r: &mut R, scale: f64) -> C {
    C::new(r.gen_range(-scale..scale), r.gen_range(-scale..scale))
}

pub fn rotation(theta: f64) -> Matrix {
    let (c, s) = (theta.cos(), theta.sin());
    Matrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// A random orthogonal `k×k` matrix (QR of a Gaussian-ish matrix).
pub fn random_orthogonal<R: Rng>(r: &mut R, k: usize) -> Matrix {
    let m = Matrix::from_fn(k, k, |_, _| r.gen_range(-1.0..1.0));
    let qr = m.qr();
    let mut q = qr.q();
    if r.gen_bool(0.5) {
        q.column_mut(0).neg_mut();
    }
    q
}

pub fn unit_lattice(k: usize) -> CuspGroup {
    let rows: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    CuspGroup::lattice(&rows).unwrap()
}

pub fn lattice_config(b0: &[f64]) -> CuspConfiguration {
    CuspConfiguration::lattice(unit_lattice(b0.len()), vector(b0), Matrix::identity(b0.len(), b0.len())).unwrap()
}

pub fn glide_config(a0: &[f64], b0: &[f64]) -> CuspConfiguration {
    CuspConfiguration::new(
        CuspGroup::glide(1.0, 1.4).unwrap(),
        vector(a0),
        vector(b0),
        Matrix::identity(2, 2),
    )
    .unwrap()
}

/// A random rank-2 lattice with a moderately skewed basis.
pub fn random_lattice<R: Rng>(r: &mut R) -> CuspGroup {
    loop {
        let rows = vec![
            vec![r.gen_range(0.6..1.5), r.gen_range(-0.4..0.4)],
            vec![r.gen_range(-0.4..0.4), r.gen_range(0.6..1.5)],
        ];
        if let Ok(g) = CuspGroup::lattice(&rows) {
            return g;
        }
    }
}

/// A random configuration of either group type. About a third of them sit on
/// a symmetric position (a zero basis coordinate or a reflection axis) where
/// identifications are expected.
pub fn random_config<R: Rng>(r: &mut R) -> CuspConfiguration {
    let special = r.gen_bool(0.35);
    if r.gen_bool(0.5) {
        let group = random_lattice(r);
        let CuspGroup::Lattice { basis } = &group else { unreachable!() };
        let mut w = [r.gen_range(0.05..0.95), r.gen_range(0.05..0.95)];
        if special {
            w[r.gen_range(0..2)] = 0.0;
        }
        let b0 = basis * vector(&w);
        let v = random_orthogonal(r, 2);
        CuspConfiguration::lattice(group, b0, v).unwrap()
    } else {
        let (alpha, beta) = (r.gen_range(0.6..1.5), r.gen_range(0.6..1.5));
        let group = CuspGroup::glide(alpha, beta).unwrap();
        let a0 = vector(&[0.0, r.gen_range(-beta / 2.0..beta / 2.0)]);
        let mut b0 = vector(&[r.gen_range(0.0..alpha), r.gen_range(-beta / 2.0..beta / 2.0)]);
        if special {
            // Same x, and symmetric about y = 0 when possible.
            b0[0] = 0.0;
            if r.gen_bool(0.5) && a0[1] != 0.0 && -a0[1] < beta / 2.0 {
                b0[1] = -a0[1];
            }
        }
        if (&b0 - &a0).norm() < 0.05 {
            b0[0] = alpha / 2.0;
        }
        let v = random_orthogonal(r, 2);
        CuspConfiguration::new(group, a0, b0, v).unwrap()
    }
}

/// Hyperbolic length of the polygonal path through `pts` by composite
/// Gauss-Legendre quadrature of `|dp| / height` on each straight segment.
pub fn path_length(pts: &[Vector]) -> f64 {
    const NODES: [(f64, f64); 5] = [
        (0.0, 0.568_888_888_888_888_9),
        (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
        (0.906_179_845_938_664, 0.236_926_885_056_189_1),
    ];
    let n = pts[0].len();
    pts.windows(2)
        .map(|w| {
            let d = &w[1] - &w[0];
            let len = d.norm();
            NODES
                .iter()
                .map(|(x, wt)| {
                    let s = 0.5 * (x + 1.0);
                    let h = w[0][n - 1] + s * d[n - 1];
                    0.5 * wt * len / h
                })
                .sum::<f64>()
        })
        .sum()
}

/// Samples the geodesic from `p` to `q` (points of `H^n`) as `k + 1` points.
/// The geodesic through two points lies on the circle orthogonal to the
/// boundary in their vertical plane.
pub fn geodesic_samples(p: &Vector, q: &Vector, k: usize) -> Vec<Vector> {
    let n = p.len();
    let hp = p.rows(0, n - 1).into_owned();
    let hq = q.rows(0, n - 1).into_owned();
    let dh = &hq - &hp;
    let dist = dh.norm();
    if dist < 1e-14 {
        return (0..=k)
            .map(|i| {
                let s = i as f64 / k as f64;
                p + (q - p) * s
            })
            .collect();
    }
    let u = &dh / dist;
    // Center x0 on the line through the feet: |x0 - hp|² + hp_n² = |x0 - hq|² + hq_n².
    let (a, b) = (0.0, dist);
    let x0 = (b * b + q[n - 1].powi(2) - p[n - 1].powi(2) - a * a) / (2.0 * (b - a));
    let r = (x0 * x0 + p[n - 1].powi(2)).sqrt();
    let th_p = p[n - 1].atan2(0.0 - x0);
    let th_q = q[n - 1].atan2(dist - x0);
    (0..=k)
        .map(|i| {
            let th = th_p + (th_q - th_p) * i as f64 / k as f64;
            let mut v = &hp + &u * (x0 + r * th.cos());
            v = v.push(r * th.sin());
            v
        })
        .collect()
}
