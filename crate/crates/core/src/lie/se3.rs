//! Closed-form exponential and logarithm for 3D rigid motions.

use super::so3;
use crate::error::Result;
use crate::matrix::Matrix;

/// V(w) = I + one_minus_cos_over_sq(t) K + theta_minus_sin_over_cube(t) K^2,
/// the 3x3 block coupling algebra translation to group translation.
fn displacement_jacobian(omega: &[f64]) -> Matrix {
    let (x, y, z) = (omega[0], omega[1], omega[2]);
    let theta = (x * x + y * y + z * z).sqrt();
    let b = so3::one_minus_cos_over_sq(theta);
    let c = so3::theta_minus_sin_over_cube(theta);
    let (xx, yy, zz) = (x * x, y * y, z * z);
    let (xy, xz, yz) = (x * y, x * z, y * z);
    Matrix::new(
        3,
        3,
        vec![
            1.0 - c * (yy + zz),
            -b * z + c * xy,
            b * y + c * xz,
            b * z + c * xy,
            1.0 - c * (xx + zz),
            -b * x + c * yz,
            -b * y + c * xz,
            b * x + c * yz,
            1.0 - c * (xx + yy),
        ],
    )
    .expect("constructed in-bounds")
}

pub(crate) fn exp(coords: &[f64]) -> Matrix {
    let v = &coords[0..3];
    let omega = &coords[3..6];
    let r = so3::rotation(omega);
    let jac = displacement_jacobian(omega);
    let mut out = Matrix::identity(4);
    for i in 0..3 {
        for j in 0..3 {
            out.set(i, j, r.get(i, j));
        }
        let t = jac.get(i, 0) * v[0] + jac.get(i, 1) * v[1] + jac.get(i, 2) * v[2];
        out.set(i, 3, t);
    }
    out
}

pub(crate) fn log(m: &Matrix) -> Result<Vec<f64>> {
    let mut r = Matrix::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            r.set(i, j, m.get(i, j));
        }
    }
    let omega = so3::log_rotation(&r)?;
    let jac = displacement_jacobian(&omega);
    let jac_inv = jac.inverse()?;
    let mut v = [0.0; 3];
    for i in 0..3 {
        v[i] = jac_inv.get(i, 0) * m.get(0, 3)
            + jac_inv.get(i, 1) * m.get(1, 3)
            + jac_inv.get(i, 2) * m.get(2, 3);
    }
    Ok(vec![v[0], v[1], v[2], omega[0], omega[1], omega[2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{AlgebraVector, GroupKind};

    #[test]
    fn screw_motion_round_trip() {
        let v = AlgebraVector::new(GroupKind::Se3, vec![0.7, -0.2, 0.4, 0.3, 0.9, -1.1]).unwrap();
        let back = v.exp().log().unwrap();
        for (a, b) in v.coords().iter().zip(back.coords()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_translation_is_affine() {
        let v = AlgebraVector::new(GroupKind::Se3, vec![1.0, 2.0, 3.0, 0.0, 0.0, 0.0]).unwrap();
        let g = v.exp();
        assert_eq!(g.matrix().get(0, 3), 1.0);
        assert_eq!(g.matrix().get(1, 3), 2.0);
        assert_eq!(g.matrix().get(2, 3), 3.0);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_eq!(g.matrix().get(i, j), expected);
            }
        }
    }

    #[test]
    fn displacement_jacobian_matches_series_for_small_angles() {
        // V = sum_k K^k / (k+1)!; check the Taylor branch against a direct
        // series evaluation
        let omega = [3e-5, -1e-5, 2e-5];
        let jac = displacement_jacobian(&omega);
        let k = AlgebraVector::new(GroupKind::So3, omega.to_vec()).unwrap().hat();
        let mut series = Matrix::identity(3);
        let mut term = Matrix::identity(3);
        for n in 1..10 {
            term = term.matmul(&k).unwrap().scale(1.0 / (n as f64 + 1.0));
            series = series.add(&term).unwrap();
        }
        assert!(jac.sub(&series).unwrap().frobenius_norm() < 1e-15);
    }
}
