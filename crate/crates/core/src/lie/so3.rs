//! Closed-form exponential and logarithm for 3D rotations.

use super::{ANGLE_MARGIN, SMALL_ANGLE};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// sin(t)/t with a fourth-order Taylor branch near zero.
pub(crate) fn sinc(theta: f64) -> f64 {
    if theta.abs() < SMALL_ANGLE {
        let t2 = theta * theta;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        theta.sin() / theta
    }
}

/// (1 - cos(t))/t^2 with a fourth-order Taylor branch near zero.
pub(crate) fn one_minus_cos_over_sq(theta: f64) -> f64 {
    if theta.abs() < SMALL_ANGLE {
        let t2 = theta * theta;
        0.5 - t2 / 24.0 + t2 * t2 / 720.0
    } else {
        (1.0 - theta.cos()) / (theta * theta)
    }
}

/// (t - sin(t))/t^3 with a fourth-order Taylor branch near zero.
pub(crate) fn theta_minus_sin_over_cube(theta: f64) -> f64 {
    if theta.abs() < SMALL_ANGLE {
        let t2 = theta * theta;
        1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0
    } else {
        (theta - theta.sin()) / (theta * theta * theta)
    }
}

/// Rodrigues formula: R = I + sinc(t) K + one_minus_cos_over_sq(t) K^2.
pub(crate) fn rotation(omega: &[f64]) -> Matrix {
    let (x, y, z) = (omega[0], omega[1], omega[2]);
    let theta = (x * x + y * y + z * z).sqrt();
    let a = sinc(theta);
    let b = one_minus_cos_over_sq(theta);
    // K and K^2 written out entrywise
    let (xx, yy, zz) = (x * x, y * y, z * z);
    let (xy, xz, yz) = (x * y, x * z, y * z);
    Matrix::new(
        3,
        3,
        vec![
            1.0 - b * (yy + zz),
            -a * z + b * xy,
            a * y + b * xz,
            a * z + b * xy,
            1.0 - b * (xx + zz),
            -a * x + b * yz,
            -a * y + b * xz,
            a * x + b * yz,
            1.0 - b * (xx + yy),
        ],
    )
    .expect("constructed in-bounds")
}

pub(crate) fn exp(coords: &[f64]) -> Matrix {
    rotation(coords)
}

/// Rotation-vector logarithm of a 3x3 rotation matrix.
///
/// The angle comes from atan2 of the skew part's magnitude against the
/// trace, which stays well-conditioned everywhere the branch cut allows.
pub(crate) fn log_rotation(r: &Matrix) -> Result<[f64; 3]> {
    // half the skew-symmetric part; its norm is sin(theta)
    let sx = 0.5 * (r.get(2, 1) - r.get(1, 2));
    let sy = 0.5 * (r.get(0, 2) - r.get(2, 0));
    let sz = 0.5 * (r.get(1, 0) - r.get(0, 1));
    let sin_theta = (sx * sx + sy * sy + sz * sz).sqrt();
    let cos_theta = 0.5 * (r.trace() - 1.0);
    let theta = sin_theta.atan2(cos_theta);
    if theta >= std::f64::consts::PI - ANGLE_MARGIN {
        return Err(Error::BranchCut(format!(
            "rotation angle {theta:.9} is within {ANGLE_MARGIN:.0e} of pi; \
             the logarithm branch is ambiguous there"
        )));
    }
    // omega = theta / sin(theta) * s
    let factor = if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0
    } else {
        theta / sin_theta
    };
    Ok([factor * sx, factor * sy, factor * sz])
}

pub(crate) fn log(m: &Matrix) -> Result<Vec<f64>> {
    log_rotation(m).map(|w| w.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{AlgebraVector, GroupKind};

    #[test]
    fn quarter_turn_about_z() {
        let v = AlgebraVector::new(GroupKind::So3, vec![0.0, 0.0, std::f64::consts::FRAC_PI_2])
            .unwrap();
        let r = v.exp();
        let expected =
            Matrix::new(3, 3, vec![0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(r.matrix().sub(&expected).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn half_turn_hits_branch_cut() {
        let v = AlgebraVector::new(GroupKind::So3, vec![0.0, 0.0, std::f64::consts::PI]).unwrap();
        assert!(matches!(v.exp().log(), Err(Error::BranchCut(_))));
    }

    #[test]
    fn tiny_angles_round_trip_through_taylor_branch() {
        for scale in [1e-5, 1e-7, 1e-9] {
            let v = AlgebraVector::new(GroupKind::So3, vec![scale, -2.0 * scale, 0.5 * scale])
                .unwrap();
            let back = v.exp().log().unwrap();
            for (a, b) in v.coords().iter().zip(back.coords()) {
                assert!((a - b).abs() < 1e-16 + scale * 1e-12);
            }
        }
    }

    #[test]
    fn angle_just_below_margin_still_logs() {
        let theta = std::f64::consts::PI - 1e-5;
        let v = AlgebraVector::new(GroupKind::So3, vec![0.0, theta, 0.0]).unwrap();
        let back = v.exp().log().unwrap();
        assert!((back.coords()[1] - theta).abs() < 1e-8);
    }
}
