//! Closed-form exponential and logarithm for planar rigid motions.

use super::{so3, ANGLE_MARGIN};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// V(w) maps algebra translation coordinates to the group translation:
/// V = [[sin w / w, -(1-cos w)/w], [(1-cos w)/w, sin w / w]].
fn displacement_jacobian(w: f64) -> (f64, f64) {
    let a = so3::sinc(w);
    let b = so3::one_minus_cos_over_sq(w) * w;
    (a, b)
}

pub(crate) fn exp(coords: &[f64]) -> Matrix {
    let (vx, vy, w) = (coords[0], coords[1], coords[2]);
    let (c, s) = (w.cos(), w.sin());
    let (a, b) = displacement_jacobian(w);
    let tx = a * vx - b * vy;
    let ty = b * vx + a * vy;
    Matrix::new(3, 3, vec![c, -s, tx, s, c, ty, 0.0, 0.0, 1.0]).expect("constructed in-bounds")
}

pub(crate) fn log(m: &Matrix) -> Result<Vec<f64>> {
    let w = m.get(1, 0).atan2(m.get(0, 0));
    if w.abs() >= std::f64::consts::PI - ANGLE_MARGIN {
        return Err(Error::BranchCut(format!(
            "se2 rotation angle {w:.9} is within {ANGLE_MARGIN:.0e} of pi"
        )));
    }
    let (a, b) = displacement_jacobian(w);
    // solve V v = t with the exact 2x2 inverse; det V = a^2 + b^2 > 0 below pi
    let det = a * a + b * b;
    let (tx, ty) = (m.get(0, 2), m.get(1, 2));
    let vx = (a * tx + b * ty) / det;
    let vy = (-b * tx + a * ty) / det;
    Ok(vec![vx, vy, w])
}
