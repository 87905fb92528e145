//! Closed-form exponential and logarithm for SL(2,R).
//!
//! A traceless 2x2 matrix A satisfies A^2 = -det(A) I, so the exponential
//! collapses to scalar coefficient functions: cos/sin when det(A) > 0
//! (rotation-like), cosh/sinh when det(A) < 0 (scaling-like), and I + A in
//! the nilpotent shear case. The logarithm inverts this through the trace,
//! which equals 2cos(theta) / 2cosh(s) on the two branches.

use super::TRACE_MARGIN;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Switch to the unified Taylor branch once |det| is below this; matches a
/// rotation/scaling parameter of about 1e-4.
const SMALL_DET: f64 = 1e-8;

pub(crate) fn exp(coords: &[f64]) -> Matrix {
    let (a, b, c) = (coords[0], coords[1], coords[2]);
    // u = -det(hat(v)) = a^2 + bc
    let u = a * a + b * c;
    let (even, odd) = if u > SMALL_DET {
        let s = u.sqrt();
        (s.cosh(), s.sinh() / s)
    } else if u < -SMALL_DET {
        let theta = (-u).sqrt();
        (theta.cos(), theta.sin() / theta)
    } else {
        // cosh(sqrt(u)) and sinh(sqrt(u))/sqrt(u) continue analytically
        // through u = 0
        (1.0 + u / 2.0 + u * u / 24.0, 1.0 + u / 6.0 + u * u / 120.0)
    };
    Matrix::new(
        2,
        2,
        vec![even + odd * a, odd * b, odd * c, even - odd * a],
    )
    .expect("constructed in-bounds")
}

pub(crate) fn log(m: &Matrix) -> Result<Vec<f64>> {
    let trace = m.get(0, 0) + m.get(1, 1);
    if trace <= -2.0 + TRACE_MARGIN {
        return Err(Error::BranchCut(format!(
            "sl2r trace {trace:.9} is at or below -2 + {TRACE_MARGIN:.0e}; \
             the elliptic branch only covers |theta| < pi"
        )));
    }
    let half_trace = trace / 2.0;
    // traceless part; the scalar factor below maps it back to the algebra
    let m00 = (m.get(0, 0) - m.get(1, 1)) / 2.0;
    let w = half_trace - 1.0;
    let factor = if w.abs() < SMALL_DET {
        // s/sinh(s) expanded around s = 0 in terms of w = cosh(s) - 1
        1.0 - w / 3.0 + 2.0 * w * w / 15.0
    } else if half_trace > 1.0 {
        let s = half_trace.acosh();
        s / (half_trace * half_trace - 1.0).sqrt()
    } else {
        let theta = half_trace.acos();
        theta / (1.0 - half_trace * half_trace).sqrt()
    };
    Ok(vec![factor * m00, factor * m.get(0, 1), factor * m.get(1, 0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{AlgebraVector, GroupKind};

    fn vector(coords: [f64; 3]) -> AlgebraVector {
        AlgebraVector::new(GroupKind::Sl2r, coords.to_vec()).unwrap()
    }

    #[test]
    fn hyperbolic_generator_exponentiates_to_diagonal() {
        // hat([1,0,0]) = diag(1,-1)
        let g = vector([1.0, 0.0, 0.0]).exp();
        assert!((g.matrix().get(0, 0) - 1.0f64.exp()).abs() < 1e-15);
        assert!((g.matrix().get(1, 1) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(g.matrix().get(0, 1), 0.0);
        assert_eq!(g.matrix().get(1, 0), 0.0);
    }

    #[test]
    fn elliptic_generator_exponentiates_to_rotation() {
        // hat([0,t,-t]) generates rotations by angle t
        let t = 0.8;
        let g = vector([0.0, t, -t]).exp();
        assert!((g.matrix().get(0, 0) - t.cos()).abs() < 1e-15);
        assert!((g.matrix().get(0, 1) - t.sin()).abs() < 1e-15);
    }

    #[test]
    fn shear_generator_is_nilpotent() {
        let g = vector([0.0, 1.5, 0.0]).exp();
        assert_eq!(g.matrix().as_slice(), &[1.0, 1.5, 0.0, 1.0]);
        let back = g.log().unwrap();
        assert_eq!(back.coords(), &[0.0, 1.5, 0.0]);
    }

    #[test]
    fn round_trip_covers_all_three_branches() {
        for coords in [
            [0.9, 0.2, 0.1],   // hyperbolic
            [0.1, 0.7, -0.9],  // elliptic
            [0.3, 0.6, -0.15], // near-parabolic (det = 0)
            [1e-6, 2e-6, 1e-6],
        ] {
            let v = vector(coords);
            let back = v.exp().log().unwrap();
            for (a, b) in v.coords().iter().zip(back.coords()) {
                assert!((a - b).abs() < 1e-12, "coords {coords:?}");
            }
        }
    }

    #[test]
    fn trace_at_minus_two_is_rejected() {
        // a rotation by pi has trace exactly -2
        let v = vector([0.0, std::f64::consts::PI, -std::f64::consts::PI]);
        assert!(matches!(v.exp().log(), Err(Error::BranchCut(_))));
    }
}
