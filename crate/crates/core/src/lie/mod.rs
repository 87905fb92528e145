//! The four matrix Lie groups the crate works on, with fixed basis
//! conventions, hat/vee maps, closed-form exponential and logarithm, and
//! membership validation.
//!
//! # Basis conventions
//!
//! Coordinates are ordered so serialization and feature flattening are
//! unambiguous:
//!
//! - `so3`: `[wx, wy, wz]`, hat is the standard skew map.
//! - `se2`: `[vx, vy, w]` (translation first).
//! - `se3`: `[vx, vy, vz, wx, wy, wz]` (translation first).
//! - `sl2r`: coefficients on `E1 = [[1,0],[0,-1]]`, `E2 = [[0,1],[0,0]]`,
//!   `E3 = [[0,0],[1,0]]`, i.e. `hat([a,b,c]) = [[a,b],[c,-a]]`.
//!
//! SE(2)/SE(3) elements are homogeneous matrices (3x3 / 4x4) with an exact
//! `(0,...,0,1)` bottom row.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

mod se2;
mod se3;
mod sl2r;
mod so3;

/// Rotation-block orthogonality / unit-determinant tolerance for membership.
pub const MEMBERSHIP_TOL: f64 = 1e-8;
/// Structural tolerance when reading coordinates off an algebra matrix.
pub const ALGEBRA_TOL: f64 = 1e-8;
/// Rotation angles must stay this far below pi for the logarithm.
pub const ANGLE_MARGIN: f64 = 1e-6;
/// SL(2,R) logarithms require trace > -2 + this margin.
pub const TRACE_MARGIN: f64 = 1e-9;
/// Below this angle the exp/log coefficient functions switch to their
/// fourth-order Taylor expansions.
pub(crate) const SMALL_ANGLE: f64 = 1e-4;
/// |det| threshold separating the three SL(2,R) generator regimes.
pub const REGIME_TOL: f64 = 1e-9;
/// Drift above this triggers pose renormalization.
pub const DRIFT_TOL: f64 = 1e-9;

/// Which group a value lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Se2,
    Se3,
    So3,
    Sl2r,
}

impl GroupKind {
    pub const ALL: [GroupKind; 4] = [GroupKind::Se2, GroupKind::Se3, GroupKind::So3, GroupKind::Sl2r];

    /// Size of the ambient square matrix representation.
    pub fn ambient_dim(self) -> usize {
        match self {
            GroupKind::Se2 => 3,
            GroupKind::Se3 => 4,
            GroupKind::So3 => 3,
            GroupKind::Sl2r => 2,
        }
    }

    /// Dimension of the Lie algebra (coordinate vector length).
    pub fn algebra_dim(self) -> usize {
        match self {
            GroupKind::Se2 => 3,
            GroupKind::Se3 => 6,
            GroupKind::So3 => 3,
            GroupKind::Sl2r => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GroupKind::Se2 => "se2",
            GroupKind::Se3 => "se3",
            GroupKind::So3 => "so3",
            GroupKind::Sl2r => "sl2r",
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "se2" => Ok(GroupKind::Se2),
            "se3" => Ok(GroupKind::Se3),
            "so3" => Ok(GroupKind::So3),
            "sl2r" => Ok(GroupKind::Sl2r),
            other => Err(Error::InvalidConfig(format!(
                "unknown group '{other}' (expected se2|se3|so3|sl2r)"
            ))),
        }
    }
}

/// Dynamical regime of an SL(2,R) generator, classified by the sign of the
/// determinant of its algebra matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Elliptic,
    Hyperbolic,
    Parabolic,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Elliptic => "elliptic",
            Regime::Hyperbolic => "hyperbolic",
            Regime::Parabolic => "parabolic",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Coordinates of a Lie algebra element in the fixed basis of its group.
///
/// Interpreted as a generator it has units of 1/s; interpreted as a per-step
/// increment it is dimensionless.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraVector {
    kind: GroupKind,
    coords: Vec<f64>,
}

impl AlgebraVector {
    pub fn new(kind: GroupKind, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != kind.algebra_dim() {
            return Err(Error::DimMismatch(format!(
                "{kind} algebra vector needs {} coordinates, got {}",
                kind.algebra_dim(),
                coords.len()
            )));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("{kind} algebra coordinate")));
        }
        Ok(AlgebraVector { kind, coords })
    }

    pub fn zero(kind: GroupKind) -> Self {
        AlgebraVector {
            kind,
            coords: vec![0.0; kind.algebra_dim()],
        }
    }

    #[inline]
    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: f64) -> AlgebraVector {
        AlgebraVector {
            kind: self.kind,
            coords: self.coords.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &AlgebraVector) -> Result<AlgebraVector> {
        if self.kind != other.kind {
            return Err(Error::KindMismatch {
                expected: self.kind,
                actual: other.kind,
            });
        }
        Ok(AlgebraVector {
            kind: self.kind,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Hat map: coordinates to the algebra matrix. Linear, exact.
    pub fn hat(&self) -> Matrix {
        let c = &self.coords;
        match self.kind {
            GroupKind::So3 => skew3(c[0], c[1], c[2]),
            GroupKind::Se2 => Matrix::new(
                3,
                3,
                vec![0.0, -c[2], c[0], c[2], 0.0, c[1], 0.0, 0.0, 0.0],
            )
            .expect("constructed in-bounds"),
            GroupKind::Se3 => Matrix::new(
                4,
                4,
                vec![
                    0.0, -c[5], c[4], c[0], //
                    c[5], 0.0, -c[3], c[1], //
                    -c[4], c[3], 0.0, c[2], //
                    0.0, 0.0, 0.0, 0.0,
                ],
            )
            .expect("constructed in-bounds"),
            GroupKind::Sl2r => Matrix::new(2, 2, vec![c[0], c[1], c[2], -c[0]])
                .expect("constructed in-bounds"),
        }
    }

    /// Vee map: algebra matrix back to coordinates. Rejects matrices whose
    /// structure (skew block, zero row, tracelessness) is violated beyond
    /// [`ALGEBRA_TOL`]; within tolerance, `vee(hat(v)) == v` exactly because
    /// entries are read directly.
    pub fn vee(kind: GroupKind, m: &Matrix) -> Result<AlgebraVector> {
        let n = kind.ambient_dim();
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimMismatch(format!(
                "{kind} algebra matrix must be {n}x{n}, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let check = |ok: bool, detail: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::NotInAlgebra {
                    kind,
                    detail: detail.to_string(),
                })
            }
        };
        let coords = match kind {
            GroupKind::So3 => {
                check(skew_defect3(m, 0) <= ALGEBRA_TOL, "matrix is not skew-symmetric")?;
                vec![m.get(2, 1), m.get(0, 2), m.get(1, 0)]
            }
            GroupKind::Se2 => {
                check(
                    m.get(0, 0).abs() <= ALGEBRA_TOL
                        && m.get(1, 1).abs() <= ALGEBRA_TOL
                        && (m.get(0, 1) + m.get(1, 0)).abs() <= ALGEBRA_TOL,
                    "rotation block is not skew-symmetric",
                )?;
                check(
                    m.get(2, 0).abs() <= ALGEBRA_TOL
                        && m.get(2, 1).abs() <= ALGEBRA_TOL
                        && m.get(2, 2).abs() <= ALGEBRA_TOL,
                    "bottom row is not zero",
                )?;
                vec![m.get(0, 2), m.get(1, 2), m.get(1, 0)]
            }
            GroupKind::Se3 => {
                check(skew_defect3(m, 0) <= ALGEBRA_TOL, "rotation block is not skew-symmetric")?;
                check(
                    (0..4).all(|j| m.get(3, j).abs() <= ALGEBRA_TOL),
                    "bottom row is not zero",
                )?;
                vec![
                    m.get(0, 3),
                    m.get(1, 3),
                    m.get(2, 3),
                    m.get(2, 1),
                    m.get(0, 2),
                    m.get(1, 0),
                ]
            }
            GroupKind::Sl2r => {
                check(
                    (m.get(0, 0) + m.get(1, 1)).abs() <= ALGEBRA_TOL,
                    "matrix is not traceless",
                )?;
                vec![m.get(0, 0), m.get(0, 1), m.get(1, 0)]
            }
        };
        AlgebraVector::new(kind, coords)
    }

    /// Group exponential in closed form.
    ///
    /// Agrees with the truncated power series of the hat matrix to well below
    /// 1e-9 for coordinate norms up to 5; small rotation angles use Taylor
    /// branches instead of the exact trigonometric coefficients.
    pub fn exp(&self) -> GroupElement {
        let m = match self.kind {
            GroupKind::So3 => so3::exp(&self.coords),
            GroupKind::Se2 => se2::exp(&self.coords),
            GroupKind::Se3 => se3::exp(&self.coords),
            GroupKind::Sl2r => sl2r::exp(&self.coords),
        };
        GroupElement::new(self.kind, m).expect("closed-form exponential lands on the group")
    }

    /// Regime classification for SL(2,R) generators: the sign of
    /// `det(hat(v))` separates rotation-like, scaling-like and shear-like
    /// flows (tolerance [`REGIME_TOL`]).
    pub fn regime(&self) -> Result<Regime> {
        if self.kind != GroupKind::Sl2r {
            return Err(Error::KindMismatch {
                expected: GroupKind::Sl2r,
                actual: self.kind,
            });
        }
        Ok(regime_of_det(self.algebra_det()))
    }

    /// det(hat(v)); only meaningful for sl2r where it is -(a^2 + b c).
    pub fn algebra_det(&self) -> f64 {
        let c = &self.coords;
        -(c[0] * c[0] + c[1] * c[2])
    }
}

pub(crate) fn regime_of_det(det: f64) -> Regime {
    if det > REGIME_TOL {
        Regime::Elliptic
    } else if det < -REGIME_TOL {
        Regime::Hyperbolic
    } else {
        Regime::Parabolic
    }
}

fn skew3(x: f64, y: f64, z: f64) -> Matrix {
    Matrix::new(3, 3, vec![0.0, -z, y, z, 0.0, -x, -y, x, 0.0]).expect("constructed in-bounds")
}

/// Max deviation of the leading 3x3 block from skew symmetry.
fn skew_defect3(m: &Matrix, offset: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        worst = worst.max(m.get(offset + i, offset + i).abs());
        for j in (i + 1)..3 {
            worst = worst.max((m.get(offset + i, offset + j) + m.get(offset + j, offset + i)).abs());
        }
    }
    worst
}

/// An n x n matrix validated to lie on a specific group manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    kind: GroupKind,
    matrix: Matrix,
}

impl GroupElement {
    /// Validates membership: homogeneous bottom row, rotation-block
    /// orthogonality with positive determinant, or unit determinant,
    /// depending on the group.
    pub fn new(kind: GroupKind, matrix: Matrix) -> Result<Self> {
        let n = kind.ambient_dim();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::InvalidElement(format!(
                "{kind} element must be {n}x{n}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let g = GroupElement { kind, matrix };
        g.validate()?;
        Ok(g)
    }

    pub fn identity(kind: GroupKind) -> Self {
        GroupElement {
            kind,
            matrix: Matrix::identity(kind.ambient_dim()),
        }
    }

    #[inline]
    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        match self.kind {
            GroupKind::So3 => {
                let defect = orthogonality_defect(m, 3);
                if defect >= MEMBERSHIP_TOL {
                    return Err(Error::InvalidElement(format!(
                        "so3 rotation is not orthogonal (defect {defect:.3e})"
                    )));
                }
                let det = m.det()?;
                if (det - 1.0).abs() >= MEMBERSHIP_TOL {
                    return Err(Error::InvalidElement(format!(
                        "so3 determinant {det} is not 1"
                    )));
                }
            }
            GroupKind::Se2 | GroupKind::Se3 => {
                let n = self.kind.ambient_dim();
                let row_ok = (0..n - 1).all(|j| m.get(n - 1, j).abs() <= 1e-12)
                    && (m.get(n - 1, n - 1) - 1.0).abs() <= 1e-12;
                if !row_ok {
                    return Err(Error::InvalidElement(format!(
                        "{} bottom row is not (0,...,0,1)",
                        self.kind
                    )));
                }
                let defect = orthogonality_defect(m, n - 1);
                if defect >= MEMBERSHIP_TOL {
                    return Err(Error::InvalidElement(format!(
                        "{} rotation block is not orthogonal (defect {defect:.3e})",
                        self.kind
                    )));
                }
                if rotation_det(m, n - 1) <= 0.0 {
                    return Err(Error::InvalidElement(format!(
                        "{} rotation block has non-positive determinant",
                        self.kind
                    )));
                }
            }
            GroupKind::Sl2r => {
                let det = m.det()?;
                if (det - 1.0).abs() >= MEMBERSHIP_TOL {
                    return Err(Error::InvalidElement(format!(
                        "sl2r determinant {det} is not 1"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Group multiplication `self * other`; membership is re-validated.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.kind != other.kind {
            return Err(Error::KindMismatch {
                expected: self.kind,
                actual: other.kind,
            });
        }
        GroupElement::new(self.kind, self.matrix.matmul(&other.matrix)?)
    }

    /// Exact matrix inverse (cofactor / homogeneous block formula).
    pub fn inverse(&self) -> Result<GroupElement> {
        GroupElement::new(self.kind, self.matrix.inverse()?)
    }

    /// Group logarithm, defined inside the injectivity region: rotation
    /// angles below pi - [`ANGLE_MARGIN`], SL(2,R) traces above
    /// -2 + [`TRACE_MARGIN`]. Outside it the branch cut is reported as an
    /// error rather than resolved arbitrarily.
    pub fn log(&self) -> Result<AlgebraVector> {
        let coords = match self.kind {
            GroupKind::So3 => so3::log(&self.matrix)?,
            GroupKind::Se2 => se2::log(&self.matrix)?,
            GroupKind::Se3 => se3::log(&self.matrix)?,
            GroupKind::Sl2r => sl2r::log(&self.matrix)?,
        };
        AlgebraVector::new(self.kind, coords)
    }

    /// Rotation angle in [0, pi] for the kinds that carry a rotation block.
    pub fn rotation_angle(&self) -> Option<f64> {
        let m = &self.matrix;
        match self.kind {
            GroupKind::Se2 => Some(m.get(1, 0).atan2(m.get(0, 0)).abs()),
            GroupKind::So3 | GroupKind::Se3 => {
                let tr = m.get(0, 0) + m.get(1, 1) + m.get(2, 2);
                Some(((tr - 1.0) / 2.0).clamp(-1.0, 1.0).acos())
            }
            GroupKind::Sl2r => None,
        }
    }

    /// Deviation from the manifold: rotation-block orthogonality defect, or
    /// |det - 1| for sl2r.
    pub fn drift(&self) -> f64 {
        let m = &self.matrix;
        match self.kind {
            GroupKind::So3 => orthogonality_defect(m, 3),
            GroupKind::Se2 => orthogonality_defect(m, 2),
            GroupKind::Se3 => orthogonality_defect(m, 3),
            GroupKind::Sl2r => (m.det().unwrap_or(f64::INFINITY) - 1.0).abs(),
        }
    }

    /// Projects the element back onto the manifold when accumulated
    /// floating-point drift exceeds [`DRIFT_TOL`]; otherwise returns the
    /// element unchanged. Rotation blocks are orthogonalized by the Newton
    /// polar iteration `R <- (R + R^-T)/2`; sl2r elements are rescaled by
    /// det^(-1/2).
    pub fn renormalized(&self) -> Result<GroupElement> {
        if self.drift() <= DRIFT_TOL {
            return Ok(self.clone());
        }
        match self.kind {
            GroupKind::Sl2r => {
                let det = self.matrix.det()?;
                if det <= 0.0 {
                    return Err(Error::InvalidElement(format!(
                        "sl2r element drifted to non-positive determinant {det}"
                    )));
                }
                GroupElement::new(self.kind, self.matrix.scale(1.0 / det.sqrt()))
            }
            _ => {
                let block_n = if self.kind == GroupKind::Se2 { 2 } else { 3 };
                let mut r = Matrix::zeros(block_n, block_n);
                for i in 0..block_n {
                    for j in 0..block_n {
                        r.set(i, j, self.matrix.get(i, j));
                    }
                }
                for _ in 0..8 {
                    r = r.add(&r.inverse()?.transpose())?.scale(0.5);
                    if orthogonality_defect_full(&r) <= 1e-15 {
                        break;
                    }
                }
                let mut out = self.matrix.clone();
                for i in 0..block_n {
                    for j in 0..block_n {
                        out.set(i, j, r.get(i, j));
                    }
                }
                GroupElement::new(self.kind, out)
            }
        }
    }
}

/// ||R^T R - I||_F for the leading `n x n` block.
fn orthogonality_defect(m: &Matrix, n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut dot = 0.0;
            for k in 0..n {
                dot += m.get(k, i) * m.get(k, j);
            }
            let target = if i == j { 1.0 } else { 0.0 };
            sum += (dot - target) * (dot - target);
        }
    }
    sum.sqrt()
}

fn orthogonality_defect_full(r: &Matrix) -> f64 {
    orthogonality_defect(r, r.rows())
}

fn rotation_det(m: &Matrix, n: usize) -> f64 {
    match n {
        2 => m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0),
        3 => {
            m.get(0, 0) * (m.get(1, 1) * m.get(2, 2) - m.get(1, 2) * m.get(2, 1))
                - m.get(0, 1) * (m.get(1, 0) * m.get(2, 2) - m.get(1, 2) * m.get(2, 0))
                + m.get(0, 2) * (m.get(1, 0) * m.get(2, 1) - m.get(1, 1) * m.get(2, 0))
        }
        _ => unreachable!("rotation blocks are 2x2 or 3x3"),
    }
}
