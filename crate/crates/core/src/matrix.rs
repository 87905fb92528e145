//! Dense real matrices for the small fixed sizes (2x2, 3x3, 4x4) the rest of
//! the crate works with.
//!
//! Entries are stored row-major. Every constructor and operation that returns
//! `Ok` guarantees finite entries; determinants below [`SINGULARITY_TOL`] are
//! rejected rather than inverted.

use crate::error::{Error, Result};

/// Determinants with absolute value below this are treated as singular.
/// Everything this crate inverts is near-orthogonal or unit-determinant, so a
/// smaller determinant indicates corrupted data, not an ill-conditioned solve.
pub const SINGULARITY_TOL: f64 = 1e-12;

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("matrix entry".into()));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &v) in entries.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Standard matrix product.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out.ensure_finite("matrix product")
    }

    /// Overflow guard: successful operations never hand back NaN/Inf.
    fn ensure_finite(self, context: &str) -> Result<Matrix> {
        if self.data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(context.into()));
        }
        Ok(self)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimMismatch(format!(
                "shape {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
        .ensure_finite("matrix sum")
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// sqrt of the sum of squared entries.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Determinant for square sizes up to 4x4.
    pub fn det(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::DimMismatch(format!(
                "determinant of non-square {}x{}",
                self.rows, self.cols
            )));
        }
        let d = &self.data;
        Ok(match self.rows {
            0 => 1.0,
            1 => d[0],
            2 => d[0] * d[3] - d[1] * d[2],
            3 => {
                d[0] * (d[4] * d[8] - d[5] * d[7]) - d[1] * (d[3] * d[8] - d[5] * d[6])
                    + d[2] * (d[3] * d[7] - d[4] * d[6])
            }
            4 => {
                // Laplace expansion along the last row; for homogeneous
                // transforms only the trailing 1 contributes.
                let mut det = 0.0;
                for j in 0..4 {
                    let v = self.get(3, j);
                    if v != 0.0 {
                        let sign = if (3 + j) % 2 == 0 { 1.0 } else { -1.0 };
                        det += sign * v * self.minor3(3, j).det()?;
                    }
                }
                det
            }
            n => {
                return Err(Error::DimMismatch(format!(
                    "determinant only implemented up to 4x4, got {n}x{n}"
                )))
            }
        })
    }

    /// 3x3 submatrix obtained by deleting row `i` and column `j`.
    fn minor3(&self, i: usize, j: usize) -> Matrix {
        let mut out = Matrix::zeros(3, 3);
        let mut r = 0;
        for ri in 0..4 {
            if ri == i {
                continue;
            }
            let mut c = 0;
            for ci in 0..4 {
                if ci == j {
                    continue;
                }
                out.set(r, c, self.get(ri, ci));
                c += 1;
            }
            r += 1;
        }
        out
    }

    /// Inverse via cofactor formulas (2x2, 3x3) or the block formula for
    /// homogeneous 4x4 transforms; general 4x4 falls back to the adjugate.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimMismatch(format!(
                "inverse of non-square {}x{}",
                self.rows, self.cols
            )));
        }
        let det = self.det()?;
        if det.abs() <= SINGULARITY_TOL {
            return Err(Error::Singular { abs_det: det.abs() });
        }
        let inv_det = 1.0 / det;
        let d = &self.data;
        match self.rows {
            1 => Matrix::new(1, 1, vec![inv_det]),
            2 => Matrix::new(
                2,
                2,
                vec![
                    d[3] * inv_det,
                    -d[1] * inv_det,
                    -d[2] * inv_det,
                    d[0] * inv_det,
                ],
            ),
            3 => {
                let mut out = Matrix::zeros(3, 3);
                // adj(A)^T entries = cofactors
                out.set(0, 0, (d[4] * d[8] - d[5] * d[7]) * inv_det);
                out.set(0, 1, (d[2] * d[7] - d[1] * d[8]) * inv_det);
                out.set(0, 2, (d[1] * d[5] - d[2] * d[4]) * inv_det);
                out.set(1, 0, (d[5] * d[6] - d[3] * d[8]) * inv_det);
                out.set(1, 1, (d[0] * d[8] - d[2] * d[6]) * inv_det);
                out.set(1, 2, (d[2] * d[3] - d[0] * d[5]) * inv_det);
                out.set(2, 0, (d[3] * d[7] - d[4] * d[6]) * inv_det);
                out.set(2, 1, (d[1] * d[6] - d[0] * d[7]) * inv_det);
                out.set(2, 2, (d[0] * d[4] - d[1] * d[3]) * inv_det);
                Ok(out)
            }
            4 => {
                if self.has_homogeneous_bottom_row() {
                    self.inverse_homogeneous4()
                } else {
                    self.inverse_adjugate4(inv_det)
                }
            }
            n => Err(Error::DimMismatch(format!(
                "inverse only implemented up to 4x4, got {n}x{n}"
            ))),
        }
        .and_then(|m| m.ensure_finite("matrix inverse"))
    }

    fn has_homogeneous_bottom_row(&self) -> bool {
        self.get(3, 0) == 0.0 && self.get(3, 1) == 0.0 && self.get(3, 2) == 0.0 && self.get(3, 3) == 1.0
    }

    /// [[M, t], [0, 1]]^-1 = [[M^-1, -M^-1 t], [0, 1]] with the exact 3x3
    /// cofactor inverse of the upper-left block.
    fn inverse_homogeneous4(&self) -> Result<Matrix> {
        let mut block = Matrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                block.set(i, j, self.get(i, j));
            }
        }
        let block_inv = block.inverse()?;
        let mut out = Matrix::identity(4);
        for i in 0..3 {
            let mut ti = 0.0;
            for j in 0..3 {
                out.set(i, j, block_inv.get(i, j));
                ti -= block_inv.get(i, j) * self.get(j, 3);
            }
            out.set(i, 3, ti);
        }
        Ok(out)
    }

    fn inverse_adjugate4(&self, inv_det: f64) -> Result<Matrix> {
        let mut out = Matrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                // adjugate transposes the cofactor matrix
                out.set(j, i, sign * self.minor3(i, j).det()? * inv_det);
            }
        }
        Ok(out)
    }

    /// Truncated exponential power series: sum of A^k / k! for k = 0..=terms.
    ///
    /// Slow but structure-free; used as the oracle the closed-form group
    /// exponentials are checked against.
    pub fn exp_series(&self, terms: usize) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimMismatch(format!(
                "exponential of non-square {}x{}",
                self.rows, self.cols
            )));
        }
        if terms == 0 {
            return Err(Error::InvalidConfig("exp_series needs terms >= 1".into()));
        }
        let mut sum = Matrix::identity(self.rows);
        let mut term = Matrix::identity(self.rows);
        for k in 1..=terms {
            term = term.matmul(self)?.scale(1.0 / k as f64);
            sum = sum.add(&term)?;
        }
        Ok(sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{AlgebraVector, GroupKind};
    use crate::rng::SplitMix64;

    fn random_matrix(n: usize, rng: &mut SplitMix64) -> Matrix {
        let data = (0..n * n).map(|_| rng.uniform(-1.0, 1.0)).collect();
        Matrix::new(n, n, data).unwrap()
    }

    /// Independent triple-loop product used as the oracle for matmul.
    fn naive_product(a: &Matrix, b: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut acc = 0.0;
                for k in 0..a.cols() {
                    acc += a.get(i, k) * b.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    #[test]
    fn matmul_identity_is_noop() {
        let mut rng = SplitMix64::new(1);
        let a = random_matrix(3, &mut rng);
        let product = Matrix::identity(3).matmul(&a).unwrap();
        assert_eq!(product, a);
    }

    #[test]
    fn matmul_quarter_turn_squared_is_half_turn() {
        let quarter = Matrix::new(2, 2, vec![0.0, -1.0, 1.0, 0.0]).unwrap();
        let half = quarter.matmul(&quarter).unwrap();
        assert_eq!(half.as_slice(), &[-1.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn matmul_matches_naive_oracle() {
        let mut rng = SplitMix64::new(2);
        for _ in 0..50 {
            let a = random_matrix(3, &mut rng);
            let b = random_matrix(3, &mut rng);
            let fast = a.matmul(&b).unwrap();
            let slow = naive_product(&a, &b);
            assert!(fast.sub(&slow).unwrap().frobenius_norm() < 1e-14);
        }
    }

    #[test]
    fn matmul_dimension_mismatch_errors() {
        let a = Matrix::zeros(2, 3);
        let b = Matrix::zeros(2, 3);
        assert!(matches!(a.matmul(&b), Err(Error::DimMismatch(_))));
    }

    #[test]
    fn inverse_of_identity() {
        let inv = Matrix::identity(4).inverse().unwrap();
        assert_eq!(inv, Matrix::identity(4));
    }

    #[test]
    fn inverse_of_diagonal() {
        let inv = Matrix::diag(&[2.0, 0.5]).inverse().unwrap();
        assert_eq!(inv.as_slice(), &[0.5, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn inverse_multiplies_back_to_identity() {
        // A rigid transform exercises the homogeneous 4x4 path.
        let mut rng = SplitMix64::new(3);
        for _ in 0..20 {
            let coords: Vec<f64> = (0..6).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let g = AlgebraVector::new(GroupKind::Se3, coords).unwrap().exp();
            let m = g.matrix().clone();
            let product = m.matmul(&m.inverse().unwrap()).unwrap();
            let err = product.sub(&Matrix::identity(4)).unwrap().frobenius_norm();
            assert!(err < 1e-10, "inverse residual {err}");
        }
    }

    #[test]
    fn inverse_of_general_dense_4x4() {
        let mut rng = SplitMix64::new(4);
        for _ in 0..20 {
            let a = random_matrix(4, &mut rng);
            if a.det().unwrap().abs() < 1e-3 {
                continue;
            }
            let product = a.matmul(&a.inverse().unwrap()).unwrap();
            let err = product.sub(&Matrix::identity(4)).unwrap().frobenius_norm();
            assert!(err < 1e-10, "residual {err}");
        }
    }

    #[test]
    fn inverse_of_singular_matrix_reports_determinant() {
        let singular = Matrix::new(2, 2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        match singular.inverse() {
            Err(Error::Singular { abs_det }) => assert!(abs_det < 1e-12),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn double_inverse_is_identity_map() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..30 {
            let a = random_matrix(3, &mut rng);
            if a.det().unwrap().abs() < 1e-2 {
                continue;
            }
            let back = a.inverse().unwrap().inverse().unwrap();
            assert!(a.sub(&back).unwrap().frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn exp_series_of_zero_is_identity() {
        let e = Matrix::zeros(3, 3).exp_series(30).unwrap();
        assert_eq!(e, Matrix::identity(3));
    }

    #[test]
    fn exp_series_of_diagonal() {
        let e = Matrix::diag(&[1.0, -1.0]).exp_series(30).unwrap();
        assert!((e.get(0, 0) - 1.0f64.exp()).abs() < 1e-12);
        assert!((e.get(1, 1) - (-1.0f64).exp()).abs() < 1e-12);
        assert!(e.get(0, 1).abs() < 1e-15 && e.get(1, 0).abs() < 1e-15);
    }

    #[test]
    fn exp_series_matches_rodrigues_quarter_turn() {
        let v = AlgebraVector::new(GroupKind::So3, vec![0.0, 0.0, std::f64::consts::FRAC_PI_2])
            .unwrap();
        let series = v.hat().exp_series(30).unwrap();
        let expected =
            Matrix::new(3, 3, vec![0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(series.sub(&expected).unwrap().frobenius_norm() < 1e-10);
    }

    #[test]
    fn exp_series_converged_by_30_terms() {
        let mut rng = SplitMix64::new(6);
        for _ in 0..20 {
            let mut a = random_matrix(4, &mut rng);
            // scale up towards the norm bound the oracle is used at
            let norm = a.frobenius_norm();
            if norm > 0.0 {
                a = a.scale(rng.uniform(0.5, 5.0) / norm);
            }
            let e30 = a.exp_series(30).unwrap();
            let e40 = a.exp_series(40).unwrap();
            assert!(e30.sub(&e40).unwrap().frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn frobenius_norm_cases() {
        assert_eq!(Matrix::zeros(2, 3).frobenius_norm(), 0.0);
        assert!((Matrix::identity(3).frobenius_norm() - 3.0f64.sqrt()).abs() < 1e-15);
        let m = Matrix::new(2, 2, vec![3.0, 4.0, 0.0, 0.0]).unwrap();
        assert_eq!(m.frobenius_norm(), 5.0);
    }

    #[test]
    fn product_is_associative() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..30 {
            let a = random_matrix(3, &mut rng);
            let b = random_matrix(3, &mut rng);
            let c = random_matrix(3, &mut rng);
            let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
            let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
            assert!(left.sub(&right).unwrap().frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn constructor_rejects_bad_shapes_and_nan() {
        assert!(Matrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(Matrix::new(2, 2, vec![1.0, f64::NAN, 0.0, 1.0]).is_err());
    }
}
