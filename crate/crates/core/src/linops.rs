//! Dense complex linear algebra used by every other module.
//!
//! Storage is backed by `nalgebra`; this module adds the validated newtypes,
//! the scaling-and-squaring exponential, and the Hermitian eigensolver wrapper
//! with a deterministic ordering and phase convention.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default relative tolerance for [`matrix_exponential`].
pub const DEFAULT_EXP_TOL: f64 = 1e-12;

/// Default relative tolerance for the Hermitian check.
pub const DEFAULT_HERMITIAN_TOL: f64 = 1e-10;

/// Maximum number of Taylor terms after scaling.
const EXP_SERIES_BUDGET: usize = 40;

/// Scaled matrices have Frobenius norm at most this before the series runs.
const EXP_SCALED_NORM: f64 = 0.5;

/// Entries with modulus below this are skipped when fixing eigenvector phases.
const PHASE_ZERO_CUTOFF: f64 = 1e-12;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector(DVector<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("vector dimension must be >= 1".into()));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(DVector::from_vec(entries)))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// Unit vector `e_index` in `dim` dimensions.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut v = DVector::zeros(dim);
        v[index] = c(1.0, 0.0);
        Self(v)
    }

    pub(crate) fn from_dvector(v: DVector<Complex64>) -> Self {
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        self.0.as_slice()
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.0[i]
    }

    pub fn as_dvector(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(Self(&self.0 / c(n, 0.0)))
    }

    /// Rank-one operator `self self^H`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix(&self.0 * self.0.adjoint())
    }
}

impl Sub for &ComplexVector {
    type Output = ComplexVector;
    fn sub(self, rhs: &ComplexVector) -> ComplexVector {
        ComplexVector(&self.0 - &rhs.0)
    }
}

impl Add for &ComplexVector {
    type Output = ComplexVector;
    fn add(self, rhs: &ComplexVector) -> ComplexVector {
        ComplexVector(&self.0 + &rhs.0)
    }
}

/// Square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be >= 1".into()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    /// Builds from row slices; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: r.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim >= 1, "matrix dimension must be >= 1");
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { c(diag[i], 0.0) } else { c(0.0, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector(self.0.column(j).into_owned())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        check_dims(self.dim(), v.dim())?;
        Ok(ComplexVector(&self.0 * &v.0))
    }

    /// `‖M - M^H‖_F`.
    pub fn hermitian_deviation(&self) -> f64 {
        (&self.0 - self.0.adjoint()).norm()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        let gram = self.0.adjoint() * &self.0;
        let gram = (&gram + gram.adjoint()) * c(0.5, 0.0);
        SymmetricEigen::new(gram)
            .eigenvalues
            .iter()
            .fold(0.0_f64, |acc, &x| acc.max(x))
            .sqrt()
    }

    pub fn pow(&self, exponent: u32) -> Self {
        let mut out = Self::identity(self.dim());
        for _ in 0..exponent {
            out = &out * self;
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// `(u, v)`: conjugate-linear in `u`, linear in `v`.
pub fn inner_product(u: &ComplexVector, v: &ComplexVector) -> Result<Complex64> {
    check_dims(u.dim(), v.dim())?;
    Ok(u.0.dotc(&v.0))
}

pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(m.0.adjoint())
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims(a.dim(), b.dim())?;
    Ok(ComplexMatrix(&a.0 * &b.0 - &b.0 * &a.0))
}

/// Matrix exponential by scaling and squaring with a Taylor series.
///
/// The argument is scaled by `2^-s` until its Frobenius norm is at most 1/2.
/// Because the scaled norm is below one, the Frobenius norm of the first
/// omitted term bounds the whole series remainder, so the series is cut once
/// that term drops below `tol * 2^-s` relative to the partial sum. The `s`
/// squarings then amplify the relative error by at most `2^s`.
pub fn matrix_exponential(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "exponential tolerance must be positive, got {tol}"
        )));
    }
    if m.0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = m.dim();
    let norm = m.frobenius_norm();
    let squarings = if norm > EXP_SCALED_NORM {
        (norm / EXP_SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scale = 0.5_f64.powi(squarings);
    let scaled = &m.0 * c(scale, 0.0);
    let series_tol = tol * scale;

    let mut sum = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut converged = false;
    for k in 1..=EXP_SERIES_BUDGET {
        term = (&term * &scaled) * c(1.0 / k as f64, 0.0);
        sum += &term;
        if term.norm() <= series_tol * sum.norm() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ToleranceNotReached {
            tol,
            budget: EXP_SERIES_BUDGET,
        });
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    if sum.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(ComplexMatrix(sum))
}

/// Eigenpairs of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<ComplexVector>,
}

impl SpectralDecomposition {
    /// `Σ λ_i η_i η_i^H`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            out += (&v.0 * v.0.adjoint()) * c(*lambda, 0.0);
        }
        ComplexMatrix(out)
    }

    /// `max |(η_i, η_j) - δ_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, u) in self.eigenvectors.iter().enumerate() {
            for (j, v) in self.eigenvectors.iter().enumerate() {
                let delta = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((u.0.dotc(&v.0) - c(delta, 0.0)).norm());
            }
        }
        worst
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input must satisfy `‖M - M^H‖_F <= tol * max(1, ‖M‖_F)`. Each
/// eigenvector is rotated so its first non-negligible component is positive
/// real. Within a degenerate cluster only the spanned eigenspace is
/// meaningful.
pub fn hermitian_eigendecomposition(m: &ComplexMatrix, tol: f64) -> Result<SpectralDecomposition> {
    let deviation = m.hermitian_deviation();
    let threshold = tol * m.frobenius_norm().max(1.0);
    if !(deviation <= threshold) {
        return Err(Error::NotHermitian {
            deviation,
            threshold,
        });
    }
    let symmetric = (&m.0 + m.0.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(symmetric);

    let mut order: Vec<usize> = (0..m.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = order
        .iter()
        .map(|&i| {
            let mut v = eig.eigenvectors.column(i).into_owned();
            if let Some(first) = v.iter().find(|z| z.norm() > PHASE_ZERO_CUTOFF) {
                let phase = first.conj() / first.norm();
                v *= phase;
            }
            ComplexVector(v)
        })
        .collect();
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// `min_ε ‖u - ε v‖` over unit-modulus `ε`.
pub fn distance_up_to_phase(u: &ComplexVector, v: &ComplexVector) -> Result<f64> {
    let overlap = inner_product(v, u)?;
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        c(1.0, 0.0)
    };
    Ok((&u.0 - &v.0 * phase).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn inner_product_basics() {
        let e0 = ComplexVector::basis(3, 0);
        assert_eq!(inner_product(&e0, &e0).unwrap(), c(1.0, 0.0));
        let ie0 = e0.scale(c(0.0, 1.0));
        assert_eq!(inner_product(&ie0, &e0).unwrap(), c(0.0, -1.0));
        let err = inner_product(&e0, &ComplexVector::basis(2, 0)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn inner_product_with_example_state() {
        let s = 14f64.sqrt();
        let xi = ComplexVector::new(vec![c(1.0 / s, 0.0), c(2.0 / s, 0.0), c(0.0, 3.0 / s)]).unwrap();
        let eta1 = ComplexVector::basis(3, 0);
        let ip = inner_product(&eta1, &xi).unwrap();
        assert!((ip - c(1.0 / s, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn adjoint_conjugates() {
        let id = ComplexMatrix::identity(3);
        assert_eq!(adjoint(&id), id);
        let m = ComplexMatrix::from_fn(1, |_, _| c(0.0, 1.0));
        assert_eq!(adjoint(&m).get(0, 0), c(0.0, -1.0));
    }

    #[test]
    fn commutator_of_self_vanishes() {
        let m = ComplexMatrix::from_fn(4, |i, j| c(i as f64 - j as f64, (i * j) as f64));
        assert_eq!(commutator(&m, &m).unwrap().max_abs(), 0.0);
        assert!(commutator(&m, &ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn exponential_of_zero_is_identity_exactly() {
        let e = matrix_exponential(&ComplexMatrix::zeros(5), DEFAULT_EXP_TOL).unwrap();
        assert_eq!(e, ComplexMatrix::identity(5));
    }

    #[test]
    fn exponential_of_nilpotent_terminates() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let e = matrix_exponential(&m, DEFAULT_EXP_TOL).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!((&e - &expected).max_abs() < 1e-15);
    }

    #[test]
    fn exponential_of_i_pi() {
        let m = ComplexMatrix::from_fn(1, |_, _| c(0.0, PI));
        let e = matrix_exponential(&m, DEFAULT_EXP_TOL).unwrap();
        let oracle = c(0.0, PI).exp();
        assert!((e.get(0, 0) - oracle).norm() < 1e-13);
        assert!((e.get(0, 0) - c(-1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn exponential_of_large_diagonal_matches_scalar() {
        let m = ComplexMatrix::from_fn(3, |i, j| if i == j { c(i as f64 * 3.0 - 2.0, 1.5) } else { c(0.0, 0.0) });
        let e = matrix_exponential(&m, DEFAULT_EXP_TOL).unwrap();
        for i in 0..3 {
            let oracle = c(i as f64 * 3.0 - 2.0, 1.5).exp();
            assert!((e.get(i, i) - oracle).norm() <= 1e-12 * oracle.norm());
        }
    }

    #[test]
    fn exponential_rejects_bad_input() {
        let m = ComplexMatrix::identity(2);
        assert!(matches!(matrix_exponential(&m, 0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            matrix_exponential(&m, 1e-300),
            Err(Error::ToleranceNotReached { .. })
        ));
        let bad = ComplexMatrix(DMatrix::from_element(2, 2, c(f64::NAN, 0.0)));
        assert_eq!(matrix_exponential(&bad, 1e-12), Err(Error::NonFinite));
    }

    #[test]
    fn matrix_constructor_validates() {
        assert!(matches!(
            ComplexMatrix::new(DMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        assert_eq!(
            ComplexMatrix::new(DMatrix::from_element(2, 2, c(f64::INFINITY, 0.0))),
            Err(Error::NonFinite)
        );
        assert!(ComplexVector::new(vec![]).is_err());
    }

    #[test]
    fn eigendecomposition_of_example_observable() {
        let o = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, -1.0]);
        let spec = hermitian_eigendecomposition(&o, DEFAULT_HERMITIAN_TOL).unwrap();
        assert_eq!(spec.eigenvalues.len(), 3);
        for (got, want) in spec.eigenvalues.iter().zip([1.0, 0.0, -1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        for (i, v) in spec.eigenvectors.iter().enumerate() {
            assert!((v.get(i) - c(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn eigendecomposition_of_identity() {
        let spec = hermitian_eigendecomposition(&ComplexMatrix::identity(4), 1e-10).unwrap();
        assert!(spec.eigenvalues.iter().all(|&x| (x - 1.0).abs() < 1e-14));
        assert!(spec.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn eigendecomposition_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            hermitian_eigendecomposition(&m, 1e-10),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn eigenvector_phase_convention() {
        // [[0, -i], [i, 0]] has eigenvectors with complex components
        let m = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]).unwrap();
        let spec = hermitian_eigendecomposition(&m, 1e-10).unwrap();
        assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-14);
        for v in &spec.eigenvectors {
            let first = v.get(0);
            assert!(first.im.abs() < 1e-15 && first.re > 0.0);
        }
    }

    #[test]
    fn distance_ignores_global_phase() {
        let v = ComplexVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let w = v.scale(c(0.0, 1.0).exp());
        assert!(distance_up_to_phase(&v, &w).unwrap() < 1e-15);
        let other = ComplexVector::basis(2, 0);
        assert!(distance_up_to_phase(&v, &other).unwrap() > 0.1);
    }

    #[test]
    fn operator_norm_of_diagonal() {
        let m = ComplexMatrix::from_real_diagonal(&[1.0, -3.0, 2.0]);
        assert!((m.operator_norm() - 3.0).abs() < 1e-12);
    }
}
