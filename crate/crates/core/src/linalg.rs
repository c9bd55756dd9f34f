//! Dense complex linear algebra helpers shared by the state and transform
//! modules: Hermitian eigensolves, positive-semidefinite square roots and a
//! scaling-and-squaring matrix exponential.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Full Hermitian eigendecomposition: (eigenvalues, eigenvectors as columns).
pub fn hermitian_eigen(m: &CMat) -> (DVector<f64>, CMat) {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    (eig.eigenvalues, eig.eigenvectors)
}

/// Square root of a positive-semidefinite Hermitian matrix; eigenvalues are
/// clamped at zero to absorb roundoff.
pub fn psd_sqrt(m: &CMat) -> CMat {
    let (vals, vecs) = hermitian_eigen(m);
    let sqrt_diag = CMat::from_diagonal(&CVec::from_iterator(
        vals.len(),
        vals.iter().map(|&l| c(l.max(0.0).sqrt(), 0.0)),
    ));
    &vecs * sqrt_diag * vecs.adjoint()
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
///
/// The argument is scaled by 2^-s until its infinity norm is below 1/2, the
/// series is summed to machine precision, and the result squared back up.
pub fn expm(m: &CMat) -> CMat {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "expm requires a square matrix");
    let norm = inf_norm(m);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m.map(|z| z / (2.0f64.powi(s as i32)));

    let mut result = CMat::identity(n, n);
    let mut term = CMat::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled;
        term /= c(k as f64, 0.0);
        result += &term;
        if inf_norm(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// Infinity norm (maximum absolute row sum).
pub fn inf_norm(m: &CMat) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Frobenius norm of M - M^dagger.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    (m - m.adjoint()).norm()
}

/// Frobenius norm of M - M^T.
pub fn symmetry_defect(m: &CMat) -> f64 {
    (m - m.transpose()).norm()
}
