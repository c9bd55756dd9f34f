//! Multimode Gaussian states as covariance matrices in the
//! (a_1..a_N; a^dag_1..a^dag_N) operator ordering.
//!
//! The full covariance matrix is sigma = [[U, V], [V*, U*]] with U = U^dag
//! and V = V^T, first moments fixed at zero. With this ordering the
//! symplectic form is Omega = diag(-i..; i..), so i*Omega = diag(1..; -1..)
//! and physicality reads sigma + i*Omega >= 0.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{self, c, CMat, CVec, ONE};
use crate::modes::{ModeError, ModeSpec, SqueezeSpec, ThermalParam};

#[derive(Debug, Error)]
pub enum GaussianError {
    #[error(transparent)]
    Mode(#[from] ModeError),
    #[error("U block is {0}x{1}, expected square blocks of equal dimension")]
    DimensionMismatch(usize, usize),
    #[error("block structure violated: hermiticity defect {u_defect:.3e}, symmetry defect {v_defect:.3e}")]
    BlockStructure { u_defect: f64, v_defect: f64 },
    #[error("state is not physical: min eig(sigma + i Omega) = {min_eigenvalue:.3e}")]
    NonPhysicalState { min_eigenvalue: f64 },
    #[error("keep set is empty")]
    EmptyKeepSet,
}

impl GaussianError {
    pub fn name(&self) -> &'static str {
        match self {
            GaussianError::Mode(e) => e.name(),
            GaussianError::DimensionMismatch(..) => "DimensionMismatch",
            GaussianError::BlockStructure { .. } => "BlockStructure",
            GaussianError::NonPhysicalState { .. } => "NonPhysicalState",
            GaussianError::EmptyKeepSet => "EmptyKeepSet",
        }
    }
}

/// Second moments of a zero-mean Gaussian state, stored as the N x N blocks
/// U_nm = <{a_n, a^dag_m}> and V_nm = <{a_n, a_m}>.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    u: CMat,
    v: CMat,
}

const BLOCK_TOL: f64 = 1e-10;

impl CovarianceMatrix {
    pub fn new(u: CMat, v: CMat) -> Result<Self, GaussianError> {
        if u.nrows() != u.ncols() || u.nrows() != v.nrows() || v.nrows() != v.ncols() {
            return Err(GaussianError::DimensionMismatch(u.nrows(), u.ncols()));
        }
        let scale = linalg::max_abs(&u).max(1.0);
        let u_defect = linalg::hermiticity_defect(&u);
        let v_defect = linalg::symmetry_defect(&v);
        if u_defect > BLOCK_TOL * scale || v_defect > BLOCK_TOL * scale {
            return Err(GaussianError::BlockStructure { u_defect, v_defect });
        }
        Ok(CovarianceMatrix { u, v })
    }

    pub(crate) fn from_blocks_unchecked(u: CMat, v: CMat) -> Self {
        CovarianceMatrix { u, v }
    }

    pub fn vacuum(n: usize) -> Self {
        CovarianceMatrix {
            u: CMat::identity(n, n),
            v: CMat::zeros(n, n),
        }
    }

    pub fn mode_count(&self) -> usize {
        self.u.nrows()
    }

    pub fn u(&self) -> &CMat {
        &self.u
    }

    pub fn v(&self) -> &CMat {
        &self.v
    }

    /// Full 2N x 2N covariance matrix [[U, V], [V*, U*]].
    pub fn full(&self) -> CMat {
        let n = self.mode_count();
        let mut s = CMat::zeros(2 * n, 2 * n);
        s.view_mut((0, 0), (n, n)).copy_from(&self.u);
        s.view_mut((0, n), (n, n)).copy_from(&self.v);
        s.view_mut((n, 0), (n, n)).copy_from(&self.v.conjugate());
        s.view_mut((n, n), (n, n)).copy_from(&self.u.conjugate());
        s
    }

    /// Number expectation value of 1-based mode k, (U_kk - 1)/2.
    pub fn mode_number(&self, k: usize) -> Result<f64, GaussianError> {
        let n = self.mode_count();
        if k < 1 || k > n {
            return Err(ModeError::InvalidModeIndex { index: k, count: n }.into());
        }
        Ok((self.u[(k - 1, k - 1)].re - 1.0) / 2.0)
    }

    /// Partial trace: keep the listed 1-based modes (ascending output order).
    pub fn reduce(&self, keep: &[usize]) -> Result<Self, GaussianError> {
        if keep.is_empty() {
            return Err(GaussianError::EmptyKeepSet);
        }
        let n = self.mode_count();
        let mut idx: Vec<usize> = Vec::with_capacity(keep.len());
        for &k in keep {
            if k < 1 || k > n {
                return Err(ModeError::InvalidModeIndex { index: k, count: n }.into());
            }
            idx.push(k - 1);
        }
        idx.sort_unstable();
        idx.dedup();
        let m = idx.len();
        let u = CMat::from_fn(m, m, |i, j| self.u[(idx[i], idx[j])]);
        let v = CMat::from_fn(m, m, |i, j| self.v[(idx[i], idx[j])]);
        Ok(CovarianceMatrix { u, v })
    }

    /// Per-mode symplectic eigenvalue of 1-based mode k ignoring correlations
    /// with other modes: nu = sqrt(U_kk^2 - |V_kk|^2) of the reduced
    /// single-mode state.
    pub fn single_mode_nu(&self, k: usize) -> Result<f64, GaussianError> {
        let n = self.mode_count();
        if k < 1 || k > n {
            return Err(ModeError::InvalidModeIndex { index: k, count: n }.into());
        }
        let u = self.u[(k - 1, k - 1)].re;
        let v = self.v[(k - 1, k - 1)].norm();
        Ok((u * u - v * v).max(0.0).sqrt())
    }
}

/// Result of a physicality check: sign of the minimum eigenvalue of
/// sigma + i*Omega.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhysicalityCheck {
    pub is_physical: bool,
    pub min_eigenvalue: f64,
}

/// Positive-branch symplectic spectrum of a state, ascending; each value is
/// >= 1 for physical states and exactly 1 on pure modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        self.values.iter().all(|&nu| (nu - 1.0).abs() <= tol)
    }
}

/// Construct the initial states used throughout: a thermal background at
/// temperature parameter xi with optional single- or two-mode squeezing.
///
/// Thermal: U = diag(nu_k), V = 0 with nu_k = coth(k/(2 xi)).
/// Single-mode squeezed mode m: U_mm = cosh(2 r_m), V_mm = e^{i theta_m} sinh(2 r_m).
/// Two-mode squeezed pair (k, k'): U_kk = U_k'k' = cosh(2r),
/// V_kk' = V_k'k = e^{i theta} sinh(2r). Squeezed modes start from vacuum;
/// non-squeezed modes stay thermal.
pub fn make_state(
    spec: ModeSpec,
    thermal: ThermalParam,
    squeeze: Option<&SqueezeSpec>,
) -> Result<CovarianceMatrix, GaussianError> {
    let n = spec.count();
    let mut u = CMat::from_diagonal(&CVec::from_iterator(
        n,
        (1..=n).map(|k| c(thermal.nu(k), 0.0)),
    ));
    let mut v = CMat::zeros(n, n);
    if let Some(sq) = squeeze {
        sq.validate(spec)?;
        match sq {
            SqueezeSpec::SingleMode(list) => {
                for m in list {
                    let i = m.index - 1;
                    u[(i, i)] = c((2.0 * m.r).cosh(), 0.0);
                    v[(i, i)] = Complex64::from_polar((2.0 * m.r).sinh(), m.theta);
                }
            }
            SqueezeSpec::TwoMode { pair, r, theta } => {
                let (i, j) = (pair.0 - 1, pair.1 - 1);
                u[(i, i)] = c((2.0 * r).cosh(), 0.0);
                u[(j, j)] = c((2.0 * r).cosh(), 0.0);
                let off = Complex64::from_polar((2.0 * r).sinh(), *theta);
                v[(i, j)] = off;
                v[(j, i)] = off;
            }
        }
    }
    Ok(CovarianceMatrix { u, v })
}

/// Physicality test: sigma + i*Omega >= -tol, reported with the minimum
/// eigenvalue. With this operator ordering i*Omega = diag(1..1, -1..-1).
pub fn check_physical(state: &CovarianceMatrix, tol: f64) -> PhysicalityCheck {
    let n = state.mode_count();
    let mut m = state.full();
    for i in 0..n {
        m[(i, i)] += ONE;
        m[(n + i, n + i)] -= ONE;
    }
    let vals = linalg::hermitian_eigenvalues(&m);
    let min_eigenvalue = vals[0];
    PhysicalityCheck {
        is_physical: min_eigenvalue >= -tol,
        min_eigenvalue,
    }
}

const PHYSICALITY_TOL: f64 = 1e-9;

/// Symplectic eigenvalues: the N positive-branch eigenvalues of i*Omega*sigma,
/// computed as the positive spectrum of the Hermitian matrix
/// sigma^{1/2} K sigma^{1/2} with K = diag(1..1, -1..-1).
pub fn symplectic_eigenvalues(
    state: &CovarianceMatrix,
) -> Result<SymplecticSpectrum, GaussianError> {
    let check = check_physical(state, PHYSICALITY_TOL);
    if !check.is_physical {
        return Err(GaussianError::NonPhysicalState {
            min_eigenvalue: check.min_eigenvalue,
        });
    }
    let n = state.mode_count();
    let root = linalg::psd_sqrt(&state.full());
    let mut k_mat = CMat::identity(2 * n, 2 * n);
    for i in 0..n {
        k_mat[(n + i, n + i)] = -ONE;
    }
    let m = &root * k_mat * &root;
    let vals = linalg::hermitian_eigenvalues(&m);
    // spectrum is symmetric (+nu, -nu); take the upper half, ascending
    let values: Vec<f64> = vals[n..].to_vec();
    Ok(SymplecticSpectrum { values })
}

fn entropy_term(nu: f64) -> f64 {
    // f_plus(nu) - f_minus(nu) with the x ln x -> 0 convention at nu = 1
    let fp = (nu + 1.0) / 2.0 * ((nu + 1.0) / 2.0).ln();
    let xm = (nu - 1.0) / 2.0;
    let fm = if xm <= 0.0 { 0.0 } else { xm * xm.ln() };
    fp - fm
}

/// Von Neumann entropy in units of k_B: sum over symplectic eigenvalues of
/// f_plus(nu) - f_minus(nu) with f_pm(x) = (x pm 1)/2 ln((x pm 1)/2).
pub fn von_neumann_entropy(state: &CovarianceMatrix) -> Result<f64, GaussianError> {
    let spectrum = symplectic_eigenvalues(state)?;
    Ok(spectrum.values().iter().map(|&nu| entropy_term(nu)).sum())
}
