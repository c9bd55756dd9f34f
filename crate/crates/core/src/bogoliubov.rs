//! Exact and perturbative Bogoliubov transformations and their action on
//! covariance matrices.
//!
//! An exact transform is the block matrix S = [[alpha, beta], [beta*, alpha*]]
//! acting on (a_1..a_N; a^dag_1..a^dag_N); states evolve by the congruence
//! sigma_f = S^dag sigma_i S. The coefficients satisfy the identities
//! alpha alpha^dag - beta beta^dag = 1 and alpha beta^T - beta alpha^T = 0,
//! equivalently S K S^dag = K with K = diag(1..1, -1..-1).
//!
//! A perturbative transform expands alpha = alpha0 + alpha1 h + alpha2 h^2 and
//! beta = beta1 h + beta2 h^2 in a small parameter h, with alpha0 diagonal
//! phases. The identities then hold order by order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gaussian::{check_physical, CovarianceMatrix, GaussianError};
use crate::linalg::{self, c, CMat, ONE, ZERO};
use crate::modes::ModeSpec;

#[derive(Debug, Error)]
pub enum BogoliubovError {
    #[error("alpha is {0}x{1}, beta {2}x{3}: expected equal square dimensions")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("transform violates the Bogoliubov identities: worst residual {worst:.3e} (tol {tol:.1e})")]
    IdentityViolation { worst: f64, tol: f64 },
    #[error("alpha0 entry {index} has modulus {modulus}, expected 1")]
    NonUnitaryPhase { index: usize, modulus: f64 },
    #[error("generator blocks invalid: {0}")]
    InvalidGenerator(String),
    #[error("state/transform dimension mismatch: state has {state} modes, transform {transform}")]
    StateDimensionMismatch { state: usize, transform: usize },
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error("coefficient file malformed: {0}")]
    MalformedCoefficients(String),
}

impl BogoliubovError {
    pub fn name(&self) -> &'static str {
        match self {
            BogoliubovError::DimensionMismatch(..) => "DimensionMismatch",
            BogoliubovError::IdentityViolation { .. } => "IdentityViolation",
            BogoliubovError::NonUnitaryPhase { .. } => "NonUnitaryPhase",
            BogoliubovError::InvalidGenerator(_) => "InvalidGenerator",
            BogoliubovError::StateDimensionMismatch { .. } => "StateDimensionMismatch",
            BogoliubovError::Gaussian(e) => e.name(),
            BogoliubovError::MalformedCoefficients(_) => "MalformedCoefficients",
        }
    }
}

/// Tolerance for user-supplied exact transforms (coefficients may come from
/// truncated mode sums).
pub const EXACT_IDENTITY_TOL: f64 = 1e-10;
/// Tolerance met by generated perturbative series.
pub const SERIES_IDENTITY_TOL: f64 = 1e-12;

/// Residual Frobenius norms of the defining identities.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub residuals: Vec<(String, f64)>,
}

impl IdentityReport {
    pub fn worst(&self) -> f64 {
        self.residuals.iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.worst() <= tol
    }
}

/// Exact Bogoliubov transform given by its particle-preserving block alpha
/// and particle-creating block beta.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovTransform {
    alpha: CMat,
    beta: CMat,
}

impl BogoliubovTransform {
    pub fn new(alpha: CMat, beta: CMat) -> Result<Self, BogoliubovError> {
        if alpha.nrows() != alpha.ncols()
            || beta.nrows() != beta.ncols()
            || alpha.nrows() != beta.nrows()
        {
            return Err(BogoliubovError::DimensionMismatch(
                alpha.nrows(),
                alpha.ncols(),
                beta.nrows(),
                beta.ncols(),
            ));
        }
        Ok(BogoliubovTransform { alpha, beta })
    }

    pub fn identity(n: usize) -> Self {
        BogoliubovTransform {
            alpha: CMat::identity(n, n),
            beta: CMat::zeros(n, n),
        }
    }

    pub fn alpha(&self) -> &CMat {
        &self.alpha
    }

    pub fn beta(&self) -> &CMat {
        &self.beta
    }

    pub fn mode_count(&self) -> usize {
        self.alpha.nrows()
    }

    /// Residuals of alpha alpha^dag - beta beta^dag = 1 and
    /// alpha beta^T - beta alpha^T = 0.
    pub fn validate_identities(&self) -> IdentityReport {
        let n = self.mode_count();
        let first = (&self.alpha * self.alpha.adjoint()
            - &self.beta * self.beta.adjoint()
            - CMat::identity(n, n))
        .norm();
        let second =
            (&self.alpha * self.beta.transpose() - &self.beta * self.alpha.transpose()).norm();
        IdentityReport {
            residuals: vec![
                ("alpha alpha^dag - beta beta^dag = 1".into(), first),
                ("alpha beta^T - beta alpha^T = 0".into(), second),
            ],
        }
    }

    /// Full 2N x 2N symplectic block matrix.
    pub fn full(&self) -> CMat {
        let n = self.mode_count();
        let mut s = CMat::zeros(2 * n, 2 * n);
        s.view_mut((0, 0), (n, n)).copy_from(&self.alpha);
        s.view_mut((0, n), (n, n)).copy_from(&self.beta);
        s.view_mut((n, 0), (n, n)).copy_from(&self.beta.conjugate());
        s.view_mut((n, n), (n, n)).copy_from(&self.alpha.conjugate());
        s
    }
}

/// Free cavity evolution for dimensionless time tau: alpha = diag(e^{i k tau}),
/// beta = 0, with mode k at frequency k.
pub fn free_evolution(spec: ModeSpec, tau: f64) -> BogoliubovTransform {
    let n = spec.count();
    let alpha = CMat::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, spec.frequency(i + 1) * tau)
        } else {
            ZERO
        }
    });
    BogoliubovTransform {
        alpha,
        beta: CMat::zeros(n, n),
    }
}

/// Evolve a state through an exact transform: sigma_f = S^dag sigma_i S,
/// written in blocks as
///   U_f = a^dag U a + a^dag V b* + b^T V* a + b^T U* b*
///   V_f = a^dag U b + a^dag V a* + b^T V* b + b^T U* a*.
pub fn evolve(
    state: &CovarianceMatrix,
    transform: &BogoliubovTransform,
) -> Result<CovarianceMatrix, BogoliubovError> {
    if state.mode_count() != transform.mode_count() {
        return Err(BogoliubovError::StateDimensionMismatch {
            state: state.mode_count(),
            transform: transform.mode_count(),
        });
    }
    let report = transform.validate_identities();
    if !report.passes(EXACT_IDENTITY_TOL) {
        return Err(BogoliubovError::IdentityViolation {
            worst: report.worst(),
            tol: EXACT_IDENTITY_TOL,
        });
    }
    let (u, v) = evolve_blocks(state.u(), state.v(), &transform.alpha, &transform.beta);
    Ok(CovarianceMatrix::new(u, v)?)
}

fn evolve_blocks(u: &CMat, v: &CMat, alpha: &CMat, beta: &CMat) -> (CMat, CMat) {
    let ad = alpha.adjoint();
    let bt = beta.transpose();
    let uc = u.conjugate();
    let vc = v.conjugate();
    let u_f = &ad * u * alpha
        + &ad * v * beta.conjugate()
        + &bt * &vc * alpha
        + &bt * &uc * beta.conjugate();
    let v_f = &ad * u * beta
        + &ad * v * alpha.conjugate()
        + &bt * &vc * beta
        + &bt * &uc * alpha.conjugate();
    (u_f, v_f)
}

/// Bogoliubov coefficients organized by perturbative order:
/// alpha = alpha0 + alpha1 h + alpha2 h^2, beta = beta1 h + beta2 h^2,
/// with alpha0 a diagonal phase matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbativeBogoliubov {
    alpha0: Vec<Complex64>,
    alpha1: CMat,
    alpha2: CMat,
    beta1: CMat,
    beta2: CMat,
    h: f64,
}

impl PerturbativeBogoliubov {
    pub fn new(
        alpha0: Vec<Complex64>,
        alpha1: CMat,
        alpha2: CMat,
        beta1: CMat,
        beta2: CMat,
        h: f64,
    ) -> Result<Self, BogoliubovError> {
        let n = alpha0.len();
        for m in [&alpha1, &alpha2, &beta1, &beta2] {
            if m.nrows() != n || m.ncols() != n {
                return Err(BogoliubovError::DimensionMismatch(
                    m.nrows(),
                    m.ncols(),
                    n,
                    n,
                ));
            }
        }
        for (i, z) in alpha0.iter().enumerate() {
            if (z.norm() - 1.0).abs() > 1e-12 {
                return Err(BogoliubovError::NonUnitaryPhase {
                    index: i,
                    modulus: z.norm(),
                });
            }
        }
        Ok(PerturbativeBogoliubov {
            alpha0,
            alpha1,
            alpha2,
            beta1,
            beta2,
            h,
        })
    }

    /// Series with alpha0 = 1 and all perturbative blocks zero.
    pub fn zero(n: usize, h: f64) -> Self {
        PerturbativeBogoliubov {
            alpha0: vec![ONE; n],
            alpha1: CMat::zeros(n, n),
            alpha2: CMat::zeros(n, n),
            beta1: CMat::zeros(n, n),
            beta2: CMat::zeros(n, n),
            h,
        }
    }

    pub fn mode_count(&self) -> usize {
        self.alpha0.len()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Same coefficients evaluated at a different expansion parameter.
    pub fn with_h(&self, h: f64) -> Self {
        let mut out = self.clone();
        out.h = h;
        out
    }

    /// Zero-based diagonal phase alpha0_kk.
    pub fn alpha0(&self, k: usize) -> Complex64 {
        self.alpha0[k]
    }

    pub fn alpha0_matrix(&self) -> CMat {
        let n = self.mode_count();
        CMat::from_fn(n, n, |i, j| if i == j { self.alpha0[i] } else { ZERO })
    }

    pub fn alpha1(&self) -> &CMat {
        &self.alpha1
    }

    pub fn alpha2(&self) -> &CMat {
        &self.alpha2
    }

    pub fn beta1(&self) -> &CMat {
        &self.beta1
    }

    pub fn beta2(&self) -> &CMat {
        &self.beta2
    }

    /// Residuals of the order-by-order identity expansion:
    ///   O(1):   alpha0 alpha0* = 1
    ///   O(h):   alpha0 alpha1^dag + alpha1 alpha0* = 0
    ///   O(h^2): alpha0 alpha2^dag + alpha2 alpha0* + alpha1 alpha1^dag - beta1 beta1^dag = 0
    ///   O(h):   alpha0 beta1^T - beta1 alpha0 = 0
    ///   O(h^2): alpha1 beta1^T + alpha0 beta2^T - beta1 alpha1^T - beta2 alpha0 = 0
    pub fn validate_identities(&self) -> IdentityReport {
        let n = self.mode_count();
        let a0 = self.alpha0_matrix();
        let a0c = a0.conjugate();
        let r0 = (&a0 * &a0c - CMat::identity(n, n)).norm();
        let r1 = (&a0 * self.alpha1.adjoint() + &self.alpha1 * &a0c).norm();
        let r2 = (&a0 * self.alpha2.adjoint()
            + &self.alpha2 * &a0c
            + &self.alpha1 * self.alpha1.adjoint()
            - &self.beta1 * self.beta1.adjoint())
        .norm();
        let r3 = (&a0 * self.beta1.transpose() - &self.beta1 * &a0).norm();
        let r4 = (&self.alpha1 * self.beta1.transpose() + &a0 * self.beta2.transpose()
            - &self.beta1 * self.alpha1.transpose()
            - &self.beta2 * &a0)
            .norm();
        IdentityReport {
            residuals: vec![
                ("order 0: alpha0 alpha0* = 1".into(), r0),
                (
                    "order 1 alpha: alpha0 alpha1^dag + alpha1 alpha0* = 0".into(),
                    r1,
                ),
                (
                    "order 2 alpha: alpha0 alpha2^dag + alpha2 alpha0* + alpha1 alpha1^dag - beta1 beta1^dag = 0"
                        .into(),
                    r2,
                ),
                ("order 1 beta: alpha0 beta1^T - beta1 alpha0 = 0".into(), r3),
                (
                    "order 2 beta: alpha1 beta1^T + alpha0 beta2^T - beta1 alpha1^T - beta2 alpha0 = 0"
                        .into(),
                    r4,
                ),
            ],
        }
    }

    /// Largest modulus on the diagonal of alpha1 (zero for admissible series).
    pub fn alpha1_diagonal_max(&self) -> f64 {
        (0..self.mode_count())
            .map(|i| self.alpha1[(i, i)].norm())
            .fold(0.0, f64::max)
    }

    /// Exact transform at parameter value h obtained by resumming the series
    /// generator: S(h) = S0 exp(h K) with the generator blocks recovered from
    /// the first-order coefficients (A = alpha0* alpha1, B = alpha0* beta1).
    pub fn resummed(&self, h: f64) -> BogoliubovTransform {
        let n = self.mode_count();
        let a0_inv = CMat::from_fn(n, n, |i, j| {
            if i == j {
                self.alpha0[i].conj()
            } else {
                ZERO
            }
        });
        let a = &a0_inv * &self.alpha1;
        let b = &a0_inv * &self.beta1;
        let mut k = CMat::zeros(2 * n, 2 * n);
        k.view_mut((0, 0), (n, n)).copy_from(&a);
        k.view_mut((0, n), (n, n)).copy_from(&b);
        k.view_mut((n, 0), (n, n)).copy_from(&b.conjugate());
        k.view_mut((n, n), (n, n)).copy_from(&a.conjugate());
        let e = linalg::expm(&k.map(|z| z * c(h, 0.0)));
        let mut s0 = CMat::zeros(2 * n, 2 * n);
        for i in 0..n {
            s0[(i, i)] = self.alpha0[i];
            s0[(n + i, n + i)] = self.alpha0[i].conj();
        }
        let s = s0 * e;
        BogoliubovTransform {
            alpha: s.view((0, 0), (n, n)).into(),
            beta: s.view((0, n), (n, n)).into(),
        }
    }
}

/// Build a series from an infinitesimally symplectic generator
/// K = [[A, B], [B*, A*]] with A anti-Hermitian (zero diagonal) and B
/// symmetric: S(h) = S0 exp(h K) truncated at second order. The orders are
///   alpha1 = alpha0 A, beta1 = alpha0 B,
///   alpha2 = alpha0 (A^2 + B B*)/2, beta2 = alpha0 (A B + B A*)/2,
/// which satisfy the identity expansion exactly (the diagonal of alpha2 picks
/// the real correction fixed by the order-2 identity).
pub fn from_generator(
    alpha0: Vec<Complex64>,
    a: CMat,
    b: CMat,
    h: f64,
) -> Result<PerturbativeBogoliubov, BogoliubovError> {
    let n = alpha0.len();
    if a.nrows() != n || a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(BogoliubovError::InvalidGenerator(format!(
            "blocks must be {n}x{n}"
        )));
    }
    let anti = (&a + a.adjoint()).norm();
    if anti > 1e-12 * linalg::max_abs(&a).max(1.0) {
        return Err(BogoliubovError::InvalidGenerator(format!(
            "A must be anti-Hermitian, defect {anti:.3e}"
        )));
    }
    for i in 0..n {
        if a[(i, i)].norm() > 0.0 {
            return Err(BogoliubovError::InvalidGenerator(
                "A must have an exactly zero diagonal".into(),
            ));
        }
    }
    let sym = linalg::symmetry_defect(&b);
    if sym > 1e-12 * linalg::max_abs(&b).max(1.0) {
        return Err(BogoliubovError::InvalidGenerator(format!(
            "B must be symmetric, defect {sym:.3e}"
        )));
    }
    let a0 = CMat::from_fn(n, n, |i, j| if i == j { alpha0[i] } else { ZERO });
    let alpha1 = &a0 * &a;
    let beta1 = &a0 * &b;
    let alpha2 = &a0 * (&a * &a + &b * b.conjugate()).map(|z| z * c(0.5, 0.0));
    let beta2 = &a0 * (&a * &b + &b * a.conjugate()).map(|z| z * c(0.5, 0.0));
    PerturbativeBogoliubov::new(alpha0, alpha1, alpha2, beta1, beta2, h)
}

/// Deterministic random series: generator entries are drawn from a seeded
/// stream, so a fixed seed reproduces the coefficients bit for bit. The
/// output passes the identity expansion at 1e-12 and has an exactly zero
/// alpha1 diagonal.
pub fn random_symplectic_series(seed: u64, spec: ModeSpec, h: f64) -> PerturbativeBogoliubov {
    let n = spec.count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = CMat::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            a[(i, j)] = z;
            a[(j, i)] = -z.conj();
        }
    }
    let mut b = CMat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            b[(i, j)] = z;
            b[(j, i)] = z;
        }
    }
    let alpha0: Vec<Complex64> = (0..n)
        .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    from_generator(alpha0, a, b, h).expect("generator blocks are valid by construction")
}

/// Per-order contributions to the evolved covariance matrix blocks,
/// sigma(h) = sigma0 + sigma1 h + sigma2 h^2 + O(h^3).
#[derive(Debug, Clone)]
pub struct PerturbedState {
    pub u0: CMat,
    pub u1: CMat,
    pub u2: CMat,
    pub v0: CMat,
    pub v1: CMat,
    pub v2: CMat,
    h: f64,
    base: CovarianceMatrix,
}

impl PerturbedState {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn base(&self) -> &CovarianceMatrix {
        &self.base
    }

    /// Assemble the state at the series' own h.
    pub fn assemble(&self) -> CovarianceMatrix {
        self.assemble_at(self.h)
    }

    /// Assemble u0 + u1 h + u2 h^2 and v0 + v1 h + v2 h^2 at a given h.
    pub fn assemble_at(&self, h: f64) -> CovarianceMatrix {
        let hc = c(h, 0.0);
        let h2 = c(h * h, 0.0);
        let u = &self.u0 + &self.u1 * hc + &self.u2 * h2;
        let v = &self.v0 + &self.v1 * hc + &self.v2 * h2;
        CovarianceMatrix::from_blocks_unchecked(u, v)
    }
}

const SERIES_GATE_TOL: f64 = 1e-9;

/// Evolve a state through a perturbative series, collecting the final-state
/// blocks order by order:
///   U0 = a0* U a0,                      V0 = a0* V a0*
///   U1 = a1^dag U a0 + a0* U a1 + a0* V b1* + b1^T V* a0
///   V1 = a1^dag V a0* + a0* V a1* + a0* U b1 + b1^T U* a0*
///   U2 = a0* U a2 + a1^dag U a1 + a2^dag U a0 + b1^T U* b1*
///        + a1^dag V b1* + a0* V b2* + b1^T V* a1 + b2^T V* a0
///   V2 = a0* U b2 + a1^dag U b1 + a0* V a2* + a1^dag V a1*
///        + a2^dag V a0* + b1^T V* b1 + b1^T U* a1* + b2^T U* a0*.
pub fn evolve_perturbative(
    state: &CovarianceMatrix,
    series: &PerturbativeBogoliubov,
) -> Result<PerturbedState, BogoliubovError> {
    if state.mode_count() != series.mode_count() {
        return Err(BogoliubovError::StateDimensionMismatch {
            state: state.mode_count(),
            transform: series.mode_count(),
        });
    }
    let report = series.validate_identities();
    if !report.passes(SERIES_GATE_TOL) {
        return Err(BogoliubovError::IdentityViolation {
            worst: report.worst(),
            tol: SERIES_GATE_TOL,
        });
    }
    let u = state.u();
    let v = state.v();
    let uc = u.conjugate();
    let vc = v.conjugate();
    let a0 = series.alpha0_matrix();
    let a0c = a0.conjugate();
    let a1 = &series.alpha1;
    let a2 = &series.alpha2;
    let b1 = &series.beta1;
    let b2 = &series.beta2;
    let a1d = a1.adjoint();
    let a2d = a2.adjoint();
    let b1t = b1.transpose();
    let b2t = b2.transpose();

    let u0 = &a0c * u * &a0;
    let v0 = &a0c * v * &a0c;
    let u1 = &a1d * u * &a0 + &a0c * u * a1 + &a0c * v * b1.conjugate() + &b1t * &vc * &a0;
    let v1 = &a1d * v * &a0c + &a0c * v * a1.conjugate() + &a0c * u * b1 + &b1t * &uc * &a0c;
    let u2 = &a0c * u * a2
        + &a1d * u * a1
        + &a2d * u * &a0
        + &b1t * &uc * b1.conjugate()
        + &a1d * v * b1.conjugate()
        + &a0c * v * b2.conjugate()
        + &b1t * &vc * a1
        + &b2t * &vc * &a0;
    let v2 = &a0c * u * b2
        + &a1d * u * b1
        + &a0c * v * a2.conjugate()
        + &a1d * v * a1.conjugate()
        + &a2d * v * &a0c
        + &b1t * &vc * b1
        + &b1t * &uc * a1.conjugate()
        + &b2t * &uc * &a0c;

    Ok(PerturbedState {
        u0,
        u1,
        u2,
        v0,
        v1,
        v2,
        h: series.h(),
        base: state.clone(),
    })
}

/// Serialized Bogoliubov coefficients: complex entries as [re, im] pairs,
/// matrices row-major.
#[derive(Debug, Serialize, Deserialize)]
pub struct CoefficientFile {
    pub alpha0: Vec<[f64; 2]>,
    pub alpha1: Vec<Vec<[f64; 2]>>,
    pub alpha2: Vec<Vec<[f64; 2]>>,
    pub beta1: Vec<Vec<[f64; 2]>>,
    pub beta2: Vec<Vec<[f64; 2]>>,
    pub h: f64,
}

fn matrix_from_rows(rows: &[Vec<[f64; 2]>], n: usize, name: &str) -> Result<CMat, BogoliubovError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(BogoliubovError::MalformedCoefficients(format!(
            "{name} must be a {n}x{n} nested array"
        )));
    }
    Ok(CMat::from_fn(n, n, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

impl PerturbativeBogoliubov {
    pub fn from_coefficient_file(file: &CoefficientFile) -> Result<Self, BogoliubovError> {
        let n = file.alpha0.len();
        if n == 0 {
            return Err(BogoliubovError::MalformedCoefficients(
                "alpha0 must be nonempty".into(),
            ));
        }
        let alpha0: Vec<Complex64> = file.alpha0.iter().map(|p| c(p[0], p[1])).collect();
        PerturbativeBogoliubov::new(
            alpha0,
            matrix_from_rows(&file.alpha1, n, "alpha1")?,
            matrix_from_rows(&file.alpha2, n, "alpha2")?,
            matrix_from_rows(&file.beta1, n, "beta1")?,
            matrix_from_rows(&file.beta2, n, "beta2")?,
            file.h,
        )
    }

    pub fn from_json(json: &str) -> Result<Self, BogoliubovError> {
        let file: CoefficientFile = serde_json::from_str(json)
            .map_err(|e| BogoliubovError::MalformedCoefficients(e.to_string()))?;
        Self::from_coefficient_file(&file)
    }

    pub fn to_coefficient_file(&self) -> CoefficientFile {
        let n = self.mode_count();
        let enc = |m: &CMat| -> Vec<Vec<[f64; 2]>> {
            (0..n)
                .map(|i| (0..n).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect()
        };
        CoefficientFile {
            alpha0: self.alpha0.iter().map(|z| [z.re, z.im]).collect(),
            alpha1: enc(&self.alpha1),
            alpha2: enc(&self.alpha2),
            beta1: enc(&self.beta1),
            beta2: enc(&self.beta2),
            h: self.h,
        }
    }
}

/// Evolve and require the result physical.
pub fn evolve_checked(
    state: &CovarianceMatrix,
    transform: &BogoliubovTransform,
) -> Result<CovarianceMatrix, BogoliubovError> {
    let out = evolve(state, transform)?;
    let check = check_physical(&out, 1e-9);
    if !check.is_physical {
        return Err(GaussianError::NonPhysicalState {
            min_eigenvalue: check.min_eigenvalue,
        }
        .into());
    }
    Ok(out)
}
