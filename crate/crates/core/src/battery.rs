//! Battery-charging bounds: the perturbed single-mode reduced state of a
//! driven thermal cavity, its local temperature shift, the Carnot cycle
//! efficiency and the bound on storable work per cycle.
//!
//! The reduced state of mode n after a perturbative transform is locally
//! thermal up to a weak single-mode squeezing,
//!   sigma_n(h) = nu_n [[1 + 2 A_n h^2, 2 B_n h^2], [2 B_n* h^2, 1 + 2 A_n h^2]],
//! which leaves the mean occupation of the thermal part unchanged. The
//! population shift A_n raises the local temperature by
//! delta T_n / T = 2 (A_n / n) xi sinh(n / xi), bounding a work-extraction
//! cycle against a reservoir at the original temperature by the Carnot value.
//! The storage bound per cycle is sixth order in h and factorizes exactly as
//! eta_cyc * W4 * h^4 through sinh(2y) = 2 sinh y cosh y.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::bogoliubov::{BogoliubovError, PerturbativeBogoliubov};
use crate::gaussian::CovarianceMatrix;
use crate::linalg::{c, CMat};
use crate::modes::{ModeError, ThermalParam};

#[derive(Debug, Error)]
pub enum BatteryError {
    #[error("zero-temperature limit unsupported: the local-temperature map diverges as xi -> 0")]
    ZeroTemperatureUnsupported,
    #[error("population shift A_n must be nonnegative, got {0}")]
    NegativePopulationShift(f64),
    #[error(transparent)]
    Mode(#[from] ModeError),
    #[error(transparent)]
    Bogoliubov(#[from] BogoliubovError),
}

impl BatteryError {
    pub fn name(&self) -> &'static str {
        match self {
            BatteryError::ZeroTemperatureUnsupported => "ZeroTemperatureUnsupported",
            BatteryError::NegativePopulationShift(_) => "NegativePopulationShift",
            BatteryError::Mode(e) => e.name(),
            BatteryError::Bogoliubov(e) => e.name(),
        }
    }
}

/// Validity warning: the perturbative local-temperature map needs these
/// products small; values are reported, never enforced.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SmallnessWarning {
    /// delta T_n / T times h^2; the local-temperature shift must stay small.
    pub delta_t_times_h2: f64,
    /// exp(n/xi) h^2; the low-temperature expansion control product.
    pub exp_over_xi_times_h2: f64,
}

impl SmallnessWarning {
    pub fn in_regime(&self) -> bool {
        self.delta_t_times_h2 < 0.1 && self.exp_over_xi_times_h2 < 0.1
    }
}

/// Decomposition of the perturbed single-mode reduced state.
#[derive(Debug, Clone)]
pub struct ReducedModeState {
    pub a_n: f64,
    pub b_n: Complex64,
    pub nu_n: f64,
    /// 1x1 covariance blocks of the reduced state.
    pub sigma: CovarianceMatrix,
    pub delta_t_over_t: f64,
    pub warning: SmallnessWarning,
}

/// Carnot-bound arithmetic for one extraction cycle on mode n.
#[derive(Debug, Clone, Serialize)]
pub struct BatteryCycleReport {
    pub n: usize,
    pub xi: f64,
    pub h: f64,
    pub a_n: f64,
    #[serde(skip)]
    pub b_n: Complex64,
    #[serde(skip)]
    pub nu_n: f64,
    pub delta_t_over_t: f64,
    pub eta_cyc: f64,
    pub w4_n: f64,
    pub w_c_bound_over_kbt: f64,
    #[serde(skip)]
    pub warning: SmallnessWarning,
}

impl BatteryCycleReport {
    pub const CSV_HEADER: &'static str =
        "n,xi,h,a_n,delta_t_over_t,eta_cyc,w4_n,w_c_bound_over_kbt";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.n,
            self.xi,
            self.h,
            self.a_n,
            self.delta_t_over_t,
            self.eta_cyc,
            self.w4_n,
            self.w_c_bound_over_kbt
        )
    }
}

/// Population shift and squeezing amplitude of the reduced state of 1-based
/// mode n after the series acts on a thermal state at temperature xi:
///   A_n = (1/2) sum_m (1 + nu_m/nu_n) |beta1_mn|^2
///       + (1/2) sum_m (1 - nu_m/nu_n) |alpha1_mn|^2
///   B_n = sum_m (nu_m/nu_n) alpha1*_mn beta1_mn + alpha0*_nn beta2_nn
/// with the local temperature shift
///   delta T_n / T = 2 (A_n / n) xi sinh(n / xi).
pub fn reduced_state_decomposition(
    series: &PerturbativeBogoliubov,
    xi: ThermalParam,
    n: usize,
) -> Result<ReducedModeState, BatteryError> {
    if xi.xi() == 0.0 {
        return Err(BatteryError::ZeroTemperatureUnsupported);
    }
    let modes = series.mode_count();
    if n < 1 || n > modes {
        return Err(ModeError::InvalidModeIndex {
            index: n,
            count: modes,
        }
        .into());
    }
    let i = n - 1;
    let nu_n = xi.nu(n);
    let mut a_n = 0.0;
    let mut b_n = series.alpha0(i).conj() * series.beta2()[(i, i)];
    for m in 0..modes {
        let ratio = xi.nu(m + 1) / nu_n;
        a_n += 0.5 * (1.0 + ratio) * series.beta1()[(m, i)].norm_sqr();
        a_n += 0.5 * (1.0 - ratio) * series.alpha1()[(m, i)].norm_sqr();
        b_n += series.alpha1()[(m, i)].conj() * series.beta1()[(m, i)] * c(ratio, 0.0);
    }
    let h = series.h();
    let h2 = h * h;
    let diag = c(nu_n * (1.0 + 2.0 * a_n * h2), 0.0);
    let off = b_n * c(2.0 * nu_n * h2, 0.0);
    let sigma = CovarianceMatrix::new(
        CMat::from_element(1, 1, diag),
        CMat::from_element(1, 1, off),
    )
    .expect("1x1 blocks are structurally valid");
    let delta_t_over_t = 2.0 * (a_n / n as f64) * xi.xi() * (n as f64 / xi.xi()).sinh();
    let warning = SmallnessWarning {
        delta_t_times_h2: delta_t_over_t * h2,
        exp_over_xi_times_h2: (n as f64 / xi.xi()).exp() * h2,
    };
    Ok(ReducedModeState {
        a_n,
        b_n,
        nu_n,
        sigma,
        delta_t_over_t,
        warning,
    })
}

/// Carnot-bound arithmetic for one cycle:
///   eta_cyc = 2 (A_n / n) xi sinh(n/xi) h^2
///   W4_n    = 2 A_n^2 cosh^2(n/xi)
///   W_c / k_B T <= 2 A_n^3 (xi/n) sinh(2n/xi) cosh(n/xi) h^6,
/// with the identity bound = eta_cyc * W4_n * h^4 holding exactly.
pub fn cycle_bound(
    a_n: f64,
    n: usize,
    xi: ThermalParam,
    h: f64,
) -> Result<BatteryCycleReport, BatteryError> {
    if xi.xi() == 0.0 {
        return Err(BatteryError::ZeroTemperatureUnsupported);
    }
    if a_n < 0.0 {
        return Err(BatteryError::NegativePopulationShift(a_n));
    }
    let x = n as f64 / xi.xi();
    let h2 = h * h;
    let delta_t_over_t = 2.0 * (a_n / n as f64) * xi.xi() * x.sinh();
    let eta_cyc = delta_t_over_t * h2;
    let w4_n = 2.0 * a_n * a_n * x.cosh() * x.cosh();
    let w_c_bound_over_kbt =
        2.0 * a_n.powi(3) * (xi.xi() / n as f64) * (2.0 * x).sinh() * x.cosh() * h.powi(6);
    Ok(BatteryCycleReport {
        n,
        xi: xi.xi(),
        h,
        a_n,
        b_n: Complex64::new(0.0, 0.0),
        nu_n: xi.nu(n),
        delta_t_over_t,
        eta_cyc,
        w4_n,
        w_c_bound_over_kbt,
        warning: SmallnessWarning {
            delta_t_times_h2: delta_t_over_t * h2,
            exp_over_xi_times_h2: x.exp() * h2,
        },
    })
}

/// Full cycle report from a series: the population shift of mode n feeds the
/// Carnot-bound arithmetic directly.
pub fn cycle_bound_from_series(
    series: &PerturbativeBogoliubov,
    xi: ThermalParam,
    n: usize,
) -> Result<BatteryCycleReport, BatteryError> {
    let reduced = reduced_state_decomposition(series, xi, n)?;
    let mut report = cycle_bound(reduced.a_n, n, xi, series.h())?;
    report.b_n = reduced.b_n;
    report.warning = reduced.warning;
    Ok(report)
}
