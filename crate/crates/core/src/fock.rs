//! Brute-force verification oracle in a truncated Fock basis.
//!
//! States are dense density matrices on up to three modes, each truncated at
//! d levels. Thermal states are Boltzmann-weighted diagonals; squeezed states
//! apply the matrix exponential of the truncated quadratic generator to the
//! vacuum (or to a thermal background). Covariance matrices, occupations and
//! entropies are recomputed from ladder-operator expectation values, fully
//! independent of the Gaussian formalism.
//!
//! This module is deliberately the slow reference; callers keep d^N small.

use num_complex::Complex64;
use thiserror::Error;

use crate::gaussian::CovarianceMatrix;
use crate::linalg::{self, c, CMat, CVec, ZERO};
use crate::modes::{ModeError, ModeSpec, SqueezeSpec, ThermalParam};

#[derive(Debug, Error)]
pub enum FockError {
    #[error(transparent)]
    Mode(#[from] ModeError),
    #[error("total dimension {dim} exceeds the memory budget {budget}")]
    MemoryBudgetExceeded { dim: usize, budget: usize },
    #[error("state not converged: top-level population {leakage:.3e} exceeds 1e-6")]
    Unconverged { leakage: f64 },
    #[error("oracle supports at most 3 modes, got {0}")]
    TooManyModes(usize),
    #[error("truncation must be at least 2 levels, got {0}")]
    TruncationTooSmall(usize),
}

impl FockError {
    pub fn name(&self) -> &'static str {
        match self {
            FockError::Mode(e) => e.name(),
            FockError::MemoryBudgetExceeded { .. } => "MemoryBudgetExceeded",
            FockError::Unconverged { .. } => "Unconverged",
            FockError::TooManyModes(_) => "TooManyModes",
            FockError::TruncationTooSmall(_) => "TruncationTooSmall",
        }
    }
}

const MAX_TOTAL_DIM: usize = 4096;
const LEAKAGE_TOL: f64 = 1e-6;
const TRACE_DRIFT_TOL: f64 = 1e-8;

/// Multi-mode Fock basis with per-mode truncation d; mode 0 is the fastest
/// index (stride 1).
#[derive(Debug, Clone, Copy)]
struct Basis {
    modes: usize,
    d: usize,
}

impl Basis {
    fn total_dim(&self) -> usize {
        self.d.pow(self.modes as u32)
    }

    fn stride(&self, mode: usize) -> usize {
        self.d.pow(mode as u32)
    }

    fn occupation(&self, idx: usize, mode: usize) -> usize {
        (idx / self.stride(mode)) % self.d
    }
}

/// Sparse anti-Hermitian generator, stored by target row.
struct SparseGenerator {
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseGenerator {
    fn new(dim: usize) -> Self {
        SparseGenerator {
            rows: vec![Vec::new(); dim],
        }
    }

    fn push(&mut self, target: usize, source: usize, coeff: Complex64) {
        self.rows[target].push((source, coeff));
    }

    fn inf_norm(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.iter().map(|(_, z)| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn apply(&self, x: &CVec, scale: f64) -> CVec {
        let mut y = CVec::zeros(x.len());
        for (t, row) in self.rows.iter().enumerate() {
            let mut acc = ZERO;
            for &(s, z) in row {
                acc += z * x[s];
            }
            y[t] = acc * c(scale, 0.0);
        }
        y
    }

    /// exp(G) v by scaling-and-squaring with a Taylor kernel on the vector.
    fn expm_apply(&self, v: &CVec) -> CVec {
        let norm = self.inf_norm();
        let s = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as u32
        } else {
            0
        };
        let scale = 1.0 / 2.0f64.powi(s as i32);
        let mut out = v.clone();
        for _ in 0..(1u64 << s) {
            let mut acc = out.clone();
            let mut term = out.clone();
            for k in 1..=24 {
                term = self.apply(&term, scale / k as f64);
                acc += &term;
                if term.norm() < 1e-18 * acc.norm().max(1.0) {
                    break;
                }
            }
            out = acc;
        }
        out
    }
}

/// Density matrix on a truncated Fock space.
#[derive(Debug, Clone)]
pub struct FockState {
    basis: Basis,
    rho: CMat,
    trace_drift: f64,
}

impl FockState {
    pub fn mode_count(&self) -> usize {
        self.basis.modes
    }

    pub fn truncation(&self) -> usize {
        self.basis.d
    }

    pub fn rho(&self) -> &CMat {
        &self.rho
    }

    /// |tr(rho) - 1| accumulated through construction and evolution.
    pub fn trace_drift(&self) -> f64 {
        self.trace_drift
    }

    /// Largest per-mode population of the top Fock level.
    pub fn leakage(&self) -> f64 {
        let b = self.basis;
        (0..b.modes)
            .map(|m| {
                (0..b.total_dim())
                    .filter(|&i| b.occupation(i, m) == b.d - 1)
                    .map(|i| self.rho[(i, i)].re)
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn converged(&self) -> bool {
        self.leakage() <= LEAKAGE_TOL && self.trace_drift <= TRACE_DRIFT_TOL
    }

    fn require_converged(&self) -> Result<(), FockError> {
        if self.converged() {
            Ok(())
        } else {
            Err(FockError::Unconverged {
                leakage: self.leakage(),
            })
        }
    }

    /// tr(rho a^dag_m a_n), modes 1-based.
    fn adag_a(&self, m: usize, n: usize) -> Complex64 {
        let b = self.basis;
        let (m, n) = (m - 1, n - 1);
        let (sm, sn) = (b.stride(m), b.stride(n));
        let mut acc = ZERO;
        for s in 0..b.total_dim() {
            let occ_n = b.occupation(s, n);
            if occ_n == 0 {
                continue;
            }
            let mid = s - sn;
            let occ_m = b.occupation(mid, m);
            if occ_m == b.d - 1 {
                continue; // raising would leave the truncated space
            }
            let t = mid + sm;
            let amp = (occ_n as f64).sqrt() * ((occ_m + 1) as f64).sqrt();
            acc += self.rho[(s, t)] * c(amp, 0.0);
        }
        acc
    }

    /// tr(rho a_n a_m), modes 1-based.
    fn a_a(&self, n: usize, m: usize) -> Complex64 {
        let b = self.basis;
        let (n, m) = (n - 1, m - 1);
        let (sn, sm) = (b.stride(n), b.stride(m));
        let mut acc = ZERO;
        for s in 0..b.total_dim() {
            let occ_m = b.occupation(s, m);
            if occ_m == 0 {
                continue;
            }
            let mid = s - sm;
            let occ_n = b.occupation(mid, n);
            if occ_n == 0 {
                continue;
            }
            let t = mid - sn;
            let amp = (occ_m as f64).sqrt() * (occ_n as f64).sqrt();
            acc += self.rho[(s, t)] * c(amp, 0.0);
        }
        acc
    }

    /// Mean occupation of 1-based mode k.
    pub fn mean_occupation(&self, k: usize) -> f64 {
        self.adag_a(k, k).re
    }

    /// Keep the listed 1-based modes, tracing out the rest.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<FockState, FockError> {
        let b = self.basis;
        let mut keep0: Vec<usize> = Vec::new();
        for &k in keep {
            if k < 1 || k > b.modes {
                return Err(ModeError::InvalidModeIndex {
                    index: k,
                    count: b.modes,
                }
                .into());
            }
            keep0.push(k - 1);
        }
        keep0.sort_unstable();
        keep0.dedup();
        let traced: Vec<usize> = (0..b.modes).filter(|m| !keep0.contains(m)).collect();
        let kept_basis = Basis {
            modes: keep0.len(),
            d: b.d,
        };
        let env_basis = Basis {
            modes: traced.len(),
            d: b.d,
        };
        let kd = kept_basis.total_dim();
        let env_dim = env_basis.total_dim();
        let compose = |kept_idx: usize, env_idx: usize| -> usize {
            let mut idx = 0;
            for (pos, &m) in keep0.iter().enumerate() {
                idx += kept_basis.occupation(kept_idx, pos) * b.stride(m);
            }
            for (pos, &m) in traced.iter().enumerate() {
                idx += env_basis.occupation(env_idx, pos) * b.stride(m);
            }
            idx
        };
        let mut rho = CMat::zeros(kd, kd);
        for i in 0..kd {
            for j in 0..kd {
                let mut acc = ZERO;
                for e in 0..env_dim {
                    acc += self.rho[(compose(i, e), compose(j, e))];
                }
                rho[(i, j)] = acc;
            }
        }
        Ok(FockState {
            basis: kept_basis,
            rho,
            trace_drift: self.trace_drift,
        })
    }
}

fn budget_check(spec: ModeSpec, d: usize) -> Result<Basis, FockError> {
    if spec.count() > 3 {
        return Err(FockError::TooManyModes(spec.count()));
    }
    if d < 2 {
        return Err(FockError::TruncationTooSmall(d));
    }
    let basis = Basis {
        modes: spec.count(),
        d,
    };
    if basis.total_dim() > MAX_TOTAL_DIM {
        return Err(FockError::MemoryBudgetExceeded {
            dim: basis.total_dim(),
            budget: MAX_TOTAL_DIM,
        });
    }
    Ok(basis)
}

/// Per-mode thermal weights on the truncated ladder, renormalized to trace 1.
fn thermal_weights(thermal: ThermalParam, k: usize, d: usize) -> Vec<f64> {
    if thermal.xi() == 0.0 {
        let mut w = vec![0.0; d];
        w[0] = 1.0;
        return w;
    }
    let q = (-(k as f64) / thermal.xi()).exp();
    let norm: f64 = (0..d).map(|n| q.powi(n as i32)).sum();
    (0..d).map(|n| q.powi(n as i32) / norm).collect()
}

/// Single-mode squeeze generator (zeta a^dag^2 - zeta* a^2)/2 on mode k
/// (1-based) of the composite basis, zeta = r e^{i theta}.
fn sms_generator(basis: Basis, k: usize, r: f64, theta: f64) -> SparseGenerator {
    let zeta = Complex64::from_polar(r, theta);
    let mut g = SparseGenerator::new(basis.total_dim());
    let stride = basis.stride(k - 1);
    for s in 0..basis.total_dim() {
        let occ = basis.occupation(s, k - 1);
        if occ + 2 < basis.d {
            let amp = (((occ + 1) * (occ + 2)) as f64).sqrt();
            g.push(s + 2 * stride, s, zeta * c(0.5 * amp, 0.0));
        }
        if occ >= 2 {
            let amp = ((occ * (occ - 1)) as f64).sqrt();
            g.push(s - 2 * stride, s, -zeta.conj() * c(0.5 * amp, 0.0));
        }
    }
    g
}

/// Two-mode squeeze generator zeta a^dag_k a^dag_l - zeta* a_k a_l on the
/// 1-based pair (k, l), zeta = r e^{i theta}.
fn tms_generator(basis: Basis, k: usize, l: usize, r: f64, theta: f64) -> SparseGenerator {
    let zeta = Complex64::from_polar(r, theta);
    let mut g = SparseGenerator::new(basis.total_dim());
    let (sk, sl) = (basis.stride(k - 1), basis.stride(l - 1));
    for s in 0..basis.total_dim() {
        let (ok, ol) = (basis.occupation(s, k - 1), basis.occupation(s, l - 1));
        if ok + 1 < basis.d && ol + 1 < basis.d {
            let amp = (((ok + 1) * (ol + 1)) as f64).sqrt();
            g.push(s + sk + sl, s, zeta * c(amp, 0.0));
        }
        if ok >= 1 && ol >= 1 {
            let amp = ((ok * ol) as f64).sqrt();
            g.push(s - sk - sl, s, -zeta.conj() * c(amp, 0.0));
        }
    }
    g
}

/// rho -> U rho U^dag with U = exp(G), applied column by column.
fn apply_unitary(gen: &SparseGenerator, rho: &CMat) -> CMat {
    let dim = rho.nrows();
    // diagonal input (thermal/vacuum backgrounds): U diag(p) U^dag is a
    // weighted sum of outer products over the populated basis states only
    let off_diag_max = (0..dim)
        .flat_map(|i| (0..dim).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| rho[(i, j)].norm())
        .fold(0.0, f64::max);
    if off_diag_max == 0.0 {
        let mut out = CMat::zeros(dim, dim);
        for j in 0..dim {
            let p = rho[(j, j)].re;
            if p <= 1e-16 {
                continue;
            }
            let mut e = CVec::zeros(dim);
            e[j] = c(1.0, 0.0);
            let u_col = gen.expm_apply(&e);
            let scaled = u_col.map(|z| z * c(p, 0.0));
            out += &scaled * u_col.adjoint();
        }
        return out;
    }
    let mut left = CMat::zeros(dim, dim);
    for j in 0..dim {
        let col = CVec::from_iterator(dim, (0..dim).map(|i| rho[(i, j)]));
        let out = gen.expm_apply(&col);
        for i in 0..dim {
            left[(i, j)] = out[i];
        }
    }
    // (U rho) U^dag = (U (U rho)^dag)^dag
    let left_adj = left.adjoint();
    let mut full = CMat::zeros(dim, dim);
    for j in 0..dim {
        let col = CVec::from_iterator(dim, (0..dim).map(|i| left_adj[(i, j)]));
        let out = gen.expm_apply(&col);
        for i in 0..dim {
            full[(i, j)] = out[i];
        }
    }
    full.adjoint()
}

/// Build the oracle state: thermal background at temperature parameter xi
/// with optional squeezing applied by the exponential of the truncated
/// quadratic generator. Squeezed modes start from vacuum.
pub fn build_oracle_state(
    spec: ModeSpec,
    thermal: ThermalParam,
    squeeze: Option<&SqueezeSpec>,
    d: usize,
) -> Result<FockState, FockError> {
    let basis = budget_check(spec, d)?;
    if let Some(sq) = squeeze {
        sq.validate(spec)?;
    }
    let squeezed_modes: Vec<usize> = match squeeze {
        Some(SqueezeSpec::SingleMode(list)) => list.iter().map(|m| m.index).collect(),
        Some(SqueezeSpec::TwoMode { pair, .. }) => vec![pair.0, pair.1],
        None => Vec::new(),
    };
    // thermal (or vacuum, for squeezed modes) product diagonal
    let dim = basis.total_dim();
    let mut diag = vec![1.0f64; dim];
    for mode in 1..=basis.modes {
        let weights = if squeezed_modes.contains(&mode) {
            thermal_weights(ThermalParam::ZERO, mode, d)
        } else {
            thermal_weights(thermal, mode, d)
        };
        for (idx, w) in diag.iter_mut().enumerate() {
            *w *= weights[basis.occupation(idx, mode - 1)];
        }
    }
    let mut rho = CMat::zeros(dim, dim);
    for (i, w) in diag.iter().enumerate() {
        rho[(i, i)] = c(*w, 0.0);
    }
    let mut state = FockState {
        basis,
        rho,
        trace_drift: 0.0,
    };
    match squeeze {
        Some(SqueezeSpec::SingleMode(list)) => {
            for m in list {
                state = apply_generator(state, sms_generator(basis, m.index, m.r, m.theta));
            }
        }
        Some(SqueezeSpec::TwoMode { pair, r, theta }) => {
            state = apply_generator(state, tms_generator(basis, pair.0, pair.1, *r, *theta));
        }
        None => {}
    }
    Ok(state)
}

fn apply_generator(state: FockState, gen: SparseGenerator) -> FockState {
    let rho = apply_unitary(&gen, &state.rho);
    let trace: f64 = (0..rho.nrows()).map(|i| rho[(i, i)].re).sum();
    FockState {
        basis: state.basis,
        rho,
        trace_drift: state.trace_drift + (trace - 1.0).abs(),
    }
}

/// Apply the two-mode squeeze unitary exp(zeta a^dag_k a^dag_l - zeta* a_k a_l)
/// with zeta = r e^{i theta}; this realizes the exact Bogoliubov transform
/// with alpha = diag(cosh r) and beta_kl = beta_lk = e^{i theta} sinh r on the
/// pair, matching the Gaussian-formalism evolution of the same transform.
pub fn apply_two_mode_squeeze(
    state: &FockState,
    pair: (usize, usize),
    r: f64,
    theta: f64,
) -> Result<FockState, FockError> {
    let b = state.basis;
    for k in [pair.0, pair.1] {
        if k < 1 || k > b.modes {
            return Err(ModeError::InvalidModeIndex {
                index: k,
                count: b.modes,
            }
            .into());
        }
    }
    if pair.0 == pair.1 {
        return Err(ModeError::DegeneratePair.into());
    }
    Ok(apply_generator(
        state.clone(),
        tms_generator(b, pair.0, pair.1, r, theta),
    ))
}

/// Apply the single-mode squeeze unitary exp((zeta a^dag^2 - zeta* a^2)/2).
pub fn apply_single_mode_squeeze(
    state: &FockState,
    mode: usize,
    r: f64,
    theta: f64,
) -> Result<FockState, FockError> {
    let b = state.basis;
    if mode < 1 || mode > b.modes {
        return Err(ModeError::InvalidModeIndex {
            index: mode,
            count: b.modes,
        }
        .into());
    }
    Ok(apply_generator(
        state.clone(),
        sms_generator(b, mode, r, theta),
    ))
}

/// Covariance matrix recomputed from ladder-operator expectation values:
/// U_nm = delta_nm + 2 <a^dag_m a_n>, V_nm = <a_n a_m + a_m a_n>.
pub fn oracle_covariance(state: &FockState) -> Result<CovarianceMatrix, FockError> {
    state.require_converged()?;
    let n = state.basis.modes;
    let mut u = CMat::zeros(n, n);
    let mut v = CMat::zeros(n, n);
    for i in 1..=n {
        for j in 1..=n {
            let delta = if i == j { 1.0 } else { 0.0 };
            u[(i - 1, j - 1)] = c(delta, 0.0) + state.adag_a(j, i) * c(2.0, 0.0);
            v[(i - 1, j - 1)] = state.a_a(i, j) + state.a_a(j, i);
        }
    }
    Ok(CovarianceMatrix::from_blocks_unchecked(u, v))
}

/// Von Neumann entropy -sum lambda ln lambda of the reduced density matrix on
/// the listed 1-based modes.
pub fn oracle_entropy(state: &FockState, modes: &[usize]) -> Result<f64, FockError> {
    state.require_converged()?;
    let reduced = if modes.len() == state.basis.modes {
        state.clone()
    } else {
        state.partial_trace(modes)?
    };
    // Drop the unpopulated subspace before diagonalizing. For a PSD matrix
    // |rho_ij|^2 <= rho_ii rho_jj, so rows with vanishing diagonal carry no
    // spectral weight; this keeps the eigensolve small and well conditioned.
    let dim = reduced.rho.nrows();
    let kept: Vec<usize> = (0..dim)
        .filter(|&i| reduced.rho[(i, i)].re > 1e-18)
        .collect();
    let sub = CMat::from_fn(kept.len(), kept.len(), |i, j| {
        reduced.rho[(kept[i], kept[j])]
    });
    let vals = linalg::hermitian_eigenvalues(&sub);
    Ok(vals
        .iter()
        .filter(|&&l| l > 1e-14)
        .map(|&l| -l * l.ln())
        .sum())
}
