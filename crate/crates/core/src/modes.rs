//! Mode bookkeeping: cavity spectrum, system/environment partitions, the
//! dimensionless temperature parameter and squeezing descriptions.
//!
//! Mode indices are 1-based throughout the public API; mode k has
//! dimensionless frequency k.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModeError {
    #[error("mode count must be at least 1")]
    EmptySpectrum,
    #[error("mode index {index} out of range 1..={count}")]
    InvalidModeIndex { index: usize, count: usize },
    #[error("system and environment overlap on mode {index}")]
    PartitionOverlap { index: usize },
    #[error("partition does not cover mode {index}")]
    PartitionIncomplete { index: usize },
    #[error("squeezing parameter r must be nonnegative, got {0}")]
    NegativeSqueezing(f64),
    #[error("temperature parameter xi must be nonnegative, got {0}")]
    NegativeTemperature(f64),
    #[error("two-mode squeezing requires two distinct mode indices")]
    DegeneratePair,
}

impl ModeError {
    pub fn name(&self) -> &'static str {
        match self {
            ModeError::EmptySpectrum => "EmptySpectrum",
            ModeError::InvalidModeIndex { .. } => "InvalidModeIndex",
            ModeError::PartitionOverlap { .. } => "PartitionOverlap",
            ModeError::PartitionIncomplete { .. } => "PartitionIncomplete",
            ModeError::NegativeSqueezing(_) => "NegativeSqueezing",
            ModeError::NegativeTemperature(_) => "NegativeTemperature",
            ModeError::DegeneratePair => "DegeneratePair",
        }
    }
}

/// Number of retained cavity modes; mode k carries dimensionless frequency k
/// (energy unit pi*hbar*c/L).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeSpec {
    count: usize,
}

impl ModeSpec {
    pub fn new(count: usize) -> Result<Self, ModeError> {
        if count == 0 {
            return Err(ModeError::EmptySpectrum);
        }
        Ok(ModeSpec { count })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Dimensionless frequency of 1-based mode k.
    pub fn frequency(&self, k: usize) -> f64 {
        debug_assert!(k >= 1 && k <= self.count);
        k as f64
    }

    pub fn contains(&self, k: usize) -> bool {
        k >= 1 && k <= self.count
    }

    pub fn check_index(&self, k: usize) -> Result<(), ModeError> {
        if self.contains(k) {
            Ok(())
        } else {
            Err(ModeError::InvalidModeIndex {
                index: k,
                count: self.count,
            })
        }
    }
}

/// Split of the cavity spectrum into the experimentally accessible System S
/// and the Environment E; the Cavity C is their (disjoint) union.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModePartition {
    system: BTreeSet<usize>,
    environment: BTreeSet<usize>,
}

impl ModePartition {
    pub fn new<I, J>(system: I, environment: J, spec: ModeSpec) -> Result<Self, ModeError>
    where
        I: IntoIterator<Item = usize>,
        J: IntoIterator<Item = usize>,
    {
        let system: BTreeSet<usize> = system.into_iter().collect();
        let environment: BTreeSet<usize> = environment.into_iter().collect();
        for &k in system.iter().chain(environment.iter()) {
            spec.check_index(k)?;
        }
        if let Some(&k) = system.intersection(&environment).next() {
            return Err(ModeError::PartitionOverlap { index: k });
        }
        for k in 1..=spec.count() {
            if !system.contains(&k) && !environment.contains(&k) {
                return Err(ModeError::PartitionIncomplete { index: k });
            }
        }
        Ok(ModePartition {
            system,
            environment,
        })
    }

    pub fn system(&self) -> impl Iterator<Item = usize> + '_ {
        self.system.iter().copied()
    }

    pub fn environment(&self) -> impl Iterator<Item = usize> + '_ {
        self.environment.iter().copied()
    }

    pub fn cavity(&self) -> impl Iterator<Item = usize> + '_ {
        // S and E are disjoint; chain then sort via BTreeSet union semantics
        self.system.union(&self.environment).copied()
    }

    pub fn in_system(&self, k: usize) -> bool {
        self.system.contains(&k)
    }

    pub fn mode_count(&self) -> usize {
        self.system.len() + self.environment.len()
    }

    /// Modes of the labelled set, ascending.
    pub fn set(&self, label: SetLabel) -> Vec<usize> {
        match label {
            SetLabel::System => self.system().collect(),
            SetLabel::Environment => self.environment().collect(),
            SetLabel::Cavity => self.cavity().collect(),
        }
    }
}

/// Which mode set a partition-resolved quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetLabel {
    System,
    Environment,
    Cavity,
}

/// Dimensionless temperature control parameter xi = k_B*T*L/(pi*hbar*c);
/// xi = 0 is zero temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalParam {
    xi: f64,
}

impl ThermalParam {
    pub fn new(xi: f64) -> Result<Self, ModeError> {
        if xi.is_nan() || xi < 0.0 {
            return Err(ModeError::NegativeTemperature(xi));
        }
        Ok(ThermalParam { xi })
    }

    pub const ZERO: ThermalParam = ThermalParam { xi: 0.0 };

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Thermal symplectic eigenvalue nu_k = coth(k / (2 xi)); 1 at xi = 0.
    pub fn nu(&self, k: usize) -> f64 {
        if self.xi == 0.0 {
            1.0
        } else {
            1.0 / (k as f64 / (2.0 * self.xi)).tanh()
        }
    }

    /// Mean thermal occupation of mode k, (nu_k - 1) / 2.
    pub fn mean_occupation(&self, k: usize) -> f64 {
        if self.xi == 0.0 {
            0.0
        } else {
            1.0 / ((k as f64 / self.xi).exp_m1())
        }
    }
}

/// One single-mode squeezing element: mode index, magnitude r and phase theta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezedMode {
    pub index: usize,
    pub r: f64,
    pub theta: f64,
}

/// Squeezing applied on top of the thermal background by the state constructor.
#[derive(Debug, Clone, PartialEq)]
pub enum SqueezeSpec {
    /// Each listed mode is single-mode squeezed; the rest stay thermal.
    SingleMode(Vec<SqueezedMode>),
    /// The pair (k, k') is two-mode squeezed with common (r, theta).
    TwoMode { pair: (usize, usize), r: f64, theta: f64 },
}

impl SqueezeSpec {
    pub fn validate(&self, spec: ModeSpec) -> Result<(), ModeError> {
        match self {
            SqueezeSpec::SingleMode(list) => {
                for m in list {
                    spec.check_index(m.index)?;
                    if m.r < 0.0 {
                        return Err(ModeError::NegativeSqueezing(m.r));
                    }
                }
                Ok(())
            }
            SqueezeSpec::TwoMode { pair, r, .. } => {
                spec.check_index(pair.0)?;
                spec.check_index(pair.1)?;
                if pair.0 == pair.1 {
                    return Err(ModeError::DegeneratePair);
                }
                if *r < 0.0 {
                    return Err(ModeError::NegativeSqueezing(*r));
                }
                Ok(())
            }
        }
    }
}
