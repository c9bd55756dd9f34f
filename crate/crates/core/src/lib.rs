//! Simulation of confined bosonic quantum fields under Bogoliubov
//! transformations in the covariance-matrix (Gaussian-state) formalism.
//!
//! The crate computes the thermodynamic performance of energy transfer into
//! cavity modes: energy changes per mode partition, entropy changes,
//! extraction efficiency (general and closed-form for thermal, single-mode
//! and two-mode squeezed initial states), battery-charging bounds, and the
//! gravitational-wave-on-BEC scenario. A truncated Fock-space oracle
//! recomputes states and observables independently of the Gaussian formalism
//! for verification at desk scale.
//!
//! Units: natural units with hbar = k_B = 1 and energies in units of
//! pi*hbar*c/L, so mode k has dimensionless frequency k. All temperature
//! dependence enters through the dimensionless parameter xi = k_B*T*L/(pi*hbar*c).
//! Physical-unit conversion lives exclusively in [`gw`].

pub mod battery;
pub mod bogoliubov;
pub mod fock;
pub mod gaussian;
pub mod gw;
pub mod linalg;
pub mod modes;
pub mod sweep;
pub mod thermo;

pub use gaussian::CovarianceMatrix;
pub use modes::{ModePartition, ModeSpec, SetLabel, SqueezeSpec, ThermalParam};
