//! Simulation and analysis toolkit for a reciprocating quantum Otto
//! refrigerator whose working medium is an ensemble of non-interacting
//! harmonic oscillators.
//!
//! The dynamical state of the medium is carried by the expectation values of
//! three operators that close under both the unitary and the dissipative
//! parts of the dynamics: the Hamiltonian ⟨H⟩, the Lagrangian ⟨L⟩ and the
//! position-momentum correlation ⟨D⟩. Every cycle segment therefore acts on a
//! real 3-vector through a 3×3 matrix (plus an affine offset on the
//! bath-coupled segments), and a full cycle is a product of four such maps.
//!
//! The four segments:
//!
//! * **hot isochore** — frequency fixed at ω_h, contact with the hot bath;
//!   exponential relaxation toward thermal equilibrium ([`isochore`]).
//! * **expansion adiabat** — bath-isolated ramp ω_h → ω_c with constant
//!   adiabatic parameter μ = ω̇/ω², subject to external phase and amplitude
//!   noise in the control ([`adiabat`], [`magnus`]).
//! * **cold isochore** — frequency fixed at ω_c, contact with the cold bath.
//! * **compression adiabat** — ramp ω_c → ω_h, same noise channels.
//!
//! [`cycle`] composes the segments, finds the limit cycle, books per-segment
//! heats and work, and evaluates the minimum-temperature bounds that the
//! noise imposes. [`cli`] drives parameter sweeps and emits plot-ready data.

pub mod adiabat;
pub mod cli;
pub mod constants;
pub mod cycle;
mod error;
pub mod isochore;
pub mod magnus;
pub mod medium;
pub mod ode;
pub mod quad;

pub use error::Error;
pub use medium::{
    casimir_form, equilibrium_energy, lagrange_multipliers, thermal_triple, BathSpec,
    LagrangeMultipliers, NoiseSpec, ObservableTriple, SegmentPropagator,
};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
