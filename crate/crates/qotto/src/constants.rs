//! Physical constants (CODATA 2018, exact by SI definition).

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054571817e-34;

/// Boltzmann constant, J/K.
pub const KB: f64 = 1.380649e-23;
