//! Bath-contact segments at fixed frequency.
//!
//! On an isochore the triple obeys dA/dt = M·A + c with
//!
//! ```text
//!     ⎛ −Γ    0    0 ⎞        ⎛ Γ⟨H⟩_eq ⎞
//! M = ⎜  0   −Γ  −2ω ⎟ ,  c = ⎜    0    ⎟ ,   Γ = k↓ − k↑,
//!     ⎝  0   2ω   −Γ ⎠        ⎝    0    ⎠
//! ```
//!
//! which integrates in closed form: ⟨H⟩ relaxes exponentially to the
//! equilibrium energy while (⟨L⟩, ⟨D⟩) spiral to zero at angular rate 2ω.

use nalgebra::{Matrix3, Vector3};

use crate::constants::{HBAR, KB};
use crate::medium::{equilibrium_energy, BathSpec, ObservableTriple, SegmentPropagator};
use crate::{Error, Result};

/// One isochore: a bath and a contact duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsochoreSegment {
    pub bath: BathSpec,
    /// Contact time, s.
    pub duration: f64,
}

impl IsochoreSegment {
    pub fn new(bath: BathSpec, duration: f64) -> Result<Self> {
        if !(duration >= 0.0) || !duration.is_finite() {
            return Err(Error::domain(format!(
                "isochore duration must be non-negative, got {duration}"
            )));
        }
        Ok(Self { bath, duration })
    }

    /// Duration 6/Γ, enough for near-complete thermalization
    /// (residual e⁻⁶ ≈ 2.5e-3 of the initial distance to equilibrium).
    pub fn thermalizing(bath: BathSpec) -> Result<Self> {
        let rates = rates_from_bath(&bath);
        Self::new(bath, 6.0 / rates.gamma_cap)
    }
}

/// Excitation/de-excitation rates and the heat conductance Γ = k↓ − k↑.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsochoreRates {
    pub k_down: f64,
    pub k_up: f64,
    pub gamma_cap: f64,
}

/// Build the bath rates from detailed balance, k↑/k↓ = exp[−ħω/(k_B T)].
pub fn rates_from_bath(bath: &BathSpec) -> IsochoreRates {
    let x = HBAR * bath.omega / (KB * bath.temperature);
    // Γ = k↓(1 − e^{−x}) through exp_m1: the plain difference underflows to
    // zero in the high-temperature regime where x is below machine epsilon.
    IsochoreRates {
        k_down: bath.k_down,
        k_up: bath.k_down * (-x).exp(),
        gamma_cap: -bath.k_down * (-x).exp_m1(),
    }
}

/// Closed-form propagation of the triple across one isochore.
pub fn propagate_isochore(initial: &ObservableTriple, seg: &IsochoreSegment) -> ObservableTriple {
    propagator(seg).apply(initial)
}

/// The isochore as an affine map on the triple.
pub fn propagator(seg: &IsochoreSegment) -> SegmentPropagator {
    let gamma = rates_from_bath(&seg.bath).gamma_cap;
    let h_eq = equilibrium_energy(seg.bath.omega, seg.bath.temperature)
        .expect("BathSpec invariants guarantee a valid equilibrium energy");
    let decay = (-gamma * seg.duration).exp();
    let phase = 2.0 * seg.bath.omega * seg.duration;
    let (s, c) = phase.sin_cos();
    let matrix = Matrix3::new(
        decay,
        0.0,
        0.0,
        0.0,
        decay * c,
        -decay * s,
        0.0,
        decay * s,
        decay * c,
    );
    let offset = Vector3::new((1.0 - decay) * h_eq, 0.0, 0.0);
    SegmentPropagator::affine(matrix, offset)
}

/// The generator (M, c) of dA/dt = M·A + c on this bath.
pub fn isochore_generator(bath: &BathSpec) -> (Matrix3<f64>, Vector3<f64>) {
    let gamma = rates_from_bath(bath).gamma_cap;
    let h_eq = equilibrium_energy(bath.omega, bath.temperature)
        .expect("BathSpec invariants guarantee a valid equilibrium energy");
    let w2 = 2.0 * bath.omega;
    let m = Matrix3::new(-gamma, 0.0, 0.0, 0.0, -gamma, -w2, 0.0, w2, -gamma);
    (m, Vector3::new(gamma * h_eq, 0.0, 0.0))
}
