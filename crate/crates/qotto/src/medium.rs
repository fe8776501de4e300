//! Working-medium state, baths, noise strengths, thermal-state construction,
//! Lagrange-multiplier reconstruction and the Casimir quadratic form.
//!
//! The state of the medium is the expectation-value triple
//! A = (⟨H⟩, ⟨L⟩, ⟨D⟩) of the Hamiltonian, the Lagrangian
//! L = P²/2m − mω²Q²/2 and the correlation D = ω(QP+PQ)/2. These close an
//! su(1,1) algebra under the cycle dynamics, so each segment acts on A as an
//! affine map ([`SegmentPropagator`]).

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::constants::{HBAR, KB};
use crate::{Error, Result};

/// coth with a series fallback for small arguments, where 1/tanh would
/// divide two subnormal-adjacent quantities.
pub(crate) fn coth(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 / x + x / 3.0
    } else {
        1.0 / x.tanh()
    }
}

/// arccoth(y) for |y| > 1.
pub(crate) fn arccoth(y: f64) -> f64 {
    (1.0 / y).atanh()
}

/// Expectation values (⟨H⟩, ⟨L⟩, ⟨D⟩), all in joules.
///
/// For a thermal state l = d = 0 and h is the equilibrium energy; any
/// physical state at frequency ω has h ≥ ħω/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableTriple {
    /// ⟨H⟩, J.
    pub h: f64,
    /// ⟨L⟩, J.
    pub l: f64,
    /// ⟨D⟩, J.
    pub d: f64,
}

impl ObservableTriple {
    pub fn new(h: f64, l: f64, d: f64) -> Self {
        Self { h, l, d }
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.h, self.l, self.d)
    }

    pub fn from_vector(v: Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

/// Lagrange multipliers of the generalized canonical state: β is real
/// (inverse energy, 1/J) and α is a dimensionless complex number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangeMultipliers {
    /// β, 1/J. For a thermal state β = 1/(k_B T).
    pub beta: f64,
    /// Re α.
    pub alpha_re: f64,
    /// Im α.
    pub alpha_im: f64,
}

/// A heat bath seen by the medium on one isochore.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    /// Bath temperature, K.
    pub temperature: f64,
    /// Oscillator frequency held on the isochore, rad/s.
    pub omega: f64,
    /// Downward (de-excitation) rate constant k↓, 1/s. The upward rate
    /// follows from detailed balance.
    pub k_down: f64,
}

impl BathSpec {
    pub fn new(temperature: f64, omega: f64, k_down: f64) -> Result<Self> {
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(Error::domain(format!(
                "bath temperature must be positive, got {temperature}"
            )));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::domain(format!(
                "bath frequency must be positive, got {omega}"
            )));
        }
        if !(k_down > 0.0) || !k_down.is_finite() {
            return Err(Error::domain(format!(
                "bath k_down must be positive, got {k_down}"
            )));
        }
        Ok(Self {
            temperature,
            omega,
            k_down,
        })
    }
}

/// Strengths of the two noise channels acting on the adiabats, both in
/// seconds so that γω is dimensionless inside the equation-of-motion matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseSpec {
    /// Phase-noise strength γ_p, s.
    pub gamma_p: f64,
    /// Amplitude-noise strength γ_a, s.
    pub gamma_a: f64,
}

impl NoiseSpec {
    pub fn new(gamma_p: f64, gamma_a: f64) -> Result<Self> {
        if !(gamma_p >= 0.0) || !(gamma_a >= 0.0) {
            return Err(Error::domain(format!(
                "noise strengths must be non-negative, got gamma_p={gamma_p}, gamma_a={gamma_a}"
            )));
        }
        Ok(Self { gamma_p, gamma_a })
    }

    pub fn zero() -> Self {
        Self {
            gamma_p: 0.0,
            gamma_a: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.gamma_p == 0.0 && self.gamma_a == 0.0
    }
}

/// Affine map A ↦ M·A + c carrying the observable triple across one cycle
/// segment. Adiabats are purely linear (c = 0); isochores drive toward
/// equilibrium through the offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentPropagator {
    pub matrix: Matrix3<f64>,
    pub offset: Vector3<f64>,
}

impl SegmentPropagator {
    pub fn identity() -> Self {
        Self {
            matrix: Matrix3::identity(),
            offset: Vector3::zeros(),
        }
    }

    pub fn linear(matrix: Matrix3<f64>) -> Self {
        Self {
            matrix,
            offset: Vector3::zeros(),
        }
    }

    pub fn affine(matrix: Matrix3<f64>, offset: Vector3<f64>) -> Self {
        Self { matrix, offset }
    }

    pub fn apply(&self, a: &ObservableTriple) -> ObservableTriple {
        ObservableTriple::from_vector(self.matrix * a.as_vector() + self.offset)
    }

    /// Composition "self first, then `next`".
    pub fn then(&self, next: &SegmentPropagator) -> SegmentPropagator {
        SegmentPropagator {
            matrix: next.matrix * self.matrix,
            offset: next.matrix * self.offset + next.offset,
        }
    }
}

/// Equilibrium expectation energy ⟨H⟩_eq = (ħω/2)·coth[ħω/(2k_B T)].
///
/// Strictly greater than the ground-state energy ħω/2 and monotonically
/// increasing in T (→ k_B T in the high-temperature limit).
pub fn equilibrium_energy(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::domain(format!(
            "frequency must be positive, got {omega}"
        )));
    }
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::domain(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let x = HBAR * omega / (2.0 * KB * temperature);
    Ok(0.5 * HBAR * omega * coth(x))
}

/// The thermal state at (ω, T): (⟨H⟩_eq, 0, 0).
pub fn thermal_triple(omega: f64, temperature: f64) -> Result<ObservableTriple> {
    Ok(ObservableTriple::new(
        equilibrium_energy(omega, temperature)?,
        0.0,
        0.0,
    ))
}

/// Reconstruct the Lagrange multipliers (α, β) of the generalized canonical
/// state from the observable triple at frequency ω.
///
/// α = 2ħω(⟨L⟩ + i⟨D⟩) / (4[⟨L⟩² + ⟨D⟩²] − [ħω − 2⟨H⟩]²) and β is the
/// logarithm of the ratio of the two quadratic invariants. The log is
/// evaluated through ln(1 + Δ/den) with the exact cancellation
/// num − den = 2ħω(ħω − 2⟨H⟩), which keeps β accurate deep in the
/// high-temperature regime where num/den = 1 + O(ħω/k_BT).
pub fn lagrange_multipliers(triple: &ObservableTriple, omega: f64) -> Result<LagrangeMultipliers> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::domain(format!(
            "frequency must be positive, got {omega}"
        )));
    }
    let hw = HBAR * omega;
    let (h, l, d) = (triple.h, triple.l, triple.d);
    let den = 4.0 * (l * l + d * d) - (hw - 2.0 * h).powi(2);
    if den == 0.0 {
        return Err(Error::Singular(
            "vanishing denominator in multiplier reconstruction".into(),
        ));
    }
    let alpha_scale = 2.0 * hw / den;

    // num = 4(⟨D⟩² − ⟨H⟩² + ⟨L⟩²) + ħ²ω²; num − den = 2ħω(ħω − 2⟨H⟩) exactly.
    let ratio_minus_one = 2.0 * hw * (hw - 2.0 * h) / den;
    if ratio_minus_one <= -1.0 {
        return Err(Error::Singular(
            "non-positive log argument in multiplier reconstruction".into(),
        ));
    }
    let beta = ratio_minus_one.ln_1p() / hw;
    if !beta.is_finite() {
        return Err(Error::Singular("non-finite beta".into()));
    }
    Ok(LagrangeMultipliers {
        beta,
        alpha_re: alpha_scale * l,
        alpha_im: alpha_scale * d,
    })
}

/// The Casimir quadratic form (⟨H⟩² − ⟨L⟩² − ⟨D⟩²)/(ħ²ω²), dimensionless.
///
/// Conserved along noiseless adiabats (up to the known ω-scaling absorbed by
/// the 1/ω² factor), which makes it a cheap global integration oracle.
pub fn casimir_form(triple: &ObservableTriple, omega: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::domain(format!(
            "frequency must be positive, got {omega}"
        )));
    }
    let hw = HBAR * omega;
    Ok((triple.h * triple.h - triple.l * triple.l - triple.d * triple.d) / (hw * hw))
}
