//! Four-segment cycle composition, limit-cycle determination, per-segment
//! energetics and the refrigeration temperature bounds.
//!
//! One cycle is hot isochore → expansion adiabat → cold isochore →
//! compression adiabat. Composing the four affine maps gives
//! A ↦ M_cyc·A + c_cyc; the working point of the refrigerator is the fixed
//! point of that map, reached geometrically whenever the spectral radius of
//! M_cyc is below one. Heats are ⟨H⟩ changes on the isochores, work is the
//! ⟨H⟩ change on the adiabats, with energy flowing into the medium counted
//! positive.

use nalgebra::Matrix3;
use serde::Serialize;

use crate::adiabat::{adiabaticity_delta, propagate_adiabat_numeric, AdiabatSpec};
use crate::constants::{HBAR, KB};
use crate::isochore::{self, IsochoreSegment};
use crate::magnus::delta_at_optimum;
use crate::medium::{
    arccoth, coth, equilibrium_energy, BathSpec, NoiseSpec, ObservableTriple, SegmentPropagator,
};
use crate::{Error, Result};

/// Full description of one Otto cycle.
#[derive(Debug, Clone, Copy)]
pub struct CycleConfig {
    pub hot: BathSpec,
    pub cold: BathSpec,
    /// Frictionless cycle index of the expansion adiabat (ω_h → ω_c).
    pub n_expansion: u32,
    /// Frictionless cycle index of the compression adiabat (ω_c → ω_h).
    pub n_compression: u32,
    pub noise: NoiseSpec,
    /// (hot, cold) contact times, s; `None` thermalizes for 6/Γ on each.
    pub isochore_durations: Option<(f64, f64)>,
}

impl CycleConfig {
    pub fn new(
        hot: BathSpec,
        cold: BathSpec,
        n_expansion: u32,
        n_compression: u32,
        noise: NoiseSpec,
        isochore_durations: Option<(f64, f64)>,
    ) -> Result<Self> {
        if hot.omega < cold.omega {
            return Err(Error::domain(format!(
                "hot frequency must not be below the cold one, got {} < {}",
                hot.omega, cold.omega
            )));
        }
        if hot.temperature <= cold.temperature {
            return Err(Error::domain(format!(
                "hot bath must be warmer than the cold one, got {} <= {}",
                hot.temperature, cold.temperature
            )));
        }
        if n_expansion == 0 || n_compression == 0 {
            return Err(Error::domain("cycle indices must be at least 1"));
        }
        if let Some((th, tc)) = isochore_durations {
            if !(th >= 0.0) || !(tc >= 0.0) {
                return Err(Error::domain(format!(
                    "isochore durations must be non-negative, got ({th}, {tc})"
                )));
            }
        }
        Ok(Self {
            hot,
            cold,
            n_expansion,
            n_compression,
            noise,
            isochore_durations,
        })
    }

    fn hot_segment(&self) -> Result<IsochoreSegment> {
        match self.isochore_durations {
            Some((th, _)) => IsochoreSegment::new(self.hot, th),
            None => IsochoreSegment::thermalizing(self.hot),
        }
    }

    fn cold_segment(&self) -> Result<IsochoreSegment> {
        match self.isochore_durations {
            Some((_, tc)) => IsochoreSegment::new(self.cold, tc),
            None => IsochoreSegment::thermalizing(self.cold),
        }
    }

    fn expansion(&self) -> Result<AdiabatSpec> {
        AdiabatSpec::frictionless(self.hot.omega, self.cold.omega, self.n_expansion, self.noise)
    }

    fn compression(&self) -> Result<AdiabatSpec> {
        AdiabatSpec::frictionless(
            self.cold.omega,
            self.hot.omega,
            self.n_compression,
            self.noise,
        )
    }
}

/// Energetics of one converged limit cycle.
#[derive(Debug, Clone, Serialize)]
pub struct CycleReport {
    /// Fixed point of the cycle map at the start of the hot isochore.
    pub limit_triple_start_hot: ObservableTriple,
    /// Heat exchanged with the cold bath, J (positive = extracted from it).
    pub q_cold: f64,
    /// Heat exchanged with the hot bath, J (negative = rejected into it).
    pub q_hot: f64,
    /// Net work done on the medium over both adiabats, J.
    pub w_net: f64,
    /// q_cold / |w_net|, present only while refrigerating.
    pub cop: Option<f64>,
    /// Measured adiabaticity deviation of the expansion ramp.
    pub delta_expansion: f64,
    /// q_cold > 0.
    pub refrigerating: bool,
    /// |q_cold + q_hot + w_net|, J.
    pub first_law_residual: f64,
    pub converged: bool,
}

/// The four segment maps of the cycle, hot isochore first.
fn segment_propagators(config: &CycleConfig, tol: f64) -> Result<[SegmentPropagator; 4]> {
    Ok([
        isochore::propagator(&config.hot_segment()?),
        propagate_adiabat_numeric(&config.expansion()?, tol)?,
        isochore::propagator(&config.cold_segment()?),
        propagate_adiabat_numeric(&config.compression()?, tol)?,
    ])
}

/// The one-cycle affine map acting on the triple at the start of the hot
/// isochore.
pub fn compose_cycle(config: &CycleConfig, tol: f64) -> Result<SegmentPropagator> {
    let [hot, expansion, cold, compression] = segment_propagators(config, tol)?;
    Ok(hot.then(&expansion).then(&cold).then(&compression))
}

/// Spectral radius of a 3×3 matrix from the characteristic cubic.
///
/// Solved in closed form (Cardano / trig branch) rather than iteratively:
/// fully-thermalizing cycles have an exactly nilpotent matrix, which is an
/// edge case for iterative Schur decompositions.
fn spectral_radius(m: &Matrix3<f64>) -> f64 {
    // λ³ + aλ² + bλ + c with a = −tr, b = Σ principal minors, c = −det.
    let a = -m.trace();
    let b = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)]
        - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)]
        - m[(1, 2)] * m[(2, 1)];
    let c = -m.determinant();

    // Depressed cubic t³ + pt + q with λ = t + shift.
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = -a / 3.0;
    let disc = 0.25 * q * q + p * p * p / 27.0;

    if disc > 0.0 {
        // One real root and a complex-conjugate pair.
        let r = disc.sqrt();
        let u = (-0.5 * q + r).cbrt();
        let v = (-0.5 * q - r).cbrt();
        let real_root = u + v + shift;
        let re = -(u + v) / 2.0 + shift;
        let im = 3f64.sqrt() / 2.0 * (u - v);
        real_root.abs().max(re.hypot(im))
    } else if p >= 0.0 {
        // disc <= 0 with p >= 0 forces p = q = 0: a triple root.
        shift.abs()
    } else {
        // Three real roots, trig form.
        let scale = 2.0 * (-p / 3.0).sqrt();
        let phi = (3.0 * q / (p * scale)).clamp(-1.0, 1.0).acos() / 3.0;
        (0..3).fold(0.0f64, |acc, k| {
            let t = scale * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
            acc.max((t + shift).abs())
        })
    }
}

/// The limit-cycle triple at the start of the hot isochore: the fixed point
/// A* = M_cyc·A* + c_cyc, solved directly from the 3×3 linear system.
pub fn find_limit_cycle(config: &CycleConfig, tol: f64) -> Result<ObservableTriple> {
    let cycle = compose_cycle(config, tol)?;
    fixed_point(&cycle)
}

fn fixed_point(cycle: &SegmentPropagator) -> Result<ObservableTriple> {
    let radius = spectral_radius(&cycle.matrix);
    if !(radius < 1.0) {
        return Err(Error::NonContractive {
            spectral_radius: radius,
        });
    }
    let system = Matrix3::identity() - cycle.matrix;
    let solution = system
        .lu()
        .solve(&cycle.offset)
        .ok_or(Error::NonContractive {
            spectral_radius: radius,
        })?;
    Ok(ObservableTriple::from_vector(solution))
}

/// Maximum heat extractable from the cold bath per cycle at adiabaticity
/// deviation δ, starting from hot-bath equilibrium:
/// Q(max) = Q₀(max) − (ħω_c/2)·δ·coth[ħω_h/(2k_B T_h)].
pub fn max_heat(config: &CycleConfig, delta: f64) -> f64 {
    let eq_cold = equilibrium_energy(config.cold.omega, config.cold.temperature)
        .expect("CycleConfig invariants guarantee valid bath parameters");
    let eq_hot = equilibrium_energy(config.hot.omega, config.hot.temperature)
        .expect("CycleConfig invariants guarantee valid bath parameters");
    let scaled_hot = config.cold.omega / config.hot.omega * eq_hot;
    eq_cold - (1.0 + delta) * scaled_hot
}

/// Coldest bath the cycle can still extract heat from:
/// T_c,min = ħω_c / (2k_B·arccoth[(1 + δ)·coth(ħω_h/(2k_B T_h))]).
///
/// δ = 0 recovers the Otto-Carnot bound (ω_c/ω_h)·T_h.
pub fn tc_bound(omega_c: f64, omega_h: f64, t_h: f64, delta: f64) -> Result<f64> {
    if !(omega_c > 0.0) || !(omega_h > 0.0) || !(t_h > 0.0) {
        return Err(Error::domain(format!(
            "need positive omega_c, omega_h, T_h; got {omega_c}, {omega_h}, {t_h}"
        )));
    }
    if !(delta >= 0.0) {
        return Err(Error::domain(format!(
            "adiabaticity deviation must be non-negative, got {delta}"
        )));
    }
    let x = HBAR * omega_h / (2.0 * KB * t_h);
    let arg = (1.0 + delta) * coth(x);
    if arg <= 1.0 {
        return Err(Error::domain(format!(
            "arccoth argument must exceed 1, got {arg}"
        )));
    }
    Ok(HBAR * omega_c / (2.0 * KB * arccoth(arg)))
}

/// Minimum reachable cold-bath temperature when the cycle runs at the
/// optimal index for the given noise; zero noise falls back to the
/// Otto-Carnot bound.
pub fn minimum_temperature(omega_c: f64, omega_h: f64, t_h: f64, noise: &NoiseSpec) -> Result<f64> {
    if noise.is_zero() {
        return tc_bound(omega_c, omega_h, t_h, 0.0);
    }
    let delta = delta_at_optimum(omega_h, omega_c, noise)?.single_channel;
    tc_bound(omega_c, omega_h, t_h, delta)
}

/// Solve the limit cycle and book heats, work, COP and the first-law audit.
pub fn cycle_energetics(config: &CycleConfig, tol: f64) -> Result<CycleReport> {
    let segments = segment_propagators(config, tol)?;
    let cycle = segments[0]
        .then(&segments[1])
        .then(&segments[2])
        .then(&segments[3]);
    let start = fixed_point(&cycle)?;

    let after_hot = segments[0].apply(&start);
    let after_expansion = segments[1].apply(&after_hot);
    let after_cold = segments[2].apply(&after_expansion);
    let after_compression = segments[3].apply(&after_cold);

    let q_hot = after_hot.h - start.h;
    let w_expansion = after_expansion.h - after_hot.h;
    let q_cold = after_cold.h - after_expansion.h;
    let w_compression = after_compression.h - after_cold.h;
    let w_net = w_expansion + w_compression;

    let refrigerating = q_cold > 0.0;
    let cop = if refrigerating && w_net.abs() > 0.0 {
        Some(q_cold / w_net.abs())
    } else {
        None
    };
    Ok(CycleReport {
        limit_triple_start_hot: start,
        q_cold,
        q_hot,
        w_net,
        cop,
        delta_expansion: adiabaticity_delta(&segments[1], config.hot.omega, config.cold.omega),
        refrigerating,
        first_law_residual: (q_cold + q_hot + w_net).abs(),
        converged: true,
    })
}
