//! Bath-isolated segments with a ramped frequency.
//!
//! The ramp keeps the adiabatic parameter μ = ω̇/ω² constant, which fixes the
//! profile ω(t) = ω₀/(1 − μω₀t). In the stretched time θ (dθ = ω dt) the
//! frequency is ω(θ) = ω₀e^{μθ} and the triple obeys dA/dθ = M(θ)·A with
//!
//! ```text
//! M = M₀ + N_p + N_a,
//!      ⎛  μ  −μ   0 ⎞         ⎛ 0 0 0 ⎞          ⎛ 1 −1 0 ⎞
//! M₀ = ⎜ −μ   μ  −2 ⎟ , N_p = −4γ_pω ⎜ 0 1 0 ⎟ , N_a = γ_aω ⎜ 1 −1 0 ⎟ .
//!      ⎝  0   2   μ ⎠         ⎝ 0 0 1 ⎠          ⎝ 0  0 0 ⎠
//! ```
//!
//! Without noise the propagator factorizes into a scaling U₁ = (ω/ω₀)·I and
//! a mixing rotation U₂ = exp[θ(M₀ − μI)] with frequency Ω = √(4 − μ²) in θ.
//! U₂ returns to the identity whenever Ωθ is a multiple of 2π, which
//! quantizes the frictionless values of μ and yields δ = 0 ramps of finite
//! duration.

use nalgebra::Matrix3;

use crate::medium::{NoiseSpec, ObservableTriple, SegmentPropagator};
use crate::ode;
use crate::{Error, Result};

/// One adiabat: frequency endpoints, the constant adiabatic parameter and
/// the noise strengths acting along the ramp.
///
/// `omega0 == omegaf` with `mu == 0` is accepted as a degenerate
/// zero-duration segment whose propagator is the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabatSpec {
    /// Initial frequency, rad/s.
    pub omega0: f64,
    /// Final frequency, rad/s.
    pub omegaf: f64,
    /// Adiabatic parameter ω̇/ω², dimensionless and signed.
    pub mu: f64,
    pub noise: NoiseSpec,
}

impl AdiabatSpec {
    pub fn new(omega0: f64, omegaf: f64, mu: f64, noise: NoiseSpec) -> Result<Self> {
        if !(omega0 > 0.0) || !omega0.is_finite() || !(omegaf > 0.0) || !omegaf.is_finite() {
            return Err(Error::domain(format!(
                "adiabat frequencies must be positive, got {omega0}, {omegaf}"
            )));
        }
        if omega0 == omegaf {
            if mu != 0.0 {
                return Err(Error::domain(
                    "equal endpoint frequencies require mu = 0 (degenerate identity segment)"
                        .to_string(),
                ));
            }
            return Ok(Self {
                omega0,
                omegaf,
                mu,
                noise,
            });
        }
        if mu == 0.0 || !mu.is_finite() {
            return Err(Error::domain(
                "a frequency ramp needs a nonzero finite mu".to_string(),
            ));
        }
        if mu.signum() != (omegaf - omega0).signum() {
            return Err(Error::domain(format!(
                "sign(mu) must match the ramp direction: mu = {mu}, {omega0} -> {omegaf}"
            )));
        }
        if mu.abs() >= 2.0 {
            return Err(Error::domain(format!(
                "|mu| must be below 2 (oscillatory branch), got {mu}"
            )));
        }
        Ok(Self {
            omega0,
            omegaf,
            mu,
            noise,
        })
    }

    /// The frictionless ramp for cycle index n.
    pub fn frictionless(omega0: f64, omegaf: f64, n: u32, noise: NoiseSpec) -> Result<Self> {
        Self::new(omega0, omegaf, frictionless_mu(omega0, omegaf, n)?, noise)
    }

    pub fn is_degenerate(&self) -> bool {
        self.omega0 == self.omegaf
    }

    /// Ramp length in real time, s.
    pub fn duration(&self) -> f64 {
        if self.is_degenerate() {
            0.0
        } else {
            (1.0 - self.omega0 / self.omegaf) / (self.mu * self.omega0)
        }
    }

    /// Ramp length in stretched time: θ_f = ln(ω_f/ω₀)/μ.
    pub fn theta_end(&self) -> f64 {
        if self.is_degenerate() {
            0.0
        } else {
            (self.omegaf / self.omega0).ln() / self.mu
        }
    }

    /// ω at stretched time θ ∈ [0, θ_f].
    pub fn omega_at_theta(&self, theta: f64) -> f64 {
        self.omega0 * (self.mu * theta).exp()
    }
}

/// Quantized adiabatic parameter for a frictionless ramp with n mixing
/// periods: μ = −2 ln(ω₀/ω_f)/√(4n²π² + ln²(ω₀/ω_f)).
///
/// Negative for expansion, positive for compression, always |μ| < 2.
pub fn frictionless_mu(omega0: f64, omegaf: f64, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("cycle index n must be at least 1"));
    }
    Ok(mu_for_cycle_count(omega0, omegaf, n as f64))
}

/// Same quantization formula with a real-valued cycle count (used when
/// locating the optimum between two integers).
pub(crate) fn mu_for_cycle_count(omega0: f64, omegaf: f64, n: f64) -> f64 {
    let log_ratio = (omega0 / omegaf).ln();
    if log_ratio == 0.0 {
        return 0.0;
    }
    -2.0 * log_ratio / (4.0 * n * n * std::f64::consts::PI.powi(2) + log_ratio * log_ratio).sqrt()
}

/// Real-time duration of the frictionless ramp for cycle index n:
/// τ = (ω₀/ω_f − 1)·√(4n²π² + ln²(ω₀/ω_f)) / (2ω₀ ln(ω₀/ω_f)).
pub fn frictionless_tau(omega0: f64, omegaf: f64, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("cycle index n must be at least 1"));
    }
    if omega0 == omegaf {
        return Err(Error::domain(
            "frictionless duration needs distinct endpoint frequencies",
        ));
    }
    let log_ratio = (omega0 / omegaf).ln();
    let root =
        (4.0 * (n as f64).powi(2) * std::f64::consts::PI.powi(2) + log_ratio * log_ratio).sqrt();
    Ok((omega0 / omegaf - 1.0) * root / (2.0 * omega0 * log_ratio))
}

/// ω(t) = ω₀/(1 − μω₀t) on t ∈ [0, τ].
pub fn omega_profile(spec: &AdiabatSpec, t: f64) -> Result<f64> {
    let tau = spec.duration();
    if !(0.0..=tau).contains(&t) {
        return Err(Error::domain(format!(
            "t = {t:e} outside the ramp domain [0, {tau:e}]"
        )));
    }
    let denom = 1.0 - spec.mu * spec.omega0 * t;
    if denom <= 0.0 {
        return Err(Error::domain(format!(
            "frequency profile pole reached at t = {t:e}"
        )));
    }
    Ok(spec.omega0 / denom)
}

/// The dimensionless generator of dA/(ω dt) = M·A at ramp time t.
pub fn adiabat_generator(spec: &AdiabatSpec, t: f64) -> Result<Matrix3<f64>> {
    Ok(generator_at_omega(spec, omega_profile(spec, t)?))
}

pub(crate) fn generator_at_omega(spec: &AdiabatSpec, omega: f64) -> Matrix3<f64> {
    let mu = spec.mu;
    let p = 4.0 * spec.noise.gamma_p * omega;
    let a = spec.noise.gamma_a * omega;
    Matrix3::new(
        mu + a,
        -mu - a,
        0.0,
        -mu + a,
        mu - p - a,
        -2.0,
        0.0,
        2.0,
        mu - p,
    )
}

/// Integrate dU/dθ = M(θ)·U across the ramp with an adaptive RK 5(4) pair.
///
/// The stretched time θ keeps the μ-dependent entries constant and turns the
/// noise entries into smooth exponentials γω₀e^{μθ}, avoiding the raw-time
/// pole of ω(t).
pub fn propagate_adiabat_numeric(spec: &AdiabatSpec, tol: f64) -> Result<SegmentPropagator> {
    ode::validate_tolerance(tol)?;
    if spec.is_degenerate() {
        return Ok(SegmentPropagator::identity());
    }
    let matrix = ode::integrate(
        |theta, u: &Matrix3<f64>| generator_at_omega(spec, spec.omega_at_theta(theta)) * u,
        Matrix3::identity(),
        0.0,
        spec.theta_end(),
        tol,
    )?;
    Ok(SegmentPropagator::linear(matrix))
}

/// The mixing factor U₂(θ) = exp[θ(M₀ − μI)] in closed form, with
/// Ω = √(4 − μ²), c = cos Ωθ, s = sin Ωθ.
pub fn mixing_matrix(mu: f64, theta: f64) -> Result<Matrix3<f64>> {
    if mu.abs() >= 2.0 {
        return Err(Error::domain(format!(
            "mixing matrix is oscillatory only for |mu| < 2, got {mu}"
        )));
    }
    let om2 = 4.0 - mu * mu;
    let om = om2.sqrt();
    let (s, c) = (om * theta).sin_cos();
    Ok(Matrix3::new(
        4.0 - c * mu * mu,
        -mu * om * s,
        -2.0 * mu * (c - 1.0),
        -mu * om * s,
        om2 * c,
        -2.0 * om * s,
        2.0 * mu * (c - 1.0),
        2.0 * om * s,
        4.0 * c - mu * mu,
    ) / om2)
}

/// Closed-form noiseless propagator U₁U₂ with U₁ = (ω_f/ω₀)·I.
pub fn propagate_adiabat_analytic(spec: &AdiabatSpec) -> Result<SegmentPropagator> {
    if !spec.noise.is_zero() {
        return Err(Error::domain(
            "analytic propagator exists only for the noiseless ramp",
        ));
    }
    if spec.is_degenerate() {
        return Ok(SegmentPropagator::identity());
    }
    let u2 = mixing_matrix(spec.mu, spec.theta_end())?;
    Ok(SegmentPropagator::linear(
        u2 * (spec.omegaf / spec.omega0),
    ))
}

/// Adiabaticity measure δ = (ω₀/ω_f)·U(1,1) − 1 of a ramp propagator.
///
/// δ = 0 means perfect adiabatic following (energy scales exactly with ω);
/// δ > 0 is parasitic heating.
pub fn adiabaticity_delta(propagator: &SegmentPropagator, omega0: f64, omegaf: f64) -> f64 {
    omega0 / omegaf * propagator.matrix[(0, 0)] - 1.0
}

/// One sampled point of a ramp trajectory.
#[derive(Debug, Clone, Copy)]
pub struct AdiabatSample {
    pub theta: f64,
    pub omega: f64,
    pub triple: ObservableTriple,
}

/// Propagate a triple along the ramp, sampling `samples` points uniformly
/// in θ (endpoints included).
pub fn trace_adiabat(
    spec: &AdiabatSpec,
    start: &ObservableTriple,
    samples: usize,
    tol: f64,
) -> Result<Vec<AdiabatSample>> {
    ode::validate_tolerance(tol)?;
    if samples < 2 {
        return Err(Error::domain("a trace needs at least 2 samples"));
    }
    let theta_end = spec.theta_end();
    let mut out = Vec::with_capacity(samples);
    let mut state = start.as_vector();
    out.push(AdiabatSample {
        theta: 0.0,
        omega: spec.omega0,
        triple: *start,
    });
    for i in 1..samples {
        let t0 = theta_end * (i - 1) as f64 / (samples - 1) as f64;
        let t1 = theta_end * i as f64 / (samples - 1) as f64;
        state = ode::integrate(
            |theta, a| generator_at_omega(spec, spec.omega_at_theta(theta)) * a,
            state,
            t0,
            t1,
            tol,
        )?;
        out.push(AdiabatSample {
            theta: t1,
            omega: spec.omega_at_theta(t1),
            triple: ObservableTriple::from_vector(state),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const WC: f64 = 2.0 * std::f64::consts::PI * 1000.0;
    const WH: f64 = 25.0 * WC;

    fn expansion(n: u32) -> AdiabatSpec {
        AdiabatSpec::frictionless(WH, WC, n, NoiseSpec::zero()).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(AdiabatSpec::new(WH, WC, -0.5, NoiseSpec::zero()).is_ok());
        // Ramp direction must match the sign of mu.
        assert!(AdiabatSpec::new(WH, WC, 0.5, NoiseSpec::zero()).is_err());
        assert!(AdiabatSpec::new(WC, WH, -0.5, NoiseSpec::zero()).is_err());
        // Oscillatory branch only.
        assert!(AdiabatSpec::new(WH, WC, -2.0, NoiseSpec::zero()).is_err());
        assert!(AdiabatSpec::new(WH, WC, -2.4, NoiseSpec::zero()).is_err());
        // Degenerate identity hook.
        assert!(AdiabatSpec::new(WC, WC, 0.0, NoiseSpec::zero()).is_ok());
        assert!(AdiabatSpec::new(WC, WC, -0.1, NoiseSpec::zero()).is_err());
    }

    #[test]
    fn frictionless_mu_reference_value() {
        let mu = frictionless_mu(WH, WC, 1).unwrap();
        assert_relative_eq!(mu, -0.911_899_6, max_relative = 1.1e-6);
        assert!(frictionless_mu(WC, WH, 1).unwrap() > 0.0);
        assert_eq!(frictionless_mu(WC, WC, 3).unwrap(), 0.0);
        assert!(frictionless_mu(WH, WC, 0).is_err());
    }

    #[test]
    fn frictionless_mu_large_n_asymptote() {
        // mu -> -ln(w0/wf)/(n pi) from below as n grows.
        let log_ratio = (WH / WC).ln();
        let n = 10_000u32;
        let mu = frictionless_mu(WH, WC, n).unwrap();
        let asymptote = -log_ratio / (n as f64 * std::f64::consts::PI);
        assert_relative_eq!(mu, asymptote, max_relative = 1e-7);
        assert!(mu.abs() < 2.0);
    }

    #[test]
    fn frictionless_tau_reference_value() {
        let tau = frictionless_tau(WH, WC, 1).unwrap();
        assert!((tau - 1.6755e-4).abs() < 1e-8, "tau = {tau:e}");
        // Compression keeps the duration positive.
        assert!(frictionless_tau(WC, WH, 1).unwrap() > 0.0);
    }

    #[test]
    fn frictionless_tau_linear_in_n() {
        let t100 = frictionless_tau(WH, WC, 100).unwrap();
        let t200 = frictionless_tau(WH, WC, 200).unwrap();
        assert_relative_eq!(t200 / t100, 2.0, max_relative = 1e-4);
    }

    #[test]
    fn profile_hits_both_endpoints() {
        let spec = expansion(1);
        assert_eq!(omega_profile(&spec, 0.0).unwrap(), WH);
        let tau = spec.duration();
        assert_relative_eq!(omega_profile(&spec, tau).unwrap(), WC, max_relative = 1e-12);
        assert!(omega_profile(&spec, -1e-9).is_err());
        assert!(omega_profile(&spec, tau * 1.001).is_err());
    }

    #[test]
    fn profile_flattens_as_mu_vanishes() {
        // Large n with a near-unit ratio gives a tiny mu; the profile stays
        // within the endpoint ratio of the start frequency.
        let spec = AdiabatSpec::frictionless(1000.0, 1001.0, 500, NoiseSpec::zero()).unwrap();
        assert!(spec.mu.abs() < 1e-6);
        let tau = spec.duration();
        for i in 0..=10 {
            let w = omega_profile(&spec, tau * i as f64 / 10.0).unwrap();
            assert!((w / spec.omega0 - 1.0).abs() <= 1.1e-3);
        }
    }

    #[test]
    fn generator_noiseless_is_ramp_only() {
        let spec = expansion(2);
        let m = adiabat_generator(&spec, 0.0).unwrap();
        let mu = spec.mu;
        let m0 = Matrix3::new(mu, -mu, 0.0, -mu, mu, -2.0, 0.0, 2.0, mu);
        assert_eq!(m, m0);
    }

    #[test]
    fn generator_pure_phase_noise_at_constant_frequency() {
        let noise = NoiseSpec::new(1e-6, 0.0).unwrap();
        let spec = AdiabatSpec::new(WC, WC, 0.0, noise).unwrap();
        let m = adiabat_generator(&spec, 0.0).unwrap();
        let p = 4.0 * noise.gamma_p * WC;
        let expected = Matrix3::new(0.0, 0.0, 0.0, 0.0, -p, -2.0, 0.0, 2.0, -p);
        assert_eq!(m, expected);
    }

    #[test]
    fn generator_trace_identity() {
        let noise = NoiseSpec::new(1e-6, 5e-9).unwrap();
        let spec = AdiabatSpec::new(WH, WC, -0.4, noise).unwrap();
        for t in [0.0, 0.3 * spec.duration(), spec.duration()] {
            let w = omega_profile(&spec, t).unwrap();
            let m = adiabat_generator(&spec, t).unwrap();
            assert_relative_eq!(
                m.trace(),
                3.0 * spec.mu - 8.0 * noise.gamma_p * w,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn degenerate_segment_is_identity() {
        let spec = AdiabatSpec::new(WC, WC, 0.0, NoiseSpec::zero()).unwrap();
        let p = propagate_adiabat_numeric(&spec, 1e-10).unwrap();
        assert_eq!(p.matrix, Matrix3::identity());
        assert_eq!(spec.duration(), 0.0);
    }

    #[test]
    fn frictionless_ramp_scales_identity() {
        for n in [1u32, 3] {
            let spec = expansion(n);
            let p = propagate_adiabat_numeric(&spec, 1e-12).unwrap();
            let target = Matrix3::identity() * (WC / WH);
            assert!(
                (p.matrix - target).abs().max() < 1e-8,
                "n = {n}: {:.3e}",
                (p.matrix - target).abs().max()
            );
        }
    }

    #[test]
    fn numeric_matches_analytic_for_generic_mu() {
        let tol = 1e-10;
        let spec = AdiabatSpec::new(WH, WC, -0.5, NoiseSpec::zero()).unwrap();
        let numeric = propagate_adiabat_numeric(&spec, tol).unwrap();
        let analytic = propagate_adiabat_analytic(&spec).unwrap();
        let dev = (numeric.matrix - analytic.matrix).abs().max();
        assert!(dev < 10.0 * tol, "deviation {dev:e}");
    }

    #[test]
    fn mixing_matrix_limits() {
        assert_eq!(mixing_matrix(-0.7, 0.0).unwrap(), Matrix3::identity());
        // A full period restores the identity.
        let mu = -0.7f64;
        let om = (4.0 - mu * mu).sqrt();
        for n in 1..=3 {
            let u2 = mixing_matrix(mu, 2.0 * std::f64::consts::PI * n as f64 / om).unwrap();
            assert!((u2 - Matrix3::identity()).abs().max() < 1e-12);
        }
        assert!(mixing_matrix(2.0, 1.0).is_err());
    }

    #[test]
    fn mixing_matrix_unimodular() {
        for mu in [-1.5, -0.9, -0.2, 0.4, 1.2] {
            for theta in [0.1, 1.0, 5.0, 17.3] {
                let u2 = mixing_matrix(mu, theta).unwrap();
                assert_relative_eq!(u2.determinant(), 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn delta_of_perfect_following_is_zero() {
        let p = SegmentPropagator::linear(Matrix3::identity() * (WC / WH));
        assert_relative_eq!(adiabaticity_delta(&p, WH, WC), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn delta_closed_form_for_generic_mu() {
        let spec = AdiabatSpec::new(WH, WC, -0.5, NoiseSpec::zero()).unwrap();
        let p = propagate_adiabat_numeric(&spec, 1e-12).unwrap();
        let mu = spec.mu;
        let om2 = 4.0 - mu * mu;
        let expected = (4.0 - (om2.sqrt() * spec.theta_end()).cos() * mu * mu) / om2 - 1.0;
        assert_relative_eq!(
            adiabaticity_delta(&p, WH, WC),
            expected,
            max_relative = 1e-8
        );
    }

    #[test]
    fn casimir_metric_preserved_without_noise() {
        let g = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, -1.0, -1.0));
        for (w0, wf, mu) in [(WH, WC, -0.5), (WC, WH, 0.9), (WH, WC, -1.7)] {
            let spec = AdiabatSpec::new(w0, wf, mu, NoiseSpec::zero()).unwrap();
            let u = propagate_adiabat_numeric(&spec, 1e-12).unwrap().matrix;
            let lhs = u.transpose() * g * u;
            let rhs = g * (wf / w0).powi(2);
            let dev = (lhs - rhs).abs().max() / rhs.abs().max();
            assert!(dev < 1e-9, "metric deviation {dev:e}");
        }
    }

    #[test]
    fn semigroup_composition_in_theta() {
        // Splitting the ramp at an intermediate frequency with the same mu
        // composes to the direct propagator.
        let mu = -0.37;
        let wm = 6.0 * WC;
        let tol = 1e-11;
        let full = propagate_adiabat_numeric(
            &AdiabatSpec::new(WH, WC, mu, NoiseSpec::zero()).unwrap(),
            tol,
        )
        .unwrap();
        let first = propagate_adiabat_numeric(
            &AdiabatSpec::new(WH, wm, mu, NoiseSpec::zero()).unwrap(),
            tol,
        )
        .unwrap();
        let second = propagate_adiabat_numeric(
            &AdiabatSpec::new(wm, WC, mu, NoiseSpec::zero()).unwrap(),
            tol,
        )
        .unwrap();
        let dev = (first.then(&second).matrix - full.matrix).abs().max() / full.matrix.abs().max();
        assert!(dev < 100.0 * tol, "composition deviation {dev:e}");
    }

    #[test]
    fn halving_tolerance_does_not_worsen_accuracy() {
        let spec = AdiabatSpec::new(WH, WC, -0.5, NoiseSpec::zero()).unwrap();
        let analytic = propagate_adiabat_analytic(&spec).unwrap().matrix;
        let mut prev = f64::INFINITY;
        let mut tol = 1e-5;
        while tol > 2e-13 {
            let numeric = propagate_adiabat_numeric(&spec, tol).unwrap().matrix;
            let dev = (numeric - analytic).abs().max();
            assert!(
                dev <= prev + 1e-14,
                "tol {tol:e}: deviation grew {prev:e} -> {dev:e}"
            );
            prev = dev;
            tol *= 0.5;
        }
    }

    #[test]
    fn trace_spans_the_ramp() {
        let spec = expansion(1);
        let start = ObservableTriple::new(3.0e-21, 0.0, 0.0);
        let samples = trace_adiabat(&spec, &start, 33, 1e-10).unwrap();
        assert_eq!(samples.len(), 33);
        assert_eq!(samples[0].omega, WH);
        assert_relative_eq!(samples[32].omega, WC, max_relative = 1e-12);
        // Endpoint state matches the propagator applied to the start.
        let p = propagate_adiabat_numeric(&spec, 1e-10).unwrap();
        let direct = p.apply(&start);
        assert_relative_eq!(samples[32].triple.h, direct.h, max_relative = 1e-7);
    }

    proptest! {
        #[test]
        fn quantized_mu_bounded_and_signed(
            n in 1u32..60,
            log_ratio in 0.01f64..5.0,
            expansion in proptest::bool::ANY,
        ) {
            let (w0, wf) = if expansion {
                (WC * log_ratio.exp(), WC)
            } else {
                (WC, WC * log_ratio.exp())
            };
            let mu = frictionless_mu(w0, wf, n).unwrap();
            prop_assert!(mu.abs() < 2.0);
            prop_assert_eq!(mu.signum(), (wf - w0).signum());
            prop_assert!(frictionless_tau(w0, wf, n).unwrap() > 0.0);
        }
    }
}
