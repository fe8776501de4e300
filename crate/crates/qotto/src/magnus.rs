//! Interaction-picture treatment of the noise channels on the adiabats.
//!
//! Writing the ramp propagator as U = U₁U₂U₃ isolates all noise effects in
//! U₃, which solves dU₃/dX = W(X)·U₃/Ω with the conjugated generator
//! W = U₂(−θ)·N·U₂(θ) and X = Ωθ. For frictionless ramps (X ends at 2nπ)
//! the Magnus expansion of U₃ gives closed-form adiabaticity measures:
//! first order yields δ_p = e^{γ_pFμ} − 1 and δ_a = e^{γ_aF/μ} − 1 with a
//! shared factor F < 0, so phase noise fades as the ramp slows (μ → 0)
//! while amplitude noise diverges. Their crossing fixes the optimal cycle
//! index and hence the least noisy frictionless ramp.

use nalgebra::Matrix3;

use crate::adiabat::{frictionless_mu, AdiabatSpec};
use crate::medium::NoiseSpec;
use crate::{ode, quad, Error, Result};

/// Which noise channel enters the interaction picture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseChannel {
    Phase,
    Amplitude,
    Both,
}

/// How a noise propagator was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MagnusOrder {
    First,
    Second,
    ExactNumeric,
}

/// A noise propagator U₃ together with its adiabaticity measure
/// δ = U₃(1,1) − 1.
#[derive(Debug, Clone, Copy)]
pub struct MagnusResult {
    pub propagator: Matrix3<f64>,
    pub delta: f64,
    pub order: MagnusOrder,
}

/// The two conventions for combining the channels.
#[derive(Debug, Clone, Copy)]
pub struct CombinedDelta {
    /// δ_p + δ_a; the form consumed by the temperature bound.
    pub additive: f64,
    /// (1 + δ_p)(1 + δ_a) − 1; exceeds the additive form by exactly δ_p·δ_a.
    pub product: f64,
}

/// Optimal frictionless cycle index for both noise channels together.
#[derive(Debug, Clone, Copy)]
pub struct OptimalCycle {
    /// Stationary point of δ_p + δ_a over real n.
    pub n_continuous: f64,
    /// Whichever of floor/ceil minimizes the combined δ (ties break low).
    pub n_integer: u32,
}

/// δ at the optimal cycle index.
#[derive(Debug, Clone, Copy)]
pub struct OptimumDelta {
    /// The single-channel δ at the crossing μ = −√(γ_a/γ_p); both channels
    /// take this same value there.
    pub single_channel: f64,
    /// δ_p + δ_a at the crossing, i.e. twice the single-channel value.
    pub additive: f64,
}

fn require_quantized(spec: &AdiabatSpec, n: u32) -> Result<f64> {
    if spec.is_degenerate() {
        return Err(Error::domain(
            "Magnus closed forms need a real ramp (mu = 0 is degenerate)",
        ));
    }
    let mu_n = frictionless_mu(spec.omega0, spec.omegaf, n)?;
    if (spec.mu - mu_n).abs() > 1e-9 * mu_n.abs() {
        return Err(Error::domain(format!(
            "mu = {} is not the frictionless value {} for n = {}",
            spec.mu, mu_n, n
        )));
    }
    Ok(spec.mu)
}

/// The conjugated noise generator W(X) of dU₃/dX = W·U₃/Ω, evaluated from
/// its closed form with c = cos X, s = sin X and ω = ω₀e^{μX/Ω}.
pub fn interaction_generator(
    spec: &AdiabatSpec,
    channel: NoiseChannel,
    x: f64,
) -> Result<Matrix3<f64>> {
    let x_end = x_span(spec);
    if x < 0.0 || x > x_end * (1.0 + 1e-9) + 1e-12 {
        return Err(Error::domain(format!(
            "X = {x:e} outside the ramp span [0, {x_end:e}]"
        )));
    }
    let mu = spec.mu;
    let om = (4.0 - mu * mu).sqrt();
    let omega = spec.omega0 * (mu * x / om).exp();
    let (s, c) = x.sin_cos();
    Ok(match channel {
        NoiseChannel::Phase => w_phase(mu, om, spec.noise.gamma_p * omega, s, c),
        NoiseChannel::Amplitude => w_amplitude(mu, om, spec.noise.gamma_a * omega, s, c),
        NoiseChannel::Both => {
            w_phase(mu, om, spec.noise.gamma_p * omega, s, c)
                + w_amplitude(mu, om, spec.noise.gamma_a * omega, s, c)
        }
    })
}

/// X at the end of the ramp (2nπ when μ is frictionless-quantized).
fn x_span(spec: &AdiabatSpec) -> f64 {
    (4.0 - spec.mu * spec.mu).sqrt() * spec.theta_end()
}

fn w_phase(mu: f64, om: f64, gp_w: f64, s: f64, c: f64) -> Matrix3<f64> {
    let om2 = om * om;
    let mu2 = mu * mu;
    let pref = 4.0 * gp_w / (om2 * om2);
    Matrix3::new(
        (c - 1.0) * mu2 * (mu2 * (1.0 + c) - 8.0),
        mu * s * (mu2 * c - 4.0) * om,
        2.0 * mu * (c - 1.0) * (mu2 * c - 4.0),
        -mu * s * (mu2 * c - 4.0) * om,
        -(mu2 * (s * s - 1.0) + 4.0) * om2,
        -2.0 * mu2 * s * (c - 1.0) * om,
        -2.0 * mu * (c - 1.0) * (mu2 * c - 4.0),
        -2.0 * mu2 * s * (c - 1.0) * om,
        -(mu2 * (mu2 - 4.0 * s * s - 8.0 * c) + 16.0),
    ) * pref
}

fn w_amplitude(mu: f64, om: f64, ga_w: f64, s: f64, c: f64) -> Matrix3<f64> {
    let om2 = om * om;
    let mu2 = mu * mu;
    let pref = ga_w / (om2 * om2);
    // Recurring combinations of the conjugation.
    let p = 4.0 - mu2 * c + mu * om * s;
    let q = mu * s + om * c;
    let r = mu - mu * c + om * s;
    Matrix3::new(
        p * p,
        -q * p * om,
        2.0 * r * p,
        q * p * om,
        -q * q * om2,
        2.0 * q * r * om,
        -2.0 * r * p,
        2.0 * q * r * om,
        -4.0 * r * r,
    ) * pref
}

/// Exact noise propagator: integrate dU₃/dX = W(X)·U₃/Ω over the n periods
/// of a frictionless ramp.
pub fn propagate_interaction_numeric(
    spec: &AdiabatSpec,
    channel: NoiseChannel,
    tol: f64,
) -> Result<MagnusResult> {
    ode::validate_tolerance(tol)?;
    if spec.is_degenerate() || spec.noise.is_zero() {
        return Ok(MagnusResult {
            propagator: Matrix3::identity(),
            delta: 0.0,
            order: MagnusOrder::ExactNumeric,
        });
    }
    let x_end = x_span(spec);
    let periods = x_end / (2.0 * std::f64::consts::PI);
    if (periods - periods.round()).abs() > 1e-6 * periods.max(1.0) || periods < 0.5 {
        return Err(Error::domain(format!(
            "mu = {} is not frictionless-quantized (X span {periods:.6} periods)",
            spec.mu
        )));
    }
    let mu = spec.mu;
    let om = (4.0 - mu * mu).sqrt();
    let noise = spec.noise;
    let rhs = move |x: f64, u: &Matrix3<f64>| {
        let omega = spec.omega0 * (mu * x / om).exp();
        let (s, c) = x.sin_cos();
        let w = match channel {
            NoiseChannel::Phase => w_phase(mu, om, noise.gamma_p * omega, s, c),
            NoiseChannel::Amplitude => w_amplitude(mu, om, noise.gamma_a * omega, s, c),
            NoiseChannel::Both => {
                w_phase(mu, om, noise.gamma_p * omega, s, c)
                    + w_amplitude(mu, om, noise.gamma_a * omega, s, c)
            }
        };
        w * *u / om
    };
    let propagator = ode::integrate(rhs, Matrix3::identity(), 0.0, x_end, tol)?;
    Ok(MagnusResult {
        propagator,
        delta: propagator[(0, 0)] - 1.0,
        order: MagnusOrder::ExactNumeric,
    })
}

/// First-order Magnus term B₁ = ∫₀^{2nπ} W(X) dX/Ω in closed form.
pub fn first_order_term(spec: &AdiabatSpec, n: u32, channel: NoiseChannel) -> Result<Matrix3<f64>> {
    let mu = require_quantized(spec, n)?;
    let om = (4.0 - mu * mu).sqrt();
    let growth = (2.0 * n as f64 * std::f64::consts::PI * mu / om).exp() - 1.0;
    let denom = -16.0 + 3.0 * mu * mu;
    let b1p = {
        let pref = spec.noise.gamma_p * spec.omega0 * mu * growth / denom;
        Matrix3::new(
            -32.0,
            -16.0,
            -32.0 / mu - 6.0 * mu,
            16.0,
            -4.0 + 64.0 / (mu * mu),
            6.0 * mu,
            32.0 / mu + 6.0 * mu,
            6.0 * mu,
            12.0 + 64.0 / (mu * mu),
        ) * pref
    };
    let b1a = {
        let pref = spec.noise.gamma_a * spec.omega0 * growth / denom;
        Matrix3::new(
            -16.0 / mu + mu,
            -mu,
            -4.0,
            mu,
            8.0 / mu - mu,
            2.0,
            4.0,
            2.0,
            8.0 / mu,
        ) * pref
    };
    Ok(match channel {
        NoiseChannel::Phase => b1p,
        NoiseChannel::Amplitude => b1a,
        NoiseChannel::Both => b1p + b1a,
    })
}

/// First-order Magnus term by adaptive quadrature of W/Ω; the numerical
/// route against [`first_order_term`].
pub fn first_order_term_numeric(
    spec: &AdiabatSpec,
    n: u32,
    channel: NoiseChannel,
    tol: f64,
) -> Result<Matrix3<f64>> {
    require_quantized(spec, n)?;
    let mu = spec.mu;
    let om = (4.0 - mu * mu).sqrt();
    let x_end = 2.0 * n as f64 * std::f64::consts::PI;
    let noise = spec.noise;
    let omega0 = spec.omega0;
    quad::integrate_matrix(
        |x| {
            let omega = omega0 * (mu * x / om).exp();
            let (s, c) = x.sin_cos();
            let w = match channel {
                NoiseChannel::Phase => w_phase(mu, om, noise.gamma_p * omega, s, c),
                NoiseChannel::Amplitude => w_amplitude(mu, om, noise.gamma_a * omega, s, c),
                NoiseChannel::Both => {
                    w_phase(mu, om, noise.gamma_p * omega, s, c)
                        + w_amplitude(mu, om, noise.gamma_a * omega, s, c)
                }
            };
            w / om
        },
        0.0,
        x_end,
        tol,
    )
}

/// Shared adiabatic-limit factor F = 16(ω₀ − ω_f)/(3μ² − 16), the
/// cancellation-free form valid for frictionless-quantized μ
/// (uses e^{2nπμ/Ω} = ω_f/ω₀).
fn noise_factor(spec: &AdiabatSpec) -> f64 {
    16.0 * (spec.omega0 - spec.omegaf) / (3.0 * spec.mu * spec.mu - 16.0)
}

/// Raw form of the factor, −16ω₀(e^{2nπμ/Ω} − 1)/(−16 + 3μ²); kept as a
/// diagnostic for non-quantized μ.
pub fn noise_factor_raw(mu: f64, omega0: f64, n: f64) -> f64 {
    let om = (4.0 - mu * mu).sqrt();
    let growth = (2.0 * n * std::f64::consts::PI * mu / om).exp() - 1.0;
    -16.0 * omega0 * growth / (-16.0 + 3.0 * mu * mu)
}

fn factor_at(omega_start: f64, omega_end: f64, mu: f64) -> f64 {
    16.0 * (omega_start - omega_end) / (3.0 * mu * mu - 16.0)
}

/// δ_p evaluated at an arbitrary (not necessarily quantized) μ.
pub fn delta_phase_at_mu(omega_start: f64, omega_end: f64, gamma_p: f64, mu: f64) -> f64 {
    (gamma_p * factor_at(omega_start, omega_end, mu) * mu).exp_m1()
}

/// δ_a evaluated at an arbitrary (not necessarily quantized) μ.
pub fn delta_amplitude_at_mu(omega_start: f64, omega_end: f64, gamma_a: f64, mu: f64) -> f64 {
    (gamma_a * factor_at(omega_start, omega_end, mu) / mu).exp_m1()
}

/// Adiabatic-limit noise propagator: the diagonal first-order Magnus
/// exponentials for each channel (their product for both).
pub fn adiabatic_limit_propagator(
    spec: &AdiabatSpec,
    n: u32,
    channel: NoiseChannel,
) -> Result<MagnusResult> {
    let mu = require_quantized(spec, n)?;
    let f = noise_factor(spec);
    let om2 = 4.0 - mu * mu;
    let phase = |g: f64| {
        Matrix3::from_diagonal(&nalgebra::Vector3::new(
            (g * f * mu).exp(),
            4.0 / (4.0 + mu * mu) * (-4.0 * g * f / mu).exp(),
            (-g * f * om2 / mu).exp(),
        ))
    };
    let amplitude = |g: f64| {
        Matrix3::from_diagonal(&nalgebra::Vector3::new(
            (g * f / mu).exp(),
            (-g * f / (2.0 * mu)).exp(),
            (-g * f / (2.0 * mu)).exp(),
        ))
    };
    let propagator = match channel {
        NoiseChannel::Phase => phase(spec.noise.gamma_p),
        NoiseChannel::Amplitude => amplitude(spec.noise.gamma_a),
        NoiseChannel::Both => phase(spec.noise.gamma_p) * amplitude(spec.noise.gamma_a),
    };
    Ok(MagnusResult {
        propagator,
        delta: propagator[(0, 0)] - 1.0,
        order: MagnusOrder::First,
    })
}

/// First-order phase-noise adiabaticity measure δ_p = e^{γ_pFμ} − 1.
pub fn delta_phase_first(spec: &AdiabatSpec, n: u32) -> Result<f64> {
    let mu = require_quantized(spec, n)?;
    Ok((spec.noise.gamma_p * noise_factor(spec) * mu).exp_m1())
}

/// Second-order phase-noise measure δ_p⁽²⁾ = cosh β − 1 with
/// β = 16ω₀²γ_p²(e^{4nπμ/Ω} − 1)/(4 + 3μ²).
pub fn delta_phase_second(spec: &AdiabatSpec, n: u32) -> Result<f64> {
    let mu = require_quantized(spec, n)?;
    let om = (4.0 - mu * mu).sqrt();
    let growth = (4.0 * n as f64 * std::f64::consts::PI * mu / om).exp() - 1.0;
    let beta = 16.0 * spec.omega0 * spec.omega0 * spec.noise.gamma_p * spec.noise.gamma_p * growth
        / (4.0 + 3.0 * mu * mu);
    Ok(cosh_minus_one(beta))
}

/// n → ∞ plateau of the second-order phase measure:
/// δ_p⁽²⁾ → cosh[4γ_p²(ω₀² − ω_f²)] − 1.
pub fn delta_phase_second_limit(omega0: f64, omegaf: f64, gamma_p: f64) -> f64 {
    cosh_minus_one(4.0 * gamma_p * gamma_p * (omega0 * omega0 - omegaf * omegaf))
}

/// Second-order phase-noise propagator in the adiabatic limit: a hyperbolic
/// rotation in the (⟨H⟩, ⟨L⟩) block.
pub fn second_order_phase_propagator(spec: &AdiabatSpec, n: u32) -> Result<MagnusResult> {
    let mu = require_quantized(spec, n)?;
    let om = (4.0 - mu * mu).sqrt();
    let growth = (4.0 * n as f64 * std::f64::consts::PI * mu / om).exp() - 1.0;
    let beta = 16.0 * spec.omega0 * spec.omega0 * spec.noise.gamma_p * spec.noise.gamma_p * growth
        / (4.0 + 3.0 * mu * mu);
    let (ch, sh) = (beta.cosh(), beta.sinh());
    let propagator = Matrix3::new(ch, -sh, 0.0, -sh, ch, 0.0, 0.0, 0.0, 1.0);
    Ok(MagnusResult {
        propagator,
        delta: cosh_minus_one(beta),
        order: MagnusOrder::Second,
    })
}

fn cosh_minus_one(x: f64) -> f64 {
    let s = (0.5 * x).sinh();
    2.0 * s * s
}

/// First-order amplitude-noise measure δ_a = e^{γ_aF/μ} − 1; grows without
/// bound as the ramp slows.
pub fn delta_amplitude(spec: &AdiabatSpec, n: u32) -> Result<f64> {
    let mu = require_quantized(spec, n)?;
    Ok((spec.noise.gamma_a * noise_factor(spec) / mu).exp_m1())
}

/// Both channels combined, in the additive and product conventions.
pub fn delta_combined(spec: &AdiabatSpec, n: u32) -> Result<CombinedDelta> {
    let dp = delta_phase_first(spec, n)?;
    let da = delta_amplitude(spec, n)?;
    Ok(CombinedDelta {
        additive: dp + da,
        product: dp + da + dp * da,
    })
}

fn validate_noise_crossing(omega_h: f64, omega_c: f64, noise: &NoiseSpec) -> Result<()> {
    if !(omega_h > omega_c) || !(omega_c > 0.0) {
        return Err(Error::domain(format!(
            "need omega_h > omega_c > 0, got {omega_h}, {omega_c}"
        )));
    }
    if !(noise.gamma_p > 0.0) || !(noise.gamma_a > 0.0) {
        return Err(Error::domain(
            "the optimum exists only with both noise channels active",
        ));
    }
    if 4.0 * noise.gamma_p <= noise.gamma_a {
        return Err(Error::domain(format!(
            "no crossing: need 4*gamma_p > gamma_a, got gamma_p = {}, gamma_a = {}",
            noise.gamma_p, noise.gamma_a
        )));
    }
    Ok(())
}

/// Solve ∂(δ_p + δ_a)/∂n = 0: the stationary cycle index is
/// n = √(4γ_p/γ_a − 1)·ln(ω_h/ω_c)/(2π), where the two measures cross at
/// |μ| = √(γ_a/γ_p).
pub fn optimal_cycle_index(omega_h: f64, omega_c: f64, noise: &NoiseSpec) -> Result<OptimalCycle> {
    validate_noise_crossing(omega_h, omega_c, noise)?;
    let n_continuous = (4.0 * noise.gamma_p / noise.gamma_a - 1.0).sqrt()
        * (omega_h / omega_c).ln()
        / (2.0 * std::f64::consts::PI);

    // The stationary point must coincide with the crossing value of mu.
    let mu_cross = (noise.gamma_a / noise.gamma_p).sqrt();
    let mu_at_n = crate::adiabat::mu_for_cycle_count(omega_h, omega_c, n_continuous);
    if (mu_at_n.abs() - mu_cross).abs() > 1e-9 * mu_cross {
        return Err(Error::domain(format!(
            "crossing identity violated: |mu(n_op)| = {} vs sqrt(gamma_a/gamma_p) = {}",
            mu_at_n.abs(),
            mu_cross
        )));
    }

    let lo = (n_continuous.floor() as u32).max(1);
    let hi = (n_continuous.ceil() as u32).max(1);
    let n_integer = if lo == hi {
        lo
    } else {
        let d_lo = delta_combined(
            &AdiabatSpec::frictionless(omega_h, omega_c, lo, *noise)?,
            lo,
        )?
        .additive;
        let d_hi = delta_combined(
            &AdiabatSpec::frictionless(omega_h, omega_c, hi, *noise)?,
            hi,
        )?
        .additive;
        // Ties break toward the shorter cycle.
        if d_hi < d_lo && (d_lo - d_hi).abs() > 1e-12 * d_lo.abs().max(d_hi.abs()) {
            hi
        } else {
            lo
        }
    };
    Ok(OptimalCycle {
        n_continuous,
        n_integer,
    })
}

/// δ at the optimal cycle index:
/// δ = exp[−16√γ_a·γ_p^{3/2}(ω_h − ω_c)/(3γ_a − 16γ_p)] − 1 per channel
/// (both channels take this value at the crossing), plus the additive
/// two-channel combination.
pub fn delta_at_optimum(omega_h: f64, omega_c: f64, noise: &NoiseSpec) -> Result<OptimumDelta> {
    validate_noise_crossing(omega_h, omega_c, noise)?;
    let exponent = -16.0 * noise.gamma_a.sqrt() * noise.gamma_p.powf(1.5) * (omega_h - omega_c)
        / (3.0 * noise.gamma_a - 16.0 * noise.gamma_p);
    let single_channel = exponent.exp_m1();
    Ok(OptimumDelta {
        single_channel,
        additive: 2.0 * single_channel,
    })
}
