//! Flat key = value run configuration.
//!
//! The defaults are the reference parameter set used throughout:
//! ω_c = 2π×1000 rad/s, ω_h/ω_c = 25, T_h = 300 K, γ_p = 1e-6 s,
//! γ_a = 5e-9 s. Unknown keys are rejected; command-line flags override
//! file values.

use std::path::Path;

use super::CliError;

const OMEGA_C_DEFAULT: f64 = 2.0 * std::f64::consts::PI * 1000.0;

/// Everything a command needs, flattened.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Cold (final expansion) frequency, rad/s. Key `omega_c_rad_s`.
    pub omega_c: f64,
    /// Frequency ratio ω_h/ω_c. Key `ratio`.
    pub ratio: f64,
    /// Hot bath temperature, K. Key `T_h_K`.
    pub t_h: f64,
    /// Cold bath temperature, K. Key `T_c_K`.
    pub t_c: f64,
    /// Phase-noise strength, s. Key `gamma_p_s`.
    pub gamma_p: f64,
    /// Amplitude-noise strength, s. Key `gamma_a_s`.
    pub gamma_a: f64,
    /// Hot bath downward rate, 1/s. Key `k_down_hot`.
    pub k_down_hot: f64,
    /// Cold bath downward rate, 1/s. Key `k_down_cold`.
    pub k_down_cold: f64,
    /// Largest cycle index in `sweep-n`. Key `n_max`.
    pub n_max: u32,
    /// Expansion cycle index for `run-cycle`/`adiabat-trace`. Key `n_expansion`.
    pub n_expansion: u32,
    /// Compression cycle index for `run-cycle`. Key `n_compression`.
    pub n_compression: u32,
    /// Hot isochore contact time, s (6/Γ when absent). Key `isochore_duration_hot_s`.
    pub isochore_duration_hot: Option<f64>,
    /// Cold isochore contact time, s (6/Γ when absent). Key `isochore_duration_cold_s`.
    pub isochore_duration_cold: Option<f64>,
    /// Integrator tolerance. Key `ode_tol`.
    pub ode_tol: f64,
    /// Quadrature tolerance. Key `quad_tol`.
    pub quad_tol: f64,
    /// Sweep lower bound (command-specific default when absent). Key `sweep_min`.
    pub sweep_min: Option<f64>,
    /// Sweep upper bound. Key `sweep_max`.
    pub sweep_max: Option<f64>,
    /// Grid size for `sweep-ratio`/`tmin`/`adiabat-trace`. Key `sweep_steps`.
    pub sweep_steps: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            omega_c: OMEGA_C_DEFAULT,
            ratio: 25.0,
            t_h: 300.0,
            t_c: 50.0,
            gamma_p: 1e-6,
            gamma_a: 5e-9,
            k_down_hot: 1.0,
            k_down_cold: 1.0,
            n_max: 30,
            n_expansion: 1,
            n_compression: 1,
            isochore_duration_hot: None,
            isochore_duration_cold: None,
            ode_tol: 1e-10,
            quad_tol: 1e-10,
            sweep_min: None,
            sweep_max: None,
            sweep_steps: 50,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parse a flat `key = value` document; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                CliError::config(format!("line {}: {what} `{key} = {value}`", lineno + 1))
            };
            let as_f64 = || value.parse::<f64>().map_err(|_| bad("non-numeric value for"));
            match key {
                "omega_c_rad_s" => cfg.omega_c = as_f64()?,
                "ratio" => cfg.ratio = as_f64()?,
                "T_h_K" => cfg.t_h = as_f64()?,
                "T_c_K" => cfg.t_c = as_f64()?,
                "gamma_p_s" => cfg.gamma_p = as_f64()?,
                "gamma_a_s" => cfg.gamma_a = as_f64()?,
                "k_down_hot" => cfg.k_down_hot = as_f64()?,
                "k_down_cold" => cfg.k_down_cold = as_f64()?,
                "n_max" => {
                    cfg.n_max = value.parse().map_err(|_| bad("non-integer value for"))?
                }
                "n_expansion" => {
                    cfg.n_expansion = value.parse().map_err(|_| bad("non-integer value for"))?
                }
                "n_compression" => {
                    cfg.n_compression = value.parse().map_err(|_| bad("non-integer value for"))?
                }
                "isochore_duration_hot_s" => cfg.isochore_duration_hot = Some(as_f64()?),
                "isochore_duration_cold_s" => cfg.isochore_duration_cold = Some(as_f64()?),
                "ode_tol" => cfg.ode_tol = as_f64()?,
                "quad_tol" => cfg.quad_tol = as_f64()?,
                "sweep_min" => cfg.sweep_min = Some(as_f64()?),
                "sweep_max" => cfg.sweep_max = Some(as_f64()?),
                "sweep_steps" => {
                    cfg.sweep_steps = value.parse().map_err(|_| bad("non-integer value for"))?
                }
                _ => return Err(bad("unknown key")),
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("omega_c_rad_s", self.omega_c),
            ("T_h_K", self.t_h),
            ("T_c_K", self.t_c),
            ("k_down_hot", self.k_down_hot),
            ("k_down_cold", self.k_down_cold),
        ];
        for (key, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CliError::config(format!("{key} must be positive, got {v}")));
            }
        }
        if !(self.ratio > 1.0) || !self.ratio.is_finite() {
            return Err(CliError::config(format!(
                "ratio must exceed 1, got {}",
                self.ratio
            )));
        }
        if self.t_c >= self.t_h {
            return Err(CliError::config(format!(
                "T_c_K must be below T_h_K, got {} >= {}",
                self.t_c, self.t_h
            )));
        }
        if !(self.gamma_p >= 0.0) || !(self.gamma_a >= 0.0) {
            return Err(CliError::config(
                "noise strengths must be non-negative".to_string(),
            ));
        }
        for (key, tol) in [("ode_tol", self.ode_tol), ("quad_tol", self.quad_tol)] {
            if !(1e-14..=1e-4).contains(&tol) {
                return Err(CliError::config(format!(
                    "{key} must lie in [1e-14, 1e-4], got {tol:e}"
                )));
            }
        }
        if self.n_max == 0 || self.n_expansion == 0 || self.n_compression == 0 {
            return Err(CliError::config(
                "cycle indices must be at least 1".to_string(),
            ));
        }
        if self.sweep_steps < 2 {
            return Err(CliError::config(format!(
                "sweep_steps must be at least 2, got {}",
                self.sweep_steps
            )));
        }
        if let (Some(lo), Some(hi)) = (self.sweep_min, self.sweep_max) {
            if !(lo < hi) {
                return Err(CliError::config(format!(
                    "sweep_min must be below sweep_max, got {lo} >= {hi}"
                )));
            }
        }
        for (key, d) in [
            ("isochore_duration_hot_s", self.isochore_duration_hot),
            ("isochore_duration_cold_s", self.isochore_duration_cold),
        ] {
            if let Some(d) = d {
                if !(d >= 0.0) || !d.is_finite() {
                    return Err(CliError::config(format!(
                        "{key} must be non-negative, got {d}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn omega_h(&self) -> f64 {
        self.ratio * self.omega_c
    }

    pub fn noise(&self) -> Result<crate::NoiseSpec, CliError> {
        crate::NoiseSpec::new(self.gamma_p, self.gamma_a)
            .map_err(|e| CliError::config(e.to_string()))
    }

    pub fn cycle_config(&self) -> Result<crate::cycle::CycleConfig, CliError> {
        let to_config = |e: crate::Error| CliError::config(e.to_string());
        let hot = crate::BathSpec::new(self.t_h, self.omega_h(), self.k_down_hot)
            .map_err(to_config)?;
        let cold =
            crate::BathSpec::new(self.t_c, self.omega_c, self.k_down_cold).map_err(to_config)?;
        let durations = match (self.isochore_duration_hot, self.isochore_duration_cold) {
            (None, None) => None,
            (th, tc) => {
                // A single explicit duration keeps the other at its 6/Γ default.
                let fill = |bath, given: Option<f64>| -> Result<f64, CliError> {
                    match given {
                        Some(t) => Ok(t),
                        None => Ok(crate::isochore::IsochoreSegment::thermalizing(bath)
                            .map_err(to_config)?
                            .duration),
                    }
                };
                Some((fill(hot, th)?, fill(cold, tc)?))
            }
        };
        crate::cycle::CycleConfig::new(
            hot,
            cold,
            self.n_expansion,
            self.n_compression,
            self.noise()?,
            durations,
        )
        .map_err(to_config)
    }

    /// Ordered (key, value) echo for dataset metadata blocks.
    pub fn echo(&self) -> Vec<(String, String)> {
        let f = super::dataset::fmt_float;
        let mut out = vec![
            ("omega_c_rad_s".into(), f(self.omega_c)),
            ("ratio".into(), f(self.ratio)),
            ("T_h_K".into(), f(self.t_h)),
            ("T_c_K".into(), f(self.t_c)),
            ("gamma_p_s".into(), f(self.gamma_p)),
            ("gamma_a_s".into(), f(self.gamma_a)),
            ("k_down_hot".into(), f(self.k_down_hot)),
            ("k_down_cold".into(), f(self.k_down_cold)),
            ("n_max".into(), self.n_max.to_string()),
            ("n_expansion".into(), self.n_expansion.to_string()),
            ("n_compression".into(), self.n_compression.to_string()),
            ("ode_tol".into(), f(self.ode_tol)),
            ("quad_tol".into(), f(self.quad_tol)),
            ("sweep_steps".into(), self.sweep_steps.to_string()),
        ];
        if let Some(t) = self.isochore_duration_hot {
            out.push(("isochore_duration_hot_s".into(), f(t)));
        }
        if let Some(t) = self.isochore_duration_cold {
            out.push(("isochore_duration_cold_s".into(), f(t)));
        }
        if let Some(v) = self.sweep_min {
            out.push(("sweep_min".into(), f(v)));
        }
        if let Some(v) = self.sweep_max {
            out.push(("sweep_max".into(), f(v)));
        }
        out
    }
}
