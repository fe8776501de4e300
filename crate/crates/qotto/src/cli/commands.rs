//! The five experiment drivers.
//!
//! Sweep rows are independent, so they are computed in parallel and emitted
//! in ascending order; a failed row is marked in the error column and the
//! sweep continues.

use rayon::prelude::*;

use super::{CliError, Dataset, RunConfig, Value};
use crate::adiabat::{frictionless_mu, frictionless_tau, trace_adiabat, AdiabatSpec};
use crate::cycle::{cycle_energetics, minimum_temperature, tc_bound};
use crate::magnus::{
    delta_amplitude, delta_at_optimum, delta_combined, delta_phase_first, delta_phase_second,
    optimal_cycle_index, propagate_interaction_numeric, NoiseChannel,
};
use crate::medium::{casimir_form, thermal_triple, NoiseSpec};
use crate::{Error, Result as LibResult};

fn base_metadata(dataset: &mut Dataset, cfg: &RunConfig, command: &str) {
    dataset.meta("tool", env!("CARGO_PKG_NAME"));
    dataset.meta("version", env!("CARGO_PKG_VERSION"));
    dataset.meta("command", command);
    for (k, v) in cfg.echo() {
        dataset.meta(&k, v);
    }
}

/// Collects per-row values, turning the first failure into the row error
/// and padding the cell with NaN.
struct RowBuilder {
    values: Vec<Value>,
    error: Option<String>,
}

impl RowBuilder {
    fn new() -> Self {
        Self {
            values: Vec::new(),
            error: None,
        }
    }

    fn int(&mut self, v: i64) {
        self.values.push(Value::Int(v));
    }

    fn float(&mut self, v: f64) {
        self.values.push(Value::Float(v));
    }

    fn try_float(&mut self, r: LibResult<f64>) {
        match r {
            Ok(v) => self.values.push(Value::Float(v)),
            Err(e) => {
                if self.error.is_none() {
                    self.error = Some(e.to_string());
                }
                self.values.push(Value::Float(f64::NAN));
            }
        }
    }

    fn try_int(&mut self, r: LibResult<i64>) {
        match r {
            Ok(v) => self.values.push(Value::Int(v)),
            Err(e) => {
                if self.error.is_none() {
                    self.error = Some(e.to_string());
                }
                self.values.push(Value::Text("nan".to_string()));
            }
        }
    }
}

/// Adiabaticity measures versus the frictionless cycle index n.
pub fn sweep_n(cfg: &RunConfig) -> Result<Dataset, CliError> {
    cfg.validate()?;
    let noise = cfg.noise()?;
    let (omega_h, omega_c) = (cfg.omega_h(), cfg.omega_c);
    let tol = cfg.ode_tol;

    let rows: Vec<RowBuilder> = (1..=cfg.n_max)
        .into_par_iter()
        .map(|n| {
            let mut row = RowBuilder::new();
            row.int(n as i64);
            row.try_float(frictionless_mu(omega_h, omega_c, n));
            row.try_float(frictionless_tau(omega_h, omega_c, n));
            match AdiabatSpec::frictionless(omega_h, omega_c, n, noise) {
                Ok(spec) => {
                    row.try_float(
                        propagate_interaction_numeric(&spec, NoiseChannel::Phase, tol)
                            .map(|m| m.delta),
                    );
                    row.try_float(delta_phase_first(&spec, n));
                    row.try_float(delta_phase_second(&spec, n));
                    row.try_float(
                        propagate_interaction_numeric(&spec, NoiseChannel::Amplitude, tol)
                            .map(|m| m.delta),
                    );
                    row.try_float(delta_amplitude(&spec, n));
                    row.try_float(delta_combined(&spec, n).map(|c| c.additive));
                }
                Err(e) => {
                    for _ in 0..6 {
                        row.try_float(Err(e.clone()));
                    }
                }
            }
            row
        })
        .collect();

    let mut ds = Dataset::new(&[
        "n",
        "mu",
        "tau_expansion",
        "delta_p_exact",
        "delta_p_magnus1",
        "delta_p_magnus2",
        "delta_a_exact",
        "delta_a_magnus1",
        "delta_pa",
    ]);
    base_metadata(&mut ds, cfg, "sweep-n");
    for row in rows {
        ds.push(row.values, row.error);
    }
    Ok(ds)
}

/// Zero-noise closed forms report δ = 0 instead of demanding an optimum.
fn optimum_deltas(omega_h: f64, omega_c: f64, noise: &NoiseSpec) -> LibResult<(f64, f64)> {
    if noise.is_zero() {
        return Ok((0.0, 0.0));
    }
    let d = delta_at_optimum(omega_h, omega_c, noise)?;
    Ok((d.single_channel, d.additive))
}

/// Optimal cycle index and minimum temperature versus ω_h/ω_c.
pub fn sweep_ratio(cfg: &RunConfig) -> Result<Dataset, CliError> {
    cfg.validate()?;
    let noise = cfg.noise()?;
    let lo = cfg.sweep_min.unwrap_or(2.0);
    let hi = cfg.sweep_max.unwrap_or(100.0);
    if !(lo > 1.0) {
        return Err(CliError::config(format!(
            "ratio sweep bounds must exceed 1, got sweep_min = {lo}"
        )));
    }
    let steps = cfg.sweep_steps;
    let omega_c = cfg.omega_c;
    let t_h = cfg.t_h;

    let rows: Vec<RowBuilder> = (0..steps)
        .into_par_iter()
        .map(|i| {
            let ratio = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
            let omega_h = ratio * omega_c;
            let mut row = RowBuilder::new();
            row.float(ratio);
            let opt = optimal_cycle_index(omega_h, omega_c, &noise);
            row.try_float(opt.as_ref().map(|o| o.n_continuous).map_err(Error::clone));
            row.try_int(opt.map(|o| o.n_integer as i64));
            row.try_float(optimum_deltas(omega_h, omega_c, &noise).map(|d| d.0));
            row.try_float(minimum_temperature(omega_c, omega_h, t_h, &noise));
            row
        })
        .collect();

    let mut ds = Dataset::new(&[
        "ratio",
        "n_continuous",
        "n_integer",
        "delta_at_optimum",
        "t_min",
    ]);
    base_metadata(&mut ds, cfg, "sweep-ratio");
    ds.meta("sweep_lo", super::dataset::fmt_float(lo));
    ds.meta("sweep_hi", super::dataset::fmt_float(hi));
    for row in rows {
        ds.push(row.values, row.error);
    }
    Ok(ds)
}

/// Temperature bounds versus the cold frequency (log grid), at fixed ω_h.
pub fn tmin(cfg: &RunConfig) -> Result<Dataset, CliError> {
    cfg.validate()?;
    let noise = cfg.noise()?;
    let omega_h = cfg.omega_h();
    let lo = cfg
        .sweep_min
        .unwrap_or(2.0 * std::f64::consts::PI * 1.0e-3);
    let hi = cfg.sweep_max.unwrap_or(cfg.omega_c);
    if !(lo > 0.0) {
        return Err(CliError::config(format!(
            "cold-frequency sweep bounds must be positive, got sweep_min = {lo}"
        )));
    }
    if !(hi < omega_h) {
        return Err(CliError::config(format!(
            "cold-frequency sweep must stay below omega_h = {omega_h}, got sweep_max = {hi}"
        )));
    }
    let steps = cfg.sweep_steps;
    let t_h = cfg.t_h;

    let rows: Vec<RowBuilder> = (0..steps)
        .into_par_iter()
        .map(|i| {
            let omega_c = lo * (hi / lo).powf(i as f64 / (steps - 1) as f64);
            let mut row = RowBuilder::new();
            row.float(omega_c);
            row.try_float(tc_bound(omega_c, omega_h, t_h, 0.0));
            match optimum_deltas(omega_h, omega_c, &noise) {
                Ok((single, additive)) => {
                    row.try_float(tc_bound(omega_c, omega_h, t_h, single));
                    row.try_float(tc_bound(omega_c, omega_h, t_h, additive));
                }
                Err(e) => {
                    row.try_float(Err(e.clone()));
                    row.try_float(Err(e));
                }
            }
            row
        })
        .collect();

    let mut ds = Dataset::new(&["omega_c", "tc_carnot", "tc_noisy_single", "tc_noisy_additive"]);
    base_metadata(&mut ds, cfg, "tmin");
    ds.meta("sweep_lo", super::dataset::fmt_float(lo));
    ds.meta("sweep_hi", super::dataset::fmt_float(hi));
    for row in rows {
        ds.push(row.values, row.error);
    }
    Ok(ds)
}

/// Limit cycle and energetics; returns the dataset and whether the run
/// converged (a non-contractive cycle is reported, not swallowed).
pub fn run_cycle(cfg: &RunConfig) -> Result<(Dataset, bool), CliError> {
    cfg.validate()?;
    let cycle_config = cfg.cycle_config()?;
    let mut ds = Dataset::new(&["quantity", "value"]);
    base_metadata(&mut ds, cfg, "run-cycle");

    let kv = |ds: &mut Dataset, key: &str, value: Value| {
        ds.push(vec![Value::Text(key.to_string()), value], None);
    };
    match cycle_energetics(&cycle_config, cfg.ode_tol) {
        Ok(report) => {
            kv(&mut ds, "converged", Value::Text("true".into()));
            kv(&mut ds, "refrigerating", Value::Text(report.refrigerating.to_string()));
            kv(
                &mut ds,
                "limit_start_hot_h_J",
                Value::Float(report.limit_triple_start_hot.h),
            );
            kv(
                &mut ds,
                "limit_start_hot_l_J",
                Value::Float(report.limit_triple_start_hot.l),
            );
            kv(
                &mut ds,
                "limit_start_hot_d_J",
                Value::Float(report.limit_triple_start_hot.d),
            );
            kv(&mut ds, "q_cold_J", Value::Float(report.q_cold));
            kv(&mut ds, "q_hot_J", Value::Float(report.q_hot));
            kv(&mut ds, "w_net_J", Value::Float(report.w_net));
            kv(
                &mut ds,
                "cop",
                match report.cop {
                    Some(c) => Value::Float(c),
                    None => Value::Text("undefined".into()),
                },
            );
            kv(&mut ds, "delta_expansion", Value::Float(report.delta_expansion));
            kv(
                &mut ds,
                "first_law_residual_J",
                Value::Float(report.first_law_residual),
            );
            Ok((ds, true))
        }
        Err(Error::NonContractive { spectral_radius }) => {
            kv(&mut ds, "converged", Value::Text("false".into()));
            ds.push(
                vec![
                    Value::Text("spectral_radius".into()),
                    Value::Float(spectral_radius),
                ],
                Some(Error::NonContractive { spectral_radius }.to_string()),
            );
            Ok((ds, false))
        }
        Err(e) => Err(e.into()),
    }
}

/// Sample one expansion adiabat from the hot-thermal start.
pub fn adiabat_trace(cfg: &RunConfig) -> Result<Dataset, CliError> {
    cfg.validate()?;
    let noise = cfg.noise()?;
    let spec = AdiabatSpec::frictionless(cfg.omega_h(), cfg.omega_c, cfg.n_expansion, noise)
        .map_err(|e| CliError::config(e.to_string()))?;
    let start = thermal_triple(cfg.omega_h(), cfg.t_h).map_err(|e| CliError::config(e.to_string()))?;
    let samples = trace_adiabat(&spec, &start, cfg.sweep_steps.max(2), cfg.ode_tol)?;

    let mut ds = Dataset::new(&["theta", "omega", "h", "l", "d", "casimir"]);
    base_metadata(&mut ds, cfg, "adiabat-trace");
    for s in &samples {
        let casimir = casimir_form(&s.triple, s.omega)?;
        ds.push(
            vec![
                Value::Float(s.theta),
                Value::Float(s.omega),
                Value::Float(s.triple.h),
                Value::Float(s.triple.l),
                Value::Float(s.triple.d),
                Value::Float(casimir),
            ],
            None,
        );
    }
    Ok(ds)
}
