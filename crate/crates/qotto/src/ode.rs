//! Embedded Dormand–Prince 5(4) integrator with PI step-size control.
//!
//! The cycle dynamics only ever needs dense 3-vector and 3×3-matrix states,
//! so the solver is generic over `nalgebra::SMatrix` shapes and keeps
//! everything on the stack.

use nalgebra::SMatrix;

use crate::{Error, Result};

// Dormand–Prince RKDP 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Difference between the 5th- and embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 10.0;
// PI controller exponents for a 5th-order pair.
const PI_BETA: f64 = 0.04;
const PI_ALPHA: f64 = 0.2 - 0.75 * PI_BETA;
const MAX_STEPS: usize = 50_000_000;

/// Integrate dy/dx = f(x, y) from `x0` to `x1` and return y(x1).
///
/// `tol` acts as both relative and absolute tolerance in a max-norm error
/// estimate; accepted range is [1e-14, 1e-4].
pub fn integrate<const R: usize, const C2: usize, F>(
    f: F,
    y0: SMatrix<f64, R, C2>,
    x0: f64,
    x1: f64,
    tol: f64,
) -> Result<SMatrix<f64, R, C2>>
where
    F: Fn(f64, &SMatrix<f64, R, C2>) -> SMatrix<f64, R, C2>,
{
    validate_tolerance(tol)?;
    if x0 == x1 {
        return Ok(y0);
    }
    let span = x1 - x0;
    let direction = span.signum();
    let h_floor = 16.0 * f64::EPSILON * span.abs().max(x0.abs()).max(x1.abs());

    let mut x = x0;
    let mut y = y0;
    let mut h = direction * (span.abs() * 1e-3).max(h_floor);
    let mut k = [SMatrix::<f64, R, C2>::zeros(); 7];
    k[0] = f(x, &y);
    let mut err_prev: f64 = 1.0;
    let mut rejected = false;

    for _ in 0..MAX_STEPS {
        // Never step past the endpoint.
        if (x + h - x1) * direction > 0.0 {
            h = x1 - x;
        }
        if h.abs() < h_floor {
            return Err(Error::Integrator(format!(
                "step size underflow at x = {x:e} (h = {h:e})"
            )));
        }

        for i in 1..7 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(i) {
                yi += kj * (A[i][j] * h);
            }
            k[i] = f(x + C[i] * h, &yi);
        }
        // k[6] was evaluated at the 5th-order solution point (FSAL).
        let mut y_new = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            y_new += kj * (A[6][j] * h);
        }

        // Error in units of the state norm: the systems here are linear, so
        // the natural scale is ‖y‖ rather than a fixed absolute floor (triple
        // states live at ~1e-21 J, propagators at O(1)).
        let scale = tol * y.amax().max(y_new.amax()).max(f64::MIN_POSITIVE);
        let mut err_norm: f64 = 0.0;
        for r in 0..R {
            for c in 0..C2 {
                let mut e = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    e += E[j] * kj[(r, c)];
                }
                err_norm = err_norm.max((e * h / scale).abs());
            }
        }

        if err_norm <= 1.0 {
            x += h;
            y = y_new;
            k[0] = k[6];
            if (x - x1) * direction >= 0.0 {
                return Ok(y);
            }
            let mut scale =
                SAFETY * err_norm.max(1e-10).powf(-PI_ALPHA) * err_prev.powf(PI_BETA);
            scale = scale.clamp(MIN_SCALE, MAX_SCALE);
            if rejected {
                scale = scale.min(1.0);
            }
            h *= scale;
            err_prev = err_norm.max(1e-10);
            rejected = false;
        } else {
            rejected = true;
            let scale = (SAFETY * err_norm.powf(-0.2)).clamp(MIN_SCALE, 1.0);
            h *= scale;
        }
    }
    Err(Error::Integrator(format!(
        "exceeded {MAX_STEPS} steps before reaching x = {x1:e}"
    )))
}

pub(crate) fn validate_tolerance(tol: f64) -> Result<()> {
    if !(1e-14..=1e-4).contains(&tol) {
        return Err(Error::domain(format!(
            "integration tolerance must lie in [1e-14, 1e-4], got {tol:e}"
        )));
    }
    Ok(())
}
