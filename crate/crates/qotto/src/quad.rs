//! Adaptive Simpson quadrature.
//!
//! Used as the independent numerical route against the closed-form Magnus
//! terms; matrix integrands are handled entry by entry so every entry meets
//! the tolerance in its own scale.

use nalgebra::Matrix3;

use crate::{Error, Result};

const MAX_DEPTH: u32 = 60;

/// Integrate a scalar function over [a, b] to relative tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || tol >= 1.0 {
        return Err(Error::domain(format!(
            "quadrature tolerance must lie in (0, 1), got {tol:e}"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    // Scale reference from a coarse sample of the integrand, so entries whose
    // coarse Simpson estimate happens to cancel still get a sane target.
    let mut scale: f64 = 0.0;
    for i in 0..=32 {
        let x = a + (b - a) * (i as f64) / 32.0;
        scale = scale.max(f(x).abs());
    }
    let eps = tol * (scale * (b - a).abs()).max(f64::MIN_POSITIVE);

    // Bootstrap with panels about one radian wide. A single panel over a
    // trig-periodic integrand can put every Simpson node on a zero and
    // terminate instantly with 0.
    let panels = ((b - a).abs().ceil() as usize).clamp(8, 4096);
    let mut total = 0.0;
    for i in 0..panels {
        let pa = a + (b - a) * (i as f64) / (panels as f64);
        let pb = a + (b - a) * ((i + 1) as f64) / (panels as f64);
        let m = 0.5 * (pa + pb);
        let (fa, fm, fb) = (f(pa), f(m), f(pb));
        let whole = simpson(pa, pb, fa, fm, fb);
        total += adaptive(
            &f,
            pa,
            pb,
            fa,
            fm,
            fb,
            whole,
            eps / panels as f64,
            MAX_DEPTH,
        )?;
    }
    Ok(total)
}

/// Integrate a 3×3 matrix-valued function entrywise.
pub fn integrate_matrix<F: Fn(f64) -> Matrix3<f64>>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Matrix3<f64>> {
    let mut out = Matrix3::zeros();
    for r in 0..3 {
        for c in 0..3 {
            out[(r, c)] = integrate(|x| f(x)[(r, c)], a, b, tol)?;
        }
    }
    Ok(out)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * eps {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!(
            "recursion limit reached on [{a:e}, {b:e}]"
        )));
    }
    Ok(adaptive(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)?
        + adaptive(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)?)
}
