//! Modified Bessel function of the first kind, evaluated in log space.

use crate::error::{Error, Result};
use crate::specfun::gamma::lgamma;

/// `ln I_ν(x)` above which `bessel_i` reports overflow (`ln f64::MAX`).
pub const BESSEL_I_LN_OVERFLOW: f64 = 709.78;

/// I_ν(x) for `ν > -1`, `x >= 0`.
///
/// Overflows (error) once `ln I_ν(x)` exceeds [`BESSEL_I_LN_OVERFLOW`], which
/// for small orders happens near `x ≈ 713`. Use [`ln_bessel_i`] beyond that.
pub fn bessel_i(order: f64, x: f64) -> Result<f64> {
    check(order, x)?;
    if x == 0.0 {
        return match order {
            o if o == 0.0 => Ok(1.0),
            o if o > 0.0 => Ok(0.0),
            _ => Err(Error::domain("bessel_i", "I_ν(0) is infinite for -1 < ν < 0")),
        };
    }
    let ln = ln_bessel_i(order, x)?;
    if ln > BESSEL_I_LN_OVERFLOW {
        return Err(Error::Overflow(format!("bessel_i({order}, {x})")));
    }
    Ok(ln.exp())
}

/// `ln I_ν(x)` for `x > 0`.
pub fn ln_bessel_i(order: f64, x: f64) -> Result<f64> {
    check(order, x)?;
    if x == 0.0 {
        return Err(Error::domain("ln_bessel_i", "x must be positive"));
    }
    if use_asymptotic(order, x) {
        return Ok(ln_asymptotic(order, x));
    }
    Ok(order * (0.5 * x).ln() + ln_series_ratio(order, x))
}

/// `ln[I_ν(x) / (x/2)^ν]`, finite and smooth down to `x = 0` where it equals
/// `-ln Γ(ν + 1)`. Fading densities use it to cancel the `(x/2)^ν` factor
/// analytically.
pub fn ln_bessel_i_ratio(order: f64, x: f64) -> Result<f64> {
    check(order, x)?;
    if x == 0.0 {
        return Ok(-lgamma(order + 1.0));
    }
    if use_asymptotic(order, x) {
        return Ok(ln_asymptotic(order, x) - order * (0.5 * x).ln());
    }
    Ok(ln_series_ratio(order, x))
}

fn check(order: f64, x: f64) -> Result<()> {
    if !(order > -1.0) || !order.is_finite() || !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("bessel_i", format!("order = {order}, x = {x}")));
    }
    Ok(())
}

fn use_asymptotic(order: f64, x: f64) -> bool {
    x > 50.0 && x > order * order
}

/// Power series `Σ (x²/4)^k / (k! Γ(k+ν+1))`, summed relative to its first term.
fn ln_series_ratio(order: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        term *= q / ((k + 1.0) * (k + order + 1.0));
        sum += term;
        k += 1.0;
        if k > 0.5 * x && term <= 1e-17 * sum {
            break;
        }
    }
    sum.ln() - lgamma(order + 1.0)
}

/// Hankel expansion `e^x / √(2πx) Σ (-1)^k a_k(ν) / x^k`.
fn ln_asymptotic(order: f64, x: f64) -> f64 {
    let mu = 4.0 * order * order;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = -term * (mu - odd * odd) / (kf * 8.0 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    x - 0.5 * (2.0 * std::f64::consts::PI * x).ln() + sum.ln()
}
