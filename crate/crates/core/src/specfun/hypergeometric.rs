//! Confluent and Gauss hypergeometric series.

use crate::error::{Error, Result};

const SERIES_EPS: f64 = 1e-16;
const MAX_TERMS: usize = 200_000;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Kummer's confluent hypergeometric function ₁F₁(a; b; z).
///
/// Negative `z` goes through Kummer's transformation
/// `₁F₁(a; b; z) = e^z ₁F₁(b - a; b; -z)` so the summed series has no
/// large alternating terms.
pub fn kummer_1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(b) {
        return Err(Error::Pole { function: "kummer_1f1", at: b });
    }
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(Error::domain("kummer_1f1", format!("a = {a}, b = {b}, z = {z}")));
    }
    if z < 0.0 {
        return Ok(z.exp() * series_1f1(b - a, b, -z)?);
    }
    series_1f1(a, b, z)
}

fn series_1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * z / ((b + nf) * (nf + 1.0));
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        // past the peak of the terms, stop once they are negligible
        if nf > z && term.abs() <= SERIES_EPS * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::no_conv("kummer_1f1", format!("a = {a}, b = {b}, z = {z}")))
}

/// ∂/∂a ₁F₁(a; b; z) at a = 0, i.e. `Σ_{n≥1} zⁿ / (n (b)_n)`.
///
/// For `z < 0` the derivative of the Kummer-transformed series is summed
/// instead: `-e^z Σ_{n≥1} (-z)ⁿ/n! · [ψ(b+n) - ψ(b)]`, whose terms are all
/// positive.
pub fn kummer_1f1_da_at_zero(b: f64, z: f64) -> Result<f64> {
    if !(b > 0.0) || !z.is_finite() {
        return Err(Error::domain("kummer_1f1_da_at_zero", format!("b = {b}, z = {z}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z > 0.0 {
        // term_n = zⁿ / (n (b)_n); track zⁿ/(b)_n
        let mut ratio = 1.0;
        let mut sum = 0.0;
        for n in 1..MAX_TERMS {
            let nf = n as f64;
            ratio *= z / (b + nf - 1.0);
            let term = ratio / nf;
            sum += term;
            if nf > z && term <= SERIES_EPS * sum {
                return Ok(sum);
            }
        }
        return Err(Error::no_conv("kummer_1f1_da_at_zero", format!("b = {b}, z = {z}")));
    }
    let w = -z;
    let mut pow_fact = 1.0; // wⁿ/n!
    let mut harmonic = 0.0; // ψ(b+n) - ψ(b) = Σ_{k<n} 1/(b+k)
    let mut sum = 0.0;
    for n in 1..MAX_TERMS {
        let nf = n as f64;
        pow_fact *= w / nf;
        harmonic += 1.0 / (b + nf - 1.0);
        let term = pow_fact * harmonic;
        sum += term;
        if nf > w && term <= SERIES_EPS * sum {
            return Ok(-z.exp() * sum);
        }
    }
    Err(Error::no_conv("kummer_1f1_da_at_zero", format!("b = {b}, z = {z}")))
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) for `|z| < 1`.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return Err(Error::Pole { function: "gauss_2f1", at: c });
    }
    if !(z.abs() < 1.0) {
        return Err(Error::domain("gauss_2f1", format!("|z| = {} must be < 1", z.abs())));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) * z / ((c + nf) * (nf + 1.0));
        sum += term;
        if term == 0.0 || (nf > 2.0 && term.abs() <= SERIES_EPS * sum.abs()) {
            return Ok(sum);
        }
    }
    Err(Error::no_conv("gauss_2f1", format!("a = {a}, b = {b}, c = {c}, z = {z}")))
}
