//! Gamma-family functions: complex log-gamma, polygamma of orders 0 and 1,
//! and the (regularized) incomplete gamma functions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
/// Below this real part the upward recurrence would need too many steps and
/// the reflection formula is used instead.
const RECURRENCE_LIMIT: f64 = 64.0;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Principal branch of `ln Γ(z)`.
///
/// Uses the Lanczos approximation on `Re z >= 0.5`. Left of that the upward
/// recurrence `ln Γ(z) = ln Γ(z + n) - Σ ln(z + k)` keeps the principal branch;
/// far into the left half-plane the reflection formula takes over and the
/// result is only defined modulo `2πi`.
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && is_nonpositive_integer(z.re) {
        return Err(Error::Pole { function: "ln_gamma", at: z.re });
    }
    Ok(lgamma_c(z))
}

pub(crate) fn lgamma_c(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        return lanczos(z);
    }
    if z.re > -RECURRENCE_LIMIT {
        let n = (0.5 - z.re).ceil() as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut w = z;
        for _ in 0..n {
            acc += w.ln();
            w += 1.0;
        }
        return lanczos(w) - acc;
    }
    Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - lanczos(Complex64::new(1.0, 0.0) - z)
}

fn lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut a = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (z + 0.5) * t.ln() - t + a.ln() + LN_SQRT_2PI
}

/// `ln sin(πz)` without overflow for large `|Im z|` (modulo 2πi).
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    let w = z * PI;
    let i = Complex64::new(0.0, 1.0);
    let e = (i * w * 2.0).exp();
    -i * w + (Complex64::new(1.0, 0.0) - e).ln() + Complex64::new(0.5f64.ln(), PI / 2.0)
}

/// `ln Γ(x)` for real `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("ln_gamma", format!("x = {x} must be positive and finite")));
    }
    Ok(lgamma(x))
}

pub(crate) fn lgamma(x: f64) -> f64 {
    if let Some(f) = small_factorial(x) {
        return f.ln();
    }
    if x < 0.5 {
        // reflection keeps accuracy close to the origin
        (PI / (PI * x).sin()).abs().ln() - lanczos_real(1.0 - x)
    } else {
        lanczos_real(x)
    }
}

fn lanczos_real(x: f64) -> f64 {
    let z = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (z + 0.5) * t.ln() - t + a.ln() + LN_SQRT_2PI
}

/// `Γ(x) = (x-1)!` for integers `1 ≤ x ≤ 23`, where the factorial is exact in f64.
fn small_factorial(x: f64) -> Option<f64> {
    if x >= 1.0 && x <= 23.0 && x == x.floor() {
        Some((2..x as u64).fold(1.0, |acc, k| acc * k as f64))
    } else {
        None
    }
}

/// Γ(x) for real `x` away from the poles.
pub fn gamma(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole { function: "gamma", at: x });
    }
    if let Some(f) = small_factorial(x) {
        return Ok(f);
    }
    if x >= 0.5 {
        return Ok(lanczos_real(x).exp());
    }
    Ok(PI / ((PI * x).sin() * lanczos_real(1.0 - x).exp()))
}

/// `ln[(a)_k] = ln Γ(a + k) - ln Γ(a)` for `a > 0`, `a + k > 0`.
pub fn ln_pochhammer(a: f64, k: f64) -> Result<f64> {
    if !(a > 0.0) || !(a + k > 0.0) {
        return Err(Error::domain("ln_pochhammer", format!("a = {a}, k = {k}")));
    }
    Ok(lgamma(a + k) - lgamma(a))
}

/// Digamma ψ(x) for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("digamma", format!("x = {x} must be positive")));
    }
    Ok(psi0(x))
}

/// Trigamma ψ'(x) for `x > 0`.
pub fn trigamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("trigamma", format!("x = {x} must be positive")));
    }
    Ok(psi1(x))
}

pub(crate) fn psi0(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let r = 1.0 / (x * x);
    let series = r
        * (1.0 / 12.0
            - r * (1.0 / 120.0
                - r * (1.0 / 252.0
                    - r * (1.0 / 240.0 - r * (1.0 / 132.0 - r * (691.0 / 32760.0 - r / 12.0))))));
    acc + x.ln() - 0.5 / x - series
}

pub(crate) fn psi1(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let r = 1.0 / (x * x);
    let tail = 1.0 / 6.0
        - r * (1.0 / 30.0
            - r * (1.0 / 42.0
                - r * (1.0 / 30.0 - r * (5.0 / 66.0 - r * (691.0 / 2730.0 - r * 7.0 / 6.0)))));
    acc + 1.0 / x + 0.5 * r + tail * r / x
}

const INC_EPS: f64 = 1e-16;
const INC_MAX_ITER: usize = 100_000;

/// Regularized lower incomplete gamma `P(s, x)`.
pub fn gamma_p(s: f64, x: f64) -> Result<f64> {
    check_inc(s, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < s + 1.0 {
        lower_series(s, x)
    } else {
        Ok(1.0 - upper_fraction(s, x)?)
    }
}

/// Regularized upper incomplete gamma `Q(s, x) = 1 - P(s, x)`.
pub fn gamma_q(s: f64, x: f64) -> Result<f64> {
    check_inc(s, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < s + 1.0 {
        Ok(1.0 - lower_series(s, x)?)
    } else {
        upper_fraction(s, x)
    }
}

/// Upper incomplete gamma `Γ(s, x) = ∫_x^∞ t^{s-1} e^{-t} dt`.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    check_inc(s, x)?;
    if x == 0.0 {
        return Ok(lgamma(s).exp());
    }
    if x < s + 1.0 {
        Ok(lgamma(s).exp() * (1.0 - lower_series(s, x)?))
    } else {
        // stay in log space: Γ(s) Q(s, x) = x^s e^{-x} * continued fraction
        Ok((s * x.ln() - x + upper_fraction_ln_cf(s, x)?).exp())
    }
}

fn check_inc(s: f64, x: f64) -> Result<()> {
    if !(s > 0.0) || !(x >= 0.0) || !s.is_finite() || x.is_nan() {
        return Err(Error::domain("incomplete_gamma", format!("s = {s}, x = {x}")));
    }
    Ok(())
}

fn lower_series(s: f64, x: f64) -> Result<f64> {
    let mut ap = s;
    let mut del = 1.0 / s;
    let mut sum = del;
    for _ in 0..INC_MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * INC_EPS {
            return Ok((sum.ln() - x + s * x.ln() - lgamma(s)).exp().min(1.0));
        }
    }
    Err(Error::no_conv("gamma_p", format!("series at s = {s}, x = {x}")))
}

/// ln of the modified-Lentz continued fraction for `Γ(s, x) e^x x^{-s}`.
fn upper_fraction_ln_cf(s: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    if x > 1e6 * (s + 1.0) {
        // first two terms of the asymptotic series x^{-1}(1 + (s-1)/x)
        return Ok(-x.ln() + ((s - 1.0) / x).ln_1p());
    }
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..INC_MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < INC_EPS {
            return Ok(h.ln());
        }
    }
    Err(Error::no_conv("gamma_q", format!("continued fraction at s = {s}, x = {x}")))
}

fn upper_fraction(s: f64, x: f64) -> Result<f64> {
    Ok((upper_fraction_ln_cf(s, x)? - x + s * x.ln() - lgamma(s)).exp())
}

/// Complementary error function, via `erfc(x) = Q(1/2, x²)`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let q = gamma_q(0.5, x * x).unwrap_or(0.0);
    if x >= 0.0 {
        q
    } else {
        2.0 - q
    }
}
