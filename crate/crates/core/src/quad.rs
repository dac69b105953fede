//! Globally adaptive Gauss–Kronrod (7/15) quadrature with tail transforms.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { rel_tol: 1e-10, abs_tol: 0.0, max_intervals: 4000 }
    }
}

impl QuadConfig {
    pub fn with_tol(rel_tol: f64) -> Self {
        QuadConfig { rel_tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

fn kronrod<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<Segment> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = (fc * WGK[7]).abs();
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx)?;
        let f2 = f(c + dx)?;
        if !(f1.is_finite() && f2.is_finite()) {
            return Err(Error::domain("quadrature", format!("non-finite integrand near {}", c)));
        }
        k += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    if !fc.is_finite() {
        return Err(Error::domain("quadrature", format!("non-finite integrand at {c}")));
    }
    Ok(Segment { a, b, value: k * h, error: ((k - g) * h).abs(), abs: abs * h.abs() })
}

/// Adaptive integration of a fallible integrand over a finite interval.
pub fn try_integrate<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    try_integrate_breaks(&mut f, &[a, b], cfg)
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    try_integrate(|x| Ok(f(x)), a, b, cfg)
}

/// Integration over consecutive pieces `[breaks[0], breaks[1]], …`, refined jointly.
pub fn try_integrate_breaks<F: FnMut(f64) -> Result<f64>>(
    f: &mut F,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if breaks.len() < 2 || breaks.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("quadrature needs at least two finite break points"));
    }
    if !(cfg.rel_tol > 0.0) || cfg.abs_tol < 0.0 {
        return Err(Error::invalid("quadrature tolerances must be positive"));
    }
    let mut segs = Vec::with_capacity(64);
    for w in breaks.windows(2) {
        if w[0] != w[1] {
            segs.push(kronrod(f, w[0], w[1])?);
        }
    }
    let mut evaluations = 15 * segs.len();
    loop {
        let value: f64 = segs.iter().map(|s| s.value).sum();
        let error: f64 = segs.iter().map(|s| s.error).sum();
        let abs: f64 = segs.iter().map(|s| s.abs).sum();
        let target = cfg.abs_tol.max(cfg.rel_tol * value.abs()).max(50.0 * f64::EPSILON * abs);
        if error <= target || segs.is_empty() {
            return Ok(QuadResult { value, error, evaluations });
        }
        if segs.len() >= cfg.max_intervals {
            return Err(Error::no_conv(
                "quadrature",
                format!("error estimate {error:e} above target {target:e} after {} intervals", segs.len()),
            ));
        }
        let (idx, worst) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, s)| (i, *s))
            .expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            return Err(Error::no_conv(
                "quadrature",
                format!("interval exhausted near {} with error {error:e}", worst.a),
            ));
        }
        let left = kronrod(f, worst.a, mid)?;
        let right = kronrod(f, mid, worst.b)?;
        evaluations += 30;
        segs[idx] = left;
        segs.push(right);
    }
}

/// `∫_a^∞ f(x) dx` through `x = a + t/(1-t)` on `[0, 1)`.
pub fn try_integrate_to_inf<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    a: f64,
    scale: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let s = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
    let mut g = |t: f64| -> Result<f64> {
        if t >= 1.0 {
            return Ok(0.0);
        }
        let u = 1.0 - t;
        let x = a + s * t / u;
        let v = f(x)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        Ok(v * s / (u * u))
    };
    try_integrate_breaks(&mut g, &[0.0, 0.5, 1.0], cfg)
}

/// `∫_0^∞ f(x) dx` for integrands concentrated around `scale` with
/// algebraic or exponential tails on both sides. Substitutes `x = scale·e^u`
/// and maps each half-line of `u` onto `[0, 1)`.
pub fn try_integrate_positive<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    scale: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::invalid(format!("integration scale {scale} must be positive")));
    }
    let mut g = |t: f64| -> Result<f64> {
        // t in (-1, 1) ↦ u = t / (1 - t²)
        let d = 1.0 - t * t;
        if d <= 0.0 {
            return Ok(0.0);
        }
        let u = t / d;
        let du = (1.0 + t * t) / (d * d);
        let x = scale * u.exp();
        if x == 0.0 || !x.is_finite() {
            return Ok(0.0);
        }
        let v = f(x)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        Ok(v * x * du)
    };
    try_integrate_breaks(&mut g, &[-1.0, -0.5, 0.0, 0.5, 1.0], cfg)
}

/// `∫ f(x) dx` over `[e^lo, e^hi]`, integrating `f(e^u) e^u` in `u`.
pub fn try_integrate_log_range<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    lo: f64,
    hi: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if !(lo < hi) {
        return Err(Error::invalid(format!("log range [{lo}, {hi}] is empty")));
    }
    let mut g = |u: f64| -> Result<f64> {
        let x = u.exp();
        Ok(f(x)? * x)
    };
    let breaks: Vec<f64> = (0..=8).map(|i| lo + (hi - lo) * i as f64 / 8.0).collect();
    try_integrate_breaks(&mut g, &breaks, cfg)
}

pub fn integrate_positive<F: Fn(f64) -> f64>(f: F, scale: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    try_integrate_positive(|x| Ok(f(x)), scale, cfg)
}
