//! Meijer-G and Fox-H functions by direct Mellin–Barnes contour quadrature.
//!
//! Both functions are written as
//!
//! ```text
//! (1/2πi) ∫_{c-i∞}^{c+i∞} Π Γ(u_k + v_k s)^{p_k} x^{-s} ds
//! ```
//!
//! with integer powers `p_k` (positive for numerator gammas, negative for
//! denominator gammas). Repeated parameters simply raise the power of one
//! factor, so high-order poles never need residue extraction. The line
//! `Re s = c` must separate the left pole family of the numerator gammas with
//! `v > 0` from the right family of those with `v < 0`.
//!
//! For real parameters the integrand is conjugate-symmetric, which leaves
//! `(1/π) ∫_0^∞ Re f(c + it) dt`. That integral is evaluated with the
//! trapezoid rule: the truncation height doubles until the last block is
//! negligible, then the step halves until two successive levels agree.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::gamma::{lgamma, lgamma_c};

/// Index counts and parameter lists of `G^{m,n}_{p,q}[x | a; b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeijerGSpec {
    pub m: usize,
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    ln_x: f64,
}

/// A Fox-H parameter `(value, scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledParam {
    pub value: f64,
    pub scale: f64,
}

impl ScaledParam {
    pub fn new(value: f64, scale: f64) -> Self {
        ScaledParam { value, scale }
    }

    pub fn unit(value: f64) -> Self {
        ScaledParam { value, scale: 1.0 }
    }
}

/// Index counts and parameter pairs of `H^{m,n}_{p,q}[x | (a, A); (b, B)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FoxHSpec {
    pub m: usize,
    pub n: usize,
    pub a: Vec<ScaledParam>,
    pub b: Vec<ScaledParam>,
    ln_x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourConfig {
    /// Real part of the integration line; chosen automatically when `None`.
    pub abscissa: Option<f64>,
    /// Initial truncation half-height; chosen from the integrand width when `None`.
    pub half_height: Option<f64>,
    /// Node count on the initial `[0, T]` segment.
    pub nodes: usize,
    pub rel_tol: f64,
    pub max_refinements: usize,
}

impl Default for ContourConfig {
    fn default() -> Self {
        ContourConfig {
            abscissa: None,
            half_height: None,
            nodes: 64,
            rel_tol: 1e-6,
            max_refinements: 14,
        }
    }
}

impl ContourConfig {
    pub fn with_tol(rel_tol: f64) -> Self {
        ContourConfig { rel_tol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::invalid(format!("contour tolerance {} not in (0, 1)", self.rel_tol)));
        }
        if self.nodes < 64 {
            return Err(Error::invalid(format!("contour node count {} < 64", self.nodes)));
        }
        if let Some(t) = self.half_height {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::invalid(format!("truncation half-height {t} must be positive")));
            }
        }
        if let Some(c) = self.abscissa {
            if !c.is_finite() {
                return Err(Error::invalid("contour abscissa must be finite"));
            }
        }
        Ok(())
    }
}

/// A real number stored as `sign · exp(ln_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub ln_abs: f64,
    pub sign: f64,
}

impl LogValue {
    pub fn zero() -> Self {
        LogValue { ln_abs: f64::NEG_INFINITY, sign: 0.0 }
    }

    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    /// Multiply by `exp(ln_factor)`.
    pub fn scale(self, ln_factor: f64) -> Self {
        LogValue { ln_abs: self.ln_abs + ln_factor, sign: self.sign }
    }
}

fn check_params(values: impl Iterator<Item = f64>) -> Result<()> {
    for v in values {
        if !v.is_finite() {
            return Err(Error::invalid("non-finite G/H parameter"));
        }
    }
    Ok(())
}

impl MeijerGSpec {
    pub fn new(m: usize, n: usize, a: Vec<f64>, b: Vec<f64>, x: f64) -> Result<Self> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::invalid(format!("Meijer-G argument {x} must be positive")));
        }
        Self::with_ln_arg(m, n, a, b, x.ln())
    }

    /// Same as [`MeijerGSpec::new`] with the argument given as `ln x`, so that
    /// arguments beyond the f64 range stay representable.
    pub fn with_ln_arg(m: usize, n: usize, a: Vec<f64>, b: Vec<f64>, ln_x: f64) -> Result<Self> {
        if m > b.len() || n > a.len() {
            return Err(Error::invalid(format!(
                "index counts m = {m}, n = {n} exceed q = {}, p = {}",
                b.len(),
                a.len()
            )));
        }
        if !ln_x.is_finite() {
            return Err(Error::invalid("Meijer-G argument must be positive and finite"));
        }
        check_params(a.iter().chain(b.iter()).copied())?;
        for &bj in &b[..m] {
            for &ai in &a[..n] {
                let d = ai - bj;
                if d >= 1.0 && d == d.floor() {
                    return Err(Error::invalid(format!(
                        "pole collision: a = {ai} and b = {bj} differ by a positive integer"
                    )));
                }
            }
        }
        Ok(MeijerGSpec { m, n, a, b, ln_x })
    }

    pub fn p(&self) -> usize {
        self.a.len()
    }

    pub fn q(&self) -> usize {
        self.b.len()
    }

    pub fn x(&self) -> f64 {
        self.ln_x.exp()
    }

    pub fn ln_x(&self) -> f64 {
        self.ln_x
    }

    fn integrand(&self) -> MellinBarnes {
        let mut f = MellinBarnes::new(self.ln_x);
        for (j, &b) in self.b.iter().enumerate() {
            if j < self.m {
                f.push(b, 1.0, 1);
            } else {
                f.push(1.0 - b, -1.0, -1);
            }
        }
        for (i, &a) in self.a.iter().enumerate() {
            if i < self.n {
                f.push(1.0 - a, -1.0, 1);
            } else {
                f.push(a, 1.0, -1);
            }
        }
        f
    }
}

impl FoxHSpec {
    pub fn new(m: usize, n: usize, a: Vec<ScaledParam>, b: Vec<ScaledParam>, x: f64) -> Result<Self> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::invalid(format!("Fox-H argument {x} must be positive")));
        }
        Self::with_ln_arg(m, n, a, b, x.ln())
    }

    pub fn with_ln_arg(
        m: usize,
        n: usize,
        a: Vec<ScaledParam>,
        b: Vec<ScaledParam>,
        ln_x: f64,
    ) -> Result<Self> {
        if m > b.len() || n > a.len() {
            return Err(Error::invalid(format!(
                "index counts m = {m}, n = {n} exceed q = {}, p = {}",
                b.len(),
                a.len()
            )));
        }
        if !ln_x.is_finite() {
            return Err(Error::invalid("Fox-H argument must be positive and finite"));
        }
        check_params(a.iter().chain(b.iter()).flat_map(|p| [p.value, p.scale]))?;
        if let Some(p) = a.iter().chain(b.iter()).find(|p| !(p.scale > 0.0)) {
            return Err(Error::invalid(format!("Fox-H scale {} must be positive", p.scale)));
        }
        Ok(FoxHSpec { m, n, a, b, ln_x })
    }

    pub fn p(&self) -> usize {
        self.a.len()
    }

    pub fn q(&self) -> usize {
        self.b.len()
    }

    pub fn ln_x(&self) -> f64 {
        self.ln_x
    }

    /// The Meijer-G form, when every scale is one.
    pub fn to_meijer(&self) -> Option<MeijerGSpec> {
        if self.a.iter().chain(self.b.iter()).any(|p| p.scale != 1.0) {
            return None;
        }
        MeijerGSpec::with_ln_arg(
            self.m,
            self.n,
            self.a.iter().map(|p| p.value).collect(),
            self.b.iter().map(|p| p.value).collect(),
            self.ln_x,
        )
        .ok()
    }

    fn integrand(&self) -> MellinBarnes {
        let mut f = MellinBarnes::new(self.ln_x);
        for (j, p) in self.b.iter().enumerate() {
            if j < self.m {
                f.push(p.value, p.scale, 1);
            } else {
                f.push(1.0 - p.value, -p.scale, -1);
            }
        }
        for (i, p) in self.a.iter().enumerate() {
            if i < self.n {
                f.push(1.0 - p.value, -p.scale, 1);
            } else {
                f.push(p.value, p.scale, -1);
            }
        }
        f
    }
}

impl From<&MeijerGSpec> for FoxHSpec {
    fn from(g: &MeijerGSpec) -> Self {
        FoxHSpec {
            m: g.m,
            n: g.n,
            a: g.a.iter().map(|&v| ScaledParam::unit(v)).collect(),
            b: g.b.iter().map(|&v| ScaledParam::unit(v)).collect(),
            ln_x: g.ln_x,
        }
    }
}

pub fn meijer_g(spec: &MeijerGSpec, cfg: &ContourConfig) -> Result<f64> {
    Ok(meijer_g_log(spec, cfg)?.value())
}

pub fn meijer_g_log(spec: &MeijerGSpec, cfg: &ContourConfig) -> Result<LogValue> {
    spec.integrand().evaluate(cfg)
}

pub fn fox_h(spec: &FoxHSpec, cfg: &ContourConfig) -> Result<f64> {
    Ok(fox_h_log(spec, cfg)?.value())
}

pub fn fox_h_log(spec: &FoxHSpec, cfg: &ContourConfig) -> Result<LogValue> {
    spec.integrand().evaluate(cfg)
}

/// `Γ(u + v s)^power`.
#[derive(Debug, Clone, Copy)]
struct GammaFactor {
    u: f64,
    v: f64,
    power: i32,
}

#[derive(Debug, Clone)]
struct MellinBarnes {
    factors: Vec<GammaFactor>,
    ln_x: f64,
}

/// Hard cap on the truncation height along the contour.
const MAX_HALF_HEIGHT: f64 = 1e5;

/// Widest window searched for the abscissa on a half-open strip.
const MAX_SCAN_WIDTH: f64 = 1e6;

/// Log-scale of the integrand below which the result is reported as an
/// exact zero. Far below anything a prefactor can bring back into range.
const NEGLIGIBLE_LN: f64 = -1e4;

impl MellinBarnes {
    fn new(ln_x: f64) -> Self {
        MellinBarnes { factors: Vec::new(), ln_x }
    }

    fn push(&mut self, u: f64, v: f64, power: i32) {
        if let Some(f) = self.factors.iter_mut().find(|f| f.u == u && f.v == v) {
            f.power += power;
        } else {
            self.factors.push(GammaFactor { u, v, power });
        }
    }

    fn active(&self) -> impl Iterator<Item = &GammaFactor> {
        self.factors.iter().filter(|f| f.power != 0)
    }

    /// Open interval of admissible abscissae.
    fn strip(&self) -> (f64, f64) {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for f in self.active().filter(|f| f.power > 0) {
            let pole = -f.u / f.v;
            if f.v > 0.0 {
                lo = lo.max(pole);
            } else {
                hi = hi.min(pole);
            }
        }
        (lo, hi)
    }

    /// Exponential decay rate of |integrand| along the line, in units of π/2.
    fn decay_rate(&self) -> f64 {
        self.active().map(|f| f.power as f64 * f.v.abs()).sum()
    }

    fn log_integrand(&self, s: Complex64) -> Complex64 {
        let mut acc = -s * self.ln_x;
        for f in self.active() {
            let z = s * f.v + f.u;
            if f.power < 0 && z.im == 0.0 && z.re <= 0.0 && z.re == z.re.floor() {
                // 1/Γ vanishes at its poles
                return Complex64::new(f64::NEG_INFINITY, 0.0);
            }
            acc += lgamma_c(z) * f.power as f64;
        }
        acc
    }

    /// Smooth upper bound of `ln |f(c)|` on the real axis. Denominator gammas
    /// with argument below 1/2 use `ln|1/Γ(z)| <= ln Γ(1 - z) - ln π`, which
    /// is continuous with `-ln Γ(z)` at `z = 1/2` and ignores the zeros of 1/Γ.
    fn envelope(&self, c: f64) -> f64 {
        let mut acc = -c * self.ln_x;
        for f in self.active() {
            let z = f.u + f.v * c;
            let p = f.power as f64;
            if f.power > 0 || z >= 0.5 {
                acc += p * lgamma(z);
            } else {
                acc += p * (PI.ln() - lgamma(1.0 - z));
            }
        }
        acc
    }

    fn choose_abscissa(&self, lo: f64, hi: f64) -> f64 {
        let margin = |gap: f64| (0.15 * gap).min(0.25);
        let golden = |a: f64, b: f64| -> f64 {
            let env = |c: f64| self.envelope(c);
            let r = 0.5 * (5f64.sqrt() - 1.0);
            let (mut a, mut b) = (a, b);
            let mut x1 = b - r * (b - a);
            let mut x2 = a + r * (b - a);
            let (mut f1, mut f2) = (env(x1), env(x2));
            for _ in 0..60 {
                if f1 <= f2 {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - r * (b - a);
                    f1 = env(x1);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + r * (b - a);
                    f2 = env(x2);
                }
                if (b - a).abs() < 1e-10 * (1.0 + a.abs()) {
                    break;
                }
            }
            0.5 * (a + b)
        };
        // coarse scan then golden-section refinement around the best node
        let scan = |a: f64, b: f64| -> (f64, usize) {
            const K: usize = 48;
            let mut best = (f64::INFINITY, 0usize);
            for i in 0..=K {
                let c = a + (b - a) * i as f64 / K as f64;
                let v = self.envelope(c);
                if v < best.0 || best.0.is_nan() {
                    best = (v, i);
                }
            }
            let step = (b - a) / K as f64;
            let lo_i = best.1.saturating_sub(1) as f64;
            let hi_i = (best.1 + 1).min(K) as f64;
            (golden(a + lo_i * step, a + hi_i * step), best.1)
        };
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => {
                let m = margin(hi - lo);
                scan(lo + m, hi - m).0
            }
            (true, false) => {
                let a = lo + 0.25;
                let mut width = 16.0;
                loop {
                    let (c, idx) = scan(a, a + width);
                    if idx < 48 || width > MAX_SCAN_WIDTH {
                        return c;
                    }
                    width *= 2.0;
                }
            }
            (false, true) => {
                let b = hi - 0.25;
                let mut width = 16.0;
                loop {
                    let (c, idx) = scan(b - width, b);
                    if idx > 0 || width > MAX_SCAN_WIDTH {
                        return c;
                    }
                    width *= 2.0;
                }
            }
            (false, false) => {
                let mut width = 16.0;
                loop {
                    let (c, idx) = scan(-width, width);
                    if (idx > 0 && idx < 48) || width > MAX_SCAN_WIDTH {
                        return c;
                    }
                    width *= 2.0;
                }
            }
        }
    }

    fn evaluate(&self, cfg: &ContourConfig) -> Result<LogValue> {
        cfg.validate()?;
        if self.active().next().is_none() {
            return Err(Error::DecayCheck { rate: 0.0 });
        }
        let rate = self.decay_rate();
        if !(rate > 0.0) {
            return Err(Error::DecayCheck { rate: rate * PI / 2.0 });
        }
        let (lo, hi) = self.strip();
        if !(lo < hi) {
            return Err(Error::ContourPlacement { left: lo, right: hi });
        }
        let c = match cfg.abscissa {
            Some(c) if c > lo && c < hi => c,
            Some(c) => {
                return Err(Error::invalid(format!(
                    "contour abscissa {c} outside the admissible strip ({lo}, {hi})"
                )))
            }
            None => self.choose_abscissa(lo, hi),
        };
        let dist = (c - lo).min(hi - c);
        let l_ref = self.envelope(c);
        if l_ref < NEGLIGIBLE_LN {
            return Ok(LogValue::zero());
        }

        // Gaussian width of the integrand around t = 0 from the envelope curvature
        let dh = (1e-3f64).min(0.25 * dist);
        let curv = (self.envelope(c + dh) - 2.0 * l_ref + self.envelope(c - dh)) / (dh * dh);
        let width = if curv > 0.0 { (1.0 / curv.sqrt()).clamp(1e-3, 1e3) } else { 1.0 };

        let mut t_end = cfg.half_height.unwrap_or((12.0 * width).max(8.0));
        let mut h = (t_end / cfg.nodes as f64).min(0.25 * dist);

        let f = |t: f64| -> f64 {
            let z = self.log_integrand(Complex64::new(c, t)) - l_ref;
            if z.re == f64::NEG_INFINITY {
                0.0
            } else {
                z.exp().re
            }
        };

        let f0 = f(0.0);
        let mut sum = 0.5 * f0;
        let mut abs_sum = 0.5 * f0.abs();
        let mut k: usize = 1;
        while k as f64 * h <= t_end {
            let v = f(k as f64 * h);
            sum += v;
            abs_sum += v.abs();
            k += 1;
        }
        // extend the truncation height until the newest block is negligible
        loop {
            let mut block = 0.0;
            let next_end = 2.0 * t_end;
            while k as f64 * h <= next_end {
                let v = f(k as f64 * h);
                sum += v;
                abs_sum += v.abs();
                block += v.abs();
                k += 1;
            }
            t_end = next_end;
            if block <= 1e-3 * cfg.rel_tol * sum.abs() + 1e-17 * abs_sum {
                break;
            }
            if t_end > MAX_HALF_HEIGHT {
                return Err(Error::no_conv(
                    "mellin_barnes",
                    format!("integrand still significant at height {t_end:.3e}"),
                ));
            }
        }

        let mut estimate = h * sum / PI;
        for _ in 0..cfg.max_refinements {
            let mut mid = 0.0;
            let mut mid_abs = 0.0;
            let mut j = 0usize;
            loop {
                let t = (j as f64 + 0.5) * h;
                if t > t_end {
                    break;
                }
                let v = f(t);
                mid += v;
                mid_abs += v.abs();
                j += 1;
            }
            sum += mid;
            abs_sum += mid_abs;
            h *= 0.5;
            let refined = h * sum / PI;
            let floor = 1e-15 * h * abs_sum / PI;
            if (refined - estimate).abs() <= cfg.rel_tol * refined.abs() + floor {
                return Ok(if refined == 0.0 {
                    LogValue::zero()
                } else {
                    LogValue { ln_abs: l_ref + refined.abs().ln(), sign: refined.signum() }
                });
            }
            estimate = refined;
        }
        Err(Error::no_conv(
            "mellin_barnes",
            format!("trapezoid refinement did not settle (last estimate {estimate:e})"),
        ))
    }
}
