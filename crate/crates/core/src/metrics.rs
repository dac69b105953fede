//! Characteristic function, bit error rate, ergodic capacity and composite
//! α-μ shadowed statistics under the product surrogates.

use std::f64::consts::{LN_2, PI};
use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result, ResultExt};
use crate::mapping::{ForwardSolution, SurrogateFamily};
use crate::products::{InvNakagamiProduct, Mixture, NakagamiProduct, Surrogate};
use crate::specfun::gamma::{gamma_p, lgamma};
use crate::specfun::{fox_h_log, meijer_g_log, ContourConfig, FoxHSpec, LogValue, MeijerGSpec, ScaledParam};

/// Receiver-side quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    /// Mean SNR γ̄ (linear).
    pub gamma_bar: f64,
    /// Conditional BER `Γ(b, aγ) / (2Γ(b))`.
    pub a: f64,
    pub b: f64,
    /// Bandwidth in Hz.
    pub bandwidth: f64,
}

impl LinkParams {
    pub fn new(gamma_bar: f64, a: f64, b: f64, bandwidth: f64) -> Result<Self> {
        for (name, v) in [("γ̄", gamma_bar), ("a", a), ("b", b), ("bandwidth", bandwidth)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} = {v} must be positive and finite")));
            }
        }
        Ok(LinkParams { gamma_bar, a, b, bandwidth })
    }

    /// DBPSK (`a = b = 1`) with unit bandwidth.
    pub fn dbpsk(gamma_bar: f64) -> Result<Self> {
        Self::new(gamma_bar, 1.0, 1.0, 1.0)
    }

    pub fn with_gamma_bar(self, gamma_bar: f64) -> Result<Self> {
        Self::new(gamma_bar, self.a, self.b, self.bandwidth)
    }
}

/// `p·x + (1-p)·y`, used for every metric of the mixture.
pub fn metric_mixture<T>(nak: T, inv: T, p: f64) -> T
where
    T: Mul<f64, Output = T> + Add<Output = T>,
{
    nak * p + inv * (1.0 - p)
}

fn g(m: usize, n: usize, a: Vec<f64>, b: Vec<f64>, ln_x: f64, cfg: &ContourConfig) -> Result<LogValue> {
    meijer_g_log(&MeijerGSpec::with_ln_arg(m, n, a, b, ln_x)?, cfg)
}

fn check_omega(w: f64) -> Result<()> {
    if !w.is_finite() {
        return Err(Error::invalid(format!("frequency {w} must be finite")));
    }
    Ok(())
}

fn check_probability(v: f64, what: &str) -> Result<f64> {
    if !(-1e-9..=0.5 + 1e-9).contains(&v) {
        return Err(Error::no_conv("ber", format!("{what} evaluated to {v}, outside [0, 1/2]")));
    }
    Ok(v.clamp(0.0, 0.5))
}

/// `E[e^{jωX}]` for the Nakagami-m product.
pub fn cf_nak_product(x: &NakagamiProduct, w: f64) -> Result<Complex64> {
    check_omega(w)?;
    if w == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let ln_z = 4f64.ln() + x.ln_prod_m() - 2.0 * w.abs().ln() - x.ln_omega();
    let pre = 0.5 * PI.ln() - x.ln_gamma_m();
    let n = x.n();
    let cfg = x.contour();
    let re = g(n, 1, vec![1.0, 0.5], x.m_values(), ln_z, cfg).context(|| format!("Nakagami CF real part, ω = {w}"))?;
    let im = g(n, 1, vec![0.5, 1.0], x.m_values(), ln_z, cfg).context(|| format!("Nakagami CF imaginary part, ω = {w}"))?;
    Ok(Complex64::new(re.scale(pre).value(), w.signum() * im.scale(pre).value()))
}

/// `E[e^{jωY}]` for the I-Nakagami-m product.
pub fn cf_inv_product(y: &InvNakagamiProduct, w: f64) -> Result<Complex64> {
    check_omega(w)?;
    if w == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let ln_z = 4f64.ln() - 2.0 * w.abs().ln() - y.ln_k();
    let pre = (2.0 * PI.sqrt()).ln() - y.ln_gamma_m() - 0.5 * y.ln_k() - w.abs().ln();
    let n = y.n();
    let cfg = y.contour();
    let tail: Vec<f64> = y.m_values().iter().map(|m| 0.5 - m).collect();
    let a_re: Vec<f64> = std::iter::once(0.5).chain(tail.iter().copied()).chain([0.0]).collect();
    let a_im: Vec<f64> = std::iter::once(0.0).chain(tail.iter().copied()).chain([0.5]).collect();
    let re = g(0, n + 1, a_re, vec![], ln_z, cfg).context(|| format!("I-Nakagami CF real part, ω = {w}"))?;
    let im = g(0, n + 1, a_im, vec![], ln_z, cfg).context(|| format!("I-Nakagami CF imaginary part, ω = {w}"))?;
    Ok(Complex64::new(re.scale(pre).value(), w.signum() * im.scale(pre).value()))
}

pub fn cf_mixture(z: &Mixture, w: f64) -> Result<Complex64> {
    match z.p() {
        p if p == 1.0 => cf_nak_product(z.nak(), w),
        p if p == 0.0 => cf_inv_product(z.inv(), w),
        p => Ok(metric_mixture(cf_nak_product(z.nak(), w)?, cf_inv_product(z.inv(), w)?, p)),
    }
}

/// Average BER for `P(γ) = Γ(b, aγ)/(2Γ(b))` with `γ = γ̄ r² / E[X²]`.
pub fn ber_nak_product(x: &NakagamiProduct, link: &LinkParams) -> Result<f64> {
    let ln_z = x.ln_prod_m() - (link.a * link.gamma_bar).ln();
    let mut b = x.m_values();
    b.push(0.0);
    let v = g(x.n(), 2, vec![1.0, 1.0 - link.b], b, ln_z, x.contour())
        .context(|| format!("Nakagami BER at γ̄ = {}", link.gamma_bar))?
        .scale(-x.ln_gamma_m() - 2f64.ln() - lgamma(link.b))
        .value();
    check_probability(v, "Nakagami-product BER")
}

pub fn ber_inv_product(y: &InvNakagamiProduct, link: &LinkParams) -> Result<f64> {
    let ln_c = (link.a * link.gamma_bar).ln() + y.ln_prod_m1();
    let mut a = vec![0.5 - link.b, 0.5];
    a.extend(y.m_values().iter().map(|m| 0.5 - m));
    let n = a.len();
    let v = g(0, n, a, vec![-0.5], -ln_c, y.contour())
        .context(|| format!("I-Nakagami BER at γ̄ = {}", link.gamma_bar))?
        .scale(-y.ln_gamma_m() - 2f64.ln() - lgamma(link.b) - 0.5 * ln_c)
        .value();
    check_probability(v, "I-Nakagami-product BER")
}

pub fn ber_mixture(z: &Mixture, link: &LinkParams) -> Result<f64> {
    match z.p() {
        p if p == 1.0 => ber_nak_product(z.nak(), link),
        p if p == 0.0 => ber_inv_product(z.inv(), link),
        p => Ok(metric_mixture(ber_nak_product(z.nak(), link)?, ber_inv_product(z.inv(), link)?, p)),
    }
}

/// Ergodic capacity `B·E[log₂(1+γ)]` in bit/s.
pub fn capacity_nak_product(x: &NakagamiProduct, link: &LinkParams) -> Result<f64> {
    let ln_z = x.ln_prod_m() - link.gamma_bar.ln();
    let mut b = vec![0.0, 0.0];
    b.extend(x.m_values());
    let n = x.n();
    let v = g(n + 2, 1, vec![0.0, 1.0], b, ln_z, x.contour())
        .context(|| format!("Nakagami capacity at γ̄ = {}", link.gamma_bar))?
        .scale(link.bandwidth.ln() - x.ln_gamma_m() - LN_2.ln())
        .value();
    Ok(v.max(0.0))
}

pub fn capacity_inv_product(y: &InvNakagamiProduct, link: &LinkParams) -> Result<f64> {
    let ln_c = link.gamma_bar.ln() + y.ln_prod_m1();
    let mut a: Vec<f64> = y.m_values().iter().map(|m| 0.5 - m).collect();
    a.push(-0.5);
    let n = a.len();
    a.push(0.5);
    let v = g(2, n, a, vec![-0.5, -0.5], -ln_c, y.contour())
        .context(|| format!("I-Nakagami capacity at γ̄ = {}", link.gamma_bar))?
        .scale(link.bandwidth.ln() - LN_2.ln() - y.ln_gamma_m() - 0.5 * ln_c)
        .value();
    Ok(v.max(0.0))
}

pub fn capacity_mixture(z: &Mixture, link: &LinkParams) -> Result<f64> {
    match z.p() {
        p if p == 1.0 => capacity_nak_product(z.nak(), link),
        p if p == 0.0 => capacity_inv_product(z.inv(), link),
        p => Ok(metric_mixture(capacity_nak_product(z.nak(), link)?, capacity_inv_product(z.inv(), link)?, p)),
    }
}

/// Shadowing model of the composite channel.
#[derive(Debug, Clone, PartialEq)]
pub enum Shadow {
    Nakagami(NakagamiProduct),
    InvNakagami(InvNakagamiProduct),
    Mixture(Mixture),
}

impl Shadow {
    /// Shadow built from a forward solution, rejected if its residuals exceed `tol`.
    pub fn from_solution(sol: &ForwardSolution, tol: f64) -> Result<Self> {
        if !sol.within_tolerance(tol) {
            return Err(Error::invalid(format!(
                "surrogate residuals {:?} exceed tolerance {tol}",
                sol.residuals
            )));
        }
        Ok(match sol.family {
            SurrogateFamily::NakagamiProduct => Shadow::Nakagami(sol.nakagami_product()?),
            SurrogateFamily::InvNakagamiProduct => Shadow::InvNakagami(sol.inv_product()?),
        })
    }

    pub fn surrogate(&self) -> &dyn Surrogate {
        match self {
            Shadow::Nakagami(x) => x,
            Shadow::InvNakagami(y) => y,
            Shadow::Mixture(z) => z,
        }
    }
}

/// α-μ multipath whose mean power `δ·Ω_R` is scaled by the shadow `δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeParams {
    pub alpha: f64,
    pub mu: f64,
    pub omega_r: f64,
    pub shadow: Shadow,
}

/// Threshold for the α = 4 and α = 2 special forms.
pub const SPECIAL_ALPHA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AlphaPath {
    General,
    Four,
    Two,
}

impl CompositeParams {
    pub fn new(alpha: f64, mu: f64, omega_r: f64, shadow: Shadow) -> Result<Self> {
        for (name, v) in [("α", alpha), ("μ", mu), ("Ω_R", omega_r)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} = {v} must be positive and finite")));
            }
        }
        Ok(CompositeParams { alpha, mu, omega_r, shadow })
    }

    /// Parameterized by the α-root mean `r̂` of the unshadowed α-μ envelope.
    pub fn from_r_hat(alpha: f64, mu: f64, r_hat: f64, shadow: Shadow) -> Result<Self> {
        if !(r_hat > 0.0 && alpha > 0.0 && mu > 0.0) {
            return Err(Error::invalid("α, μ and r̂ must be positive"));
        }
        let omega_r = (2.0 * r_hat.ln() + ln_poch(mu, 2.0 / alpha) - 2.0 / alpha * mu.ln()).exp();
        Self::new(alpha, mu, omega_r, shadow)
    }

    /// `ln (μ)_{2/α}`.
    fn ln_c(&self) -> f64 {
        ln_poch(self.mu, 2.0 / self.alpha)
    }

    fn path(&self) -> AlphaPath {
        if (self.alpha - 4.0).abs() < SPECIAL_ALPHA_TOL {
            AlphaPath::Four
        } else if (self.alpha - 2.0).abs() < SPECIAL_ALPHA_TOL {
            AlphaPath::Two
        } else {
            AlphaPath::General
        }
    }

    /// Same parameters with the other α-path forced, for cross-checks.
    fn eval(&self, r: f64, cdf: bool, path: AlphaPath) -> Result<f64> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::invalid(format!("envelope value {r} must be positive and finite")));
        }
        let v = match &self.shadow {
            Shadow::Nakagami(x) => composite_nak(self, x, r, cdf, path)?,
            Shadow::InvNakagami(y) => composite_inv(self, y, r, cdf, path)?,
            Shadow::Mixture(z) => {
                let p = z.p();
                let xv = if p > 0.0 { composite_nak(self, z.nak(), r, cdf, path)? } else { 0.0 };
                let yv = if p < 1.0 { composite_inv(self, z.inv(), r, cdf, path)? } else { 0.0 };
                metric_mixture(xv, yv, p)
            }
        };
        if cdf {
            Ok(v.clamp(0.0, 1.0))
        } else {
            Ok(v.max(0.0))
        }
    }

    pub fn pdf(&self, r: f64) -> Result<f64> {
        self.eval(r, false, self.path())
    }

    pub fn cdf(&self, r: f64) -> Result<f64> {
        self.eval(r, true, self.path())
    }

    /// Evaluation through the general Fox-H form, skipping the α = 2, 4 shortcuts.
    pub fn pdf_fox(&self, r: f64) -> Result<f64> {
        self.eval(r, false, AlphaPath::General)
    }

    pub fn cdf_fox(&self, r: f64) -> Result<f64> {
        self.eval(r, true, AlphaPath::General)
    }

    /// Conditional α-μ density of the envelope given shadow value `delta`.
    pub fn conditional_pdf(&self, r: f64, delta: f64) -> f64 {
        let (a, mu) = (self.alpha, self.mu);
        let ln_t = self.ln_c() - self.omega_r.ln() - delta.ln();
        let ln = a.ln() + (a * mu - 1.0) * r.ln() - lgamma(mu) + 0.5 * a * mu * ln_t
            - (a * r.ln() + 0.5 * a * ln_t).exp();
        ln.exp()
    }

    /// Conditional α-μ distribution function given shadow value `delta`.
    pub fn conditional_cdf(&self, r: f64, delta: f64) -> Result<f64> {
        let ln_t = self.ln_c() - self.omega_r.ln() - delta.ln();
        gamma_p(self.mu, (self.alpha * r.ln() + 0.5 * self.alpha * ln_t).exp())
    }
}

fn ln_poch(x: f64, k: f64) -> f64 {
    lgamma(x + k) - lgamma(x)
}

fn fox(m: usize, n: usize, a: Vec<ScaledParam>, b: Vec<ScaledParam>, ln_x: f64, cfg: &ContourConfig) -> Result<LogValue> {
    fox_h_log(&FoxHSpec::with_ln_arg(m, n, a, b, ln_x)?, cfg)
}

fn composite_nak(c: &CompositeParams, x: &NakagamiProduct, r: f64, cdf: bool, path: AlphaPath) -> Result<f64> {
    let n = x.n();
    let ln_x = 4.0 * r.ln() + x.ln_prod_m() + 2.0 * c.ln_c() - 2.0 * c.omega_r.ln() - x.ln_omega();
    let base = -lgamma(c.mu) - x.ln_gamma_m();
    let cfg = x.contour();
    let ctx = || format!("composite {} (Nakagami shadow) at r = {r}", if cdf { "cdf" } else { "pdf" });
    let v = match path {
        AlphaPath::General => {
            let mut b: Vec<ScaledParam> = x.m_values().into_iter().map(ScaledParam::unit).collect();
            b.push(ScaledParam::new(c.mu, 4.0 / c.alpha));
            if cdf {
                b.push(ScaledParam::unit(0.0));
                fox(n + 1, 1, vec![ScaledParam::unit(1.0)], b, ln_x, cfg).context(ctx)?.scale(base)
            } else {
                fox(n + 1, 0, vec![], b, ln_x, cfg).context(ctx)?.scale(base + 4f64.ln() - r.ln())
            }
        }
        AlphaPath::Four => {
            let mut b = x.m_values();
            b.push(c.mu);
            if cdf {
                b.push(0.0);
                g(n + 1, 1, vec![1.0], b, ln_x, cfg).context(ctx)?.scale(base)
            } else {
                g(n + 1, 0, vec![], b, ln_x, cfg).context(ctx)?.scale(base + 4f64.ln() - r.ln())
            }
        }
        AlphaPath::Two => {
            let mut b = x.m_values();
            b.extend([0.5 * c.mu, 0.5 * (c.mu + 1.0)]);
            let ln_x = ln_x - 4f64.ln();
            let dup = (c.mu - 1.0) * LN_2 - 0.5 * PI.ln();
            if cdf {
                b.push(0.0);
                g(n + 2, 1, vec![1.0], b, ln_x, cfg).context(ctx)?.scale(base + dup)
            } else {
                g(n + 2, 0, vec![], b, ln_x, cfg).context(ctx)?.scale(base + dup + 4f64.ln() - r.ln())
            }
        }
    };
    Ok(v.value())
}

fn composite_inv(c: &CompositeParams, y: &InvNakagamiProduct, r: f64, cdf: bool, path: AlphaPath) -> Result<f64> {
    let n = y.n();
    let ln_x = 4.0 * r.ln() + 2.0 * c.ln_c() - 2.0 * c.omega_r.ln() - y.ln_k();
    let base = c.ln_c() - lgamma(c.mu) - y.ln_gamma_m() - c.omega_r.ln() - 0.5 * y.ln_k();
    let base = if cdf { base + 2.0 * r.ln() } else { base + 4f64.ln() + r.ln() };
    let cfg = y.contour();
    let ctx = || format!("composite {} (I-Nakagami shadow) at r = {r}", if cdf { "cdf" } else { "pdf" });
    let a_m: Vec<f64> = y.m_values().iter().map(|m| 0.5 - m).collect();
    let v = match path {
        AlphaPath::General => {
            let mut a: Vec<ScaledParam> = a_m.into_iter().map(ScaledParam::unit).collect();
            let mut b = vec![ScaledParam::new(c.mu - 2.0 / c.alpha, 4.0 / c.alpha)];
            if cdf {
                a.push(ScaledParam::unit(0.5));
                b.push(ScaledParam::unit(-0.5));
                fox(1, n + 1, a, b, ln_x, cfg).context(ctx)?
            } else {
                fox(1, n, a, b, ln_x, cfg).context(ctx)?
            }
            .scale(base)
        }
        AlphaPath::Four => {
            let mut a = a_m;
            let mut b = vec![c.mu - 0.5];
            if cdf {
                a.push(0.5);
                b.push(-0.5);
                g(1, n + 1, a, b, ln_x, cfg).context(ctx)?
            } else {
                g(1, n, a, b, ln_x, cfg).context(ctx)?
            }
            .scale(base)
        }
        AlphaPath::Two => {
            // Γ(μ-1+2s) split by the duplication formula; (μ)_1 = μ
            let mut a = a_m;
            let mut b = vec![0.5 * (c.mu - 1.0), 0.5 * c.mu];
            let ln_x = ln_x - 4f64.ln();
            let dup = (c.mu - 2.0) * LN_2 - 0.5 * PI.ln();
            if cdf {
                a.push(0.5);
                b.push(-0.5);
                g(2, n + 1, a, b, ln_x, cfg).context(ctx)?
            } else {
                g(2, n, a, b, ln_x, cfg).context(ctx)?
            }
            .scale(base + dup)
        }
    };
    Ok(v.value())
}

pub fn composite_pdf_nak(c: &CompositeParams, r: f64) -> Result<f64> {
    match &c.shadow {
        Shadow::Nakagami(_) => c.pdf(r),
        _ => Err(Error::invalid("composite parameters do not carry a Nakagami-product shadow")),
    }
}

pub fn composite_cdf_nak(c: &CompositeParams, r: f64) -> Result<f64> {
    match &c.shadow {
        Shadow::Nakagami(_) => c.cdf(r),
        _ => Err(Error::invalid("composite parameters do not carry a Nakagami-product shadow")),
    }
}

pub fn composite_pdf_inv(c: &CompositeParams, r: f64) -> Result<f64> {
    match &c.shadow {
        Shadow::InvNakagami(_) => c.pdf(r),
        _ => Err(Error::invalid("composite parameters do not carry an I-Nakagami-product shadow")),
    }
}

pub fn composite_cdf_inv(c: &CompositeParams, r: f64) -> Result<f64> {
    match &c.shadow {
        Shadow::InvNakagami(_) => c.cdf(r),
        _ => Err(Error::invalid("composite parameters do not carry an I-Nakagami-product shadow")),
    }
}

/// Nakagami-m multipath (`α = 2`, `μ = m`) under the given shadow: `(pdf, cdf)` at `r`.
pub fn composite_nakagami_lognormal(m_fading: f64, omega_r: f64, shadow: Shadow, r: f64) -> Result<(f64, f64)> {
    let c = CompositeParams::new(2.0, m_fading, omega_r, shadow)?;
    Ok((c.pdf(r)?, c.cdf(r)?))
}
