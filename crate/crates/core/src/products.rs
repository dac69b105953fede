//! Product surrogates: N Nakagami-m factors, N I-Nakagami-m factors, and
//! their Bernoulli mixture.

use rand::{Rng, RngCore};
use rayon::prelude::*;

use crate::dists::{Fading, InvNakagamiParams, NakagamiParams};
use crate::error::{Error, Result, ResultExt};
use crate::specfun::gamma::{lgamma, psi0, psi1};
use crate::specfun::{meijer_g_log, ContourConfig, MeijerGSpec};

/// Common surface of the three surrogate models.
pub trait Surrogate: Sync {
    fn pdf(&self, r: f64) -> Result<f64>;

    fn cdf(&self, r: f64) -> Result<f64>;

    /// `(E[ln R], V[ln R])`.
    fn log_stats(&self) -> (f64, f64);

    /// `E[R²]`.
    fn mean_power(&self) -> f64;

    fn sample_dyn(&self, rng: &mut dyn RngCore) -> f64;

    fn pdf_grid(&self, rs: &[f64]) -> Result<Vec<f64>> {
        rs.par_iter().map(|&r| self.pdf(r)).collect()
    }

    fn cdf_grid(&self, rs: &[f64]) -> Result<Vec<f64>> {
        rs.par_iter().map(|&r| self.cdf(r)).collect()
    }
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid(format!("envelope value {r} must be positive and finite")));
    }
    Ok(())
}

/// Clamp a contour-evaluated probability into [0, 1].
fn clamp_probability(v: f64, what: &str, r: f64) -> f64 {
    let c = v.clamp(0.0, 1.0);
    if (c - v).abs() > 1e-8 {
        log::warn!("{what} at r = {r}: clamped {v} into [0, 1]");
    } else if c != v {
        log::debug!("{what} at r = {r}: clamped {v} into [0, 1]");
    }
    c
}

/// Product `X = Π W_i` of independent Nakagami-m factors.
#[derive(Debug, Clone, PartialEq)]
pub struct NakagamiProduct {
    factors: Vec<NakagamiParams>,
    ln_omega: f64,
    ln_gamma_m: f64,
    ln_prod_m: f64,
    contour: ContourConfig,
}

impl NakagamiProduct {
    pub fn new(factors: Vec<NakagamiParams>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::invalid("a product needs at least one factor"));
        }
        let ln_omega = factors.iter().map(|f| f.omega().ln()).sum();
        let ln_gamma_m = factors.iter().map(|f| lgamma(f.m())).sum();
        let ln_prod_m = factors.iter().map(|f| f.m().ln()).sum();
        Ok(NakagamiProduct { factors, ln_omega, ln_gamma_m, ln_prod_m, contour: ContourConfig::default() })
    }

    /// `N` identical factors with total power `Ω_X = exp(ln_omega)`.
    pub fn iid(n: usize, m: f64, ln_omega: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a product needs at least one factor"));
        }
        let w = NakagamiParams::new(m, (ln_omega / n as f64).exp())?;
        let mut p = Self::new(vec![w; n])?;
        p.ln_omega = ln_omega;
        Ok(p)
    }

    pub fn with_contour(mut self, cfg: ContourConfig) -> Self {
        self.contour = cfg;
        self
    }

    pub fn factors(&self) -> &[NakagamiParams] {
        &self.factors
    }

    pub fn n(&self) -> usize {
        self.factors.len()
    }

    pub fn ln_omega(&self) -> f64 {
        self.ln_omega
    }

    pub fn omega(&self) -> f64 {
        self.ln_omega.exp()
    }

    /// `ln Γ_m = Σ ln Γ(m_i)`.
    pub fn ln_gamma_m(&self) -> f64 {
        self.ln_gamma_m
    }

    /// `ln Π m_i`.
    pub fn ln_prod_m(&self) -> f64 {
        self.ln_prod_m
    }

    pub fn m_values(&self) -> Vec<f64> {
        self.factors.iter().map(|f| f.m()).collect()
    }

    /// The common shape parameter, if all factors share one.
    pub fn common_m(&self) -> Option<f64> {
        let m = self.factors[0].m();
        self.factors.iter().all(|f| f.m() == m).then_some(m)
    }

    pub fn contour(&self) -> &ContourConfig {
        &self.contour
    }

    /// `ln(r² Π m_i / Ω_X)`, the log of the Meijer-G argument.
    fn ln_arg(&self, r: f64) -> f64 {
        2.0 * r.ln() + self.ln_prod_m - self.ln_omega
    }

    pub fn ln_pdf(&self, r: f64) -> Result<f64> {
        check_r(r)?;
        let spec = MeijerGSpec::with_ln_arg(self.n(), 0, vec![], self.m_values(), self.ln_arg(r))?;
        let g = meijer_g_log(&spec, &self.contour).context(|| format!("Nakagami-product pdf at r = {r}"))?;
        if g.sign <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(2f64.ln() - r.ln() - self.ln_gamma_m + g.ln_abs)
    }

    pub fn ln_moment(&self, k: f64) -> Result<f64> {
        self.factors.iter().map(|f| f.ln_moment(k)).sum()
    }
}

impl Surrogate for NakagamiProduct {
    fn pdf(&self, r: f64) -> Result<f64> {
        Ok(self.ln_pdf(r)?.exp())
    }

    fn cdf(&self, r: f64) -> Result<f64> {
        check_r(r)?;
        let mut b = self.m_values();
        b.push(0.0);
        let spec = MeijerGSpec::with_ln_arg(self.n(), 1, vec![1.0], b, self.ln_arg(r))?;
        let g = meijer_g_log(&spec, &self.contour).context(|| format!("Nakagami-product cdf at r = {r}"))?;
        let v = g.scale(-self.ln_gamma_m).value();
        Ok(clamp_probability(v, "Nakagami-product cdf", r))
    }

    fn log_stats(&self) -> (f64, f64) {
        let nu = 0.5 * (self.ln_omega - self.ln_prod_m)
            + self.factors.iter().map(|f| 0.5 * psi0(f.m())).sum::<f64>();
        let var = self.factors.iter().map(|f| 0.25 * psi1(f.m())).sum();
        (nu, var)
    }

    fn mean_power(&self) -> f64 {
        self.omega()
    }

    fn sample_dyn(&self, rng: &mut dyn RngCore) -> f64 {
        self.factors.iter().map(|f| f.sample(rng)).product()
    }
}

/// Product `Y = Π T_i` of independent I-Nakagami-m factors.
#[derive(Debug, Clone, PartialEq)]
pub struct InvNakagamiProduct {
    factors: Vec<InvNakagamiParams>,
    ln_omega: f64,
    ln_gamma_m: f64,
    ln_prod_m1: f64,
    contour: ContourConfig,
}

impl InvNakagamiProduct {
    pub fn new(factors: Vec<InvNakagamiParams>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::invalid("a product needs at least one factor"));
        }
        let ln_omega = factors.iter().map(|f| f.omega().ln()).sum();
        let ln_gamma_m = factors.iter().map(|f| lgamma(f.m())).sum();
        let ln_prod_m1 = factors.iter().map(|f| (f.m() - 1.0).ln()).sum();
        Ok(InvNakagamiProduct { factors, ln_omega, ln_gamma_m, ln_prod_m1, contour: ContourConfig::default() })
    }

    /// `N` identical factors with total power `Ω_Y = exp(ln_omega)`.
    pub fn iid(n: usize, m: f64, ln_omega: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a product needs at least one factor"));
        }
        let t = InvNakagamiParams::new(m, (ln_omega / n as f64).exp())?;
        let mut p = Self::new(vec![t; n])?;
        p.ln_omega = ln_omega;
        Ok(p)
    }

    pub fn with_contour(mut self, cfg: ContourConfig) -> Self {
        self.contour = cfg;
        self
    }

    pub fn factors(&self) -> &[InvNakagamiParams] {
        &self.factors
    }

    pub fn n(&self) -> usize {
        self.factors.len()
    }

    pub fn ln_omega(&self) -> f64 {
        self.ln_omega
    }

    pub fn omega(&self) -> f64 {
        self.ln_omega.exp()
    }

    pub fn ln_gamma_m(&self) -> f64 {
        self.ln_gamma_m
    }

    /// `ln Π (m_i - 1)`.
    pub fn ln_prod_m1(&self) -> f64 {
        self.ln_prod_m1
    }

    /// `ln K` with `K = Ω_Y Π (m_i - 1)`.
    pub fn ln_k(&self) -> f64 {
        self.ln_omega + self.ln_prod_m1
    }

    pub fn m_values(&self) -> Vec<f64> {
        self.factors.iter().map(|f| f.m()).collect()
    }

    pub fn common_m(&self) -> Option<f64> {
        let m = self.factors[0].m();
        self.factors.iter().all(|f| f.m() == m).then_some(m)
    }

    pub fn contour(&self) -> &ContourConfig {
        &self.contour
    }

    fn ln_arg(&self, y: f64) -> f64 {
        2.0 * y.ln() - self.ln_k()
    }

    fn a_half_minus_m(&self) -> Vec<f64> {
        self.factors.iter().map(|f| 0.5 - f.m()).collect()
    }

    pub fn ln_pdf(&self, y: f64) -> Result<f64> {
        check_r(y)?;
        let n = self.n();
        let spec = MeijerGSpec::with_ln_arg(0, n, self.a_half_minus_m(), vec![], self.ln_arg(y))?;
        let g = meijer_g_log(&spec, &self.contour).context(|| format!("I-Nakagami-product pdf at y = {y}"))?;
        if g.sign <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(2f64.ln() - 0.5 * self.ln_k() - self.ln_gamma_m + g.ln_abs)
    }

    pub fn ln_moment(&self, k: f64) -> Result<f64> {
        self.factors.iter().map(|f| f.ln_moment(k)).sum()
    }
}

impl Surrogate for InvNakagamiProduct {
    fn pdf(&self, y: f64) -> Result<f64> {
        Ok(self.ln_pdf(y)?.exp())
    }

    fn cdf(&self, y: f64) -> Result<f64> {
        check_r(y)?;
        let n = self.n();
        let mut a = self.a_half_minus_m();
        a.push(0.5);
        let spec = MeijerGSpec::with_ln_arg(0, n + 1, a, vec![-0.5], self.ln_arg(y))?;
        let g = meijer_g_log(&spec, &self.contour).context(|| format!("I-Nakagami-product cdf at y = {y}"))?;
        let v = g.scale(y.ln() - 0.5 * self.ln_k() - self.ln_gamma_m).value();
        Ok(clamp_probability(v, "I-Nakagami-product cdf", y))
    }

    fn log_stats(&self) -> (f64, f64) {
        let nu = 0.5 * self.ln_omega
            + self.factors.iter().map(|f| 0.5 * (f.m() - 1.0).ln() - 0.5 * psi0(f.m())).sum::<f64>();
        let var = self.factors.iter().map(|f| 0.25 * psi1(f.m())).sum();
        (nu, var)
    }

    fn mean_power(&self) -> f64 {
        self.omega()
    }

    fn sample_dyn(&self, rng: &mut dyn RngCore) -> f64 {
        self.factors.iter().map(|f| f.sample(rng)).product()
    }
}

/// Bernoulli(p) selection between the two product surrogates.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    p: f64,
    nak: NakagamiProduct,
    inv: InvNakagamiProduct,
}

/// Mixture weight used throughout the evaluation figures.
pub const DEFAULT_MIXTURE_WEIGHT: f64 = 0.5;

impl Mixture {
    pub fn new(p: f64, nak: NakagamiProduct, inv: InvNakagamiProduct) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("mixture weight p = {p} outside [0, 1]")));
        }
        Ok(Mixture { p, nak, inv })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn nak(&self) -> &NakagamiProduct {
        &self.nak
    }

    pub fn inv(&self) -> &InvNakagamiProduct {
        &self.inv
    }

    fn combine(&self, x: impl FnOnce() -> Result<f64>, y: impl FnOnce() -> Result<f64>) -> Result<f64> {
        // endpoints skip the unused component entirely
        if self.p == 1.0 {
            return x();
        }
        if self.p == 0.0 {
            return y();
        }
        Ok(self.p * x()? + (1.0 - self.p) * y()?)
    }
}

impl Surrogate for Mixture {
    fn pdf(&self, r: f64) -> Result<f64> {
        self.combine(|| self.nak.pdf(r), || self.inv.pdf(r))
    }

    fn cdf(&self, r: f64) -> Result<f64> {
        self.combine(|| self.nak.cdf(r), || self.inv.cdf(r))
    }

    /// Log-moments of the mixture itself (not a convex combination of variances).
    fn log_stats(&self) -> (f64, f64) {
        let (nx, vx) = self.nak.log_stats();
        let (ny, vy) = self.inv.log_stats();
        let p = self.p;
        let nu = p * nx + (1.0 - p) * ny;
        let second = p * (vx + nx * nx) + (1.0 - p) * (vy + ny * ny);
        (nu, second - nu * nu)
    }

    fn mean_power(&self) -> f64 {
        self.p * self.nak.mean_power() + (1.0 - self.p) * self.inv.mean_power()
    }

    fn sample_dyn(&self, rng: &mut dyn RngCore) -> f64 {
        if rng.random::<f64>() < self.p {
            self.nak.sample_dyn(rng)
        } else {
            self.inv.sample_dyn(rng)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_factor_reductions() {
        let w = NakagamiParams::new(2.0, 1.0).unwrap();
        let p = NakagamiProduct::new(vec![w]).unwrap();
        let (a, b) = (p.pdf(0.8).unwrap(), w.pdf(0.8).unwrap());
        assert!(((a - b) / b).abs() < 1e-9, "{a} vs {b}");
        let (a, b) = (p.cdf(0.8).unwrap(), w.cdf(0.8).unwrap());
        assert!(((a - b) / b).abs() < 1e-9, "{a} vs {b}");

        let t = InvNakagamiParams::new(3.2, 1.7).unwrap();
        let q = InvNakagamiProduct::new(vec![t]).unwrap();
        for &y in &[0.3, 1.0, 2.5] {
            let (a, b) = (q.pdf(y).unwrap(), t.pdf(y).unwrap());
            assert!(((a - b) / b).abs() < 1e-9, "{a} vs {b}");
            let (a, b) = (q.cdf(y).unwrap(), t.cdf(y).unwrap());
            assert!(((a - b) / b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn validation() {
        assert!(NakagamiProduct::new(vec![]).is_err());
        assert!(NakagamiProduct::iid(0, 2.0, 0.0).is_err());
        assert!(InvNakagamiProduct::iid(3, 0.9, 0.0).is_err());
        let x = NakagamiProduct::iid(2, 2.0, 0.0).unwrap();
        let y = InvNakagamiProduct::iid(2, 2.0, 0.0).unwrap();
        assert!(Mixture::new(1.5, x.clone(), y.clone()).is_err());
        assert!(x.pdf(0.0).is_err());
        assert!(Mixture::new(0.5, x, y).is_ok());
    }
}
