use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};

use super::{check_r, quad_log_stats, require, Fading, NakagamiParams};
use crate::error::{Error, Result};
use crate::specfun::gamma::{lgamma, psi0};
use crate::specfun::{kummer_1f1, kummer_1f1_da_at_zero, ln_bessel_i_ratio};

/// κ-μ envelope with rms value `r̂² = E[R²]`. `κ = 0` is the Nakagami-m case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaMuParams {
    kappa: f64,
    mu: f64,
    r_hat: f64,
}

impl KappaMuParams {
    pub fn new(kappa: f64, mu: f64, r_hat: f64) -> Result<Self> {
        require(kappa >= 0.0 && kappa.is_finite(), || format!("κ-μ κ = {kappa} must be non-negative"))?;
        require(mu > 0.0 && mu.is_finite(), || format!("κ-μ μ = {mu} must be positive"))?;
        require(r_hat > 0.0 && r_hat.is_finite(), || format!("κ-μ r̂ = {r_hat} must be positive"))?;
        Ok(KappaMuParams { kappa, mu, r_hat })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn r_hat(&self) -> f64 {
        self.r_hat
    }

    fn nakagami(&self) -> Option<NakagamiParams> {
        (self.kappa == 0.0).then(|| NakagamiParams::new(self.mu, self.r_hat * self.r_hat).expect("validated"))
    }
}

impl Fading for KappaMuParams {
    fn ln_pdf(&self, r: f64) -> Result<f64> {
        check_r(r)?;
        if let Some(n) = self.nakagami() {
            return n.ln_pdf(r);
        }
        let (k, m) = (self.kappa, self.mu);
        let x = 2.0 * m * r * (k * (1.0 + k)).sqrt() / self.r_hat;
        if !x.is_finite() {
            return Ok(f64::NEG_INFINITY);
        }
        // the κ^{(μ-1)/2} prefactor cancels against (x/2)^{μ-1} of the Bessel function
        Ok(2f64.ln() + m * m.ln() + m * (1.0 + k).ln() - k * m + (2.0 * m - 1.0) * r.ln()
            - 2.0 * m * self.r_hat.ln()
            - m * (1.0 + k) * (r / self.r_hat).powi(2)
            + ln_bessel_i_ratio(m - 1.0, x)?)
    }

    fn ln_moment(&self, order: f64) -> Result<f64> {
        let (k, m) = (self.kappa, self.mu);
        if !(m + 0.5 * order > 0.0) {
            return Err(Error::domain("moment_kappa_mu", format!("order {order} ≤ -2μ")));
        }
        let f = kummer_1f1(-0.5 * order, m, -k * m)?;
        Ok(order * self.r_hat.ln() + lgamma(m + 0.5 * order) - lgamma(m)
            - 0.5 * order * ((1.0 + k) * m).ln()
            + f.ln())
    }

    fn log_mean(&self) -> Result<f64> {
        let (k, m) = (self.kappa, self.mu);
        Ok((self.r_hat / ((1.0 + k) * m).sqrt()).ln() + 0.5 * psi0(m)
            - 0.5 * kummer_1f1_da_at_zero(m, -k * m)?)
    }

    /// No closed form exists; adaptive quadrature of `(ln r - ν)² f(r)`.
    fn log_var(&self) -> Result<f64> {
        if let Some(n) = self.nakagami() {
            return n.log_var();
        }
        Ok(quad_log_stats(|r| self.ln_pdf(r), self.r_hat)?.1)
    }

    fn scale(&self) -> f64 {
        self.r_hat
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (k, m) = (self.kappa, self.mu);
        let lambda = k * m;
        let p = if lambda > 0.0 {
            Poisson::new(lambda).expect("positive rate").sample(rng)
        } else {
            0.0
        };
        let scale = self.r_hat * self.r_hat / (m * (1.0 + k));
        let g: f64 = Gamma::new(m + p, scale).expect("validated shape").sample(rng);
        g.sqrt()
    }
}
