use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::{check_r, require, Fading};
use crate::error::{Error, Result};
use crate::specfun::gamma::{lgamma, psi0, psi1};
use crate::specfun::gamma_p;

/// α-μ envelope with `r̂^α = E[R^α]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaMuParams {
    alpha: f64,
    mu: f64,
    r_hat: f64,
}

impl AlphaMuParams {
    pub fn new(alpha: f64, mu: f64, r_hat: f64) -> Result<Self> {
        for (name, v) in [("α", alpha), ("μ", mu), ("r̂", r_hat)] {
            require(v > 0.0 && v.is_finite(), || format!("α-μ {name} = {v} must be positive"))?;
        }
        Ok(AlphaMuParams { alpha, mu, r_hat })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn r_hat(&self) -> f64 {
        self.r_hat
    }

    pub fn cdf(&self, r: f64) -> Result<f64> {
        if r == 0.0 {
            return Ok(0.0);
        }
        check_r(r)?;
        gamma_p(self.mu, self.mu * (r / self.r_hat).powf(self.alpha))
    }
}

impl Fading for AlphaMuParams {
    fn ln_pdf(&self, r: f64) -> Result<f64> {
        check_r(r)?;
        let (a, m) = (self.alpha, self.mu);
        let lr = (r / self.r_hat).ln();
        Ok(a.ln() + m * m.ln() - lgamma(m) + (a * m - 1.0) * r.ln() - a * m * self.r_hat.ln()
            - m * (a * lr).exp())
    }

    fn ln_moment(&self, k: f64) -> Result<f64> {
        let arg = self.mu + k / self.alpha;
        if !(arg > 0.0) {
            return Err(Error::domain("moment_alpha_mu", format!("order {k} ≤ -αμ")));
        }
        Ok(lgamma(arg) - lgamma(self.mu) + k * (self.r_hat.ln() - self.mu.ln() / self.alpha))
    }

    fn log_mean(&self) -> Result<f64> {
        Ok(self.r_hat.ln() - self.mu.ln() / self.alpha + psi0(self.mu) / self.alpha)
    }

    fn log_var(&self) -> Result<f64> {
        Ok(psi1(self.mu) / (self.alpha * self.alpha))
    }

    fn scale(&self) -> f64 {
        self.r_hat
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g: f64 = Gamma::new(self.mu, 1.0).expect("validated shape").sample(rng);
        self.r_hat * (g / self.mu).powf(1.0 / self.alpha)
    }
}
