use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::{check_r, quad_log_stats, require, Fading};
use crate::error::{Error, Result};
use crate::specfun::gamma::lgamma;
use crate::specfun::{gauss_2f1, ln_bessel_i_ratio};

/// The two customary parameterizations of η.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EtaMuFormat {
    /// η > 0 is the in-phase to quadrature power ratio.
    #[default]
    Format1,
    /// -1 < η < 1 is the in-phase/quadrature correlation coefficient.
    Format2,
}

/// η-μ envelope with rms value `r̂² = E[R²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaMuParams {
    eta: f64,
    mu: f64,
    r_hat: f64,
    format: EtaMuFormat,
    h: f64,
    big_h: f64,
}

impl EtaMuParams {
    pub fn new(eta: f64, mu: f64, r_hat: f64, format: EtaMuFormat) -> Result<Self> {
        require(mu > 0.0 && mu.is_finite(), || format!("η-μ μ = {mu} must be positive"))?;
        require(r_hat > 0.0 && r_hat.is_finite(), || format!("η-μ r̂ = {r_hat} must be positive"))?;
        let (h, big_h) = match format {
            EtaMuFormat::Format1 => {
                require(eta > 0.0 && eta.is_finite(), || format!("η-μ format 1 needs η > 0, got {eta}"))?;
                ((2.0 + 1.0 / eta + eta) / 4.0, (1.0 / eta - eta) / 4.0)
            }
            EtaMuFormat::Format2 => {
                require(eta > -1.0 && eta < 1.0, || format!("η-μ format 2 needs -1 < η < 1, got {eta}"))?;
                let h = 1.0 / (1.0 - eta * eta);
                (h, eta * h)
            }
        };
        Ok(EtaMuParams { eta, mu, r_hat, format, h, big_h })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn r_hat(&self) -> f64 {
        self.r_hat
    }

    pub fn format(&self) -> EtaMuFormat {
        self.format
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn big_h(&self) -> f64 {
        self.big_h
    }
}

impl Fading for EtaMuParams {
    fn ln_pdf(&self, r: f64) -> Result<f64> {
        check_r(r)?;
        let (m, h) = (self.mu, self.h);
        let q = (r / self.r_hat).powi(2);
        if !q.is_finite() {
            return Ok(f64::NEG_INFINITY);
        }
        let y = 2.0 * m * self.big_h.abs() * q;
        // |H|^{μ-1/2} cancels against (y/2)^{μ-1/2} of the Bessel function
        Ok(4f64.ln() + 0.5 * PI.ln() + 2.0 * m * m.ln() + m * h.ln() - lgamma(m)
            + (4.0 * m - 1.0) * r.ln()
            - 4.0 * m * self.r_hat.ln()
            - 2.0 * m * h * q
            + ln_bessel_i_ratio(m - 0.5, y)?)
    }

    fn ln_moment(&self, k: f64) -> Result<f64> {
        let m = self.mu;
        if !(2.0 * m + 0.5 * k > 0.0) {
            return Err(Error::domain("moment_eta_mu", format!("order {k} ≤ -4μ")));
        }
        let z = (self.big_h / self.h).powi(2);
        let f = gauss_2f1((2.0 - k) / 4.0, -k / 4.0, m + 0.5, z)?;
        Ok(k * (self.r_hat / (2.0 * m).sqrt()).ln() + lgamma(2.0 * m + 0.5 * k) - lgamma(2.0 * m)
            + f.ln())
    }

    /// Adaptive quadrature of `ln r · f(r)`.
    fn log_mean(&self) -> Result<f64> {
        Ok(quad_log_stats(|r| self.ln_pdf(r), self.r_hat)?.0)
    }

    /// Adaptive quadrature of `(ln r - ν)² f(r)`.
    fn log_var(&self) -> Result<f64> {
        Ok(quad_log_stats(|r| self.ln_pdf(r), self.r_hat)?.1)
    }

    fn scale(&self) -> f64 {
        self.r_hat
    }

    /// `R²` is the sum of two independent Gamma(μ) powers with scales
    /// `r̂² / (2μ(h ± H))`.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (m, r2) = (self.mu, self.r_hat * self.r_hat);
        let a: f64 = Gamma::new(m, r2 / (2.0 * m * (self.h + self.big_h))).expect("valid").sample(rng);
        let b: f64 = Gamma::new(m, r2 / (2.0 * m * (self.h - self.big_h))).expect("valid").sample(rng);
        (a + b).sqrt()
    }
}
