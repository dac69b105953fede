use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::{check_r, require, Fading};
use crate::error::{Error, Result};
use crate::specfun::gamma::{lgamma, psi0, psi1};
use crate::specfun::{gamma_p, gamma_q};

/// Nakagami-m envelope with mean power `Ω = E[W²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NakagamiParams {
    m: f64,
    omega: f64,
}

impl NakagamiParams {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        require(m > 0.0 && m.is_finite(), || format!("Nakagami m = {m} must be positive"))?;
        require(omega > 0.0 && omega.is_finite(), || format!("Nakagami Ω = {omega} must be positive"))?;
        Ok(NakagamiParams { m, omega })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn cdf(&self, r: f64) -> Result<f64> {
        if r == 0.0 {
            return Ok(0.0);
        }
        check_r(r)?;
        gamma_p(self.m, self.m * r * r / self.omega)
    }

    /// The reciprocal variate `1/W`.
    pub fn reciprocal(&self) -> Result<InvNakagamiParams> {
        require(self.m > 1.0, || format!("1/W has infinite power for m = {} ≤ 1", self.m))?;
        InvNakagamiParams::new(self.m, self.m / (self.omega * (self.m - 1.0)))
    }
}

impl Fading for NakagamiParams {
    fn ln_pdf(&self, r: f64) -> Result<f64> {
        check_r(r)?;
        let m = self.m;
        Ok(2f64.ln() + m * (m / self.omega).ln() - lgamma(m) + (2.0 * m - 1.0) * r.ln()
            - m * r * r / self.omega)
    }

    fn ln_moment(&self, k: f64) -> Result<f64> {
        let arg = self.m + 0.5 * k;
        if !(arg > 0.0) {
            return Err(Error::domain("moment_nakagami", format!("order {k} ≤ -2m")));
        }
        Ok(lgamma(arg) - lgamma(self.m) + 0.5 * k * (self.omega / self.m).ln())
    }

    fn log_mean(&self) -> Result<f64> {
        Ok(0.5 * (self.omega / self.m).ln() + 0.5 * psi0(self.m))
    }

    fn log_var(&self) -> Result<f64> {
        Ok(0.25 * psi1(self.m))
    }

    fn scale(&self) -> f64 {
        self.omega.sqrt()
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g: f64 = Gamma::new(self.m, self.omega / self.m).expect("validated shape").sample(rng);
        g.sqrt()
    }
}

/// Inverse Nakagami-m envelope `T = 1/W` with mean power `Ω = E[T²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvNakagamiParams {
    m: f64,
    omega: f64,
}

impl InvNakagamiParams {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        require(m > 1.0 && m.is_finite(), || format!("I-Nakagami m = {m} must exceed 1"))?;
        require(omega > 0.0 && omega.is_finite(), || format!("I-Nakagami Ω = {omega} must be positive"))?;
        Ok(InvNakagamiParams { m, omega })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// The Nakagami variate `W = 1/T`.
    pub fn reciprocal(&self) -> NakagamiParams {
        NakagamiParams { m: self.m, omega: self.m / (self.omega * (self.m - 1.0)) }
    }

    /// `(m - 1) Ω_T`, the scale appearing in the density.
    fn theta(&self) -> f64 {
        (self.m - 1.0) * self.omega
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        check_r(t)?;
        gamma_q(self.m, self.theta() / (t * t))
    }
}

impl Fading for InvNakagamiParams {
    fn ln_pdf(&self, t: f64) -> Result<f64> {
        check_r(t)?;
        let (m, th) = (self.m, self.theta());
        Ok(2f64.ln() + m * th.ln() - lgamma(m) - (2.0 * m + 1.0) * t.ln() - th / (t * t))
    }

    fn ln_moment(&self, k: f64) -> Result<f64> {
        let arg = self.m - 0.5 * k;
        if !(arg > 0.0) {
            return Err(Error::domain("moment_inv_nakagami", format!("order {k} ≥ 2m")));
        }
        Ok(lgamma(arg) - lgamma(self.m) + 0.5 * k * self.theta().ln())
    }

    fn log_mean(&self) -> Result<f64> {
        Ok(0.5 * self.theta().ln() - 0.5 * psi0(self.m))
    }

    fn log_var(&self) -> Result<f64> {
        Ok(0.25 * psi1(self.m))
    }

    fn scale(&self) -> f64 {
        self.omega.sqrt()
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        1.0 / self.reciprocal().sample(rng)
    }
}
