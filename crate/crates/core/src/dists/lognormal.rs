use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{check_r, require, Fading};
use crate::error::Result;
use crate::specfun::erfc;

/// Lognormal envelope: `ln R ~ N(ν, σ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LognormalParams {
    nu: f64,
    sigma: f64,
}

impl LognormalParams {
    pub fn new(nu: f64, sigma: f64) -> Result<Self> {
        require(nu.is_finite(), || format!("lognormal ν = {nu} must be finite"))?;
        require(sigma > 0.0 && sigma.is_finite(), || format!("lognormal σ = {sigma} must be positive"))?;
        Ok(LognormalParams { nu, sigma })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn cdf(&self, r: f64) -> Result<f64> {
        if r == 0.0 {
            return Ok(0.0);
        }
        check_r(r)?;
        Ok(0.5 * erfc(-(r.ln() - self.nu) / (self.sigma * SQRT_2)))
    }
}

impl Fading for LognormalParams {
    fn ln_pdf(&self, r: f64) -> Result<f64> {
        check_r(r)?;
        let z = (r.ln() - self.nu) / self.sigma;
        Ok(-0.5 * z * z - r.ln() - self.sigma.ln() - 0.5 * (2.0 * PI).ln())
    }

    fn ln_moment(&self, k: f64) -> Result<f64> {
        Ok(k * self.nu + 0.5 * k * k * self.sigma * self.sigma)
    }

    fn log_mean(&self) -> Result<f64> {
        Ok(self.nu)
    }

    fn log_var(&self) -> Result<f64> {
        Ok(self.sigma * self.sigma)
    }

    fn scale(&self) -> f64 {
        self.nu.exp()
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        (self.nu + self.sigma * z).exp()
    }
}
