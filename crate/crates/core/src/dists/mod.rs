//! Base fading distributions: densities, moments, logarithmic moments and
//! exact samplers.

mod alpha_mu;
mod eta_mu;
mod kappa_mu;
mod lognormal;
mod nakagami;

pub use alpha_mu::AlphaMuParams;
pub use eta_mu::{EtaMuFormat, EtaMuParams};
pub use kappa_mu::KappaMuParams;
pub use lognormal::LognormalParams;
pub use nakagami::{InvNakagamiParams, NakagamiParams};

use rand::Rng;

use crate::error::{Error, Result};
use crate::quad::{try_integrate_positive, QuadConfig};

/// Common interface of the envelope distributions.
pub trait Fading {
    fn ln_pdf(&self, r: f64) -> Result<f64>;

    fn pdf(&self, r: f64) -> Result<f64> {
        check_r(r)?;
        Ok(self.ln_pdf(r)?.exp())
    }

    /// `ln E[R^k]`.
    fn ln_moment(&self, k: f64) -> Result<f64>;

    fn moment(&self, k: f64) -> Result<f64> {
        Ok(self.ln_moment(k)?.exp())
    }

    fn log_mean(&self) -> Result<f64>;

    fn log_var(&self) -> Result<f64>;

    /// A representative scale (the rms value), used to split quadratures.
    fn scale(&self) -> f64;

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid(format!("envelope value {r} must be positive and finite")));
    }
    Ok(())
}

pub(crate) fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

/// `E[ln R]` and `V[ln R]` by adaptive quadrature of the density on a log scale.
pub(crate) fn quad_log_stats(ln_pdf: impl Fn(f64) -> Result<f64>, scale: f64) -> Result<(f64, f64)> {
    let cfg = QuadConfig { rel_tol: 1e-12, abs_tol: 1e-14, max_intervals: 4000 };
    let ls = scale.ln();
    let shift = try_integrate_positive(|r| Ok((r.ln() - ls) * ln_pdf(r)?.exp()), scale, &cfg)?.value;
    let mean = ls + shift;
    let var = try_integrate_positive(|r| Ok((r.ln() - mean).powi(2) * ln_pdf(r)?.exp()), scale, &cfg)?.value;
    Ok((mean, var))
}

/// Per-hop description for cascades and the CLI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingParams {
    Lognormal(LognormalParams),
    AlphaMu(AlphaMuParams),
    KappaMu(KappaMuParams),
    EtaMu(EtaMuParams),
    Nakagami(NakagamiParams),
    InvNakagami(InvNakagamiParams),
}

macro_rules! dispatch {
    ($self:ident, $d:ident => $e:expr) => {
        match $self {
            FadingParams::Lognormal($d) => $e,
            FadingParams::AlphaMu($d) => $e,
            FadingParams::KappaMu($d) => $e,
            FadingParams::EtaMu($d) => $e,
            FadingParams::Nakagami($d) => $e,
            FadingParams::InvNakagami($d) => $e,
        }
    };
}

impl FadingParams {
    /// Closed-form CDF, where the family has one.
    pub fn cdf(&self, r: f64) -> Result<f64> {
        match self {
            FadingParams::Lognormal(d) => d.cdf(r),
            FadingParams::AlphaMu(d) => d.cdf(r),
            FadingParams::Nakagami(d) => d.cdf(r),
            FadingParams::InvNakagami(d) => d.cdf(r),
            FadingParams::KappaMu(_) | FadingParams::EtaMu(_) => {
                Err(Error::invalid("no closed-form CDF for this family"))
            }
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            FadingParams::Lognormal(_) => "lognormal",
            FadingParams::AlphaMu(_) => "alpha-mu",
            FadingParams::KappaMu(_) => "kappa-mu",
            FadingParams::EtaMu(_) => "eta-mu",
            FadingParams::Nakagami(_) => "nakagami",
            FadingParams::InvNakagami(_) => "inv-nakagami",
        }
    }
}

impl Fading for FadingParams {
    fn ln_pdf(&self, r: f64) -> Result<f64> {
        dispatch!(self, d => d.ln_pdf(r))
    }

    fn ln_moment(&self, k: f64) -> Result<f64> {
        dispatch!(self, d => d.ln_moment(k))
    }

    fn log_mean(&self) -> Result<f64> {
        dispatch!(self, d => d.log_mean())
    }

    fn log_var(&self) -> Result<f64> {
        dispatch!(self, d => d.log_var())
    }

    fn scale(&self) -> f64 {
        dispatch!(self, d => d.scale())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        dispatch!(self, d => d.sample(rng))
    }
}
