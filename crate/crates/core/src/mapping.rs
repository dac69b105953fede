//! Moment matching between a Lognormal and products of fading variates.
//!
//! Forward: Lognormal → i.i.d. Nakagami-m or I-Nakagami-m product.
//! Reverse: product of α-μ, κ-μ and η-μ variates → Lognormal.

use std::f64::consts::PI;

use crate::dists::{AlphaMuParams, EtaMuParams, Fading, KappaMuParams, LognormalParams};
use crate::error::{Error, Result, ResultExt};
use crate::products::{InvNakagamiProduct, NakagamiProduct, Surrogate};
use crate::specfun::gamma::{psi0, psi1};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurrogateFamily {
    NakagamiProduct,
    InvNakagamiProduct,
}

impl SurrogateFamily {
    pub fn name(&self) -> &'static str {
        match self {
            SurrogateFamily::NakagamiProduct => "nakagami",
            SurrogateFamily::InvNakagamiProduct => "inv-nakagami",
        }
    }
}

/// Solution of the forward moment-matching system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardSolution {
    pub family: SurrogateFamily,
    pub n: usize,
    pub m: f64,
    /// `ln Ω` of the whole product.
    pub ln_omega: f64,
    /// `(ν_product - ν, σ²_product - σ²)`.
    pub residuals: (f64, f64),
}

/// Residual tolerance of the forward solver.
pub const FORWARD_TOL: f64 = 1e-10;

impl ForwardSolution {
    pub fn omega(&self) -> f64 {
        self.ln_omega.exp()
    }

    pub fn nakagami_product(&self) -> Result<NakagamiProduct> {
        match self.family {
            SurrogateFamily::NakagamiProduct => NakagamiProduct::iid(self.n, self.m, self.ln_omega),
            SurrogateFamily::InvNakagamiProduct => Err(Error::invalid("solution is for the I-Nakagami family")),
        }
    }

    pub fn inv_product(&self) -> Result<InvNakagamiProduct> {
        match self.family {
            SurrogateFamily::InvNakagamiProduct => InvNakagamiProduct::iid(self.n, self.m, self.ln_omega),
            SurrogateFamily::NakagamiProduct => Err(Error::invalid("solution is for the Nakagami family")),
        }
    }

    pub fn within_tolerance(&self, tol: f64) -> bool {
        self.residuals.0.abs() < tol && self.residuals.1.abs() < tol
    }
}

/// Root of `ψ'(m) = target` (ψ' is strictly decreasing from +∞ to 0).
fn solve_trigamma(target: f64) -> Result<f64> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::invalid(format!("trigamma target {target} must be positive")));
    }
    let g = |m: f64| psi1(m).ln() - target.ln();
    let mut lo = 1e-6;
    let mut hi = 1.0;
    while g(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::no_conv("forward mapping", "no bracket for the trigamma equation"));
        }
    }
    while g(lo) < 0.0 {
        hi = lo;
        lo *= 0.01;
        if lo < 1e-300 {
            return Err(Error::no_conv("forward mapping", format!("σ² too large to bracket (target {target})")));
        }
    }
    // Illinois variant of regula falsi, with a bisection fallback
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (g(a), g(b));
    if fb == 0.0 {
        return Ok(b);
    }
    if fa == 0.0 {
        return Ok(a);
    }
    let mut side = 0i8;
    for _ in 0..300 {
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) {
            c = 0.5 * (a + b);
        }
        let fc = g(c);
        if fc == 0.0 || (b - a).abs() <= 1e-15 * c {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= 1e-14 * c.abs() {
            return Ok(0.5 * (a + b));
        }
    }
    Err(Error::no_conv("forward mapping", "trigamma root did not converge"))
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("the number of factors N must be at least 1"));
    }
    Ok(())
}

/// Lognormal(ν, σ) → N i.i.d. Nakagami-m factors.
pub fn forward_nakagami(target: &LognormalParams, n: usize) -> Result<ForwardSolution> {
    check_n(n)?;
    let nf = n as f64;
    let s2 = target.sigma().powi(2);
    let m = solve_trigamma(4.0 * s2 / nf)?;
    let ln_omega = 2.0 * target.nu() + nf * (m.ln() - psi0(m));
    let product = NakagamiProduct::iid(n, m, ln_omega)?;
    let (nu, var) = product.log_stats();
    Ok(ForwardSolution {
        family: SurrogateFamily::NakagamiProduct,
        n,
        m,
        ln_omega,
        residuals: (nu - target.nu(), var - s2),
    })
}

/// Largest σ² an N-factor I-Nakagami product can reach (`m → 1`).
pub fn inv_nakagami_max_variance(n: usize) -> f64 {
    n as f64 * PI * PI / 24.0
}

/// Smallest N for which the I-Nakagami system is solvable.
pub fn inv_nakagami_min_factors(sigma: f64) -> usize {
    (24.0 * sigma * sigma / (PI * PI)).floor() as usize + 1
}

/// Lognormal(ν, σ) → N i.i.d. I-Nakagami-m factors; requires `σ² < Nπ²/24`.
pub fn forward_inv_nakagami(target: &LognormalParams, n: usize) -> Result<ForwardSolution> {
    check_n(n)?;
    let nf = n as f64;
    let s2 = target.sigma().powi(2);
    if !(s2 < inv_nakagami_max_variance(n)) {
        let minimal = inv_nakagami_min_factors(target.sigma());
        return Err(Error::Infeasible {
            detail: format!(
                "σ² = {s2} is not below Nπ²/24 = {:.6} for N = {n}; use N ≥ {minimal}",
                inv_nakagami_max_variance(n)
            ),
            minimal_n: Some(minimal),
        });
    }
    let m = solve_trigamma(4.0 * s2 / nf)?;
    if !(m > 1.0) {
        return Err(Error::Infeasible {
            detail: format!("solved m = {m} does not exceed 1"),
            minimal_n: Some(inv_nakagami_min_factors(target.sigma())),
        });
    }
    let ln_omega = 2.0 * target.nu() - nf * (m - 1.0).ln() + nf * psi0(m);
    let product = InvNakagamiProduct::iid(n, m, ln_omega)?;
    let (nu, var) = product.log_stats();
    Ok(ForwardSolution {
        family: SurrogateFamily::InvNakagamiProduct,
        n,
        m,
        ln_omega,
        residuals: (nu - target.nu(), var - s2),
    })
}

/// Log-moments of one block of a cascade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockStats {
    pub hops: usize,
    pub nu: f64,
    pub sigma2: f64,
}

impl BlockStats {
    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    pub fn lognormal(&self) -> Result<LognormalParams> {
        if !(self.sigma2 > 0.0) {
            return Err(Error::domain("reverse mapping", format!("matched σ² = {} is not positive", self.sigma2)));
        }
        LognormalParams::new(self.nu, self.sigma())
    }

    fn add(self, other: BlockStats) -> BlockStats {
        BlockStats { hops: self.hops + other.hops, nu: self.nu + other.nu, sigma2: self.sigma2 + other.sigma2 }
    }
}

fn non_empty<T>(hops: &[T], what: &str) -> Result<()> {
    if hops.is_empty() {
        return Err(Error::invalid(format!("empty list of {what} hops")));
    }
    Ok(())
}

fn check_order(k: f64, what: &str) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::invalid(format!("moment order {what} = {k} must be positive")));
    }
    Ok(())
}

/// Σ of closed-form α-μ log-moments.
pub fn reverse_alpha_mu(hops: &[AlphaMuParams]) -> Result<BlockStats> {
    non_empty(hops, "α-μ")?;
    let mut nu = 0.0;
    let mut s2 = 0.0;
    for h in hops {
        nu += h.log_mean()?;
        s2 += h.log_var()?;
    }
    Ok(BlockStats { hops: hops.len(), nu, sigma2: s2 })
}

/// κ-μ product by moment matching at order `k` (default `1/M`): closed-form
/// log-mean plus `σ² = (2 ln K - 2kν)/k²` with `K = Π E[Y_i^k]`.
pub fn reverse_kappa_mu(hops: &[KappaMuParams], k: Option<f64>) -> Result<BlockStats> {
    non_empty(hops, "κ-μ")?;
    let k = k.unwrap_or(1.0 / hops.len() as f64);
    check_order(k, "k")?;
    let mut nu = 0.0;
    let mut ln_k = 0.0;
    for h in hops {
        nu += h.log_mean()?;
        ln_k += h.ln_moment(k)?;
    }
    if !ln_k.is_finite() {
        return Err(Error::Overflow(format!("κ-μ product moment of order {k}; try a smaller order")));
    }
    Ok(BlockStats { hops: hops.len(), nu, sigma2: (2.0 * ln_k - 2.0 * k * nu) / (k * k) })
}

/// κ-μ product with per-hop log-variances from quadrature.
pub fn reverse_kappa_mu_quadrature(hops: &[KappaMuParams]) -> Result<BlockStats> {
    non_empty(hops, "κ-μ")?;
    let mut nu = 0.0;
    let mut s2 = 0.0;
    for h in hops {
        nu += h.log_mean()?;
        s2 += h.log_var().context(|| format!("κ-μ log-variance for {h:?}"))?;
    }
    Ok(BlockStats { hops: hops.len(), nu, sigma2: s2 })
}

/// η-μ product by two-moment matching at orders `k1`, `k2` (default `1/L`, `2/L`).
pub fn reverse_eta_mu(hops: &[EtaMuParams], k1: Option<f64>, k2: Option<f64>) -> Result<BlockStats> {
    non_empty(hops, "η-μ")?;
    let l = hops.len() as f64;
    let k1 = k1.unwrap_or(1.0 / l);
    let k2 = k2.unwrap_or(2.0 / l);
    check_order(k1, "k1")?;
    check_order(k2, "k2")?;
    if k1 == k2 {
        return Err(Error::invalid("η-μ moment orders k1 and k2 must differ"));
    }
    let mut ln_k1 = 0.0;
    let mut ln_k2 = 0.0;
    for h in hops {
        ln_k1 += h.ln_moment(k1)?;
        ln_k2 += h.ln_moment(k2)?;
    }
    if !(ln_k1.is_finite() && ln_k2.is_finite()) {
        return Err(Error::Overflow("η-μ product moments; try smaller orders".into()));
    }
    let nu = (k1 * k1 * ln_k2 - k2 * k2 * ln_k1) / (k1 * k2 * (k1 - k2));
    let s2 = (2.0 * k1 * ln_k2 - 2.0 * k2 * ln_k1) / (k1 * k2 * (k2 - k1));
    Ok(BlockStats { hops: hops.len(), nu, sigma2: s2 })
}

/// η-μ product with per-hop log-moments from quadrature.
pub fn reverse_eta_mu_quadrature(hops: &[EtaMuParams]) -> Result<BlockStats> {
    non_empty(hops, "η-μ")?;
    let mut nu = 0.0;
    let mut s2 = 0.0;
    for h in hops {
        nu += h.log_mean()?;
        s2 += h.log_var()?;
    }
    Ok(BlockStats { hops: hops.len(), nu, sigma2: s2 })
}

/// One hop of a heterogeneous cascade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hop {
    AlphaMu(AlphaMuParams),
    KappaMu(KappaMuParams),
    EtaMu(EtaMuParams),
}

/// How the κ-μ and η-μ blocks obtain their log-variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarianceMethod {
    #[default]
    MomentMatching,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CascadeSpec {
    pub hops: Vec<Hop>,
    /// κ-μ moment order; `1/M` when absent.
    pub kappa_order: Option<f64>,
    /// η-μ moment orders; `(1/L, 2/L)` when absent.
    pub eta_orders: Option<(f64, f64)>,
    pub method: VarianceMethod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeResult {
    pub alpha_mu: Option<BlockStats>,
    pub kappa_mu: Option<BlockStats>,
    pub eta_mu: Option<BlockStats>,
    pub total: BlockStats,
}

impl CascadeResult {
    pub fn lognormal(&self) -> Result<LognormalParams> {
        self.total.lognormal()
    }
}

/// Sum of the per-family block log-moments.
pub fn reverse_cascade(spec: &CascadeSpec) -> Result<CascadeResult> {
    if spec.hops.is_empty() {
        return Err(Error::invalid("cascade has no hops"));
    }
    let mut am = Vec::new();
    let mut km = Vec::new();
    let mut em = Vec::new();
    for h in &spec.hops {
        match *h {
            Hop::AlphaMu(p) => am.push(p),
            Hop::KappaMu(p) => km.push(p),
            Hop::EtaMu(p) => em.push(p),
        }
    }
    let quad = spec.method == VarianceMethod::Quadrature;
    let alpha_mu = (!am.is_empty()).then(|| reverse_alpha_mu(&am)).transpose()?;
    let kappa_mu = (!km.is_empty())
        .then(|| if quad { reverse_kappa_mu_quadrature(&km) } else { reverse_kappa_mu(&km, spec.kappa_order) })
        .transpose()?;
    let eta_mu = (!em.is_empty())
        .then(|| {
            if quad {
                reverse_eta_mu_quadrature(&em)
            } else {
                reverse_eta_mu(&em, spec.eta_orders.map(|o| o.0), spec.eta_orders.map(|o| o.1))
            }
        })
        .transpose()?;
    let total = [alpha_mu, kappa_mu, eta_mu]
        .into_iter()
        .flatten()
        .fold(BlockStats { hops: 0, nu: 0.0, sigma2: 0.0 }, BlockStats::add);
    Ok(CascadeResult { alpha_mu, kappa_mu, eta_mu, total })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trigamma_root() {
        for &m in &[0.01, 0.7, 1.0, 5.48, 123.0, 1e5] {
            let r = solve_trigamma(psi1(m)).unwrap();
            assert!(((r - m) / m).abs() < 1e-12, "{m}: {r}");
        }
        assert!(solve_trigamma(0.0).is_err());
    }

    #[test]
    fn infeasible_inverse_reports_minimal_n() {
        let t = LognormalParams::new(0.0, 3.0).unwrap();
        let e = forward_inv_nakagami(&t, 5).unwrap_err();
        assert!(e.is_infeasible());
        match e {
            Error::Infeasible { minimal_n: Some(n), .. } => {
                assert_eq!(n, 22);
                assert!(forward_inv_nakagami(&t, n).is_ok());
                assert!(forward_inv_nakagami(&t, n - 1).is_err());
            }
            other => panic!("{other:?}"),
        }
    }
}
