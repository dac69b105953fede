//! Independent reference machinery: log-domain FFT convolution, batched
//! Monte Carlo, quadrature expectations and distribution distances.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::dists::Fading;
use crate::error::{Error, Result};
use crate::quad::{try_integrate, try_integrate_log_range, try_integrate_positive, QuadConfig, QuadResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// Evaluation grid on the positive half-line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lower: f64,
    pub upper: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn new(lower: f64, upper: f64, points: usize, spacing: Spacing) -> Result<Self> {
        if !(lower > 0.0 && lower < upper && upper.is_finite()) {
            return Err(Error::invalid(format!("grid bounds must satisfy 0 < {lower} < {upper} < ∞")));
        }
        if points < 2 {
            return Err(Error::invalid("a grid needs at least two points"));
        }
        Ok(GridSpec { lower, upper, points, spacing })
    }

    pub fn linear(lower: f64, upper: f64, points: usize) -> Result<Self> {
        Self::new(lower, upper, points, Spacing::Linear)
    }

    pub fn log(lower: f64, upper: f64, points: usize) -> Result<Self> {
        Self::new(lower, upper, points, Spacing::Log)
    }

    pub fn values(&self) -> Vec<f64> {
        let k = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / k;
                match self.spacing {
                    Spacing::Linear => self.lower + (self.upper - self.lower) * t,
                    Spacing::Log => (self.lower.ln() + (self.upper.ln() - self.lower.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

/// A positive factor of a product, described through its density and log-moments.
pub trait LogFactor: Sync {
    fn density(&self, r: f64) -> Result<f64>;
    /// `E[ln R]`.
    fn ln_mean(&self) -> Result<f64>;
    /// `V[ln R]`.
    fn ln_var(&self) -> Result<f64>;
}

impl<T: Fading + Sync> LogFactor for T {
    fn density(&self, r: f64) -> Result<f64> {
        self.pdf(r)
    }

    fn ln_mean(&self) -> Result<f64> {
        self.log_mean()
    }

    fn ln_var(&self) -> Result<f64> {
        self.log_var()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FftConfig {
    pub points: usize,
    /// Half-width of the log-grid in combined log-standard-deviations.
    pub span: f64,
    /// Largest tolerated factor mass outside the log-grid.
    pub max_tail_mass: f64,
}

impl Default for FftConfig {
    fn default() -> Self {
        FftConfig { points: 1 << 14, span: 12.0, max_tail_mass: 1e-8 }
    }
}

/// Density of `ln Z` tabulated on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LogDensityTable {
    pub u0: f64,
    pub du: f64,
    pub values: Vec<f64>,
    /// Largest captured-mass deficit over the factors.
    pub tail_mass: f64,
}

impl LogDensityTable {
    /// Density of `ln Z` at `u` by four-point Lagrange interpolation.
    pub fn log_density(&self, u: f64) -> f64 {
        let x = (u - self.u0) / self.du;
        let n = self.values.len();
        if !(x >= 0.0 && x <= (n - 1) as f64) {
            return 0.0;
        }
        let i = (x.floor() as usize).clamp(1, n.saturating_sub(3));
        let t = x - i as f64;
        let y = |k: usize| self.values[k];
        let (ym, y0, y1, y2) = (y(i - 1), y(i), y(i + 1), y(i + 2));
        let v = -t * (t - 1.0) * (t - 2.0) / 6.0 * ym + (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0 * y0
            - (t + 1.0) * t * (t - 2.0) / 2.0 * y1
            + (t + 1.0) * t * (t - 1.0) / 6.0 * y2;
        v.max(0.0)
    }

    /// Density of `Z` at `r`.
    pub fn pdf(&self, r: f64) -> f64 {
        if !(r > 0.0) {
            return 0.0;
        }
        self.log_density(r.ln()) / r
    }
}

impl LogDensityTable {
    fn moments(&self) -> (f64, f64) {
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for (j, &g) in self.values.iter().enumerate() {
            let u = self.u0 + j as f64 * self.du;
            s0 += g;
            s1 += g * u;
            s2 += g * u * u;
        }
        let mean = s1 / s0;
        (mean, s2 / s0 - mean * mean)
    }
}

/// A table can itself be a factor of a further convolution.
impl LogFactor for LogDensityTable {
    fn density(&self, r: f64) -> Result<f64> {
        Ok(self.pdf(r))
    }

    fn ln_mean(&self) -> Result<f64> {
        Ok(self.moments().0)
    }

    fn ln_var(&self) -> Result<f64> {
        Ok(self.moments().1)
    }
}

/// Tabulated product density with an error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductDensity {
    pub grid: Vec<f64>,
    pub pdf: Vec<f64>,
    /// Largest difference against a half-resolution convolution.
    pub error_bound: f64,
    pub table: LogDensityTable,
}

fn log_convolve(factors: &[&dyn LogFactor], cfg: &FftConfig) -> Result<LogDensityTable> {
    if factors.is_empty() {
        return Err(Error::invalid("no factors to convolve"));
    }
    if cfg.points < 16 || !cfg.points.is_power_of_two() {
        return Err(Error::invalid("FFT size must be a power of two ≥ 16"));
    }
    let mut means = Vec::with_capacity(factors.len());
    let mut var = 0.0;
    for f in factors {
        let v = f.ln_var()?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::domain("fft_product_pdf", format!("factor log-variance {v} must be finite")));
        }
        means.push(f.ln_mean()?);
        var += v;
    }
    let m = cfg.points;
    let half = (m / 2) as f64;
    let du = 2.0 * cfg.span * var.sqrt() / m as f64;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);

    let mut acc: Option<Vec<Complex<f64>>> = None;
    let mut tail_mass: f64 = 0.0;
    for (f, &mu) in factors.iter().zip(&means) {
        let samples: Vec<f64> = (0..m)
            .into_par_iter()
            .map(|j| {
                let u = mu + (j as f64 - half) * du;
                let r = u.exp();
                if r == 0.0 || !r.is_finite() {
                    return Ok(0.0);
                }
                Ok(f.density(r)? * r)
            })
            .collect::<Result<_>>()?;
        let mass: f64 = samples.iter().sum::<f64>() * du;
        tail_mass = tail_mass.max((1.0 - mass).abs());
        let mut buf: Vec<Complex<f64>> = samples.into_iter().map(|v| Complex::new(v, 0.0)).collect();
        fwd.process(&mut buf);
        acc = Some(match acc {
            None => buf,
            Some(a) => a.iter().zip(&buf).map(|(x, y)| x * y * du).collect(),
        });
    }
    if tail_mass > cfg.max_tail_mass {
        return Err(Error::Aliasing { tail_mass });
    }
    let mut buf = acc.expect("at least one factor");
    inv.process(&mut buf);
    let n = factors.len();
    // circular index J carries u = Σμ + (J - n·M/2)·du; unwrap to a centred window
    let shift = (n * m / 2) % m;
    let scale = 1.0 / m as f64;
    let mut values = vec![0.0; m];
    for (j, v) in values.iter_mut().enumerate() {
        let src = (j + shift + m - m / 2) % m;
        *v = (buf[src].re * scale).max(0.0);
    }
    let u0 = means.iter().sum::<f64>() - half * du;
    Ok(LogDensityTable { u0, du, values, tail_mass })
}

/// Density of `Π R_i` by convolving the densities of `ln R_i`.
pub fn fft_product_pdf(factors: &[&dyn LogFactor], grid: &GridSpec, cfg: &FftConfig) -> Result<ProductDensity> {
    let table = log_convolve(factors, cfg)?;
    let coarse = log_convolve(factors, &FftConfig { points: cfg.points / 2, ..*cfg })?;
    let xs = grid.values();
    let pdf: Vec<f64> = xs.iter().map(|&r| table.pdf(r)).collect();
    let error_bound = xs
        .iter()
        .zip(&pdf)
        .map(|(&r, &p)| (coarse.pdf(r) - p).abs())
        .fold(0.0, f64::max);
    Ok(ProductDensity { grid: xs, pdf, error_bound, table })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub batch: u64,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        McConfig { samples, seed, batch: 1 << 14 }
    }

    fn validate(&self) -> Result<()> {
        if self.samples < 2 || self.batch == 0 {
            return Err(Error::invalid("Monte Carlo needs at least two samples and a positive batch size"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl McEstimate {
    /// `|mean - x|` in units of the standard error (0 when both vanish).
    pub fn z_score(&self, x: f64) -> f64 {
        let d = (self.mean - x).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(a: Welford, b: Welford) -> Welford {
        if a.n == 0 {
            return b;
        }
        if b.n == 0 {
            return a;
        }
        let n = a.n + b.n;
        let d = b.mean - a.mean;
        Welford {
            n,
            mean: a.mean + d * b.n as f64 / n as f64,
            m2: a.m2 + b.m2 + d * d * a.n as f64 * b.n as f64 / n as f64,
        }
    }
}

/// Stream `b` of the ChaCha8 generator seeded by `seed`: batch `b` always
/// sees the same numbers, independent of thread scheduling.
pub fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Mean of several functionals of one sample stream; one estimate per functional.
pub fn mc_estimate_many<S, F>(sampler: S, functionals: &[F], cfg: &McConfig) -> Result<Vec<McEstimate>>
where
    S: Fn(&mut ChaCha8Rng) -> f64 + Sync,
    F: Fn(f64) -> f64 + Sync,
{
    cfg.validate()?;
    let k = functionals.len();
    let batches = cfg.samples.div_ceil(cfg.batch);
    let parts: Vec<Vec<Welford>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(cfg.seed, b);
            let count = cfg.batch.min(cfg.samples - b * cfg.batch);
            let mut acc = vec![Welford { n: 0, mean: 0.0, m2: 0.0 }; k];
            for _ in 0..count {
                let x = sampler(&mut rng);
                for (w, f) in acc.iter_mut().zip(functionals) {
                    w.push(f(x));
                }
            }
            acc
        })
        .collect();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let mut level: Vec<Welford> = parts.iter().map(|p| p[i]).collect();
        // pairwise reduction in batch order
        while level.len() > 1 {
            level = level
                .chunks(2)
                .map(|c| if c.len() == 2 { Welford::merge(c[0], c[1]) } else { c[0] })
                .collect();
        }
        let w = level[0];
        if !w.mean.is_finite() {
            return Err(Error::domain("mc_estimate", "functional produced a non-finite mean"));
        }
        let var = w.m2 / (w.n - 1) as f64;
        out.push(McEstimate { mean: w.mean, std_error: (var / w.n as f64).sqrt(), samples: w.n });
    }
    Ok(out)
}

/// Batched, reproducible Monte Carlo mean of `functional(sample)`.
pub fn mc_estimate<S, F>(sampler: S, functional: F, cfg: &McConfig) -> Result<McEstimate>
where
    S: Fn(&mut ChaCha8Rng) -> f64 + Sync,
    F: Fn(f64) -> f64 + Sync,
{
    Ok(mc_estimate_many(sampler, &[functional], cfg)?[0])
}

/// Integration domain for [`quad_expectation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval(f64, f64),
    /// `(0, ∞)`, with the bulk of the mass near the given scale.
    Positive(f64),
    /// `[e^lo, e^hi]`.
    LogRange(f64, f64),
}

/// Relative tolerance of quadrature expectations.
pub const QUAD_REL_TOL: f64 = 1e-8;

/// `∫ integrand(r) density(r) dr` over the domain.
pub fn quad_expectation<D, G>(density: D, integrand: G, domain: Domain) -> Result<QuadResult>
where
    D: Fn(f64) -> Result<f64>,
    G: Fn(f64) -> f64,
{
    let cfg = QuadConfig { rel_tol: QUAD_REL_TOL, abs_tol: 1e-15, ..Default::default() };
    let f = |r: f64| -> Result<f64> {
        let g = integrand(r);
        if g == 0.0 {
            return Ok(0.0);
        }
        Ok(g * density(r)?)
    };
    match domain {
        Domain::Interval(a, b) => try_integrate(f, a, b, &cfg),
        Domain::Positive(s) => try_integrate_positive(f, s, &cfg),
        Domain::LogRange(lo, hi) => try_integrate_log_range(f, lo, hi, &cfg),
    }
}

/// Largest CDF gap on the grid.
pub fn ks_distance<A, B>(cdf_a: A, cdf_b: B, grid: &GridSpec) -> Result<f64>
where
    A: Fn(f64) -> Result<f64>,
    B: Fn(f64) -> Result<f64>,
{
    let mut d: f64 = 0.0;
    for r in grid.values() {
        d = d.max((cdf_a(r)? - cdf_b(r)?).abs());
    }
    Ok(d.min(1.0))
}

/// Trapezoid KL divergence, skipping grid cells where either density is
/// below [`KL_CLIP`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlDivergence {
    pub value: f64,
    /// Grid points excluded by the support clip.
    pub clipped: usize,
}

pub const KL_CLIP: f64 = 1e-300;

pub fn kl_divergence<A, B>(pdf_a: A, pdf_b: B, grid: &GridSpec) -> Result<KlDivergence>
where
    A: Fn(f64) -> Result<f64>,
    B: Fn(f64) -> Result<f64>,
{
    let xs = grid.values();
    let mut clipped = 0;
    let mut terms = Vec::with_capacity(xs.len());
    for &x in &xs {
        let (p, q) = (pdf_a(x)?, pdf_b(x)?);
        if p < KL_CLIP || q < KL_CLIP {
            clipped += 1;
            terms.push(0.0);
        } else {
            terms.push(p * (p / q).ln());
        }
    }
    let value: f64 = xs.windows(2).zip(terms.windows(2)).map(|(x, t)| 0.5 * (x[1] - x[0]) * (t[0] + t[1])).sum();
    if clipped > 0 {
        log::info!("kl_divergence: {clipped} of {} grid points clipped", xs.len());
    }
    Ok(KlDivergence { value: value.max(0.0), clipped })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_merge_matches_direct() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut all = Welford { n: 0, mean: 0.0, m2: 0.0 };
        xs.iter().for_each(|&x| all.push(x));
        let empty = Welford { n: 0, mean: 0.0, m2: 0.0 };
        let (mut a, mut b) = (empty, empty);
        xs[..37].iter().for_each(|&x| a.push(x));
        xs[37..].iter().for_each(|&x| b.push(x));
        let m = Welford::merge(a, b);
        assert!((m.mean - all.mean).abs() < 1e-14 && (m.m2 - all.m2).abs() < 1e-12);
    }

    #[test]
    fn grid_values() {
        let g = GridSpec::log(0.01, 100.0, 5).unwrap().values();
        assert!((g[2] - 1.0).abs() < 1e-14 && (g[4] - 100.0).abs() < 1e-12);
        assert!(GridSpec::linear(1.0, 1.0, 3).is_err());
        assert!(GridSpec::linear(0.5, 1.0, 1).is_err());
    }
}
