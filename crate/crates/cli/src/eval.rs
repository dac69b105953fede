//! Tabulated densities and metrics for external plotting.

use std::f64::consts::LN_2;

use lnsurrogate::dists::{AlphaMuParams, Fading, LognormalParams};
use lnsurrogate::metrics::*;
use lnsurrogate::oracle::{quad_expectation, Domain};
use lnsurrogate::products::{InvNakagamiProduct, Mixture, NakagamiProduct, Surrogate};
use lnsurrogate::specfun::{gamma, upper_incomplete_gamma};

use crate::error::{CliError, CliResult};
use crate::forward::{solve, FamilyArg};
use crate::grid::{Grid, GridKind};
use crate::output::{Cell, Metadata, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Quantity {
    Pdf,
    Cdf,
    Cf,
    Ber,
    Capacity,
    CompositePdf,
    CompositeCdf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Model {
    Lognormal,
    Nak,
    Inv,
    Mixture,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalParams {
    pub nu: f64,
    pub sigma: f64,
    pub n: usize,
    pub p: f64,
    pub link: LinkParams,
    pub alpha: Option<f64>,
    pub mu: Option<f64>,
    pub r_hat: f64,
    pub tol: f64,
}

/// Log-domain window holding all but a negligible fraction of a log-normal-like law.
pub fn log_window(mean: f64, var: f64) -> Domain {
    let s = var.sqrt();
    Domain::LogRange(mean - 30.0 * s, mean + 30.0 * s)
}

/// Grid used when none is given on the command line.
pub fn default_grid(q: Quantity, p: &EvalParams) -> Grid {
    match q {
        Quantity::Cf => Grid { kind: GridKind::Lin, lo: 0.0, hi: 10.0, n: 101 },
        Quantity::Ber | Quantity::Capacity => Grid::single(p.link.gamma_bar),
        _ => {
            let (lo, hi) = ((p.nu - 4.0 * p.sigma).exp(), (p.nu + 4.0 * p.sigma).exp());
            Grid { kind: GridKind::Log, lo, hi, n: 200 }
        }
    }
}

/// `P(γ) = Γ(b, aγ) / (2Γ(b))`.
pub fn conditional_ber(link: &LinkParams, g: f64) -> f64 {
    upper_incomplete_gamma(link.b, link.a * g).unwrap_or(f64::NAN) / (2.0 * gamma(link.b).unwrap_or(f64::NAN))
}

pub fn conditional_capacity(link: &LinkParams, g: f64) -> f64 {
    link.bandwidth * g.ln_1p() / LN_2
}

/// α-μ envelope whose mean power is scaled by the shadow value `delta`.
pub fn shadowed_alpha_mu(alpha: f64, mu: f64, r_hat: f64, delta: f64) -> lnsurrogate::Result<AlphaMuParams> {
    AlphaMuParams::new(alpha, mu, r_hat * delta.sqrt())
}

struct Models {
    target: LognormalParams,
    nak: Option<NakagamiProduct>,
    inv: Option<InvNakagamiProduct>,
    mix: Option<Mixture>,
}

fn build(model: Model, p: &EvalParams) -> CliResult<Models> {
    let target = LognormalParams::new(p.nu, p.sigma)?;
    let fam = match model {
        Model::Lognormal => None,
        Model::Nak => Some(FamilyArg::Nak),
        Model::Inv => Some(FamilyArg::Inv),
        Model::Mixture => Some(FamilyArg::Both),
    };
    let (mut nak, mut inv) = (None, None);
    if let Some(f) = fam {
        for s in solve(p.nu, p.sigma, p.n, f, p.tol)? {
            match s.family {
                lnsurrogate::mapping::SurrogateFamily::NakagamiProduct => nak = Some(s.nakagami_product()?),
                lnsurrogate::mapping::SurrogateFamily::InvNakagamiProduct => inv = Some(s.inv_product()?),
            }
        }
    }
    let mix = match (model, &nak, &inv) {
        (Model::Mixture, Some(x), Some(y)) => Some(Mixture::new(p.p, x.clone(), y.clone())?),
        _ => None,
    };
    Ok(Models { target, nak, inv, mix })
}

impl Models {
    fn surrogates(&self) -> Vec<(&'static str, &dyn Surrogate)> {
        let mut v: Vec<(&'static str, &dyn Surrogate)> = Vec::new();
        if let Some(x) = &self.nak {
            v.push(("nakagami", x));
        }
        if let Some(y) = &self.inv {
            v.push(("inv_nakagami", y));
        }
        if let Some(z) = &self.mix {
            v.push(("mixture", z));
        }
        v
    }

    fn shadows(&self) -> Vec<(&'static str, Shadow)> {
        let mut v = Vec::new();
        if let Some(x) = &self.nak {
            v.push(("nakagami", Shadow::Nakagami(x.clone())));
        }
        if let Some(y) = &self.inv {
            v.push(("inv_nakagami", Shadow::InvNakagami(y.clone())));
        }
        if let Some(z) = &self.mix {
            v.push(("mixture", Shadow::Mixture(z.clone())));
        }
        v
    }

    fn ln_window(&self) -> Domain {
        log_window(self.target.nu(), self.target.sigma().powi(2))
    }

    fn ln_expect(&self, f: impl Fn(f64) -> f64) -> CliResult<f64> {
        Ok(quad_expectation(|r| self.target.pdf(r), f, self.ln_window())?.value)
    }

    fn ln_power(&self) -> f64 {
        (2.0 * self.target.nu() + 2.0 * self.target.sigma().powi(2)).exp()
    }
}

/// Columns: abscissa, the exact Lognormal value, then one per surrogate.
pub fn run(q: Quantity, model: Model, p: &EvalParams, grid: &Grid, meta: &mut Metadata) -> CliResult<Table> {
    if !(0.0..=1.0).contains(&p.p) {
        return Err(CliError::usage(format!("mixture weight {} outside [0, 1]", p.p)));
    }
    let ms = build(model, p)?;
    let xs = grid.abscissae();
    let pts = grid.points();
    let abscissa = match (q, grid.kind) {
        (Quantity::Cf, _) => "omega",
        (Quantity::Ber | Quantity::Capacity, GridKind::Db) => "gamma_bar_db",
        (Quantity::Ber | Quantity::Capacity, _) => "gamma_bar",
        _ => "r",
    };
    meta.set("quantity", format!("{q:?}").to_lowercase());
    meta.set("model", format!("{model:?}").to_lowercase());
    meta.set("nu", p.nu).set("sigma", p.sigma).set("grid", grid.to_string());
    if model != Model::Lognormal {
        meta.set("n_factors", p.n);
    }
    if model == Model::Mixture {
        meta.set("p_mix", p.p);
    }
    let exact = match q {
        Quantity::Pdf | Quantity::Cdf => "closed-form",
        _ => "quadrature",
    };
    meta.set("lognormal_method", exact);

    let mut names = vec!["lognormal"];
    names.extend(ms.surrogates().iter().map(|(n, _)| *n));
    let mut cols = vec![abscissa.to_string()];
    if q == Quantity::Cf {
        for n in &names {
            cols.push(format!("{n}_re"));
            cols.push(format!("{n}_im"));
        }
    } else {
        cols.extend(names.iter().map(|n| n.to_string()));
    }
    let mut table = Table::new(cols);

    match q {
        Quantity::Pdf | Quantity::Cdf => {
            let cdf = q == Quantity::Cdf;
            for (&x, &r) in xs.iter().zip(&pts) {
                let mut row: Vec<Cell> = vec![x.into()];
                row.push(if cdf { ms.target.cdf(r)? } else { ms.target.pdf(r)? }.into());
                for (_, s) in ms.surrogates() {
                    row.push(if cdf { s.cdf(r)? } else { s.pdf(r)? }.into());
                }
                table.push(row);
            }
        }
        Quantity::Cf => {
            for &w in &pts {
                let re = ms.ln_expect(|r| (w * r).cos())?;
                let im = ms.ln_expect(|r| (w * r).sin())?;
                let mut row: Vec<Cell> = vec![w.into(), re.into(), im.into()];
                if let Some(x) = &ms.nak {
                    let c = cf_nak_product(x, w)?;
                    row.extend([c.re.into(), c.im.into()]);
                }
                if let Some(y) = &ms.inv {
                    let c = cf_inv_product(y, w)?;
                    row.extend([c.re.into(), c.im.into()]);
                }
                if let Some(z) = &ms.mix {
                    let c = cf_mixture(z, w)?;
                    row.extend([c.re.into(), c.im.into()]);
                }
                table.push(row);
            }
        }
        Quantity::Ber | Quantity::Capacity => {
            let ber = q == Quantity::Ber;
            meta.set("a", p.link.a).set("b", p.link.b).set("bandwidth", p.link.bandwidth);
            for (&x, &gb) in xs.iter().zip(&pts) {
                let link = p.link.with_gamma_bar(gb)?;
                let pw = ms.ln_power();
                let exact = if ber {
                    ms.ln_expect(|r| conditional_ber(&link, gb * r * r / pw))?
                } else {
                    ms.ln_expect(|r| conditional_capacity(&link, gb * r * r / pw))?
                };
                let mut row: Vec<Cell> = vec![x.into(), exact.into()];
                if let Some(x) = &ms.nak {
                    row.push(if ber { ber_nak_product(x, &link)? } else { capacity_nak_product(x, &link)? }.into());
                }
                if let Some(y) = &ms.inv {
                    row.push(if ber { ber_inv_product(y, &link)? } else { capacity_inv_product(y, &link)? }.into());
                }
                if let Some(z) = &ms.mix {
                    row.push(if ber { ber_mixture(z, &link)? } else { capacity_mixture(z, &link)? }.into());
                }
                table.push(row);
            }
        }
        Quantity::CompositePdf | Quantity::CompositeCdf => {
            let cdf = q == Quantity::CompositeCdf;
            let (alpha, mu) = match (p.alpha, p.mu) {
                (Some(a), Some(m)) => (a, m),
                _ => return Err(CliError::usage("composite quantities need --alpha and --mu")),
            };
            AlphaMuParams::new(alpha, mu, p.r_hat)?;
            meta.set("alpha", alpha).set("mu", mu).set("r_hat", p.r_hat);
            let comps = ms
                .shadows()
                .into_iter()
                .map(|(_, s)| CompositeParams::from_r_hat(alpha, mu, p.r_hat, s))
                .collect::<lnsurrogate::Result<Vec<_>>>()?;
            for (&x, &r) in xs.iter().zip(&pts) {
                let exact = ms.ln_expect(|d| {
                    let c = shadowed_alpha_mu(alpha, mu, p.r_hat, d).expect("positive shadow");
                    if cdf {
                        c.cdf(r).unwrap_or(f64::NAN)
                    } else {
                        c.pdf(r).unwrap_or(f64::NAN)
                    }
                })?;
                let mut row: Vec<Cell> = vec![x.into(), exact.into()];
                for c in &comps {
                    row.push(if cdf { c.cdf(r)? } else { c.pdf(r)? }.into());
                }
                table.push(row);
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use lnsurrogate::mapping::forward_nakagami;

    #[test]
    fn shadowed_alpha_mu_matches_composite_conditional() {
        let x = forward_nakagami(&LognormalParams::new(0.5, 0.5).unwrap(), 5).unwrap().nakagami_product().unwrap();
        let c = CompositeParams::from_r_hat(3.5, 2.0, 1.3, Shadow::Nakagami(x)).unwrap();
        for &(r, d) in &[(0.5, 0.7), (1.0, 2.0), (2.5, 4.0)] {
            let a = shadowed_alpha_mu(3.5, 2.0, 1.3, d).unwrap();
            let (u, v) = (a.pdf(r).unwrap(), c.conditional_pdf(r, d));
            assert!((u - v).abs() < 1e-13 * v.max(1.0), "{u} {v}");
            let (u, v) = (a.cdf(r).unwrap(), c.conditional_cdf(r, d).unwrap());
            assert!((u - v).abs() < 1e-13, "{u} {v}");
        }
    }
}
