//! Cascade description files: a JSON array of hop objects.

use serde::Deserialize;

use lnsurrogate::dists::{AlphaMuParams, EtaMuFormat, EtaMuParams, KappaMuParams};
use lnsurrogate::mapping::{reverse_cascade, BlockStats, CascadeResult, CascadeSpec, Hop, VarianceMethod};

use crate::error::{CliError, CliResult};
use crate::output::{Cell, Metadata, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EtaFormatArg {
    #[default]
    Format1,
    Format2,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HopSpec {
    AlphaMu {
        alpha: f64,
        mu: f64,
        r_hat: f64,
    },
    KappaMu {
        kappa: f64,
        mu: f64,
        r_hat: f64,
        #[serde(default)]
        moment_order: Option<f64>,
    },
    EtaMu {
        eta: f64,
        mu: f64,
        r_hat: f64,
        #[serde(default)]
        format: EtaFormatArg,
        #[serde(default)]
        moment_orders: Option<[f64; 2]>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum VarianceArg {
    Moments,
    Quadrature,
}

impl From<VarianceArg> for VarianceMethod {
    fn from(v: VarianceArg) -> Self {
        match v {
            VarianceArg::Moments => VarianceMethod::MomentMatching,
            VarianceArg::Quadrature => VarianceMethod::Quadrature,
        }
    }
}

pub fn parse(text: &str) -> CliResult<Vec<HopSpec>> {
    let hops: Vec<HopSpec> =
        serde_json::from_str(text).map_err(|e| CliError::usage(format!("cascade file: {e}")))?;
    if hops.is_empty() {
        return Err(CliError::usage("cascade file lists no hops"));
    }
    Ok(hops)
}

/// All hops of one family must agree on their moment orders.
fn common<T: PartialEq + Copy + std::fmt::Debug>(vals: impl Iterator<Item = Option<T>>, what: &str) -> CliResult<Option<T>> {
    let mut seen: Option<T> = None;
    for v in vals.flatten() {
        match seen {
            Some(s) if s != v => {
                return Err(CliError::usage(format!("conflicting {what} across hops: {s:?} and {v:?}")));
            }
            _ => seen = Some(v),
        }
    }
    Ok(seen)
}

/// Flags override the per-hop moment orders.
pub fn build_spec(
    hops: &[HopSpec],
    method: VarianceMethod,
    kappa_order: Option<f64>,
    eta_orders: Option<(f64, f64)>,
) -> CliResult<CascadeSpec> {
    let mut spec = CascadeSpec { method, ..Default::default() };
    for h in hops {
        spec.hops.push(match *h {
            HopSpec::AlphaMu { alpha, mu, r_hat } => Hop::AlphaMu(AlphaMuParams::new(alpha, mu, r_hat)?),
            HopSpec::KappaMu { kappa, mu, r_hat, .. } => Hop::KappaMu(KappaMuParams::new(kappa, mu, r_hat)?),
            HopSpec::EtaMu { eta, mu, r_hat, format, .. } => {
                let f = match format {
                    EtaFormatArg::Format1 => EtaMuFormat::Format1,
                    EtaFormatArg::Format2 => EtaMuFormat::Format2,
                };
                Hop::EtaMu(EtaMuParams::new(eta, mu, r_hat, f)?)
            }
        });
    }
    let file_k = common(
        hops.iter().filter_map(|h| match h {
            HopSpec::KappaMu { moment_order, .. } => Some(*moment_order),
            _ => None,
        }),
        "κ-μ moment orders",
    )?;
    let file_e = common(
        hops.iter().filter_map(|h| match h {
            HopSpec::EtaMu { moment_orders, .. } => Some(moment_orders.map(|[a, b]| (a, b))),
            _ => None,
        }),
        "η-μ moment orders",
    )?;
    spec.kappa_order = kappa_order.or(file_k);
    spec.eta_orders = eta_orders.or(file_e);
    Ok(spec)
}

pub fn run(spec: &CascadeSpec) -> CliResult<CascadeResult> {
    Ok(reverse_cascade(spec)?)
}

pub fn table(res: &CascadeResult) -> Table {
    let cols = ["block", "hops", "nu", "sigma", "sigma2"];
    let mut t = Table::new(cols.iter().map(|s| s.to_string()).collect());
    let mut row = |name: &str, b: &BlockStats| {
        t.push(vec![Cell::from(name), b.hops.into(), b.nu.into(), b.sigma().into(), b.sigma2.into()]);
    };
    for (name, b) in [("alpha-mu", &res.alpha_mu), ("kappa-mu", &res.kappa_mu), ("eta-mu", &res.eta_mu)] {
        if let Some(b) = b {
            row(name, b);
        }
    }
    row("total", &res.total);
    t
}

/// Record the moment orders actually used.
pub fn annotate(meta: &mut Metadata, spec: &CascadeSpec) {
    let count = |f: fn(&Hop) -> bool| spec.hops.iter().filter(|h| f(h)).count();
    let nk = count(|h| matches!(h, Hop::KappaMu(_)));
    let ne = count(|h| matches!(h, Hop::EtaMu(_)));
    meta.set(
        "variance_method",
        match spec.method {
            VarianceMethod::MomentMatching => "moments",
            VarianceMethod::Quadrature => "quadrature",
        },
    );
    if spec.method == VarianceMethod::MomentMatching {
        if nk > 0 {
            meta.set("kappa_mu_order", spec.kappa_order.unwrap_or(1.0 / nk as f64));
        }
        if ne > 0 {
            let (a, b) = spec.eta_orders.unwrap_or((1.0 / ne as f64, 2.0 / ne as f64));
            meta.set("eta_mu_orders", vec![a, b]);
        }
    }
    let formats: Vec<&str> = spec
        .hops
        .iter()
        .filter_map(|h| match h {
            Hop::EtaMu(p) => Some(match p.format() {
                EtaMuFormat::Format1 => "format1",
                EtaMuFormat::Format2 => "format2",
            }),
            _ => None,
        })
        .collect();
    if let Some(f) = formats.first() {
        let mixed = formats.iter().any(|g| g != f);
        meta.set("eta_mu_format", if mixed { "mixed" } else { *f });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_families() {
        let text = r#"[
            {"family": "alpha-mu", "alpha": 2.0, "mu": 1.0, "r_hat": 1.0},
            {"family": "kappa-mu", "kappa": 1.0, "mu": 1.0, "r_hat": 1.0, "moment_order": 0.5},
            {"family": "eta-mu", "eta": 0.5, "mu": 1.0, "r_hat": 1.0, "moment_orders": [0.5, 1.0]}
        ]"#;
        let hops = parse(text).unwrap();
        let spec = build_spec(&hops, VarianceMethod::MomentMatching, None, None).unwrap();
        assert_eq!(spec.kappa_order, Some(0.5));
        assert_eq!(spec.eta_orders, Some((0.5, 1.0)));
        let spec = build_spec(&hops, VarianceMethod::MomentMatching, Some(0.25), None).unwrap();
        assert_eq!(spec.kappa_order, Some(0.25));
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(parse("[]"), Err(CliError::Usage(_))));
        assert!(parse(r#"[{"family": "rice", "k": 1}]"#).is_err());
        assert!(parse(r#"[{"family": "alpha-mu", "alpha": 2, "mu": 1, "r_hat": 1, "extra": 0}]"#).is_err());
        let two = r#"[
            {"family": "kappa-mu", "kappa": 1.0, "mu": 1.0, "r_hat": 1.0, "moment_order": 0.5},
            {"family": "kappa-mu", "kappa": 1.0, "mu": 1.0, "r_hat": 1.0, "moment_order": 0.4}
        ]"#;
        let hops = parse(two).unwrap();
        assert!(build_spec(&hops, VarianceMethod::MomentMatching, None, None).is_err());
    }
}
