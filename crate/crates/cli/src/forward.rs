use lnsurrogate::dists::LognormalParams;
use lnsurrogate::mapping::{forward_inv_nakagami, forward_nakagami, ForwardSolution};

use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FamilyArg {
    Nak,
    Inv,
    Both,
}

/// Forward solutions for the requested families, each checked against `tol`.
pub fn solve(nu: f64, sigma: f64, n: usize, family: FamilyArg, tol: f64) -> CliResult<Vec<ForwardSolution>> {
    let target = LognormalParams::new(nu, sigma)?;
    let mut out = Vec::new();
    if matches!(family, FamilyArg::Nak | FamilyArg::Both) {
        out.push(checked(forward_nakagami(&target, n)?, tol)?);
    }
    if matches!(family, FamilyArg::Inv | FamilyArg::Both) {
        out.push(checked(forward_inv_nakagami(&target, n)?, tol)?);
    }
    Ok(out)
}

fn checked(sol: ForwardSolution, tol: f64) -> CliResult<ForwardSolution> {
    if sol.within_tolerance(tol) {
        Ok(sol)
    } else {
        Err(CliError::NonConvergence(format!(
            "{} mapping residuals {:?} exceed tolerance {tol}",
            sol.family.name(),
            sol.residuals
        )))
    }
}

pub fn table(solutions: &[ForwardSolution]) -> Table {
    let cols = ["family", "n", "m", "omega", "ln_omega", "residual_mean", "residual_var"];
    let mut t = Table::new(cols.iter().map(|s| s.to_string()).collect());
    for s in solutions {
        t.push(vec![
            Cell::from(s.family.name()),
            s.n.into(),
            s.m.into(),
            s.omega().into(),
            s.ln_omega.into(),
            s.residuals.0.into(),
            s.residuals.1.into(),
        ]);
    }
    t
}
