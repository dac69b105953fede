use std::str::FromStr;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Lin,
    Log,
    /// Equally spaced in decibels, evaluated at `10^(x/10)`.
    Db,
}

/// `KIND:LO:HI:N`, e.g. `log:0.01:10:200`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub kind: GridKind,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(kind: GridKind, lo: f64, hi: f64, n: usize) -> Result<Self, CliError> {
        if !(lo.is_finite() && hi.is_finite()) || (n > 1 && lo >= hi) || (n == 1 && lo > hi) || n == 0 {
            return Err(CliError::usage(format!("grid needs finite lo < hi and n ≥ 1 (got {lo}, {hi}, {n})")));
        }
        if kind == GridKind::Log && lo <= 0.0 {
            return Err(CliError::usage("log grids need a positive lower bound"));
        }
        Ok(Grid { kind, lo, hi, n })
    }

    pub fn single(x: f64) -> Self {
        Grid { kind: GridKind::Lin, lo: x, hi: x, n: 1 }
    }

    /// Abscissae as reported in the output.
    pub fn abscissae(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let k = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                let t = i as f64 / k;
                match self.kind {
                    GridKind::Lin | GridKind::Db => self.lo + (self.hi - self.lo) * t,
                    GridKind::Log => (self.lo.ln() + (self.hi.ln() - self.lo.ln()) * t).exp(),
                }
            })
            .collect()
    }

    /// Points at which quantities are evaluated.
    pub fn points(&self) -> Vec<f64> {
        let xs = self.abscissae();
        match self.kind {
            GridKind::Db => xs.into_iter().map(|x| 10f64.powf(x / 10.0)).collect(),
            _ => xs,
        }
    }
}

impl FromStr for Grid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || CliError::usage(format!("grid '{s}' is not KIND:LO:HI:N with KIND in lin, log, db"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let kind = match parts[0] {
            "lin" => GridKind::Lin,
            "log" => GridKind::Log,
            "db" => GridKind::Db,
            _ => return Err(bad()),
        };
        let lo: f64 = parts[1].parse().map_err(|_| bad())?;
        let hi: f64 = parts[2].parse().map_err(|_| bad())?;
        let n: usize = parts[3].parse().map_err(|_| bad())?;
        Grid::new(kind, lo, hi, n)
    }
}

impl std::fmt::Display for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let k = match self.kind {
            GridKind::Lin => "lin",
            GridKind::Log => "log",
            GridKind::Db => "db",
        };
        write!(f, "{k}:{}:{}:{}", self.lo, self.hi, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_points() {
        let g: Grid = "log:0.1:10:3".parse().unwrap();
        let p = g.points();
        assert!((p[1] - 1.0).abs() < 1e-15);
        let d: Grid = "db:0:20:3".parse().unwrap();
        assert_eq!(d.abscissae(), vec![0.0, 10.0, 20.0]);
        assert!((d.points()[2] - 100.0).abs() < 1e-12);
        assert!("lin:0:1".parse::<Grid>().is_err());
        assert!("log:0:1:5".parse::<Grid>().is_err());
        assert!("lin:2:1:5".parse::<Grid>().is_err());
    }
}
