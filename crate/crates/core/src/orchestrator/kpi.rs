use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::table::{ComparisonRow, ComparisonTable};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Pdr,
    EnergyJ,
    EnergyStdJ,
    MeanSf,
}

impl Metric {
    fn of(self, row: &ComparisonRow) -> f64 {
        match self {
            Metric::Pdr => row.pdr,
            Metric::EnergyJ => row.energy_j_mean,
            Metric::EnergyStdJ => row.energy_j_std,
            Metric::MeanSf => row.mean_sf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Ge,
    Le,
    Gt,
    Lt,
    Eq,
}

impl Cmp {
    const ALL: [(&'static str, Cmp); 5] = [(">=", Cmp::Ge), ("<=", Cmp::Le), ("==", Cmp::Eq), (">", Cmp::Gt), ("<", Cmp::Lt)];

    fn holds(self, a: f64, b: f64) -> bool {
        match self {
            Cmp::Ge => a >= b,
            Cmp::Le => a <= b,
            Cmp::Gt => a > b,
            Cmp::Lt => a < b,
            Cmp::Eq => a == b,
        }
    }

    fn symbol(self) -> &'static str {
        Cmp::ALL.iter().find(|(_, c)| *c == self).map(|(s, _)| *s).unwrap_or("?")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clause {
    pub metric: Metric,
    pub cmp: Cmp,
    pub value: f64,
}

/// A conjunction of comparisons such as `pdr>=0.9 && energy<500`.
///
/// Metrics: `pdr`, `energy` (mean total joules), `energy_std`, `mean_sf`.
#[derive(Debug, Clone, PartialEq)]
pub struct KpiPredicate {
    pub clauses: Vec<Clause>,
}

impl KpiPredicate {
    pub fn holds(&self, row: &ComparisonRow) -> bool {
        self.clauses.iter().all(|c| c.cmp.holds(c.metric.of(row), c.value))
    }
}

impl FromStr for KpiPredicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Predicate(s.to_owned());
        let mut clauses = Vec::new();
        for part in s.split("&&").flat_map(|p| p.split(" and ")) {
            let part = part.trim();
            let (pos, sym, cmp) = Cmp::ALL
                .iter()
                .filter_map(|&(sym, cmp)| part.find(sym).map(|p| (p, sym, cmp)))
                .min_by_key(|&(p, sym, _)| (p, std::cmp::Reverse(sym.len())))
                .ok_or_else(err)?;
            let metric = match part[..pos].trim().to_ascii_lowercase().as_str() {
                "pdr" => Metric::Pdr,
                "energy" | "energy_j" | "energy_j_mean" => Metric::EnergyJ,
                "energy_std" | "energy_j_std" => Metric::EnergyStdJ,
                "mean_sf" | "sf" => Metric::MeanSf,
                _ => return Err(err()),
            };
            let value: f64 = part[pos + sym.len()..].trim().parse().map_err(|_| err())?;
            if !value.is_finite() {
                return Err(err());
            }
            clauses.push(Clause { metric, cmp, value });
        }
        Ok(KpiPredicate { clauses })
    }
}

impl fmt::Display for KpiPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" && ")?;
            }
            let name = match c.metric {
                Metric::Pdr => "pdr",
                Metric::EnergyJ => "energy",
                Metric::EnergyStdJ => "energy_std",
                Metric::MeanSf => "mean_sf",
            };
            write!(f, "{name}{}{}", c.cmp.symbol(), c.value)?;
        }
        Ok(())
    }
}

/// Smallest gateway count meeting the predicate for one strategy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KpiOutcome {
    pub strategy: String,
    /// `None` when no swept K satisfies the predicate.
    pub k: Option<usize>,
    pub row: Option<ComparisonRow>,
}

impl KpiOutcome {
    pub fn describe(&self) -> String {
        match &self.row {
            Some(r) => format!(
                "{}: K={} (energy {:.2} J, pdr {:.4}, mean SF {:.3})",
                self.strategy, r.k, r.energy_j_mean, r.pdr, r.mean_sf
            ),
            None => format!("{}: unsatisfiable", self.strategy),
        }
    }
}

/// Linear scan over K for every strategy in the table.
pub fn kpi_search(table: &ComparisonTable, predicate: &KpiPredicate) -> Result<Vec<KpiOutcome>> {
    if table.rows.is_empty() {
        return Err(Error::EmptySweep("the sweep produced no rows".into()));
    }
    Ok(table
        .strategies()
        .into_iter()
        .map(|strategy| {
            let row = table
                .rows
                .iter()
                .filter(|r| r.strategy == strategy)
                .find(|r| predicate.holds(r))
                .cloned();
            KpiOutcome { strategy: strategy.to_owned(), k: row.as_ref().map(|r| r.k), row }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(k: usize, strategy: &str, energy: f64, pdr: f64) -> ComparisonRow {
        ComparisonRow { k, strategy: strategy.into(), energy_j_mean: energy, energy_j_std: 0.0, pdr, mean_sf: 8.0 }
    }

    fn table() -> ComparisonTable {
        ComparisonTable {
            rows: vec![
                row(2, "a", 30.0, 0.7),
                row(2, "b", 25.0, 0.85),
                row(4, "a", 20.0, 0.92),
                row(4, "b", 18.0, 0.95),
                row(6, "a", 15.0, 0.97),
                row(6, "b", 14.0, 0.99),
            ],
        }
    }

    #[test]
    fn parses_clauses() {
        let p: KpiPredicate = "pdr>=0.9 && energy < 20".parse().unwrap();
        assert_eq!(p.clauses.len(), 2);
        assert_eq!(p.clauses[0], Clause { metric: Metric::Pdr, cmp: Cmp::Ge, value: 0.9 });
        assert_eq!(p.clauses[1], Clause { metric: Metric::EnergyJ, cmp: Cmp::Lt, value: 20.0 });
        assert_eq!(p.to_string(), "pdr>=0.9 && energy<20");
        for bad in ["", "pdr", "latency<3", "pdr>=x", "pdr>=nan"] {
            assert!(matches!(bad.parse::<KpiPredicate>(), Err(Error::Predicate(_))), "{bad}");
        }
    }

    #[test]
    fn always_true_gives_smallest_k() {
        let out = kpi_search(&table(), &"pdr>=0".parse().unwrap()).unwrap();
        assert!(out.iter().all(|o| o.k == Some(2)));
    }

    #[test]
    fn always_false_is_unsatisfiable() {
        let out = kpi_search(&table(), &"energy<0".parse().unwrap()).unwrap();
        assert!(out.iter().all(|o| o.k.is_none()));
        assert_eq!(out[0].describe(), "a: unsatisfiable");
    }

    #[test]
    fn per_strategy_threshold() {
        let out = kpi_search(&table(), &"pdr>=0.9".parse().unwrap()).unwrap();
        assert_eq!((out[0].strategy.as_str(), out[0].k), ("a", Some(4)));
        assert_eq!((out[1].strategy.as_str(), out[1].k), ("b", Some(4)));
        let out = kpi_search(&table(), &"energy<=25".parse().unwrap()).unwrap();
        assert_eq!(out[1].k, Some(2));
    }

    #[test]
    fn empty_sweep() {
        let err = kpi_search(&ComparisonTable::default(), &"pdr>=0".parse().unwrap()).unwrap_err();
        assert!(matches!(err, Error::EmptySweep(_)));
    }
}
