use std::fmt::Write as _;

use corrsv::inference::ParamSummary;
use corrsv::ModelKind;
use serde::{Deserialize, Serialize};

use crate::FitSummary;

/// One model's posterior means and SDs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorColumn {
    pub kind: ModelKind,
    pub rows: Vec<ParamSummary>,
}

impl From<&FitSummary> for PosteriorColumn {
    fn from(s: &FitSummary) -> Self {
        PosteriorColumn {
            kind: s.kind,
            rows: s.posterior.clone(),
        }
    }
}

const PARAMS: [&str; 4] = ["alpha", "phi", "sigma", "rho"];

/// Parameter rows, `mean (sd)` cells, blank where a model lacks the parameter.
pub fn render_posterior(cols: &[PosteriorColumn]) -> String {
    let mut rows = vec![std::iter::once("Parameter".to_string())
        .chain(cols.iter().map(|c| c.kind.to_string()))
        .collect::<Vec<_>>()];
    for name in PARAMS {
        let mut row = vec![name.to_string()];
        for c in cols {
            row.push(
                c.rows
                    .iter()
                    .find(|r| r.name == name)
                    .map(|r| format!("{:.4} ({:.4})", r.mean, r.sd))
                    .unwrap_or_default(),
            );
        }
        rows.push(row);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (s, w))| if c == 0 { format!("{s:<w$}") } else { format!("{s:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
        if i == 0 {
            let total = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
            let _ = writeln!(out, "{}", "-".repeat(total));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(name: &str, mean: f64, sd: f64) -> ParamSummary {
        ParamSummary { name: name.into(), mean, sd }
    }

    #[test]
    fn classical_column_leaves_rho_blank() {
        let cols = [
            PosteriorColumn {
                kind: ModelKind::Classical,
                rows: vec![row("alpha", -7.9, 0.2), row("phi", 0.96, 0.01), row("sigma", 0.18, 0.03)],
            },
            PosteriorColumn {
                kind: ModelKind::MeanCorrected,
                rows: vec![row("alpha", -7.88, 0.2), row("phi", 0.96, 0.01), row("sigma", 0.18, 0.03), row("rho", 0.105, 0.1)],
            },
        ];
        let t = render_posterior(&cols);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines[0].starts_with("Parameter"));
        assert!(lines[5].starts_with("rho"));
        assert!(lines[5].ends_with("0.1050 (0.1000)"));
        assert_eq!(lines[5].matches('(').count(), 1);
    }
}
