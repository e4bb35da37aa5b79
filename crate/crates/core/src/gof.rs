//! Goodness of fit: sample moments, deviance, one-step MSPE and empirical
//! return/volatility lead-lag correlations, plus a plain-text table.
//!
//! Deviance is `-2 log f(r | theta, h)` with the normalising constant taken
//! as one; only differences between models carry meaning.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{return_log_density, PosteriorChain};
use crate::model::{LatentPath, ModelKind, ModelParams};
use crate::moments::{self, MomentSet};

/// Sample mean, 1/n central variance, skewness and raw kurtosis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Descriptive {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// Mean and 1/n central moments `m2, m3, m4`. Defined for constant series.
pub fn central_moments(x: &[f64]) -> Result<(f64, f64, f64, f64)> {
    if x.len() < 4 {
        return Err(Error::TooShort { got: x.len(), need: 4 });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteLikelihood("returns"));
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    Ok((mean, m2 / n, m3 / n, m4 / n))
}

/// Descriptive statistics of a return series.
///
/// A constant series has no defined skewness or kurtosis and is rejected
/// with `DegenerateSeries`; [`central_moments`] still reports its zero
/// variance.
pub fn descriptive_stats(returns: &[f64]) -> Result<Descriptive> {
    let (mean, m2, m3, m4) = central_moments(returns)?;
    // A constant series leaves rounding residue of order eps^2 * mean^2.
    if m2 <= 0.0 || m2 <= 1e-24 * mean * mean {
        return Err(Error::DegenerateSeries);
    }
    Ok(Descriptive {
        n: returns.len(),
        mean,
        variance: m2,
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2),
    })
}

/// `-2 log f(r | theta, h)`: return densities only.
pub fn deviance(params: &ModelParams, h: &LatentPath, returns: &[f64]) -> Result<f64> {
    Ok(-2.0 * return_log_density(params, h, returns)?)
}

/// Posterior mean deviance. Recomputed from stored latent paths when the
/// chain has them, otherwise averaged from the recorded per-draw values.
pub fn mean_deviance(chain: &PosteriorChain, returns: &[f64]) -> Result<f64> {
    if chain.is_empty() {
        return Err(Error::EmptyChain);
    }
    if chain.h_draws.len() == chain.len() {
        let mut acc = 0.0;
        for (p, h) in chain.theta_draws.iter().zip(&chain.h_draws) {
            acc += deviance(p, h, returns)?;
        }
        return Ok(acc / chain.len() as f64);
    }
    if chain.deviance_draws.len() != chain.len() {
        return Err(Error::LengthMismatch {
            what: "deviance draws",
            got: chain.deviance_draws.len(),
            expected: chain.len(),
        });
    }
    Ok(chain.deviance_draws.iter().sum::<f64>() / chain.len() as f64)
}

/// Posterior mean of the constant one-step prediction: zero for the
/// classical and correlated variants, `E[mu]` for the mean-corrected one.
///
/// Draws are summed in sorted order so the value does not depend on the
/// order of the chain.
pub fn predicted_mean(chain: &PosteriorChain) -> Result<f64> {
    if chain.is_empty() {
        return Err(Error::EmptyChain);
    }
    let mut mu = chain.mu_draws();
    mu.sort_by(f64::total_cmp);
    Ok(mu.iter().sum::<f64>() / mu.len() as f64)
}

/// `(1/T) sum_t (r_t - r_hat)^2` with `r_hat` from [`predicted_mean`].
pub fn mspe(chain: &PosteriorChain, returns: &[f64]) -> Result<f64> {
    let r_hat = predicted_mean(chain)?;
    if returns.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(returns.iter().map(|r| (r - r_hat).powi(2)).sum::<f64>() / returns.len() as f64)
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    sxy / (sxx * syy).sqrt()
}

/// Sample correlation of `r_t` with `h_{t+k}` for `k` in `-k_max..=k_max`
/// (positive = lead, negative = lag) over the overlapping window.
pub fn empirical_leadlag(returns: &[f64], h: &[f64], k_max: usize) -> Result<BTreeMap<i64, f64>> {
    if h.len() != returns.len() {
        return Err(Error::LengthMismatch {
            what: "latent path",
            got: h.len(),
            expected: returns.len(),
        });
    }
    let n = returns.len();
    if k_max + 2 > n {
        return Err(Error::TooShort { got: n, need: k_max + 2 });
    }
    let mut out = BTreeMap::new();
    for k in 0..=k_max {
        out.insert(k as i64, pearson(&returns[..n - k], &h[k..]));
        if k > 0 {
            out.insert(-(k as i64), pearson(&returns[k..], &h[..n - k]));
        }
    }
    Ok(out)
}

/// Lead-lag offsets shown by default: contemporaneous and ten-step lag.
pub const DEFAULT_LAGS: [i64; 2] = [0, -10];

/// Fit summary for one model against one return series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub kind: ModelKind,
    pub descriptive: Descriptive,
    pub plug_in: ModelParams,
    /// Closed-form moments at the posterior-mean parameters.
    pub model_moments: MomentSet,
    /// Closed-form `corr(r_t, h_{t+k})` at the plug-in, same offsets as
    /// `empirical_leadlag`.
    pub model_leadlag: BTreeMap<i64, f64>,
    pub mean_deviance: f64,
    pub mspe: f64,
    /// Sample correlations against the posterior-mean latent path.
    pub empirical_leadlag: BTreeMap<i64, f64>,
}

/// Assemble a [`GofReport`] for the requested lead-lag offsets.
pub fn gof_report(returns: &[f64], chain: &PosteriorChain, lags: &[i64]) -> Result<GofReport> {
    let descriptive = descriptive_stats(returns)?;
    let plug_in = chain.plug_in()?;
    let k_max = lags.iter().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0);
    let all = empirical_leadlag(returns, &chain.latent_mean.states, k_max)?;
    let profile = moments::leadlag(&plug_in, k_max);
    let empirical_leadlag = lags.iter().map(|&k| (k, all[&k])).collect();
    let model_leadlag = lags.iter().map(|&k| (k, profile.corr_at(k))).collect();
    Ok(GofReport {
        kind: chain.kind,
        descriptive,
        plug_in,
        model_moments: moments::moment_set(&plug_in),
        model_leadlag,
        mean_deviance: mean_deviance(chain, returns)?,
        mspe: mspe(chain, returns)?,
        empirical_leadlag,
    })
}

fn num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e-3 && v.abs() < 1e5 {
        format!("{v:.4}")
    } else {
        format!("{v:.3e}")
    }
}

fn lag_label(k: i64) -> String {
    match k {
        0 => "corr(r_t,h_t)".into(),
        k if k > 0 => format!("corr(r_t,h_t+{k})"),
        k => format!("corr(r_t,h_t{k})"),
    }
}

/// Plain-text table: one column for the data, one per fitted model.
pub fn render_table(data: &Descriptive, reports: &[GofReport], lags: &[i64]) -> String {
    let mut header = vec!["GOF measure".to_string(), "data".to_string()];
    header.extend(reports.iter().map(|r| r.kind.to_string()));
    let mut rows: Vec<Vec<String>> = vec![header];
    let mut push = |label: String, d: String, f: &dyn Fn(&GofReport) -> String| {
        let mut row = vec![label, d];
        row.extend(reports.iter().map(f));
        rows.push(row);
    };
    push("Mean".into(), num(data.mean), &|r| match r.kind {
        ModelKind::Classical => "0".into(),
        ModelKind::Correlated => "--".into(),
        ModelKind::MeanCorrected => num(r.model_moments.mu),
    });
    push("Variance".into(), num(data.variance), &|r| num(r.model_moments.variance));
    push("Skewness".into(), num(data.skewness), &|r| num(r.model_moments.skewness));
    push("Kurtosis".into(), num(data.kurtosis), &|r| num(r.model_moments.kurtosis));
    for &k in lags {
        push(lag_label(k), String::new(), &|r| {
            r.empirical_leadlag.get(&k).map(|v| num(*v)).unwrap_or_default()
        });
    }
    push("Deviance".into(), String::new(), &|r| format!("{:.1}", r.mean_deviance));
    push("MSPE".into(), String::new(), &|r| num(r.mspe));

    let ncol = rows[0].len();
    let widths: Vec<usize> = (0..ncol)
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (s, w))| if c == 0 { format!("{s:<w$}") } else { format!("{s:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        if i == 0 {
            let total = widths.iter().sum::<usize>() + 2 * (ncol - 1);
            let _ = writeln!(out, "{}", "-".repeat(total));
        }
    }
    out
}
