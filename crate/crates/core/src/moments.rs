//! Closed-form stationary moments of returns and the return/volatility
//! lead-lag covariance profile.
//!
//! With `s2 = sigma^2 / (1 - phi^2)` the stationary variance of `h_t` and
//! `k2 = rho^2 sigma^2`, the central moments of `r_t` are
//!
//! ```text
//! mu   = -(rho sigma / 2) exp(alpha/2 + s2/8)
//! var  = exp(alpha + s2/2) (1 + k2 - k2/4 exp(-s2/4))
//! mu3  = (3 rho sigma / 2) exp(3 alpha/2 + 9 s2/8)
//!          [3 + 9 k2/4 + k2/6 exp(-3 s2/4) - (1 + k2) exp(-s2/2)]
//! mu4  = exp(2 alpha + 2 s2)
//!          [3/2 k2 (1 + k2) exp(-5 s2/4) + (3 + 24 k2 + 16 k2^2)
//!           - 3/16 k2^2 exp(-3 s2/2) - 9 k2 (1 + 3 k2/4) exp(-3 s2/4)]
//! ```
//!
//! `var`, `mu3` and `mu4` are moments about the mean, so they hold for every
//! variant; they coincide with raw moments for the mean-corrected model.
//! Products of exponentials are accumulated in log space and exponentiated
//! once, which keeps `phi` close to one from overflowing intermediate terms.

use serde::{Deserialize, Serialize};

use crate::model::ModelParams;

/// Mean correction, variance, third and fourth central moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub mu: f64,
    pub variance: f64,
    pub mu3: f64,
    pub mu4: f64,
    pub skewness: f64,
    /// Raw (not excess) kurtosis.
    pub kurtosis: f64,
}

/// Covariances and correlations between `r_t` and `h_{t+k}` / `h_{t-k}`.
///
/// `lead_cov[k - 1]` is `cov(r_t, h_{t+k})` and `lag_cov[k - 1]` is
/// `cov(r_t, h_{t-k})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeadLagProfile {
    pub sigma_rh: f64,
    pub corr_rh: f64,
    pub lead_cov: Vec<f64>,
    pub lag_cov: Vec<f64>,
    pub lead_corr: Vec<f64>,
    pub lag_corr: Vec<f64>,
}

impl LeadLagProfile {
    pub fn k_max(&self) -> usize {
        self.lead_cov.len()
    }

    /// Covariance at signed offset `k` (positive = lead, negative = lag).
    pub fn cov_at(&self, k: i64) -> f64 {
        match k {
            0 => self.sigma_rh,
            k if k > 0 => self.lead_cov[k as usize - 1],
            k => self.lag_cov[k.unsigned_abs() as usize - 1],
        }
    }

    /// Correlation at signed offset `k` (positive = lead, negative = lag).
    pub fn corr_at(&self, k: i64) -> f64 {
        match k {
            0 => self.corr_rh,
            k if k > 0 => self.lead_corr[k as usize - 1],
            k => self.lag_corr[k.unsigned_abs() as usize - 1],
        }
    }
}

#[inline]
fn s2(p: &ModelParams) -> f64 {
    p.stationary_variance()
}

/// The constant that makes `E[r_t | F_{t-1}] = 0` under correlated errors.
///
/// Equivalently, minus the mean of `exp(h_t/2) eps_t`.
pub fn mean_correction(p: &ModelParams) -> f64 {
    if p.rho == 0.0 {
        return 0.0;
    }
    -0.5 * p.rho * p.sigma * (0.5 * p.alpha + s2(p) / 8.0).exp()
}

fn ln_variance(p: &ModelParams) -> f64 {
    let s2 = s2(p);
    let k2 = p.rho * p.rho * p.sigma * p.sigma;
    let bracket = 1.0 + k2 - 0.25 * k2 * (-0.25 * s2).exp();
    p.alpha + 0.5 * s2 + bracket.ln()
}

pub fn variance(p: &ModelParams) -> f64 {
    ln_variance(p).exp()
}

/// `ln |mu3|`, or `None` when `rho = 0` and the moment vanishes.
fn ln_abs_third(p: &ModelParams) -> Option<f64> {
    if p.rho == 0.0 {
        return None;
    }
    let s2 = s2(p);
    let k2 = p.rho * p.rho * p.sigma * p.sigma;
    let bracket = 3.0 + 2.25 * k2 + k2 / 6.0 * (-0.75 * s2).exp() - (1.0 + k2) * (-0.5 * s2).exp();
    Some((1.5 * p.rho.abs() * p.sigma).ln() + 1.5 * p.alpha + 9.0 * s2 / 8.0 + bracket.ln())
}

pub fn third_moment(p: &ModelParams) -> f64 {
    match ln_abs_third(p) {
        Some(l) => p.rho.signum() * l.exp(),
        None => 0.0,
    }
}

fn ln_fourth(p: &ModelParams) -> f64 {
    let s2 = s2(p);
    let k2 = p.rho * p.rho * p.sigma * p.sigma;
    let bracket = 1.5 * k2 * (1.0 + k2) * (-1.25 * s2).exp() + (3.0 + 24.0 * k2 + 16.0 * k2 * k2)
        - 3.0 / 16.0 * k2 * k2 * (-1.5 * s2).exp()
        - 9.0 * k2 * (1.0 + 0.75 * k2) * (-0.75 * s2).exp();
    2.0 * p.alpha + 2.0 * s2 + bracket.ln()
}

pub fn fourth_moment(p: &ModelParams) -> f64 {
    ln_fourth(p).exp()
}

pub fn moment_set(p: &ModelParams) -> MomentSet {
    let ln_var = ln_variance(p);
    let ln_mu4 = ln_fourth(p);
    let (mu3, skewness) = match ln_abs_third(p) {
        Some(l) => (
            p.rho.signum() * l.exp(),
            p.rho.signum() * (l - 1.5 * ln_var).exp(),
        ),
        None => (0.0, 0.0),
    };
    MomentSet {
        mu: mean_correction(p),
        variance: ln_var.exp(),
        mu3,
        mu4: ln_mu4.exp(),
        skewness,
        kurtosis: (ln_mu4 - 2.0 * ln_var).exp(),
    }
}

/// Contemporaneous covariance `cov(r_t, h_t)`.
pub fn sigma_rh(p: &ModelParams) -> f64 {
    if p.rho == 0.0 {
        return 0.0;
    }
    let s2 = s2(p);
    p.rho * p.sigma * (0.5 * p.alpha + s2 / 8.0).exp() * (1.0 + 0.25 * s2)
}

/// Lead-lag profile for offsets `1..=k_max`.
///
/// Leads decay as `phi^k`; lags carry the extra factor `c / (1 + c)` with
/// `c = s2 / 4`.
pub fn leadlag(p: &ModelParams, k_max: usize) -> LeadLagProfile {
    let s2 = s2(p);
    let c = 0.25 * s2;
    let lag_factor = c / (1.0 + c);
    let srh = sigma_rh(p);
    let scale = (variance(p) * s2).sqrt();

    let mut lead_cov = Vec::with_capacity(k_max);
    let mut lag_cov = Vec::with_capacity(k_max);
    let mut phik = 1.0;
    for _ in 0..k_max {
        phik *= p.phi;
        lead_cov.push(phik * srh);
        lag_cov.push(phik * srh * lag_factor);
    }
    LeadLagProfile {
        sigma_rh: srh,
        corr_rh: srh / scale,
        lead_corr: lead_cov.iter().map(|v| v / scale).collect(),
        lag_corr: lag_cov.iter().map(|v| v / scale).collect(),
        lead_cov,
        lag_cov,
    }
}
