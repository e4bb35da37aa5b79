//! Closed form vs Monte Carlo agreement over a parameter grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{ModelKind, ModelParams};
use crate::moments;
use crate::simulate::{self, McEstimate};

/// Estimator used for the variance and the third and fourth moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentMethod {
    Plain,
    Tilted,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Draws per estimate.
    pub n: usize,
    /// Draws for the fourth moment when `phi >= persistent_phi`.
    pub n_mu4_persistent: usize,
    pub persistent_phi: f64,
    /// Tolerance in Monte Carlo standard errors.
    pub n_se: f64,
    pub k_max: usize,
    pub seed: u64,
    pub method: MomentMethod,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            n: 1_000_000,
            n_mu4_persistent: 10_000_000,
            persistent_phi: 0.95,
            n_se: 4.0,
            k_max: 3,
            seed: 1,
            method: MomentMethod::Tilted,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyRow {
    pub alpha: f64,
    pub phi: f64,
    pub sigma: f64,
    pub rho: f64,
    pub quantity: String,
    pub closed_form: f64,
    pub mc_value: f64,
    pub std_error: f64,
    pub n: u64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub points: usize,
    pub checks: usize,
    pub failures: usize,
    pub all_pass: bool,
    pub rows: Vec<VerifyRow>,
}

pub const GRID_ALPHA: [f64; 3] = [-8.0, -1.0, 0.0];
pub const GRID_PHI: [f64; 3] = [0.0, 0.5, 0.95];
pub const GRID_SIGMA: [f64; 3] = [0.1, 0.5, 1.0];
pub const GRID_RHO: [f64; 5] = [-0.8, -0.3, 0.0, 0.3, 0.8];

/// The 135-point mean-corrected test grid.
pub fn grid() -> Vec<ModelParams> {
    let mut out = Vec::with_capacity(135);
    for &alpha in &GRID_ALPHA {
        for &phi in &GRID_PHI {
            for &sigma in &GRID_SIGMA {
                for &rho in &GRID_RHO {
                    out.push(
                        ModelParams::new(ModelKind::MeanCorrected, alpha, phi, sigma, rho)
                            .expect("grid points are valid"),
                    );
                }
            }
        }
    }
    out
}

fn point_seed(seed: u64, index: usize, group: u64) -> u64 {
    seed ^ ((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)) ^ (group << 56)
}

/// All agreement checks for one parameter point.
///
/// `params` must be the mean-corrected variant; the `-mu` check runs on the
/// uncorrected twin, whose return mean is `-mu`.
pub fn verify_point(params: &ModelParams, index: usize, cfg: &VerifyConfig) -> Result<Vec<VerifyRow>> {
    let p = params.with_kind(ModelKind::MeanCorrected)?;
    let mut rows = Vec::new();
    let mut push = |quantity: String, closed_form: f64, est: McEstimate| {
        let z = est.z_score(closed_form);
        rows.push(VerifyRow {
            alpha: p.alpha,
            phi: p.phi,
            sigma: p.sigma,
            rho: p.rho,
            quantity,
            closed_form,
            mc_value: est.value,
            std_error: est.std_error,
            n: est.n,
            z,
            pass: z.abs() <= cfg.n_se,
        });
    };

    let uncorrected = p.with_kind(ModelKind::Correlated)?;
    let plain_twin = simulate::mc_moments(&uncorrected, cfg.n, point_seed(cfg.seed, index, 1))?;
    push("neg_mu".into(), -moments::mean_correction(&p), plain_twin.mean);

    let plain = simulate::mc_moments(&p, cfg.n, point_seed(cfg.seed, index, 2))?;
    push("emh_mean".into(), 0.0, plain.mean);

    let m = moments::moment_set(&p);
    let big = p.phi >= cfg.persistent_phi;
    let n4 = if big { cfg.n_mu4_persistent } else { cfg.n };
    let (est, est4) = match cfg.method {
        MomentMethod::Plain => {
            let e4 = if big {
                simulate::mc_moments(&p, n4, point_seed(cfg.seed, index, 3))?
            } else {
                plain
            };
            (plain, e4)
        }
        MomentMethod::Tilted => {
            let e = simulate::mc_moments_tilted(&p, cfg.n, point_seed(cfg.seed, index, 4))?;
            let e4 = if big {
                simulate::mc_moments_tilted(&p, n4, point_seed(cfg.seed, index, 5))?
            } else {
                e
            };
            (e, e4)
        }
    };
    push("variance".into(), m.variance, est.variance);
    push("mu3".into(), m.mu3, est.mu3);
    push("mu4".into(), m.mu4, est4.mu4);

    let profile = moments::leadlag(&p, cfg.k_max);
    let ll = simulate::mc_leadlag(&p, cfg.k_max, cfg.n, point_seed(cfg.seed, index, 6))?;
    let k_max = cfg.k_max as i64;
    for k in -k_max..=k_max {
        let name = match k {
            0 => "sigma_rh".to_string(),
            k if k > 0 => format!("lead_cov_{k}"),
            k => format!("lag_cov_{}", -k),
        };
        push(name, profile.cov_at(k), ll[(k + k_max) as usize]);
    }
    Ok(rows)
}

/// Runs [`verify_point`] over `points`, in parallel across points.
pub fn verify_points(points: &[ModelParams], cfg: &VerifyConfig) -> Result<VerifyReport> {
    let per_point: Vec<Vec<VerifyRow>> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| verify_point(p, i, cfg))
        .collect::<Result<_>>()?;
    let rows: Vec<VerifyRow> = per_point.into_iter().flatten().collect();
    let failures = rows.iter().filter(|r| !r.pass).count();
    Ok(VerifyReport {
        config: cfg.clone(),
        points: points.len(),
        checks: rows.len(),
        failures,
        all_pass: failures == 0,
        rows,
    })
}

pub fn verify_grid(cfg: &VerifyConfig) -> Result<VerifyReport> {
    verify_points(&grid(), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_135_valid_points() {
        let g = grid();
        assert_eq!(g.len(), 135);
        assert!(g.iter().all(|p| p.validate().is_ok()));
    }

    #[test]
    fn single_point_passes_at_modest_n() {
        let p = ModelParams::new(ModelKind::MeanCorrected, 0.0, 0.9, 0.3, -0.5).unwrap();
        let cfg = VerifyConfig {
            n: 200_000,
            n_mu4_persistent: 200_000,
            ..VerifyConfig::default()
        };
        let rows = verify_point(&p, 0, &cfg).unwrap();
        assert_eq!(rows.len(), 5 + 7);
        for r in &rows {
            assert!(r.pass, "{} z = {}", r.quantity, r.z);
        }
    }
}
