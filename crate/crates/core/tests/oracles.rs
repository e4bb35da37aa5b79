//! Closed forms and estimators against independent Monte Carlo or
//! sampling-distribution oracles.

use corrsv::gof;
use corrsv::moments;
use corrsv::simulate::{self, substream, Init};
use corrsv::{ModelKind, ModelParams, SimConfig};
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};

const N_SE: f64 = 4.0;

fn mc(alpha: f64, phi: f64, sigma: f64, rho: f64) -> ModelParams {
    ModelParams::new(ModelKind::MeanCorrected, alpha, phi, sigma, rho).unwrap()
}

fn twin(p: &ModelParams) -> ModelParams {
    p.with_kind(ModelKind::Correlated).unwrap()
}

#[test]
fn mean_correction_near_unit_correlation() {
    let p = mc(0.0, 0.0, 1.0, 1.0 - 1e-12);
    let mu = moments::mean_correction(&p);
    assert!((mu + 0.5 * (0.125f64).exp()).abs() < 1e-9);
    assert!((mu + 0.56657).abs() < 1e-5);
    // -E[e^{h/2} eps] is the mean of the uncorrected twin, negated.
    let est = simulate::mc_moments(&twin(&p), 1_000_000, 31).unwrap();
    assert!(est.mean.agrees_with(-mu, N_SE), "z = {}", est.mean.z_score(-mu));
}

#[test]
fn fitted_column_mean_correction_matches_oracle() {
    let p = mc(-7.88, 0.96, 0.18, 0.105);
    let mu = moments::mean_correction(&p);
    assert!(mu < 0.0 && mu.abs() > 1e-5 && mu.abs() < 1e-3);
    let est = simulate::mc_moments(&twin(&p), 10_000_000, 32).unwrap();
    assert!(est.mean.agrees_with(-mu, N_SE), "z = {}", est.mean.z_score(-mu));
    assert!(est.mean.z_score(0.0).abs() > N_SE);
}

#[test]
fn third_moment_negative_and_matches_oracle() {
    let p = mc(0.0, 0.5, 0.4, -0.6);
    let m3 = moments::third_moment(&p);
    assert!(m3 < 0.0);
    let est = simulate::mc_moments(&p, 10_000_000, 33).unwrap();
    assert!(est.mu3.agrees_with(m3, N_SE), "z = {}", est.mu3.z_score(m3));
}

#[test]
fn gaussian_mixture_variance_and_fourth_moment() {
    let p = mc(0.0, 0.0, 1.0, 0.0);
    let v = simulate::mc_moments(&p, 1_000_000, 34).unwrap();
    assert!(v.variance.agrees_with(0.5f64.exp(), N_SE));
    assert!((moments::variance(&p) - 1.64872).abs() < 1e-5);
    let big = simulate::mc_moments(&p, 10_000_000, 35).unwrap();
    let m4 = 3.0 * 2.0f64.exp();
    assert!(big.mu4.agrees_with(m4, N_SE), "z = {}", big.mu4.z_score(m4));
}

#[test]
fn persistent_twin_mean_is_negated_correction() {
    let p = mc(0.0, 0.9, 0.3, -0.5);
    let est = simulate::mc_moments(&twin(&p), 1_000_000, 36).unwrap();
    let mu = moments::mean_correction(&p);
    assert!(est.mean.agrees_with(-mu, N_SE), "z = {}", est.mean.z_score(-mu));
}

/// Mean and standard error of all returns across `paths` independent paths.
fn pooled_path_mean(p: &ModelParams, paths: u64, horizon: usize) -> (f64, f64) {
    let (mut n, mut s, mut ss) = (0.0, 0.0, 0.0);
    for seed in 0..paths {
        let pair = simulate::simulate_path(p, &SimConfig::new(horizon, 500 + seed)).unwrap();
        for r in pair.returns {
            n += 1.0;
            s += r;
            ss += r * r;
        }
    }
    let mean = s / n;
    let var = ss / n - mean * mean;
    (mean, (var / n).sqrt())
}

#[test]
fn simulated_paths_have_zero_mean_only_when_corrected() {
    let p = mc(0.0, 0.0, 1.0, 0.8);
    let (m, se) = pooled_path_mean(&p, 100, 100_000);
    assert!(m.abs() < N_SE * se, "corrected mean {m} se {se}");
    let (m, se) = pooled_path_mean(&twin(&p), 100, 100_000);
    let target = 0.4 * 0.125f64.exp();
    assert!((m - target).abs() < N_SE * se, "uncorrected mean {m} vs {target}, se {se}");
}

#[test]
fn stationary_start_has_no_transient() {
    let p = mc(-1.0, 0.95, 0.4, 0.3);
    let cfg = SimConfig { n_paths: 20_000, horizon: 25, seed: 37, init: Init::Stationary };
    let paths = simulate::simulate_paths(&p, &cfg).unwrap();
    let s2 = p.stationary_variance();
    let n = paths.len() as f64;
    for t in [0, 9, 24] {
        let hs: Vec<f64> = paths.iter().map(|q| q.volatility.as_ref().unwrap()[t]).collect();
        let mean = hs.iter().sum::<f64>() / n;
        let var = hs.iter().map(|h| (h - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((mean - p.alpha).abs() < N_SE * (s2 / n).sqrt(), "t={t} mean {mean}");
        assert!((var - s2).abs() < N_SE * s2 * (2.0 / n).sqrt(), "t={t} var {var}");
    }
}

#[test]
fn leadlag_oracle_at_persistent_point() {
    let p = mc(0.0, 0.9, 0.3, 0.5);
    let profile = moments::leadlag(&p, 1);
    let est = simulate::mc_leadlag(&p, 1, 1_000_000, 38).unwrap();
    // Index 0 is offset -1 (lag), 1 is contemporaneous, 2 is offset +1 (lead).
    for (i, k) in [-1i64, 0, 1].into_iter().enumerate() {
        let target = profile.cov_at(k);
        assert!(est[i].agrees_with(target, N_SE), "k={k} z={}", est[i].z_score(target));
    }
    let c = p.stationary_variance() / 4.0;
    assert!((profile.lag_cov[0] / profile.lead_cov[0] - c / (1.0 + c)).abs() < 1e-14);
}

#[test]
fn leadlag_oracle_vanishes_without_correlation() {
    let p = mc(-1.0, 0.9, 0.3, 0.0);
    for e in simulate::mc_leadlag(&p, 3, 200_000, 39).unwrap() {
        assert!(e.agrees_with(0.0, N_SE));
    }
}

#[test]
fn leadlag_ratio_at_fitted_column() {
    let p = mc(-7.88, 0.96, 0.18, 0.105);
    let profile = moments::leadlag(&p, 3);
    let est = simulate::mc_leadlag(&p, 3, 1_000_000, 40).unwrap();
    for k in 1..=3i64 {
        for off in [k, -k] {
            let got = est[(off + 3) as usize];
            assert!(got.agrees_with(profile.cov_at(off), N_SE), "offset {off}");
        }
    }
    assert!((profile.corr_rh / 0.0276 - 1.0).abs() < 0.2);
}

#[test]
fn descriptive_stats_of_standard_normal_sample() {
    let mut rng = substream(41, 0);
    let n = 1_000_000;
    let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let d = gof::descriptive_stats(&x).unwrap();
    let nf = n as f64;
    assert!(d.mean.abs() < N_SE / nf.sqrt());
    assert!((d.variance - 1.0).abs() < N_SE * (2.0 / nf).sqrt());
    assert!(d.skewness.abs() < N_SE * (6.0 / nf).sqrt());
    assert!((d.kurtosis - 3.0).abs() < N_SE * (24.0 / nf).sqrt());
}

#[test]
fn empirical_leadlag_null() {
    let p = mc(0.0, 0.9, 0.3, 0.5);
    let pair = simulate::simulate_path(&p, &SimConfig::new(100_000, 42)).unwrap();
    let mut h = pair.volatility.unwrap();
    h.shuffle(&mut substream(42, 1));
    let n = pair.returns.len() as f64;
    for (k, c) in gof::empirical_leadlag(&pair.returns, &h, 5).unwrap() {
        assert!(c.abs() < N_SE / n.sqrt(), "k={k} corr={c}");
    }
}

#[test]
fn empirical_leadlag_matches_closed_form() {
    let p = mc(0.0, 0.9, 0.3, 0.5);
    let k_max = 3;
    let profile = moments::leadlag(&p, k_max);
    let pair = simulate::simulate_path(&p, &SimConfig::new(1_000_000, 43)).unwrap();
    let h = pair.volatility.unwrap();
    let full = gof::empirical_leadlag(&pair.returns, &h, k_max).unwrap();
    // Batch means give a standard error that accounts for the persistence of h.
    let batches = 100;
    let len = pair.returns.len() / batches;
    let per_batch: Vec<_> = (0..batches)
        .map(|b| gof::empirical_leadlag(&pair.returns[b * len..(b + 1) * len], &h[b * len..(b + 1) * len], k_max).unwrap())
        .collect();
    for (&k, &c) in &full {
        let xs: Vec<f64> = per_batch.iter().map(|m| m[&k]).collect();
        let m = xs.iter().sum::<f64>() / batches as f64;
        let sd = (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (batches as f64 - 1.0)).sqrt();
        let se = sd / (batches as f64).sqrt();
        let target = profile.corr_at(k);
        assert!((c - target).abs() < N_SE * se, "k={k}: {c} vs {target}, se {se}");
    }
}
