//! Sampler behaviour on synthetic data with known parameters.

use corrsv::gof;
use corrsv::inference::{self, ChainConfig, PosteriorChain, Priors};
use corrsv::simulate;
use corrsv::{ModelKind, ModelParams, SimConfig};

fn fit(returns: &[f64], kind: ModelKind, config: &ChainConfig) -> PosteriorChain {
    inference::sample_posterior(returns, kind, &Priors::default(), config).unwrap()
}

fn assert_within_3_sd(chain: &PosteriorChain, truth: &ModelParams) {
    for s in inference::posterior_summary(chain).unwrap() {
        let t = match s.name.as_str() {
            "alpha" => truth.alpha,
            "phi" => truth.phi,
            "sigma" => truth.sigma,
            "rho" => truth.rho,
            other => panic!("unexpected parameter {other}"),
        };
        assert!((s.mean - t).abs() < 3.0 * s.sd, "{}: {} ({}) vs {t}", s.name, s.mean, s.sd);
    }
}

fn assert_rates_in_band(chain: &PosteriorChain) {
    let a = &chain.acceptance_rates;
    let mut rates = vec![("latent", a.latent), ("alpha", a.alpha), ("phi", a.phi), ("sigma", a.sigma)];
    if let Some(r) = a.rho {
        rates.push(("rho", r));
    }
    for (name, r) in rates {
        assert!((0.1..=0.6).contains(&r), "{name} acceptance {r}");
    }
}

#[test]
fn classical_parameters_recovered() {
    let truth = ModelParams::classical(-8.0, 0.95, 0.2).unwrap();
    let data = simulate::simulate_path(&truth, &SimConfig::new(1000, 200)).unwrap();
    let chain = fit(&data.returns, ModelKind::Classical, &ChainConfig::with_lengths(18_000, 3_000, 5, 1));
    assert_eq!(chain.len(), 3_000);
    assert_within_3_sd(&chain, &truth);
    assert_rates_in_band(&chain);
    assert!(chain.mu_draws().iter().all(|&m| m == 0.0));
}

#[test]
fn mean_corrected_fitted_column_recovered() {
    let truth = ModelParams::new(ModelKind::MeanCorrected, -7.88, 0.96, 0.18, 0.105).unwrap();
    let data = simulate::simulate_path(&truth, &SimConfig::new(1008, 201)).unwrap();
    let chain = fit(&data.returns, ModelKind::MeanCorrected, &ChainConfig::with_lengths(18_000, 3_000, 5, 2));
    assert_within_3_sd(&chain, &truth);
    assert_rates_in_band(&chain);

    let d = gof::mean_deviance(&chain, &data.returns).unwrap();
    assert!((d / -5043.0 - 1.0).abs() < 0.05, "mean deviance {d}");
    let h = data.volatility.unwrap();
    let c0 = gof::empirical_leadlag(&data.returns, &h, 0).unwrap()[&0];
    assert!((c0 - 0.028).abs() < 0.1, "contemporaneous corr {c0}");
}

#[test]
fn short_chain_is_reproducible_and_self_consistent() {
    let truth = ModelParams::new(ModelKind::MeanCorrected, -1.0, 0.9, 0.3, -0.4).unwrap();
    let data = simulate::simulate_path(&truth, &SimConfig::new(200, 202)).unwrap();
    let cfg = ChainConfig::with_lengths(1_800, 300, 5, 9);
    let a = fit(&data.returns, ModelKind::MeanCorrected, &cfg);
    let b = fit(&data.returns, ModelKind::MeanCorrected, &cfg);
    assert_eq!(a.len(), 300);
    assert_eq!(a.theta_draws, b.theta_draws);
    assert_eq!(a.deviance_draws, b.deviance_draws);
    assert_eq!(a.h_draws, b.h_draws);

    for ((theta, h), &dev) in a.theta_draws.iter().zip(&a.h_draws).zip(&a.deviance_draws) {
        assert!(theta.validate().is_ok());
        assert_eq!(h.len(), data.returns.len());
        let again = -2.0 * inference::return_log_density(theta, h, &data.returns).unwrap();
        assert_eq!(again, dev);
    }
}
