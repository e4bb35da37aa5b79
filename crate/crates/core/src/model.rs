//! Model variants, parameter validation and the one-step conditional laws
//! shared by the simulator and the sampler.
//!
//! All three variants share the log-volatility recursion
//!
//! ```text
//! h_t = alpha + phi (h_{t-1} - alpha) + sigma eta_t
//! r_t = mu + exp(h_t / 2) eps_t,     corr(eps_t, eta_t) = rho
//! ```
//!
//! and differ only in which of `rho` and `mu` are free:
//!
//! | kind            | rho       | mu                         |
//! |-----------------|-----------|----------------------------|
//! | `Classical`     | 0         | 0                          |
//! | `Correlated`    | (-1, 1)   | 0                          |
//! | `MeanCorrected` | (-1, 1)   | [`crate::moments::mean_correction`] |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Uncorrelated errors.
    #[serde(rename = "svm0")]
    Classical,
    /// Correlated errors without a mean term.
    #[serde(rename = "svmrho")]
    Correlated,
    /// Correlated errors with the zero-conditional-mean correction.
    #[serde(rename = "svmrhomu")]
    MeanCorrected,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [
        ModelKind::Classical,
        ModelKind::Correlated,
        ModelKind::MeanCorrected,
    ];

    /// Short command-line name.
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Classical => "svm0",
            ModelKind::Correlated => "svmrho",
            ModelKind::MeanCorrected => "svmrhomu",
        }
    }

    pub fn has_correlation(self) -> bool {
        !matches!(self, ModelKind::Classical)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "svm0" | "classical" => Ok(ModelKind::Classical),
            "svmrho" | "correlated" => Ok(ModelKind::Correlated),
            "svmrhomu" | "meancorrected" | "mean-corrected" => Ok(ModelKind::MeanCorrected),
            other => Err(Error::Config(format!("unknown model kind `{other}`"))),
        }
    }
}

/// Parameter vector `(alpha, phi, sigma, rho)` tagged with its model variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Long-run mean of the log-variance.
    pub alpha: f64,
    /// AR(1) persistence of the log-variance.
    pub phi: f64,
    /// Volatility of the log-variance.
    pub sigma: f64,
    /// Correlation between return and volatility innovations.
    pub rho: f64,
    pub kind: ModelKind,
}

impl ModelParams {
    /// Builds and validates a parameter set.
    pub fn new(kind: ModelKind, alpha: f64, phi: f64, sigma: f64, rho: f64) -> Result<Self> {
        ModelParams {
            alpha,
            phi,
            sigma,
            rho,
            kind,
        }
        .validate()
    }

    pub fn classical(alpha: f64, phi: f64, sigma: f64) -> Result<Self> {
        Self::new(ModelKind::Classical, alpha, phi, sigma, 0.0)
    }

    /// Returns `self` unchanged when every invariant holds.
    ///
    /// `|phi| = 1` is rejected: the stationary variance `sigma^2 / (1 - phi^2)`
    /// appears in every closed form.
    pub fn validate(self) -> Result<Self> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("phi", self.phi),
            ("sigma", self.sigma),
            ("rho", self.rho),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFiniteParameter(name));
            }
        }
        if self.phi.abs() >= 1.0 {
            return Err(Error::StationarityViolation(self.phi));
        }
        if self.sigma <= 0.0 {
            return Err(Error::NonPositiveSigma(self.sigma));
        }
        if self.rho.abs() >= 1.0 {
            return Err(Error::CorrelationOutOfRange(self.rho));
        }
        if self.kind == ModelKind::Classical && self.rho != 0.0 {
            return Err(Error::KindConstraintViolation {
                kind: "svm0",
                detail: format!("rho = {} (must be 0)", self.rho),
            });
        }
        Ok(self)
    }

    /// Same parameters under a different variant, revalidated.
    pub fn with_kind(self, kind: ModelKind) -> Result<Self> {
        ModelParams { kind, ..self }.validate()
    }

    /// Stationary variance of `h_t`, `sigma^2 / (1 - phi^2)`.
    pub fn stationary_variance(&self) -> f64 {
        self.sigma * self.sigma / (1.0 - self.phi * self.phi)
    }

    /// The constant `mu` entering the return equation for this variant.
    pub fn mean_term(&self) -> f64 {
        match self.kind {
            ModelKind::MeanCorrected => moments::mean_correction(self),
            ModelKind::Classical | ModelKind::Correlated => 0.0,
        }
    }

    /// Standardized volatility innovation `eta_t` implied by a transition.
    #[inline]
    pub fn innovation(&self, h_t: f64, h_prev: f64) -> f64 {
        (h_t - self.alpha - self.phi * (h_prev - self.alpha)) / self.sigma
    }

    /// Conditional law of `r_t` given `(h_t, h_{t-1})`: `(mean, variance)`.
    pub fn return_conditional(&self, h_t: f64, h_prev: f64) -> (f64, f64) {
        self.return_conditional_with_mean(self.mean_term(), h_t, h_prev)
    }

    /// [`Self::return_conditional`] with `mu` supplied by the caller, so hot
    /// loops evaluate it once per parameter set.
    #[inline]
    pub fn return_conditional_with_mean(&self, mu: f64, h_t: f64, h_prev: f64) -> (f64, f64) {
        match self.kind {
            ModelKind::Classical => (0.0, h_t.exp()),
            ModelKind::Correlated | ModelKind::MeanCorrected => {
                let scale = (0.5 * h_t).exp();
                let mean = mu + self.rho * scale * self.innovation(h_t, h_prev);
                (mean, h_t.exp() * (1.0 - self.rho * self.rho))
            }
        }
    }

    /// Conditional law of `h_t` given `h_{t-1}`: `(mean, variance)`.
    #[inline]
    pub fn volatility_conditional(&self, h_prev: f64) -> (f64, f64) {
        (
            self.alpha + self.phi * (h_prev - self.alpha),
            self.sigma * self.sigma,
        )
    }
}

/// Latent log-variance path `h_0, h_1, ..., h_T`.
///
/// `h_0` is the pre-sample state; `states[t - 1]` is `h_t` and pairs with the
/// return `r_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentPath {
    pub initial: f64,
    pub states: Vec<f64>,
}

impl LatentPath {
    pub fn new(initial: f64, states: Vec<f64>) -> Self {
        LatentPath { initial, states }
    }

    pub fn constant(value: f64, len: usize) -> Self {
        LatentPath {
            initial: value,
            states: vec![value; len],
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `h_{t-1}` for the 0-based return index `i` (i.e. `t = i + 1`).
    #[inline]
    pub fn previous(&self, i: usize) -> f64 {
        if i == 0 {
            self.initial
        } else {
            self.states[i - 1]
        }
    }
}

/// Aligned returns with an optional latent path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPair {
    pub returns: Vec<f64>,
    pub volatility: Option<Vec<f64>>,
    /// `h_0` used to start the recursion.
    pub t0_state: f64,
}

impl SeriesPair {
    /// Observed returns without a latent path.
    pub fn observed(returns: Vec<f64>) -> Result<Self> {
        let pair = SeriesPair {
            returns,
            volatility: None,
            t0_state: 0.0,
        };
        pair.check()?;
        Ok(pair)
    }

    pub fn check(&self) -> Result<()> {
        if self.returns.iter().any(|r| !r.is_finite()) {
            return Err(Error::NonFiniteLikelihood("returns"));
        }
        if let Some(h) = &self.volatility {
            if h.len() != self.returns.len() {
                return Err(Error::LengthMismatch {
                    what: "volatility",
                    got: h.len(),
                    expected: self.returns.len(),
                });
            }
            if h.iter().any(|v| !v.is_finite()) || !self.t0_state.is_finite() {
                return Err(Error::NonFiniteLikelihood("volatility"));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    pub fn latent(&self) -> Option<LatentPath> {
        self.volatility
            .as_ref()
            .map(|h| LatentPath::new(self.t0_state, h.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_accepts_fitted_mean_corrected() {
        let p = ModelParams::new(ModelKind::MeanCorrected, -7.88, 0.96, 0.18, 0.105);
        assert!(p.is_ok());
    }

    #[test]
    fn validate_rejects_unit_root() {
        assert_eq!(
            ModelParams::classical(0.0, 1.0, 1.0),
            Err(Error::StationarityViolation(1.0))
        );
        assert!(matches!(
            ModelParams::classical(0.0, -1.2, 1.0),
            Err(Error::StationarityViolation(_))
        ));
    }

    #[test]
    fn validate_rejects_bad_sigma_and_rho() {
        assert!(matches!(
            ModelParams::classical(0.0, 0.5, 0.0),
            Err(Error::NonPositiveSigma(_))
        ));
        assert!(matches!(
            ModelParams::new(ModelKind::Correlated, 0.0, 0.5, 1.0, 1.0),
            Err(Error::CorrelationOutOfRange(_))
        ));
        assert!(matches!(
            ModelParams::new(ModelKind::Classical, 0.0, 0.5, 1.0, 0.3),
            Err(Error::KindConstraintViolation { .. })
        ));
        assert!(matches!(
            ModelParams::new(ModelKind::Classical, f64::NAN, 0.5, 1.0, 0.0),
            Err(Error::NonFiniteParameter("alpha"))
        ));
    }

    #[test]
    fn classical_return_conditional() {
        let p = ModelParams::classical(0.3, 0.7, 0.4).unwrap();
        let (m, v) = p.return_conditional(-7.0, 12.0);
        assert_eq!(m, 0.0);
        assert_eq!(v, (-7.0f64).exp());
    }

    #[test]
    fn correlated_return_conditional_at_conditional_mean() {
        let p = ModelParams::new(ModelKind::Correlated, 0.0, 0.0, 1.0, 0.5).unwrap();
        let (m, v) = p.return_conditional(0.0, 0.0);
        assert_eq!(m, 0.0);
        assert_eq!(v, 0.75);
    }

    #[test]
    fn mean_corrected_return_conditional_at_fixed_point() {
        let p = ModelParams::new(ModelKind::MeanCorrected, -7.88, 0.96, 0.18, 0.105).unwrap();
        let (m, v) = p.return_conditional(-7.88, -7.88);
        let mu = -(0.105 * 0.18 / 2.0) * (-7.88f64 / 2.0 + 0.18f64.powi(2) / (8.0 * (1.0 - 0.96f64.powi(2)))).exp();
        assert!((m - mu).abs() <= 1e-15 * mu.abs());
        assert!(m < 0.0);
        assert_eq!(v, (-7.88f64).exp() * (1.0 - 0.105 * 0.105));
    }

    #[test]
    fn volatility_conditional_examples() {
        let p = ModelParams::classical(0.0, 0.9, 0.3).unwrap();
        let (m, v) = p.volatility_conditional(1.0);
        assert!((m - 0.9).abs() < 1e-15);
        assert!((v - 0.09).abs() < 1e-15);

        let p = ModelParams::classical(-7.88, 0.96, 0.18).unwrap();
        let (m, v) = p.volatility_conditional(-7.88);
        assert_eq!(m, -7.88);
        assert!((v - 0.0324).abs() < 1e-15);

        let p = ModelParams::classical(2.0, 0.0, 1.0).unwrap();
        assert_eq!(p.volatility_conditional(100.0), (2.0, 1.0));
    }

    #[test]
    fn kind_parsing_round_trips() {
        for k in ModelKind::ALL {
            assert_eq!(k.as_str().parse::<ModelKind>().unwrap(), k);
        }
        assert!("garch".parse::<ModelKind>().is_err());
    }

    #[test]
    fn series_pair_length_check() {
        let s = SeriesPair {
            returns: vec![0.0; 3],
            volatility: Some(vec![0.0; 2]),
            t0_state: 0.0,
        };
        assert!(matches!(s.check(), Err(Error::LengthMismatch { .. })));
        assert!(SeriesPair::observed(vec![0.1, f64::INFINITY]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn params(kind: ModelKind) -> impl Strategy<Value = ModelParams> {
            (-10.0..2.0f64, -0.99..0.99f64, 0.01..2.0f64, -0.99..0.99f64).prop_map(
                move |(alpha, phi, sigma, rho)| {
                    let rho = if kind == ModelKind::Classical { 0.0 } else { rho };
                    ModelParams::new(kind, alpha, phi, sigma, rho).unwrap()
                },
            )
        }

        proptest! {
            #[test]
            fn conditional_variances_exact(p in params(ModelKind::MeanCorrected), h in -12.0..3.0f64, hp in -12.0..3.0f64) {
                let (_, v) = p.return_conditional(h, hp);
                prop_assert_eq!(v, h.exp() * (1.0 - p.rho * p.rho));
                prop_assert_eq!(p.volatility_conditional(hp).1, p.sigma * p.sigma);
            }

            #[test]
            fn correlated_mean_linear_in_innovation(p in params(ModelKind::Correlated), h in -12.0..3.0f64, hp in -12.0..3.0f64) {
                let (m, _) = p.return_conditional(h, hp);
                let slope = p.rho * (0.5 * h).exp();
                let z = (h - p.alpha - p.phi * (hp - p.alpha)) / p.sigma;
                prop_assert!((m - slope * z).abs() <= 1e-12 * (1.0 + (slope * z).abs()));
            }

            #[test]
            fn correlated_matches_classical_at_zero_rho(p in params(ModelKind::Classical), h in -12.0..3.0f64, hp in -12.0..3.0f64) {
                let c = p.with_kind(ModelKind::Correlated).unwrap();
                prop_assert_eq!(c.return_conditional(h, hp), p.return_conditional(h, hp));
            }
        }
    }
}
