//! Stochastic volatility with correlated return/volatility errors and the
//! zero-conditional-mean correction.
//!
//! * [`model`] - model variants, parameter validation, conditional laws
//! * [`moments`] - closed-form moments and lead-lag profile
//! * [`simulate`] - exact simulation and Monte Carlo oracles
//! * [`inference`] - Metropolis-within-Gibbs posterior sampling
//! * [`gof`] - descriptive statistics, deviance, MSPE, empirical lead-lag
//! * [`data`] - CSV ingestion and output
//! * [`verify`] - closed form vs Monte Carlo agreement tables

pub mod data;
pub mod error;
pub mod gof;
pub mod inference;
pub mod model;
pub mod moments;
pub mod simulate;
pub mod verify;

pub use error::{Error, Result};
pub use model::{LatentPath, ModelKind, ModelParams, SeriesPair};
pub use moments::{LeadLagProfile, MomentSet};
pub use simulate::{McEstimate, SimConfig};
