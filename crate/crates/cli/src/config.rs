//! Run configuration: built-in defaults, then an optional TOML file, then
//! command-line flags.
//!
//! ```toml
//! [priors]
//! alpha_mean = 0.0
//! alpha_var = 25.0
//! phi_a = 20.0
//! phi_b = 1.5
//! sigma_sq_shape = 2.5
//! sigma_sq_scale = 0.025
//!
//! [chain]
//! total_iters = 180000
//! burn_in = 30000
//! thin = 50
//! seed = 1
//! adapt_iters = 30000   # defaults to burn_in
//! ```

use std::path::Path;

use corrsv::inference::{ChainConfig, Priors};
use serde::{Deserialize, Serialize};

use crate::args::ChainArgs;
use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileConfig {
    priors: Priors,
    chain: ChainFile,
}

/// Chain settings present in a config file.
#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainFile {
    pub total_iters: Option<usize>,
    pub burn_in: Option<usize>,
    pub thin: Option<usize>,
    pub seed: Option<u64>,
    pub adapt_iters: Option<usize>,
}

/// Resolved fitting configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub priors: Priors,
    pub chain: ChainConfig,
}

pub fn parse_file(text: &str) -> Result<(Priors, ChainFile), CliError> {
    let f: FileConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    Ok((f.priors, f.chain))
}

pub fn resolve(args: &ChainArgs) -> Result<FitConfig, CliError> {
    let (priors, file) = match &args.config {
        Some(path) => parse_file(&read(path)?)?,
        None => (Priors::default(), ChainFile::default()),
    };
    let d = ChainConfig::default();
    let burn_in = args.burn.or(file.burn_in).unwrap_or(d.burn_in);
    let chain = ChainConfig {
        total_iters: args.iters.or(file.total_iters).unwrap_or(d.total_iters),
        burn_in,
        thin: args.thin.or(file.thin).unwrap_or(d.thin),
        seed: args.seed.or(file.seed).unwrap_or(d.seed),
        adapt_iters: file.adapt_iters.unwrap_or(burn_in).min(burn_in),
        keep_latent: true,
    };
    priors.validate()?;
    chain.validate()?;
    Ok(FitConfig { priors, chain })
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
