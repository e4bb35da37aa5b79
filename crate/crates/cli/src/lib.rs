//! Command implementations behind the `corrsv` binary.

pub mod args;
pub mod config;
pub mod manifest;
pub mod tables;

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use corrsv::data::{self, InputMode};
use corrsv::gof::{self, GofReport};
use corrsv::inference::{self, AcceptanceRates, ParamSummary, PosteriorChain};
use corrsv::simulate::{self, Init};
use corrsv::verify::{self, MomentMethod, VerifyConfig};
use corrsv::{moments, ModelKind, ModelParams, SimConfig};
use serde::{Deserialize, Serialize};

pub use crate::args::Cli;
use crate::args::{Command, Common, InputArgs, ParamArgs};
use crate::config::FitConfig;
use crate::manifest::{InputDigest, RunManifest, MANIFEST_FILE};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] corrsv::Error),
    #[error("io: {0}")]
    Io(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// What a successful run produced. `passed` is false only when `verify`
/// found disagreements.
#[derive(Debug)]
pub struct Outcome {
    pub out_dir: PathBuf,
    pub outputs: Vec<String>,
    pub passed: bool,
}

/// Collects outputs for one command and writes the manifest at the end.
struct Run {
    dir: PathBuf,
    command: &'static str,
    started_at: String,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
}

impl Run {
    fn start(command: &'static str, common: &Common) -> Result<Self, CliError> {
        if let Some(n) = common.threads {
            // A second call in the same process keeps the first pool.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
        fs::create_dir_all(&common.out)?;
        Ok(Run {
            dir: common.out.clone(),
            command,
            started_at: manifest::now(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        })
    }

    fn input(&mut self, path: &Path) -> Result<(), CliError> {
        self.inputs.push(manifest::digest(path)?);
        Ok(())
    }

    fn file(&mut self, name: &str) -> Result<BufWriter<fs::File>, CliError> {
        self.outputs.push(name.to_string());
        Ok(BufWriter::new(fs::File::create(self.dir.join(name))?))
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.outputs.push(name.to_string());
        fs::write(self.dir.join(name), text)?;
        Ok(())
    }

    fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        self.outputs.push(name.to_string());
        fs::write(self.dir.join(name), body)?;
        Ok(())
    }

    fn finish<C: Serialize>(mut self, seed: Option<u64>, config: &C, passed: bool) -> Result<Outcome, CliError> {
        let m = RunManifest {
            command: self.command.to_string(),
            argv: std::env::args().collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config: serde_json::to_value(config)?,
            inputs: std::mem::take(&mut self.inputs),
            outputs: self.outputs.clone(),
            started_at: self.started_at.clone(),
            finished_at: manifest::now(),
        };
        self.json(MANIFEST_FILE, &m)?;
        self.outputs.pop();
        Ok(Outcome {
            out_dir: self.dir,
            outputs: self.outputs,
            passed,
        })
    }
}

fn params(a: &ParamArgs) -> Result<ModelParams, CliError> {
    let kind = ModelKind::from(a.model);
    let rho = if kind == ModelKind::Classical { 0.0 } else { a.rho };
    Ok(ModelParams::new(kind, a.alpha, a.phi, a.sigma, rho)?)
}

fn load_returns(run: &mut Run, input: &InputArgs) -> Result<Vec<f64>, CliError> {
    run.input(&input.input)?;
    Ok(data::ingest(&input.input, InputMode::from(input.mode))?.returns)
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Simulate(a) => simulate_cmd(a),
        Command::Moments(a) => moments_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Fit(a) => fit_cmd(a),
        Command::Gof(a) => gof_cmd(a),
        Command::Report(a) => report_cmd(a),
    }
}

#[derive(Serialize)]
struct SimulateSnapshot {
    params: ModelParams,
    sim: SimConfig,
}

fn simulate_cmd(a: args::SimulateArgs) -> Result<Outcome, CliError> {
    let mut run = Run::start("simulate", &a.common)?;
    let p = params(&a.params)?;
    let sim = SimConfig {
        n_paths: a.n_paths,
        horizon: a.horizon,
        seed: a.seed,
        init: a.h0.map_or(Init::Stationary, Init::Fixed),
    };
    let paths = simulate::simulate_paths(&p, &sim)?;
    for (i, pair) in paths.iter().enumerate() {
        let name = if paths.len() == 1 { "path.csv".to_string() } else { format!("path_{i:04}.csv") };
        data::write_path_csv(run.file(&name)?, pair)?;
    }
    run.finish(Some(a.seed), &SimulateSnapshot { params: p, sim }, true)
}

#[derive(Serialize)]
struct MomentsOutput {
    params: ModelParams,
    moments: corrsv::MomentSet,
    leadlag: corrsv::LeadLagProfile,
}

fn moments_cmd(a: args::MomentsArgs) -> Result<Outcome, CliError> {
    let mut run = Run::start("moments", &a.common)?;
    let p = params(&a.params)?;
    let out = MomentsOutput {
        params: p,
        moments: moments::moment_set(&p),
        leadlag: moments::leadlag(&p, a.k_max),
    };
    run.json("moments.json", &out)?;
    run.finish(None, &serde_json::json!({ "params": p, "k_max": a.k_max }), true)
}

fn verify_cmd(a: args::VerifyArgs) -> Result<Outcome, CliError> {
    let mut run = Run::start("verify", &a.common)?;
    let cfg = VerifyConfig {
        n: a.n,
        n_mu4_persistent: a.n_mu4,
        n_se: a.n_se,
        seed: a.seed,
        method: if a.plain { MomentMethod::Plain } else { MomentMethod::Tilted },
        ..VerifyConfig::default()
    };
    let mut points = verify::grid();
    if let Some(n) = a.limit {
        points.truncate(n);
    }
    let report = verify::verify_points(&points, &cfg)?;
    run.json("verify.json", &report)?;
    let passed = report.all_pass;
    eprintln!("verify: {} checks, {} failures", report.checks, report.failures);
    run.finish(Some(a.seed), &cfg, passed)
}

/// Contents of `summary.json` written by `fit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub kind: ModelKind,
    pub seed: u64,
    pub observations: usize,
    pub retained: usize,
    pub config: FitConfig,
    pub posterior: Vec<ParamSummary>,
    /// Posterior mean and SD of the mean-correction term.
    pub mu: ParamSummary,
    pub acceptance_rates: AcceptanceRates,
    pub mean_deviance: f64,
}

pub const CHAIN_FILE: &str = "chain.csv";
pub const LATENT_FILE: &str = "latent_mean.csv";
pub const SUMMARY_FILE: &str = "summary.json";

fn mu_summary(chain: &PosteriorChain) -> ParamSummary {
    let mu = chain.mu_draws();
    let n = mu.len() as f64;
    let mean = mu.iter().sum::<f64>() / n;
    let var = if mu.len() > 1 {
        mu.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    ParamSummary { name: "mu".into(), mean, sd: var.sqrt() }
}

fn fit_cmd(a: args::FitArgs) -> Result<Outcome, CliError> {
    let mut run = Run::start("fit", &a.common)?;
    let cfg = config::resolve(&a.chain)?;
    let returns = load_returns(&mut run, &a.input)?;
    let kind = ModelKind::from(a.model);
    let chain = inference::sample_posterior(&returns, kind, &cfg.priors, &cfg.chain)?;
    data::write_chain_csv(run.file(CHAIN_FILE)?, &chain)?;
    data::write_latent_csv(run.file(LATENT_FILE)?, &chain.latent_mean)?;
    let summary = FitSummary {
        kind,
        seed: cfg.chain.seed,
        observations: returns.len(),
        retained: chain.len(),
        config: cfg,
        posterior: inference::posterior_summary(&chain)?,
        mu: mu_summary(&chain),
        acceptance_rates: chain.acceptance_rates,
        mean_deviance: gof::mean_deviance(&chain, &returns)?,
    };
    run.json(SUMMARY_FILE, &summary)?;
    run.finish(Some(cfg.chain.seed), &serde_json::json!({ "model": kind, "priors": cfg.priors, "chain": cfg.chain }), true)
}

/// A fit directory read back from disk.
pub struct LoadedFit {
    pub dir: PathBuf,
    pub summary: FitSummary,
    pub chain: PosteriorChain,
}

pub fn load_fit(dir: &Path) -> Result<LoadedFit, CliError> {
    let open = |name: &str| {
        let p = dir.join(name);
        fs::File::open(&p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
    };
    let summary: FitSummary = serde_json::from_reader(open(SUMMARY_FILE)?)?;
    let chain = data::read_chain(summary.kind, open(CHAIN_FILE)?, open(LATENT_FILE)?)?;
    Ok(LoadedFit { dir: dir.to_path_buf(), summary, chain })
}

fn fit_report(fit: &LoadedFit, returns: &[f64], lags: &[i64]) -> Result<GofReport, CliError> {
    if fit.summary.observations != returns.len() {
        return Err(CliError::Usage(format!(
            "fit in {} used {} observations but the input has {}",
            fit.dir.display(),
            fit.summary.observations,
            returns.len()
        )));
    }
    Ok(gof::gof_report(returns, &fit.chain, lags)?)
}

fn gof_cmd(a: args::GofArgs) -> Result<Outcome, CliError> {
    let mut run = Run::start("gof", &a.common)?;
    let returns = load_returns(&mut run, &a.input)?;
    let fit = load_fit(&a.fit)?;
    for f in [CHAIN_FILE, LATENT_FILE, SUMMARY_FILE] {
        run.input(&a.fit.join(f))?;
    }
    let report = fit_report(&fit, &returns, &a.lags)?;
    run.json("gof.json", &report)?;
    run.text("gof.txt", &gof::render_table(&report.descriptive, std::slice::from_ref(&report), &a.lags))?;
    run.finish(None, &serde_json::json!({ "lags": a.lags }), true)
}

#[derive(Serialize)]
struct ReportOutput {
    data: gof::Descriptive,
    posterior: Vec<tables::PosteriorColumn>,
    gof: Vec<GofReport>,
}

fn report_cmd(a: args::ReportArgs) -> Result<Outcome, CliError> {
    if a.fits.len() > 3 {
        return Err(CliError::Usage("report takes at most three fits".into()));
    }
    let mut run = Run::start("report", &a.common)?;
    let returns = load_returns(&mut run, &a.input)?;
    let mut fits = Vec::new();
    for dir in &a.fits {
        fits.push(load_fit(dir)?);
        for f in [CHAIN_FILE, LATENT_FILE, SUMMARY_FILE] {
            run.input(&dir.join(f))?;
        }
    }
    let reports = fits
        .iter()
        .map(|f| fit_report(f, &returns, &a.lags))
        .collect::<Result<Vec<_>, _>>()?;
    let data = gof::descriptive_stats(&returns)?;
    let posterior: Vec<tables::PosteriorColumn> = fits.iter().map(|f| tables::PosteriorColumn::from(&f.summary)).collect();
    let text = format!(
        "Posterior means (posterior SDs)\n\n{}\nGoodness of fit\n\n{}",
        tables::render_posterior(&posterior),
        gof::render_table(&data, &reports, &a.lags)
    );
    run.text("report.txt", &text)?;
    run.json("report.json", &ReportOutput { data, posterior, gof: reports })?;
    print!("{text}");
    run.finish(None, &serde_json::json!({ "lags": a.lags }), true)
}
