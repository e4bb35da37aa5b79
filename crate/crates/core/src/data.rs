//! CSV input and output.
//!
//! Input is `date,price` or `date,return` (`t,r[,h]` as written by
//! [`write_path_csv`] is accepted as a return file). Dates are ISO-8601
//! calendar dates or integer indices and must increase strictly; gaps are
//! allowed. Rows are numbered from 1 at the first data row.
//!
//! Floats are written with the shortest representation that parses back to
//! the same bits, so every file round-trips exactly.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{AcceptanceRates, PosteriorChain};
use crate::model::{LatentPath, ModelKind, ModelParams, SeriesPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputMode {
    Prices,
    Returns,
}

impl std::str::FromStr for InputMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "prices" | "price" => Ok(InputMode::Prices),
            "returns" | "return" => Ok(InputMode::Returns),
            other => Err(Error::Config(format!("unknown input mode '{other}'"))),
        }
    }
}

/// Ingested return series with the date label of each return.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub labels: Vec<String>,
    pub returns: Vec<f64>,
}

impl Ingested {
    pub fn series(&self) -> Result<SeriesPair> {
        SeriesPair::observed(self.returns.clone())
    }
}

#[derive(PartialEq, PartialOrd, Clone, Copy)]
enum Stamp {
    Date(NaiveDate),
    Index(i64),
}

fn parse_stamp(s: &str, row: usize, column: &str) -> Result<Stamp> {
    if let Ok(i) = s.parse::<i64>() {
        return Ok(Stamp::Index(i));
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map(Stamp::Date)
        .map_err(|e| Error::Parse {
            row,
            column: column.into(),
            message: format!("'{s}' is neither an ISO date nor an integer index: {e}"),
        })
}

fn parse_value(s: &str, row: usize, column: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|e| Error::Parse {
        row,
        column: column.into(),
        message: format!("'{s}': {e}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            row,
            column: column.into(),
            message: format!("non-finite value '{s}'"),
        });
    }
    Ok(v)
}

/// Read a price or return CSV from any reader.
pub fn ingest_reader<R: Read>(reader: R, mode: InputMode) -> Result<Ingested> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |names: &[&str]| {
        headers
            .iter()
            .position(|h| names.iter().any(|n| h.eq_ignore_ascii_case(n)))
    };
    let date_col = find(&["date", "t"]).ok_or_else(|| Error::Parse {
        row: 0,
        column: "date".into(),
        message: "header needs a 'date' (or 't') column".into(),
    })?;
    let wanted: &[&str] = match mode {
        InputMode::Prices => &["price"],
        InputMode::Returns => &["return", "r"],
    };
    let value_col = find(wanted).ok_or_else(|| Error::Parse {
        row: 0,
        column: wanted[0].into(),
        message: format!("header needs a '{}' column", wanted[0]),
    })?;

    let mut labels = Vec::new();
    let mut values = Vec::new();
    let mut last: Option<Stamp> = None;
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Parse { row, column: String::new(), message: e.to_string() })?;
        let field = |c: usize| {
            rec.get(c).ok_or_else(|| Error::Parse {
                row,
                column: headers[c].to_string(),
                message: "missing field".into(),
            })
        };
        let label = field(date_col)?;
        let stamp = parse_stamp(label, row, &headers[date_col])?;
        if let Some(prev) = last {
            let comparable = matches!(
                (prev, stamp),
                (Stamp::Date(_), Stamp::Date(_)) | (Stamp::Index(_), Stamp::Index(_))
            );
            if !comparable {
                return Err(Error::Parse {
                    row,
                    column: headers[date_col].to_string(),
                    message: "mixed date and index labels".into(),
                });
            }
            if stamp <= prev {
                return Err(Error::NonMonotoneDates { row });
            }
        }
        last = Some(stamp);
        let v = parse_value(field(value_col)?, row, &headers[value_col])?;
        if mode == InputMode::Prices && v <= 0.0 {
            return Err(Error::NonPositivePrice { row, price: v });
        }
        labels.push(label.to_string());
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    match mode {
        InputMode::Returns => Ok(Ingested { labels, returns: values }),
        InputMode::Prices => {
            if values.len() < 2 {
                return Err(Error::TooShort { got: values.len(), need: 2 });
            }
            let returns = values.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
            Ok(Ingested { labels: labels.split_off(1), returns })
        }
    }
}

/// Read a price or return CSV file.
pub fn ingest(path: &Path, mode: InputMode) -> Result<Ingested> {
    ingest_reader(File::open(path)?, mode)
}

/// Path CSV: `t,r,h` with `t` from 1; `h` left empty when absent.
pub fn write_path_csv<W: Write>(w: W, pair: &SeriesPair) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "r", "h"])?;
    for (i, r) in pair.returns.iter().enumerate() {
        let h = pair
            .volatility
            .as_ref()
            .map(|v| v[i].to_string())
            .unwrap_or_default();
        out.write_record([(i + 1).to_string(), r.to_string(), h])?;
    }
    out.flush()?;
    Ok(())
}

const CHAIN_HEADER: [&str; 7] = ["iteration", "alpha", "phi", "sigma", "rho", "mu", "deviance"];

/// One row per retained draw.
pub fn write_chain_csv<W: Write>(w: W, chain: &PosteriorChain) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CHAIN_HEADER)?;
    for ((it, p), dev) in chain.iterations.iter().zip(&chain.theta_draws).zip(&chain.deviance_draws) {
        out.write_record([
            it.to_string(),
            p.alpha.to_string(),
            p.phi.to_string(),
            p.sigma.to_string(),
            p.rho.to_string(),
            p.mean_term().to_string(),
            dev.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Latent-mean CSV: `t,h` with `t = 0` holding the initial state.
pub fn write_latent_csv<W: Write>(w: W, path: &LatentPath) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "h"])?;
    out.write_record(["0".to_string(), path.initial.to_string()])?;
    for (i, h) in path.states.iter().enumerate() {
        out.write_record([(i + 1).to_string(), h.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

fn numeric_rows<R: Read>(reader: R, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let got: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if got != header {
        return Err(Error::Parse {
            row: 0,
            column: String::new(),
            message: format!("expected header {}, got {}", header.join(","), got.join(",")),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Parse { row, column: String::new(), message: e.to_string() })?;
        let vals = rec
            .iter()
            .zip(header)
            .map(|(s, c)| parse_value(s, row, c))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(vals);
    }
    Ok(rows)
}

pub fn read_latent_csv<R: Read>(reader: R) -> Result<LatentPath> {
    let rows = numeric_rows(reader, &["t", "h"])?;
    let (first, rest) = rows.split_first().ok_or(Error::EmptyInput)?;
    Ok(LatentPath::new(first[1], rest.iter().map(|r| r[1]).collect()))
}

/// Rebuild a chain from its CSV and latent-mean files. Latent draws are not
/// stored on disk, so `h_draws` is empty and deviance comes from the file.
pub fn read_chain<R1: Read, R2: Read>(kind: ModelKind, chain_csv: R1, latent_csv: R2) -> Result<PosteriorChain> {
    let rows = numeric_rows(chain_csv, &CHAIN_HEADER)?;
    if rows.is_empty() {
        return Err(Error::EmptyChain);
    }
    let mut iterations = Vec::with_capacity(rows.len());
    let mut theta_draws = Vec::with_capacity(rows.len());
    let mut deviance_draws = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let p = ModelParams::new(kind, r[1], r[2], r[3], r[4]).map_err(|e| Error::Parse {
            row: i + 1,
            column: "alpha".into(),
            message: e.to_string(),
        })?;
        iterations.push(r[0] as usize);
        theta_draws.push(p);
        deviance_draws.push(r[6]);
    }
    Ok(PosteriorChain {
        kind,
        iterations,
        theta_draws,
        h_draws: Vec::new(),
        latent_mean: read_latent_csv(latent_csv)?,
        acceptance_rates: AcceptanceRates::default(),
        deviance_draws,
    })
}
