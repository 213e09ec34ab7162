//! Parameter scans over `(channel, x, τ)` and summaries of their output.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use gaussnm::nonmark::{channel_spectrum, distance_witness, named_pairs, np_asymptotic, np_value};
use gaussnm::{build_table, Channel, ChannelParams, CoefficientTable, QbmChannel, SpectralDensity, StateDistance};
use rayon::prelude::*;
use serde::Deserialize;

/// Header of the scan CSV.
pub const SCAN_HEADER: [&str; 9] = [
    "channel",
    "x",
    "tau",
    "gamma",
    "Delta",
    "Pi",
    "lambda_plus",
    "lambda_minus",
    "N_p",
];

/// Header of the witness CSV written next to the scan output.
pub const WITNESS_HEADER: [&str; 4] = ["x", "tau", "min_derivative", "witness"];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },
}

impl CliError {
    /// 1 configuration, 2 numerical failure, 3 I/O or unreadable input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) | CliError::Parse { .. } => 3,
        }
    }
}

impl From<gaussnm::Error> for CliError {
    fn from(e: gaussnm::Error) -> Self {
        use gaussnm::Error as E;
        match e {
            E::Numerical(_) | E::Overflow { .. } => CliError::Numerical(e.to_string()),
            E::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub channels: Vec<Channel>,
    pub xs: Vec<f64>,
    pub theta: f64,
    pub alpha: f64,
    pub s: f64,
    pub tau_max: f64,
    pub n_grid: Option<usize>,
    pub out: PathBuf,
    /// Named pair family for the state-distance witness.
    pub witness_pairs: Option<String>,
}

impl ScanConfig {
    pub fn params(&self, x: f64) -> Result<ChannelParams> {
        let sd = SpectralDensity::new(self.s)?;
        let mut p = ChannelParams::new(x, self.theta)
            .with_alpha(self.alpha)
            .with_spectral_density(sd)
            .with_tau_max(self.tau_max);
        p.n_grid = self.n_grid;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels.is_empty() {
            return Err(CliError::Config("at least one --channel is required".into()));
        }
        if self.xs.is_empty() {
            return Err(CliError::Config("at least one --x value is required".into()));
        }
        for &x in &self.xs {
            self.params(x)?.validate()?;
        }
        if let Some(name) = &self.witness_pairs {
            if named_pairs(name).is_none() {
                return Err(CliError::Config(format!(
                    "unknown witness pair family '{name}' (expected standard, coherent, squeezed, thermal or mixed)"
                )));
            }
        }
        Ok(())
    }
}

/// One scan row.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ScanRecord {
    pub channel: String,
    pub x: f64,
    pub tau: f64,
    pub gamma: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    #[serde(rename = "Pi")]
    pub pi: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    #[serde(rename = "N_p")]
    pub n_p: f64,
}

impl ScanRecord {
    fn fields(&self) -> [String; 9] {
        [
            self.channel.clone(),
            self.x.to_string(),
            self.tau.to_string(),
            self.gamma.to_string(),
            self.delta.to_string(),
            self.pi.to_string(),
            self.lambda_plus.to_string(),
            self.lambda_minus.to_string(),
            self.n_p.to_string(),
        ]
    }
}

/// One row of the witness output.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessRecord {
    pub x: f64,
    pub tau: f64,
    pub min_derivative: f64,
    pub witness: f64,
}

fn records_for(table: &CoefficientTable, channel: Channel, x: f64) -> Result<Vec<ScanRecord>> {
    (0..table.len())
        .map(|k| {
            let c = table.node(k);
            let spec = channel_spectrum(channel, &c)?;
            Ok(ScanRecord {
                channel: channel.name().to_string(),
                x,
                tau: table.tau_grid()[k],
                gamma: c.gamma,
                delta: c.delta,
                pi: c.pi,
                lambda_plus: spec.plus,
                lambda_minus: spec.minus,
                n_p: np_value(channel, &c),
            })
        })
        .collect()
}

fn witness_for(table: &CoefficientTable, family: &str, x: f64) -> Result<Vec<WitnessRecord>> {
    let pairs = named_pairs(family).ok_or_else(|| CliError::Config(format!("unknown witness pair family '{family}'")))?;
    let channel = QbmChannel::new(table)?;
    let w = distance_witness(&channel, &pairs, table.tau_grid(), StateDistance::Bures)?;
    Ok(w.tau_grid
        .iter()
        .zip(w.min_derivative.iter().zip(&w.witness))
        .map(|(&tau, (&d, &v))| WitnessRecord {
            x,
            tau,
            min_derivative: d,
            witness: v,
        })
        .collect())
}

/// Scan output: rows sorted by (channel name, x, τ), plus witness rows when
/// a pair family was requested.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutput {
    pub records: Vec<ScanRecord>,
    pub witness: Vec<WitnessRecord>,
}

/// Computes all scan rows. Each `x` gets one coefficient table; `x` values
/// are processed in parallel.
pub fn scan(cfg: &ScanConfig) -> Result<ScanOutput> {
    cfg.validate()?;
    let per_x: Vec<(Vec<ScanRecord>, Vec<WitnessRecord>)> = cfg
        .xs
        .par_iter()
        .map(|&x| {
            let table = build_table(&cfg.params(x)?)?;
            let mut rows = Vec::new();
            for &ch in &cfg.channels {
                rows.extend(records_for(&table, ch, x)?);
            }
            let witness = match &cfg.witness_pairs {
                Some(family) => witness_for(&table, family, x)?,
                None => Vec::new(),
            };
            Ok((rows, witness))
        })
        .collect::<Result<_>>()?;
    let (records, witness): (Vec<_>, Vec<_>) = per_x.into_iter().unzip();
    // Repeated --x or --channel values would otherwise duplicate rows.
    let mut records: Vec<ScanRecord> = records.into_iter().flatten().collect();
    records.sort_by(|a, b| {
        a.channel
            .cmp(&b.channel)
            .then(a.x.total_cmp(&b.x))
            .then(a.tau.total_cmp(&b.tau))
    });
    records.dedup_by(|a, b| a.channel == b.channel && a.x == b.x && a.tau == b.tau);
    let mut witness: Vec<WitnessRecord> = witness.into_iter().flatten().collect();
    witness.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.tau.total_cmp(&b.tau)));
    witness.dedup_by(|a, b| a.x == b.x && a.tau == b.tau);
    Ok(ScanOutput { records, witness })
}

pub fn write_scan_csv<W: Write>(records: &[ScanRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCAN_HEADER)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_witness_csv<W: Write>(records: &[WitnessRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(WITNESS_HEADER)?;
    for r in records {
        w.write_record([
            r.x.to_string(),
            r.tau.to_string(),
            r.min_derivative.to_string(),
            r.witness.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `<out stem>.witness.csv` in the directory of `out`.
pub fn witness_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scan".into());
    out.with_file_name(format!("{stem}.witness.csv"))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))
}

/// Runs the scan and writes the CSV file(s). Returns the paths written.
pub fn run_scan(cfg: &ScanConfig) -> Result<Vec<PathBuf>> {
    let output = scan(cfg)?;
    write_scan_csv(&output.records, create(&cfg.out)?)?;
    let mut written = vec![cfg.out.clone()];
    if cfg.witness_pairs.is_some() {
        let path = witness_path(&cfg.out);
        write_witness_csv(&output.witness, create(&path)?)?;
        written.push(path);
    }
    Ok(written)
}

/// Per-(channel, x) statistics of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub channel: String,
    pub x: f64,
    pub points: usize,
    pub min_np: f64,
    pub max_np: f64,
    /// Fraction of the `τ > 0` rows with `N_p > 0`.
    pub fraction_positive: f64,
    /// Mean of `N_p` over the last quarter of the τ range.
    pub last_quartile_mean: f64,
    /// Long-time exact-QBM value at this `x` and the given θ.
    pub np_asymptotic: Option<f64>,
}

/// Reads a scan CSV and validates every row.
pub fn read_scan_csv(path: &Path) -> Result<Vec<ScanRecord>> {
    let shown = path.display().to_string();
    let file = File::open(path).map_err(|e| CliError::Io(format!("cannot open {shown}: {e}")))?;
    let mut rdr = csv::Reader::from_reader(file);
    let parse_err = |line: u64, message: String| CliError::Parse {
        path: shown.clone(),
        line,
        message,
    };
    let headers = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(parse_err(1, "empty file".into()));
    }
    if headers.iter().ne(SCAN_HEADER.iter().copied()) {
        return Err(parse_err(1, format!("unexpected header, expected {}", SCAN_HEADER.join(","))));
    }
    let mut rows = Vec::new();
    for result in rdr.deserialize::<ScanRecord>() {
        let row = result.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        if row.channel.parse::<Channel>().is_err() {
            return Err(parse_err(rows.len() as u64 + 2, format!("unknown channel '{}'", row.channel)));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(1, "no data rows".into()));
    }
    Ok(rows)
}

/// Groups rows by (channel, x) and computes the summary statistics.
pub fn summarize_records(rows: &[ScanRecord], theta: f64) -> Result<Vec<SummaryRow>> {
    let mut groups: BTreeMap<(String, u64), Vec<&ScanRecord>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.channel.clone(), r.x.to_bits())).or_default().push(r);
    }
    let mut out: Vec<SummaryRow> = groups
        .into_iter()
        .map(|((channel, xbits), mut g)| {
            let x = f64::from_bits(xbits);
            g.sort_by(|a, b| a.tau.total_cmp(&b.tau));
            let (lo, hi) = (g[0].tau, g[g.len() - 1].tau);
            let min_np = g.iter().map(|r| r.n_p).fold(f64::INFINITY, f64::min);
            let max_np = g.iter().map(|r| r.n_p).fold(f64::NEG_INFINITY, f64::max);
            let later: Vec<_> = g.iter().filter(|r| r.tau > 0.0).collect();
            let fraction_positive = if later.is_empty() {
                0.0
            } else {
                later.iter().filter(|r| r.n_p > 0.0).count() as f64 / later.len() as f64
            };
            let cut = lo + 0.75 * (hi - lo);
            let tail: Vec<f64> = g.iter().filter(|r| r.tau >= cut).map(|r| r.n_p).collect();
            let last_quartile_mean = tail.iter().sum::<f64>() / tail.len() as f64;
            SummaryRow {
                channel,
                x,
                points: g.len(),
                min_np,
                max_np,
                fraction_positive,
                last_quartile_mean,
                np_asymptotic: np_asymptotic(x, theta).ok(),
            }
        })
        .collect();
    out.sort_by(|a, b| a.channel.cmp(&b.channel).then(a.x.total_cmp(&b.x)));
    Ok(out)
}

pub fn summarize(path: &Path, theta: f64) -> Result<Vec<SummaryRow>> {
    if theta.is_nan() || theta <= 0.0 {
        return Err(CliError::Config(format!("theta must be > 0, got {theta}")));
    }
    summarize_records(&read_scan_csv(path)?, theta)
}

/// Plain-text table of summary rows.
pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut s = format!(
        "{:<10} {:>8} {:>7} {:>12} {:>12} {:>10} {:>14} {:>14}\n",
        "channel", "x", "points", "min_N_p", "max_N_p", "frac>0", "last_quartile", "N_asymptotic"
    );
    for r in rows {
        let asym = r.np_asymptotic.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into());
        s.push_str(&format!(
            "{:<10} {:>8} {:>7} {:>12.6e} {:>12.6e} {:>10.4} {:>14.6e} {:>14}\n",
            r.channel, r.x, r.points, r.min_np, r.max_np, r.fraction_positive, r.last_quartile_mean, asym
        ));
    }
    s
}
