//! Command-line front end: configuration parsing, result files and the
//! `sweep` / `point` / `gaps` subcommands.
//!
//! Configuration files are flat `key = value` lines with `#` comments, the
//! same text [`SimulationConfig::canonical_string`] produces. Command-line
//! flags override file values.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{
    gap_rows, run_point, run_sweep, run_sweep_with_workers, version_string, BerRecord, BerTable, GapRow, RunMetadata,
    SimulationConfig,
};
use crate::precoder::{PowerNormalization, SchemeMode};

pub const TABLE_HEADER: [&str; 9] = [
    "snr_db",
    "scheme",
    "u",
    "m",
    "bit_errors",
    "bits_total",
    "ber",
    "std_err",
    "low_confidence",
];
pub const GAP_HEADER: [&str; 4] = ["snr_db", "scheme_a", "scheme_b", "gap"];
pub const PLOT_HEADER: [&str; 3] = ["snr_db", "scheme", "ber"];

pub const TABLE_FILE: &str = "ber_table.csv";
pub const GAP_FILE: &str = "gaps.csv";
pub const PLOT_FILE: &str = "plot_data.csv";
pub const LOG_FILE: &str = "run_log.jsonl";
pub const MANIFEST_FILE: &str = "manifest.json";

const CONFIG_KEYS: [&str; 13] = [
    "m_t",
    "k_t",
    "k_at",
    "snr_db_list",
    "schemes",
    "u",
    "m",
    "n_realizations",
    "frames_per_realization",
    "symbols_per_frame",
    "master_seed",
    "normalize_data_block_only",
    "snr_offset_db",
];

/// Rate formatting used in every CSV: three significant digits, e.g. `1.50e-1`.
pub fn format_rate(x: f64) -> String {
    format!("{x:.2e}")
}

/// Parses `key = value` configuration text into raw entries.
///
/// Unknown and repeated keys are rejected.
pub fn parse_config_entries(text: &str) -> Result<BTreeMap<String, String>> {
    let mut entries = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("line {}", lineno + 1), "a `key = value` line", raw.trim()))?;
        let key = key.trim().to_ascii_lowercase();
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(Error::config(
                key,
                format!("one of {}", CONFIG_KEYS.join(", ")),
                "unknown key",
            ));
        }
        if entries.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::config(key, "a single assignment", "repeated key"));
        }
    }
    Ok(entries)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, expected: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::config(key, expected, value))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str, expected: &str) -> Result<Vec<T>> {
    value
        .trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s, expected))
        .collect()
}

/// Builds a validated configuration from raw entries, defaulting absent keys.
pub fn config_from_entries(entries: &BTreeMap<String, String>) -> Result<SimulationConfig> {
    let mut c = SimulationConfig::default();
    let get = |k: &str| entries.get(k).map(String::as_str);
    if let Some(v) = get("m_t") {
        c.num_tx = parse_value("m_t", v, "a positive integer")?;
    }
    if let Some(v) = get("k_t") {
        c.num_users = parse_value("k_t", v, "a positive integer")?;
    }
    if let Some(v) = get("k_at") {
        c.num_active = parse_value("k_at", v, "a positive integer")?;
    }
    if let Some(v) = get("snr_db_list") {
        c.snr_db_list = parse_list("snr_db_list", v, "a comma-separated list of dB values")?;
    }
    let u = match get("u") {
        Some(v) => parse_value("u", v, "a number > 0")?,
        None => 1.0,
    };
    let m = match get("m") {
        Some(v) => parse_value("m", v, "a number > 0")?,
        None => 1.0,
    };
    for (key, w) in [("u", u), ("m", m)] {
        if !(w > 0.0) || !f64::is_finite(w) {
            return Err(Error::config(key, "a finite number > 0", w));
        }
    }
    c.schemes = match get("schemes") {
        Some(v) => {
            let names: Vec<String> = parse_list("schemes", v, "scheme names")?;
            names
                .iter()
                .map(|n| SchemeMode::from_name(n, u, m))
                .collect::<Result<_>>()?
        }
        None => SchemeMode::standard_set(u, m)?,
    };
    if let Some(v) = get("n_realizations") {
        c.n_realizations = parse_value("n_realizations", v, "a positive integer")?;
    }
    if let Some(v) = get("frames_per_realization") {
        c.frames_per_realization = parse_value("frames_per_realization", v, "a positive integer")?;
    }
    if let Some(v) = get("symbols_per_frame") {
        c.symbols_per_frame = parse_value("symbols_per_frame", v, "a positive integer")?;
    }
    if let Some(v) = get("master_seed") {
        c.master_seed = parse_value("master_seed", v, "an unsigned 64-bit integer")?;
    }
    if let Some(v) = get("normalize_data_block_only") {
        let flag: bool = parse_value("normalize_data_block_only", v, "true or false")?;
        c.normalization = if flag {
            PowerNormalization::DataBlock
        } else {
            PowerNormalization::FullMatrix
        };
    }
    if let Some(v) = get("snr_offset_db") {
        c.snr_offset_db = parse_value("snr_offset_db", v, "a dB value")?;
    }
    c.validate()?;
    Ok(c)
}

/// Parses configuration text.
pub fn parse_config_str(text: &str) -> Result<SimulationConfig> {
    config_from_entries(&parse_config_entries(text)?)
}

pub fn parse_config_file(path: &Path) -> Result<SimulationConfig> {
    parse_config_str(&read_to_string(path)?)
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.display().to_string(),
            source,
        },
        other => Error::Parse {
            path: path.display().to_string(),
            detail: format!("{other:?}"),
        },
    }
}

fn write_csv(
    path: &Path,
    preamble: Option<&str>,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let mut buf = Vec::new();
    if let Some(p) = preamble {
        buf.extend_from_slice(p.as_bytes());
    }
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header).map_err(csv_err(path))?;
        for row in rows {
            w.write_record(&row).map_err(csv_err(path))?;
        }
        w.flush().map_err(io_err(path))?;
    }
    fs::write(path, buf).map_err(io_err(path))
}

fn table_row(r: &BerRecord) -> Vec<String> {
    vec![
        r.snr_db.to_string(),
        r.scheme.clone(),
        r.u.to_string(),
        r.m.to_string(),
        r.bit_errors.to_string(),
        r.bits_total.to_string(),
        format_rate(r.ber()),
        format_rate(r.standard_error()),
        r.low_confidence().to_string(),
    ]
}

/// Writes the per-record result CSV.
pub fn emit_table(records: &[BerRecord], path: &Path) -> Result<()> {
    write_csv(path, None, &TABLE_HEADER, records.iter().map(table_row))
}

/// Writes the gap CSV for the scheme pairs present in `records`.
pub fn emit_gaps(records: &[BerRecord], path: &Path) -> Result<Vec<GapRow>> {
    let gaps = gap_rows(records);
    write_csv(
        path,
        None,
        &GAP_HEADER,
        gaps.iter().map(|g| {
            vec![
                g.snr_db.to_string(),
                g.scheme_a.clone(),
                g.scheme_b.clone(),
                format_rate(g.gap),
            ]
        }),
    )?;
    Ok(gaps)
}

/// Writes long-format plot data, one series per scheme.
pub fn emit_plot_data(records: &[BerRecord], path: &Path) -> Result<()> {
    let mut schemes: Vec<&str> = Vec::new();
    for r in records {
        if !schemes.contains(&r.scheme.as_str()) {
            schemes.push(&r.scheme);
        }
    }
    let rows = schemes.into_iter().flat_map(|s| {
        records
            .iter()
            .filter(move |r| r.scheme == s)
            .map(|r| vec![r.snr_db.to_string(), r.scheme.clone(), format_rate(r.ber())])
    });
    write_csv(
        path,
        Some("# BER against SNR in dB; plot ber on a logarithmic axis, one series per scheme\n"),
        &PLOT_HEADER,
        rows,
    )
}

#[derive(Debug, Deserialize)]
struct TableRow {
    snr_db: f64,
    scheme: String,
    u: f64,
    m: f64,
    bit_errors: u64,
    bits_total: u64,
}

/// Reads a result CSV written by [`emit_table`].
pub fn read_table(path: &Path) -> Result<Vec<BerRecord>> {
    let text = read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_err(path))?.clone();
    if headers.iter().collect::<Vec<_>>() != TABLE_HEADER {
        return Err(Error::Parse {
            path: path.display().to_string(),
            detail: format!("unexpected header {:?}", headers),
        });
    }
    let mut records = Vec::new();
    for row in reader.deserialize::<TableRow>() {
        let row = row.map_err(csv_err(path))?;
        if row.bit_errors > row.bits_total {
            return Err(Error::Parse {
                path: path.display().to_string(),
                detail: format!("{} errors out of {} bits", row.bit_errors, row.bits_total),
            });
        }
        records.push(BerRecord {
            scheme: row.scheme,
            u: row.u,
            m: row.m,
            snr_db: row.snr_db,
            bit_errors: row.bit_errors,
            bits_total: row.bits_total,
        });
    }
    Ok(records)
}

#[derive(Serialize)]
struct LogLine<'a> {
    scheme: &'a str,
    u: f64,
    m: f64,
    snr_db: f64,
    snr_offset_db: f64,
    noise_variance: f64,
    bit_errors: u64,
    bits_total: u64,
    ber: f64,
    std_err: f64,
    low_confidence: bool,
    master_seed: u64,
    config_hash: &'a str,
    version: &'a str,
}

/// Writes one JSON object per record with full-precision values and
/// provenance.
pub fn write_run_log(table: &BerTable, path: &Path) -> Result<()> {
    let mut out = String::new();
    for r in &table.records {
        let line = LogLine {
            scheme: &r.scheme,
            u: r.u,
            m: r.m,
            snr_db: r.snr_db,
            snr_offset_db: table.config.snr_offset_db,
            noise_variance: table.config.noise_variance(r.snr_db),
            bit_errors: r.bit_errors,
            bits_total: r.bits_total,
            ber: r.ber(),
            std_err: r.standard_error(),
            low_confidence: r.low_confidence(),
            master_seed: table.metadata.master_seed,
            config_hash: &table.metadata.config_hash,
            version: &table.metadata.version,
        };
        out.push_str(&serde_json::to_string(&line).expect("log lines serialize"));
        out.push('\n');
    }
    fs::write(path, out).map_err(io_err(path))
}

/// Where a run's outputs go.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutputs {
    pub table_csv: PathBuf,
    pub gap_csv: PathBuf,
    pub plot_csv: PathBuf,
    pub run_log: PathBuf,
}

impl RunOutputs {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            table_csv: dir.join(TABLE_FILE),
            gap_csv: dir.join(GAP_FILE),
            plot_csv: dir.join(PLOT_FILE),
            run_log: dir.join(LOG_FILE),
        }
    }
}

/// A validated configuration bound to its output files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub config: String,
    pub config_hash: String,
    pub outputs: RunOutputs,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl RunManifest {
    pub fn new(config: &SimulationConfig, out_dir: &Path) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config: config.canonical_string(),
            config_hash: config.config_hash(),
            outputs: RunOutputs::in_dir(out_dir),
            version: version_string(),
            timestamp: None,
        })
    }
}

/// Writes every output of a finished table into `out_dir`.
pub fn write_outputs(table: &BerTable, out_dir: &Path, timestamp: Option<String>) -> Result<RunManifest> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut manifest = RunManifest::new(&table.config, out_dir)?;
    manifest.timestamp = timestamp;
    emit_table(&table.records, &manifest.outputs.table_csv)?;
    emit_gaps(&table.records, &manifest.outputs.gap_csv)?;
    emit_plot_data(&table.records, &manifest.outputs.plot_csv)?;
    write_run_log(table, &manifest.outputs.run_log)?;
    let path = out_dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json + "\n").map_err(io_err(&path))?;
    Ok(manifest)
}

#[derive(Debug, Parser)]
#[command(
    name = "muprecode",
    version,
    about = "Multi-user MIMO linear precoding BER simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every configured (scheme, SNR) point.
    Sweep(RunArgs),
    /// Run a single scheme at a single SNR (`--snr` takes one value).
    Point {
        #[arg(long)]
        scheme: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compute the gap table from an existing result CSV.
    Gaps {
        /// Result CSV written by `sweep` or `point`.
        table: PathBuf,
        /// Gap CSV to write; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<String>,
    /// Comma-separated SNR values in dB.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// Comma-separated scheme names.
    #[arg(long)]
    schemes: Option<String>,
    #[arg(long)]
    realizations: Option<String>,
    #[arg(long)]
    frames: Option<String>,
    #[arg(long)]
    symbols: Option<String>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    snr_offset_db: Option<String>,
    /// Record the wall-clock time in manifest.json.
    #[arg(long)]
    stamp: bool,
}

impl RunArgs {
    fn config(&self, point: Option<&str>) -> Result<SimulationConfig> {
        let mut entries = match &self.config {
            Some(path) => parse_config_entries(&read_to_string(path)?)?,
            None => BTreeMap::new(),
        };
        let overrides = [
            ("master_seed", &self.seed),
            ("snr_db_list", &self.snr),
            ("schemes", &self.schemes),
            ("n_realizations", &self.realizations),
            ("frames_per_realization", &self.frames),
            ("symbols_per_frame", &self.symbols),
            ("snr_offset_db", &self.snr_offset_db),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                entries.insert(key.to_string(), v.clone());
            }
        }
        if let Some(scheme) = point {
            entries.insert("schemes".into(), scheme.to_string());
        }
        let config = config_from_entries(&entries)?;
        if point.is_some() && config.snr_db_list.len() != 1 {
            return Err(Error::config(
                "snr_db_list",
                "exactly one SNR for `point`",
                config.snr_db_list.len(),
            ));
        }
        Ok(config)
    }

    fn run(&self, config: &SimulationConfig) -> Result<BerTable> {
        match self.workers {
            Some(w) => run_sweep_with_workers(config, w),
            None => run_sweep(config),
        }
    }
}

fn timestamp() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("{secs}")
}

fn print_records(records: &[BerRecord]) {
    println!(
        "{:>8}  {:<10} {:>12} {:>12} {:>10} {:>10}",
        "snr_db", "scheme", "bit_errors", "bits_total", "ber", "std_err"
    );
    for r in records {
        println!(
            "{:>8}  {:<10} {:>12} {:>12} {:>10} {:>10}{}",
            r.snr_db,
            r.scheme,
            r.bit_errors,
            r.bits_total,
            format_rate(r.ber()),
            format_rate(r.standard_error()),
            if r.low_confidence() { "  (low confidence)" } else { "" }
        );
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep(args) => {
            let config = args.config(None)?;
            let table = args.run(&config)?;
            let manifest = write_outputs(&table, &args.out, args.stamp.then(timestamp))?;
            print_records(&table.records);
            eprintln!("wrote {}", manifest.outputs.table_csv.display());
        }
        Command::Point { scheme, run } => {
            let config = run.config(Some(&scheme))?;
            let table = match run.workers {
                Some(w) => run_sweep_with_workers(&config, w)?,
                None => {
                    let record = run_point(&config, config.schemes[0], config.snr_db_list[0])?;
                    BerTable {
                        records: vec![record],
                        config: config.clone(),
                        metadata: RunMetadata {
                            master_seed: config.master_seed,
                            config_hash: config.config_hash(),
                            version: version_string(),
                            timestamp: None,
                        },
                    }
                }
            };
            write_outputs(&table, &run.out, run.stamp.then(timestamp))?;
            print_records(&table.records);
        }
        Command::Gaps { table, out } => {
            let records = read_table(&table)?;
            match out {
                Some(path) => {
                    let gaps = emit_gaps(&records, &path)?;
                    eprintln!("wrote {} gap rows to {}", gaps.len(), path.display());
                }
                None => {
                    println!("{}", GAP_HEADER.join(","));
                    for g in gap_rows(&records) {
                        println!("{},{},{},{}", g.snr_db, g.scheme_a, g.scheme_b, format_rate(g.gap));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Runs the command line and returns the process exit code:
/// 0 success, 1 configuration error, 2 numerical failure, 3 I/O error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
