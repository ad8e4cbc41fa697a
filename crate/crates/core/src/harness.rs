//! Monte Carlo BER sweeps over SNR points and precoding schemes.
//!
//! Each realization draws a user pool, selects the strongest users, builds
//! the precoder and pushes `frames × symbols` QPSK vectors through the link.
//! Its random stream depends only on `(master_seed, realization)`, never on
//! the scheme or the SNR, so every point of a sweep sees the same channels,
//! bits and unit-variance noise draws. Error counts are reduced with integer addition,
//! which makes results independent of how realizations are scheduled.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{draw_user_pool, select_users};
use crate::error::{Error, Result};
use crate::modem::{fill_bits, qpsk_decide, qpsk_symbol, Link, BITS_PER_SYMBOL};
use crate::precoder::{build, PowerNormalization, SchemeMode};
use crate::rng::{complex_gaussian, realization_stream};

/// Points with fewer accumulated errors are flagged as low confidence.
pub const LOW_CONFIDENCE_ERRORS: u64 = 10;

/// Full description of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub num_tx: usize,
    pub num_users: usize,
    pub num_active: usize,
    pub snr_db_list: Vec<f64>,
    pub schemes: Vec<SchemeMode>,
    pub n_realizations: u64,
    pub frames_per_realization: u64,
    pub symbols_per_frame: u64,
    pub master_seed: u64,
    pub normalization: PowerNormalization,
    /// Added to every nominal SNR before it is converted to a noise variance.
    pub snr_offset_db: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            num_tx: 8,
            num_users: 20,
            num_active: 8,
            snr_db_list: vec![14.0, 20.0, 30.0],
            schemes: SchemeMode::standard_set(1.0, 1.0).expect("default weights are valid"),
            n_realizations: 1000,
            frames_per_realization: 10,
            symbols_per_frame: 100,
            master_seed: 1,
            normalization: PowerNormalization::FullMatrix,
            snr_offset_db: 0.0,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("m_t", self.num_tx as u64),
            ("k_t", self.num_users as u64),
            ("k_at", self.num_active as u64),
            ("realizations", self.n_realizations),
            ("frames", self.frames_per_realization),
            ("symbols", self.symbols_per_frame),
        ];
        for (key, v) in positive {
            if v == 0 {
                return Err(Error::config(key, "a count >= 1", v));
            }
        }
        if self.num_active > self.num_users {
            return Err(Error::config(
                "k_at",
                format!("at most k_t = {}", self.num_users),
                self.num_active,
            ));
        }
        if self.num_active != self.num_tx {
            return Err(Error::config(
                "k_at",
                format!("exactly m_t = {} active users", self.num_tx),
                self.num_active,
            ));
        }
        if self.snr_db_list.is_empty() {
            return Err(Error::config("snr_db_list", "at least one SNR", "[]"));
        }
        if let Some(bad) = self.snr_db_list.iter().find(|s| s.is_nan() || **s == f64::NEG_INFINITY) {
            return Err(Error::config("snr_db_list", "real dB values or +inf", bad));
        }
        if !self.snr_offset_db.is_finite() {
            return Err(Error::config("snr_offset_db", "a finite dB value", self.snr_offset_db));
        }
        if self.schemes.is_empty() {
            return Err(Error::config("schemes", "at least one scheme", "[]"));
        }
        let mut names: Vec<String> = self.schemes.iter().map(SchemeMode::name).collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::config("schemes", "distinct scheme names", &w[0]));
        }
        Ok(())
    }

    /// Bits accumulated per `(scheme, SNR)` point.
    pub fn bits_per_point(&self) -> u64 {
        self.n_realizations
            * self.frames_per_realization
            * self.symbols_per_frame
            * self.num_active as u64
            * BITS_PER_SYMBOL as u64
    }

    /// Noise variance used at a nominal SNR, after the calibration offset.
    pub fn noise_variance(&self, snr_db: f64) -> f64 {
        snr_db_to_noise_variance(snr_db + self.snr_offset_db)
    }

    /// Canonical `key = value` rendering; also the config file format.
    pub fn canonical_string(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        let (u, m) = scheme_weights(&self.schemes);
        [
            format!("m_t = {}", self.num_tx),
            format!("k_t = {}", self.num_users),
            format!("k_at = {}", self.num_active),
            format!(
                "snr_db_list = {}",
                join(self.snr_db_list.iter().map(|s| format!("{s:?}")).collect())
            ),
            format!(
                "schemes = {}",
                join(self.schemes.iter().map(SchemeMode::name).collect())
            ),
            format!("u = {u:?}"),
            format!("m = {m:?}"),
            format!("n_realizations = {}", self.n_realizations),
            format!("frames_per_realization = {}", self.frames_per_realization),
            format!("symbols_per_frame = {}", self.symbols_per_frame),
            format!("master_seed = {}", self.master_seed),
            format!(
                "normalize_data_block_only = {}",
                self.normalization == PowerNormalization::DataBlock
            ),
            format!("snr_offset_db = {:?}", self.snr_offset_db),
        ]
        .join("\n")
            + "\n"
    }

    /// SHA-256 of [`canonical_string`](Self::canonical_string), hex encoded.
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Weights `(u, m)` shared by a scheme list; the first nonzero value of each
/// wins, defaulting to 1.
pub fn scheme_weights(schemes: &[SchemeMode]) -> (f64, f64) {
    let u = schemes.iter().map(SchemeMode::u).find(|&u| u > 0.0).unwrap_or(1.0);
    let m = schemes.iter().map(SchemeMode::m).find(|&m| m > 0.0).unwrap_or(1.0);
    (u, m)
}

/// `N0 = 10^(-snr_db / 10)`, per-stream `E_s/N_0` with unit symbol energy.
pub fn snr_db_to_noise_variance(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Error counts for one `(scheme, SNR)` point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub scheme: String,
    pub u: f64,
    pub m: f64,
    pub snr_db: f64,
    pub bit_errors: u64,
    pub bits_total: u64,
}

impl BerRecord {
    pub fn ber(&self) -> f64 {
        if self.bits_total == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits_total as f64
        }
    }

    /// Binomial standard error `sqrt(p(1 - p)/n)`.
    pub fn standard_error(&self) -> f64 {
        if self.bits_total == 0 {
            return 0.0;
        }
        let p = self.ber();
        (p * (1.0 - p) / self.bits_total as f64).sqrt()
    }

    pub fn low_confidence(&self) -> bool {
        self.bit_errors < LOW_CONFIDENCE_ERRORS
    }
}

/// Provenance attached to a result table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub master_seed: u64,
    pub config_hash: String,
    pub version: String,
    /// Wall-clock stamp, only set when the caller asks for one; leaving it
    /// empty keeps outputs a pure function of the configuration.
    pub timestamp: Option<String>,
}

/// Records of a sweep, ordered by SNR and then by the configured scheme order.
#[derive(Debug, Clone, PartialEq)]
pub struct BerTable {
    pub records: Vec<BerRecord>,
    pub config: SimulationConfig,
    pub metadata: RunMetadata,
}

impl BerTable {
    pub fn record(&self, scheme: &str, snr_db: f64) -> Result<&BerRecord> {
        find_record(&self.records, scheme, snr_db)
    }

    /// Distinct SNR values in record order.
    pub fn snr_points(&self) -> Vec<f64> {
        snr_points(&self.records)
    }

    /// Distinct scheme names in record order.
    pub fn scheme_names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.records {
            if !out.contains(&r.scheme) {
                out.push(r.scheme.clone());
            }
        }
        out
    }
}

pub fn find_record<'a>(records: &'a [BerRecord], scheme: &str, snr_db: f64) -> Result<&'a BerRecord> {
    records
        .iter()
        .find(|r| r.scheme == scheme && r.snr_db == snr_db)
        .ok_or_else(|| Error::Lookup {
            scheme: scheme.to_string(),
            snr_db,
        })
}

fn snr_points(records: &[BerRecord]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for r in records {
        if !out.contains(&r.snr_db) {
            out.push(r.snr_db);
        }
    }
    out
}

/// `ber(a) - ber(b)` at one SNR.
pub fn ber_gap(table: &BerTable, a: &str, b: &str, snr_db: f64) -> Result<f64> {
    record_gap(&table.records, a, b, snr_db)
}

fn record_gap(records: &[BerRecord], a: &str, b: &str, snr_db: f64) -> Result<f64> {
    Ok(find_record(records, a, snr_db)?.ber() - find_record(records, b, snr_db)?.ber())
}

/// Scheme pairs compared in gap reports, as `(a, b)` with gap `ber(a) - ber(b)`.
///
/// The first three are the sub-optimal/optimal comparisons within each
/// family; the last two compare each `u = 0` unified scheme with its
/// conventional twin.
pub const GAP_PAIRS: [(&str, &str); 5] = [
    ("LZFP", "LMMSEP"),
    ("LZFP-u0", "LMMSEP-u0"),
    ("ULZFP", "ULMMSEP"),
    ("LZFP-u0", "LZFP"),
    ("LMMSEP-u0", "LMMSEP"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub snr_db: f64,
    pub scheme_a: String,
    pub scheme_b: String,
    pub gap: f64,
}

/// Gaps for every pair of [`GAP_PAIRS`] present in `records`, per SNR.
pub fn gap_rows(records: &[BerRecord]) -> Vec<GapRow> {
    let mut rows = Vec::new();
    for snr in snr_points(records) {
        for (a, b) in GAP_PAIRS {
            if let Ok(gap) = record_gap(records, a, b, snr) {
                rows.push(GapRow {
                    snr_db: snr,
                    scheme_a: a.to_string(),
                    scheme_b: b.to_string(),
                    gap,
                });
            }
        }
    }
    rows
}

/// Bit errors of one realization.
pub fn realization_errors(config: &SimulationConfig, scheme: SchemeMode, snr_db: f64, realization: u64) -> Result<u64> {
    let n0 = config.noise_variance(snr_db);
    let mut rng = realization_stream(config.master_seed, realization);
    let pool = draw_user_pool(&mut rng, config.num_users, config.num_tx);
    let channel = select_users(&pool, config.num_active)?;
    let precoder = build(&channel, scheme, n0, config.normalization)?;
    let link = Link::new(&channel, &precoder)?;

    let k = config.num_active;
    let mut bits = vec![0u8; k * BITS_PER_SYMBOL];
    let mut symbols = vec![Complex64::new(0.0, 0.0); k];
    let mut noise = vec![Complex64::new(0.0, 0.0); k];
    let mut estimate = vec![Complex64::new(0.0, 0.0); k];
    let mut errors = 0u64;
    for _ in 0..config.frames_per_realization * config.symbols_per_frame {
        fill_bits(&mut rng, &mut bits);
        for (s, pair) in symbols.iter_mut().zip(bits.chunks_exact(BITS_PER_SYMBOL)) {
            *s = qpsk_symbol(pair[0], pair[1]);
        }
        for z in noise.iter_mut() {
            *z = complex_gaussian(&mut rng, n0);
        }
        link.receive_into(&symbols, &noise, &mut estimate)?;
        for (est, pair) in estimate.iter().zip(bits.chunks_exact(BITS_PER_SYMBOL)) {
            let (b0, b1) = qpsk_decide(*est);
            errors += u64::from(b0 != pair[0]) + u64::from(b1 != pair[1]);
        }
    }
    Ok(errors)
}

/// Runs every realization of one point on the current rayon pool.
pub fn run_point(config: &SimulationConfig, scheme: SchemeMode, snr_db: f64) -> Result<BerRecord> {
    config.validate()?;
    run_point_unchecked(config, scheme, snr_db)
}

fn run_point_unchecked(config: &SimulationConfig, scheme: SchemeMode, snr_db: f64) -> Result<BerRecord> {
    let bit_errors = (0..config.n_realizations)
        .into_par_iter()
        .map(|r| {
            realization_errors(config, scheme, snr_db, r).map_err(|e| Error::Realization {
                scheme: scheme.name(),
                snr_db,
                realization: r,
                source: Box::new(e),
            })
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(BerRecord {
        scheme: scheme.name(),
        u: scheme.u(),
        m: scheme.m(),
        snr_db,
        bit_errors,
        bits_total: config.bits_per_point(),
    })
}

/// Runs every `(scheme, SNR)` point.
pub fn run_sweep(config: &SimulationConfig) -> Result<BerTable> {
    config.validate()?;
    let mut snrs = config.snr_db_list.clone();
    snrs.sort_by(f64::total_cmp);
    snrs.dedup();
    let mut records = Vec::with_capacity(snrs.len() * config.schemes.len());
    for &snr in &snrs {
        for &scheme in &config.schemes {
            records.push(run_point_unchecked(config, scheme, snr)?);
        }
    }
    Ok(BerTable {
        records,
        config: config.clone(),
        metadata: RunMetadata {
            master_seed: config.master_seed,
            config_hash: config.config_hash(),
            version: version_string(),
            timestamp: None,
        },
    })
}

/// Runs a sweep on a dedicated pool of `workers` threads.
pub fn run_sweep_with_workers(config: &SimulationConfig, workers: usize) -> Result<BerTable> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::config("workers", "a buildable thread pool", e))?;
    pool.install(|| run_sweep(config))
}

pub fn version_string() -> String {
    format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}
