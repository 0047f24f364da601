//! Monte Carlo BER sweeps over the full transmit/receive chain, rate
//! adaptation, CSV I/O, flat config files, and the codec self test.
//!
//! Each frame draws its information bits and channel noise from ChaCha
//! streams keyed by `(seed, frame_index)`, and every SNR point reuses the
//! same unit-variance noise scaled to that point. Frames are simulated in
//! parallel batches and then scanned in order, so the stopping frame and
//! every reported number are independent of the thread count.

use crate::bch::BchCode;
use crate::galois::GaloisField;
use crate::modem::{self, DemapMode, ModemError, NoiseRecord};
use crate::polar::{self, PolarCode, ReliabilityDesign, SclDecoder};
use crate::product::{BitMatrix, LlrMatrix, ProductCodeConfig, ProductError, SabmParams};
use crate::Bit;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("cannot read noise record {path}: {source}")]
    NoiseFileUnreadable {
        path: PathBuf,
        #[source]
        source: ModemError,
    },
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Modem(#[from] ModemError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    PolarBch,
    BchBch,
}

impl FromStr for CodeKind {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "polar-bch" => Ok(Self::PolarBch),
            "bch-bch" => Ok(Self::BchBch),
            _ => Err(SweepError::ConfigInvalid(format!(
                "unknown code kind {s:?}"
            ))),
        }
    }
}

impl fmt::Display for CodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PolarBch => "polar-bch",
            Self::BchBch => "bch-bch",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    Hshd,
    Ibdd,
    Sabm,
}

impl FromStr for DecoderKind {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hshd" => Ok(Self::Hshd),
            "ibdd" => Ok(Self::Ibdd),
            "sabm" => Ok(Self::Sabm),
            _ => Err(SweepError::ConfigInvalid(format!("unknown decoder {s:?}"))),
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Hshd => "hshd",
            Self::Ibdd => "ibdd",
            Self::Sabm => "sabm",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSource {
    Awgn,
    Replay(PathBuf),
}

/// Frame length of both component codes.
pub const FRAME_SIDE: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub code_kind: CodeKind,
    pub decoder: DecoderKind,
    /// Row-code dimension. For BCH rows it must be an extended BCH(256) dimension.
    pub k1: usize,
    pub snr_start: f64,
    pub snr_stop: f64,
    pub snr_step: f64,
    pub target_ber: f64,
    pub max_frames: u64,
    /// Frames simulated per point before the error-count stop may trigger.
    pub min_frames: u64,
    pub min_bit_errors: u64,
    pub seed: u64,
    pub noise_source: NoiseSource,
    pub threads_hint: usize,
    pub rate_scale: f64,
    pub alpha: f64,
    pub l_max: usize,
    pub list_size: usize,
    pub hrb_threshold: f64,
    pub demap: DemapMode,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            code_kind: CodeKind::PolarBch,
            decoder: DecoderKind::Hshd,
            k1: 239,
            snr_start: 8.0,
            snr_stop: 10.0,
            snr_step: 0.5,
            target_ber: 1e-4,
            max_frames: 1000,
            min_frames: 1,
            min_bit_errors: 100,
            seed: 1,
            noise_source: NoiseSource::Awgn,
            threads_hint: 1,
            rate_scale: 100.0,
            alpha: 3.0,
            l_max: 10,
            list_size: 8,
            hrb_threshold: SabmParams::default().hrb_threshold,
            demap: DemapMode::Exact,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, SweepError> {
    value
        .parse()
        .map_err(|_| SweepError::ConfigInvalid(format!("bad value {value:?} for {key}")))
}

/// Parses `start:stop:step`; `inf` is accepted for a noiseless point.
pub fn parse_snr_range(s: &str) -> Result<(f64, f64, f64), SweepError> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, c] => Ok((parse("snr", a)?, parse("snr", b)?, parse("snr", c)?)),
        [a] => {
            let v = parse("snr", a)?;
            Ok((v, v, 1.0))
        }
        _ => Err(SweepError::ConfigInvalid(format!(
            "snr range {s:?} is not start:stop:step"
        ))),
    }
}

/// Parses an inclusive `lo:hi` range.
pub fn parse_k1_range(s: &str) -> Result<(usize, usize), SweepError> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| SweepError::ConfigInvalid(format!("k1 range {s:?} is not lo:hi")))?;
    let (lo, hi) = (parse("k1-range", a)?, parse("k1-range", b)?);
    if lo > hi {
        return Err(SweepError::ConfigInvalid(format!("empty k1 range {s:?}")));
    }
    Ok((lo, hi))
}

impl SweepConfig {
    /// Sets one option by its command-line name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), SweepError> {
        match key {
            "code" => self.code_kind = value.parse()?,
            "decoder" => self.decoder = value.parse()?,
            "k1" => self.k1 = parse(key, value)?,
            "snr" => (self.snr_start, self.snr_stop, self.snr_step) = parse_snr_range(value)?,
            "target-ber" => self.target_ber = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "lmax" => self.l_max = parse(key, value)?,
            "list-size" => self.list_size = parse(key, value)?,
            "max-frames" => self.max_frames = parse(key, value)?,
            "min-frames" => self.min_frames = parse(key, value)?,
            "min-errors" => self.min_bit_errors = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "noise-replay" => self.noise_source = NoiseSource::Replay(PathBuf::from(value)),
            "rate-scale" => self.rate_scale = parse(key, value)?,
            "threads" => self.threads_hint = parse(key, value)?,
            "hrb-threshold" => self.hrb_threshold = parse(key, value)?,
            "demap" => {
                self.demap = match value {
                    "exact" => DemapMode::Exact,
                    "max-log" => DemapMode::MaxLog,
                    _ => {
                        return Err(SweepError::ConfigInvalid(format!(
                            "unknown demap mode {value:?}"
                        )))
                    }
                }
            }
            _ => return Err(SweepError::ConfigInvalid(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |m: String| Err(SweepError::ConfigInvalid(m));
        if !(self.snr_step > 0.0) {
            return bad(format!("snr step must be positive, got {}", self.snr_step));
        }
        if self.snr_start.is_nan() || self.snr_stop.is_nan() || self.snr_stop < self.snr_start {
            return bad(format!(
                "bad snr range {}..{}",
                self.snr_start, self.snr_stop
            ));
        }
        if self.min_bit_errors == 0 {
            return bad("min errors must be at least 1".into());
        }
        if self.max_frames == 0 {
            return bad("max frames must be at least 1".into());
        }
        if !(1..=FRAME_SIDE).contains(&self.k1) {
            return bad(format!("k1 {} outside 1..={FRAME_SIDE}", self.k1));
        }
        if self.code_kind == CodeKind::BchBch && bch_row_radius(self.k1).is_none() {
            return bad(format!(
                "no extended BCH(256) row code has dimension {}",
                self.k1
            ));
        }
        match (self.code_kind, self.decoder) {
            (CodeKind::PolarBch, DecoderKind::Hshd)
            | (CodeKind::BchBch, DecoderKind::Ibdd | DecoderKind::Sabm) => {}
            (c, d) => return bad(format!("decoder {d} does not apply to {c} codes")),
        }
        if !(self.target_ber > 0.0 && self.target_ber < 1.0) {
            return bad(format!("target BER {} outside (0, 1)", self.target_ber));
        }
        if !(self.rate_scale > 0.0) {
            return bad(format!(
                "rate scale must be positive, got {}",
                self.rate_scale
            ));
        }
        if !(self.hrb_threshold >= 0.0) {
            return bad(format!("bad HRB threshold {}", self.hrb_threshold));
        }
        Ok(())
    }

    /// SNR grid from start to stop inclusive.
    pub fn snr_points(&self) -> Vec<f64> {
        if self.snr_start == self.snr_stop {
            return vec![self.snr_start];
        }
        let mut out = Vec::new();
        let mut i = 0u32;
        loop {
            let v = self.snr_start + i as f64 * self.snr_step;
            if v > self.snr_stop + 1e-9 {
                break;
            }
            out.push((v * 1e9).round() / 1e9);
            i += 1;
        }
        out
    }

    pub fn product_config(&self) -> Result<ProductCodeConfig, SweepError> {
        let cfg = match self.code_kind {
            CodeKind::PolarBch => {
                ProductCodeConfig::polar_bch(self.k1, self.alpha, self.l_max, self.list_size)?
            }
            CodeKind::BchBch => {
                let t = bch_row_radius(self.k1).ok_or_else(|| {
                    SweepError::ConfigInvalid(format!("no BCH row code with k1 = {}", self.k1))
                })?;
                ProductCodeConfig::bch_bch(t, self.l_max)?
            }
        };
        Ok(cfg.with_sabm(SabmParams {
            hrb_threshold: self.hrb_threshold,
            ..SabmParams::default()
        }))
    }
}

/// Correction radius of the extended BCH(256) code with dimension `k`, if any.
pub fn bch_row_radius(k: usize) -> Option<usize> {
    (1..=16).find(|&t| 255usize.checked_sub(8 * t) == Some(k))
}

/// Row dimensions the code family can realize inside `lo..=hi`.
pub fn achievable_k1(kind: CodeKind, lo: usize, hi: usize) -> Vec<usize> {
    let hi = hi.min(FRAME_SIDE);
    match kind {
        CodeKind::PolarBch => (lo.max(1)..=hi).collect(),
        CodeKind::BchBch => (lo..=hi).filter(|&k| bch_row_radius(k).is_some()).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub es_n0_db: f64,
    pub frames: u64,
    pub pre_fec_ber: f64,
    pub post_fec_ber: f64,
    pub avg_iterations: f64,
    pub converged_fraction: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct FrameOutcome {
    pre_errors: u64,
    post_errors: u64,
    iterations: u64,
    converged: bool,
}

struct Chain {
    code: ProductCodeConfig,
    decoder: DecoderKind,
    demap: DemapMode,
    seed: u64,
    record: Option<NoiseRecord>,
}

const INFO_STREAM: u64 = 0;
const NOISE_STREAM: u64 = 1;

fn frame_rng(seed: u64, frame: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame.wrapping_mul(2).wrapping_add(stream));
    rng
}

impl Chain {
    fn simulate(&self, es_n0_db: f64, frame: u64) -> Result<FrameOutcome, SweepError> {
        let code = &self.code;
        let (n2, n1) = (code.n_rows(), code.n_cols());
        let mut info_rng = frame_rng(self.seed, frame, INFO_STREAM);
        let info_bits: Vec<Bit> = (0..code.info_bits())
            .map(|_| info_rng.random_range(0..2u8))
            .collect();
        let info = BitMatrix::from_vec(code.k_rows(), code.k_cols(), info_bits)?;
        let tx = code.encode(&info)?;
        let coded = modem::interleave(tx.as_slice(), n2, n1)?;
        let mut symbols = modem::map_16qam(&coded)?;
        let n0 = modem::noise_n0(es_n0_db);
        match &self.record {
            None => {
                let mut noise_rng = frame_rng(self.seed, frame, NOISE_STREAM);
                let sigma = (n0 / 2.0).sqrt();
                for s in symbols.iter_mut() {
                    let re: f64 = noise_rng.sample(StandardNormal);
                    let im: f64 = noise_rng.sample(StandardNormal);
                    *s += Complex64::new(re, im) * sigma;
                }
            }
            Some(rec) => {
                let offset = (frame as usize).wrapping_mul(symbols.len());
                modem::apply_noise_replay(&mut symbols, rec, n0, offset)?;
            }
        }
        // a tiny floor keeps the noiseless point finite
        let llrs = modem::demap_16qam(&symbols, n0.max(1e-12), self.demap)?;
        let llrs = modem::deinterleave(&llrs, n2, n1)?;
        let llrs = LlrMatrix::from_vec(
            n2,
            n1,
            llrs.into_iter()
                .map(|v| v.clamp(-polar::LLR_CLIP, polar::LLR_CLIP))
                .collect(),
        )?;
        let hard = llrs.hard_decisions();
        let pre_errors = hard.distance(&tx) as u64;
        let report = match self.decoder {
            DecoderKind::Hshd => code.hshd_decode(&llrs)?,
            DecoderKind::Ibdd => code.ibdd_decode(&hard)?,
            DecoderKind::Sabm => code.sabm_decode(&llrs)?,
        };
        Ok(FrameOutcome {
            pre_errors,
            post_errors: report.info.distance(&info) as u64,
            iterations: report.iterations_used as u64,
            converged: report.converged,
        })
    }
}

fn build_chain(cfg: &SweepConfig) -> Result<Chain, SweepError> {
    cfg.validate()?;
    let record = match &cfg.noise_source {
        NoiseSource::Awgn => None,
        NoiseSource::Replay(path) => {
            Some(
                NoiseRecord::load(path).map_err(|source| SweepError::NoiseFileUnreadable {
                    path: path.clone(),
                    source,
                })?,
            )
        }
    };
    Ok(Chain {
        code: cfg.product_config()?,
        decoder: cfg.decoder,
        demap: cfg.demap,
        seed: cfg.seed,
        record,
    })
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool, SweepError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| SweepError::ConfigInvalid(format!("cannot start thread pool: {e}")))
}

/// Simulates one SNR point. With `fail_fast`, stops as soon as the error
/// count guarantees the point misses `target_ber` at any later stopping frame.
fn run_point(
    chain: &Chain,
    cfg: &SweepConfig,
    snr: f64,
    pool: &rayon::ThreadPool,
    fail_fast: bool,
) -> Result<SweepRow, SweepError> {
    let budget = cfg.target_ber * (cfg.max_frames * chain.code.info_bits() as u64) as f64;
    let batch = (cfg.threads_hint.max(1) * 2) as u64;
    let mut totals = FrameOutcome::default();
    let mut converged = 0u64;
    let mut frames = 0u64;
    'outer: while frames < cfg.max_frames {
        let end = (frames + batch).min(cfg.max_frames);
        let outcomes: Vec<Result<FrameOutcome, SweepError>> = pool.install(|| {
            (frames..end)
                .into_par_iter()
                .map(|f| chain.simulate(snr, f))
                .collect()
        });
        for o in outcomes {
            let o = o?;
            frames += 1;
            totals.pre_errors += o.pre_errors;
            totals.post_errors += o.post_errors;
            totals.iterations += o.iterations;
            converged += o.converged as u64;
            if totals.post_errors >= cfg.min_bit_errors && frames >= cfg.min_frames {
                break 'outer;
            }
            if fail_fast && totals.post_errors as f64 > budget {
                break 'outer;
            }
        }
    }
    let code = &chain.code;
    Ok(SweepRow {
        es_n0_db: snr,
        frames,
        pre_fec_ber: totals.pre_errors as f64 / (frames * code.frame_bits() as u64) as f64,
        post_fec_ber: totals.post_errors as f64 / (frames * code.info_bits() as u64) as f64,
        avg_iterations: totals.iterations as f64 / frames as f64,
        converged_fraction: converged as f64 / frames as f64,
    })
}

/// Simulates every SNR point of `cfg`.
pub fn run_ber_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, SweepError> {
    let mut rows = Vec::new();
    run_ber_sweep_with(cfg, |row| {
        rows.push(*row);
        Ok(())
    })?;
    Ok(rows)
}

/// [`run_ber_sweep`] that hands each row to `sink` as soon as its point finishes.
pub fn run_ber_sweep_with<F>(cfg: &SweepConfig, mut sink: F) -> Result<(), SweepError>
where
    F: FnMut(&SweepRow) -> Result<(), SweepError>,
{
    let chain = build_chain(cfg)?;
    let pool = thread_pool(cfg.threads_hint)?;
    for snr in cfg.snr_points() {
        sink(&run_point(&chain, cfg, snr, &pool, false)?)?;
    }
    Ok(())
}

pub const CSV_HEADER: &str =
    "es_n0_db,frames,pre_fec_ber,post_fec_ber,avg_iterations,converged_fraction";

pub fn format_csv_row(row: &SweepRow) -> String {
    format!(
        "{},{},{:e},{:e},{},{}",
        row.es_n0_db,
        row.frames,
        row.pre_fec_ber,
        row.post_fec_ber,
        row.avg_iterations,
        row.converged_fraction
    )
}

pub fn write_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> Result<(), SweepError> {
    writeln!(w, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(w, "{}", format_csv_row(row))?;
    }
    Ok(())
}

pub fn read_csv<R: BufRead>(r: R) -> Result<Vec<SweepRow>, SweepError> {
    let mut lines = r.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != CSV_HEADER {
        return Err(SweepError::Csv {
            line: 1,
            reason: format!("unexpected header {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |reason: String| SweepError::Csv {
            line: i + 2,
            reason,
        };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(err(format!("expected 6 fields, got {}", f.len())));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| err(format!("bad number {s:?}")))
        };
        rows.push(SweepRow {
            es_n0_db: num(f[0])?,
            frames: f[1]
                .parse()
                .map_err(|_| err(format!("bad frame count {:?}", f[1])))?,
            pre_fec_ber: num(f[2])?,
            post_fec_ber: num(f[3])?,
            avg_iterations: num(f[4])?,
            converged_fraction: num(f[5])?,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateAdaptRow {
    pub es_n0_db: f64,
    /// Largest row dimension meeting the target, if any does.
    pub best_k1: Option<usize>,
    pub net_rate: f64,
}

/// For each SNR, the largest realizable `k1` in `lo..=hi` whose post-FEC BER
/// meets the target, with its net rate `rate * rate_scale`.
///
/// Candidates are tried from the largest down at each SNR point, and smaller
/// ones are not simulated once a larger one meets the target.
pub fn run_rate_adapt(
    cfg: &SweepConfig,
    k1_range: (usize, usize),
) -> Result<Vec<RateAdaptRow>, SweepError> {
    let candidates = achievable_k1(cfg.code_kind, k1_range.0, k1_range.1);
    if candidates.is_empty() {
        return Err(SweepError::ConfigInvalid(format!(
            "no {} row dimension in {}..={}",
            cfg.code_kind, k1_range.0, k1_range.1
        )));
    }
    let chains = candidates
        .iter()
        .rev()
        .map(|&k1| {
            let mut c = cfg.clone();
            c.k1 = k1;
            Ok((k1, build_chain(&c)?))
        })
        .collect::<Result<Vec<_>, SweepError>>()?;
    let pool = thread_pool(cfg.threads_hint)?;
    let mut out = Vec::new();
    for snr in cfg.snr_points() {
        let mut row = RateAdaptRow {
            es_n0_db: snr,
            best_k1: None,
            net_rate: 0.0,
        };
        for (k1, chain) in &chains {
            if run_point(chain, cfg, snr, &pool, true)?.post_fec_ber <= cfg.target_ber {
                row.best_k1 = Some(*k1);
                row.net_rate = chain.code.rate() * cfg.rate_scale;
                break;
            }
        }
        out.push(row);
    }
    Ok(out)
}

pub const RATE_CSV_HEADER: &str = "es_n0_db,best_k1,net_rate";

pub fn write_rate_csv<W: Write>(mut w: W, rows: &[RateAdaptRow]) -> Result<(), SweepError> {
    writeln!(w, "{RATE_CSV_HEADER}")?;
    for r in rows {
        let k = r.best_k1.map(|k| k.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{}", r.es_n0_db, k, r.net_rate)?;
    }
    Ok(())
}

/// Parses flat `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, SweepError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            SweepError::ConfigInvalid(format!("line {}: expected key = value", i + 1))
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(SweepError::ConfigInvalid(format!(
                "line {}: empty key",
                i + 1
            )));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

/// Test hook for [`codec_selftest`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Corrupts one antilog table entry of the field under test.
    CorruptAntilog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.suites {
            writeln!(
                f,
                "{} {}: {}",
                if s.passed { "PASS" } else { "FAIL" },
                s.name,
                s.detail
            )?;
        }
        let n = self.suites.iter().filter(|s| s.passed).count();
        write!(f, "{n}/{} suites passed", self.suites.len())
    }
}

fn suite(name: &'static str, r: Result<String, String>) -> SuiteResult {
    match r {
        Ok(detail) => SuiteResult {
            name,
            passed: true,
            detail,
        },
        Err(detail) => SuiteResult {
            name,
            passed: false,
            detail,
        },
    }
}

fn selftest_galois(fault: Fault) -> Result<String, String> {
    let mut checked = 0usize;
    for m in [4u32, 8] {
        let mut f = GaloisField::with_default_poly(m).map_err(|e| e.to_string())?;
        if fault == Fault::CorruptAntilog {
            f = f.with_corrupted_antilog(3);
        }
        let poly = f.primitive_poly();
        for a in 0..f.size() as u32 {
            if a != 0 && f.antilog(f.log(a as u16).unwrap_or(0)) as u32 != a {
                return Err(format!("GF(2^{m}): log/antilog mismatch at {a}"));
            }
            for b in 0..f.size() as u32 {
                let mut acc = 0u32;
                for i in 0..m {
                    if b >> i & 1 == 1 {
                        acc ^= a << i;
                    }
                }
                for bit in (m..2 * m).rev() {
                    if acc >> bit & 1 == 1 {
                        acc ^= poly << (bit - m);
                    }
                }
                if f.mul(a as u16, b as u16) as u32 != acc {
                    return Err(format!("GF(2^{m}): {a}*{b} != {acc}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} products match carry-less multiplication"
    ))
}

fn selftest_bch() -> Result<String, String> {
    let mut checked = 0usize;
    for extended in [false, true] {
        let field = GaloisField::with_default_poly(4).map_err(|e| e.to_string())?;
        let code = BchCode::new(field, 2, extended).map_err(|e| e.to_string())?;
        let n = code.len();
        let codewords: Vec<Vec<Bit>> = (0..1u32 << code.k())
            .map(|m| {
                code.encode(
                    &(0..code.k())
                        .map(|i| (m >> i & 1) as Bit)
                        .collect::<Vec<_>>(),
                )
            })
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let mut patterns: Vec<Vec<usize>> = vec![vec![]];
        for i in 0..n {
            patterns.push(vec![i]);
            for j in i + 1..n {
                patterns.push(vec![i, j]);
            }
        }
        for c in &codewords {
            for p in &patterns {
                let mut r = c.clone();
                for &i in p {
                    r[i] ^= 1;
                }
                // the nearest codeword is unique since the radius is below half the distance
                let nearest = codewords
                    .iter()
                    .min_by_key(|w| w.iter().zip(&r).filter(|(a, b)| a != b).count())
                    .expect("non-empty code");
                let out = code.bdd_decode(&r).map_err(|e| e.to_string())?;
                if &out.word != nearest {
                    return Err(format!(
                        "({n},{}) mismatch for error pattern {p:?}",
                        code.k()
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} decodings equal the nearest codeword"))
}

fn selftest_scl() -> Result<String, String> {
    let code = PolarCode::new(8, 4, ReliabilityDesign::default()).map_err(|e| e.to_string())?;
    let mut dec = SclDecoder::new(8, 16).map_err(|e| e.to_string())?;
    let codewords: Vec<Vec<Bit>> = (0..16u32)
        .map(|m| code.systematic_encode(&(0..4).map(|i| (m >> i & 1) as Bit).collect::<Vec<_>>()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let trials = 10_000;
    let mut agree = 0;
    for _ in 0..trials {
        let llrs: Vec<f64> = (0..8).map(|_| rng.random_range(-4.0..4.0)).collect();
        let score = |w: &Vec<Bit>| -> f64 {
            w.iter()
                .zip(&llrs)
                .map(|(&b, &l)| if b == 0 { l } else { -l })
                .sum()
        };
        let ml = codewords
            .iter()
            .max_by(|a, b| score(a).total_cmp(&score(b)))
            .expect("16 codewords");
        let out = dec.decode(&code, &llrs).map_err(|e| e.to_string())?;
        agree += (&out.codeword == ml) as usize;
    }
    let frac = agree as f64 / trials as f64;
    if frac < 0.999 {
        return Err(format!("SCL agrees with ML on {agree}/{trials}"));
    }
    Ok(format!("SCL agrees with ML on {agree}/{trials}"))
}

fn selftest_round_trip() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for k1 in [229, 239, 240] {
        let cfg = ProductCodeConfig::polar_bch(k1, 3.0, 10, 8).map_err(|e| e.to_string())?;
        let bits = (0..cfg.info_bits())
            .map(|_| rng.random_range(0..2u8))
            .collect();
        let info =
            BitMatrix::from_vec(cfg.k_rows(), cfg.k_cols(), bits).map_err(|e| e.to_string())?;
        let frame = cfg.encode(&info).map_err(|e| e.to_string())?;
        let report = cfg
            .hshd_decode(&LlrMatrix::from_bits(&frame, 8.0))
            .map_err(|e| e.to_string())?;
        if report.info != info || !report.converged || report.iterations_used != 1 {
            return Err(format!(
                "noiseless K1={k1} frame not recovered in one iteration"
            ));
        }
    }
    let cfg = ProductCodeConfig::bch_bch(2, 10).map_err(|e| e.to_string())?;
    let bits = (0..cfg.info_bits())
        .map(|_| rng.random_range(0..2u8))
        .collect();
    let info = BitMatrix::from_vec(cfg.k_rows(), cfg.k_cols(), bits).map_err(|e| e.to_string())?;
    let frame = cfg.encode(&info).map_err(|e| e.to_string())?;
    let report = cfg.ibdd_decode(&frame).map_err(|e| e.to_string())?;
    if report.info != info || !report.converged {
        return Err("noiseless BCH-BCH frame not recovered".into());
    }
    Ok("noiseless frames recovered for K1 in {229, 239, 240} and BCH-BCH".into())
}

/// Exhaustive small-code checks of every codec component.
pub fn codec_selftest(fault: Fault) -> SelftestReport {
    SelftestReport {
        suites: vec![
            suite("galois", selftest_galois(fault)),
            suite("bch", selftest_bch()),
            suite("scl", selftest_scl()),
            suite("round-trip", selftest_round_trip()),
        ],
    }
}
