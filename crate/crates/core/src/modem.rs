//! 16QAM with per-axis Gray labels, AWGN, recorded-noise replay, soft
//! demapping, and the frame block interleaver.

use crate::Bit;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::io::{Read, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModemError {
    #[error("bit count {0} is not a multiple of 4")]
    LengthNotDivisibleBy4(usize),
    #[error("noise variance must be positive, got {0}")]
    NonPositiveVariance(f64),
    #[error("noise record is empty")]
    EmptyRecord,
    #[error("expected {expected} elements, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("noise record has wrong magic bytes")]
    BadMagic,
    #[error("noise record truncated: expected {expected} bytes of samples, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("noise record contains a non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Amplitude levels per axis, indexed by the two-bit label `b_hi b_lo`.
const LEVEL: [f64; 4] = [-3.0, -1.0, 3.0, 1.0];

fn scale() -> f64 {
    1.0 / 10f64.sqrt()
}

#[inline]
fn axis_level(hi: Bit, lo: Bit) -> f64 {
    LEVEL[((hi << 1) | lo) as usize] * scale()
}

/// Maps groups of four bits `b0 b1 b2 b3` to `(b0 b1) -> I`, `(b2 b3) -> Q`, unit energy.
pub fn map_16qam(bits: &[Bit]) -> Result<Vec<Complex64>, ModemError> {
    if !bits.len().is_multiple_of(4) {
        return Err(ModemError::LengthNotDivisibleBy4(bits.len()));
    }
    Ok(bits
        .chunks_exact(4)
        .map(|b| Complex64::new(axis_level(b[0], b[1]), axis_level(b[2], b[3])))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DemapMode {
    #[default]
    Exact,
    MaxLog,
}

/// Per-axis LLRs `(hi, lo)` for one real coordinate.
fn axis_llrs(y: f64, n0: f64, mode: DemapMode) -> (f64, f64) {
    let s = scale();
    // metrics for the levels -3, -1, +1, +3
    let m = [-3.0, -1.0, 1.0, 3.0].map(|a: f64| -(y - a * s).powi(2) / n0);
    // hi = 0 on {-3, -1}; lo = 0 on {-3, +3}
    let combine = |a: f64, b: f64| match mode {
        DemapMode::Exact => {
            let hi = a.max(b);
            hi + (-(a - b).abs()).exp().ln_1p()
        }
        DemapMode::MaxLog => a.max(b),
    };
    let hi = combine(m[0], m[1]) - combine(m[2], m[3]);
    let lo = combine(m[0], m[3]) - combine(m[1], m[2]);
    (hi, lo)
}

/// Bit LLRs `log P(0)/P(1)` for complex noise of total variance `n0`.
pub fn demap_16qam(
    symbols: &[Complex64],
    n0: f64,
    mode: DemapMode,
) -> Result<Vec<f64>, ModemError> {
    if !(n0 > 0.0) {
        return Err(ModemError::NonPositiveVariance(n0));
    }
    let mut out = Vec::with_capacity(symbols.len() * 4);
    for y in symbols {
        let (a, b) = axis_llrs(y.re, n0, mode);
        let (c, d) = axis_llrs(y.im, n0, mode);
        out.extend([a, b, c, d]);
    }
    Ok(out)
}

/// `N0` for unit symbol energy; zero for an infinite SNR.
pub fn noise_n0(es_n0_db: f64) -> f64 {
    if es_n0_db == f64::INFINITY {
        0.0
    } else {
        10f64.powf(-es_n0_db / 10.0)
    }
}

/// Adds circular Gaussian noise of total variance `N0` drawn from `rng`.
pub fn add_awgn<R: Rng + ?Sized>(symbols: &mut [Complex64], es_n0_db: f64, rng: &mut R) {
    let sigma = (noise_n0(es_n0_db) / 2.0).sqrt();
    for s in symbols.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        if sigma > 0.0 {
            *s += Complex64::new(re, im) * sigma;
        }
    }
}

/// Seeded form of [`add_awgn`].
pub fn awgn(symbols: &[Complex64], es_n0_db: f64, seed: u64) -> Vec<Complex64> {
    let mut out = symbols.to_vec();
    add_awgn(&mut out, es_n0_db, &mut ChaCha8Rng::seed_from_u64(seed));
    out
}

const MAGIC: &[u8; 8] = b"NOISREC1";

/// Captured channel noise samples.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRecord {
    samples: Vec<Complex64>,
    source_power: f64,
}

impl NoiseRecord {
    pub fn new(samples: Vec<Complex64>) -> Result<Self, ModemError> {
        if samples.is_empty() {
            return Err(ModemError::EmptyRecord);
        }
        if let Some(i) = samples
            .iter()
            .position(|s| !s.re.is_finite() || !s.im.is_finite())
        {
            return Err(ModemError::NonFiniteSample(i));
        }
        let source_power = samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / samples.len() as f64;
        Ok(Self {
            samples,
            source_power,
        })
    }

    /// Noise estimate `y - x` from received and transmitted symbols.
    pub fn from_received(received: &[Complex64], sent: &[Complex64]) -> Result<Self, ModemError> {
        if received.len() != sent.len() {
            return Err(ModemError::DimensionMismatch {
                expected: sent.len(),
                got: received.len(),
            });
        }
        Self::new(received.iter().zip(sent).map(|(y, x)| y - x).collect())
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn source_power(&self) -> f64 {
        self.source_power
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), ModemError> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.samples.len() as u32).to_le_bytes())?;
        for s in &self.samples {
            w.write_all(&(s.re as f32).to_le_bytes())?;
            w.write_all(&(s.im as f32).to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, ModemError> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() < 12 || &bytes[..8] != MAGIC {
            return Err(ModemError::BadMagic);
        }
        let count = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
        let payload = &bytes[12..];
        if payload.len() < count * 8 {
            return Err(ModemError::Truncated {
                expected: count * 8,
                got: payload.len(),
            });
        }
        let f = |b: &[u8]| f32::from_le_bytes(b.try_into().expect("4 bytes")) as f64;
        let samples = payload[..count * 8]
            .chunks_exact(8)
            .map(|c| Complex64::new(f(&c[..4]), f(&c[4..])))
            .collect();
        Self::new(samples)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModemError> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModemError> {
        Self::read_from(std::fs::File::open(path)?)
    }
}

/// Adds the record's samples cyclically from `offset`, rescaled to mean
/// power `target_n0`. Returns the starting offset actually used.
pub fn apply_noise_replay(
    symbols: &mut [Complex64],
    record: &NoiseRecord,
    target_n0: f64,
    offset: usize,
) -> Result<usize, ModemError> {
    if record.is_empty() {
        return Err(ModemError::EmptyRecord);
    }
    let start = offset % record.len();
    let gain = if target_n0 == record.source_power {
        1.0
    } else {
        (target_n0 / record.source_power).sqrt()
    };
    for (i, s) in symbols.iter_mut().enumerate() {
        *s += record.samples[(start + i) % record.len()] * gain;
    }
    Ok(start)
}

/// Writes `bits` row by row into a `rows x cols` block and reads it column by column.
pub fn interleave<T: Copy>(bits: &[T], rows: usize, cols: usize) -> Result<Vec<T>, ModemError> {
    check_block(bits.len(), rows, cols)?;
    let mut out = Vec::with_capacity(bits.len());
    for c in 0..cols {
        for r in 0..rows {
            out.push(bits[r * cols + c]);
        }
    }
    Ok(out)
}

/// Inverse of [`interleave`].
pub fn deinterleave<T: Copy + Default>(
    bits: &[T],
    rows: usize,
    cols: usize,
) -> Result<Vec<T>, ModemError> {
    check_block(bits.len(), rows, cols)?;
    let mut out = vec![T::default(); bits.len()];
    for c in 0..cols {
        for r in 0..rows {
            out[r * cols + c] = bits[c * rows + r];
        }
    }
    Ok(out)
}

fn check_block(len: usize, rows: usize, cols: usize) -> Result<(), ModemError> {
    if rows * cols != len {
        return Err(ModemError::DimensionMismatch {
            expected: rows * cols,
            got: len,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::erf::erfc;

    fn approx(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn mapping_examples() {
        let s = scale();
        let x = map_16qam(&[0, 0, 0, 0, 1, 0, 1, 0, 0, 1, 1, 1]).unwrap();
        assert!(approx(x[0], Complex64::new(-3.0 * s, -3.0 * s)));
        assert!(approx(x[1], Complex64::new(3.0 * s, 3.0 * s)));
        assert!(approx(x[2], Complex64::new(-s, s)));
        assert!(matches!(
            map_16qam(&[0, 1, 0]),
            Err(ModemError::LengthNotDivisibleBy4(3))
        ));
    }

    fn all_points() -> Vec<(Vec<Bit>, Complex64)> {
        (0..16u8)
            .map(|v| {
                let bits: Vec<Bit> = (0..4).map(|i| v >> (3 - i) & 1).collect();
                let sym = map_16qam(&bits).unwrap()[0];
                (bits, sym)
            })
            .collect()
    }

    #[test]
    fn constellation_has_unit_energy_and_gray_neighbours() {
        let pts = all_points();
        let energy = pts.iter().map(|(_, s)| s.norm_sqr()).sum::<f64>() / 16.0;
        assert!((energy - 1.0).abs() < 1e-12);
        let d_min = 2.0 * scale();
        for (a, sa) in &pts {
            for (b, sb) in &pts {
                if ((sa - sb).norm() - d_min).abs() < 1e-9 {
                    let hamming = a.iter().zip(b).filter(|(x, y)| x != y).count();
                    assert_eq!(hamming, 1);
                }
            }
        }
    }

    /// Direct sum over all 16 points.
    fn brute_llrs(y: Complex64, n0: f64, max_log: bool) -> Vec<f64> {
        let pts = all_points();
        (0..4)
            .map(|i| {
                let terms = |bit: Bit| -> Vec<f64> {
                    pts.iter()
                        .filter(|(b, _)| b[i] == bit)
                        .map(|(_, s)| -(y - s).norm_sqr() / n0)
                        .collect()
                };
                let agg = |t: Vec<f64>| {
                    let m = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    if max_log {
                        m
                    } else {
                        m + t.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
                    }
                };
                agg(terms(0)) - agg(terms(1))
            })
            .collect()
    }

    /// 41x41 points, offset so that none sits exactly between two levels.
    fn grid() -> Vec<Complex64> {
        let at = |i: usize| -1.5 + 3.0 * i as f64 / 40.0 + 0.0123;
        let mut g = Vec::new();
        for i in 0..41 {
            for j in 0..41 {
                g.push(Complex64::new(at(i), at(j)));
            }
        }
        g
    }

    #[test]
    fn demapper_matches_full_constellation_sum() {
        let g = grid();
        for n0 in [0.02, 0.1, 0.5] {
            for mode in [DemapMode::Exact, DemapMode::MaxLog] {
                let llrs = demap_16qam(&g, n0, mode).unwrap();
                for (k, &y) in g.iter().enumerate() {
                    let want = brute_llrs(y, n0, mode == DemapMode::MaxLog);
                    for i in 0..4 {
                        assert!((llrs[4 * k + i] - want[i]).abs() < 1e-9 * (1.0 + want[i].abs()));
                    }
                }
            }
        }
    }

    #[test]
    fn max_log_gap_is_bounded_and_vanishes() {
        let g = grid();
        let mut prev = f64::INFINITY;
        for n0 in [0.1, 0.01, 0.001] {
            let a = demap_16qam(&g, n0, DemapMode::Exact).unwrap();
            let b = demap_16qam(&g, n0, DemapMode::MaxLog).unwrap();
            let worst = a
                .iter()
                .zip(&b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            assert!(worst <= 2f64.ln() * 7.0);
            assert!(worst <= prev);
            prev = worst;
        }
        assert!(prev < 1e-5, "gap {prev}");
    }

    #[test]
    fn demapper_signs_and_symmetry() {
        for (bits, s) in all_points() {
            let llrs = demap_16qam(&[s], 0.01, DemapMode::Exact).unwrap();
            for i in 0..4 {
                assert_eq!(llrs[i] < 0.0, bits[i] == 1);
            }
        }
        let llrs = demap_16qam(&[Complex64::new(0.0, 0.0)], 0.3, DemapMode::Exact).unwrap();
        assert_eq!(llrs[0], 0.0);
        assert_eq!(llrs[2], 0.0);
        assert!(matches!(
            demap_16qam(&[Complex64::new(0.0, 0.0)], 0.0, DemapMode::Exact),
            Err(ModemError::NonPositiveVariance(_))
        ));
    }

    #[test]
    fn max_log_signs_follow_nearest_point() {
        let pts = all_points();
        for y in grid() {
            let llrs = demap_16qam(&[y], 0.1, DemapMode::MaxLog).unwrap();
            let mut dists: Vec<(f64, &Vec<Bit>)> =
                pts.iter().map(|(b, s)| ((y - s).norm_sqr(), b)).collect();
            dists.sort_by(|a, b| a.0.total_cmp(&b.0));
            if dists[1].0 - dists[0].0 < 1e-9 {
                continue;
            }
            for i in 0..4 {
                if llrs[i].abs() > 1e-9 {
                    assert_eq!(llrs[i] < 0.0, dists[0].1[i] == 1);
                }
            }
        }
    }

    #[test]
    fn awgn_power_and_infinite_snr() {
        let zeros = vec![Complex64::new(0.0, 0.0); 1_000_000];
        let noisy = awgn(&zeros, 10.0, 42);
        let n0 = noise_n0(10.0);
        let p = noisy.iter().map(|s| s.norm_sqr()).sum::<f64>() / noisy.len() as f64;
        assert!((p / n0 - 1.0).abs() < 0.01);
        let per_dim = noisy.iter().map(|s| s.re * s.re).sum::<f64>() / noisy.len() as f64;
        assert!((per_dim / (n0 / 2.0) - 1.0).abs() < 0.01);
        let x = map_16qam(&[1, 0, 1, 1]).unwrap();
        assert_eq!(awgn(&x, f64::INFINITY, 1), x);
        assert_eq!(awgn(&zeros[..10], 5.0, 7), awgn(&zeros[..10], 5.0, 7));
    }

    #[test]
    fn uncoded_error_rate_matches_gray_approximation() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n_bits = 1_000_000;
        let bits: Vec<Bit> = (0..n_bits).map(|_| rng.random_range(0..2u8)).collect();
        let mut sym = map_16qam(&bits).unwrap();
        add_awgn(&mut sym, 12.0, &mut rng);
        let llrs = demap_16qam(&sym, noise_n0(12.0), DemapMode::Exact).unwrap();
        let errors = llrs
            .iter()
            .zip(&bits)
            .filter(|(l, &b)| (**l < 0.0) != (b == 1))
            .count();
        let ber = errors as f64 / n_bits as f64;
        let theory = 0.375 * erfc((10f64.powf(1.2) / 10.0).sqrt());
        assert!((ber / theory - 1.0).abs() < 0.05, "ber {ber} vs {theory}");
    }

    #[test]
    fn noise_record_round_trip_and_rejections() {
        let rec =
            NoiseRecord::new(vec![Complex64::new(0.5, -0.25), Complex64::new(-1.0, 2.0)]).unwrap();
        let mut buf = Vec::new();
        rec.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..8], b"NOISREC1");
        assert_eq!(buf.len(), 12 + 16);
        assert_eq!(NoiseRecord::read_from(&buf[..]).unwrap(), rec);

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(
            NoiseRecord::read_from(&bad[..]),
            Err(ModemError::BadMagic)
        ));
        assert!(matches!(
            NoiseRecord::read_from(&buf[..20]),
            Err(ModemError::Truncated { .. })
        ));
        assert!(matches!(
            NoiseRecord::new(vec![]),
            Err(ModemError::EmptyRecord)
        ));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("noise.bin");
        rec.save(&path).unwrap();
        assert_eq!(NoiseRecord::load(&path).unwrap(), rec);
    }

    #[test]
    fn replay_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let zeros = vec![Complex64::new(0.0, 0.0); 4096];
        let rec = NoiseRecord::new(awgn(&zeros, 3.0, 17)).unwrap();

        let mut verbatim = zeros.clone();
        let start = apply_noise_replay(&mut verbatim, &rec, rec.source_power(), 4096 + 5).unwrap();
        assert_eq!(start, 5);
        for (i, s) in verbatim.iter().enumerate() {
            assert_eq!(*s, rec.samples()[(i + 5) % 4096]);
        }

        let target = rng.random_range(0.01..0.5);
        let mut scaled = zeros.clone();
        apply_noise_replay(&mut scaled, &rec, target, 0).unwrap();
        let p = scaled.iter().map(|s| s.norm_sqr()).sum::<f64>() / 4096.0;
        assert!((p / target - 1.0).abs() < 1e-6);
    }

    #[test]
    fn interleaver_examples() {
        let x: Vec<Bit> = vec![0, 1, 1, 0, 1, 0];
        assert_eq!(interleave(&x, 2, 3).unwrap(), vec![0, 0, 1, 1, 1, 0]);
        assert_eq!(interleave(&x, 1, 6).unwrap(), x);
        assert!(matches!(
            interleave(&x, 2, 2),
            Err(ModemError::DimensionMismatch { .. })
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y: Vec<Bit> = (0..256 * 16).map(|_| rng.random_range(0..2u8)).collect();
        assert_eq!(
            deinterleave(&interleave(&y, 16, 256).unwrap(), 16, 256).unwrap(),
            y
        );
    }

    #[test]
    fn interleaver_is_a_permutation() {
        for rows in 1..=6 {
            for cols in 1..=6 {
                let idx: Vec<usize> = (0..rows * cols).collect();
                let mut p = interleave(&idx, rows, cols).unwrap();
                p.sort_unstable();
                assert_eq!(p, idx);
                assert_eq!(
                    deinterleave(&interleave(&idx, rows, cols).unwrap(), rows, cols).unwrap(),
                    idx
                );
            }
        }
    }
}
