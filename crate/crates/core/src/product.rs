//! Product codes and their iterative decoders.
//!
//! A frame is an `N2 x N1` matrix: each of the `N2` rows is a row-code
//! codeword of length `N1` and each of the `N1` columns a column-code
//! codeword of length `N2`. Information occupies the top-left `K2 x K1`
//! systematic block (rows `0..K2`, row-code systematic positions).
//!
//! Three decoders are provided:
//!
//! * [`ProductCodeConfig::hshd_decode`] for polar rows: list-decode every row,
//!   bounded-distance decode every column of the row decisions, and add
//!   `alpha * (-1)^b` to the running LLR wherever the column decision `b`
//!   disagrees with the row decision. Stops when the two agree.
//! * [`ProductCodeConfig::ibdd_decode`] for BCH rows: alternating hard
//!   row/column bounded-distance passes.
//! * [`ProductCodeConfig::sabm_decode`]: the same schedule, with channel
//!   reliabilities used to veto suspicious corrections and to retry failed
//!   components after flipping their weakest bits.

use crate::bch::BchCode;
use crate::galois::GaloisField;
use crate::polar::{PolarCode, ReliabilityDesign, SclDecoder, LLR_CLIP};
use crate::Bit;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProductError {
    #[error("expected a {expected_rows}x{expected_cols} matrix, got {rows}x{cols}")]
    DimensionMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("decoder requires a {expected} row code")]
    WrongRowCodeKind { expected: &'static str },
    #[error("invalid decoder parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone)]
pub enum RowCode {
    Polar(PolarCode),
    Bch(BchCode),
}

impl RowCode {
    pub fn len(&self) -> usize {
        match self {
            RowCode::Polar(c) => c.len(),
            RowCode::Bch(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn k(&self) -> usize {
        match self {
            RowCode::Polar(c) => c.k(),
            RowCode::Bch(c) => c.k(),
        }
    }

    fn encode_into(&self, info: &[Bit], out: &mut [Bit]) {
        match self {
            RowCode::Polar(c) => c.encode_into(info, out),
            RowCode::Bch(c) => c.encode_into(info, out),
        }
    }

    /// Codeword positions carrying information, ascending.
    pub fn systematic_positions(&self) -> Vec<usize> {
        match self {
            RowCode::Polar(c) => c.info_set().to_vec(),
            RowCode::Bch(c) => (0..c.k()).collect(),
        }
    }
}

/// Soft-aided bit-marking parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SabmParams {
    /// Bits with `|LLR|` at or above this are marked highly reliable.
    pub hrb_threshold: f64,
    /// Number of least reliable bits per component tried on a failed decoding.
    pub lrb_count: usize,
}

impl Default for SabmParams {
    fn default() -> Self {
        Self {
            hrb_threshold: 12.0,
            lrb_count: 2,
        }
    }
}

/// Row-major bit matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<Bit>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            bits: vec![0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, bits: Vec<Bit>) -> Result<Self, ProductError> {
        if bits.len() != rows * cols {
            return Err(ProductError::DimensionMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: bits.len() / cols.max(1),
                cols,
            });
        }
        Ok(Self { rows, cols, bits })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Bit {
        self.bits[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, b: Bit) {
        self.bits[r * self.cols + c] = b;
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.bits[r * self.cols + c] ^= 1;
    }

    pub fn row(&self, r: usize) -> &[Bit] {
        &self.bits[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Bit] {
        &mut self.bits[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Bit> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn as_slice(&self) -> &[Bit] {
        &self.bits
    }

    pub fn into_vec(self) -> Vec<Bit> {
        self.bits
    }

    /// Number of positions where `self` and `other` differ.
    pub fn distance(&self, other: &BitMatrix) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }

    fn check(&self, rows: usize, cols: usize) -> Result<(), ProductError> {
        if self.rows != rows || self.cols != cols {
            return Err(ProductError::DimensionMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }
}

/// Row-major LLR matrix, `log P(0)/P(1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl LlrMatrix {
    pub fn from_vec(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self, ProductError> {
        if values.len() != rows * cols {
            return Err(ProductError::DimensionMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: values.len() / cols.max(1),
                cols,
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(ProductError::InvalidParameter(format!(
                "non-finite LLR {v}"
            )));
        }
        Ok(Self { rows, cols, values })
    }

    /// `+magnitude` for zeros and `-magnitude` for ones.
    pub fn from_bits(frame: &BitMatrix, magnitude: f64) -> Self {
        Self {
            rows: frame.rows,
            cols: frame.cols,
            values: frame
                .bits
                .iter()
                .map(|&b| if b == 0 { magnitude } else { -magnitude })
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.values[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Sign decisions, ties to zero.
    pub fn hard_decisions(&self) -> BitMatrix {
        BitMatrix {
            rows: self.rows,
            cols: self.cols,
            bits: self.values.iter().map(|&v| (v < 0.0) as Bit).collect(),
        }
    }

    fn check(&self, rows: usize, cols: usize) -> Result<(), ProductError> {
        if self.rows != rows || self.cols != cols {
            return Err(ProductError::DimensionMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }
}

/// One step of the conflict update: `llr + alpha * (-1)^column_bit`, clipped.
#[inline]
pub fn conflict_update(llr: f64, alpha: f64, column_bit: Bit) -> f64 {
    let step = if column_bit == 0 { alpha } else { -alpha };
    (llr + step).clamp(-LLR_CLIP, LLR_CLIP)
}

/// Applies [`conflict_update`] wherever the row and column decisions differ
/// and leaves every other position untouched. Returns the number of conflicts.
pub fn update_conflicts(
    lambda: &mut LlrMatrix,
    row_dec: &BitMatrix,
    col_dec: &BitMatrix,
    alpha: f64,
) -> Result<usize, ProductError> {
    row_dec.check(lambda.rows, lambda.cols)?;
    col_dec.check(lambda.rows, lambda.cols)?;
    let mut dirty = vec![false; lambda.rows];
    Ok(apply_conflicts(lambda, row_dec, col_dec, alpha, &mut dirty))
}

/// [`update_conflicts`] that also marks the affected rows dirty.
fn apply_conflicts(
    lambda: &mut LlrMatrix,
    row_dec: &BitMatrix,
    col_dec: &BitMatrix,
    alpha: f64,
    dirty: &mut [bool],
) -> usize {
    let n1 = lambda.cols;
    let mut conflicts = 0;
    for (i, (&rb, &cb)) in row_dec.bits.iter().zip(&col_dec.bits).enumerate() {
        if rb != cb {
            conflicts += 1;
            lambda.values[i] = conflict_update(lambda.values[i], alpha, cb);
            dirty[i / n1] = true;
        }
    }
    conflicts
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeReport {
    /// `K2 x K1` information estimate.
    pub info: BitMatrix,
    /// Final `N2 x N1` hard frame the information was read from.
    pub frame: BitMatrix,
    pub iterations_used: usize,
    /// Row and column decisions agreed (HSHD) or the frame is a valid
    /// product codeword (iBDD, SABM).
    pub converged: bool,
    /// Per iteration: row/column disagreements (HSHD) or bits changed (iBDD, SABM).
    pub conflict_counts: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ProductCodeConfig {
    pub row_code: RowCode,
    pub col_code: BchCode,
    pub alpha: f64,
    pub l_max: usize,
    pub list_size: usize,
    pub sabm: SabmParams,
}

impl ProductCodeConfig {
    pub fn new(
        row_code: RowCode,
        col_code: BchCode,
        alpha: f64,
        l_max: usize,
        list_size: usize,
    ) -> Result<Self, ProductError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(ProductError::InvalidParameter(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        if l_max == 0 {
            return Err(ProductError::InvalidParameter(
                "l_max must be at least 1".into(),
            ));
        }
        if list_size == 0 || list_size > 64 {
            return Err(ProductError::InvalidParameter(format!(
                "list size {list_size} outside 1..=64"
            )));
        }
        Ok(Self {
            row_code,
            col_code,
            alpha,
            l_max,
            list_size,
            sabm: SabmParams::default(),
        })
    }

    /// Polar `(256, k1)` rows over extended BCH `(256, 239)` columns.
    pub fn polar_bch(
        k1: usize,
        alpha: f64,
        l_max: usize,
        list_size: usize,
    ) -> Result<Self, ProductError> {
        let row = PolarCode::new(256, k1, ReliabilityDesign::default())
            .map_err(|e| ProductError::InvalidParameter(e.to_string()))?;
        Self::new(
            RowCode::Polar(row),
            extended_bch_256(2)?,
            alpha,
            l_max,
            list_size,
        )
    }

    /// Extended BCH `(256, k)` rows with correction radius `row_t` over
    /// extended BCH `(256, 239)` columns.
    pub fn bch_bch(row_t: usize, l_max: usize) -> Result<Self, ProductError> {
        Self::new(
            RowCode::Bch(extended_bch_256(row_t)?),
            extended_bch_256(2)?,
            1.0,
            l_max,
            1,
        )
    }

    pub fn with_sabm(mut self, sabm: SabmParams) -> Self {
        self.sabm = sabm;
        self
    }

    /// `N2`, the number of frame rows.
    pub fn n_rows(&self) -> usize {
        self.col_code.len()
    }

    /// `N1`, the number of frame columns.
    pub fn n_cols(&self) -> usize {
        self.row_code.len()
    }

    pub fn k_rows(&self) -> usize {
        self.col_code.k()
    }

    pub fn k_cols(&self) -> usize {
        self.row_code.k()
    }

    pub fn info_bits(&self) -> usize {
        self.k_rows() * self.k_cols()
    }

    pub fn frame_bits(&self) -> usize {
        self.n_rows() * self.n_cols()
    }

    pub fn rate(&self) -> f64 {
        self.info_bits() as f64 / self.frame_bits() as f64
    }

    /// Row encoding of the `K2` information rows, then column encoding of all `N1` columns.
    pub fn encode(&self, info: &BitMatrix) -> Result<BitMatrix, ProductError> {
        info.check(self.k_rows(), self.k_cols())?;
        let n1 = self.n_cols();
        let n2 = self.n_rows();
        let k2 = self.k_rows();
        let mut frame = BitMatrix::zeros(n2, n1);
        for r in 0..k2 {
            self.row_code.encode_into(info.row(r), frame.row_mut(r));
        }
        let mut col_info = vec![0; k2];
        let mut col_word = vec![0; n2];
        for c in 0..n1 {
            for (r, b) in col_info.iter_mut().enumerate() {
                *b = frame.get(r, c);
            }
            self.col_code.encode_into(&col_info, &mut col_word);
            for r in k2..n2 {
                frame.set(r, c, col_word[r]);
            }
        }
        Ok(frame)
    }

    pub fn extract_info(&self, frame: &BitMatrix) -> Result<BitMatrix, ProductError> {
        frame.check(self.n_rows(), self.n_cols())?;
        let positions = self.row_code.systematic_positions();
        let mut info = BitMatrix::zeros(self.k_rows(), self.k_cols());
        for r in 0..self.k_rows() {
            let row = frame.row(r);
            for (c, &p) in positions.iter().enumerate() {
                info.set(r, c, row[p]);
            }
        }
        Ok(info)
    }

    /// Every row is a row-code codeword and every column a column-code codeword.
    pub fn is_codeword(&self, frame: &BitMatrix) -> bool {
        if frame.check(self.n_rows(), self.n_cols()).is_err() {
            return false;
        }
        let rows_ok = (0..frame.rows()).all(|r| match &self.row_code {
            RowCode::Polar(c) => c.is_codeword(frame.row(r)),
            RowCode::Bch(c) => c.is_codeword(frame.row(r)),
        });
        rows_ok && (0..frame.cols()).all(|c| self.col_code.is_codeword(&frame.column(c)))
    }

    /// Hybrid soft/hard decoding of a polar-row product code.
    pub fn hshd_decode(&self, llrs: &LlrMatrix) -> Result<DecodeReport, ProductError> {
        let RowCode::Polar(polar) = &self.row_code else {
            return Err(ProductError::WrongRowCodeKind { expected: "polar" });
        };
        let n1 = self.n_cols();
        let n2 = self.n_rows();
        llrs.check(n2, n1)?;
        let mut scl = SclDecoder::new(n1, self.list_size)
            .map_err(|e| ProductError::InvalidParameter(e.to_string()))?;
        let mut lambda = llrs.clone();
        for v in lambda.values.iter_mut() {
            *v = v.clamp(-LLR_CLIP, LLR_CLIP);
        }
        let mut row_dec = BitMatrix::zeros(n2, n1);
        let mut col_dec = BitMatrix::zeros(n2, n1);
        let mut dirty = vec![true; n2];
        let mut conflict_counts = Vec::with_capacity(self.l_max);
        let mut column = vec![0; n2];
        let mut converged = false;
        let mut iterations_used = 0;

        for _ in 0..self.l_max {
            iterations_used += 1;
            // rows whose LLRs did not change reproduce their previous decision
            for r in 0..n2 {
                if dirty[r] {
                    let out = scl
                        .decode(polar, lambda.row(r))
                        .map_err(|e| ProductError::InvalidParameter(e.to_string()))?;
                    row_dec.row_mut(r).copy_from_slice(&out.codeword);
                    dirty[r] = false;
                }
            }
            col_dec.bits.copy_from_slice(&row_dec.bits);
            for c in 0..n1 {
                for (r, b) in column.iter_mut().enumerate() {
                    *b = row_dec.get(r, c);
                }
                // failed columns keep the row decision and produce no conflicts
                if let Some(flips) = self.col_code.locate_errors(&column) {
                    for r in flips {
                        col_dec.flip(r, c);
                    }
                }
            }
            let conflicts =
                apply_conflicts(&mut lambda, &row_dec, &col_dec, self.alpha, &mut dirty);
            conflict_counts.push(conflicts);
            if conflicts == 0 {
                converged = true;
                break;
            }
        }

        let info = self.extract_info(&col_dec)?;
        Ok(DecodeReport {
            info,
            frame: col_dec,
            iterations_used,
            converged,
            conflict_counts,
        })
    }

    /// Iterative bounded-distance decoding of a BCH-BCH product code.
    pub fn ibdd_decode(&self, hard: &BitMatrix) -> Result<DecodeReport, ProductError> {
        let RowCode::Bch(row_bch) = &self.row_code else {
            return Err(ProductError::WrongRowCodeKind { expected: "BCH" });
        };
        hard.check(self.n_rows(), self.n_cols())?;
        self.iterate_bdd(row_bch, hard.clone(), None)
    }

    /// Soft-aided bit-marking decoding of a BCH-BCH product code.
    pub fn sabm_decode(&self, llrs: &LlrMatrix) -> Result<DecodeReport, ProductError> {
        let RowCode::Bch(row_bch) = &self.row_code else {
            return Err(ProductError::WrongRowCodeKind { expected: "BCH" });
        };
        llrs.check(self.n_rows(), self.n_cols())?;
        let marks = Marks::new(llrs, &self.sabm);
        self.iterate_bdd(row_bch, llrs.hard_decisions(), Some(&marks))
    }

    fn iterate_bdd(
        &self,
        row_bch: &BchCode,
        mut frame: BitMatrix,
        marks: Option<&Marks>,
    ) -> Result<DecodeReport, ProductError> {
        let n1 = self.n_cols();
        let n2 = self.n_rows();
        let mut row_dirty = vec![true; n2];
        let mut col_dirty = vec![true; n1];
        let mut conflict_counts = Vec::with_capacity(self.l_max);
        let mut iterations_used = 0;
        let mut column = vec![0; n2];

        for _ in 0..self.l_max {
            iterations_used += 1;
            let mut changed = 0;
            for r in 0..n2 {
                if !row_dirty[r] {
                    continue;
                }
                row_dirty[r] = false;
                let flips = match marks {
                    Some(m) => sabm_component(row_bch, frame.row(r), &m.row_view(r), &m.row_lrb[r]),
                    None => row_bch.locate_errors(frame.row(r)).unwrap_or_default(),
                };
                for c in flips {
                    frame.flip(r, c);
                    col_dirty[c] = true;
                    changed += 1;
                }
            }
            for c in 0..n1 {
                if !col_dirty[c] {
                    continue;
                }
                col_dirty[c] = false;
                for (r, b) in column.iter_mut().enumerate() {
                    *b = frame.get(r, c);
                }
                let flips = match marks {
                    Some(m) => {
                        sabm_component(&self.col_code, &column, &m.col_view(c), &m.col_lrb[c])
                    }
                    None => self.col_code.locate_errors(&column).unwrap_or_default(),
                };
                for r in flips {
                    frame.flip(r, c);
                    row_dirty[r] = true;
                    changed += 1;
                }
            }
            conflict_counts.push(changed);
            if changed == 0 {
                break;
            }
        }

        let converged = self.is_codeword(&frame);
        let info = self.extract_info(&frame)?;
        Ok(DecodeReport {
            info,
            frame,
            iterations_used,
            converged,
            conflict_counts,
        })
    }
}

fn extended_bch_256(t: usize) -> Result<BchCode, ProductError> {
    let field = GaloisField::with_default_poly(8)
        .map_err(|e| ProductError::InvalidParameter(e.to_string()))?;
    BchCode::new(field, t, true).map_err(|e| ProductError::InvalidParameter(e.to_string()))
}

/// Per-position reliability marks computed once from the channel LLRs.
struct Marks {
    cols: usize,
    rows: usize,
    hrb: Vec<bool>,
    row_lrb: Vec<Vec<usize>>,
    col_lrb: Vec<Vec<usize>>,
}

impl Marks {
    fn new(llrs: &LlrMatrix, params: &SabmParams) -> Self {
        let (rows, cols) = (llrs.rows, llrs.cols);
        let hrb = llrs
            .values
            .iter()
            .map(|v| v.abs() >= params.hrb_threshold)
            .collect();
        let weakest = |mags: Vec<f64>| -> Vec<usize> {
            let mut idx: Vec<usize> = (0..mags.len()).collect();
            idx.sort_by(|&a, &b| mags[a].total_cmp(&mags[b]).then(a.cmp(&b)));
            idx.truncate(params.lrb_count);
            idx
        };
        let row_lrb = (0..rows)
            .map(|r| weakest(llrs.row(r).iter().map(|v| v.abs()).collect()))
            .collect();
        let col_lrb = (0..cols)
            .map(|c| weakest((0..rows).map(|r| llrs.get(r, c).abs()).collect()))
            .collect();
        Self {
            cols,
            rows,
            hrb,
            row_lrb,
            col_lrb,
        }
    }

    fn row_view(&self, r: usize) -> Vec<bool> {
        self.hrb[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    fn col_view(&self, c: usize) -> Vec<bool> {
        (0..self.rows)
            .map(|r| self.hrb[r * self.cols + c])
            .collect()
    }
}

/// Bit-marked bounded-distance decoding of one component word.
///
/// A correction touching a highly reliable bit is discarded. A failed
/// decoding is retried once per weak position, in order of increasing
/// reliability, with that position flipped; the first acceptable success
/// wins. Returns the positions to flip (empty when the word passes through).
pub fn sabm_component(code: &BchCode, word: &[Bit], hrb: &[bool], lrb: &[usize]) -> Vec<usize> {
    let touches_hrb = |flips: &[usize]| flips.iter().any(|&p| hrb[p]);
    match code.locate_errors(word) {
        Some(flips) if touches_hrb(&flips) => Vec::new(),
        Some(flips) => flips,
        None => {
            let mut trial = word.to_vec();
            for &q in lrb {
                trial[q] ^= 1;
                if let Some(flips) = code.locate_errors(&trial) {
                    // net change relative to the input word
                    let mut net: Vec<usize> = flips.iter().copied().filter(|&p| p != q).collect();
                    if !flips.contains(&q) {
                        net.push(q);
                    }
                    net.sort_unstable();
                    if !touches_hrb(&net) {
                        return net;
                    }
                }
                trial[q] ^= 1;
            }
            Vec::new()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ext_bch16() -> BchCode {
        BchCode::new(GaloisField::with_default_poly(4).unwrap(), 2, true).unwrap()
    }

    fn random_info(cfg: &ProductCodeConfig, rng: &mut ChaCha8Rng) -> BitMatrix {
        let bits = (0..cfg.info_bits())
            .map(|_| rng.random_range(0..2u8))
            .collect();
        BitMatrix::from_vec(cfg.k_rows(), cfg.k_cols(), bits).unwrap()
    }

    fn small_hybrid() -> ProductCodeConfig {
        let row = PolarCode::new(8, 4, ReliabilityDesign::default()).unwrap();
        ProductCodeConfig::new(RowCode::Polar(row), ext_bch16(), 3.0, 10, 16).unwrap()
    }

    fn small_bch_bch() -> ProductCodeConfig {
        ProductCodeConfig::new(RowCode::Bch(ext_bch16()), ext_bch16(), 1.0, 10, 1).unwrap()
    }

    #[test]
    fn conflict_update_step() {
        assert_eq!(conflict_update(1.0, 3.0, 1), -2.0);
        assert_eq!(conflict_update(1.0, 3.0, 0), 4.0);
        assert_eq!(conflict_update(49.0, 3.0, 0), LLR_CLIP);
        assert_eq!(conflict_update(-49.0, 3.0, 1), -LLR_CLIP);
    }

    #[test]
    fn conflicts_touch_only_disagreeing_positions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let values: Vec<f64> = (0..24).map(|_| rng.random_range(-5.0..5.0)).collect();
        let before = LlrMatrix::from_vec(4, 6, values).unwrap();
        let row_dec = before.hard_decisions();
        let mut col_dec = row_dec.clone();
        col_dec.flip(1, 2);
        col_dec.flip(3, 5);
        let mut lambda = before.clone();
        let mut dirty = vec![false; 4];
        let n = apply_conflicts(&mut lambda, &row_dec, &col_dec, 3.0, &mut dirty);
        assert_eq!(n, 2);
        assert_eq!(dirty, vec![false, true, false, true]);
        for r in 0..4 {
            for c in 0..6 {
                if (r, c) == (1, 2) || (r, c) == (3, 5) {
                    let b = col_dec.get(r, c);
                    assert_eq!(lambda.get(r, c), conflict_update(before.get(r, c), 3.0, b));
                } else {
                    assert_eq!(lambda.get(r, c).to_bits(), before.get(r, c).to_bits());
                }
            }
        }
    }

    #[test]
    fn rate_of_full_size_code() {
        let cfg = ProductCodeConfig::polar_bch(239, 3.0, 10, 8).unwrap();
        assert_eq!((cfg.n_rows(), cfg.n_cols()), (256, 256));
        assert!((cfg.rate() - 239.0 * 239.0 / 65536.0).abs() < 1e-15);
        assert!((cfg.rate() - 0.8716).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_parameters() {
        let row = || RowCode::Bch(ext_bch16());
        assert!(ProductCodeConfig::new(row(), ext_bch16(), 0.0, 10, 8).is_err());
        assert!(ProductCodeConfig::new(row(), ext_bch16(), 3.0, 0, 8).is_err());
        assert!(ProductCodeConfig::new(row(), ext_bch16(), 3.0, 10, 0).is_err());
        let cfg = small_bch_bch();
        let wrong = BitMatrix::zeros(7, 6);
        assert!(matches!(
            cfg.encode(&wrong),
            Err(ProductError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            cfg.ibdd_decode(&wrong),
            Err(ProductError::DimensionMismatch { .. })
        ));
        let llrs = LlrMatrix::from_bits(&BitMatrix::zeros(16, 16), 5.0);
        assert!(matches!(
            cfg.hshd_decode(&llrs),
            Err(ProductError::WrongRowCodeKind { .. })
        ));
        let hybrid = small_hybrid();
        let llrs = LlrMatrix::from_bits(&BitMatrix::zeros(16, 8), 5.0);
        assert!(matches!(
            hybrid.sabm_decode(&llrs),
            Err(ProductError::WrongRowCodeKind { .. })
        ));
        assert!(LlrMatrix::from_vec(1, 2, vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn encoded_frames_are_product_codewords() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for cfg in [
            small_hybrid(),
            small_bch_bch(),
            ProductCodeConfig::polar_bch(233, 3.0, 10, 8).unwrap(),
        ] {
            let zero = cfg
                .encode(&BitMatrix::zeros(cfg.k_rows(), cfg.k_cols()))
                .unwrap();
            assert!(zero.as_slice().iter().all(|&b| b == 0));
            assert_eq!(
                cfg.extract_info(&zero).unwrap(),
                BitMatrix::zeros(cfg.k_rows(), cfg.k_cols())
            );
            for _ in 0..3 {
                let info = random_info(&cfg, &mut rng);
                let frame = cfg.encode(&info).unwrap();
                assert!(cfg.is_codeword(&frame));
                assert_eq!(cfg.extract_info(&frame).unwrap(), info);
            }
        }
    }

    #[test]
    fn noiseless_round_trip_every_k1() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k1 in 229..=240 {
            let cfg = ProductCodeConfig::polar_bch(k1, 3.0, 10, 8).unwrap();
            let info = random_info(&cfg, &mut rng);
            let frame = cfg.encode(&info).unwrap();
            let report = cfg.hshd_decode(&LlrMatrix::from_bits(&frame, 6.0)).unwrap();
            assert_eq!(report.info, info, "k1={k1}");
            assert!(report.converged);
            assert_eq!(report.iterations_used, 1);
            assert_eq!(report.conflict_counts, vec![0]);
        }
    }

    /// Transmitted frame plus hard errors on a 3x3 grid, with weak LLRs on the errors.
    fn grid_errors(
        frame: &BitMatrix,
        rows: [usize; 3],
        cols: [usize; 3],
    ) -> (BitMatrix, LlrMatrix) {
        let mut hard = frame.clone();
        let mut llrs = LlrMatrix::from_bits(frame, 8.0);
        for &r in &rows {
            for &c in &cols {
                hard.flip(r, c);
                llrs.set(r, c, -0.5 * llrs.get(r, c).signum());
            }
        }
        (hard, llrs)
    }

    #[test]
    fn hybrid_decoder_clears_pattern_that_stalls_hard_decoding() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let hybrid = small_hybrid();
        let info = random_info(&hybrid, &mut rng);
        let frame = hybrid.encode(&info).unwrap();
        let (_, llrs) = grid_errors(&frame, [1, 4, 9], [0, 3, 6]);
        let report = hybrid.hshd_decode(&llrs).unwrap();
        assert!(report.converged);
        assert_eq!(report.frame, frame);
        assert_eq!(report.info, info);

        let bb = small_bch_bch();
        let info = random_info(&bb, &mut rng);
        let frame = bb.encode(&info).unwrap();
        let (hard, _) = grid_errors(&frame, [1, 4, 9], [0, 3, 6]);
        let report = bb.ibdd_decode(&hard).unwrap();
        assert!(!report.converged);
        assert_ne!(report.frame, frame);
        assert_eq!(report.conflict_counts, vec![0]);
        assert_eq!(report.iterations_used, 1);
    }

    #[test]
    fn hard_decoding_noiseless_and_single_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cfg = small_bch_bch();
        let info = random_info(&cfg, &mut rng);
        let frame = cfg.encode(&info).unwrap();
        let report = cfg.ibdd_decode(&frame).unwrap();
        assert!(report.converged);
        assert_eq!(report.conflict_counts, vec![0]);
        for r in 0..16 {
            for c in 0..16 {
                let mut hard = frame.clone();
                hard.flip(r, c);
                let report = cfg.ibdd_decode(&hard).unwrap();
                assert_eq!(report.frame, frame);
                assert_eq!(report.conflict_counts[0], 1);
                assert!(report.converged);
            }
        }
    }

    #[test]
    fn marking_matches_hard_decoding_without_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cfg = ProductCodeConfig::bch_bch(2, 10).unwrap();
        let info = random_info(&cfg, &mut rng);
        let frame = cfg.encode(&info).unwrap();
        let soft = cfg.sabm_decode(&LlrMatrix::from_bits(&frame, 6.0)).unwrap();
        let hard = cfg.ibdd_decode(&frame).unwrap();
        assert_eq!(soft, hard);
        assert!(soft.converged);
        assert_eq!(soft.info, info);
    }

    /// A weight-6 codeword of the extended (16,7) code.
    fn weight_six_codeword(code: &BchCode) -> Vec<Bit> {
        for m in 1u32..128 {
            let info: Vec<Bit> = (0..7).map(|i| (m >> i & 1) as Bit).collect();
            let word = code.encode(&info).unwrap();
            if word.iter().filter(|&&b| b == 1).count() == 6 {
                return word;
            }
        }
        unreachable!("minimum distance is 6")
    }

    #[test]
    fn reliable_mark_blocks_miscorrection() {
        let code = ext_bch16();
        let c = weight_six_codeword(&code);
        let support: Vec<usize> = (0..16).filter(|&i| c[i] == 1).collect();
        // zero codeword sent; four errors land on four positions of `c`
        let mut received = vec![0; 16];
        for &p in &support[..4] {
            received[p] = 1;
        }
        let plain = code.locate_errors(&received).expect("within radius of c");
        assert_eq!(plain, support[4..].to_vec());

        let mut hrb = vec![false; 16];
        hrb[support[5]] = true;
        assert!(sabm_component(&code, &received, &hrb, &[]).is_empty());
        let none = vec![false; 16];
        assert_eq!(sabm_component(&code, &received, &none, &[]), plain);
    }

    #[test]
    fn weakest_bit_flip_rescues_failed_decoding() {
        let code = ext_bch16();
        let errors = [2usize, 7, 12];
        let mut received = vec![0; 16];
        for &p in &errors {
            received[p] = 1;
        }
        assert_eq!(code.locate_errors(&received), None);

        let mut llrs =
            LlrMatrix::from_bits(&BitMatrix::from_vec(1, 16, received.clone()).unwrap(), 6.0);
        llrs.set(0, 7, -0.1);
        llrs.set(0, 3, 0.3);
        let marks = Marks::new(&llrs, &SabmParams::default());
        assert_eq!(marks.row_lrb[0], vec![7, 3]);
        let hrb = vec![false; 16];
        let flips = sabm_component(&code, &received, &hrb, &marks.row_lrb[0]);
        assert_eq!(flips, errors.to_vec());
        // without the retry the word passes through
        assert!(sabm_component(&code, &received, &hrb, &[]).is_empty());
    }

    #[test]
    fn decoding_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cfg = ProductCodeConfig::polar_bch(239, 3.0, 10, 8).unwrap();
        let info = random_info(&cfg, &mut rng);
        let frame = cfg.encode(&info).unwrap();
        let mut llrs = LlrMatrix::from_bits(&frame, 2.0);
        for v in llrs.values.iter_mut() {
            *v += rng.random_range(-2.6..2.6);
        }
        let a = cfg.hshd_decode(&llrs).unwrap();
        let b = cfg.hshd_decode(&llrs).unwrap();
        assert_eq!(a, b);
        assert!(a.iterations_used <= cfg.l_max);
        if a.converged {
            assert_eq!(*a.conflict_counts.last().unwrap(), 0);
        }
    }
}
