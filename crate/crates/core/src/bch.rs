//! Narrow-sense binary BCH codes, optionally extended by an overall parity bit.
//!
//! Encoding is systematic. Decoding is bounded-distance: syndromes, then
//! Berlekamp-Massey for the error locator, then a Chien search. Any
//! inconsistency is reported as a decoding failure and the word is left
//! untouched.
//!
//! Codeword layout for an `(n, k)` base code with `c(x) = x^(n-k) m(x) + r(x)`:
//! positions `0..k` hold the message coefficients `m_0..m_(k-1)` (exponents
//! `n-k..n`), positions `k..n` hold the parity coefficients from `x^(n-k-1)`
//! down to `x^0`, and position `n` (extended codes only) holds the overall
//! even-parity bit.

use crate::galois::{GaloisField, Gf};
use crate::Bit;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BchError {
    #[error("correction radius t={t} is not valid for base length n={n}")]
    InvalidRadius { t: usize, n: usize },
    #[error("expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BddStatus {
    Success,
    Failure,
}

/// Result of one bounded-distance decoding attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BddOutcome {
    pub word: Vec<Bit>,
    pub status: BddStatus,
    /// Corrected positions, ascending.
    pub flipped_positions: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct BchCode {
    field: GaloisField,
    n: usize,
    k: usize,
    t: usize,
    /// Generator coefficients, index = degree.
    generator: Vec<Bit>,
    extended: bool,
    /// Parity bits contributed by message bit `j`, laid out like positions `k..n`.
    parity_rows: Vec<Vec<Bit>>,
    /// `alpha^(j * exp(p))` for odd `j = 1, 3, .., 2t-1`, row-major by position.
    syndrome_table: Vec<Gf>,
}

impl BchCode {
    /// Builds the narrow-sense code with roots `alpha^1..alpha^(2t)`.
    pub fn new(field: GaloisField, t: usize, extended: bool) -> Result<Self, BchError> {
        let n = field.order();
        if t == 0 || 2 * t >= n {
            return Err(BchError::InvalidRadius { t, n });
        }
        let generator = generator_poly(&field, t);
        let deg = generator.len() - 1;
        if deg >= n {
            return Err(BchError::InvalidRadius { t, n });
        }
        let k = n - deg;

        let parity_len = n - k;
        let mut parity_rows = Vec::with_capacity(k);
        for j in 0..k {
            // remainder of x^(n-k+j) modulo g
            let rem = poly_mod_monomial(&generator, parity_len + j);
            let mut row = vec![0; parity_len];
            for (e, &c) in rem.iter().enumerate() {
                row[parity_len - 1 - e] = c;
            }
            parity_rows.push(row);
        }

        let odd = t;
        let mut syndrome_table = vec![0 as Gf; n * odd];
        for p in 0..n {
            let e = exponent_of(p, n, k) as i64;
            for idx in 0..odd {
                let j = (2 * idx + 1) as i64;
                syndrome_table[p * odd + idx] = field.alpha_pow(j * e);
            }
        }

        Ok(Self {
            field,
            n,
            k,
            t,
            generator,
            extended,
            parity_rows,
            syndrome_table,
        })
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    /// Base (cyclic) length `2^m - 1`.
    pub fn base_len(&self) -> usize {
        self.n
    }

    /// Transmitted length, `n` or `n + 1` when extended.
    pub fn len(&self) -> usize {
        self.n + self.extended as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn extended(&self) -> bool {
        self.extended
    }

    /// Generator coefficients indexed by degree.
    pub fn generator(&self) -> &[Bit] {
        &self.generator
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.len() as f64
    }

    /// Systematic encoding; `info` occupies the first `k` positions.
    pub fn encode(&self, info: &[Bit]) -> Result<Vec<Bit>, BchError> {
        if info.len() != self.k {
            return Err(BchError::LengthMismatch {
                expected: self.k,
                got: info.len(),
            });
        }
        let mut word = vec![0; self.len()];
        self.encode_into(info, &mut word);
        Ok(word)
    }

    /// Encodes into a buffer of length [`BchCode::len`] without checks on `info`.
    pub(crate) fn encode_into(&self, info: &[Bit], word: &mut [Bit]) {
        word[..self.k].copy_from_slice(info);
        let parity = &mut word[self.k..self.n];
        parity.fill(0);
        for (j, &b) in info.iter().enumerate() {
            if b & 1 == 1 {
                for (p, &r) in parity.iter_mut().zip(&self.parity_rows[j]) {
                    *p ^= r;
                }
            }
        }
        if self.extended {
            word[self.n] = word[..self.n].iter().fold(0, |a, &b| a ^ b);
        }
    }

    /// True when `word` has zero syndrome (and even weight, if extended).
    pub fn is_codeword(&self, word: &[Bit]) -> bool {
        if word.len() != self.len() {
            return false;
        }
        if self.syndromes(word).iter().any(|&s| s != 0) {
            return false;
        }
        !self.extended || word.iter().fold(0, |a, &b| a ^ b) == 0
    }

    /// Syndromes `S_1..S_2t` of the base-code part of `word`.
    pub fn syndromes(&self, word: &[Bit]) -> Vec<Gf> {
        let t = self.t;
        let mut odd = vec![0 as Gf; t];
        for (p, &b) in word[..self.n].iter().enumerate() {
            if b & 1 == 1 {
                let row = &self.syndrome_table[p * t..(p + 1) * t];
                for (s, &v) in odd.iter_mut().zip(row) {
                    *s ^= v;
                }
            }
        }
        let mut s = vec![0 as Gf; 2 * t];
        for idx in 0..t {
            s[2 * idx] = odd[idx];
        }
        // S_2j = S_j^2 over characteristic two
        for j in (2..=2 * t).step_by(2) {
            let half = s[j / 2 - 1];
            s[j - 1] = self.field.mul(half, half);
        }
        s
    }

    /// Bounded-distance decoding core: positions to flip, or `None` on failure.
    pub fn locate_errors(&self, word: &[Bit]) -> Option<Vec<usize>> {
        debug_assert_eq!(word.len(), self.len());
        let s = self.syndromes(word);
        let mut flips = if s.iter().all(|&x| x == 0) {
            Vec::new()
        } else {
            let locator = self.berlekamp_massey(&s);
            let degree = locator.len() - 1;
            if degree == 0 || degree > self.t {
                return None;
            }
            let roots = self.chien_search(&locator);
            if roots.len() != degree {
                return None;
            }
            let mut positions: Vec<usize> =
                roots.into_iter().map(|e| self.position_of(e)).collect();
            positions.sort_unstable();
            positions
        };
        if self.extended {
            let parity = word.iter().fold(0u8, |a, &b| a ^ (b & 1)) as usize;
            if parity != flips.len() % 2 {
                flips.push(self.n);
            }
        }
        (flips.len() <= self.t).then_some(flips)
    }

    /// Bounded-distance decoding. On failure the input is returned unchanged.
    pub fn bdd_decode(&self, word: &[Bit]) -> Result<BddOutcome, BchError> {
        if word.len() != self.len() {
            return Err(BchError::LengthMismatch {
                expected: self.len(),
                got: word.len(),
            });
        }
        let mut out = word.to_vec();
        Ok(match self.locate_errors(word) {
            Some(flips) => {
                for &p in &flips {
                    out[p] ^= 1;
                }
                BddOutcome {
                    word: out,
                    status: BddStatus::Success,
                    flipped_positions: flips,
                }
            }
            None => BddOutcome {
                word: out,
                status: BddStatus::Failure,
                flipped_positions: Vec::new(),
            },
        })
    }

    /// Error-locator polynomial, coefficients by degree, trimmed.
    fn berlekamp_massey(&self, s: &[Gf]) -> Vec<Gf> {
        let f = &self.field;
        let two_t = s.len();
        let mut c = vec![0 as Gf; two_t + 1];
        let mut b = vec![0 as Gf; two_t + 1];
        c[0] = 1;
        b[0] = 1;
        let mut l = 0usize;
        let mut shift = 1usize;
        let mut last_d: Gf = 1;
        for r in 0..two_t {
            let mut d = s[r];
            for i in 1..=l {
                d ^= f.mul(c[i], s[r - i]);
            }
            if d == 0 {
                shift += 1;
                continue;
            }
            let coef = f.div(d, last_d).expect("last discrepancy is nonzero");
            if 2 * l <= r {
                let prev = c.clone();
                for i in 0..=two_t - shift {
                    c[i + shift] ^= f.mul(coef, b[i]);
                }
                l = r + 1 - l;
                b = prev;
                last_d = d;
                shift = 1;
            } else {
                for i in 0..=two_t - shift {
                    c[i + shift] ^= f.mul(coef, b[i]);
                }
                shift += 1;
            }
        }
        c.truncate(l + 1);
        while c.len() > 1 && *c.last().unwrap() == 0 {
            c.pop();
        }
        c
    }

    /// Exponents `e` in `0..n` with `locator(alpha^-e) = 0`.
    fn chien_search(&self, locator: &[Gf]) -> Vec<usize> {
        let f = &self.field;
        let order = self.n as i64;
        let logs: Vec<Option<u16>> = locator.iter().map(|&c| f.log(c)).collect();
        let mut roots = Vec::with_capacity(locator.len() - 1);
        for e in 0..self.n {
            let mut acc: Gf = 0;
            for (i, l) in logs.iter().enumerate() {
                if let Some(l) = l {
                    acc ^= f.alpha_pow(*l as i64 - (e as i64 * i as i64) % order);
                }
            }
            if acc == 0 {
                roots.push(e);
                if roots.len() == locator.len() - 1 {
                    break;
                }
            }
        }
        roots
    }

    fn position_of(&self, exponent: usize) -> usize {
        let parity_len = self.n - self.k;
        if exponent >= parity_len {
            exponent - parity_len
        } else {
            self.n - 1 - exponent
        }
    }
}

/// Polynomial exponent carried by codeword position `p < n`.
fn exponent_of(p: usize, n: usize, k: usize) -> usize {
    if p < k {
        n - k + p
    } else {
        n - 1 - p
    }
}

/// lcm of the minimal polynomials of `alpha^1..alpha^(2t)`, binary coefficients.
fn generator_poly(field: &GaloisField, t: usize) -> Vec<Bit> {
    let n = field.order();
    let mut in_root_set = vec![false; n];
    for i in 1..=2 * t {
        let mut c = i % n;
        while !in_root_set[c] {
            in_root_set[c] = true;
            c = (2 * c) % n;
        }
    }
    let mut g: Vec<Gf> = vec![1];
    for (e, _) in in_root_set.iter().enumerate().filter(|(_, &r)| r) {
        let root = field.alpha_pow(e as i64);
        // g *= (x + root)
        let mut next = vec![0 as Gf; g.len() + 1];
        for (i, &c) in g.iter().enumerate() {
            next[i + 1] ^= c;
            next[i] ^= field.mul(c, root);
        }
        g = next;
    }
    g.into_iter()
        .map(|c| {
            assert!(c <= 1, "conjugacy classes yield a binary generator");
            c as Bit
        })
        .collect()
}

/// Remainder of `x^e` modulo a monic binary polynomial, coefficients by degree.
fn poly_mod_monomial(g: &[Bit], e: usize) -> Vec<Bit> {
    let deg = g.len() - 1;
    let mut a = vec![0u8; e + 1];
    a[e] = 1;
    for i in (deg..=e).rev() {
        if a[i] == 1 {
            for (j, &c) in g.iter().enumerate() {
                a[i - deg + j] ^= c;
            }
        }
    }
    a.truncate(deg);
    a
}
