//! Arithmetic over GF(2^m) in polynomial basis.
//!
//! Elements are stored as integers whose bit `i` is the coefficient of `x^i`.
//! Addition is XOR; multiplication and inversion go through log/antilog
//! tables built once from a primitive polynomial.

use thiserror::Error;

/// Field element in polynomial basis.
pub type Gf = u16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GaloisError {
    #[error("extension degree {0} outside supported range 2..=16")]
    UnsupportedDegree(u32),
    #[error("polynomial {poly:#x} does not have degree {m}")]
    DegreeMismatch { m: u32, poly: u32 },
    #[error("polynomial {0:#x} is not primitive")]
    NonPrimitivePolynomial(u32),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}

/// Conventional primitive polynomial for `m`, as a bitmask including the `x^m` term.
pub fn default_primitive_poly(m: u32) -> Option<u32> {
    let p = match m {
        2 => 0x7,
        3 => 0xb,
        4 => 0x13,
        5 => 0x25,
        6 => 0x43,
        7 => 0x89,
        8 => 0x11d,
        9 => 0x211,
        10 => 0x409,
        11 => 0x805,
        12 => 0x1053,
        13 => 0x201b,
        14 => 0x4443,
        15 => 0x8003,
        16 => 0x1100b,
        _ => return None,
    };
    Some(p)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    m: u32,
    primitive_poly: u32,
    /// `log[a]` for nonzero `a`; `log[0]` is unused.
    log: Vec<u16>,
    /// `antilog[i] = alpha^i` for `i` in `0..2*(2^m - 1)`, doubled so that
    /// `log a + log b` indexes without a reduction.
    antilog: Vec<Gf>,
}

impl GaloisField {
    /// Builds the field from `primitive_poly`, which must be monic of degree `m`
    /// and primitive.
    pub fn new(m: u32, primitive_poly: u32) -> Result<Self, GaloisError> {
        if !(2..=16).contains(&m) {
            return Err(GaloisError::UnsupportedDegree(m));
        }
        if primitive_poly >> m != 1 {
            return Err(GaloisError::DegreeMismatch {
                m,
                poly: primitive_poly,
            });
        }
        let order = (1usize << m) - 1;
        let mut log = vec![0u16; order + 1];
        let mut antilog = vec![0 as Gf; 2 * order];
        let mut seen = vec![false; order + 1];
        let mut x: u32 = 1;
        for i in 0..order {
            if seen[x as usize] {
                // alpha^i revisited an earlier power before 2^m - 1 steps
                return Err(GaloisError::NonPrimitivePolynomial(primitive_poly));
            }
            seen[x as usize] = true;
            antilog[i] = x as Gf;
            log[x as usize] = i as u16;
            x <<= 1;
            if x >> m & 1 == 1 {
                x ^= primitive_poly;
            }
        }
        if x != 1 {
            return Err(GaloisError::NonPrimitivePolynomial(primitive_poly));
        }
        for i in order..2 * order {
            antilog[i] = antilog[i - order];
        }
        Ok(Self {
            m,
            primitive_poly,
            log,
            antilog,
        })
    }

    /// Field with the conventional primitive polynomial for `m`.
    pub fn with_default_poly(m: u32) -> Result<Self, GaloisError> {
        let poly = default_primitive_poly(m).ok_or(GaloisError::UnsupportedDegree(m))?;
        Self::new(m, poly)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    /// Number of elements, `2^m`.
    pub fn size(&self) -> usize {
        1 << self.m
    }

    /// Order of the multiplicative group, `2^m - 1`.
    pub fn order(&self) -> usize {
        (1 << self.m) - 1
    }

    #[inline]
    pub fn add(&self, a: Gf, b: Gf) -> Gf {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Gf, b: Gf) -> Gf {
        if a == 0 || b == 0 {
            return 0;
        }
        self.antilog[self.log[a as usize] as usize + self.log[b as usize] as usize]
    }

    pub fn inv(&self, a: Gf) -> Result<Gf, GaloisError> {
        if a == 0 {
            return Err(GaloisError::ZeroInverse);
        }
        let l = self.log[a as usize] as usize;
        Ok(self.antilog[(self.order() - l) % self.order()])
    }

    pub fn div(&self, a: Gf, b: Gf) -> Result<Gf, GaloisError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `alpha^e` for any integer exponent.
    #[inline]
    pub fn alpha_pow(&self, e: i64) -> Gf {
        let order = self.order() as i64;
        self.antilog[e.rem_euclid(order) as usize]
    }

    /// `a^e`, with `0^0 = 1`.
    pub fn pow(&self, a: Gf, e: u64) -> Gf {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = self.log[a as usize] as u64;
        self.antilog[((l * e) % self.order() as u64) as usize]
    }

    /// Discrete logarithm base alpha; `None` for zero.
    pub fn log(&self, a: Gf) -> Option<u16> {
        (a != 0).then(|| self.log[a as usize])
    }

    /// Inverse of [`GaloisField::log`].
    pub fn antilog(&self, i: u16) -> Gf {
        self.antilog[i as usize % self.order()]
    }

    /// Returns a copy with one antilog entry overwritten. Used only by the
    /// fault-injection path of the self test.
    #[doc(hidden)]
    pub fn with_corrupted_antilog(&self, index: usize) -> Self {
        let mut f = self.clone();
        let order = f.order();
        let i = index % order;
        let bad = f.antilog[i] ^ 1;
        f.antilog[i] = bad;
        f.antilog[i + order] = bad;
        f
    }
}
