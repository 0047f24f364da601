//! Hybrid Polar-BCH product codes.
//!
//! Rows are systematic polar codes decoded by successive cancellation list
//! decoding, columns are extended BCH codes decoded by bounded-distance
//! decoding, and the two exchange information through additive LLR updates
//! at the positions where they disagree. BCH-BCH product codes with iterative
//! BDD and soft-aided bit marking are provided as baselines, together with a
//! 16QAM channel model and a Monte Carlo BER harness.

pub mod bch;
pub mod galois;
pub mod modem;
pub mod polar;
pub mod product;
pub mod sim;

/// A hard bit, always 0 or 1.
pub type Bit = u8;
