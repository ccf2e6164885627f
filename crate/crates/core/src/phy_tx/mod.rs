//! Per-user transmit chain.
//!
//! Information bits are convolutionally encoded, interleaved and packed
//! into `M`-ary symbols. The direct scheme maps each symbol straight to a
//! codeword of the user's codebook; the conventional scheme PSK-modulates
//! the symbol and scales the user's base sequence with it. Both put unit
//! energy into every transmitted column.

mod conv;
mod interleave;
mod mapping;
mod spread;

use num_complex::Complex64;

use crate::codebook::{Codebook, SpreadSequence};
use crate::linalg::{col, CMatrix};
use crate::{Bit, Result};

pub use conv::{coded_len, conv_encode, CONSTRAINT_LEN, GENERATORS, STATES, TAIL_BITS};
pub(crate) use conv::{branch_output, next_state};
pub use interleave::{deinterleave, interleave, permutation};
pub use mapping::{
    bits_per_symbol, bits_to_symbols, gray, gray_inverse, psk_demodulate, psk_modulate, psk_point,
    symbols_for_bits, symbols_to_bits,
};
pub use spread::{spread_conventional, spread_direct};

/// Which transmit/receive chain a frame goes through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Codebook-based symbol-to-sequence spreading.
    Direct,
    /// PSK modulation followed by spreading with the base sequence.
    Conventional,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Direct => "direct",
            Scheme::Conventional => "conventional",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One user's frame at every stage before spreading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserFrame {
    pub info_bits: Vec<Bit>,
    /// Encoded and interleaved bits, before padding.
    pub coded_bits: Vec<Bit>,
    /// Packed symbols in `0..M`.
    pub symbols: Vec<usize>,
}

impl UserFrame {
    pub fn encode(info_bits: Vec<Bit>, order: usize, interleaver_seed: u64) -> Result<Self> {
        let coded = conv_encode(&info_bits)?;
        let coded_bits = interleave(&coded, interleaver_seed)?;
        let symbols = bits_to_symbols(&coded_bits, order)?;
        Ok(Self {
            info_bits,
            coded_bits,
            symbols,
        })
    }
}

/// `N x L_d` transmitted chips, one OFDM symbol per column.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadFrame {
    chips: CMatrix,
}

impl SpreadFrame {
    pub fn new(chips: CMatrix) -> Self {
        Self { chips }
    }

    pub fn chips(&self) -> &CMatrix {
        &self.chips
    }

    pub fn seq_len(&self) -> usize {
        self.chips.nrows()
    }

    pub fn symbols(&self) -> usize {
        self.chips.ncols()
    }

    pub fn column(&self, l: usize) -> &[Complex64] {
        col(&self.chips, l)
    }
}

/// Runs the transmit chain of one user for the given scheme.
pub fn transmit(frame: &UserFrame, scheme: Scheme, cb: &Codebook, base: &SpreadSequence) -> Result<SpreadFrame> {
    match scheme {
        Scheme::Direct => spread_direct(&frame.symbols, cb),
        Scheme::Conventional => {
            let order = cb.order();
            Ok(spread_conventional(&psk_modulate(&frame.symbols, order)?, base))
        }
    }
}
