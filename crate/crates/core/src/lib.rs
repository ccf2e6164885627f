//! Codebook-based multicarrier CDMA for sporadic grant-free uplink.
//!
//! Each user owns a codebook of circular shifts of a random unit-circle
//! spreading sequence, and a group of coded bits selects a codeword
//! directly instead of being PSK-modulated and spread. The receiver
//! detects activity and data jointly with a modified group matching
//! pursuit that picks the nearest codeword rather than solving a
//! least-squares problem. A conventional PSK + group OMP chain is
//! included as the baseline, together with a reproducible Monte-Carlo
//! harness.
//!
//! Module map:
//!
//! * [`codebook`]: base sequences, shift-pattern design, codebooks and
//!   coherence metrics.
//! * [`phy_tx`]: convolutional coding, interleaving, bit packing, direct
//!   and conventional spreading.
//! * [`channel`]: Bernoulli activity, block-fading channel, superposition
//!   and AWGN.
//! * [`rx_mud`]: the greedy detectors, Viterbi decoding and operation
//!   counting.
//! * [`harness`]: configuration, trials, sweeps and output files.

pub mod channel;
pub mod codebook;
mod error;
pub mod harness;
pub mod linalg;
pub mod phy_tx;
pub mod rx_mud;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Hard bits are stored one per byte, value 0 or 1.
pub type Bit = u8;
