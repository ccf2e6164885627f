//! Joint activity and data detection.
//!
//! * [`gmp_detect`]: modified group matching pursuit for the direct scheme.
//!   Each iteration picks the user whose codebook best explains the
//!   residual, decides that user's symbols as the nearest codewords and
//!   subtracts them. No least-squares step is involved.
//! * [`gomp_detect`]: group OMP for the conventional scheme, with joint
//!   least-squares re-estimation of the detected users and a final PSK
//!   decision.
//! * [`omp_reference`]: textbook OMP, kept as a test oracle.
//! * [`viterbi_decode`]: hard-decision decoder for the 133/171 code.
//! * [`count_expected_ops`]: closed-form receiver operation counts.
//!
//! Both detectors assume perfect channel knowledge for every user and
//! use the channel of the fading block that contains each OFDM symbol.

mod gmp;
mod gomp;
mod omp;
mod ops;
mod viterbi;

use crate::channel::{ChannelState, ReceivedFrame};
use crate::codebook::{SequenceMatrix, ShiftPattern};
use crate::phy_tx::symbols_to_bits as unpack;
use crate::{Bit, Error, Result};

pub use gmp::{gmp_detect, gmp_detect_with};
pub use gomp::{gomp_detect, gomp_detect_with};
pub use omp::{omp_reference, OmpSolution};
pub use ops::{count_expected_ops, OperationCounters};
pub use viterbi::viterbi_decode;

/// How a user's correlation with the residual is turned into an
/// activity score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivityMetric {
    /// Raw correlation magnitudes. Users behind a strong channel score
    /// high even when silent, so weak active users are picked late or
    /// not at all.
    Raw,
    /// Correlations divided by the norm of the user's effective
    /// signature in that fading block. Every codeword of a user has the
    /// same norm `||h_k|| / sqrt(N)` because the base sequence has
    /// constant modulus, so one weight per user and block suffices.
    #[default]
    Normalized,
}

impl ActivityMetric {
    pub fn name(self) -> &'static str {
        match self {
            ActivityMetric::Raw => "raw",
            ActivityMetric::Normalized => "normalized",
        }
    }

    /// Score weight for a user whose channel in the current block is `h`.
    pub(crate) fn weight(self, h: &[num_complex::Complex64]) -> f64 {
        match self {
            ActivityMetric::Raw => 1.0,
            ActivityMetric::Normalized => {
                let g = crate::linalg::norm(h);
                if g > 0.0 { 1.0 / g } else { 0.0 }
            }
        }
    }
}

/// When a greedy detector stops iterating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StoppingRule {
    /// Run exactly this many iterations (the number of active users is
    /// known to the receiver).
    Oracle { active: usize },
    /// Stop at the first iteration whose residual Frobenius norm drops
    /// below `gamma`; also checked before the first iteration.
    Threshold { gamma: f64 },
}

impl StoppingRule {
    /// Residual threshold just above the noise floor:
    /// `sqrt(N * L_d * sigma^2) * (1 + delta)`.
    pub fn noise_threshold(seq_len: usize, symbols: usize, noise_var: f64, delta: f64) -> Self {
        StoppingRule::Threshold {
            gamma: (seq_len as f64 * symbols as f64 * noise_var).sqrt() * (1.0 + delta),
        }
    }

    pub(crate) fn validate(&self, users: usize) -> Result<()> {
        match *self {
            StoppingRule::Oracle { active } if active > users => Err(Error::invalid(format!(
                "oracle active count {active} exceeds user count {users}"
            ))),
            StoppingRule::Threshold { gamma } if !(gamma > 0.0) => Err(Error::invalid(format!(
                "residual threshold must be positive, got {gamma}"
            ))),
            _ => Ok(()),
        }
    }

    /// Upper bound on iterations for `users` candidates.
    pub(crate) fn max_iterations(&self, users: usize) -> usize {
        match *self {
            StoppingRule::Oracle { active } => active,
            StoppingRule::Threshold { .. } => users,
        }
    }

    pub(crate) fn residual_small(&self, residual_norm: f64) -> bool {
        match *self {
            StoppingRule::Oracle { .. } => false,
            StoppingRule::Threshold { gamma } => residual_norm < gamma,
        }
    }
}

/// Output of either detector.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DetectionResult {
    /// Detected users in detection order.
    pub active_set: Vec<usize>,
    /// `K x L_d` symbol decisions, row-major; rows of undetected users are 0.
    pub symbols: Vec<Vec<usize>>,
    /// `||R||_F` before the first iteration and after each iteration.
    pub residual_norm_history: Vec<f64>,
    pub op_counts: OperationCounters,
    pub order: usize,
}

impl DetectionResult {
    pub(crate) fn empty(users: usize, symbols: usize, order: usize, initial_norm: f64) -> Self {
        Self {
            active_set: Vec::new(),
            symbols: vec![vec![0; symbols]; users],
            residual_norm_history: vec![initial_norm],
            op_counts: OperationCounters::default(),
            order,
        }
    }

    pub fn final_residual_norm(&self) -> f64 {
        *self
            .residual_norm_history
            .last()
            .expect("history always holds the initial norm")
    }

    pub fn is_detected(&self, k: usize) -> bool {
        self.active_set.contains(&k)
    }

    /// Coded bits of user `k` with the packing pad stripped to `coded_len`.
    pub fn coded_bits(&self, k: usize, coded_len: usize) -> Result<Vec<Bit>> {
        symbols_to_bits(&self.symbols[k], self.order, coded_len)
    }

    /// The full `K x L_c` bit matrix.
    pub fn bit_matrix(&self, coded_len: usize) -> Result<Vec<Vec<Bit>>> {
        (0..self.symbols.len())
            .map(|k| self.coded_bits(k, coded_len))
            .collect()
    }
}

/// Decimal-to-binary conversion of one row of symbol decisions, keeping
/// the first `coded_len` bits.
pub fn symbols_to_bits(symbols: &[usize], order: usize, coded_len: usize) -> Result<Vec<Bit>> {
    unpack(symbols, order, Some(coded_len))
}

/// Shape checks shared by both detectors. Returns `(N, K, L_d)`.
pub(crate) fn check_problem(
    received: &ReceivedFrame,
    sequences: &SequenceMatrix,
    channel: &[ChannelState],
) -> Result<(usize, usize, usize)> {
    let n = sequences.seq_len();
    let k = sequences.users();
    let ld = received.symbols();
    if received.seq_len() != n {
        return Err(Error::DimensionMismatch {
            what: "received subcarriers",
            expected: n,
            got: received.seq_len(),
        });
    }
    let first = channel
        .first()
        .ok_or_else(|| Error::invalid("no channel states supplied"))?;
    for st in channel {
        if st.users() != k || st.seq_len() != n {
            return Err(Error::DimensionMismatch {
                what: "channel matrix shape",
                expected: n * k,
                got: st.seq_len() * st.users(),
            });
        }
    }
    if channel.len() * first.block_len < ld {
        return Err(Error::DimensionMismatch {
            what: "OFDM symbols covered by channel blocks",
            expected: ld,
            got: channel.len() * first.block_len,
        });
    }
    Ok((n, k, ld))
}

pub(crate) fn check_patterns(patterns: &[ShiftPattern], users: usize, seq_len: usize) -> Result<usize> {
    if patterns.len() != users {
        return Err(Error::DimensionMismatch {
            what: "shift patterns",
            expected: users,
            got: patterns.len(),
        });
    }
    let order = patterns[0].order();
    for p in patterns {
        if p.order() != order {
            return Err(Error::DimensionMismatch {
                what: "pattern length",
                expected: order,
                got: p.order(),
            });
        }
        if let Some(&bad) = p.shifts().iter().find(|&&j| j >= seq_len) {
            return Err(Error::invalid(format!("shift {bad} out of range for N = {seq_len}")));
        }
    }
    Ok(order)
}
