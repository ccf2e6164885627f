//! Spreading sequences, shift patterns and per-user codebooks.
//!
//! A user's base sequence has `N` unit-circle entries scaled by `1/sqrt(N)`.
//! Its codebook holds `M` circular shifts of that sequence; the shift
//! amounts (the shift pattern) are picked greedily so the shifted copies
//! correlate as little as possible with the ones already chosen. A data
//! symbol `d` in `0..M` selects codeword `d`, i.e. the base sequence
//! shifted by `pattern.shifts()[d]`.

mod snapshot;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{cdot, col, CMatrix};
use crate::{Error, Result};

pub use snapshot::{read_codebooks, read_sequences, write_codebooks, write_sequences};

/// One user's base spreading sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadSequence(Vec<Complex64>);

impl SpreadSequence {
    /// Wraps raw entries. No normalization is applied.
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("spreading sequence must be non-empty"));
        }
        Ok(Self(entries))
    }

    /// Builds `exp(i 2 pi mu_n) / sqrt(N)` from phases `mu_n` in cycles.
    pub fn from_phases(phases: &[f64]) -> Result<Self> {
        let scale = 1.0 / (phases.len() as f64).sqrt();
        Self::new(
            phases
                .iter()
                .map(|&mu| Complex64::from_polar(scale, 2.0 * PI * mu))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.0
    }
}

/// Right circular shift: `out[n] = s[(n - j) mod N]`.
pub fn circular_shift(s: &SpreadSequence, j: usize) -> SpreadSequence {
    let mut v = s.0.clone();
    let len = v.len();
    v.rotate_right(j % len);
    SpreadSequence(v)
}

/// Shift amounts for one user's codebook; entry `d` is the shift used for
/// data symbol `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftPattern(Vec<usize>);

impl ShiftPattern {
    /// Validates that the pattern starts at 0 and has distinct entries.
    ///
    /// A single-entry pattern `[0]` is accepted so that degenerate
    /// one-codeword codebooks can be expressed; pattern design itself
    /// requires at least two codewords.
    pub fn new(shifts: Vec<usize>) -> Result<Self> {
        match shifts.first() {
            None => return Err(Error::invalid("shift pattern must be non-empty")),
            Some(&first) if first != 0 => {
                return Err(Error::invalid("shift pattern must start with 0"))
            }
            _ => {}
        }
        let mut sorted = shifts.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("shift pattern entries must be distinct"));
        }
        Ok(Self(shifts))
    }

    pub fn shifts(&self) -> &[usize] {
        &self.0
    }

    /// Modulation order, i.e. the number of codewords the pattern yields.
    pub fn order(&self) -> usize {
        self.0.len()
    }

    /// Shift for a zero-based data symbol.
    pub fn shift_for(&self, symbol: usize) -> Result<usize> {
        self.0.get(symbol).copied().ok_or(Error::SymbolOutOfRange {
            symbol,
            order: self.0.len(),
        })
    }
}

/// A user's codewords: column `m` of `codewords` is the base sequence
/// shifted by `pattern.shifts()[m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    base: SpreadSequence,
    pattern: ShiftPattern,
    codewords: CMatrix,
}

impl Codebook {
    pub fn base(&self) -> &SpreadSequence {
        &self.base
    }

    pub fn pattern(&self) -> &ShiftPattern {
        &self.pattern
    }

    pub fn order(&self) -> usize {
        self.pattern.order()
    }

    pub fn seq_len(&self) -> usize {
        self.base.len()
    }

    /// `N x M` matrix, one codeword per column.
    pub fn codewords(&self) -> &CMatrix {
        &self.codewords
    }

    pub fn codeword(&self, m: usize) -> &[Complex64] {
        col(&self.codewords, m)
    }
}

/// The `N x K` matrix of every user's base sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceMatrix {
    matrix: CMatrix,
    seed: u64,
}

impl SequenceMatrix {
    pub fn from_matrix(matrix: CMatrix, seed: u64) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::invalid("sequence matrix must be non-empty"));
        }
        Ok(Self { matrix, seed })
    }

    pub fn seq_len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn users(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn column(&self, k: usize) -> &[Complex64] {
        col(&self.matrix, k)
    }

    pub fn sequence(&self, k: usize) -> SpreadSequence {
        SpreadSequence(self.column(k).to_vec())
    }
}

/// Draws `users` random unit-circle sequences of length `seq_len`.
///
/// Entries are filled user by user from a ChaCha8 stream, so the result
/// depends only on `(users, seq_len, seed)`.
pub fn generate_base_sequences(users: usize, seq_len: usize, seed: u64) -> Result<SequenceMatrix> {
    if users == 0 || seq_len == 0 {
        return Err(Error::invalid(format!(
            "need at least one user and one chip (K={users}, N={seq_len})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (seq_len as f64).sqrt();
    let data: Vec<Complex64> = (0..users * seq_len)
        .map(|_| {
            let mu: f64 = rng.random();
            Complex64::from_polar(scale, 2.0 * PI * mu)
        })
        .collect();
    Ok(SequenceMatrix {
        matrix: CMatrix::from_vec(seq_len, users, data),
        seed,
    })
}

/// `|<s, shift(s, d)>|` for every lag `d` in `0..N`.
///
/// Shifting both arguments by the same amount is unitary, so the
/// correlation between shifts `a` and `b` only depends on `b - a mod N`.
fn cyclic_autocorrelation(s: &SpreadSequence) -> Vec<f64> {
    let n = s.len();
    (0..n)
        .map(|d| {
            let shifted = circular_shift(s, d);
            cdot(s.entries(), shifted.entries()).norm()
        })
        .collect()
}

/// Greedy shift-pattern search.
///
/// Starts from shift 0; each further entry is the unused shift in `1..N`
/// that minimizes the summed correlation magnitude with all shifts chosen
/// so far. Ties go to the smallest shift.
pub fn design_shift_pattern(s: &SpreadSequence, order: usize) -> Result<ShiftPattern> {
    let n = s.len();
    if order < 2 {
        return Err(Error::invalid(format!(
            "modulation order must be at least 2, got {order}"
        )));
    }
    if order > n {
        return Err(Error::invalid(format!(
            "modulation order {order} exceeds sequence length {n}"
        )));
    }
    let acf = cyclic_autocorrelation(s);
    let mut chosen = vec![0usize];
    let mut used = vec![false; n];
    used[0] = true;
    // running sum over chosen shifts, indexed by candidate shift
    let mut score = vec![0.0f64; n];
    for j in 1..n {
        score[j] = acf[j];
    }
    while chosen.len() < order {
        let mut best: Option<(usize, f64)> = None;
        for j in 1..n {
            if used[j] {
                continue;
            }
            if best.map_or(true, |(_, v)| score[j] < v) {
                best = Some((j, score[j]));
            }
        }
        let (j, _) = best.expect("order <= N leaves a free shift");
        used[j] = true;
        chosen.push(j);
        for c in 1..n {
            score[c] += acf[(c + n - j) % n];
        }
    }
    ShiftPattern::new(chosen)
}

/// Pattern with shift 0 followed by `order - 1` distinct shifts drawn
/// uniformly from `1..N`. Used as the baseline against the greedy design.
pub fn random_shift_pattern<R: Rng + ?Sized>(
    seq_len: usize,
    order: usize,
    rng: &mut R,
) -> Result<ShiftPattern> {
    if order < 1 || order > seq_len {
        return Err(Error::invalid(format!(
            "modulation order {order} must lie in 1..={seq_len}"
        )));
    }
    let mut shifts = vec![0];
    shifts.extend(
        rand::seq::index::sample(rng, seq_len - 1, order - 1)
            .into_iter()
            .map(|j| j + 1),
    );
    ShiftPattern::new(shifts)
}

pub fn build_codebook(s: &SpreadSequence, pattern: &ShiftPattern) -> Result<Codebook> {
    let n = s.len();
    if pattern.order() > n {
        return Err(Error::invalid(format!(
            "pattern of length {} does not fit sequence length {n}",
            pattern.order()
        )));
    }
    if let Some(&bad) = pattern.shifts().iter().find(|&&j| j >= n) {
        return Err(Error::invalid(format!(
            "shift {bad} out of range for sequence length {n}"
        )));
    }
    let mut data = Vec::with_capacity(n * pattern.order());
    for &j in pattern.shifts() {
        data.extend(circular_shift(s, j).into_entries());
    }
    Ok(Codebook {
        base: s.clone(),
        pattern: pattern.clone(),
        codewords: CMatrix::from_vec(n, pattern.order(), data),
    })
}

/// Designs a pattern and codebook for every column of `sequences`.
pub fn build_all_codebooks(sequences: &SequenceMatrix, order: usize) -> Result<Vec<Codebook>> {
    (0..sequences.users())
        .map(|k| {
            let s = sequences.sequence(k);
            let p = design_shift_pattern(&s, order)?;
            build_codebook(&s, &p)
        })
        .collect()
}

/// Minimum distance of an `M`-PSK constellation with symbol energy `es`.
pub fn psk_dmin(order: usize, es: f64) -> Result<f64> {
    if order < 2 {
        return Err(Error::invalid(format!("PSK order must be >= 2, got {order}")));
    }
    if !(es > 0.0) {
        return Err(Error::invalid(format!("symbol energy must be positive, got {es}")));
    }
    Ok(2.0 * es.sqrt() * (PI / order as f64).sin())
}

/// Summary statistics of codeword correlation magnitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationStats {
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceReport {
    /// Per user: correlation over distinct codeword pairs in that codebook.
    pub intra: Vec<CorrelationStats>,
    /// Over every codeword pair drawn from two different users; `None`
    /// with a single codebook.
    pub inter: Option<CorrelationStats>,
}

pub fn coherence_report(codebooks: &[Codebook]) -> Result<CoherenceReport> {
    let first = codebooks
        .first()
        .ok_or_else(|| Error::invalid("coherence report needs at least one codebook"))?;
    let n = first.seq_len();
    if let Some(cb) = codebooks.iter().find(|cb| cb.seq_len() != n) {
        return Err(Error::DimensionMismatch {
            what: "codebook sequence length",
            expected: n,
            got: cb.seq_len(),
        });
    }

    let intra = codebooks
        .iter()
        .map(|cb| {
            let mut max = 0.0f64;
            let mut sum = 0.0;
            let mut count = 0usize;
            for a in 0..cb.order() {
                for b in a + 1..cb.order() {
                    let c = cdot(cb.codeword(a), cb.codeword(b)).norm();
                    max = max.max(c);
                    sum += c;
                    count += 1;
                }
            }
            CorrelationStats {
                max,
                mean: if count > 0 { sum / count as f64 } else { 0.0 },
            }
        })
        .collect();

    let inter = if codebooks.len() < 2 {
        None
    } else {
        let mut max = 0.0f64;
        let mut sum = 0.0;
        let mut count = 0usize;
        for (i, a) in codebooks.iter().enumerate() {
            for b in &codebooks[i + 1..] {
                for ma in 0..a.order() {
                    for mb in 0..b.order() {
                        let c = cdot(a.codeword(ma), b.codeword(mb)).norm();
                        max = max.max(c);
                        sum += c;
                        count += 1;
                    }
                }
            }
        }
        Some(CorrelationStats {
            max,
            mean: sum / count as f64,
        })
    };
    Ok(CoherenceReport { intra, inter })
}
