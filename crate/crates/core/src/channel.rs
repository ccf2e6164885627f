//! Sporadic activity, block-fading frequency-selective channels, the
//! multiuser superposition and AWGN.
//!
//! Everything is modelled per subcarrier in the frequency domain: user
//! `k`'s chips on OFDM symbol `l` are multiplied elementwise by the
//! channel column of the fading block that contains `l`, and all active
//! users add up at the receiver.

use num_complex::Complex64;
use rand::distr::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{col, col_mut, CMatrix};
use crate::phy_tx::SpreadFrame;
use crate::{Error, Result};

/// Activity flags of all `K` users in one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityVector {
    flags: Vec<bool>,
}

impl ActivityVector {
    pub fn new(flags: Vec<bool>) -> Self {
        Self { flags }
    }

    /// Marks exactly the listed users active.
    pub fn from_active(users: usize, active: &[usize]) -> Result<Self> {
        let mut flags = vec![false; users];
        for &k in active {
            *flags
                .get_mut(k)
                .ok_or_else(|| Error::invalid(format!("user {k} out of range 0..{users}")))? = true;
        }
        Ok(Self { flags })
    }

    pub fn users(&self) -> usize {
        self.flags.len()
    }

    pub fn is_active(&self, k: usize) -> bool {
        self.flags[k]
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn active_count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn active_users(&self) -> Vec<usize> {
        (0..self.flags.len()).filter(|&k| self.flags[k]).collect()
    }
}

/// I.i.d. Bernoulli(`p_active`) activity for `users` users.
pub fn draw_activity(users: usize, p_active: f64, seed: u64) -> Result<ActivityVector> {
    let dist = Bernoulli::new(p_active)
        .map_err(|_| Error::invalid(format!("activity probability {p_active} outside [0, 1]")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(ActivityVector {
        flags: (0..users).map(|_| dist.sample(&mut rng)).collect(),
    })
}

/// Exponential power-delay profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingProfile {
    pub taps: usize,
    /// Tap `l` has power proportional to `exp(-decay * l / taps)`.
    pub decay: f64,
}

impl FadingProfile {
    /// Tap powers normalized to unit sum.
    pub fn tap_powers(&self) -> Vec<f64> {
        let raw: Vec<f64> = (0..self.taps)
            .map(|l| (-self.decay * l as f64 / self.taps as f64).exp())
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|p| p / total).collect()
    }
}

/// Frequency-domain channel of every user during one fading block.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    /// `N x K`, column `k` is user `k`'s per-subcarrier coefficient.
    pub h: CMatrix,
    /// OFDM symbols covered by this block.
    pub block_len: usize,
    /// Noise variance per complex entry at the receiver.
    pub noise_var: f64,
    pub tap_powers: Vec<f64>,
}

impl ChannelState {
    /// All-ones channel, i.e. no fading.
    pub fn flat(users: usize, seq_len: usize, block_len: usize) -> Self {
        Self {
            h: CMatrix::from_element(seq_len, users, Complex64::new(1.0, 0.0)),
            block_len,
            noise_var: 0.0,
            tap_powers: vec![1.0],
        }
    }

    pub fn user(&self, k: usize) -> &[Complex64] {
        col(&self.h, k)
    }

    pub fn users(&self) -> usize {
        self.h.ncols()
    }

    pub fn seq_len(&self) -> usize {
        self.h.nrows()
    }
}

/// Fading block index of OFDM symbol `l`.
#[inline]
pub fn block_of(l: usize, block_len: usize) -> usize {
    l / block_len
}

/// Channel state in force during OFDM symbol `l`.
pub fn state_for_symbol(states: &[ChannelState], l: usize) -> &ChannelState {
    &states[block_of(l, states[0].block_len)]
}

/// Number of fading blocks needed to cover `symbols` OFDM symbols.
pub fn blocks_for(symbols: usize, block_len: usize) -> usize {
    symbols.div_ceil(block_len).max(1)
}

/// Draws `n_blocks` independent channel realizations for all users.
///
/// Per user and block, `taps` circular Gaussian taps with the profile's
/// powers are drawn and transformed with an `N`-point DFT:
/// `H[n] = sum_l g_l exp(-i 2 pi n l / N)`.
pub fn generate_block_fading(
    users: usize,
    seq_len: usize,
    n_blocks: usize,
    block_len: usize,
    profile: FadingProfile,
    seed: u64,
) -> Result<Vec<ChannelState>> {
    if profile.taps == 0 || profile.taps > seq_len {
        return Err(Error::invalid(format!(
            "tap count {} must lie in 1..={seq_len}",
            profile.taps
        )));
    }
    if block_len == 0 {
        return Err(Error::invalid("fading block length must be positive"));
    }
    let powers = profile.tap_powers();
    let amps: Vec<f64> = powers.iter().map(|p| (p / 2.0).sqrt()).collect();
    // twiddle[n * taps + l] = exp(-i 2 pi n l / N)
    let twiddle: Vec<Complex64> = (0..seq_len)
        .flat_map(|n| {
            (0..profile.taps).map(move |l| {
                let phase = -2.0 * std::f64::consts::PI * ((n * l) % seq_len) as f64 / seq_len as f64;
                Complex64::from_polar(1.0, phase)
            })
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut taps = vec![Complex64::default(); profile.taps];
    let mut out = Vec::with_capacity(n_blocks);
    for _ in 0..n_blocks {
        let mut h = CMatrix::zeros(seq_len, users);
        for k in 0..users {
            for (g, &a) in taps.iter_mut().zip(&amps) {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                *g = Complex64::new(a * re, a * im);
            }
            let column = col_mut(&mut h, k);
            for (n, hn) in column.iter_mut().enumerate() {
                let tw = &twiddle[n * profile.taps..(n + 1) * profile.taps];
                *hn = taps.iter().zip(tw).map(|(g, w)| g * w).sum();
            }
        }
        out.push(ChannelState {
            h,
            block_len,
            noise_var: 0.0,
            tap_powers: powers.clone(),
        });
    }
    Ok(out)
}

/// `N x L_d` matrix seen by the receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedFrame {
    pub y: CMatrix,
}

impl ReceivedFrame {
    pub fn zeros(seq_len: usize, symbols: usize) -> Self {
        Self {
            y: CMatrix::zeros(seq_len, symbols),
        }
    }

    pub fn seq_len(&self) -> usize {
        self.y.nrows()
    }

    pub fn symbols(&self) -> usize {
        self.y.ncols()
    }

    pub fn column(&self, l: usize) -> &[Complex64] {
        col(&self.y, l)
    }
}

/// Noiseless multiuser sum: column `l` is the sum over active users of
/// `H_b[:, k] .* frame_k[:, l]` with `b` the block covering `l`.
///
/// `frames` pairs a user index with that user's spread frame; frames of
/// inactive users are ignored.
pub fn superpose(
    frames: &[(usize, &SpreadFrame)],
    states: &[ChannelState],
    activity: &ActivityVector,
    seq_len: usize,
    symbols: usize,
) -> Result<ReceivedFrame> {
    let first = states
        .first()
        .ok_or_else(|| Error::invalid("no channel states supplied"))?;
    let covered = states.len() * first.block_len;
    if covered < symbols {
        return Err(Error::DimensionMismatch {
            what: "OFDM symbols covered by channel blocks",
            expected: symbols,
            got: covered,
        });
    }
    if first.seq_len() != seq_len {
        return Err(Error::DimensionMismatch {
            what: "channel subcarriers",
            expected: seq_len,
            got: first.seq_len(),
        });
    }
    let mut out = ReceivedFrame::zeros(seq_len, symbols);
    for &(k, frame) in frames {
        if k >= activity.users() || !activity.is_active(k) {
            continue;
        }
        if frame.seq_len() != seq_len {
            return Err(Error::DimensionMismatch {
                what: "frame subcarriers",
                expected: seq_len,
                got: frame.seq_len(),
            });
        }
        if frame.symbols() != symbols {
            return Err(Error::DimensionMismatch {
                what: "frame OFDM symbols",
                expected: symbols,
                got: frame.symbols(),
            });
        }
        for l in 0..symbols {
            let h = state_for_symbol(states, l).user(k);
            let x = frame.column(l);
            for ((yn, hn), xn) in col_mut(&mut out.y, l).iter_mut().zip(h).zip(x) {
                *yn += hn * xn;
            }
        }
    }
    Ok(out)
}

/// Noise variance per complex entry for a given `Eb/N0`.
///
/// Each transmitted column carries unit energy and `rate * log2(M)`
/// information bits, so `Eb = 1 / (rate * log2 M)` and
/// `sigma^2 = N0 = 1 / (rate * log2(M) * 10^(EbN0/10))`.
/// An infinite `Eb/N0` gives zero noise.
pub fn noise_variance(ebn0_db: f64, rate: f64, bits_per_symbol: usize) -> f64 {
    if ebn0_db == f64::INFINITY {
        return 0.0;
    }
    1.0 / (rate * bits_per_symbol as f64 * 10f64.powf(ebn0_db / 10.0))
}

/// Adds circular complex Gaussian noise of variance `noise_var` per entry.
pub fn add_noise(mut frame: ReceivedFrame, noise_var: f64, seed: u64) -> ReceivedFrame {
    if noise_var == 0.0 {
        return frame;
    }
    let sd = (noise_var / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for z in frame.y.iter_mut() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *z += Complex64::new(sd * re, sd * im);
    }
    frame
}

/// AWGN at the given `Eb/N0` (dB) for code rate `rate` and order `M`.
pub fn add_awgn(frame: ReceivedFrame, ebn0_db: f64, rate: f64, order: usize, seed: u64) -> Result<ReceivedFrame> {
    if ebn0_db.is_nan() || ebn0_db == f64::NEG_INFINITY {
        return Err(Error::invalid(format!("Eb/N0 must be finite or +inf, got {ebn0_db}")));
    }
    let bps = crate::phy_tx::bits_per_symbol(order)?;
    Ok(add_noise(frame, noise_variance(ebn0_db, rate, bps), seed))
}
