//! One Monte-Carlo frame through every configured scheme and SNR point.
//!
//! All random draws of a trial (activity, bits, channel, noise) come from
//! streams keyed by `(stream seed, trial index)` and are shared by both
//! schemes and all SNR points, so the comparisons are paired. Noise is
//! drawn once at unit variance and scaled per SNR point.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{mix, PatternMode, SimConfig, StopMode};
use crate::channel::{
    add_noise, blocks_for, draw_activity, generate_block_fading, noise_variance, superpose, ActivityVector,
    ChannelState, FadingProfile, ReceivedFrame,
};
use crate::codebook::{
    build_codebook, design_shift_pattern, generate_base_sequences, random_shift_pattern, Codebook, SequenceMatrix,
    ShiftPattern,
};
use crate::phy_tx::{bits_per_symbol, deinterleave, transmit, Scheme, SpreadFrame, UserFrame};
use crate::rx_mud::{gmp_detect_with, gomp_detect_with, viterbi_decode, DetectionResult, OperationCounters, StoppingRule};
use crate::{Bit, Result};

/// Threshold used instead of the noise-based one when there is no noise.
const NOISELESS_GAMMA: f64 = 1e-9;

/// Per-sweep state that does not change between trials.
#[derive(Debug, Clone)]
pub struct Setup {
    pub cfg: SimConfig,
    pub sequences: SequenceMatrix,
    pub codebooks: Vec<Codebook>,
    pub patterns: Vec<ShiftPattern>,
}

impl Setup {
    pub fn new(cfg: SimConfig) -> Result<Self> {
        cfg.validate()?;
        let sequences = generate_base_sequences(cfg.users, cfg.seq_len, cfg.seeds.sequence)?;
        let mut codebooks = Vec::with_capacity(cfg.users);
        for k in 0..cfg.users {
            let s = sequences.sequence(k);
            let pattern = match cfg.pattern {
                PatternMode::Greedy => design_shift_pattern(&s, cfg.order)?,
                PatternMode::Random => {
                    let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seeds.pattern, k as u64));
                    random_shift_pattern(cfg.seq_len, cfg.order, &mut rng)?
                }
            };
            codebooks.push(build_codebook(&s, &pattern)?);
        }
        let patterns = codebooks.iter().map(|c| c.pattern().clone()).collect();
        Ok(Self {
            cfg,
            sequences,
            codebooks,
            patterns,
        })
    }

    fn interleaver_seed(&self, k: usize) -> u64 {
        mix(self.cfg.seeds.interleaver, k as u64)
    }
}

/// Counts for one `(scheme, snr)` point of one trial.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Outcome {
    /// Information bits of the active users.
    pub bits: u64,
    pub bit_errors: u64,
    /// Active user frames, and those with at least one bit error.
    pub packets: u64,
    pub packet_errors: u64,
    /// Active users not detected.
    pub missed: u64,
    /// Inactive users detected.
    pub false_alarms: u64,
    pub inactive: u64,
    pub ops: OperationCounters,
    /// Wall time spent in detection and decoding, in seconds.
    #[serde(skip)]
    pub seconds: f64,
}

/// Detector output of one trial point, kept for the trace file.
#[derive(Debug, Clone, Serialize)]
pub struct TraceEntry {
    pub trial: u64,
    pub scheme: &'static str,
    pub snr_db: f64,
    pub active: Vec<usize>,
    pub detection: DetectionResult,
}

#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial: u64,
    pub active: Vec<usize>,
    /// Indexed `[scheme][snr]` in config order.
    pub outcomes: Vec<Vec<Outcome>>,
    pub traces: Vec<TraceEntry>,
}

fn draw_users(cfg: &SimConfig, trial: u64) -> Result<ActivityVector> {
    let seed = mix(cfg.seeds.activity, trial);
    match cfg.forced_active {
        Some(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let chosen = rand::seq::index::sample(&mut rng, cfg.users, n).into_vec();
            ActivityVector::from_active(cfg.users, &chosen)
        }
        None => draw_activity(cfg.users, cfg.p_active, seed),
    }
}

/// Runs trial `trial` of the sweep. Deterministic in `(setup, trial)`.
pub fn run_trial(setup: &Setup, trial: u64) -> Result<TrialRecord> {
    let cfg = &setup.cfg;
    let (n, ld) = (cfg.seq_len, cfg.frame_symbols());

    let activity = draw_users(cfg, trial)?;
    let active = activity.active_users();
    let mut data_rng = ChaCha8Rng::seed_from_u64(mix(cfg.seeds.data, trial));
    let frames: Vec<(usize, UserFrame)> = active
        .iter()
        .map(|&k| {
            let bits: Vec<Bit> = (0..cfg.info_bits).map(|_| data_rng.random_range(0..2u8)).collect();
            UserFrame::encode(bits, cfg.order, setup.interleaver_seed(k)).map(|f| (k, f))
        })
        .collect::<Result<_>>()?;

    let profile = FadingProfile {
        taps: cfg.taps,
        decay: cfg.decay,
    };
    let channel = generate_block_fading(
        cfg.users,
        n,
        blocks_for(ld, cfg.block_len),
        cfg.block_len,
        profile,
        mix(cfg.seeds.channel, trial),
    )?;
    let unit_noise = add_noise(ReceivedFrame::zeros(n, ld), 1.0, mix(cfg.seeds.noise, trial));
    let bps = bits_per_symbol(cfg.order)?;

    let mut record = TrialRecord {
        trial,
        active: active.clone(),
        outcomes: Vec::new(),
        traces: Vec::new(),
    };
    for scheme in cfg.schemes() {
        let spread: Vec<(usize, SpreadFrame)> = frames
            .iter()
            .map(|(k, f)| transmit(f, scheme, &setup.codebooks[*k], setup.codebooks[*k].base()).map(|s| (*k, s)))
            .collect::<Result<_>>()?;
        let refs: Vec<(usize, &SpreadFrame)> = spread.iter().map(|(k, s)| (*k, s)).collect();
        let clean = superpose(&refs, &channel, &activity, n, ld)?;

        let mut per_snr = Vec::with_capacity(cfg.snr_db.len());
        for &snr in &cfg.snr_db {
            let var = noise_variance(snr, cfg.code_rate(), bps);
            let mut y = clean.clone();
            if var > 0.0 {
                let sd = var.sqrt();
                for (yi, wi) in y.y.iter_mut().zip(unit_noise.y.iter()) {
                    *yi += wi * sd;
                }
            }
            let stop = match cfg.stop {
                StopMode::Oracle => StoppingRule::Oracle {
                    active: active.len(),
                },
                StopMode::Threshold if var > 0.0 => StoppingRule::noise_threshold(n, ld, var, cfg.gamma_delta),
                StopMode::Threshold => StoppingRule::Threshold {
                    gamma: NOISELESS_GAMMA * ((n * ld) as f64).sqrt(),
                },
            };
            let started = Instant::now();
            let detection = detect(setup, scheme, &y, &channel, stop)?;
            let mut outcome = evaluate(setup, &frames, &activity, &detection)?;
            outcome.seconds = started.elapsed().as_secs_f64();
            if trial < cfg.trace_frames as u64 {
                record.traces.push(TraceEntry {
                    trial,
                    scheme: scheme.name(),
                    snr_db: snr,
                    active: active.clone(),
                    detection,
                });
            }
            per_snr.push(outcome);
        }
        record.outcomes.push(per_snr);
    }
    Ok(record)
}

fn detect(
    setup: &Setup,
    scheme: Scheme,
    y: &ReceivedFrame,
    channel: &[ChannelState],
    stop: StoppingRule,
) -> Result<DetectionResult> {
    let metric = setup.cfg.activity_metric;
    match scheme {
        Scheme::Direct => gmp_detect_with(y, &setup.sequences, channel, &setup.patterns, stop, metric),
        Scheme::Conventional => gomp_detect_with(y, &setup.sequences, channel, stop, setup.cfg.order, metric),
    }
}

/// Decodes every detected active user and counts errors. An active user
/// that was not detected loses all of its bits.
fn evaluate(
    setup: &Setup,
    frames: &[(usize, UserFrame)],
    activity: &ActivityVector,
    detection: &DetectionResult,
) -> Result<Outcome> {
    let cfg = &setup.cfg;
    let mut out = Outcome {
        ops: detection.op_counts,
        inactive: (activity.users() - activity.active_count()) as u64,
        false_alarms: detection.active_set.iter().filter(|&&k| !activity.is_active(k)).count() as u64,
        ..Outcome::default()
    };
    for (k, frame) in frames {
        let errors = if detection.is_detected(*k) {
            let coded = detection.coded_bits(*k, cfg.coded_len())?;
            let coded = deinterleave(&coded, setup.interleaver_seed(*k), cfg.coded_len())?;
            let decoded = viterbi_decode(&coded, cfg.info_bits)?;
            decoded.iter().zip(&frame.info_bits).filter(|(a, b)| a != b).count() as u64
        } else {
            out.missed += 1;
            cfg.info_bits as u64
        };
        out.bits += cfg.info_bits as u64;
        out.bit_errors += errors;
        out.packets += 1;
        out.packet_errors += u64::from(errors > 0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimConfig {
        SimConfig::from_toml_str(
            "users = 40\nseq_len = 16\norder = 4\np_active = 0.05\nsnr_db = [inf, 10.0]\nframes = 4\ninfo_bits = 20",
        )
        .unwrap()
    }

    #[test]
    fn trials_are_reproducible() {
        let setup = Setup::new(small()).unwrap();
        let a = run_trial(&setup, 3).unwrap();
        let b = run_trial(&setup, 3).unwrap();
        assert_eq!(a.active, b.active);
        let strip = |r: &TrialRecord| -> Vec<Vec<Outcome>> {
            r.outcomes
                .iter()
                .map(|v| v.iter().map(|o| Outcome { seconds: 0.0, ..o.clone() }).collect())
                .collect()
        };
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn single_forced_user_decodes_without_noise() {
        let mut cfg = small();
        cfg.forced_active = Some(1);
        cfg.snr_db = vec![f64::INFINITY];
        let setup = Setup::new(cfg).unwrap();
        for t in 0..5 {
            let rec = run_trial(&setup, t).unwrap();
            assert_eq!(rec.active.len(), 1);
            for o in rec.outcomes.iter().flatten() {
                assert_eq!((o.bits, o.bit_errors, o.missed, o.false_alarms), (20, 0, 0, 0));
            }
        }
    }

    #[test]
    fn silent_frames_carry_no_bits() {
        let mut cfg = small();
        cfg.p_active = 0.0;
        let setup = Setup::new(cfg).unwrap();
        let rec = run_trial(&setup, 0).unwrap();
        assert!(rec.active.is_empty());
        for o in rec.outcomes.iter().flatten() {
            assert_eq!((o.bits, o.bit_errors, o.packets), (0, 0, 0));
            assert_eq!(o.inactive, 40);
        }
    }
}
